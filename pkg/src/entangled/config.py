"""
JSON-shaped configuration: systems, operators, chains and experiments.

Every ``*_to_dict`` output is the normal form of the matching ``*_from_dict``
input, so ``to_dict(from_dict(x))`` is idempotent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engine import DEFAULT_CACHE_BYTES, STRATEGIES, ChainSpec
from .operators import OperatorSpec
from .space import FourierFunction, from_dict as function_from_dict, to_dict as function_to_dict
from .systems import SystemDescriptor

EXPERIMENT_SCHEMA = "entangled-experiment/1"
PREDICTORS = ("weak_mixing", "projection_chain", "resonance", "zero", "none")


class ConfigError(ValueError):
    pass


def _pairs(values):
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex).ravel()]


def function_from_config(d: dict):
    """A serialized FunctionRep, or the sparse fourier shorthand ``{"rep": "fourier", "K": .., "modes": {"j": [re, im]}}``."""
    if not isinstance(d, dict):
        raise ConfigError(f"function spec must be an object, got {type(d).__name__}")
    try:
        if d.get("rep") == "fourier" and "modes" in d:
            modes = {int(j): complex(*v) for j, v in d["modes"].items()}
            return FourierFunction.from_modes(modes, int(d["K"]))
        return function_from_dict(d)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad function spec: {exc}") from exc


def system_to_dict(s: SystemDescriptor) -> dict:
    d = {"kind": s.kind}
    if s.theta is not None:
        d["theta"] = float(s.theta)
    if s.q is not None:
        d["q"] = int(s.q)
    if s.cutoff is not None:
        d["cutoff"] = int(s.cutoff)
    return d


def system_from_dict(d: dict) -> SystemDescriptor:
    try:
        return SystemDescriptor(d["kind"], d.get("theta"), d.get("q"), d.get("cutoff"))
    except KeyError as exc:
        raise ConfigError(f"system spec missing {exc}") from exc


def operator_to_dict_matrix(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"type": "matrix", "data": [_pairs(row) for row in M]}


def operator_to_dict(op: OperatorSpec) -> dict:
    if op.variant == "volterra":
        return {"type": "volterra", "power": int(op.power)}
    if op.variant == "finite_rank":
        return {"type": "finite_rank",
                "pairs": [[function_to_dict(u), function_to_dict(v)] for u, v in op.pairs]}
    if op.variant == "multiplication":
        return {"type": "multiplication", "g": function_to_dict(op.g)}
    if op.variant == "matrix":
        return operator_to_dict_matrix(op.matrix)
    return {"type": "identity"}


def operator_from_dict(d: dict) -> OperatorSpec:
    kind = d.get("type")
    try:
        if kind == "volterra":
            return OperatorSpec.volterra(int(d.get("power", 1)))
        if kind == "finite_rank":
            return OperatorSpec.finite_rank(
                [(function_from_config(u), function_from_config(v)) for u, v in d["pairs"]]
            )
        if kind == "multiplication":
            return OperatorSpec.multiplication(function_from_config(d["g"]))
        if kind == "matrix":
            return OperatorSpec.from_matrix([[complex(*p) for p in row] for row in d["data"]])
        if kind == "identity":
            return OperatorSpec.identity()
    except KeyError as exc:
        raise ConfigError(f"operator spec missing {exc}") from exc
    raise ConfigError(f"unknown operator type {kind!r}")


def chain_to_dict(chain: ChainSpec) -> dict:
    d = {
        "alpha": list(chain.alpha),
        "k": chain.k,
        "systems": [system_to_dict(s) for s in chain.systems],
        "operators": [operator_to_dict(op) for op in chain.operators],
        "f": function_to_dict(chain.f),
        "continuous": bool(chain.continuous),
    }
    if chain.exponent_polys is not None:
        d["exponent_polys"] = [list(p) for p in chain.exponent_polys]
    return d


def chain_from_dict(d: dict) -> ChainSpec:
    for key in ("alpha", "systems", "operators", "f"):
        if key not in d:
            raise ConfigError(f"chain config missing {key!r}")
    return ChainSpec(
        alpha=tuple(d["alpha"]),
        systems=tuple(system_from_dict(s) for s in d["systems"]),
        operators=tuple(operator_from_dict(o) for o in d["operators"]),
        f=function_from_config(d["f"]),
        k=d.get("k"),
        exponent_polys=d.get("exponent_polys"),
        continuous=bool(d.get("continuous", False)),
    )


def geometric(start, ratio, count) -> list:
    out = [start * ratio**i for i in range(count)]
    return [int(x) if float(x).is_integer() else float(x) for x in out]


@dataclass
class ExperimentConfig:
    chain: ChainSpec
    schedule: list
    predictor: str = "none"
    sample_count: int = 64
    sample_seed: int = 0
    sample_points: Optional[list] = None
    strategy: str = "naive"
    cache_mb: float = DEFAULT_CACHE_BYTES / 2**20
    workers: int = 1
    abs_mode: bool = False
    resolution: Optional[int] = None
    flow_step: Optional[float] = None
    max_cost: float = 1e8
    out_dir: str = "out"
    name: str = "experiment"
    schedule_spec: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.schedule) < 3:
            raise ConfigError("a schedule needs at least 3 points")
        if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise ConfigError("schedule must be strictly increasing")
        if self.predictor not in PREDICTORS:
            raise ConfigError(f"predictor must be one of {PREDICTORS}")
        if self.sample_points is None and self.sample_count < 1:
            raise ConfigError("sample count must be >= 1")
        if self.chain.continuous:
            if self.strategy not in ("auto", "factorized", "naive"):
                raise ConfigError("flow chains use strategy auto, factorized or naive")
            if not self.flow_step:
                raise ConfigError("flow chains need flow_step")
        elif self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}")

    def naive_cost(self) -> float:
        """Chain evaluations a literal enumeration would need at the last schedule point."""
        N = self.schedule[-1]
        if self.chain.continuous:
            N = N / self.flow_step
        return float(N) ** self.chain.k * self.chain.m

    def to_dict(self) -> dict:
        d = {
            "schema": EXPERIMENT_SCHEMA,
            "name": self.name,
            "chain": chain_to_dict(self.chain),
            "schedule": self.schedule_spec or list(self.schedule),
            "predictor": self.predictor,
            "samples": ({"points": list(self.sample_points)} if self.sample_points is not None
                        else {"count": self.sample_count, "seed": self.sample_seed}),
            "strategy": self.strategy,
            "cache_mb": self.cache_mb,
            "workers": self.workers,
            "abs_mode": self.abs_mode,
            "max_cost": self.max_cost,
            "out_dir": self.out_dir,
        }
        if self.resolution is not None:
            d["resolution"] = self.resolution
        if self.flow_step is not None:
            d["flow_step"] = self.flow_step
        return d


def experiment_from_dict(d: dict) -> ExperimentConfig:
    if d.get("schema", EXPERIMENT_SCHEMA) != EXPERIMENT_SCHEMA:
        raise ConfigError(f"unsupported schema {d.get('schema')!r}")
    if "chain" not in d:
        raise ConfigError("experiment config needs a chain")
    chain = chain_from_dict(d["chain"])
    sched = d.get("schedule")
    spec = {}
    if sched is None:
        sched = [2**6, 2**8, 2**10, 2**12] if chain.k <= 2 else [2**3, 2**4, 2**5, 2**6]
    elif isinstance(sched, dict):
        spec = {"start": sched["start"], "ratio": sched["ratio"], "count": int(sched["count"])}
        sched = geometric(spec["start"], spec["ratio"], spec["count"])
    samples = d.get("samples", {})
    cache_mb = float(d.get("cache_mb", DEFAULT_CACHE_BYTES / 2**20))
    if not math.isfinite(cache_mb) or cache_mb <= 0:
        raise ConfigError("cache_mb must be positive")
    try:
        return ExperimentConfig(
            chain=chain,
            schedule=list(sched),
            predictor=d.get("predictor", "none"),
            sample_count=int(samples.get("count", 64)),
            sample_seed=int(samples.get("seed", 0)),
            sample_points=samples.get("points"),
            strategy=d.get("strategy", "auto" if chain.continuous else "naive"),
            cache_mb=cache_mb,
            workers=int(d.get("workers", 1)),
            abs_mode=bool(d.get("abs_mode", False)),
            resolution=d.get("resolution"),
            flow_step=d.get("flow_step"),
            max_cost=float(d.get("max_cost", 1e8)),
            out_dir=d.get("out_dir", "out"),
            name=d.get("name", "experiment"),
            schedule_spec=spec,
        )
    except (TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
