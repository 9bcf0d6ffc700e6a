"""
Exact reference computations and regression fixtures.

A fixture file is JSON::

    {
      "schema": "entangled-fixture/1",
      "name": "...",
      "generator_version": 1,
      "seed": 7,
      "config": {... chain config ...},
      "schedule": [8],
      "values": [{"label": "N=8/x=0", "value": [re, im]}, ...]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config as cfg
from .engine import brute_force_average

FIXTURE_SCHEMA = "entangled-fixture/1"
GENERATOR_VERSION = 1
FIXTURE_TOL = 1e-10


class FixtureSchemaError(ValueError):
    pass


def geometric_cesaro(lam: complex, N: int) -> complex:
    """``(1/N) sum_{n=1}^N lam^n`` in closed form."""
    lam = complex(lam)
    if abs(lam) > 1 + 1e-12:
        raise ValueError("geometric_cesaro needs |lam| <= 1")
    if lam == 1:
        return 1 + 0j
    return lam * (lam**N - 1) / (lam - 1) / N


@dataclass
class Fixture:
    name: str
    config: dict
    schedule: list
    values: list = field(default_factory=list)      # [(label, complex)]
    seed: int = 0
    generator_version: int = GENERATOR_VERSION

    def to_dict(self) -> dict:
        return {
            "schema": FIXTURE_SCHEMA,
            "name": self.name,
            "generator_version": self.generator_version,
            "seed": self.seed,
            "config": self.config,
            "schedule": list(self.schedule),
            "values": [
                {"label": label, "value": [float(v.real), float(v.imag)]}
                for label, v in self.values
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Fixture":
        if d.get("schema") != FIXTURE_SCHEMA:
            raise FixtureSchemaError(f"unexpected fixture schema {d.get('schema')!r}")
        try:
            return cls(
                name=d["name"],
                config=d["config"],
                schedule=list(d["schedule"]),
                values=[(v["label"], complex(*v["value"])) for v in d["values"]],
                seed=int(d.get("seed", 0)),
                generator_version=int(d["generator_version"]),
            )
        except (KeyError, TypeError) as exc:
            raise FixtureSchemaError(f"malformed fixture: {exc}") from exc

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "Fixture":
        return cls.from_dict(json.loads(Path(path).read_text()))


def compute_fixture_values(config: dict, schedule) -> list:
    """Labeled reference values from brute-force enumeration."""
    chain = cfg.chain_from_dict(config)
    out = []
    for N in schedule:
        avg = brute_force_average(chain, int(N))
        out.extend((f"N={N}/x={x}", complex(v)) for x, v in enumerate(avg.values))
    return out


def make_fixture(name: str, config: dict, schedule, seed: int = 0) -> Fixture:
    fx = Fixture(name, config, list(schedule), seed=seed)
    fx.values = compute_fixture_values(config, schedule)
    return fx


@dataclass
class FixtureCheck:
    name: str
    passed: bool
    max_abs_diff: float
    message: str = ""


def regenerate_fixture(fixture: Fixture, tol: float = FIXTURE_TOL) -> FixtureCheck:
    """Recompute a fixture and diff it against the stored values."""
    if fixture.generator_version != GENERATOR_VERSION:
        raise FixtureSchemaError(
            f"fixture {fixture.name} was generated by version {fixture.generator_version}"
        )
    try:
        fresh = compute_fixture_values(fixture.config, fixture.schedule)
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureSchemaError(f"fixture {fixture.name}: config no longer loads ({exc})") from exc
    labels_old = [label for label, _ in fixture.values]
    labels_new = [label for label, _ in fresh]
    if labels_old != labels_new:
        return FixtureCheck(fixture.name, False, float("inf"), "label mismatch")
    diff = max(
        (abs(a - b) for (_, a), (_, b) in zip(fixture.values, fresh)), default=0.0
    )
    return FixtureCheck(fixture.name, bool(diff <= tol), float(diff))


def regression_fixture_config(seed: int = 2024) -> dict:
    """The q=4, m=3, k=2 chain with seeded random matrix operators."""
    rng = np.random.default_rng(seed)
    q = 4
    mats = [
        rng.uniform(-1, 1, (q, q)) + 1j * rng.uniform(-1, 1, (q, q)) for _ in range(2)
    ]
    f = rng.uniform(-1, 1, q) + 1j * rng.uniform(-1, 1, q)
    return {
        "alpha": [1, 2, 1],
        "k": 2,
        "systems": [{"kind": "finite_cyclic", "q": q}] * 3,
        "operators": [cfg.operator_to_dict_matrix(M) for M in mats],
        "f": {"rep": "finite", "q": q, "values": [[float(v.real), float(v.imag)] for v in f]},
    }


def default_fixtures() -> list:
    """The fixtures shipped in the repository's ``fixtures/`` directory."""
    t2 = {
        "alpha": [1, 1],
        "k": 1,
        "systems": [{"kind": "finite_cyclic", "q": 2}] * 2,
        "operators": [{"type": "identity"}],
        "f": {"rep": "finite", "q": 2, "values": [[1.0, 0.0], [-1.0, 0.0]]},
    }
    mult = {
        "alpha": [1, 2],
        "k": 2,
        "systems": [{"kind": "finite_cyclic", "q": 3}] * 2,
        "operators": [{"type": "multiplication",
                       "g": {"rep": "finite", "q": 3, "values": [[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]}}],
        "f": {"rep": "finite", "q": 3, "values": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]},
    }
    poly = dict(regression_fixture_config(7), exponent_polys=[[0, 1, 1], [0, 1, 1]])
    return [
        make_fixture("regression_q4_m3_k2", regression_fixture_config(2024), [8], seed=2024),
        make_fixture("t2_identity", t2, [1, 2, 5]),
        make_fixture("multiplication_q3", mult, [3]),
        make_fixture("polynomial_q4_m3_k2", poly, [6], seed=7),
    ]


def write_default_fixtures(directory) -> list:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for fx in default_fixtures():
        p = d / f"{fx.name}.json"
        fx.save(p)
        paths.append(p)
    return paths
