"""
Intertwining operators and empirical probes for the twisted-compactness and
joint sup-norm-boundedness hypotheses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .space import (
    CylinderFunction,
    FiniteFunction,
    FourierFunction,
    FunctionRep,
    GridFunction,
    RepresentationError,
    inner_product,
    norm,
)
from .systems import SystemDescriptor, koopman_apply

VARIANTS = ("volterra", "finite_rank", "multiplication", "matrix", "identity")


class UnsupportedOperatorError(ValueError):
    pass


class DegenerateProbeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """
    One operator variant.

    ``volterra``       -- ``power`` fold integral ``int_0^x``
    ``finite_rank``    -- ``f -> sum_j <f, u_j> v_j`` for ``pairs = [(u_j, v_j)]``
    ``multiplication`` -- pointwise product with ``g``
    ``matrix``         -- ``q x q`` matrix acting on functions on ``Z_q``
    ``identity``
    """

    variant: str
    power: int = 1
    pairs: tuple = ()
    g: FunctionRep = None
    matrix: np.ndarray = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown operator variant {self.variant!r}")
        if self.variant == "volterra" and int(self.power) < 1:
            raise ValueError("volterra power must be >= 1")
        if self.variant == "finite_rank":
            pairs = tuple((u, v) for u, v in self.pairs)
            if not pairs:
                raise ValueError("finite_rank needs at least one (u, v) pair")
            kinds = {f.shape_key() for pair in pairs for f in pair}
            if len(kinds) != 1:
                raise RepresentationError("finite_rank pairs must share one representation")
            object.__setattr__(self, "pairs", pairs)
        if self.variant == "multiplication" and self.g is None:
            raise ValueError("multiplication needs a multiplier g")
        if self.variant == "matrix":
            mat = np.array(self.matrix, dtype=complex)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise ValueError("matrix operator needs a square matrix")
            mat.setflags(write=False)
            object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def volterra(cls, power: int = 1):
        return cls("volterra", power=power)

    @classmethod
    def finite_rank(cls, pairs):
        return cls("finite_rank", pairs=tuple(pairs))

    @classmethod
    def multiplication(cls, g: FunctionRep):
        return cls("multiplication", g=g)

    @classmethod
    def from_matrix(cls, matrix):
        return cls("matrix", matrix=matrix)

    @property
    def rank(self) -> int:
        return len(self.pairs)

    def describe(self) -> str:
        if self.variant == "volterra":
            return f"volterra({self.power})"
        if self.variant == "finite_rank":
            return f"finite_rank({self.rank})"
        return self.variant


def _volterra_fourier(c: np.ndarray) -> np.ndarray:
    """Exact action of the integral on the span of ``e_{-K..K}``, truncated at K."""
    K = (c.size - 1) // 2
    j = np.arange(-K, K + 1)
    inv = np.zeros(c.size, dtype=complex)
    nz = j != 0
    inv[nz] = 1.0 / (2j * np.pi * j[nz])
    c0 = c[K]
    out = c * inv                     # e_j / (2 pi i j)
    out[K] = -np.sum(c * inv)          # - e_0 / (2 pi i j) terms
    # V e_0 = x = 1/2 e_0 - sum_{j != 0} e_j / (2 pi i j)
    out[K] += 0.5 * c0
    out = out - c0 * inv
    return out


def _volterra_grid(values: np.ndarray) -> np.ndarray:
    M = values.size
    return cumulative_trapezoid(values, dx=1.0 / M, initial=0)


def _multiply(f: FunctionRep, g: FunctionRep) -> FunctionRep:
    if isinstance(f, CylinderFunction):
        return f.pointwise_product(g)
    if f.shape_key() != g.shape_key():
        raise RepresentationError(f"multiplier {g.describe()} does not match {f.describe()}")
    if isinstance(f, FourierFunction):
        K = f.K
        full = np.convolve(f.values, g.values)   # modes -2K..2K
        return FourierFunction(full[K:3 * K + 1])
    return f._new(f.values * g.values)


def apply_operator(op: OperatorSpec, f: FunctionRep) -> FunctionRep:
    v = op.variant
    if v == "identity":
        return f
    if v == "volterra":
        if isinstance(f, FourierFunction):
            c = f.values
            for _ in range(op.power):
                c = _volterra_fourier(c)
            return FourierFunction(c)
        if isinstance(f, GridFunction):
            vals = f.values
            for _ in range(op.power):
                vals = _volterra_grid(vals)
            return GridFunction(vals)
        raise UnsupportedOperatorError(f"volterra is defined on [0,1) only, got {f.describe()}")
    if v == "finite_rank":
        u0, _ = op.pairs[0]
        if isinstance(f, CylinderFunction) != isinstance(u0, CylinderFunction) or (
            not isinstance(f, CylinderFunction) and f.shape_key() != u0.shape_key()
        ):
            raise RepresentationError(f"finite_rank operator on {u0.describe()} applied to {f.describe()}")
        out = None
        for u, w in op.pairs:
            term = inner_product(f, u) * w
            out = term if out is None else out + term
        return out
    if v == "multiplication":
        return _multiply(f, op.g)
    if v == "matrix":
        if not isinstance(f, FiniteFunction):
            raise UnsupportedOperatorError("matrix operators act on finite functions only")
        if op.matrix.shape[0] != f.q:
            raise RepresentationError(f"{op.matrix.shape[0]}x{op.matrix.shape[0]} matrix on Z_{f.q}")
        return FiniteFunction(op.matrix @ f.values)
    raise UnsupportedOperatorError(v)


def mean_of_image_of_one(op: OperatorSpec, like: FunctionRep) -> complex:
    """``<A 1, 1>``, with ``1`` built in the representation of ``like``."""
    from .space import mean

    return mean(apply_operator(op, like.constant_like(1.0)))


# -- probes ------------------------------------------------------------------

@dataclass
class ProbeReport:
    finite_rank_dim: int
    max_residual_sup: float
    joint_bound_estimate: float
    n_tested: int
    f_tested: list
    raw_residual_sup: float = 0.0
    residual_l2: float = 0.0
    singular_values: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "finite_rank_dim": self.finite_rank_dim,
            "max_residual_sup": self.max_residual_sup,
            "raw_residual_sup": self.raw_residual_sup,
            "residual_l2": self.residual_l2,
            "joint_bound_estimate": self.joint_bound_estimate,
            "n_tested": self.n_tested,
            "f_tested": list(self.f_tested),
            "singular_values": list(self.singular_values),
        }


def _l2_coordinates(f: FunctionRep):
    """Coordinates in which the L^2 inner product is the Euclidean one."""
    if isinstance(f, FourierFunction):
        return f.values, 1.0
    if isinstance(f, CylinderFunction):
        raise UnsupportedOperatorError("orbit probes need a fixed-shape representation")
    scale = np.sqrt(f.values.size)
    return f.values / scale, scale


def orbit(op: OperatorSpec, system: SystemDescriptor, f: FunctionRep, n_max: int):
    """``[A T^n f for n = 1..n_max]``."""
    out, g = [], f
    for _ in range(n_max):
        g = koopman_apply(system, 1, g)
        out.append(apply_operator(op, g))
    return out


def _residual_sups(vectors, template, basis):
    coords = np.stack([_l2_coordinates(v)[0] for v in vectors], axis=1)
    scale = _l2_coordinates(template)[1]
    if basis.shape[1]:
        resid = coords - basis @ (basis.conj().T @ coords)
    else:
        resid = coords
    sups = [norm(template._new(resid[:, i] * scale), np.inf) for i in range(resid.shape[1])]
    l2 = float(np.max(np.linalg.norm(resid, axis=0))) if resid.size else 0.0
    return max(sups) if sups else 0.0, l2


def probe_twisted_compactness(op, system, f, dim, n_max, joint_bound=None) -> ProbeReport:
    """
    Rank-``dim`` approximation of the orbit ``{A T^n f : 1 <= n <= n_max}``.

    The subspace is spanned by the dominant eigenvectors of the orbit Gram
    matrix; residuals are orthogonal (L^2) projections measured in the sup
    norm. ``max_residual_sup`` is the best value over all leading subspaces
    of dimension at most ``dim``, so it never increases with ``dim``;
    ``raw_residual_sup`` is the value for exactly ``dim`` directions.
    """
    dim, n_max = int(dim), int(n_max)
    if dim < 1 or n_max < 1:
        raise ValueError("dim and n_max must be positive")
    if dim > n_max:
        raise DegenerateProbeError(f"dim={dim} exceeds the orbit size n_max={n_max}")
    vecs = orbit(op, system, f, n_max)
    coords = np.stack([_l2_coordinates(v)[0] for v in vecs], axis=1)
    gram = coords.conj().T @ coords
    evals, evecs = np.linalg.eigh(gram)
    order = np.argsort(evals)[::-1]
    evals, evecs = np.clip(evals[order], 0.0, None), evecs[:, order]
    tol = max(evals[0], 0.0) * 1e-24 + 1e-300
    keep = [i for i in range(min(dim, n_max)) if evals[i] > tol]
    basis = coords @ evecs[:, keep] / np.sqrt(evals[keep]) if keep else np.zeros((coords.shape[0], 0))

    best = np.inf
    raw = l2 = 0.0
    for d in range(0, len(keep) + 1):
        sup_d, l2_d = _residual_sups(vecs, vecs[0], basis[:, :d])
        best = min(best, sup_d)
        raw, l2 = sup_d, l2_d
    if joint_bound is None:
        joint_bound = probe_joint_bound([op], [system], [f], n_max)
    return ProbeReport(
        finite_rank_dim=dim,
        max_residual_sup=float(best),
        joint_bound_estimate=float(joint_bound),
        n_tested=n_max,
        f_tested=[f.describe()],
        raw_residual_sup=float(raw),
        residual_l2=float(l2),
        singular_values=[float(np.sqrt(e)) for e in evals[: max(dim, 1)]],
    )


def probe_joint_bound(
    ops: Sequence[OperatorSpec],
    systems: Sequence[SystemDescriptor],
    test_functions: Sequence[FunctionRep],
    n_max: int,
) -> float:
    """Largest observed ``||A_j T_j^n f||_inf / ||f||_inf`` over ``n <= n_max``."""
    if not test_functions:
        raise ValueError("probe_joint_bound needs at least one test function")
    if len(ops) != len(systems):
        raise ValueError("ops and systems must pair up")
    best = 0.0
    for op, system in zip(ops, systems):
        for f in test_functions:
            fn = norm(f, np.inf)
            if fn <= 0:
                raise ValueError("test functions must have a positive sup norm")
            g = f
            for _ in range(int(n_max)):
                g = koopman_apply(system, 1, g)
                best = max(best, norm(apply_operator(op, g), np.inf) / fn)
    return best


__all__ = [
    "OperatorSpec",
    "ProbeReport",
    "apply_operator",
    "probe_twisted_compactness",
    "probe_joint_bound",
    "orbit",
    "mean_of_image_of_one",
    "UnsupportedOperatorError",
    "DegenerateProbeError",
]
