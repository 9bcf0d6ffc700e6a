"""
Measure-preserving maps and flows with their Koopman action.

Convention: ``T f = f o S`` where ``S`` is the underlying point map.

==================  ==============================  ==================
kind                point map                       representation
==================  ==============================  ==================
``rotation``        ``x -> x + theta (mod 1)``      fourier
``doubling``        ``x -> 2x (mod 1)``             fourier
``finite_cyclic``   ``x -> x + 1 (mod q)``          finite
``bernoulli_shift`` left shift of a binary sequence cylinder
``torus_flow``      ``x -> x + t theta (mod 1)``    fourier
==================  ==============================  ==================
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .space import (
    CylinderFunction,
    FiniteFunction,
    FourierFunction,
    FunctionRep,
    RepresentationError,
    inner_product,
    mean,
)

GOLDEN_THETA = (np.sqrt(5.0) - 1.0) / 2.0

KINDS = ("rotation", "doubling", "finite_cyclic", "bernoulli_shift", "torus_flow")
_REPRESENTATION = {
    "rotation": "fourier",
    "doubling": "fourier",
    "finite_cyclic": "finite",
    "bernoulli_shift": "cylinder",
    "torus_flow": "fourier",
}
_WEAKLY_MIXING = {"doubling", "bernoulli_shift"}


class SystemKindError(ValueError):
    pass


@dataclass(frozen=True)
class SystemDescriptor:
    """
    A concrete measure-preserving system.

    Parameters
    ----------
    kind : str
        One of ``rotation``, ``doubling``, ``finite_cyclic``,
        ``bernoulli_shift``, ``torus_flow``.
    theta : float, optional
        Rotation number (rotation, torus_flow). Defaults to the golden mean.
    q : int, optional
        Size of the cyclic group (finite_cyclic).
    cutoff : int, optional
        Fourier cutoff ``K`` used for the eigen-data of fourier systems.
    """

    kind: str
    theta: Optional[float] = None
    q: Optional[int] = None
    cutoff: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SystemKindError(f"unknown system kind {self.kind!r}")
        if self.kind in ("rotation", "torus_flow"):
            theta = GOLDEN_THETA if self.theta is None else float(self.theta)
            if self.kind == "rotation":
                theta = theta % 1.0
            object.__setattr__(self, "theta", theta)
        if self.kind == "finite_cyclic":
            if self.q is None or int(self.q) < 1:
                raise ValueError("finite_cyclic needs a positive integer q")
            object.__setattr__(self, "q", int(self.q))

    @property
    def compatible_representation(self) -> str:
        return _REPRESENTATION[self.kind]

    @property
    def weakly_mixing(self) -> bool:
        return self.kind in _WEAKLY_MIXING

    @property
    def is_flow(self) -> bool:
        return self.kind == "torus_flow"

    def check(self, f: FunctionRep):
        if f.kind != self.compatible_representation:
            raise RepresentationError(
                f"{self.kind} acts on {self.compatible_representation} functions, got {f.describe()}"
            )
        if self.kind == "finite_cyclic" and f.q != self.q:
            raise RepresentationError(f"finite_cyclic q={self.q} applied to function on Z_{f.q}")

    def eigenvalue(self, j: int) -> complex:
        """Eigenvalue of the j-th basis eigenfunction (fourier mode or character)."""
        if self.kind == "rotation":
            return complex(np.exp(2j * np.pi * j * self.theta))
        if self.kind == "finite_cyclic":
            return complex(np.exp(2j * np.pi * j / self.q))
        if self.kind == "torus_flow":
            # time-one map
            return complex(np.exp(2j * np.pi * j * self.theta))
        if j == 0:
            return 1 + 0j
        raise SystemKindError(f"{self.kind} has no eigenfunction with index {j}")

    def eigen_data(self, K: Optional[int] = None):
        """
        Unimodular eigenpairs spanning the representable reversible part.

        For fourier systems the basis is truncated at ``K`` (falls back to
        ``cutoff``); weakly mixing systems only have the constant function.
        """
        if self.kind == "finite_cyclic":
            x = np.arange(self.q)
            return [
                (self.eigenvalue(j), FiniteFunction(np.exp(2j * np.pi * j * x / self.q)))
                for j in range(self.q)
            ]
        if self.kind == "bernoulli_shift":
            return [(1 + 0j, CylinderFunction(0, 0, [1, 1]))]
        K = self.cutoff if K is None else K
        if K is None:
            raise ValueError(f"{self.kind} eigen-data needs a cutoff K")
        if self.kind == "doubling":
            return [(1 + 0j, FourierFunction.basis(0, K))]
        return [(self.eigenvalue(j), FourierFunction.basis(j, K)) for j in range(-K, K + 1)]


def _doubling(f: FourierFunction, n: int) -> FourierFunction:
    K = f.K
    out = np.zeros_like(f.values)
    out[K] = f.values[K]
    if n == 0:
        return f
    # |j| * 2**n <= K needs n < bit_length(K); checked before forming 2**n
    if n < K.bit_length():
        step = 1 << n
        jmax = K // step
        for j in range(-jmax, jmax + 1):
            if j:
                out[j * step + K] = f.values[j + K]
    return FourierFunction(out)


def dropped_mass(system: SystemDescriptor, n: int, f: FourierFunction) -> float:
    """L^2 mass lost to the doubling-map truncation when forming ``T^n f``."""
    if system.kind != "doubling" or n == 0:
        return 0.0
    kept = _doubling(f, n)
    return float(np.sqrt(max(np.sum(np.abs(f.values) ** 2) - np.sum(np.abs(kept.values) ** 2), 0.0)))


def koopman_apply(system: SystemDescriptor, n: int, f: FunctionRep) -> FunctionRep:
    """``T^n f``; for a flow this is the time-``n`` map."""
    n = int(n)
    if n < 0:
        raise ValueError("Koopman exponent must be non-negative")
    system.check(f)
    kind = system.kind
    if kind in ("rotation", "torus_flow"):
        # reduce the phase mod 1 before exponentiating; n can be huge
        phase = (f.modes * (n * system.theta)) % 1.0
        return FourierFunction(np.exp(2j * np.pi * phase) * f.values)
    if kind == "doubling":
        return _doubling(f, n)
    if kind == "finite_cyclic":
        return FiniteFunction(np.roll(f.values, -(n % system.q)))
    return f.shifted(n)


def flow_apply(system: SystemDescriptor, t: float, f: FunctionRep) -> FunctionRep:
    """``T(t) f`` for the torus translation flow."""
    if not system.is_flow:
        raise SystemKindError(f"{system.kind} is not a flow")
    if t < 0:
        raise ValueError("flow time must be non-negative")
    system.check(f)
    return FourierFunction(np.exp(2j * np.pi * f.modes * (t * system.theta)) * f.values)


def reversible_rank(system: SystemDescriptor):
    """Dimension of the reversible part: 1 when weakly mixing, else ``"full"``."""
    return 1 if system.weakly_mixing else "full"


def jgl_decompose(system: SystemDescriptor, f: FunctionRep):
    """
    Split ``f`` into reversible and stable parts.

    The reversible part is the orthogonal projection onto the span of the
    system's eigenfunctions; the stable part is the remainder.
    """
    system.check(f)
    if system.weakly_mixing:
        if isinstance(f, CylinderFunction):
            f_r = CylinderFunction(f.a, f.a, [mean(f), mean(f)])
        else:
            f_r = f.constant_like(mean(f))
        return f_r, f - f_r
    # discrete spectrum: the eigenbasis spans everything representable
    f_r = f.zeros_like()
    for _, h in system.eigen_data(getattr(f, "K", None)):
        f_r = f_r + inner_product(f, h) * h
    return f_r, f - f_r
