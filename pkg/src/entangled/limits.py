"""
Predicted limits of entangled averages, almost periodic weights, and
finite-horizon diagnostics for sequences whose absolute Cesaro means vanish.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .engine import ChainSpec
from .operators import apply_operator
from .space import (
    BernoulliSamples,
    CylinderFunction,
    FunctionRep,
    inner_product,
    mean,
)
from .systems import SystemDescriptor, koopman_apply, reversible_rank

RESONANCE_TOL = 1e-9
MAX_RESONANCE_TENSOR = 20_000_000


class ApplicabilityError(ValueError):
    """The requested predictor does not cover this chain."""


def _one(f: FunctionRep) -> FunctionRep:
    if isinstance(f, CylinderFunction):
        return CylinderFunction(f.a, f.a, [1, 1])
    return f.constant_like(1.0)


# -- limits of chains ----------------------------------------------------------

def predicted_limit_weak_mixing(chain: ChainSpec) -> FunctionRep:
    """Constant ``mean(f) * prod_i <A_i 1, 1>`` for chains of weakly mixing maps."""
    if not all(s.weakly_mixing for s in chain.systems):
        bad = [s.kind for s in chain.systems if not s.weakly_mixing]
        raise ApplicabilityError(f"weak-mixing limit needs weakly mixing systems, got {bad}")
    value = mean(chain.f)
    one = _one(chain.f)
    for op in chain.operators:
        value *= mean(apply_operator(op, one))
    return value * one


def _fixed_modes(system: SystemDescriptor, f: FunctionRep):
    """Eigenfunctions of ``system`` with eigenvalue 1 that are representable like ``f``."""
    if system.weakly_mixing:
        return [_one(f)]
    K = getattr(f, "K", None)
    if system.is_flow:
        # T(t) e_j = exp(2 pi i j t theta) e_j is fixed for all t iff j * theta == 0
        return [h for (lam, h), j in zip(system.eigen_data(K), range(-K, K + 1))
                if abs(j * system.theta) < RESONANCE_TOL]
    return [h for lam, h in system.eigen_data(K) if abs(lam - 1) < RESONANCE_TOL]


def mean_ergodic_projection(system: SystemDescriptor, f: FunctionRep) -> FunctionRep:
    """
    Orthogonal projection onto the fixed space of ``system``.

    For the ergodic systems used here this is ``mean(f) * 1``; a rotation by a
    rational angle keeps every mode whose eigenvalue is one.
    """
    system.check(f)
    out = None
    for h in _fixed_modes(system, f):
        term = inner_product(f, h) * h
        out = term if out is None else out + term
    return out


def predicted_limit_projection_chain(chain: ChainSpec) -> FunctionRep:
    """``P_m A_{m-1} P_{m-1} ... A_1 P_1 f`` for injective ``alpha``."""
    if not chain.injective:
        raise ApplicabilityError(
            "projection-chain limit needs an injective alpha; use the resonance or weak-mixing predictor"
        )
    g = chain.f
    for i, system in enumerate(chain.systems):
        g = mean_ergodic_projection(system, g)
        if i < chain.m - 1:
            g = apply_operator(chain.operators[i], g)
    return g


def _eigenbasis(system: SystemDescriptor, f: FunctionRep):
    if reversible_rank(system) != "full" or system.is_flow:
        raise ApplicabilityError(f"{system.kind} has no finite discrete-spectrum eigenbasis")
    K = getattr(f, "K", None)
    if K is None and system.kind != "finite_cyclic":
        raise ApplicabilityError("resonance predictor needs a fourier cutoff")
    data = system.eigen_data(K)
    lams = np.array([lam for lam, _ in data])
    return lams, [h for _, h in data]


def predicted_limit_resonance(chain: ChainSpec) -> FunctionRep:
    """
    Limit for chains of discrete-spectrum maps, via eigen-expansions.

    ``f`` and each ``A_i`` are expanded in the systems' orthonormal
    eigenbases. A tuple of basis indices ``(j_1..j_m)`` contributes iff for
    every index class ``b`` the product of the eigenvalues met at the slots
    with ``alpha(i) = b`` equals one, since ``(1/N) sum_n lam^n -> [lam = 1]``.
    """
    if chain.exponent_polys is not None:
        raise ApplicabilityError("resonance predictor covers identity exponents only")
    if chain.continuous:
        raise ApplicabilityError("resonance predictor covers discrete chains only")
    bases = [_eigenbasis(s, chain.f) for s in chain.systems]
    dims = [len(h) for _, h in bases]
    if int(np.prod(dims, dtype=float)) > MAX_RESONANCE_TENSOR:
        raise ApplicabilityError("eigen-tuple tensor too large for this chain")

    coeff = np.array([inner_product(chain.f, h) for h in bases[0][1]])
    # W[j_1, ..., j_i] accumulates f_{j_1} B_1[j_2, j_1] ... along the chain
    W = coeff
    for i, op in enumerate(chain.operators):
        src, dst = bases[i][1], bases[i + 1][1]
        B = np.array([[inner_product(apply_operator(op, h), g) for h in src] for g in dst])
        W = W[..., None] * B.T
    mask = np.ones(W.shape, dtype=bool)
    for b in chain.used_indices:
        phase = np.ones(W.shape, dtype=complex)
        for i, a in enumerate(chain.alpha):
            if a == b:
                shape = [1] * chain.m
                shape[i] = dims[i]
                phase = phase * bases[i][0].reshape(shape)
        mask &= np.abs(phase - 1) < RESONANCE_TOL
    surviving = np.where(mask, W, 0).reshape(-1, dims[-1]).sum(axis=0)
    out = None
    for c, h in zip(surviving, bases[-1][1]):
        out = c * h if out is None else out + c * h
    return out


def predict(chain: ChainSpec, predictor: str):
    """Dispatch on a predictor name from an experiment config."""
    if predictor == "weak_mixing":
        return predicted_limit_weak_mixing(chain)
    if predictor == "projection_chain":
        return predicted_limit_projection_chain(chain)
    if predictor == "resonance":
        return predicted_limit_resonance(chain)
    if predictor == "zero":
        return chain.f.zeros_like()
    if predictor in (None, "none"):
        return None
    raise ValueError(f"unknown predictor {predictor!r}")


# -- weights and sequence classes ---------------------------------------------

def _as_sequence(a, N_max: int) -> np.ndarray:
    """Terms ``a_1..a_{N_max}`` from an array, a WeightSequence, or a callable of n."""
    if isinstance(a, WeightSequence):
        return a(np.arange(1, N_max + 1))
    if callable(a):
        return np.asarray(a(np.arange(1, N_max + 1)))
    arr = np.asarray(a)
    if arr.size < N_max:
        raise ValueError(f"sequence has {arr.size} terms, need {N_max}")
    return arr[:N_max]


def geometric_schedule(N_max: int, start: int = 16) -> list:
    out, N = [], start
    while N < N_max:
        out.append(N)
        N *= 2
    out.append(N_max)
    return out


@dataclass
class ClassNResult:
    member: bool
    schedule: list
    curve: list

    def __bool__(self):
        return self.member


def is_class_N(a, N_max: int, tol: float) -> ClassNResult:
    """
    Finite-horizon check that ``(1/N) sum_{n<=N} |a_n| -> 0``.

    True iff the last Cesaro value is below ``tol`` and the curve does not
    increase over the last three schedule points. This is a heuristic; the
    curve is returned so callers can judge it.
    """
    N_max = int(N_max)
    if N_max < 16:
        raise ValueError("N_max must be at least 16")
    terms = np.abs(_as_sequence(a, N_max))
    csum = np.cumsum(terms)
    schedule = geometric_schedule(N_max)
    curve = [float(csum[N - 1] / N) for N in schedule]
    tail = curve[-3:]
    trend = all(y <= x for x, y in zip(tail, tail[1:]))
    return ClassNResult(bool(curve[-1] < tol and trend), schedule, curve)


@dataclass(frozen=True)
class WeightSequence:
    """``a_n = sum_j q_j gamma_j**n`` with unimodular ``gamma_j``."""

    terms: tuple
    horizon: Optional[int] = None
    class_tags: frozenset = field(default=frozenset({"almost_periodic"}))

    def __post_init__(self):
        terms = tuple((complex(g), complex(q)) for g, q in self.terms)
        for g, _ in terms:
            if abs(abs(g) - 1) > 1e-12:
                raise ValueError(f"gamma={g} is not unimodular")
        object.__setattr__(self, "terms", terms)

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=complex)
        for g, q in self.terms:
            # exp(i n arg g) keeps |g^n| = 1 for large n
            out = out + q * np.exp(1j * np.angle(g) * n)
        return out

    def __mul__(self, other: "WeightSequence") -> "WeightSequence":
        terms = [(g1 * g2 / abs(g1 * g2), q1 * q2)
                 for g1, q1 in self.terms for g2, q2 in other.terms]
        return WeightSequence(tuple(terms), self.horizon)


def almost_periodic_weight(terms, horizon: Optional[int] = None) -> WeightSequence:
    return WeightSequence(tuple(terms), horizon)


def weighted_birkhoff_average(
    system: SystemDescriptor,
    w: Union[WeightSequence, Callable, np.ndarray],
    f: FunctionRep,
    N: int,
    samples: Optional[BernoulliSamples] = None,
):
    """``(1/N) sum_{n=1}^N a_n T^n f``; cylinder inputs are averaged at ``samples``."""
    system.check(f)
    a = _as_sequence(w, int(N))
    if isinstance(f, CylinderFunction):
        if samples is None:
            raise ValueError("cylinder averages are evaluated at BernoulliSamples")
        acc = sum(a[n - 1] * samples.evaluate(f, n) for n in range(1, N + 1))
        return acc / N
    acc = np.zeros_like(f.values)
    g = f
    for n in range(1, int(N) + 1):
        g = koopman_apply(system, 1, g)
        acc = acc + a[n - 1] * g.values
    return f._new(acc / N)


@dataclass
class DensityResult:
    indices: np.ndarray
    schedule: list
    density: list


def density_one_subsequence(a, tol: float, N_max: Optional[int] = None) -> DensityResult:
    """
    Indices ``n`` (1-based) with ``|a_n| <= tol`` and their density along a
    geometric schedule.
    """
    if N_max is None:
        N_max = len(a)
    terms = np.abs(_as_sequence(a, N_max))
    if N_max >= 16 and not is_class_N(terms, N_max, tol):
        warnings.warn("sequence does not look like it has vanishing absolute Cesaro means",
                      stacklevel=2)
    good = terms <= tol
    idx = np.nonzero(good)[0] + 1
    counts = np.cumsum(good)
    schedule = geometric_schedule(N_max, start=min(16, N_max))
    return DensityResult(idx, schedule, [float(counts[N - 1] / N) for N in schedule])
