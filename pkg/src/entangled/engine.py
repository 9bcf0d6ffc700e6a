"""
Entangled multi-Cesaro averages

    (1/N^k) sum_{1 <= n_1..n_k <= N} T_m^{e(m)} A_{m-1} ... A_1 T_1^{e(1)} f,
    e(i) = q_{alpha(i)}(n_{alpha(i)}),

and their continuous-time analogue.

Strategies
----------
naive       literal enumeration of the lattice in lexicographic order.
cached      enumeration over the used indices with memoised prefixes and
            incremental Koopman powers.
factorized  injective ``alpha`` only: nested single-index Cesaro means.
lowrank     every ``A_i`` finite rank: per-index averages of the scalar
            matrix-coefficient sequences, contracted along the chain.

Indices of ``1..k`` that ``alpha`` never uses contribute a factor ``N`` that
cancels against ``1/N^k``; every strategy except ``naive`` skips them.

Functions in the cylinder representation cannot hold a Cesaro sum of shifted
copies (it depends on unboundedly many coordinates), so averages of cylinder
chains are returned as values at a :class:`~entangled.space.BernoulliSamples`
point set.
"""

from __future__ import annotations

import itertools
import time
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .operators import OperatorSpec, apply_operator
from .space import (
    BernoulliSamples,
    CylinderFunction,
    FiniteFunction,
    FourierFunction,
    FunctionRep,
    GridFunction,
    RepresentationError,
    inner_product,
    norm,
)
from .systems import SystemDescriptor, flow_apply, koopman_apply

STRATEGIES = ("naive", "cached", "factorized", "lowrank")
DEFAULT_CACHE_BYTES = 256 * 2**20
MAX_MIXTURE_TERMS = 2_000_000


class ChainError(ValueError):
    """Malformed chain description."""


class StrategyError(ValueError):
    """Strategy not applicable to the chain."""


class BudgetError(ValueError):
    """Requested enumeration exceeds the configured budget."""


def poly_eval(coeffs: Sequence[int], n: int) -> int:
    """Exact integer evaluation, ``coeffs`` in ascending powers."""
    out = 0
    for c in reversed(coeffs):
        out = out * n + c
    return out


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """
    An entangled-average problem.

    ``alpha`` is 1-based: ``alpha[i-1]`` is the index class of slot ``i``.
    ``exponent_polys`` holds ``k`` integer polynomials as ascending
    coefficient tuples, e.g. ``(0, 1, 1)`` for ``n**2 + n``.
    """

    alpha: tuple
    systems: tuple
    operators: tuple
    f: FunctionRep
    k: Optional[int] = None
    exponent_polys: Optional[tuple] = None
    continuous: bool = False

    def __post_init__(self):
        alpha = tuple(int(a) for a in self.alpha)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "systems", tuple(self.systems))
        object.__setattr__(self, "operators", tuple(self.operators))
        m = len(self.systems)
        if m < 2:
            raise ChainError("a chain needs m >= 2 systems")
        if len(alpha) != m:
            raise ChainError(f"alpha has length {len(alpha)}, expected m={m}")
        if len(self.operators) != m - 1:
            raise ChainError(f"{len(self.operators)} operators given, expected m-1={m - 1}")
        k = max(alpha) if self.k is None else int(self.k)
        object.__setattr__(self, "k", k)
        if k < 1 or any(a < 1 or a > k for a in alpha):
            raise ChainError(f"alpha entries must lie in 1..{k}")
        for s in self.systems:
            if not isinstance(s, SystemDescriptor):
                raise ChainError("systems must be SystemDescriptor instances")
            s.check(self.f)
        for op in self.operators:
            if not isinstance(op, OperatorSpec):
                raise ChainError("operators must be OperatorSpec instances")
        if self.continuous and not all(s.is_flow for s in self.systems):
            raise ChainError("continuous chains need flow systems")
        if self.exponent_polys is not None:
            polys = tuple(tuple(int(c) for c in p) for p in self.exponent_polys)
            if len(polys) != k:
                raise ChainError(f"{len(polys)} exponent polynomials given, expected k={k}")
            for p in polys:
                while len(p) > 1 and p[-1] == 0:
                    p = p[:-1]
                if len(p) < 2:
                    raise ChainError("exponent polynomials must be non-constant")
            if self.continuous:
                raise ChainError("polynomial exponents are defined for discrete chains only")
            object.__setattr__(self, "exponent_polys", polys)

    @property
    def m(self) -> int:
        return len(self.systems)

    @property
    def used_indices(self) -> tuple:
        return tuple(sorted(set(self.alpha)))

    @property
    def injective(self) -> bool:
        return len(set(self.alpha)) == len(self.alpha)

    @property
    def representation(self) -> str:
        return self.f.kind

    def exponent(self, b: int, n: int) -> int:
        """Koopman power used by index class ``b`` at lattice value ``n``."""
        if self.exponent_polys is None:
            return n
        return poly_eval(self.exponent_polys[b - 1], n)

    def check_schedule(self, N: int):
        """Exponents must be positive integers for ``n = 1..N``."""
        if self.exponent_polys is None:
            return
        for b in self.used_indices:
            for n in range(1, int(N) + 1):
                if self.exponent(b, n) < 1:
                    raise ChainError(
                        f"exponent polynomial {b} is not positive at n={n}"
                    )

    def with_f(self, f: FunctionRep) -> "ChainSpec":
        return ChainSpec(self.alpha, self.systems, self.operators, f, self.k,
                         self.exponent_polys, self.continuous)


# -- output targets ----------------------------------------------------------

class _Target:
    """Maps a chain value to the array that gets averaged, and back."""

    def __init__(self, chain: ChainSpec, samples=None, abs_mode=False, resolution=None):
        self.rep = chain.representation
        self.template = chain.f
        self.samples = samples
        self.abs_mode = abs_mode
        self.resolution = resolution
        if self.rep == "cylinder" and not isinstance(samples, BernoulliSamples):
            raise RepresentationError(
                "averages of cylinder chains are evaluated at BernoulliSamples; pass samples="
            )
        if abs_mode and self.rep == "fourier" and not resolution:
            raise ValueError("absolute averages of fourier chains need a grid resolution")

    def __call__(self, g: FunctionRep, shift: int = 0) -> np.ndarray:
        if self.rep == "cylinder":
            vals = self.samples.evaluate(g, shift)
        elif self.abs_mode and self.rep == "fourier":
            vals = g.on_grid(self.resolution)
        else:
            vals = np.asarray(g.values)
        return np.abs(vals) if self.abs_mode else vals

    def wrap(self, arr: np.ndarray):
        if self.rep == "cylinder":
            return arr
        if self.abs_mode and self.rep == "fourier":
            return GridFunction(arr)
        return self.template._new(arr)


def _apply_slot_operator(chain: ChainSpec, i: int, g: FunctionRep) -> FunctionRep:
    if i < chain.m - 1:
        return apply_operator(chain.operators[i], g)
    return g


def evaluate_chain(chain: ChainSpec, exponents: Sequence[int]) -> FunctionRep:
    """
    One summand of the entangled average.

    ``exponents`` holds the lattice values ``(n_1, ..., n_k)``; slot ``i``
    receives the power ``q_{alpha(i)}(n_{alpha(i)})``.
    """
    if chain.continuous:
        raise ChainError("evaluate_chain is for discrete chains; use flow_entangled_average")
    if len(exponents) != chain.k:
        raise ChainError(f"expected {chain.k} lattice values, got {len(exponents)}")
    g = chain.f
    for i, (system, b) in enumerate(zip(chain.systems, chain.alpha)):
        g = koopman_apply(system, chain.exponent(b, int(exponents[b - 1])), g)
        g = _apply_slot_operator(chain, i, g)
    return g


# -- naive ---------------------------------------------------------------------

def _ordered_sum(arrays):
    acc = None
    for a in arrays:
        acc = a.copy() if acc is None else acc + a
    return acc


def _naive_chunk(chain, N, target, n1):
    rest = itertools.product(range(1, N + 1), repeat=chain.k - 1)
    return _ordered_sum(target(evaluate_chain(chain, (n1,) + r)) for r in rest)


def _naive(chain, N, target, workers=1):
    chunk = lambda n1: _naive_chunk(chain, N, target, n1)  # noqa: E731
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, range(1, N + 1)))
    else:
        parts = [chunk(n1) for n1 in range(1, N + 1)]
    return _ordered_sum(parts) / float(N) ** chain.k


# -- cached --------------------------------------------------------------------

class LRUCache:
    """Byte-budgeted LRU map from hashable keys to FunctionRep values."""

    def __init__(self, budget_bytes=DEFAULT_CACHE_BYTES):
        self.budget = int(budget_bytes)
        self.data = OrderedDict()
        self.nbytes = 0
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _size(value) -> int:
        return int(value.values.nbytes) + 64

    def get(self, key):
        value = self.data.get(key)
        if value is None:
            self.misses += 1
            return None
        self.hits += 1
        self.data.move_to_end(key)
        return value

    def put(self, key, value):
        if key in self.data:
            self.nbytes -= self._size(self.data.pop(key))
        size = self._size(value)
        if size > self.budget:
            return
        self.data[key] = value
        self.nbytes += size
        while self.nbytes > self.budget:
            _, old = self.data.popitem(last=False)
            self.nbytes -= self._size(old)


class _PrefixEvaluator:
    """Computes summands reusing prefixes keyed by (slot, relevant lattice values)."""

    def __init__(self, chain: ChainSpec, cache: LRUCache):
        self.chain = chain
        self.cache = cache
        # lattice indices that have appeared up to and including each slot
        self.seen = []
        acc = []
        for b in chain.alpha:
            if b not in acc:
                acc.append(b)
            self.seen.append(tuple(sorted(acc)))
        self.first_slot = {}
        for i, b in enumerate(chain.alpha):
            self.first_slot.setdefault(b, i)

    def _key(self, i, values):
        return tuple(values[b] for b in self.seen[i])

    def output(self, i, values):
        """Value after slot ``i`` (Koopman power then operator)."""
        key = ("out", i, self._key(i, values))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        out = _apply_slot_operator(self.chain, i, self.powered(i, values))
        self.cache.put(key, out)
        return out

    def powered(self, i, values):
        chain = self.chain
        b = chain.alpha[i]
        n = values[b]
        key = ("pow", i, self._key(i, values))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        system = chain.systems[i]
        e = chain.exponent(b, n)
        out = None
        if self.first_slot[b] == i and n > 1:
            # the input does not depend on n_b, so T^{e(n)} g = T^{e(n)-e(n-1)} T^{e(n-1)} g
            prev_values = dict(values)
            prev_values[b] = n - 1
            prev = self.cache.get(("pow", i, self._key(i, prev_values)))
            if prev is not None:
                step = e - chain.exponent(b, n - 1)
                if step >= 0:
                    out = koopman_apply(system, step, prev)
        if out is None:
            g = chain.f if i == 0 else self.output(i - 1, values)
            out = koopman_apply(system, e, g)
        self.cache.put(key, out)
        return out


def _cached(chain, N, target, cache_bytes=DEFAULT_CACHE_BYTES):
    used = chain.used_indices
    cache = LRUCache(cache_bytes)
    ev = _PrefixEvaluator(chain, cache)
    last = chain.m - 1
    parts = []
    for n_first in range(1, N + 1):
        rest = itertools.product(range(1, N + 1), repeat=len(used) - 1)
        terms = (
            target(ev.output(last, dict(zip(used, (n_first,) + r))))
            for r in rest
        )
        parts.append(_ordered_sum(terms))
    return _ordered_sum(parts) / float(N) ** len(used)


# -- factorized ----------------------------------------------------------------

class _Mixture:
    """Weighted list of cylinder functions standing in for their (unrepresentable) sum."""

    def __init__(self, terms):
        self.terms = terms

    def koopman_average(self, system, exps):
        if len(self.terms) * len(exps) > MAX_MIXTURE_TERMS:
            raise BudgetError("cylinder mixture too large; use finite-rank operators or lowrank")
        w = 1.0 / len(exps)
        return _Mixture([(c * w, g.shifted(e)) for c, g in self.terms for e in exps])

    def apply(self, op: OperatorSpec):
        if op.variant == "finite_rank":
            out = None
            for u, v in op.pairs:
                coef = sum(c * inner_product(g, u) for c, g in self.terms)
                out = coef * v if out is None else out + coef * v
            return _Mixture([(1.0, out)])
        if op.variant == "identity":
            return self
        return _Mixture([(c, apply_operator(op, g)) for c, g in self.terms])

    def evaluate(self, target):
        return _ordered_sum(c * target(g) for c, g in self.terms)


def _factorized(chain, N, target):
    if not chain.injective:
        raise StrategyError("factorized strategy needs an injective alpha")
    if chain.representation == "cylinder":
        mix = _Mixture([(1.0, chain.f)])
        for i, (system, b) in enumerate(zip(chain.systems, chain.alpha)):
            exps = [chain.exponent(b, n) for n in range(1, N + 1)]
            mix = mix.koopman_average(system, exps)
            if i < chain.m - 1:
                mix = mix.apply(chain.operators[i])
        return mix.evaluate(target)
    g = chain.f
    for i, (system, b) in enumerate(zip(chain.systems, chain.alpha)):
        g = _cesaro_orbit_mean(system, g, [chain.exponent(b, n) for n in range(1, N + 1)])
        g = _apply_slot_operator(chain, i, g)
    return target(g)


def _cesaro_orbit_mean(system, g, exps):
    """``(1/N) sum_n T^{e_n} g`` with incremental powers."""
    acc = None
    cur, cur_e = g, 0
    for e in exps:
        if e >= cur_e:
            cur = koopman_apply(system, e - cur_e, cur)
        else:
            cur = koopman_apply(system, e, g)
        cur_e = e
        acc = np.array(cur.values) if acc is None else acc + cur.values
    return g._new(acc / len(exps))


# -- lowrank -------------------------------------------------------------------

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXY"


def _lowrank(chain, N, target):
    if not all(op.variant == "finite_rank" for op in chain.operators):
        raise StrategyError("lowrank strategy needs every operator to be finite_rank")
    m = chain.m
    if m > len(_LETTERS) - 1:
        raise StrategyError("chain too long for the lowrank contraction")
    ns = range(1, N + 1)
    factors = []
    for i, (system, b) in enumerate(zip(chain.systems, chain.alpha)):
        exps = [chain.exponent(b, n) for n in ns]
        inputs = [chain.f] if i == 0 else [v for _, v in chain.operators[i - 1].pairs]
        if i < m - 1:
            us = [u for u, _ in chain.operators[i].pairs]
            F = np.empty((N, len(inputs), len(us)), dtype=complex)
            for l, h in enumerate(inputs):
                for t, e in enumerate(exps):
                    he = koopman_apply(system, e, h)
                    for j, u in enumerate(us):
                        F[t, l, j] = inner_product(he, u)
        else:
            rows = []
            for h in inputs:
                if chain.representation == "cylinder":
                    rows.append(np.stack([target(h, shift=e) for e in exps]))
                else:
                    rows.append(np.stack([target(koopman_apply(system, e, h)) for e in exps]))
            F = np.stack(rows, axis=1)
        if i == 0:
            F = F[:, 0]
        factors.append(F)

    # slot i carries bond letters: slot 0 -> (j0); slot i -> (j_{i-1}, j_i); slot m-1 -> (j_{m-2}, out)
    out = _LETTERS[m - 1]
    labels = []
    for i in range(m):
        if i == 0:
            labels.append(_LETTERS[0])
        elif i < m - 1:
            labels.append(_LETTERS[i - 1] + _LETTERS[i])
        else:
            labels.append(_LETTERS[m - 2] + out)
    operands, specs = [], []
    for b in chain.used_indices:
        slots = [i for i, a in enumerate(chain.alpha) if a == b]
        lhs = ",".join("z" + labels[i] for i in slots)
        # a bond shared by two slots of this class stays a free (elementwise) index here
        rhs = "".join(dict.fromkeys("".join(labels[i] for i in slots)))
        operands.append(np.einsum(f"{lhs}->{rhs}", *[factors[i] for i in slots]) / N)
        specs.append(rhs)
    return np.einsum(",".join(specs) + "->" + out, *operands)


# -- public API ----------------------------------------------------------------

def _check_discrete(chain, N):
    if chain.continuous:
        raise ChainError("continuous chains are averaged with flow_entangled_average")
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    chain.check_schedule(N)
    return N


def entangled_average(
    chain: ChainSpec,
    N: int,
    strategy: str = "naive",
    samples: Optional[BernoulliSamples] = None,
    workers: int = 1,
    cache_bytes: int = DEFAULT_CACHE_BYTES,
):
    """
    The multi-Cesaro mean at horizon ``N``.

    Returns a FunctionRep, or for cylinder chains an array of values at
    ``samples``.
    """
    N = _check_discrete(chain, N)
    target = _Target(chain, samples)
    if strategy == "naive":
        arr = _naive(chain, N, target, workers)
    elif strategy == "cached":
        arr = _cached(chain, N, target, cache_bytes)
    elif strategy == "factorized":
        arr = _factorized(chain, N, target)
    elif strategy == "lowrank":
        arr = _lowrank(chain, N, target)
    else:
        raise StrategyError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    return target.wrap(arr)


def entangled_average_abs(
    chain: ChainSpec,
    N: int,
    samples: Optional[BernoulliSamples] = None,
    resolution: Optional[int] = None,
    strategy: str = "naive",
    workers: int = 1,
    cache_bytes: int = DEFAULT_CACHE_BYTES,
):
    """
    Average of the pointwise moduli of the summands.

    Fourier chains are evaluated on a grid of ``resolution`` points per summand
    and the result is a GridFunction.
    """
    N = _check_discrete(chain, N)
    target = _Target(chain, samples, abs_mode=True, resolution=resolution)
    if strategy == "naive":
        arr = _naive(chain, N, target, workers)
    elif strategy == "cached":
        arr = _cached(chain, N, target, cache_bytes)
    else:
        raise StrategyError("absolute averages support the naive and cached strategies only")
    return target.wrap(arr)


def brute_force_average(chain: ChainSpec, N: int, budget: int = 10**6) -> FiniteFunction:
    """
    Reference average for finite_cyclic chains by literal enumeration.

    Shifts are permutation matrices and operators are dense matrices; no
    state is shared between summands.
    """
    N = _check_discrete(chain, N)
    if not all(s.kind == "finite_cyclic" for s in chain.systems):
        raise ChainError("brute_force_average handles finite_cyclic chains only")
    if N ** chain.k > budget:
        raise BudgetError(f"N^k = {N ** chain.k} exceeds the budget {budget}")
    q = chain.f.q
    eye = np.eye(q)
    mats = []
    for op in chain.operators:
        if op.variant == "matrix":
            mats.append(np.array(op.matrix))
        else:
            mats.append(np.stack([apply_operator(op, FiniteFunction(col)).values for col in eye], axis=1))
    f = np.array(chain.f.values)
    parts = []
    for n1 in range(1, N + 1):
        acc = None
        for rest in itertools.product(range(1, N + 1), repeat=chain.k - 1):
            ns = (n1,) + rest
            g = f
            for i, b in enumerate(chain.alpha):
                e = chain.exponent(b, ns[b - 1]) % q
                perm = np.roll(eye, e, axis=1)           # (P g)(x) = g(x + e)
                g = perm @ g
                if i < chain.m - 1:
                    g = mats[i] @ g
            acc = g.copy() if acc is None else acc + g
        parts.append(acc)
    return FiniteFunction(_ordered_sum(parts) / float(N) ** chain.k)


def flow_entangled_average(
    chain: ChainSpec,
    T_horizon: float,
    step: float,
    strategy: str = "auto",
    budget: int = 10**7,
) -> FunctionRep:
    """
    ``(1/T^k) int_{[0,T]^k}`` of the flow chain by the tensor midpoint rule.

    ``strategy`` is ``"auto"`` (factorized when ``alpha`` is injective),
    ``"factorized"`` or ``"naive"``.
    """
    if not chain.continuous:
        raise ChainError("flow_entangled_average needs a continuous chain")
    T_horizon, step = float(T_horizon), float(step)
    if step <= 0 or step >= T_horizon:
        raise ValueError("need 0 < step < T_horizon")
    L = int(round(T_horizon / step))
    if abs(L * step - T_horizon) > 1e-9:
        raise ValueError(f"step {step} does not divide the horizon {T_horizon}")
    nodes = (np.arange(L) + 0.5) * step
    if strategy == "auto":
        strategy = "factorized" if chain.injective else "naive"
    if strategy == "factorized":
        if not chain.injective:
            raise StrategyError("factorized strategy needs an injective alpha")
        g = chain.f
        for i, system in enumerate(chain.systems):
            phases = np.exp(2j * np.pi * system.theta * np.outer(nodes, g.modes))
            g = FourierFunction(phases.mean(axis=0) * g.values)
            g = _apply_slot_operator(chain, i, g)
        return g
    if strategy != "naive":
        raise StrategyError(f"unknown flow strategy {strategy!r}")
    used = chain.used_indices
    if L ** len(used) > budget:
        raise BudgetError(f"{L}^{len(used)} quadrature nodes exceed the budget {budget}")
    acc = None
    for idx in itertools.product(range(L), repeat=len(used)):
        t = dict(zip(used, nodes[list(idx)]))
        g = chain.f
        for i, (system, b) in enumerate(zip(chain.systems, chain.alpha)):
            g = _apply_slot_operator(chain, i, flow_apply(system, t[b], g))
        acc = np.array(g.values) if acc is None else acc + g.values
    return chain.f._new(acc / float(L) ** len(used))


# -- schedules -----------------------------------------------------------------

@dataclass
class AverageResult:
    """Averages along a schedule with distances to a predicted limit."""

    schedule: list
    averages: list
    abs_mode: bool = False
    predicted_limit: object = None
    distances_sup: list = field(default_factory=list)
    distances_l2: list = field(default_factory=list)
    sample_values: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.averages) != len(self.schedule):
            raise ValueError("one average per schedule point")
        if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise ValueError("schedule must be strictly increasing")
        if (self.predicted_limit is None) != (not self.distances_sup):
            raise ValueError("distances are present exactly when a predicted limit is")


def sample_points(chain: ChainSpec, count: int, seed: int = 0, resolution=None):
    """Seeded sample-point set matching the chain's representation."""
    rng = np.random.default_rng(seed)
    rep = chain.representation
    if rep == "cylinder":
        return BernoulliSamples(count, seed)
    if rep == "finite":
        return np.sort(rng.integers(0, chain.f.q, size=count))
    if rep == "grid" or resolution:
        M = resolution or chain.f.M
        return np.sort(rng.choice(M, size=min(count, M), replace=False))
    return np.sort(rng.random(count))


def values_at(avg, points) -> np.ndarray:
    """Values of an average at a sample-point set."""
    if isinstance(avg, np.ndarray):
        return avg
    if isinstance(avg, FourierFunction):
        return avg.evaluate(points)
    return np.asarray(avg.values)[np.asarray(points, dtype=int)]


def compare(avg, limit, samples=None):
    """(sup, L^2) distance; cylinder averages are compared at the samples."""
    if isinstance(avg, np.ndarray):
        lim = samples.evaluate(limit) if isinstance(limit, CylinderFunction) else np.asarray(limit)
        diff = avg - lim
        return float(np.max(np.abs(diff))), float(np.sqrt(np.mean(np.abs(diff) ** 2)))
    diff = avg - limit
    return norm(diff, np.inf), norm(diff, 2)


def run_schedule(
    chain: ChainSpec,
    schedule: Sequence,
    strategy: str = "naive",
    predicted_limit=None,
    samples=None,
    points=None,
    abs_mode: bool = False,
    resolution: Optional[int] = None,
    flow_step: Optional[float] = None,
    workers: int = 1,
    cache_bytes: int = DEFAULT_CACHE_BYTES,
    on_point=None,
) -> AverageResult:
    """
    Evaluate the average at every schedule point.

    ``on_point(index, partial_result)`` is called after each point so callers
    can flush partial output.
    """
    res = None
    averages, sup, l2, vals, times = [], [], [], [], []
    for idx, N in enumerate(schedule):
        t0 = time.perf_counter()
        if chain.continuous:
            avg = flow_entangled_average(chain, N, flow_step or 1.0, strategy)
        elif abs_mode:
            avg = entangled_average_abs(chain, N, samples, resolution, strategy, workers, cache_bytes)
        else:
            avg = entangled_average(chain, N, strategy, samples, workers, cache_bytes)
        times.append(time.perf_counter() - t0)
        averages.append(avg)
        if predicted_limit is not None:
            s, d = compare(avg, predicted_limit, samples)
            sup.append(s)
            l2.append(d)
        if points is not None or isinstance(avg, np.ndarray):
            vals.append(values_at(avg, points))
        res = AverageResult(list(schedule[: idx + 1]), list(averages), abs_mode,
                            predicted_limit, list(sup), list(l2), list(vals), list(times))
        if on_point is not None:
            on_point(idx, res)
    return res
