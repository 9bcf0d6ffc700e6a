"""
Concrete function representations on standard probability spaces.

Four representations are supported:

* :class:`GridFunction` -- left-endpoint samples ``x_i = i/M`` on ``[0, 1)``
  with the counting measure scaled by ``1/M``.
* :class:`FourierFunction` -- trigonometric polynomial with coefficients
  indexed ``-K..K`` for the basis ``e_j(x) = exp(2 pi i j x)``.
* :class:`FiniteFunction` -- values on ``Z_q`` with uniform measure.
* :class:`CylinderFunction` -- a function on the two-sided Bernoulli(1/2, 1/2)
  shift space that depends only on the coordinates in the window ``[a, b]``.

All objects are immutable; every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

MAX_CYLINDER_SPAN = 30


class RepresentationError(ValueError):
    """Two functions (or a function and a system/operator) do not share a representation."""


class ConversionError(ValueError):
    """Unsupported conversion pair, or a target resolution that cannot hold the data."""


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError("function values must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError("function values must be finite")
    arr.setflags(write=False)
    return arr


class FunctionRep:
    """Common arithmetic for the four representations."""

    kind: str
    values: np.ndarray

    def shape_key(self):
        raise NotImplementedError

    def _new(self, values):
        raise NotImplementedError

    def _check(self, other):
        if not isinstance(other, FunctionRep) or self.shape_key() != other.shape_key():
            raise RepresentationError(
                f"incompatible representations: {self.describe()} vs "
                f"{other.describe() if isinstance(other, FunctionRep) else type(other).__name__}"
            )

    def describe(self) -> str:
        return f"{self.kind}{self.shape_key()[1:]}"

    def __add__(self, other):
        self._check(other)
        return self._new(self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return self._new(self.values - other.values)

    def __mul__(self, scalar):
        if isinstance(scalar, FunctionRep):
            return NotImplemented
        return self._new(complex(scalar) * self.values)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._new(self.values / complex(scalar))

    def __neg__(self):
        return self._new(-self.values)

    def zeros_like(self):
        return self._new(np.zeros_like(self.values))

    def constant_like(self, c=1.0):
        """The constant function ``c`` in the same representation."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class GridFunction(FunctionRep):
    values: np.ndarray
    kind: str = field(default="grid", init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.size < 2:
            raise ValueError("grid resolution M must be >= 2")

    @property
    def M(self) -> int:
        return self.values.size

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.M) / self.M

    def shape_key(self):
        return ("grid", self.M)

    def _new(self, values):
        return GridFunction(values)

    def constant_like(self, c=1.0):
        return GridFunction(np.full(self.M, complex(c)))

    @classmethod
    def from_callable(cls, fn, M: int) -> "GridFunction":
        return cls(np.asarray(fn(np.arange(M) / M), dtype=complex))


@dataclass(frozen=True, eq=False)
class FourierFunction(FunctionRep):
    """Coefficients ``values[j + K]`` of ``e_j`` for ``j = -K..K``."""

    values: np.ndarray
    kind: str = field(default="fourier", init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.size % 2 != 1:
            raise ValueError("fourier coefficient array must have odd length 2K+1")

    @property
    def K(self) -> int:
        return (self.values.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def coeff(self, j: int) -> complex:
        if abs(j) > self.K:
            return 0j
        return complex(self.values[j + self.K])

    def shape_key(self):
        return ("fourier", self.K)

    def _new(self, values):
        return FourierFunction(values)

    def constant_like(self, c=1.0):
        return FourierFunction.basis(0, self.K) * c

    @classmethod
    def basis(cls, j: int, K: int) -> "FourierFunction":
        if abs(j) > K:
            raise ValueError(f"mode {j} outside cutoff {K}")
        c = np.zeros(2 * K + 1, dtype=complex)
        c[j + K] = 1.0
        return cls(c)

    @classmethod
    def from_modes(cls, modes: dict, K: int) -> "FourierFunction":
        c = np.zeros(2 * K + 1, dtype=complex)
        for j, v in modes.items():
            if abs(j) > K:
                raise ValueError(f"mode {j} outside cutoff {K}")
            c[j + K] += v
        return cls(c)

    def evaluate(self, x) -> np.ndarray:
        """Evaluate the trigonometric polynomial at arbitrary points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.exp(2j * np.pi * np.outer(x, self.modes)) @ self.values

    def on_grid(self, M: int) -> np.ndarray:
        """Values at ``i/M`` via one FFT (modes are folded mod M, so any M works)."""
        buf = np.zeros(M, dtype=complex)
        np.add.at(buf, self.modes % M, self.values)
        return np.fft.ifft(buf) * M


@dataclass(frozen=True, eq=False)
class FiniteFunction(FunctionRep):
    values: np.ndarray
    kind: str = field(default="finite", init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.size < 1:
            raise ValueError("q must be >= 1")

    @property
    def q(self) -> int:
        return self.values.size

    def shape_key(self):
        return ("finite", self.q)

    def _new(self, values):
        return FiniteFunction(values)

    def constant_like(self, c=1.0):
        return FiniteFunction(np.full(self.q, complex(c)))


@dataclass(frozen=True, eq=False)
class CylinderFunction(FunctionRep):
    """
    Function of the bits ``x_a, ..., x_b`` of a two-sided binary sequence.

    ``values`` has ``2**(b - a + 1)`` entries; the bit pattern is read as a
    binary number with coordinate ``a`` as the most significant bit.
    """

    a: int
    b: int
    values: np.ndarray
    kind: str = field(default="cylinder", init=False)

    def __post_init__(self):
        a, b = int(self.a), int(self.b)
        if a > b:
            raise ValueError("cylinder window needs a <= b")
        if b - a > MAX_CYLINDER_SPAN:
            raise ValueError(
                f"cylinder window [{a}, {b}] exceeds the span cap b - a <= {MAX_CYLINDER_SPAN}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.size != 2 ** (b - a + 1):
            raise ValueError(
                f"cylinder table needs {2 ** (b - a + 1)} entries, got {self.values.size}"
            )

    @property
    def width(self) -> int:
        return self.b - self.a + 1

    @property
    def tensor(self) -> np.ndarray:
        """Table viewed with one axis per coordinate (axis 0 = coordinate a)."""
        return self.values.reshape((2,) * self.width)

    def shape_key(self):
        return ("cylinder",)

    def describe(self):
        return f"cylinder[{self.a},{self.b}]"

    def _new(self, values):
        return CylinderFunction(self.a, self.b, values)

    def constant_like(self, c=1.0):
        return CylinderFunction(0, 0, [complex(c), complex(c)])

    def shifted(self, n: int) -> "CylinderFunction":
        return CylinderFunction(self.a + n, self.b + n, self.values)

    def widen(self, a: int, b: int) -> "CylinderFunction":
        if a > self.a or b < self.b:
            raise ConversionError(f"window [{a},{b}] does not contain [{self.a},{self.b}]")
        shape = [1] * (self.a - a) + [2] * self.width + [1] * (b - self.b)
        full = np.broadcast_to(self.values.reshape(shape), (2,) * (b - a + 1))
        return CylinderFunction(a, b, full.reshape(-1))

    def marginal(self, a: int, b: int) -> np.ndarray:
        """Conditional expectation onto the coordinates ``[a, b]`` inside the window."""
        lo, hi = a - self.a, b - self.a
        axes = tuple(i for i in range(self.width) if i < lo or i > hi)
        t = self.tensor
        return t.mean(axis=axes) if axes else t

    def _combine(self, other, op):
        if not isinstance(other, CylinderFunction):
            self._check(other)
        a, b = min(self.a, other.a), max(self.b, other.b)
        return CylinderFunction(a, b, op(self.widen(a, b).values, other.widen(a, b).values))

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def pointwise_product(self, other: "CylinderFunction") -> "CylinderFunction":
        return self._combine(other, np.multiply)


AnyFunction = Union[GridFunction, FourierFunction, FiniteFunction, CylinderFunction]


def _require_same(f: FunctionRep, g: FunctionRep):
    if not isinstance(f, FunctionRep) or not isinstance(g, FunctionRep):
        raise RepresentationError("both arguments must be FunctionRep instances")
    if f.shape_key() != g.shape_key():
        raise RepresentationError(f"incompatible representations: {f.describe()} vs {g.describe()}")


def inner_product(f: FunctionRep, g: FunctionRep) -> complex:
    """L^2 inner product, conjugate-linear in ``g``."""
    _require_same(f, g)
    if isinstance(f, CylinderFunction):
        lo, hi = max(f.a, g.a), min(f.b, g.b)
        if lo > hi:
            # disjoint windows depend on independent coordinates
            return complex(mean(f) * np.conj(mean(g)))
        fm, gm = f.marginal(lo, hi), g.marginal(lo, hi)
        return complex(np.mean(fm * np.conj(gm)))
    if isinstance(f, FourierFunction):
        return complex(np.vdot(g.values, f.values))
    return complex(np.vdot(g.values, f.values) / f.values.size)


def sup_grid_size(K: int) -> int:
    return 8 * K + 8


def pointwise_values(f: FunctionRep) -> np.ndarray:
    """Values on which pointwise norms are computed (fourier: oversampled grid)."""
    if isinstance(f, FourierFunction):
        return f.on_grid(sup_grid_size(f.K))
    return f.values


def norm(f: FunctionRep, p=2) -> float:
    """
    Discrete L^p norm for ``p`` in {1, 2, inf}.

    The fourier sup norm is approximated on ``8K + 8`` equispaced points;
    the fourier L^1 norm uses the same grid.
    """
    if p in (np.inf, "inf", float("inf")):
        return float(np.max(np.abs(pointwise_values(f))))
    if p == 2:
        if isinstance(f, FourierFunction):
            return float(np.linalg.norm(f.values))
        return float(np.sqrt(np.mean(np.abs(f.values) ** 2)))
    if p == 1:
        return float(np.mean(np.abs(pointwise_values(f))))
    raise ValueError(f"unsupported norm exponent {p!r}")


def mean(f: FunctionRep) -> complex:
    """Integral of ``f``, i.e. the inner product with the constant one function."""
    if isinstance(f, FourierFunction):
        return complex(f.values[f.K])
    return complex(np.mean(f.values))


def convert(f: FunctionRep, target) -> FunctionRep:
    """
    Change representation.

    ``target`` is a tuple: ``("grid", M)``, ``("fourier", K)``,
    ``("finite", q)`` or ``("cylinder", a, b)``.
    """
    kind = target[0]
    if isinstance(f, FourierFunction) and kind == "grid":
        return GridFunction(f.on_grid(int(target[1])))
    if isinstance(f, FourierFunction) and kind == "fourier" and int(target[1]) == f.K:
        return f
    if isinstance(f, GridFunction) and kind == "fourier":
        K = int(target[1])
        if K > f.M // 2 - 1:
            raise ConversionError(f"cutoff K={K} too large for grid resolution M={f.M}")
        spec = np.fft.fft(f.values) / f.M
        return FourierFunction(spec[np.arange(-K, K + 1) % f.M])
    if isinstance(f, GridFunction) and kind == "grid" and int(target[1]) == f.M:
        return f
    if isinstance(f, CylinderFunction) and kind == "cylinder":
        return f.widen(int(target[1]), int(target[2]))
    if isinstance(f, FiniteFunction) and kind == "finite" and int(target[1]) == f.q:
        return f
    raise ConversionError(f"unsupported conversion {f.describe()} -> {target}")


def distance(f: FunctionRep, g: FunctionRep, p=2) -> float:
    return norm(f - g, p)


# -- Bernoulli sample points -------------------------------------------------

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
    x = ((x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    x = ((x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return x ^ (x >> np.uint64(31))


@dataclass(frozen=True)
class BernoulliSamples:
    """
    A seeded set of points of the two-sided binary shift space.

    Bits are produced on demand by hashing ``(seed, sample, coordinate)``, so
    evaluating ``T^n f`` only touches the coordinates ``[a + n, b + n]``.
    """

    count: int
    seed: int = 0

    def bits(self, coords) -> np.ndarray:
        """Bit matrix of shape ``(count, len(coords))``."""
        coords = np.asarray(coords, dtype=np.int64).astype(np.uint64)
        with np.errstate(over="ignore"):
            key = _splitmix64(np.uint64(self.seed) ^ np.uint64(0xA5A5A5A5))
            rows = _splitmix64(key + np.arange(self.count, dtype=np.uint64))
            h = _splitmix64(rows[:, None] ^ _splitmix64(coords[None, :]))
        return (h >> np.uint64(63)).astype(np.int64)

    def evaluate(self, f: CylinderFunction, shift: int = 0) -> np.ndarray:
        """Values of ``T^shift f`` at every sample point."""
        b = self.bits(np.arange(f.a, f.b + 1, dtype=np.int64) + shift)
        weights = 1 << np.arange(f.width - 1, -1, -1, dtype=np.int64)
        return np.asarray(f.values)[b @ weights]


# -- text serialization ------------------------------------------------------

def to_dict(f: FunctionRep) -> dict:
    pairs = [[float(v.real), float(v.imag)] for v in f.values]
    if isinstance(f, GridFunction):
        return {"rep": "grid", "M": f.M, "values": pairs}
    if isinstance(f, FourierFunction):
        return {"rep": "fourier", "K": f.K, "values": pairs}
    if isinstance(f, FiniteFunction):
        return {"rep": "finite", "q": f.q, "values": pairs}
    return {"rep": "cylinder", "window": [f.a, f.b], "values": pairs}


def from_dict(d: dict) -> FunctionRep:
    rep = d.get("rep")
    vals = np.array([complex(re, im) for re, im in d["values"]], dtype=complex)
    if rep == "grid":
        out = GridFunction(vals)
        size = d.get("M", out.M)
    elif rep == "fourier":
        out = FourierFunction(vals)
        size = d.get("K", out.K)
    elif rep == "finite":
        out = FiniteFunction(vals)
        size = d.get("q", out.q)
    elif rep == "cylinder":
        a, b = d["window"]
        return CylinderFunction(a, b, vals)
    else:
        raise ValueError(f"unknown representation tag {rep!r}")
    if size != out.shape_key()[1]:
        raise ValueError(f"declared shape {size} does not match {len(vals)} stored values")
    return out
