import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entangled.operators import (
    DegenerateProbeError,
    OperatorSpec,
    UnsupportedOperatorError,
    apply_operator,
    probe_joint_bound,
    probe_twisted_compactness,
)
from entangled.space import (
    CylinderFunction,
    FiniteFunction,
    FourierFunction,
    GridFunction,
    RepresentationError,
    mean,
    norm,
)
from entangled.systems import GOLDEN_THETA, SystemDescriptor

e = FourierFunction.basis
V = OperatorSpec.volterra
doubling = SystemDescriptor("doubling")
rotation = SystemDescriptor("rotation", theta=GOLDEN_THETA)


def grid_fourier_coeffs(g: np.ndarray, K: int) -> np.ndarray:
    """Coefficients of a non-periodic grid function by the composite trapezoid on [0,1].

    ``g`` holds M+1 samples including the value at x=1.
    """
    M = g.size - 1
    x = np.arange(M + 1) / M
    j = np.arange(-K, K + 1)
    w = np.ones(M + 1)
    w[0] = w[-1] = 0.5
    return (np.exp(-2j * np.pi * np.outer(j, x)) * (w * g)).sum(axis=1) / M


def volterra_grid_with_endpoint(f: np.ndarray) -> np.ndarray:
    g = apply_operator(V(1), GridFunction(f)).values
    return np.append(g, g[-1] + (f[-1] + f[0]) / (2 * f.size))


# -- examples -----------------------------------------------------------------

def test_volterra_of_one_on_grid():
    M = 4096
    g = apply_operator(V(1), GridFunction(np.ones(M)))
    np.testing.assert_allclose(g.values, np.arange(M) / M, atol=1e-12)
    assert abs(mean(g) - 0.5) <= 1 / (2 * M)


def test_volterra_of_e1_fourier():
    for K in (1, 2, 7):
        g = apply_operator(V(1), e(1, K))
        assert g.coeff(1) == pytest.approx(1 / (2j * np.pi))
        assert g.coeff(0) == pytest.approx(-1 / (2j * np.pi))
        others = [g.coeff(j) for j in range(-K, K + 1) if j not in (0, 1)]
        np.testing.assert_allclose(others, 0, atol=1e-15)


def test_volterra_of_one_fourier_is_truncated_sawtooth():
    K = 5
    g = apply_operator(V(1), e(0, K))
    assert g.coeff(0) == pytest.approx(0.5)
    for j in range(1, K + 1):
        assert g.coeff(j) == pytest.approx(-1 / (2j * np.pi * j))
        assert g.coeff(-j) == pytest.approx(1 / (2j * np.pi * j))


def test_volterra_power_is_repeated_application():
    f = FourierFunction.from_modes({0: 1, 2: 1j, -3: 0.5}, 4)
    once = apply_operator(V(1), apply_operator(V(1), f))
    np.testing.assert_allclose(apply_operator(V(2), f).values, once.values, atol=1e-15)


def test_volterra_unsupported():
    with pytest.raises(UnsupportedOperatorError):
        apply_operator(V(1), FiniteFunction([1, 2]))
    with pytest.raises(UnsupportedOperatorError):
        apply_operator(V(1), CylinderFunction(0, 0, [1, 2]))
    with pytest.raises(ValueError):
        V(0)


def test_finite_rank_and_multiplication():
    u, v = FiniteFunction([1, 0, 0]), FiniteFunction([0, 2, 0])
    A = OperatorSpec.finite_rank([(u, v)])
    np.testing.assert_allclose(apply_operator(A, FiniteFunction([3, 1, 1])).values, [0, 2, 0])
    Mg = OperatorSpec.multiplication(FiniteFunction([1, 2, 3]))
    np.testing.assert_allclose(apply_operator(Mg, FiniteFunction([1, 1, 1j])).values, [1, 2, 3j])
    with pytest.raises(RepresentationError):
        OperatorSpec.finite_rank([(u, FiniteFunction([1, 2]))])
    with pytest.raises(RepresentationError):
        apply_operator(A, FiniteFunction([1, 2]))


def test_multiplication_fourier_is_truncated_product():
    f = FourierFunction.from_modes({1: 1}, 2)
    g = FourierFunction.from_modes({1: 1, -1: 2}, 2)
    out = apply_operator(OperatorSpec.multiplication(g), f)
    np.testing.assert_allclose(out.values, FourierFunction.from_modes({2: 1, 0: 2}, 2).values)


def test_matrix_operator():
    M = np.array([[0, 1], [1j, 0]])
    out = apply_operator(OperatorSpec.from_matrix(M), FiniteFunction([2, 3]))
    np.testing.assert_allclose(out.values, [3, 2j])
    with pytest.raises(RepresentationError):
        apply_operator(OperatorSpec.from_matrix(np.eye(3)), FiniteFunction([1, 2]))


def test_identity():
    f = FiniteFunction([1, 2])
    assert apply_operator(OperatorSpec.identity(), f) is f


def test_probe_finite_rank_exact():
    K = 6
    pairs = [(e(1, K), e(0, K) + e(2, K)), (e(-2, K), e(3, K)), (e(3, K), e(1, K))]
    A = OperatorSpec.finite_rank(pairs)
    f = FourierFunction.from_modes({1: 1, -2: 0.5, 3: 1j}, K)
    for system in (rotation, doubling):
        rep = probe_twisted_compactness(A, system, f, dim=3, n_max=12)
        assert rep.max_residual_sup <= 1e-10


def test_probe_identity_rotation():
    rep = probe_twisted_compactness(OperatorSpec.identity(), rotation, e(1, 4), dim=1, n_max=20)
    assert rep.max_residual_sup <= 1e-10
    assert rep.n_tested == 20 and rep.finite_rank_dim == 1


def test_probe_degenerate():
    with pytest.raises(DegenerateProbeError):
        probe_twisted_compactness(V(1), doubling, e(1, 8), dim=5, n_max=4)


def _explicit_doubling_orbit(K, n_max):
    """Coefficients of V T^n e_1 = (e_{2^n} - e_0) / (2 pi i 2^n), truncated at K."""
    cols = []
    for n in range(1, n_max + 1):
        c = np.zeros(2 * K + 1, dtype=complex)
        j = 2 ** n
        if j <= K:
            c[K + j] = 1 / (2j * np.pi * j)
            c[K] = -1 / (2j * np.pi * j)
        cols.append(c)
    return np.stack(cols, axis=1)


def _sampled_sup(coeffs, K):
    x = np.arange(8 * K + 8) / (8 * K + 8)
    basis = np.exp(2j * np.pi * np.outer(x, np.arange(-K, K + 1)))
    return np.max(np.abs(basis @ coeffs))


def test_probe_volterra_doubling_against_explicit_orbit():
    K, n_max = 64, 32
    X = _explicit_doubling_orbit(K, n_max)
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    previous = np.inf
    for dim in (1, 2, 4, 8):
        rep = probe_twisted_compactness(V(1), doubling, e(1, K), dim, n_max)
        r = int(np.sum(s[:dim] > s[0] * 1e-12))
        P = U[:, :r]
        resid = X - P @ (P.conj().T @ X)
        expected = _sampled_sup(resid, K)
        assert rep.raw_residual_sup == pytest.approx(expected, abs=1e-10)
        assert rep.max_residual_sup <= previous + 1e-10
        previous = rep.max_residual_sup
    assert previous < rep.singular_values[0]


def test_joint_bound_examples():
    fs = [e(1, 4), FourierFunction.from_modes({0: 1, 2: 0.5}, 4)]
    b = probe_joint_bound([OperatorSpec.identity()], [rotation], fs, 16)
    assert b == pytest.approx(1, abs=0.05)
    assert b <= 1 + 1e-9

    # V1 = x; its truncated series overshoots near x = 1, so the sampled sup is >= 1
    b = probe_joint_bound([V(1)], [doubling], [e(0, 64)], 4)
    assert b >= 1

    g = FiniteFunction([1, -3, 2])
    b = probe_joint_bound([OperatorSpec.multiplication(g)], [SystemDescriptor("finite_cyclic", q=3)],
                          [FiniteFunction(np.ones(3))], 5)
    assert b == 3
    with pytest.raises(ValueError):
        probe_joint_bound([V(1)], [doubling], [], 4)


def test_probe_report_fields_nonnegative():
    rep = probe_twisted_compactness(V(2), doubling, e(1, 32) + e(3, 32), 4, 16)
    d = rep.as_dict()
    for k in ("max_residual_sup", "raw_residual_sup", "joint_bound_estimate", "residual_l2"):
        assert d[k] >= 0
    assert d["n_tested"] >= 1


# -- properties -----------------------------------------------------------------

cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@st.composite
def op_and_functions(draw):
    kind = draw(st.sampled_from(["volterra_grid", "volterra_fourier", "finite_rank",
                                 "multiplication", "matrix"]))
    scalars = (draw(cplx), draw(cplx))
    if kind.startswith("volterra"):
        op = V(draw(st.integers(1, 3)))
        if kind == "volterra_grid":
            M = draw(st.integers(2, 16))
            fs = [GridFunction(draw(st.lists(cplx, min_size=M, max_size=M))) for _ in range(2)]
        else:
            K = draw(st.integers(0, 6))
            fs = [FourierFunction(draw(st.lists(cplx, min_size=2 * K + 1, max_size=2 * K + 1)))
                  for _ in range(2)]
        return op, fs, scalars
    q = draw(st.integers(1, 6))
    vec = st.lists(cplx, min_size=q, max_size=q).map(FiniteFunction)
    fs = [draw(vec), draw(vec)]
    if kind == "finite_rank":
        op = OperatorSpec.finite_rank([(draw(vec), draw(vec)) for _ in range(draw(st.integers(1, 3)))])
    elif kind == "multiplication":
        op = OperatorSpec.multiplication(draw(vec))
    else:
        op = OperatorSpec.from_matrix(np.array(draw(st.lists(cplx, min_size=q * q, max_size=q * q))).reshape(q, q))
    return op, fs, scalars


@given(op_and_functions())
def test_linearity(data):
    op, (f, g), (a, b) = data
    lhs = apply_operator(op, a * f + b * g)
    rhs = a * apply_operator(op, f) + b * apply_operator(op, g)
    scale = max(1.0, np.max(np.abs(lhs.values)), np.max(np.abs(rhs.values)))
    np.testing.assert_allclose(lhs.values, rhs.values, atol=1e-10 * scale)


@settings(max_examples=40)
@given(st.integers(0, 8), st.data())
def test_volterra_grid_fourier_agreement(K, data):
    vals = data.draw(st.lists(cplx, min_size=2 * K + 1, max_size=2 * K + 1))
    f = FourierFunction(vals)
    M = 1024
    exact = apply_operator(V(1), f).values
    g = volterra_grid_with_endpoint(f.on_grid(M))
    approx = grid_fourier_coeffs(g, K)
    assert np.linalg.norm(approx - exact) <= 1e-3 * max(1.0, norm(f, 2))


@given(st.lists(st.floats(0, 10), min_size=2, max_size=50))
def test_volterra_monotone_on_nonnegative(vals):
    g = apply_operator(V(1), GridFunction(vals)).values
    assert np.all(np.diff(g.real) >= 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.lists(st.integers(-12, 12), min_size=1, max_size=3, unique=True),
       st.sampled_from(["doubling", "rotation"]))
def test_probe_monotone_in_dim(d, modes, kind):
    K = 48
    f = FourierFunction.from_modes({j: 1.0 for j in modes}, K)
    system = SystemDescriptor(kind)
    prev = np.inf
    for dim in (1, 2, 4, 8):
        r = probe_twisted_compactness(V(d), system, f, dim, 16, joint_bound=1.0).max_residual_sup
        assert r <= prev + 1e-10
        prev = r
