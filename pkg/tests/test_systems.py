import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entangled.space import (
    BernoulliSamples,
    CylinderFunction,
    FiniteFunction,
    FourierFunction,
    RepresentationError,
    inner_product,
    mean,
    norm,
)
from entangled.systems import (
    GOLDEN_THETA,
    SystemDescriptor,
    SystemKindError,
    dropped_mass,
    flow_apply,
    jgl_decompose,
    koopman_apply,
    reversible_rank,
)

e = FourierFunction.basis
rotation = SystemDescriptor("rotation", theta=GOLDEN_THETA)
doubling = SystemDescriptor("doubling")
bern = SystemDescriptor("bernoulli_shift")


def close(f, g, tol=1e-12):
    np.testing.assert_allclose(np.asarray(f.values), np.asarray(g.values), atol=tol)


# -- examples -----------------------------------------------------------------

def test_koopman_examples():
    close(koopman_apply(SystemDescriptor("rotation", theta=0.25), 1, e(1, 2)), 1j * e(1, 2))
    close(koopman_apply(doubling, 2, e(1, 3)), e(1, 3).zeros_like())
    close(koopman_apply(SystemDescriptor("finite_cyclic", q=4), 1, FiniteFunction([1, 0, 0, 0])),
          FiniteFunction([0, 0, 0, 1]))


def test_koopman_bernoulli_shifts_window():
    f = CylinderFunction(2, 4, np.arange(8.0))
    g = koopman_apply(bern, 3, f)
    assert (g.a, g.b) == (5, 7)
    np.testing.assert_array_equal(g.values, f.values)


def test_doubling_huge_exponent_drops_everything():
    # bit-length check, no overflow
    out = koopman_apply(doubling, 10**6, FourierFunction.from_modes({0: 2, 1: 1, -5: 3}, 8))
    close(out, FourierFunction.from_modes({0: 2}, 8))


def test_doubling_dropped_mass():
    f = FourierFunction.from_modes({1: 1, 3: 2}, 4)
    assert dropped_mass(doubling, 1, f) == pytest.approx(2.0)   # mode 6 leaves
    assert dropped_mass(doubling, 0, f) == 0


def test_representation_mismatch():
    with pytest.raises(RepresentationError):
        koopman_apply(rotation, 1, FiniteFunction([1, 2]))
    with pytest.raises(RepresentationError):
        koopman_apply(SystemDescriptor("finite_cyclic", q=3), 1, FiniteFunction([1, 2]))


def test_flow_examples():
    flow1 = SystemDescriptor("torus_flow", theta=1.0)
    close(flow_apply(flow1, 0.5, e(1, 1)), -e(1, 1))
    f = FourierFunction.from_modes({-1: 2, 1: 1j}, 2)
    close(flow_apply(flow1, 0.0, f), f)
    close(flow_apply(SystemDescriptor("torus_flow", theta=1 / 3), 3, e(2, 2)), e(2, 2), 1e-12)
    with pytest.raises(SystemKindError):
        flow_apply(rotation, 1.0, e(1, 1))


def test_jgl_examples():
    f = FourierFunction.from_modes({0: 3, 2: 1}, 3)
    f_r, f_s = jgl_decompose(doubling, f)
    close(f_r, FourierFunction.from_modes({0: 3}, 3))
    close(f_s, e(2, 3))

    g = FourierFunction.from_modes({-2: 1, 1: 2j, 3: -1}, 3)
    g_r, g_s = jgl_decompose(rotation, g)
    close(g_r, g)
    close(g_s, g.zeros_like())

    h_r, h_s = jgl_decompose(SystemDescriptor("finite_cyclic", q=2), FiniteFunction([1, 0]))
    close(h_r, FiniteFunction([1, 0]))
    close(h_s, FiniteFunction([0, 0]))


def test_jgl_bernoulli():
    f = CylinderFunction(0, 1, [1, 2, 3, 6])
    f_r, f_s = jgl_decompose(bern, f)
    assert mean(f_r) == pytest.approx(3)
    assert mean(f_s) == pytest.approx(0)
    assert abs(inner_product(f_r, f_s)) < 1e-12


def test_reversible_rank():
    assert reversible_rank(doubling) == 1
    assert reversible_rank(bern) == 1
    assert reversible_rank(rotation) == "full"
    assert reversible_rank(SystemDescriptor("finite_cyclic", q=5)) == "full"
    assert reversible_rank(SystemDescriptor("torus_flow")) == "full"


def test_descriptor_metadata():
    assert SystemDescriptor("rotation").theta == GOLDEN_THETA
    assert doubling.weakly_mixing and bern.weakly_mixing
    assert not rotation.weakly_mixing
    assert doubling.compatible_representation == "fourier"
    assert bern.compatible_representation == "cylinder"
    assert SystemDescriptor("finite_cyclic", q=3).compatible_representation == "finite"
    with pytest.raises(SystemKindError):
        SystemDescriptor("tent")
    with pytest.raises(ValueError):
        SystemDescriptor("finite_cyclic", q=0)


# -- eigen-data invariants ------------------------------------------------------

@pytest.mark.parametrize("system,like", [
    (rotation, e(0, 5)),
    (SystemDescriptor("rotation", theta=0.3), e(0, 4)),
    (SystemDescriptor("finite_cyclic", q=6), FiniteFunction(np.ones(6))),
    (doubling, e(0, 5)),
    (bern, CylinderFunction(0, 0, [1, 1])),
])
def test_eigen_data_invariants(system, like):
    data = system.eigen_data(getattr(like, "K", None))
    for lam, h in data:
        assert abs(abs(lam) - 1) <= 1e-12
        Th = koopman_apply(system, 1, h)
        if isinstance(h, CylinderFunction):
            assert mean(Th) == pytest.approx(lam * mean(h))
        else:
            close(Th, lam * h, 1e-10)
    if system.weakly_mixing:
        assert len(data) == 1 and data[0][0] == 1
        assert mean(data[0][1]) == pytest.approx(1)


# -- properties -----------------------------------------------------------------

cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@st.composite
def system_and_function(draw):
    kind = draw(st.sampled_from(["rotation", "doubling", "finite_cyclic", "bernoulli_shift"]))
    if kind == "finite_cyclic":
        q = draw(st.integers(1, 9))
        return SystemDescriptor(kind, q=q), FiniteFunction(draw(st.lists(cplx, min_size=q, max_size=q)))
    if kind == "bernoulli_shift":
        w = draw(st.integers(0, 3))
        a = draw(st.integers(-5, 5))
        vals = draw(st.lists(cplx, min_size=2 ** (w + 1), max_size=2 ** (w + 1)))
        return SystemDescriptor(kind), CylinderFunction(a, a + w, vals)
    K = draw(st.integers(0, 8))
    theta = draw(st.floats(0, 1, exclude_max=True)) if kind == "rotation" else None
    return (SystemDescriptor(kind, theta=theta),
            FourierFunction(draw(st.lists(cplx, min_size=2 * K + 1, max_size=2 * K + 1))))


@given(system_and_function(), st.integers(0, 40))
def test_measure_preservation(sf, n):
    s, f = sf
    assert mean(koopman_apply(s, n, f)) == pytest.approx(mean(f), abs=1e-10)


@given(system_and_function(), st.integers(0, 20), st.integers(0, 20))
def test_semigroup_law(sf, n, m):
    s, f = sf
    lhs = koopman_apply(s, n + m, f)
    rhs = koopman_apply(s, n, koopman_apply(s, m, f))
    if isinstance(f, CylinderFunction):
        assert (lhs.a, lhs.b) == (rhs.a, rhs.b)
        np.testing.assert_array_equal(lhs.values, rhs.values)
    elif isinstance(f, FiniteFunction):
        np.testing.assert_array_equal(lhs.values, rhs.values)
    else:
        close(lhs, rhs, 1e-10)


@settings(max_examples=60)
@given(system_and_function(), st.integers(0, 20))
def test_sup_isometry(sf, n):
    s, f = sf
    g = koopman_apply(s, n, f)
    if isinstance(f, (FiniteFunction, CylinderFunction)):
        assert norm(g, np.inf) == norm(f, np.inf)
    elif s.kind == "rotation":
        # rotation never drops modes; sup is sampled on a finite grid
        sup_f = norm(f, np.inf)
        fine = np.max(np.abs(f.evaluate(np.linspace(0, 1, 20000, endpoint=False))))
        assert norm(g, np.inf) <= fine * (1 + 1e-9) + 1e-9
        # Bernstein: |p'| <= 2 pi K sup|p|, samples sit within h/2 of the maximum
        assert norm(g, np.inf) >= fine * (1 - np.pi * f.K / (8 * f.K + 8)) - 1e-9
        assert sup_f <= fine * (1 + 1e-9) + 1e-9
    elif dropped_mass(s, n, f) == 0:
        # f(2^n x) on the sup grid samples f at a subset of the same grid points
        assert norm(g, np.inf) <= norm(f, np.inf) + 1e-9
        if n == 0:
            assert norm(g, np.inf) == norm(f, np.inf)


@given(system_and_function())
def test_jgl_orthogonal_and_exact(sf):
    s, f = sf
    f_r, f_s = jgl_decompose(s, f)
    assert abs(inner_product(f_r, f_s)) <= 1e-10 * max(1.0, norm(f, 2) ** 2)
    rec = f_r + f_s
    if isinstance(f, CylinderFunction):
        np.testing.assert_allclose(rec.widen(min(rec.a, f.a), max(rec.b, f.b)).values,
                                   f.widen(min(rec.a, f.a), max(rec.b, f.b)).values, atol=1e-12)
    else:
        close(rec, f, 1e-12)


@given(st.floats(0, 1), st.floats(0, 5), st.floats(0, 5), st.integers(0, 6))
def test_flow_semigroup(theta, t, u, K):
    s = SystemDescriptor("torus_flow", theta=theta)
    f = FourierFunction(np.arange(2 * K + 1) + 1j)
    close(flow_apply(s, t + u, f), flow_apply(s, t, flow_apply(s, u, f)), 1e-10)


def test_bernoulli_samples_track_koopman():
    s = BernoulliSamples(16, 2)
    f = CylinderFunction(0, 2, np.arange(8.0))
    np.testing.assert_array_equal(s.evaluate(koopman_apply(bern, 5, f)), s.evaluate(f, 5))
