import copy
import json

import numpy as np
import pytest

from entangled.oracle import (
    FIXTURE_TOL,
    Fixture,
    FixtureSchemaError,
    default_fixtures,
    geometric_cesaro,
    make_fixture,
    regenerate_fixture,
    regression_fixture_config,
)


def test_geometric_cesaro_examples():
    for N in (1, 2, 17, 1000):
        assert geometric_cesaro(1, N) == 1
    for N in (2, 10, 1000):
        assert abs(geometric_cesaro(-1, N)) < 1e-15
    assert geometric_cesaro(1j, 3) == pytest.approx(-1 / 3, abs=1e-15)
    with pytest.raises(ValueError):
        geometric_cesaro(1.1, 4)


def test_geometric_cesaro_against_loop():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        phi = rng.uniform(0, 2 * np.pi)
        N = int(rng.integers(1, 10**4 + 1))
        lam = np.exp(1j * phi)
        loop = 0j
        p = 1 + 0j
        for _ in range(N):
            p *= lam
            loop += p
        assert abs(geometric_cesaro(lam, N) - loop / N) <= 1e-12


def test_fresh_fixture_passes_with_zero_diff():
    fx = make_fixture("fresh", regression_fixture_config(3), [4, 8])
    check = regenerate_fixture(fx)
    assert check.passed and check.max_abs_diff == 0


def test_perturbed_fixture_fails():
    fx = make_fixture("p", regression_fixture_config(3), [8])
    label, v = fx.values[2]
    fx.values[2] = (label, v + 1e-6)
    check = regenerate_fixture(fx)
    assert not check.passed
    assert check.max_abs_diff == pytest.approx(1e-6, rel=1e-3)


def test_shipped_fixtures_pass(fixtures_dir):
    paths = sorted(fixtures_dir.glob("*.json"))
    names = {p.stem for p in paths}
    assert "regression_q4_m3_k2" in names
    for p in paths:
        check = regenerate_fixture(Fixture.load(p))
        assert check.passed, (p.name, check.max_abs_diff)
        assert check.max_abs_diff <= FIXTURE_TOL


def test_shipped_fixtures_match_generator(fixtures_dir):
    for fx in default_fixtures():
        stored = json.loads((fixtures_dir / f"{fx.name}.json").read_text())
        assert stored == json.loads(json.dumps(fx.to_dict()))


def test_regression_fixture_shape(fixtures_dir):
    fx = Fixture.load(fixtures_dir / "regression_q4_m3_k2.json")
    assert fx.config["k"] == 2 and len(fx.config["alpha"]) == 3
    assert fx.config["systems"][0]["q"] == 4
    assert fx.schedule == [8] and len(fx.values) == 4
    for row in fx.config["operators"]:
        data = np.array(row["data"])
        assert np.all(np.abs(data) <= 1)


def test_schema_errors(tmp_path):
    fx = make_fixture("x", regression_fixture_config(1), [2])
    d = fx.to_dict()
    bad = copy.deepcopy(d)
    bad["schema"] = "other/9"
    with pytest.raises(FixtureSchemaError):
        Fixture.from_dict(bad)
    drift = copy.deepcopy(d)
    drift["config"]["alpha"] = [1, 2]
    with pytest.raises(FixtureSchemaError):
        regenerate_fixture(Fixture.from_dict(drift))
    old = copy.deepcopy(d)
    old["generator_version"] = 0
    with pytest.raises(FixtureSchemaError):
        regenerate_fixture(Fixture.from_dict(old))
    p = tmp_path / "f.json"
    fx.save(p)
    assert Fixture.load(p).values == fx.values
