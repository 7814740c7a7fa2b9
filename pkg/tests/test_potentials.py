import numpy as np
import pytest

from zeroresonance import DomainError, RadialPotential, check_admissible, load_tabulated


def test_yukawa_admissible():
    rep = check_admissible(RadialPotential.yukawa())
    assert rep.passed and not rep.failures
    assert rep.weighted_integral == pytest.approx(1.0, rel=1e-8)
    assert rep.small_r_limit < 1e-30 and rep.large_r_limit == 0.0


def test_pure_hardy_refused():
    rep = check_admissible(RadialPotential.truncated_hardy(0.0))
    assert not rep.passed
    assert rep.small_r_limit == pytest.approx(1.0)
    assert any("r -> 0" in f for f in rep.failures)
    assert any("r -> inf" in f for f in rep.failures)


def test_truncated_hardy_admissible():
    eps = 0.01
    rep = check_admissible(RadialPotential.truncated_hardy(eps))
    assert rep.passed
    # int_eps^{1/eps} r r^-2 dr = 2 log(1/eps)
    assert rep.weighted_integral == pytest.approx(2 * np.log(1 / eps), rel=1e-6)


def test_scaled_integral_is_linear():
    rep = check_admissible(RadialPotential.scaled(2, RadialPotential.yukawa()))
    assert rep.passed
    assert rep.weighted_integral == pytest.approx(2.0, rel=1e-8)


@pytest.mark.parametrize("c", [0.0, -1.0])
def test_scale_must_be_positive(c):
    with pytest.raises(DomainError):
        RadialPotential.scaled(c, RadialPotential.yukawa())


def test_scale_chain():
    V = RadialPotential.scaled(3, RadialPotential.scaled(0.5, RadialPotential.exponential()))
    assert V.root.kind == "exponential"
    assert V.total_scale == pytest.approx(1.5)
    assert V(2.0) == pytest.approx(1.5 * np.exp(-2.0))


def test_presets():
    assert RadialPotential.from_preset("yukawa")(1.0) == pytest.approx(np.exp(-1.0))
    V = RadialPotential.from_preset("truncated_hardy", eps=0.1)
    assert V(0.05) == 0 and V(0.5) == pytest.approx(4.0) and V(20.0) == 0
    with pytest.raises(DomainError):
        RadialPotential.from_preset("coulomb")
    with pytest.raises(DomainError):
        RadialPotential.truncated_hardy(1.5)


def test_tabulated_interpolation():
    r = np.array([0.1, 1.0, 10.0])
    V = RadialPotential.tabulated(r, [3.0, 1.0, 0.5])
    assert V(0.01) == 3.0
    assert V(np.sqrt(0.1)) == pytest.approx(2.0)  # linear in log r
    assert V(11.0) == 0.0
    assert V.sign_info == "nonneg"
    W = RadialPotential.tabulated(r, [1.0, -1.0, 0.0], negative_decay=3.0)
    assert W.sign_info == "signed"
    assert W.negative_part(1.0) == 1.0 and W.positive_part(1.0) == 0.0


@pytest.mark.parametrize("grid,vals", [
    ([1.0], [1.0]),
    ([1.0, 0.5], [1.0, 1.0]),
    ([-1.0, 1.0], [1.0, 1.0]),
    ([1.0, 2.0], [1.0, np.nan]),
])
def test_tabulated_validation(grid, vals):
    with pytest.raises(DomainError):
        RadialPotential.tabulated(grid, vals)


def test_load_tabulated(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("# r V\n0.5, 1.2\n1.0 0.8  # comment\n\n4.0 0.1\n")
    V = load_tabulated(p)
    assert V.describe()["samples"] == 3
    assert V(1.0) == pytest.approx(0.8)
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n")
    with pytest.raises(DomainError):
        load_tabulated(bad)


def test_slow_power_law_refused():
    # r^-1.5 at infinity keeps r^2 V growing
    V = RadialPotential("custom", lambda r: 1.0 / (1.0 + r) ** 1.5)
    rep = check_admissible(V)
    assert not rep.passed
    assert rep.as_dict()["failures"]
