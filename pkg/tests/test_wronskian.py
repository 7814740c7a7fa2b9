import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from zeroresonance import (CertificationError, DomainError, RadialPotential, VolterraGrid,
                           bracket_first_zero, certified_sign, general_wronskian,
                           resonance_free_sweep, wronskian_enclosure)
from zeroresonance.wronskian import _midpoint

PUBLISHED_LO, PUBLISHED_HI = 1.67626, 1.68742
# the true first zero, certified at deep truncation
KAPPA_STAR = 1.6798077728


def shoot(kappa):
    """Non-certified Wronskian from two tight ODE integrations."""
    def rhs(r, y):
        return [y[1], -(2 * y[1] + kappa * math.exp(-r) * y[0]) / r]

    r0 = 1e-5
    yi = [1 - kappa * r0 / 2, -kappa / 2 + kappa * (kappa + 2) * r0 / 6]
    si = solve_ivp(rhs, (r0, 1.0), yi, method="DOP853", rtol=1e-12, atol=1e-14)
    R = 60.0
    se = solve_ivp(rhs, (R, 1.0), [1 / R, -1 / R ** 2], method="DOP853", rtol=1e-12, atol=1e-16)
    ui, dui = si.y[0, -1], si.y[1, -1]
    ue, due = se.y[0, -1], se.y[1, -1]
    return ue * dui - ui * due


def test_value_at_zero():
    w = wronskian_enclosure(0).enclosure
    assert w.contains(1.0) and w.width <= 1e-10


def test_published_interval_signs():
    # one exterior pair leaves an O(1e-2) enclosure, too wide to decide
    assert wronskian_enclosure("1.67626", 16, 1).sign == 0
    assert wronskian_enclosure("1.67626", 16, 2).sign == 1
    assert certified_sign("1.68742").sign == -1


def test_escalation_deepens_truncation():
    s = certified_sign("1.679", K_int=8, K_ext=1)
    assert s.sign == 1
    assert (s.K_int, s.K_ext) != (8, 1)


def test_bracket_coarse():
    br = bracket_first_zero(1, 2, 0.02)
    assert br.converged
    assert br.width <= 0.02
    assert PUBLISHED_LO - 0.012 <= br.lo and br.hi <= PUBLISHED_HI + 0.012
    assert br.contains(KAPPA_STAR)


def test_bracket_fine_subinterval():
    br = bracket_first_zero("1.67626", "1.68742", 1e-4)
    assert br.converged and float(br.b - br.a) <= 1e-4
    assert PUBLISHED_LO <= br.lo and br.hi <= PUBLISHED_HI
    assert br.contains(KAPPA_STAR)


def test_bracket_nesting_and_shrink():
    br = bracket_first_zero(1, 2, 1e-6)
    hist = br.history
    for (a0, b0), (a1, b1) in zip(hist, hist[1:]):
        assert a0 <= a1 < b1 <= b0
        assert (b0 - a0) / (b1 - a1) >= F(3, 2)


def test_unreachable_tolerance_reports_best_bracket():
    br = bracket_first_zero(1, 2, 1e-14, max_escalations=1)
    assert not br.converged
    assert br.contains(KAPPA_STAR)
    assert wronskian_enclosure(br.a, 64, 3).sign == 1


@pytest.mark.parametrize("lo,hi,tol", [(1, 1, 0.1), (2, 1, 0.1), (1, 2, 0.0), (1, 2, -1), (-1, 2, 0.1)])
def test_bad_brackets(lo, hi, tol):
    with pytest.raises(DomainError):
        bracket_first_zero(lo, hi, tol)


def test_bracket_without_sign_change():
    with pytest.raises(CertificationError):
        bracket_first_zero(1, "1.5", 0.01)


def test_minimality_sweep():
    br = bracket_first_zero(1, 2, 1e-3)
    samples = resonance_free_sweep(br.a)
    assert len(samples) == 64
    assert all(s.sign == 1 for s in samples)


def test_agrees_with_volterra_sign():
    V = RadialPotential.yukawa()
    grid = VolterraGrid.build(V, 3, N=2048)
    for k in (0.8, 1.68, 2.3):
        w = general_wronskian(V, 3, k, grid, estimate_error=False).value
        assert (w > 0) == (certified_sign(k).sign > 0)


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=F(1, 20), max_value=F(7, 2), max_denominator=10 ** 4))
def test_certified_sign_matches_shoot(kappa):
    if abs(float(kappa) - KAPPA_STAR) < 1e-6:
        return
    s = certified_sign(kappa)
    assert s.sign != 0
    assert s.enclosure.sign() == (1 if shoot(float(kappa)) > 0 else -1)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=10, max_denominator=10 ** 6),
       st.fractions(min_value=F(1, 10 ** 6), max_value=5, max_denominator=10 ** 6))
def test_midpoint_contracts(a, d):
    b = a + d
    m = _midpoint(a, b)
    assert a < m < b
    assert max(m - a, b - m) <= F(2, 3) * (b - a)
