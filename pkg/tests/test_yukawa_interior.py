import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from zeroresonance import (CertificationError, DomainError, RationalPolynomial, build_alpha_table,
                           u_int_trace, verify_monotone_from)
from zeroresonance.yukawa_interior import interior_partial_sums

# closed forms of the first six coefficient polynomials, ascending powers of kappa
CLOSED = {
    1: ([0, 1], 2),
    2: ([0, 2, 1], 12),
    3: ([0, 6, 8, 1], 144),
    4: ([0, 24, 66, 20, 1], 2880),
    5: ([0, 120, 624, 346, 40, 1], 86400),
    6: ([0, 720, 6840, 6204, 1246, 70, 1], 3628800),
}


@pytest.mark.parametrize("k", sorted(CLOSED))
def test_closed_forms_exact(k):
    num, den = CLOSED[k]
    expected = RationalPolynomial([F(c, den) for c in num])
    assert build_alpha_table(6)[k] == expected


def test_small_examples():
    assert build_alpha_table(1).evaluate(0)[1] == 0
    assert build_alpha_table(3).evaluate(1)[3] == F(5, 48)
    assert build_alpha_table(2)[0] == RationalPolynomial([1])


def test_bad_depth():
    for K in (0, -3, 2.5):
        with pytest.raises(DomainError):
            build_alpha_table(K)


def test_polynomial_arithmetic():
    p = RationalPolynomial([1, 2])
    q = RationalPolynomial([F(1, 2), 0, 3])
    assert (p * q)(F(3)) == p(F(3)) * q(F(3))
    assert (p - p) == RationalPolynomial()
    assert p.shift(2) == RationalPolynomial([0, 0, 1, 2])


def test_series_solves_ode_to_truncation_order():
    # r u'' + 2 u' + kappa exp(-r) u with u = sum (-1)^k alpha_k r^k: the
    # coefficient of r^j vanishes identically in kappa for j < K
    K = 10
    table = build_alpha_table(K)
    kappa = RationalPolynomial([0, 1])
    c = [table[k] * (1 if k % 2 == 0 else -1) for k in range(K + 1)]
    expo = [F((-1) ** m, math.factorial(m)) for m in range(K + 1)]
    for j in range(K - 1):
        lhs = c[j + 1] * F((j + 1) * j) + c[j + 1] * F(2 * (j + 1))
        conv = RationalPolynomial()
        for m in range(j + 1):
            conv = conv + c[j - m] * expo[m]
        assert lhs + kappa * conv == RationalPolynomial()


@pytest.mark.parametrize("kappa,bound", [(1.0, 3), (2.0, 3), (0.0001, 1)])
def test_monotone_start(kappa, bound):
    k0 = verify_monotone_from(build_alpha_table(16), kappa)
    assert k0 <= bound
    if kappa == 0.0001:
        assert k0 == 1


def test_monotone_fails_on_short_table():
    with pytest.raises(CertificationError):
        verify_monotone_from(build_alpha_table(4), 40)


def test_trace_at_zero():
    tr = u_int_trace(build_alpha_table(8), 0)
    assert (tr.value.lo, tr.value.hi) == (1.0, 1.0)
    assert (tr.derivative.lo, tr.derivative.hi) == (0.0, 0.0)


def test_trace_with_eight_terms():
    kappa = F("1.6863")
    table = build_alpha_table(8)
    tr = u_int_trace(table, kappa, pairs=4)
    S, D = interior_partial_sums(table.evaluate(kappa))
    assert tr.value.lo <= float(S[7]) and float(S[8]) <= tr.value.hi
    # the sandwich width is the first omitted term alpha_8
    assert tr.value.width == pytest.approx(float(table.evaluate(kappa)[8]), rel=1e-12)
    assert tr.derivative.lo <= float(D[7]) and float(D[8]) <= tr.derivative.hi


def test_width_shrinks_with_depth():
    table = build_alpha_table(16)
    widths = [u_int_trace(table, 1, pairs=p).value.width for p in range(2, 8)]
    assert all(b < a for a, b in zip(widths, widths[1:]))


def test_refuses_uncertified_truncation():
    # at large kappa the coefficients grow first; a shallow truncation is refused
    with pytest.raises(CertificationError):
        u_int_trace(build_alpha_table(16), 30, pairs=2)
    with pytest.raises(DomainError):
        u_int_trace(build_alpha_table(4), 1, pairs=3)


def ode_oracle(kappa):
    """u_int(1), u_int'(1) from a tight ODE integration started near 0."""
    r0 = 1e-5
    u0 = 1 - kappa * r0 / 2 + kappa * (kappa + 2) * r0 ** 2 / 12
    du0 = -kappa / 2 + kappa * (kappa + 2) * r0 / 6

    def rhs(r, y):
        return [y[1], -(2 * y[1] + kappa * math.exp(-r) * y[0]) / r]

    sol = solve_ivp(rhs, (r0, 1.0), [u0, du0], method="DOP853", rtol=1e-13, atol=1e-14)
    return sol.y[0, -1], sol.y[1, -1]


@pytest.mark.parametrize("kappa", [0.3, 1.0, 1.68, 2.5])
def test_against_ode_integration(kappa):
    u, du = ode_oracle(kappa)
    tr = u_int_trace(build_alpha_table(24), kappa)
    assert tr.value.lo - 1e-9 <= u <= tr.value.hi + 1e-9
    assert tr.derivative.lo - 1e-9 <= du <= tr.derivative.hi + 1e-9


kappas = st.fractions(min_value=F(1, 1000), max_value=F(26, 10), max_denominator=1000)


@settings(max_examples=40, deadline=None)
@given(kappas)
def test_coefficients_positive(kappa):
    vals = build_alpha_table(12).evaluate(kappa)
    assert all(v > 0 for v in vals)


@settings(max_examples=40, deadline=None)
@given(kappas, st.integers(min_value=2, max_value=6))
def test_leibniz_sandwich_strictly_nested(kappa, K):
    table = build_alpha_table(2 * K + 4)
    k0 = verify_monotone_from(table, kappa)
    if 2 * K - 1 < max(k0, 3):
        return
    S, D = interior_partial_sums(table.evaluate(kappa))
    m = 2 * K
    assert S[m - 1] < S[m + 1] < S[m + 2] < S[m]
    assert D[m - 1] < D[m + 1] < D[m + 2] < D[m]
