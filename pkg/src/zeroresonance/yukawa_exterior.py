"""Exterior expansion for the Yukawa potential in three dimensions.

``u_ext(r) = (1 + sum_k (-1)^k kappa^k omega_k(r)) / r`` where
``r omega_{k+1}'' = exp(-r) omega_k`` and ``omega_k -> 0`` at infinity
(``omega_0 = 1``). Orders one and two have closed forms in exponential
integrals. Higher orders are computed by a nested quadrature

    |omega_{k+1}'|(r) = int_r^inf exp(-t) omega_k(t) / t dt
    omega_{k+1}(r)    = int_r^inf |omega_{k+1}'|(s) ds

on a uniform grid starting at ``r``. Every ``omega_k`` is completely
monotone: ``omega_1 = E_2`` is the Laplace transform of a positive density,
and products and tail integrals preserve the property. On each cell the
end-corrected trapezoid rule is therefore a lower bound and the trapezoid
rule minus the curvature term at the right end an upper bound; the needed
second derivatives come from ``omega_k'' = exp(-t) omega_{k-1} / t``.
The tail beyond the grid is bounded by the a-priori estimates
``omega_k(r) <= exp(-k r) / (k!)^2`` and
``|omega_k'(r)| <= exp(-k r) / (k! (k-1)!)`` valid for ``r >= 1``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .enclosure import Enclosure, as_fraction, from_rational
from .errors import CertificationError, DomainError, PrecisionError
from .specfun import e1_bounds, exp_bounds, exp_integral_bounds
from .yukawa_interior import BoundaryTrace

__all__ = [
    "OmegaValue",
    "omega",
    "omega_bound",
    "omega_derivative_bound",
    "omega_table",
    "u_ext_trace",
    "u_ext_at",
]

_EPS = np.finfo(float).eps

# tail cut: a-priori bound of the base order shrinks by this factor
_TAIL_FACTOR = 1e-14


@dataclass(frozen=True)
class OmegaValue:
    k: int
    r: float
    value: Enclosure
    derivative: Enclosure


def omega_bound(k: int, r: float) -> float:
    """A-priori upper bound ``exp(-k r) / (k!)^2`` for ``r >= 1``."""
    return math.exp(-k * r) / math.factorial(k) ** 2


def omega_derivative_bound(k: int, r: float) -> float:
    """A-priori bound ``exp(-k r) / (k! (k-1)!)`` on ``|omega_k'(r)|``."""
    return math.exp(-k * r) / (math.factorial(k) * math.factorial(k - 1))


# -- interval helpers on arrays ------------------------------------------

def _dn(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


def _closed_form_arrays(k: int, t: np.ndarray):
    """(value_lo, value_hi, |deriv|_lo, |deriv|_hi) for k in {1, 2}."""
    e1lo, e1hi = e1_bounds(t)
    if k == 1:
        vlo, vhi = exp_integral_bounds(2, t)
        return vlo, vhi, e1lo, e1hi
    if k != 2:
        raise DomainError("closed forms exist for k = 1, 2 only")
    e2lo, e2hi = e1_bounds(2 * t)          # E1(2t)
    xlo, xhi = exp_bounds(t)               # exp(-t)
    x2lo, x2hi = exp_bounds(2 * t)         # exp(-2t)
    # p = exp(-t) E1(t) >= 0
    plo, phi = _dn(xlo * e1lo), _up(xhi * e1hi)
    # omega_2 = exp(-2t) - p + (1 - 2t) E1(2t); 1 - 2t < 0 for t >= 1
    c = 1.0 - 2.0 * t
    clo, chi = _dn(c), _up(c)
    qlo, qhi = _dn(clo * e2hi), _up(chi * e2lo)
    vlo = _dn(_dn(x2lo - phi) + qlo)
    vhi = _up(_up(x2hi - plo) + qhi)
    # |omega_2'| = 2 E1(2t) - exp(-t) E1(t)
    dlo = _dn(_dn(2 * e2lo) - phi)
    dhi = _up(_up(2 * e2hi) - plo)
    return np.maximum(vlo, 0.0), vhi, np.maximum(dlo, 0.0), dhi


def _cm_cells(f, d, c, h):
    """Bounds on each cell integral of a completely monotone function.

    ``f``, ``d`` and ``c`` are (lo, hi) node enclosures of ``f``, ``|f'|``
    and ``f''``. Since the fourth derivative is nonnegative, the end-corrected
    trapezoid rule is a lower bound; since ``f''`` decreases, the trapezoid
    rule minus ``h^3 f''(b) / 12`` is an upper bound.
    """
    flo, fhi = f
    dlo, dhi = d
    clo = c[0]
    lower = 0.5 * h * (flo[:-1] + flo[1:]) - h * h * (dhi[:-1] - dlo[1:]) / 12.0
    lower = np.maximum(lower, h * flo[1:])
    upper = 0.5 * h * (fhi[:-1] + fhi[1:]) - h ** 3 * clo[1:] / 12.0
    upper = np.minimum(upper, h * fhi[:-1])
    lower = np.maximum(lower, 0.0) * (1 - 16 * _EPS)
    upper = upper * (1 + 16 * _EPS)
    return lower, upper


def _tail_sums(cells_lo, cells_hi, tail_hi):
    """Enclosures of ``sum_{i >= j} cell_i + tail`` for every node j."""
    n = len(cells_lo)
    slo = np.zeros(n + 1)
    shi = np.zeros(n + 1)
    slo[:-1] = np.cumsum(cells_lo[::-1])[::-1]
    shi[:-1] = np.cumsum(cells_hi[::-1])[::-1]
    # summation error of n positive terms stays below n eps of the sum
    slack = (n + 4) * _EPS
    return slo * (1 - slack), shi * (1 + slack) + tail_hi * (1 + 4 * _EPS)


def _pmul(a, b):
    """Product of two nonnegative array enclosures."""
    return _dn(a[0] * b[0]), _up(a[1] * b[1])


def _padd(*terms):
    lo, hi = terms[0]
    for tlo, thi in terms[1:]:
        lo, hi = _dn(lo + tlo), _up(hi + thi)
    return lo, hi


class _Ladder:
    """Grid tables of omega_k and |omega_k'| for k = base, base+1, ...

    Each level is ``(value_lo, value_hi, dabs_lo, dabs_hi)``.
    """

    def __init__(self, r: float, h: float, base: int):
        self.r = r
        self.h = h
        self.base = base
        span = math.log(1.0 / _TAIL_FACTOR) / (base + 1) + 1.0
        n = int(math.ceil(span / h))
        t = r + h * np.arange(n + 1)
        self.t = t
        self.R = float(t[-1])
        # g = exp(-t)/t, |g'| = g (1 + 1/t), g'' = g (1 + 2/t + 2/t^2)
        xlo, xhi = exp_bounds(t)
        g = (_dn(xlo / t), _up(xhi / t))
        a1 = 1.0 + 1.0 / t
        a2 = 1.0 + 2.0 / t + 2.0 / (t * t)
        rel = 8 * _EPS
        self.g = g
        self.g1 = (g[0] * a1 * (1 - rel), g[1] * a1 * (1 + rel))
        self.g2 = (g[0] * a2 * (1 - rel), g[1] * a2 * (1 + rel))
        zeros = np.zeros_like(t)
        ones = np.ones_like(t)
        if base == 0:
            self.levels = {0: (ones, ones, zeros, zeros)}
            self.below = (zeros, zeros)
        else:
            self.levels = {base: _closed_form_arrays(base, t)}
            if base == 1:
                self.below = (ones, ones)
            else:
                lo, hi, _, _ = _closed_form_arrays(base - 1, t)
                self.below = (lo, hi)
        self.lock = threading.Lock()

    def get(self, k: int):
        with self.lock:
            top = max(self.levels)
            while top < k:
                self.levels[top + 1] = self._step(top)
                top += 1
            return self.levels[k]

    def _step(self, k: int):
        h, R = self.h, self.R
        g, g1, g2 = self.g, self.g1, self.g2
        vlo, vhi, dlo, dhi = self.levels[k]
        w, wd = (vlo, vhi), (dlo, dhi)
        prev = self.levels.get(k - 1)
        below = (prev[0], prev[1]) if prev is not None else self.below
        wdd = _pmul(g, below)                           # omega_k''
        # phi = g omega_k, |phi'| = |g'| omega_k + g |omega_k'|,
        # phi'' = g'' omega_k + 2 |g'| |omega_k'| + g omega_k''
        phi = _pmul(g, w)
        dphi = _padd(_pmul(g1, w), _pmul(g, wd))
        cphi = _padd(_pmul(g2, w), _pmul((2 * g1[0], 2 * g1[1]), wd), _pmul(g, wdd))
        clo, chi = _cm_cells(phi, dphi, cphi, h)
        if k == 0:
            tail_d = math.exp(-R) / R
        else:
            tail_d = math.exp(-(k + 1) * R) / ((k + 1) * R * math.factorial(k) ** 2)
        psi = _tail_sums(clo, chi, tail_d)              # |omega_{k+1}'|
        # psi' = -phi and psi'' = |phi'|
        clo, chi = _cm_cells(psi, phi, dphi, h)
        tail_v = math.exp(-(k + 1) * R) / ((k + 1) * math.factorial(k + 1) * math.factorial(k))
        wlo, whi = _tail_sums(clo, chi, tail_v)
        return wlo, whi, psi[0], psi[1]


_LADDERS: dict = {}
_LADDERS_LOCK = threading.Lock()


def _ladder(r: float, h: float, base: int) -> _Ladder:
    key = (r, h, base)
    lad = _LADDERS.get(key)
    if lad is None:
        with _LADDERS_LOCK:
            lad = _LADDERS.get(key)
            if lad is None:
                lad = _Ladder(r, h, base)
                _LADDERS[key] = lad
    return lad


def clear_cache():
    with _LADDERS_LOCK:
        _LADDERS.clear()


def omega(k: int, r: float = 1.0, method: str = "auto", h: float = 1.0 / 256,
          rtol: float = 1e-5, refinements: int = 3) -> OmegaValue:
    """Enclosures of ``omega_k(r)`` and ``omega_k'(r)`` for ``r >= 1``.

    ``method='auto'`` uses the closed forms for ``k <= 2`` and quadrature
    seeded by the closed form of ``omega_2`` above that; ``'quadrature'``
    seeds the ladder with ``omega_0 = 1`` for every order. The grid step is
    halved up to ``refinements`` times until the value enclosure is
    relatively narrower than ``rtol``.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"omega order must be an integer >= 1, got {k!r}")
    k = int(k)
    r = float(r)
    if not r >= 1.0:
        raise DomainError(f"omega_k(r) is only supported for r >= 1, got {r!r}")
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed" or (method == "auto" and k <= 2):
        vlo, vhi, dlo, dhi = _closed_form_arrays(k, np.array([r]))
        return OmegaValue(k, r, Enclosure(vlo[0], vhi[0]), Enclosure(-dhi[0], -dlo[0]))

    base = 0 if method == "quadrature" else 2
    for attempt in range(refinements + 1):
        step = h / 2 ** attempt
        vlo, vhi, dlo, dhi = _ladder(r, step, base).get(k)
        value = Enclosure(vlo[0], vhi[0])
        if value.width <= rtol * value.hi:
            break
    else:
        raise PrecisionError(
            f"omega_{k}({r}) relative width {value.width / value.hi:.2e} above rtol {rtol:.1e}")
    return OmegaValue(k, r, value, Enclosure(-dhi[0], -dlo[0]))


def omega_table(k: int, r0: float = 1.0, r1: float = 5.0, h: float = 1.0 / 512):
    """Enclosures of ``omega_k`` and ``omega_k'`` on the grid ``r0 + j h <= r1``.

    Returns ``(r, value_lo, value_hi, deriv_lo, deriv_hi)`` as arrays, read
    from a single quadrature ladder (closed forms for ``k <= 2``).
    """
    if int(k) != k or k < 1:
        raise DomainError(f"omega order must be an integer >= 1, got {k!r}")
    k = int(k)
    r0, r1 = float(r0), float(r1)
    if not 1.0 <= r0 < r1:
        raise DomainError("need 1 <= r0 < r1")
    if k <= 2:
        r = r0 + h * np.arange(int(math.floor((r1 - r0) / h)) + 1)
        vlo, vhi, dlo, dhi = _closed_form_arrays(k, r)
    else:
        lad = _ladder(r0, h, 2)
        vlo, vhi, dlo, dhi = lad.get(k)
        keep = lad.t <= r1 * (1 + 1e-12)
        r = lad.t[keep]
        vlo, vhi, dlo, dhi = vlo[keep], vhi[keep], dlo[keep], dhi[keep]
    return r, vlo, vhi, -dhi, -dlo


# -- the exterior trace -------------------------------------------------

def _kappa_powers(kappa: Fraction, K: int):
    return [from_rational(kappa ** j) for j in range(K + 1)]


def _check_exterior_monotone(kappa: Fraction):
    # kappa omega_1(s) < 1 for all s >= 1 starts the alternation; omega_1 decreases
    w1 = omega(1, 1.0).value
    if not (from_rational(kappa) * w1).hi < 1.0:
        raise CertificationError(
            f"kappa={float(kappa):.6g}: kappa*omega_1(1) < 1 not verified, "
            "exterior series not certified alternating")


def u_ext_at(kappa, r: float, K: int = 1) -> BoundaryTrace:
    """Leibniz enclosures of ``u_ext(r)`` and ``u_ext'(r)`` for ``r >= 1``.

    The value lies between the partial sums ending at orders ``2K-1`` and
    ``2K``; the derivative uses the same orders.
    """
    kappa = as_fraction(kappa)
    if kappa < 0:
        raise DomainError("exterior trace implemented for kappa >= 0")
    if K < 1:
        raise DomainError("exterior truncation K must be >= 1")
    r = float(r)
    if not r >= 1.0:
        raise DomainError(f"exterior expansion is certified for r >= 1 only, got {r!r}")
    inv_r = Enclosure(1.0, 1.0) if r == 1.0 else Enclosure.point(1.0) / r
    if kappa == 0:
        return BoundaryTrace(inv_r, -(inv_r * inv_r) if r != 1.0 else Enclosure(-1.0, -1.0),
                             "exterior", order=2 * K)
    _check_exterior_monotone(kappa)

    kp = _kappa_powers(kappa, 2 * K)
    # s_m = 1 + sum_{k<=m} (-1)^k kappa^k omega_k(r)
    # t_m = sum_{k<=m} (-1)^(k+1) kappa^k (omega_k(r) - omega_k'(r))
    s = Enclosure(1.0, 1.0)
    t = Enclosure(0.0, 0.0)
    S, T = [s], [t]
    for j in range(1, 2 * K + 1):
        om = omega(j, r)
        sign = 1 if j % 2 == 0 else -1
        s = s + sign * (kp[j] * om.value)
        t = t - sign * (kp[j] * (om.value - om.derivative))
        S.append(s)
        T.append(t)
    top = 2 * K - 1
    bracket = Enclosure(S[top].lo, S[top + 1].hi)
    # u' = -(bracket)/r^2 + (sum (-1)^k kappa^k omega_k')/r, written as
    # -1/r^2 + [sum (-1)^(k+1) kappa^k (omega_k/r^2 - omega_k'/r)]; at r=1 that
    # is -1 + t with t alternating in decreasing terms
    if r == 1.0:
        dsum = Enclosure(T[top + 1].lo, T[top].hi)
        value = bracket
        deriv = dsum - 1.0
    else:
        value = bracket * inv_r
        inv_r2 = inv_r * inv_r
        t2 = Enclosure(0.0, 0.0)
        terms = [t2]
        for j in range(1, 2 * K + 1):
            om = omega(j, r)
            sign = 1 if j % 2 == 0 else -1
            t2 = t2 - sign * (kp[j] * (om.value * inv_r2 - om.derivative * inv_r))
            terms.append(t2)
        deriv = Enclosure(terms[top + 1].lo, terms[top].hi) - inv_r2
    return BoundaryTrace(value, deriv, "exterior", order=2 * K)


def u_ext_trace(kappa, K: int = 1) -> BoundaryTrace:
    """Leibniz enclosures of ``u_ext(1)`` and ``u_ext'(1)`` at truncation ``K``."""
    return u_ext_at(kappa, 1.0, K)
