"""Exponential integrals ``E_nu(r) = int_1^inf exp(-r s) s^-nu ds`` with bounds.

``E_1`` uses the power series for ``r <= 1`` and the Stieltjes continued
fraction (evaluated by the modified Lentz scheme) for ``r > 1``. Consecutive
convergents of a continued fraction with positive elements bracket its
value, so the last two Lentz iterates give the truncation bound directly.
Higher orders follow from ``nu E_{nu+1}(r) = exp(-r) - r E_nu(r)`` in
interval arithmetic.

The array functions return ``(lo, hi)`` pairs and are what the exterior
quadrature uses on its grids.
"""

from __future__ import annotations

import numpy as np

from .enclosure import Enclosure
from .errors import DomainError, PrecisionError

__all__ = [
    "EULER_GAMMA",
    "exp_integral",
    "exp_integral_bounds",
    "e1_bounds",
    "exp_bounds",
]

EULER_GAMMA = 0.577215664901532860606512090082

_EPS = np.finfo(float).eps
_SERIES_TERMS = 24
_CF_MAX_STEPS = 400


def _outward(lo, hi, rel):
    """Widen by a relative amount plus one ulp."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    lo = np.nextafter(lo - rel * np.abs(lo), -np.inf)
    hi = np.nextafter(hi + rel * np.abs(hi), np.inf)
    return lo, hi


def exp_bounds(x):
    """Bounds on ``exp(-x)``; libm is good to 1 ulp, we pad by 2."""
    v = np.exp(-np.asarray(x, dtype=float))
    return _outward(v, v, 2 * _EPS)


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    term = -x
    acc = np.zeros_like(x)
    mag = np.zeros_like(x)
    for k in range(1, _SERIES_TERMS + 1):
        acc += term / k
        mag += np.abs(term) / k
        term = term * (-x) / (k + 1)
    # alternating with decreasing terms for 0 < x <= 1: tail below next term
    trunc = np.abs(term) / (_SERIES_TERMS + 1)
    logx = np.log(x)
    val = -EULER_GAMMA - logx - acc
    err = (trunc + 2 * (_SERIES_TERMS + 4) * _EPS * mag
           + 4 * _EPS * (EULER_GAMMA + np.abs(logx) + np.abs(acc)))
    return np.nextafter(val - err, -np.inf), np.nextafter(val + err, np.inf)


def _e1_cfrac(x):
    """exp(x) E1(x) = 1/(x+ 1/(1+ 1/(x+ 2/(1+ 2/(x+ ...)))))."""
    tiny = 1e-300
    f = np.full_like(x, tiny)
    C = f.copy()
    D = np.zeros_like(x)
    prev = f.copy()
    steps = 0
    for j in range(1, _CF_MAX_STEPS + 1):
        a = 1.0 if j == 1 else float(j // 2)
        b = x if j % 2 == 1 else 1.0
        D = b + a * D
        D = np.where(D == 0, tiny, D)
        C = b + a / C
        C = np.where(C == 0, tiny, C)
        D = 1.0 / D
        prev = f
        f = f * C * D
        steps = j
        if j > 2 and np.all(np.abs(f - prev) <= 0.25 * _EPS * np.abs(f)):
            break
    lo = np.minimum(f, prev)
    hi = np.maximum(f, prev)
    lo, hi = _outward(lo, hi, 8 * (steps + 2) * _EPS)
    elo, ehi = exp_bounds(x)
    return np.nextafter(lo * elo, -np.inf), np.nextafter(hi * ehi, np.inf)


def e1_bounds(x):
    """Elementwise enclosure of ``E_1(x)`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("E_1 requires r > 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    lo = np.empty_like(x)
    hi = np.empty_like(x)
    small = x <= 1.0
    if small.any():
        lo[small], hi[small] = _e1_series(x[small])
    if (~small).any():
        lo[~small], hi[~small] = _e1_cfrac(x[~small])
    lo = np.maximum(lo, 0.0)
    if scalar:
        return lo[0], hi[0]
    return lo, hi


def exp_integral_bounds(nu: int, x):
    """Elementwise enclosure of ``E_nu(x)`` for integer ``nu >= 1``."""
    if int(nu) != nu or nu < 1:
        raise DomainError(f"order must be an integer >= 1, got {nu!r}")
    x = np.asarray(x, dtype=float)
    lo, hi = e1_bounds(x)
    if nu == 1:
        return lo, hi
    elo, ehi = exp_bounds(x)
    for v in range(1, int(nu)):
        # v E_{v+1} = exp(-x) - x E_v, with x > 0
        nlo = np.nextafter(np.nextafter(elo - np.nextafter(x * hi, np.inf), -np.inf) / v, -np.inf)
        nhi = np.nextafter(np.nextafter(ehi - np.nextafter(x * lo, -np.inf), np.inf) / v, np.inf)
        lo, hi = np.maximum(nlo, 0.0), nhi
    return lo, hi


def exp_integral(nu: int, r: float, tol: float = 1e-12) -> Enclosure:
    """Enclosure of ``E_nu(r)``.

    Raises ``DomainError`` for ``r <= 0`` and ``PrecisionError`` when the
    enclosure is wider than ``tol``.
    """
    r = float(r)
    if not r > 0:
        raise DomainError(f"E_nu(r) requires r > 0, got {r!r}")
    lo, hi = exp_integral_bounds(nu, r)
    enc = Enclosure(float(lo), float(hi))
    if enc.width > tol:
        raise PrecisionError(f"E_{nu}({r}) enclosure width {enc.width:.3e} exceeds tol {tol:.1e}")
    return enc
