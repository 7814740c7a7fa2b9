"""Volterra solvers for the radial problem with a general potential.

With ``m = n - 2`` the regular solution is ``u_int = 1 + w`` where

    w(r) = -kappa int_0^r s V(s) (1 + w(s)) (1 - (s/r)^m) / m ds

and the decaying one is ``u_ext = r^-m (1 + w)`` with

    w(r) = -kappa int_r^inf s V(s) (1 + w(s)) (1 - (r/s)^m) / m ds.

The kernels are separable, so one Picard step is two cumulative sums. The
unknown ``1 + w`` is interpolated linearly between nodes of a log-uniform
grid and integrated against ``s V(s) s^p`` with Gauss-Legendre weights
precomputed per cell (product trapezoid rule). Results are estimates with an
a-posteriori error from a grid-halving comparison, not certified bounds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .enclosure import Enclosure
from .errors import AdmissibilityError, ConvergenceError, DomainError
from .potentials import RadialPotential, check_admissible
from .wronskian import ResonanceReport
from .yukawa_interior import BoundaryTrace

__all__ = [
    "VolterraGrid",
    "WronskianEstimate",
    "solve_interior",
    "solve_exterior",
    "general_wronskian",
    "find_first_resonance_general",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_MAX_R = 1e8


def _check_dim(n):
    if int(n) != n or n < 3:
        raise DomainError(f"dimension must be an integer >= 3, got {n!r}")
    return int(n)


def _tail_radius(V: RadialPotential, tail_tol: float) -> float:
    """Smallest ``R = 2^j`` with ``int_R^inf s |V| ds <= tail_tol``."""
    def tail(R):
        with warnings.catch_warnings():
            # kinks of tabulated data slow quad down but do not spoil a 1e-12 target
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(lambda s: s * abs(float(V(s))), R, np.inf, limit=200)
        return val

    R = 2.0
    while tail(R) > tail_tol:
        R *= 2.0
        if R > _MAX_R:
            raise ConvergenceError(
                f"tail int s|V| ds above {tail_tol:g} beyond r = {_MAX_R:g}; potential decays too slowly")
    return R


@dataclass(frozen=True, eq=False)
class VolterraGrid:
    """Log-uniform nodes ``r_min * exp(j h)`` with ``r = 1`` as a node."""

    nodes: np.ndarray = field(repr=False)
    n: int
    h: float
    i_one: int

    @classmethod
    def build(cls, V: RadialPotential, n: int, N: int = 8192, r_min: float = 1e-8,
              tail_tol: float = 1e-12, r_max: float | None = None) -> "VolterraGrid":
        """``N`` cells between ``r_min`` and 1; the outer part uses the same step."""
        n = _check_dim(n)
        if not 0 < r_min < 1:
            raise DomainError("r_min must lie in (0, 1)")
        if N < 4:
            raise DomainError("need at least 4 interior cells")
        if r_max is None:
            r_max = _tail_radius(V, tail_tol)
        h = -math.log(r_min) / N
        n_out = max(4, int(math.ceil(math.log(r_max) / h)))
        j = np.arange(-N, n_out + 1)
        nodes = np.exp(j * h)
        nodes[N] = 1.0
        return cls(nodes, n, h, N)

    def refined(self) -> "VolterraGrid":
        """The grid with every cell halved (log midpoints inserted)."""
        j = np.arange(-2 * self.i_one, 2 * (len(self.nodes) - 1 - self.i_one) + 1)
        nodes = np.exp(j * self.h / 2)
        nodes[2 * self.i_one] = 1.0
        return VolterraGrid(nodes, self.n, self.h / 2, 2 * self.i_one)

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])


def _cell_weights(V, s_lo, s_hi, powers):
    """Weights ``int_cell s V(s) s^p {1-lam, lam} ds`` for each power ``p``."""
    half = 0.5 * (s_hi - s_lo)
    mid = 0.5 * (s_hi + s_lo)
    s = mid[:, None] + half[:, None] * _GL_X[None, :]
    lam = (s - s_lo[:, None]) / (s_hi - s_lo)[:, None]
    base = s * V(s) * (half[:, None] * _GL_W[None, :])
    out = []
    for p in powers:
        f = base * s ** p
        out.append(((f * (1 - lam)).sum(axis=1), (f * lam).sum(axis=1)))
    return out


_WEIGHT_CACHE: dict = {}


def _weights(V, grid: VolterraGrid):
    key = (id(V), id(grid))
    hit = _WEIGHT_CACHE.get(key)
    if hit is not None and hit[0] is V and hit[1] is grid:
        return hit[2]
    m = grid.n - 2
    r = grid.nodes
    inner = r[: grid.i_one + 1]
    outer = r[grid.i_one:]
    wi = _cell_weights(V, inner[:-1], inner[1:], (0, m))
    wo = _cell_weights(V, outer[:-1], outer[1:], (0, -m))
    # the piece [0, r_min], where 1 + w is taken equal to its value at r_min
    r0 = grid.r_min
    p0, _ = integrate.quad(lambda s: s * float(V(s)), 0.0, r0)
    q0, _ = integrate.quad(lambda s: s ** (m + 1) * float(V(s)), 0.0, r0)
    w = (wi, wo, p0, q0)
    if len(_WEIGHT_CACHE) > 16:
        _WEIGHT_CACHE.clear()
    _WEIGHT_CACHE[key] = (V, grid, w)
    return w


def _cumulative(wl, wr, y):
    """Node-wise ``int_{r_0}^{r_j} f y`` from per-cell left/right weights."""
    out = np.empty(len(y))
    out[0] = 0.0
    np.cumsum(wl * y[:-1] + wr * y[1:], out=out[1:])
    return out


def _picard(step, y0, tol, max_iter):
    y = y0
    for it in range(1, max_iter + 1):
        y_new = step(y)
        diff = float(np.max(np.abs(y_new - y)))
        y = y_new
        if not np.all(np.isfinite(y)):
            break
        if diff < tol * max(1.0, float(np.max(np.abs(y)))):
            return y, it, float(np.max(np.abs(step(y) - y)))
    raise ConvergenceError(f"Picard iteration did not converge in {max_iter} steps")


def _interior_solution(V, n, kappa, grid, tol=1e-13, max_iter=2000):
    m = n - 2
    (pl, pr), (ql, qr) = _weights(V, grid)[0]
    p0, q0 = _weights(V, grid)[2:]
    r = grid.nodes[: grid.i_one + 1]
    rm = r ** -m
    c = kappa / m

    def PQ(y):
        return p0 * y[0] + _cumulative(pl, pr, y), q0 * y[0] + _cumulative(ql, qr, y)

    def step(y):
        P, Q = PQ(y)
        return 1.0 - c * (P - rm * Q)

    y, it, res = _picard(step, np.ones_like(r), tol, max_iter)
    _, Q = PQ(y)
    return r, y, -kappa * Q[-1], it, res


def _exterior_solution(V, n, kappa, grid, tol=1e-13, max_iter=2000):
    m = n - 2
    (pl, pr), (rl, rr) = _weights(V, grid)[1]
    r = grid.nodes[grid.i_one:]
    rp = r ** m
    c = kappa / m

    def tails(y):
        P = _cumulative(pl, pr, y)
        R = _cumulative(rl, rr, y)
        return P[-1] - P, R[-1] - R

    def step(y):
        P, R = tails(y)
        return 1.0 - c * (P - rp * R)

    y, it, res = _picard(step, np.ones_like(r), tol, max_iter)
    P, _ = tails(y)
    return r, y, -m + kappa * P[0], it, res


def _as_float_kappa(kappa):
    kappa = float(kappa)
    if not math.isfinite(kappa):
        raise DomainError("kappa must be finite")
    return kappa


def solve_interior(V: RadialPotential, n: int, kappa, grid: VolterraGrid | None = None,
                   tol: float = 1e-13) -> BoundaryTrace:
    """Regular solution ``u_int = 1 + w`` at ``r = 1`` (estimate, not certified).

    ``u_int'(1) = -kappa int_0^1 s^(n-1) V(s) u_int(s) ds``. The returned
    enclosures have the final Picard residual as radius; discretization
    error is assessed by :func:`general_wronskian`.
    """
    n = _check_dim(n)
    kappa = _as_float_kappa(kappa)
    grid = grid or VolterraGrid.build(V, n)
    if kappa == 0:
        return BoundaryTrace(Enclosure(1.0, 1.0), Enclosure(0.0, 0.0), "interior",
                             certified=False, diagnostics={"iterations": 0, "residual": 0.0})
    _, y, d, it, res = _interior_solution(V, n, kappa, grid, tol)
    return BoundaryTrace(Enclosure.around(y[-1], res), Enclosure.around(d, abs(kappa) * res),
                         "interior", certified=False,
                         diagnostics={"iterations": it, "residual": res, "cells": grid.i_one})


def solve_exterior(V: RadialPotential, n: int, kappa, grid: VolterraGrid | None = None,
                   tol: float = 1e-13) -> BoundaryTrace:
    """Decaying solution ``u_ext = r^(2-n) (1 + w)`` at ``r = 1`` (estimate).

    ``u_ext'(1) = (2 - n) + kappa int_1^inf s V(s) (1 + w(s)) ds``.
    """
    n = _check_dim(n)
    kappa = _as_float_kappa(kappa)
    grid = grid or VolterraGrid.build(V, n)
    if kappa == 0:
        return BoundaryTrace(Enclosure(1.0, 1.0), Enclosure.point(2.0 - n), "exterior",
                             certified=False, diagnostics={"iterations": 0, "residual": 0.0})
    _, y, d, it, res = _exterior_solution(V, n, kappa, grid, tol)
    return BoundaryTrace(Enclosure.around(y[0], res), Enclosure.around(d, abs(kappa) * res),
                         "exterior", certified=False,
                         diagnostics={"iterations": it, "residual": res,
                                      "cells": len(grid.nodes) - 1 - grid.i_one})


def volterra_residual(V: RadialPotential, n: int, kappa, grid: VolterraGrid, side: str,
                      tol: float = 1e-13) -> float:
    """Sup-norm residual of the discrete Volterra equation at the computed solution."""
    n = _check_dim(n)
    kappa = _as_float_kappa(kappa)
    solver = _interior_solution if side == "interior" else _exterior_solution
    _, _, _, _, res = solver(V, n, kappa, grid, tol)
    return res


@dataclass(frozen=True)
class WronskianEstimate:
    """``W`` on a grid, its value on the halved grid, and the difference."""

    value: float
    error: float
    coarse: float
    interior: BoundaryTrace
    exterior: BoundaryTrace

    def __float__(self):
        return self.value


def _wronskian_value(V, n, kappa, grid):
    ti = solve_interior(V, n, kappa, grid)
    te = solve_exterior(V, n, kappa, grid)
    w = te.value.mid * ti.derivative.mid - ti.value.mid * te.derivative.mid
    return w, ti, te


def general_wronskian(V: RadialPotential, n: int, kappa, grid: VolterraGrid | None = None,
                      estimate_error: bool = True) -> WronskianEstimate:
    """``u_ext(1) u_int'(1) - u_int(1) u_ext'(1)`` with an error estimate.

    The estimate compares with the grid of twice the step: for a second
    order scheme the error on ``grid`` is about a third of the difference.
    Picard residuals are added on top.
    """
    n = _check_dim(n)
    grid = grid or VolterraGrid.build(V, n)
    w, ti, te = _wronskian_value(V, n, kappa, grid)
    res = (ti.value.width + ti.derivative.width + te.value.width + te.derivative.width) * 4
    if estimate_error and kappa != 0:
        coarse = _coarsened(grid)
        wc, _, _ = _wronskian_value(V, n, kappa, coarse)
        err = abs(w - wc) / 3 + res
    else:
        wc, err = w, res
    return WronskianEstimate(w, err, wc, ti, te)


def _coarsened(grid: VolterraGrid) -> VolterraGrid:
    if grid.i_one % 2 or (len(grid.nodes) - 1 - grid.i_one) % 2:
        # drop one outer cell so every other node survives
        nodes = grid.nodes[: len(grid.nodes) - ((len(grid.nodes) - 1 - grid.i_one) % 2)]
    else:
        nodes = grid.nodes
    if grid.i_one % 2:
        nodes = nodes[1:]
        i_one = grid.i_one - 1
    else:
        i_one = grid.i_one
    return VolterraGrid(nodes[::2].copy(), grid.n, 2 * grid.h, i_one // 2)


def _first_zero(f, hi, scan, tol):
    """First sign change of ``f`` on ``(0, hi]`` by scan then Brent."""
    xs = np.linspace(0.0, hi, scan + 1)[1:]
    prev_x, prev_v = 0.0, f(0.0)
    for x in xs:
        v = f(x)
        if v == 0:
            return x
        if (v < 0) != (prev_v < 0):
            return optimize.brentq(f, prev_x, x, xtol=tol / 4, rtol=4 * np.finfo(float).eps)
        prev_x, prev_v = x, v
    return None


def find_first_resonance_general(V: RadialPotential, n: int, search_hi: float = 10.0,
                                 tol: float = 1e-6, grid: VolterraGrid | None = None,
                                 scan: int = 64, classify: bool = True) -> ResonanceReport:
    """First zero of the Volterra Wronskian on ``(0, search_hi]``.

    The zero is located on ``grid`` and on the grid with half the step; the
    reported interval is centred on the finer value with half-width
    ``tol`` plus the discrepancy between the two. When no sign change is
    found the report has ``kappa_star=None`` and says so.
    """
    n = _check_dim(n)
    if V.sign_info != "nonneg":
        raise DomainError("first-zero search needs V >= 0; use general_wronskian for signed V")
    report = check_admissible(V)
    if not report.passed:
        raise AdmissibilityError("; ".join(report.failures), report)
    if not search_hi > 0 or not tol > 0:
        raise DomainError("search_hi and tol must be positive")
    coarse = grid or VolterraGrid.build(V, n, N=4096)
    fine = coarse.refined()

    def W(g):
        return lambda k: general_wronskian(V, n, k, g, estimate_error=False).value

    diagnostics = {"admissibility": report.as_dict(), "search_hi": search_hi, "tol": tol,
                   "cells_coarse": len(coarse.nodes) - 1, "cells_fine": len(fine.nodes) - 1,
                   "r_min": coarse.r_min, "r_max": coarse.r_max}
    k_coarse = _first_zero(W(coarse), search_hi, scan, tol)
    classification = None
    if classify:
        from .variational import classify_state
        classification = classify_state(n, V)
    if k_coarse is None:
        diagnostics["outcome"] = "no resonance found in range"
        return ResonanceReport(n, V, None, "volterra", classification, diagnostics)
    # the fine-grid zero sits next to the coarse one
    wf = W(fine)
    step = max(8 * tol, 1e-3 * k_coarse)
    lo, hi = max(k_coarse - step, 0.0), k_coarse + step
    while wf(lo) <= 0 and lo > 0:
        lo = max(lo - 2 * step, 0.0)
    while wf(hi) > 0:
        hi += 2 * step
    k_fine = optimize.brentq(wf, lo, hi, xtol=tol / 4, rtol=4 * np.finfo(float).eps)
    sens = abs(k_fine - k_coarse)
    diagnostics.update(outcome="resonance", kappa_coarse=k_coarse, kappa_fine=k_fine,
                       grid_sensitivity=sens)
    radius = tol + sens
    return ResonanceReport(n, V, Enclosure(k_fine - radius, k_fine + radius), "volterra",
                           classification, diagnostics)
