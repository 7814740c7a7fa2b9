"""Rayleigh-quotient oracle for ``J(V) = sup int V u^2 / int |grad u|^2``.

Radial trial functions are continuous and piecewise linear on a log-uniform
grid and vanish at both ends, so every discrete space is a subspace of the
Dirichlet space: the discrete maximum is a lower bound on ``J`` and grows
under nested refinement. ``1 / J`` therefore bounds the first resonant
coupling from above.

Matrices (the sphere area cancels in every quotient):

    A_ij = int phi_i' phi_j' r^(n-1) dr      (Dirichlet form)
    B_ij = int V phi_i phi_j r^(n-1) dr      (potential)
    H_ij = int phi_i phi_j r^(n-3) dr        (Hardy weight r^-2)

All three are tridiagonal. The largest generalized eigenvalue of
``B x = lam A x`` is located by Sturm counts (inertia of ``sigma A - B``),
then refined by shifted inverse iteration and reported as a Rayleigh
quotient, which never exceeds the discrete maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .enclosure import Enclosure, as_fraction, down
from .errors import DomainError
from .potentials import RadialPotential

__all__ = [
    "RadialDiscretization",
    "VariationalResult",
    "variational_J",
    "hardy_variational_J",
    "hardy_quotient",
    "comparison_bound",
    "dominates",
    "classify_state",
    "RESONANCE",
    "EIGENSTATE",
    "OUTSIDE",
]

RESONANCE = "resonance_not_L2"
EIGENSTATE = "eigenstate_L2"
OUTSIDE = "outside theorem hypotheses"

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True, eq=False)
class RadialDiscretization:
    """Nodes ``r_min * exp(j h)``, ``j = 0..N``; unknowns at the inner nodes."""

    nodes: np.ndarray = field(repr=False)
    n: int
    h: float

    @classmethod
    def build(cls, n: int, N: int = 256, r_min: float = 1e-6, r_max: float = 200.0):
        if int(n) != n or n < 3:
            raise DomainError(f"dimension must be an integer >= 3, got {n!r}")
        if not 0 < r_min < r_max:
            raise DomainError("need 0 < r_min < r_max")
        if N < 2:
            raise DomainError("need at least two cells")
        h = math.log(r_max / r_min) / N
        nodes = r_min * np.exp(h * np.arange(N + 1))
        nodes[-1] = r_max
        return cls(nodes, int(n), h)

    @property
    def size(self) -> int:
        return len(self.nodes) - 1

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def refined(self) -> "RadialDiscretization":
        """Insert the geometric midpoint of every cell (nested space)."""
        r = self.nodes
        mids = np.sqrt(r[:-1] * r[1:])
        out = np.empty(2 * len(r) - 1)
        out[0::2] = r
        out[1::2] = mids
        return RadialDiscretization(out, self.n, self.h / 2)

    def extended(self, factor: float = 2.0) -> "RadialDiscretization":
        """Append cells of the same log step up to ``factor * r_max`` (nested space)."""
        extra = int(math.ceil(math.log(factor) / self.h))
        new = self.r_max * np.exp(self.h * np.arange(1, extra + 1))
        return RadialDiscretization(np.concatenate([self.nodes, new]), self.n, self.h)


# -- assembly ---------------------------------------------------------------

def _element_quadrature(r, breakpoints):
    """Gauss points and weights per element, splitting elements at breakpoints."""
    lo, hi = r[:-1], r[1:]
    pts = [(lo, hi)]
    bps = np.asarray([b for b in breakpoints if r[0] < b < r[-1]], dtype=float)
    if bps.size:
        idx = np.searchsorted(r, bps) - 1
        cut = np.full(len(lo), np.nan)
        cut[idx] = bps
        has = ~np.isnan(cut)
        mid = np.where(has, cut, 0.5 * (lo + hi))
        pts = [(lo, mid), (mid, hi)]
    s_all, w_all = [], []
    for a, b in pts:
        half = 0.5 * (b - a)
        s_all.append(0.5 * (a + b)[:, None] + half[:, None] * _GL_X[None, :])
        w_all.append(half[:, None] * _GL_W[None, :])
    return np.concatenate(s_all, axis=1), np.concatenate(w_all, axis=1)


def _mass(weight_fn, disc: RadialDiscretization, breakpoints=()):
    """Tridiagonal ``int f phi_i phi_j dr`` on the inner nodes as (diag, off)."""
    r = disc.nodes
    s, w = _element_quadrature(r, breakpoints)
    lam = (s - r[:-1, None]) / (r[1:] - r[:-1])[:, None]
    f = weight_fn(s) * w
    m00 = (f * (1 - lam) ** 2).sum(axis=1)
    m11 = (f * lam ** 2).sum(axis=1)
    m01 = (f * lam * (1 - lam)).sum(axis=1)
    diag = m11[:-1] + m00[1:]
    off = m01[1:-1]
    return diag, off


def _stiffness(disc: RadialDiscretization):
    r = disc.nodes
    n = disc.n
    h = np.diff(r)
    a = (r[1:] ** n - r[:-1] ** n) / (n * h * h)
    return a[:-1] + a[1:], -a[1:-1]


def _potential_matrix(V: RadialPotential, disc: RadialDiscretization):
    n = disc.n
    return _mass(lambda s: V(s) * s ** (n - 1), disc, V.breakpoints)


def _hardy_matrix(disc: RadialDiscretization):
    n = disc.n
    return _mass(lambda s: s ** (n - 3), disc)


# -- eigen solver -------------------------------------------------------

def _count_above(sigma, Ad, Ao, Bd, Bo) -> int:
    """Number of generalized eigenvalues above ``sigma`` (negative pivots of sigma A - B)."""
    d = (sigma * Ad - Bd).tolist()
    e2 = ((sigma * Ao - Bo) ** 2).tolist()
    tiny = 1e-300
    q = d[0]
    count = 1 if q < 0 else 0
    for i in range(1, len(d)):
        if q == 0:
            q = tiny
        q = d[i] - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def _banded(diag, off):
    ab = np.zeros((2, len(diag)))
    ab[0, 1:] = off
    ab[1] = diag
    return ab


def _tri_mul(diag, off, x):
    y = diag * x
    y[:-1] += off * x[1:]
    y[1:] += off * x[:-1]
    return y


def _largest_eigenpair(Ad, Ao, Bd, Bo, rtol=1e-4, inverse_steps=8):
    """Largest ``lam`` with ``B x = lam A x``; ``A`` must be positive definite."""
    if _count_above(0.0, Ad, Ao, Bd, Bo) == 0:
        raise DomainError("V not somewhere positive on grid: no positive generalized eigenvalue")
    lo, hi = 0.0, 1.0
    while _count_above(hi, Ad, Ao, Bd, Bo) > 0:
        lo, hi = hi, 2 * hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _count_above(mid, Ad, Ao, Bd, Bo) > 0:
            lo = mid
        else:
            hi = mid
    # hi >= lam_max, so hi A - B is positive semidefinite; nudge it to definite
    sigma = hi * (1 + 1e-9)
    M = _banded(sigma * Ad - Bd, sigma * Ao - Bo)
    x = np.ones(len(Ad))
    for _ in range(inverse_steps):
        x = linalg.solveh_banded(M, _tri_mul(Ad, Ao, x))
        x /= np.linalg.norm(x)
    lam = float(x @ _tri_mul(Bd, Bo, x)) / float(x @ _tri_mul(Ad, Ao, x))
    return lam, x, (lo, hi)


# -- public operations ----------------------------------------------------

@dataclass
class VariationalResult:
    J_estimate: float
    kappa_estimate: float
    refinement_history: list
    r_max: float = 200.0
    domain_history: list = field(default_factory=list)
    sensitivity: float = 0.0
    eigenvector: np.ndarray | None = field(default=None, repr=False)
    nodes: np.ndarray | None = field(default=None, repr=False)

    @property
    def kappa_sensitivity(self) -> float:
        """Sensitivity of ``1/J`` implied by the J sensitivity."""
        return self.sensitivity / self.J_estimate ** 2


def _solve(V, disc, kappa1=0.0):
    Ad, Ao = _stiffness(disc)
    if kappa1:
        Hd, Ho = _hardy_matrix(disc)
        Ad, Ao = Ad - kappa1 * Hd, Ao - kappa1 * Ho
        try:
            linalg.cholesky_banded(_banded(Ad, Ao))
        except linalg.LinAlgError:
            raise DomainError(
                f"A - kappa1 H is not positive definite for kappa1={kappa1}; "
                "coupling too close to the Hardy constant for this grid") from None
    Bd, Bo = _potential_matrix(V, disc)
    lam, x, _ = _largest_eigenpair(Ad, Ao, Bd, Bo)
    return lam, x


def _run(V, n, disc, refinements, adapt_domain, domain_rtol, max_doublings, kappa1):
    domain_history = []
    lam, x = _solve(V, disc, kappa1)
    domain_change = 0.0
    if adapt_domain:
        domain_history.append((disc.r_max, lam))
        for _ in range(max_doublings):
            wider = disc.extended(2.0)
            lam_w, x_w = _solve(V, wider, kappa1)
            domain_change = lam_w - lam
            disc, lam, x = wider, lam_w, x_w
            domain_history.append((disc.r_max, lam))
            if abs(domain_change) <= domain_rtol * abs(lam):
                break
    history = [(disc.size, lam)]
    for _ in range(refinements - 1):
        disc = disc.refined()
        lam, x = _solve(V, disc, kappa1)
        history.append((disc.size, lam))
    refine_change = abs(history[-1][1] - history[-2][1]) if len(history) > 1 else 0.0
    # with domain error ~ 1/R the remaining truncation error is about the last change
    sens = refine_change + abs(domain_change)
    return VariationalResult(lam, 1.0 / lam, history, disc.r_max, domain_history, sens,
                             eigenvector=x, nodes=disc.nodes[1:-1])


def variational_J(V: RadialPotential, n: int, disc: RadialDiscretization | None = None,
                  refinements: int = 4, domain_rtol: float = 1e-4,
                  max_doublings: int = 24) -> VariationalResult:
    """Discrete ``J(V)`` with nested refinement and, by default, domain growth.

    Without ``disc`` the domain starts at ``[1e-6, 200]`` with 256 cells and
    ``r_max`` is doubled until ``J`` changes by less than ``domain_rtol``
    relatively; the grid is then halved ``refinements - 1`` times. With an
    explicit ``disc`` the domain is kept as given.
    """
    if int(n) != n or n < 3:
        raise DomainError(f"dimension must be an integer >= 3, got {n!r}")
    if refinements < 1:
        raise DomainError("refinements must be >= 1")
    adapt = disc is None
    disc = disc or RadialDiscretization.build(n)
    if disc.n != n:
        raise DomainError("discretization dimension does not match n")
    return _run(V, n, disc, refinements, adapt, domain_rtol, max_doublings, 0.0)


def hardy_variational_J(kappa1: float, V2: RadialPotential, n: int,
                        disc: RadialDiscretization | None = None, refinements: int = 4,
                        domain_rtol: float = 1e-4, max_doublings: int = 24) -> VariationalResult:
    """Largest ``lam`` with ``B_2 x = lam (A - kappa1 H) x``.

    ``kappa1`` must lie in ``[0, (n-2)^2 / 4)``; ``kappa1 = 0`` reproduces
    :func:`variational_J` exactly.
    """
    if int(n) != n or n < 3:
        raise DomainError(f"dimension must be an integer >= 3, got {n!r}")
    kappa1 = float(kappa1)
    if not 0 <= kappa1 < (n - 2) ** 2 / 4:
        raise DomainError(f"kappa1 must lie in [0, {(n - 2) ** 2 / 4}), got {kappa1}")
    adapt = disc is None
    disc = disc or RadialDiscretization.build(n)
    return _run(V2, n, disc, refinements, adapt, domain_rtol, max_doublings, kappa1)


def hardy_quotient(disc: RadialDiscretization) -> float:
    """Discrete maximum of ``int u^2 |x|^-2 / int |grad u|^2``."""
    Ad, Ao = _stiffness(disc)
    Hd, Ho = _hardy_matrix(disc)
    lam, _, _ = _largest_eigenpair(Ad, Ao, Hd, Ho)
    return lam


def comparison_bound(kappa_star_ref: Enclosure, C0) -> float:
    """Lower bound ``lo(ref) / C0`` on the first resonance of any ``V <= C0 V0``.

    The quotient is rounded downwards when it is not exactly representable.
    """
    c = as_fraction(C0)
    if not c > 0:
        raise DomainError(f"C0 must be positive, got {C0!r}")
    q = as_fraction(kappa_star_ref.lo) / c
    f = float(q)
    return f if as_fraction(f) <= q else down(f)


def dominates(V: RadialPotential, V0: RadialPotential, C0: float, radii=None) -> bool:
    """Spot check of ``V <= C0 V0`` on a log-spaced sample of radii."""
    if radii is None:
        radii = np.geomspace(1e-6, 1e3, 2001)
    with np.errstate(all="ignore"):
        return bool(np.all(V(radii) <= C0 * V0(radii) * (1 + 1e-12)))


def classify_state(n: int, V_info, hardy_kappa: float | None = None) -> str:
    """L^2 classification of the zero-energy state from the dimension rule.

    ``V_info`` is a :class:`RadialPotential` or a mapping with ``sign``
    (``"nonneg"`` or ``"signed"``) and, for signed potentials, ``b``: the
    decay exponent of the negative part. Signed potentials need ``b > 2``.
    ``hardy_kappa`` selects the Hardy-shifted problem and must lie in
    ``(0, (n-2)^2/4)``.
    """
    if int(n) != n:
        raise DomainError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 3:
        raise DomainError(f"classification needs n >= 3, got {n}")
    if isinstance(V_info, RadialPotential):
        sign, b = V_info.sign_info, V_info.negative_decay
    else:
        sign = V_info.get("sign", "nonneg")
        b = V_info.get("b", V_info.get("negative_decay"))
    if sign not in ("nonneg", "signed"):
        raise DomainError(f"unknown sign information {sign!r}")
    if hardy_kappa is not None and not 0 < hardy_kappa < (n - 2) ** 2 / 4:
        return OUTSIDE
    if sign == "signed" and (b is None or not b > 2):
        return OUTSIDE
    return RESONANCE if n in (3, 4) else EIGENSTATE
