"""Interior power series for the Yukawa potential in three dimensions.

The regular solution of ``r u'' + 2 u' + kappa exp(-r) u = 0`` is written as
``u_int(r) = sum_k (-1)^k alpha_k(kappa) r^k`` with ``alpha_0 = 1``. The
coefficients are polynomials in ``kappa`` with rational coefficients; they are
built once, exactly, and evaluated at exact rational couplings. Leibniz
bounds on ``u_int(1)`` and ``u_int'(1)`` are only emitted after the
monotonicity hypothesis has been checked in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Sequence

from .enclosure import Enclosure, as_fraction, from_rational
from .errors import CertificationError, DomainError

__all__ = [
    "RationalPolynomial",
    "AlphaTable",
    "BoundaryTrace",
    "build_alpha_table",
    "verify_monotone_from",
    "u_int_trace",
    "interior_partial_sums",
]


class RationalPolynomial:
    """Polynomial in one variable with exact rational coefficients.

    Coefficients are stored in ascending degree; trailing zeros are stripped,
    so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        c = [as_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = as_fraction(x)
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPolynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __mul__(self, other):
        if not isinstance(other, RationalPolynomial):
            s = as_fraction(other)
            return RationalPolynomial([s * a for a in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def shift(self, k: int = 1) -> "RationalPolynomial":
        """Multiply by ``x**k``."""
        if not self.coeffs:
            return self
        return RationalPolynomial((Fraction(0),) * k + self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RationalPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RationalPolynomial({[str(c) for c in self.coeffs]})"


def _as_poly(x) -> RationalPolynomial:
    return x if isinstance(x, RationalPolynomial) else RationalPolynomial([x])


@dataclass(frozen=True)
class AlphaTable:
    """The coefficient polynomials ``alpha_0 .. alpha_K``."""

    K: int
    alphas: tuple

    def evaluate(self, kappa) -> list:
        """Exact values ``alpha_k(kappa)`` for ``k = 0..K``."""
        return list(_evaluate_alphas(self, as_fraction(kappa)))

    def __getitem__(self, k: int) -> RationalPolynomial:
        return self.alphas[k]


@lru_cache(maxsize=256)
def _evaluate_alphas(table: AlphaTable, kappa: Fraction) -> tuple:
    return tuple(p(kappa) for p in table.alphas)


@dataclass(frozen=True)
class BoundaryTrace:
    """Enclosures of ``u(1)`` and ``u'(1)`` for one of the two solutions."""

    value: Enclosure
    derivative: Enclosure
    side: Literal["interior", "exterior"]
    order: int = 0
    certified: bool = True
    diagnostics: dict | None = field(default=None, compare=False)


@lru_cache(maxsize=32)
def build_alpha_table(K: int) -> AlphaTable:
    """Exact ``alpha_k`` polynomials from the coefficient recursion.

    ``alpha_{k+1} = kappa / ((k+1)(k+2)) * sum_{l=0}^{k} alpha_{k-l} / l!``
    with ``alpha_0 = 1``.
    """
    if int(K) != K or K < 1:
        raise DomainError(f"table depth must be a positive integer, got {K!r}")
    K = int(K)
    alphas = [RationalPolynomial([1])]
    for k in range(K):
        s = RationalPolynomial()
        for ell in range(k + 1):
            s = s + alphas[k - ell] * Fraction(1, math.factorial(ell))
        alphas.append(s.shift(1) * Fraction(1, (k + 1) * (k + 2)))
    return AlphaTable(K=K, alphas=tuple(alphas))


def verify_monotone_from(table: AlphaTable, kappa) -> int:
    """Smallest ``k0 >= 1`` with ``alpha_{k0+1} < min_{k <= k0} alpha_k``.

    Once this holds, ``alpha_k`` decreases for every ``k >= k0`` and
    ``k alpha_k`` decreases for ``k >= max(k0, 3)``. The comparison is exact.
    Raises ``CertificationError`` when no such ``k0 <= K - 1`` exists.
    """
    kappa = as_fraction(kappa)
    if kappa <= 0:
        raise DomainError("monotonicity certificate needs kappa > 0")
    a = table.evaluate(kappa)
    running_min = min(a[0], a[1])
    for k0 in range(1, table.K):
        if a[k0 + 1] < running_min:
            return k0
        running_min = min(running_min, a[k0 + 1])
    raise CertificationError(
        f"alpha_k({float(kappa):.6g}) not certified decreasing within depth K={table.K}")


def interior_partial_sums(values: Sequence[Fraction]):
    """Exact partial sums ``S_m = sum (-1)^k a_k`` and ``D_m = sum (-1)^k k a_k``."""
    S, D = [], []
    s = d = Fraction(0)
    for k, a in enumerate(values):
        term = a if k % 2 == 0 else -a
        s += term
        d += k * term
        S.append(s)
        D.append(d)
    return S, D


def u_int_trace(table: AlphaTable, kappa, pairs: int | None = None) -> BoundaryTrace:
    """Leibniz enclosures of ``u_int(1)`` and ``u_int'(1)``.

    ``pairs`` selects the truncation: the value lies between the partial sums
    ending at ``2*pairs - 1`` and ``2*pairs``, and likewise the derivative.
    It defaults to the deepest pair the table supports. The monotonicity
    start index ``k0`` must satisfy ``2*pairs - 1 >= max(k0, 3)``.
    """
    kappa = as_fraction(kappa)
    if kappa < 0:
        raise DomainError("interior trace implemented for kappa >= 0")
    if pairs is None:
        pairs = table.K // 2
    if pairs < 1 or 2 * pairs > table.K:
        raise DomainError(f"pairs={pairs} needs table depth >= {2 * pairs}, have {table.K}")
    if kappa == 0:
        one = Enclosure(1.0, 1.0)
        return BoundaryTrace(one, Enclosure(0.0, 0.0), "interior", order=2 * pairs)

    k0 = verify_monotone_from(table, kappa)
    top = 2 * pairs - 1
    if top < max(k0, 3):
        raise CertificationError(
            f"truncation 2K-1={top} precedes certified monotone range k >= {max(k0, 3)}")
    S, D = interior_partial_sums(table.evaluate(kappa)[: 2 * pairs + 1])
    value = Enclosure(from_rational(S[top]).lo, from_rational(S[top + 1]).hi)
    deriv = Enclosure(from_rational(D[top]).lo, from_rational(D[top + 1]).hi)
    return BoundaryTrace(value, deriv, "interior", order=2 * pairs)
