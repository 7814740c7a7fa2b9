"""Certified Wronskian of the Yukawa problem and bracketing of its first zero.

``W(kappa) = u_ext(1) u_int'(1) - u_int(1) u_ext'(1)`` is evaluated in
interval arithmetic from the two boundary traces. ``W(0) = 1`` and the first
positive zero is the first resonant coupling. Bisection runs on certified
signs only; a midpoint whose sign cannot be decided triggers deeper
truncations before the bracket is shrunk further.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .enclosure import Enclosure, as_fraction, from_rational
from .errors import CertificationError, DomainError
from .potentials import RadialPotential
from .yukawa_exterior import u_ext_trace
from .yukawa_interior import build_alpha_table, u_int_trace

__all__ = [
    "WronskianSample",
    "ResonanceReport",
    "ZeroBracket",
    "wronskian_enclosure",
    "certified_sign",
    "bracket_first_zero",
    "resonance_free_sweep",
    "DEFAULT_K_INT",
    "DEFAULT_K_EXT",
]

DEFAULT_K_INT = 16
DEFAULT_K_EXT = 1
MAX_ESCALATIONS = 5
# interior enclosures reach rounding level well before this depth
MAX_K_INT = 64


@dataclass(frozen=True)
class WronskianSample:
    kappa: Fraction
    enclosure: Enclosure
    K_int: int = DEFAULT_K_INT
    K_ext: int = DEFAULT_K_EXT

    @property
    def sign(self) -> int:
        """+1, -1, or 0 when indeterminate."""
        return self.enclosure.sign()


@dataclass
class ResonanceReport:
    """Outcome of a first-resonance computation on any of the three paths."""

    n: int
    potential: Any
    kappa_star: Enclosure | None
    method: str
    classification: str | None = None
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        pot = self.potential.describe() if hasattr(self.potential, "describe") else self.potential
        return {
            "schema": 1,
            "kappa_star": None if self.kappa_star is None else self.kappa_star.as_dict(),
            "method": self.method,
            "n": self.n,
            "potential": pot,
            "classification": self.classification,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class ZeroBracket(Enclosure):
    """Certified bracket of a sign change: ``W(a) > 0 > W(b)``.

    ``a`` and ``b`` are the exact rational endpoints; ``lo``/``hi`` are their
    outward float roundings. ``converged`` is False when precision
    escalation ran out before the requested width was reached.
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    K_int: int = DEFAULT_K_INT
    K_ext: int = DEFAULT_K_EXT
    converged: bool = True
    requested_tol: float = 0.0
    history: tuple = field(default=(), repr=False)

    def report(self) -> dict:
        return {
            "a": str(self.a),
            "b": str(self.b),
            "width": float(self.b - self.a),
            "requested_tol": self.requested_tol,
            "converged": self.converged,
            "K_int": self.K_int,
            "K_ext": self.K_ext,
            "steps": len(self.history),
        }


def wronskian_enclosure(kappa, K_int: int = DEFAULT_K_INT, K_ext: int = DEFAULT_K_EXT,
                        pairs: int | None = None) -> WronskianSample:
    """Interval enclosure of ``W(kappa)``.

    ``K_int`` is the depth of the interior coefficient table (the Leibniz
    pair ends at ``2*pairs``, by default the full depth) and ``K_ext`` the
    exterior truncation (orders ``2K_ext - 1`` and ``2K_ext``).
    """
    kappa = as_fraction(kappa)
    if kappa < 0:
        raise DomainError("certified Wronskian implemented for kappa >= 0")
    if kappa == 0:
        return WronskianSample(kappa, Enclosure(1.0, 1.0), K_int, K_ext)
    ti = u_int_trace(build_alpha_table(K_int), kappa, pairs)
    te = u_ext_trace(kappa, K_ext)
    w = te.value * ti.derivative - ti.value * te.derivative
    return WronskianSample(kappa, w, K_int, K_ext)


def _escalate(K_int: int, K_ext: int):
    return min(2 * K_int, MAX_K_INT), K_ext + 1


def certified_sign(kappa, K_int: int = DEFAULT_K_INT, K_ext: int = DEFAULT_K_EXT,
                   max_escalations: int = MAX_ESCALATIONS) -> WronskianSample:
    """Sample ``W(kappa)``, deepening the truncations until the sign is decided.

    Returns the last sample, whose sign may still be 0 when escalation is
    exhausted. Interior certification failures also trigger escalation.
    """
    sample = None
    for attempt in range(max_escalations + 1):
        try:
            sample = wronskian_enclosure(kappa, K_int, K_ext)
        except CertificationError:
            if attempt == max_escalations:
                raise
        else:
            if sample.sign != 0:
                return sample
        K_int, K_ext = _escalate(K_int, K_ext)
    return sample


def _midpoint(a: Fraction, b: Fraction) -> Fraction:
    # keep denominators small: the shortest decimal within (b - a) / 10 of
    # the midpoint, so each accepted step shrinks the bracket by >= 1.5
    m = (a + b) / 2
    q = (b - a) / 10
    digits = 0
    while True:
        scale = 10 ** digits
        cand = Fraction(round(m * scale), scale)
        if abs(cand - m) <= q:
            return cand
        digits += 1


def bracket_first_zero(lo, hi, tol: float, K_int: int = DEFAULT_K_INT,
                       K_ext: int = DEFAULT_K_EXT,
                       max_escalations: int = MAX_ESCALATIONS) -> ZeroBracket:
    """Shrink ``[lo, hi]`` around a certified sign change of ``W``.

    Requires ``W(lo) > 0`` and ``W(hi) < 0`` after escalation. Bisection
    accepts a midpoint only when its sign is certified; an indeterminate
    midpoint deepens the truncations (interior depth doubled, exterior order
    raised by one, at most ``max_escalations`` times). When that budget is
    spent, each side is pushed towards the undecided region separately and
    the best certified bracket is returned with ``converged=False``.
    """
    a = as_fraction(lo)
    b = as_fraction(hi)
    tol = float(tol)
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    if not a < b:
        raise DomainError(f"empty bracket [{lo}, {hi}]")
    if a < 0:
        raise DomainError("bracket must lie in kappa >= 0")

    budget = max_escalations

    def sample(k):
        nonlocal K_int, K_ext, budget
        while True:
            s = wronskian_enclosure(k, K_int, K_ext)
            if s.sign != 0 or budget == 0:
                return s
            K_int, K_ext = _escalate(K_int, K_ext)
            budget -= 1

    for end, want in ((a, 1), (b, -1)):
        s = sample(end)
        if s.sign != want:
            what = "indeterminate" if s.sign == 0 else ("+" if s.sign > 0 else "-")
            raise CertificationError(
                f"W({float(end):.8g}) sign is {what}, need {'+' if want > 0 else '-'} "
                f"(K_int={K_int}, K_ext={K_ext})")

    history = [(a, b)]
    stuck = False
    while b - a > tol:
        m = _midpoint(a, b)
        s = sample(m)
        if s.sign > 0:
            a = m
        elif s.sign < 0:
            b = m
        else:
            stuck = True
            break
        history.append((a, b))

    if stuck:
        # the undecided set contains m; tighten each side towards it
        floor = Fraction(tol) / 8
        for side in (1, -1):
            inner = m if a < m < b else _midpoint(a, b)
            while (inner - a if side > 0 else b - inner) > floor:
                x = _midpoint(a, inner) if side > 0 else _midpoint(inner, b)
                s = sample(x)
                if s.sign > 0:
                    a = x
                elif s.sign < 0:
                    b = x
                else:
                    inner = x
                    continue
                history.append((a, b))
                if not a < inner < b:
                    inner = _midpoint(a, b)

    enc = Enclosure(from_rational(a).lo, from_rational(b).hi)
    return ZeroBracket(enc.lo, enc.hi, a=a, b=b, K_int=K_int, K_ext=K_ext,
                       converged=(b - a) <= tol, requested_tol=tol,
                       history=tuple(history))


def resonance_free_sweep(upper, samples: int = 64, K_int: int = DEFAULT_K_INT,
                         K_ext: int = DEFAULT_K_EXT) -> list:
    """Certified signs of ``W`` at ``upper * j / samples`` for ``j = 1..samples``.

    A finite certificate: it shows no sign change at the sampled points, not
    the absence of a zero between them.
    """
    upper = as_fraction(upper)
    if upper <= 0:
        raise DomainError("sweep upper end must be positive")
    return [certified_sign(upper * j / samples, K_int, K_ext) for j in range(1, samples + 1)]


def yukawa_report(bracket: ZeroBracket) -> ResonanceReport:
    """Wrap a certified bracket as an n = 3 resonance report."""
    return ResonanceReport(
        n=3,
        potential=RadialPotential.yukawa(),
        kappa_star=Enclosure(bracket.lo, bracket.hi),
        method="yukawa_series",
        classification="resonance_not_L2",
        diagnostics={"bracket": bracket.report()},
    )
