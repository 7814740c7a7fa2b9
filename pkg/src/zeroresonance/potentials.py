"""Radial potentials ``V(r)`` and the admissibility checks they must pass.

Presets: Yukawa ``exp(-r)/r``, pure exponential ``exp(-r)``, a truncated
Hardy well ``r^-2`` on ``[eps, 1/eps]`` (``eps = 0`` gives the untruncated,
inadmissible Hardy potential), positive multiples of any potential, and
tabulated samples. Tabulated potentials are interpolated linearly in
``log r``, held constant below the first sample and set to zero beyond the
last one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DomainError

__all__ = [
    "RadialPotential",
    "AdmissibilityReport",
    "check_admissible",
    "load_tabulated",
]


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """A radial potential with the metadata the solvers and classifier use.

    ``sign_info`` is ``"nonneg"`` or ``"signed"``. For signed potentials
    ``negative_decay`` optionally records an exponent ``b`` with
    ``V_-(r) <~ (1 + r)^-b``.
    """

    kind: str
    func: Callable = field(repr=False)
    params: tuple = ()
    sign_info: str = "nonneg"
    negative_decay: float | None = None
    breakpoints: tuple = ()
    base: "RadialPotential | None" = None

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.func(r)

    # -- presets ---------------------------------------------------------

    @classmethod
    def yukawa(cls) -> "RadialPotential":
        return cls("yukawa", lambda r: np.exp(-r) / r)

    @classmethod
    def exponential(cls) -> "RadialPotential":
        return cls("exponential", lambda r: np.exp(-r))

    @classmethod
    def truncated_hardy(cls, eps: float) -> "RadialPotential":
        eps = float(eps)
        if not 0 <= eps < 1:
            raise DomainError(f"truncation parameter must lie in [0, 1), got {eps!r}")
        if eps == 0:
            return cls("truncated_hardy", lambda r: 1.0 / (r * r), params=(0.0,))
        lo, hi = eps, 1.0 / eps

        def f(r):
            return np.where((r >= lo) & (r <= hi), 1.0 / (r * r), 0.0)

        return cls("truncated_hardy", f, params=(eps,), breakpoints=(lo, hi))

    @classmethod
    def scaled(cls, c: float, base: "RadialPotential") -> "RadialPotential":
        c = float(c)
        if not c > 0:
            raise DomainError(f"scale factor must be positive, got {c!r}")
        return cls("scaled", lambda r: c * base.func(r), params=(c,),
                   sign_info=base.sign_info, negative_decay=base.negative_decay,
                   breakpoints=base.breakpoints, base=base)

    @classmethod
    def tabulated(cls, grid, values, negative_decay: float | None = None) -> "RadialPotential":
        r = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or len(r) < 2:
            raise DomainError("tabulated potential needs two equal-length columns of >= 2 samples")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise DomainError("tabulated radii must be positive and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("tabulated values must be finite")
        logr = np.log(r)
        r_last = r[-1]

        def f(x):
            x = np.asarray(x, dtype=float)
            out = np.interp(np.log(x), logr, v)
            return np.where(x > r_last, 0.0, out)

        sign = "nonneg" if np.all(v >= 0) else "signed"
        return cls("tabulated", f, params=(r.copy(), v.copy()), sign_info=sign,
                   negative_decay=negative_decay, breakpoints=tuple(r))

    @classmethod
    def from_preset(cls, name: str, scale: float = 1.0, eps: float = 0.01) -> "RadialPotential":
        presets = {
            "yukawa": cls.yukawa,
            "exponential": cls.exponential,
            "truncated_hardy": lambda: cls.truncated_hardy(eps),
        }
        if name not in presets:
            raise DomainError(f"unknown preset {name!r}; choose from {sorted(presets)}")
        V = presets[name]()
        return V if scale == 1.0 else cls.scaled(scale, V)

    # -- derived quantities ---------------------------------------------

    @property
    def scale(self) -> float:
        return self.params[0] if self.kind == "scaled" else 1.0

    @property
    def root(self) -> "RadialPotential":
        """The unscaled potential underneath any chain of ``scaled``."""
        V = self
        while V.kind == "scaled":
            V = V.base
        return V

    @property
    def total_scale(self) -> float:
        c, V = 1.0, self
        while V.kind == "scaled":
            c *= V.params[0]
            V = V.base
        return c

    def positive_part(self, r):
        return np.maximum(self(r), 0.0)

    def negative_part(self, r):
        return np.maximum(-self(r), 0.0)

    def describe(self) -> dict:
        d = {"kind": self.kind, "sign": self.sign_info}
        if self.kind == "scaled":
            d["scale"] = self.params[0]
            d["base"] = self.base.describe()
        elif self.kind == "truncated_hardy":
            d["eps"] = self.params[0]
        elif self.kind == "tabulated":
            d["samples"] = int(len(self.params[0]))
            d["r_range"] = [float(self.params[0][0]), float(self.params[0][-1])]
        if self.negative_decay is not None:
            d["negative_decay"] = self.negative_decay
        return d


def load_tabulated(path, negative_decay: float | None = None) -> RadialPotential:
    """Read a two-column ``r value`` text file; ``#`` starts a comment."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise DomainError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise DomainError(f"{path}: no samples")
    r, v = np.array(rows).T
    return RadialPotential.tabulated(r, v, negative_decay=negative_decay)


# -- admissibility -----------------------------------------------------------

@dataclass(frozen=True)
class AdmissibilityReport:
    passed: bool
    small_r_limit: float
    large_r_limit: float
    weighted_integral: float
    failures: tuple = ()

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "r2V_small_r": self.small_r_limit,
            "r2V_large_r": self.large_r_limit,
            "int_r_absV": self.weighted_integral,
            "failures": list(self.failures),
        }


_LIMIT_TOL = 1e-6


def _limit_estimate(V: RadialPotential, radii: np.ndarray) -> tuple[float, bool]:
    """Last value of ``r^2 |V(r)|`` along ``radii`` and whether it tends to 0."""
    with np.errstate(all="ignore"):
        vals = np.abs(radii * radii * V(radii))
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"potential {V.kind!r} is not finite on the sample radii")
    last = float(vals[-1])
    if last <= _LIMIT_TOL:
        return last, True
    # slow power-law decay: accept when the tail still shrinks steadily
    tail = vals[-6:]
    shrinking = bool(np.all(np.diff(tail) < 0) and tail[-1] < 1e-2 * tail[0])
    return last, shrinking


def _weighted_integral(V: RadialPotential, a: float) -> float:
    """``int r |V(r)| dr`` over ``[exp(-a), exp(a)]`` in the variable ``log r``."""
    pts = sorted(math.log(b) for b in V.breakpoints if math.exp(-a) < b < math.exp(a))
    if len(pts) > 200:
        pts = list(np.linspace(pts[0], pts[-1], 200))

    def f(t):
        r = math.exp(t)
        return r * r * abs(float(V(r)))

    edges = [-a] + pts + [a]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, _ = integrate.quad(f, lo, hi, limit=200)
            total += val
    return total


def check_admissible(V: RadialPotential) -> AdmissibilityReport:
    """Decay of ``r^2 V`` at both ends and finiteness of ``int r |V| dr``."""
    small = 10.0 ** -np.arange(1, 41)
    large = 10.0 ** np.arange(1, 41)
    failures = []
    s_val, s_ok = _limit_estimate(V, small)
    l_val, l_ok = _limit_estimate(V, large)
    if not s_ok:
        failures.append(f"r^2 V(r) does not tend to 0 as r -> 0 (value {s_val:.3g} at r=1e-40)")
    if not l_ok:
        failures.append(f"r^2 V(r) does not tend to 0 as r -> inf (value {l_val:.3g} at r=1e40)")
    i1 = _weighted_integral(V, 25.0)
    i2 = _weighted_integral(V, 50.0)
    if not (math.isfinite(i2) and abs(i2 - i1) <= 1e-6 * max(1.0, abs(i2))):
        failures.append(f"int r|V| dr does not converge ({i1:.6g} on [e^-25, e^25], "
                        f"{i2:.6g} on [e^-50, e^50])")
    return AdmissibilityReport(not failures, s_val, l_val, i2, tuple(failures))
