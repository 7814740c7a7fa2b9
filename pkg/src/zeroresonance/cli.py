"""Command-line front end.

Subcommands::

    yukawa-bracket   certified bracket of the first Yukawa resonance (n = 3)
    resonance        first resonance of a preset or tabulated potential
    compare          lower bound for potentials dominated by C0 * Yukawa
    plot-data        CSV/JSON columns for plotting

Exit codes: 0 success, 2 usage error, 3 admissibility refusal, 4 precision
or certification failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .enclosure import Enclosure, as_fraction, from_rational
from .errors import (AdmissibilityError, CertificationError, ConvergenceError, DomainError,
                     PrecisionError)
from .potentials import RadialPotential, check_admissible, load_tabulated
from .radial_solver import (VolterraGrid, _exterior_solution, _interior_solution,
                            find_first_resonance_general, general_wronskian)
from .variational import classify_state, comparison_bound, dominates, variational_J
from .wronskian import (ResonanceReport, bracket_first_zero, resonance_free_sweep,
                        wronskian_enclosure)
from .yukawa_exterior import omega_table, u_ext_at
from .yukawa_interior import build_alpha_table, verify_monotone_from

__all__ = [
    "cmd_yukawa_bracket",
    "cmd_resonance",
    "cmd_compare",
    "cmd_plot_data",
    "main",
]

EXIT_OK, EXIT_USAGE, EXIT_ADMISSIBILITY, EXIT_PRECISION = 0, 2, 3, 4


class UsageError(DomainError):
    pass


# -- computations -----------------------------------------------------------

def cmd_yukawa_bracket(tol: float = 0.012, lo="1.67626", hi="1.68742", K_int: int = 16,
                       K_ext: int = 1, max_escalations: int = 5,
                       sweep: bool = False) -> ResonanceReport:
    """Certified bracket of the first zero of the Yukawa Wronskian in n = 3.

    The default start is the published interval: its endpoint signs are
    certified first, then the bracket is bisected down to ``tol``. Pass
    ``lo="1", hi="2"`` for a search that assumes nothing.
    """
    if not tol > 0:
        raise UsageError(f"tolerance must be positive, got {tol}")
    br = bracket_first_zero(lo, hi, tol, K_int=K_int, K_ext=K_ext,
                            max_escalations=max_escalations)
    diag = {
        "bracket": br.report(),
        "truncation": {"interior_table_depth": br.K_int, "exterior_orders": [2 * br.K_ext - 1, 2 * br.K_ext]},
        "start": {"lo": str(as_fraction(lo)), "hi": str(as_fraction(hi)),
                  "K_int": K_int, "K_ext": K_ext, "max_escalations": max_escalations},
    }
    if sweep:
        samples = resonance_free_sweep(br.a)
        diag["resonance_free_sweep"] = {
            "samples": len(samples),
            "all_positive": all(s.sign > 0 for s in samples),
            "upper": str(br.a),
        }
    return ResonanceReport(3, RadialPotential.yukawa(), Enclosure(br.lo, br.hi), "yukawa_series",
                           classify_state(3, RadialPotential.yukawa()), diag)


def _is_yukawa_multiple(V: RadialPotential) -> bool:
    return V.root.kind == "yukawa"


def _series_report(V, n, tol):
    if n != 3 or not _is_yukawa_multiple(V):
        raise UsageError("the series method is available for (multiples of) Yukawa in n = 3 only")
    rep = cmd_yukawa_bracket(tol=tol)
    c = V.total_scale
    if c != 1.0:
        # kappa*(c V) = kappa*(V) / c, rounded outwards
        k = rep.kappa_star / Enclosure.point(as_fraction(c))
        rep = ResonanceReport(n, V, k, "yukawa_series", rep.classification,
                              dict(rep.diagnostics, scale=c))
    else:
        rep.potential = V
    return rep


def _variational_report(V, n, tol):
    res = variational_J(V, n)
    ks = res.kappa_sensitivity
    diag = {
        "J": res.J_estimate,
        "kappa_estimate": res.kappa_estimate,
        "refinement_history": [[int(N), float(J)] for N, J in res.refinement_history],
        "domain_history": [[float(R), float(J)] for R, J in res.domain_history],
        "r_max": res.r_max,
        "grid_sensitivity": ks,
        "one_sided": "kappa_estimate is an upper estimate of kappa*",
    }
    k = Enclosure(res.kappa_estimate - 2 * ks, res.kappa_estimate)
    return ResonanceReport(n, V, k, "variational", classify_state(n, V), diag)


def cmd_resonance(V: RadialPotential, n: int = 3, method: str = "volterra", tol: float = 1e-6,
                  search_hi: float = 20.0) -> ResonanceReport:
    """First resonance of ``V`` in dimension ``n`` by the chosen method(s)."""
    if int(n) != n or n < 3:
        raise UsageError(f"dimension must be an integer >= 3, got {n}")
    if not tol > 0:
        raise UsageError(f"tolerance must be positive, got {tol}")
    if method not in ("series", "volterra", "variational", "both"):
        raise UsageError(f"unknown method {method!r}")
    adm = check_admissible(V)
    if not adm.passed:
        raise AdmissibilityError("potential is not admissible: " + "; ".join(adm.failures), adm)
    if method == "series":
        return _series_report(V, n, tol)
    if method == "variational":
        rep = _variational_report(V, n, tol)
        rep.diagnostics["admissibility"] = adm.as_dict()
        return rep
    rep = find_first_resonance_general(V, n, search_hi=search_hi, tol=tol)
    if method == "both":
        var = _variational_report(V, n, tol)
        agree = None
        if rep.kappa_star is not None:
            diff = abs(rep.kappa_star.mid - var.diagnostics["kappa_estimate"])
            allowed = rep.kappa_star.width + 2 * var.diagnostics["grid_sensitivity"]
            agree = {"difference": diff, "allowed": allowed, "agree": diff <= allowed}
        rep.diagnostics["variational"] = var.diagnostics
        rep.diagnostics["agreement"] = agree
        rep.method = "both"
    return rep


def cmd_compare(C0: float, reference: Enclosure | None = None,
                potential: RadialPotential | None = None) -> dict:
    """Lower bound ``lo(reference) / C0`` for any ``V <= C0 * Yukawa``."""
    if reference is None:
        rep = cmd_yukawa_bracket(tol=1e-4)
        reference = rep.kappa_star
        source = "certified Yukawa bracket, n = 3"
    else:
        source = "user supplied enclosure"
    bound = comparison_bound(reference, C0)
    out = {
        "schema": 1,
        "kind": "comparison_bound",
        "C0": float(C0),
        "reference": reference.as_dict(),
        "reference_source": source,
        "lower_bound": bound,
        "statement": f"kappa*(V) >= {bound!r} for every V with V <= {C0} * exp(-r)/r",
    }
    if potential is not None:
        out["dominated_on_samples"] = dominates(potential, RadialPotential.yukawa(), float(C0))
    return out


def _grid_volterra_solution(side, V, n, kappa, grid):
    if kappa == 0:
        r = grid.nodes[: grid.i_one + 1] if side == "interior" else grid.nodes[grid.i_one:]
        y = np.ones_like(r)
        return r, y
    solver = _interior_solution if side == "interior" else _exterior_solution
    r, y, *_ = solver(V, n, kappa, grid)
    return r, y


def cmd_plot_data(what: str, lo: float | None = None, hi: float | None = None,
                  resolution: int | None = None, kappa: float = 1.0, k: int = 3):
    """Columns for plotting; returns ``(header, rows)``.

    Enclosed quantities come with ``lo, mid, hi`` and a ``certified`` flag;
    points outside the certified range carry a non-certified estimate in
    ``mid`` and empty bounds.
    """
    Vy = RadialPotential.yukawa()
    if what == "wronskian":
        lo, hi = (0.0 if lo is None else lo), (2.0 if hi is None else hi)
        resolution = resolution or 201
        header = ["kappa", "lo", "mid", "hi", "certified"]
        rows = []
        grid = None
        for x in np.linspace(lo, hi, resolution):
            q = Fraction(str(round(float(x), 12)))
            try:
                if q < 0:
                    raise CertificationError("negative kappa")
                s = wronskian_enclosure(q, 16, 2)
                rows.append([float(q), s.enclosure.lo, s.enclosure.mid, s.enclosure.hi, 1])
            except (CertificationError, DomainError):
                grid = grid or VolterraGrid.build(Vy, 3)
                w = general_wronskian(Vy, 3, float(q), grid, estimate_error=False).value
                rows.append([float(q), "", w, "", 0])
        return header, rows
    if what in ("u_int", "u_ext"):
        side = "interior" if what == "u_int" else "exterior"
        if side == "interior":
            lo, hi = (0.01 if lo is None else lo), (1.0 if hi is None else hi)
        else:
            lo, hi = (1.0 if lo is None else lo), (5.0 if hi is None else hi)
        if not 0 < lo < hi:
            raise UsageError("need 0 < lo < hi for radii")
        resolution = resolution or 101
        header = ["r", "lo", "mid", "hi", "certified"]
        rows = []
        grid = VolterraGrid.build(Vy, 3)
        rv, yv = _grid_volterra_solution(side, Vy, 3, float(kappa), grid)
        m = 1
        for r in np.linspace(lo, hi, resolution):
            r = float(r)
            enc = None
            try:
                if side == "interior" and r <= 1.0:
                    enc = _u_int_series_at(kappa, r)
                elif side == "exterior" and r >= 1.0:
                    enc = u_ext_at(kappa, r, K=1).value
            except (CertificationError, DomainError):
                enc = None
            if enc is not None:
                rows.append([r, enc.lo, enc.mid, enc.hi, 1])
                continue
            if (side == "interior" and r > 1.0) or (side == "exterior" and r < 1.0):
                # outside the grid of this side: not available
                rows.append([r, "", "", "", 0])
                continue
            y = float(np.interp(r, rv, yv))
            rows.append([r, "", y if side == "interior" else y / r ** m, "", 0])
        return header, rows
    if what == "alpha_k":
        K = resolution or 10
        table = build_alpha_table(K + 1)
        vals = table.evaluate(as_fraction(str(kappa)))
        try:
            k0 = verify_monotone_from(table, as_fraction(str(kappa)))
        except (CertificationError, DomainError):
            k0 = None
        header = ["k", "lo", "mid", "hi", "exact", "monotone_certified"]
        rows = []
        for j in range(K + 1):
            e = from_rational(vals[j])
            rows.append([j, e.lo, float(vals[j]), e.hi, str(vals[j]),
                         int(k0 is not None and j >= k0)])
        return header, rows
    if what == "omega_k":
        lo, hi = (1.0 if lo is None else lo), (5.0 if hi is None else hi)
        r, vlo, vhi, dlo, dhi = omega_table(k, lo, hi)
        resolution = resolution or 101
        idx = np.unique(np.round(np.linspace(0, len(r) - 1, min(resolution, len(r)))).astype(int))
        header = ["r", "lo", "mid", "hi", "dlo", "dhi", "certified"]
        rows = [[float(r[i]), float(vlo[i]), 0.5 * float(vlo[i] + vhi[i]), float(vhi[i]),
                 float(dlo[i]), float(dhi[i]), 1] for i in idx]
        return header, rows
    raise UsageError(f"unknown plot quantity {what!r}")


def _u_int_series_at(kappa, r: float) -> Enclosure:
    """Leibniz enclosure of ``u_int(r)`` for ``0 < r <= 1`` from the series."""
    q = as_fraction(str(kappa))
    if q == 0:
        return Enclosure(1.0, 1.0)
    table = build_alpha_table(32)
    k0 = verify_monotone_from(table, q)
    top = 31
    if top < k0:
        raise CertificationError("series not certified at this coupling")
    x = as_fraction(r)
    vals = table.evaluate(q)
    s = Fraction(0)
    sums = []
    for j, a in enumerate(vals):
        s += a * x ** j if j % 2 == 0 else -a * x ** j
        sums.append(s)
    a_, b_ = sorted((sums[top], sums[top + 1]))
    return Enclosure(from_rational(a_).lo, from_rational(b_).hi)


# -- output -----------------------------------------------------------------

def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def _finalize(doc: dict, timestamp: bool) -> dict:
    doc = dict(doc)
    doc["version"] = __version__
    if timestamp:
        doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return doc


def _render_report(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    ks = doc.get("kappa_star")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kappa_lo", "kappa_hi", "method", "n", "classification"])
        w.writerow([ks["lo"] if ks else "", ks["hi"] if ks else "", doc.get("method"),
                    doc.get("n"), doc.get("classification")])
        return buf.getvalue()
    lines = []
    if ks:
        lines.append(f"kappa* in [{ks['lo']:.10g}, {ks['hi']:.10g}]  (width {ks['hi'] - ks['lo']:.3g})")
    elif "lower_bound" in doc:
        lines.append(doc["statement"])
    else:
        lines.append("kappa*: " + str(doc.get("diagnostics", {}).get("outcome", "not found")))
    for key in ("method", "n", "classification"):
        if key in doc:
            lines.append(f"{key}: {doc[key]}")
    diag = doc.get("diagnostics", {})
    if "bracket" in diag:
        b = diag["bracket"]
        lines.append(f"truncation: interior depth {b['K_int']}, exterior orders "
                     f"{2 * b['K_ext'] - 1}/{2 * b['K_ext']}, converged {b['converged']}")
    if "grid_sensitivity" in diag:
        lines.append(f"grid sensitivity: {diag['grid_sensitivity']:.3g}")
    if diag.get("agreement"):
        a = diag["agreement"]
        lines.append(f"volterra vs variational: diff {a['difference']:.3g}, allowed {a['allowed']:.3g}")
    return "\n".join(lines) + "\n"


def _render_table(header, rows, fmt: str, meta: dict) -> str:
    if fmt == "json":
        doc = dict(meta, columns=header, rows=rows)
        return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- argument parsing ---------------------------------------------------------

def _positive_float(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
    return v


def _dimension(s):
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if n < 3:
        raise argparse.ArgumentTypeError(f"dimension must be >= 3: {s!r}")
    return n


def _range(s):
    try:
        a, b = (float(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {s!r}") from None
    if not a < b:
        raise argparse.ArgumentTypeError(f"empty range {s!r}")
    return a, b


def _common(p):
    p.add_argument("--format", choices=("json", "csv", "human"), default="human")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp (byte-stable output)")


def _potential_args(p):
    p.add_argument("--potential", default="yukawa",
                   help="preset (yukawa, exponential, truncated_hardy) or a two-column file")
    p.add_argument("--scale", type=_positive_float, default=1.0, help="multiply the potential by c > 0")
    p.add_argument("--eps", type=float, default=0.01, help="truncation of the truncated_hardy preset")
    p.add_argument("--negative-decay", type=float, default=None,
                   help="decay exponent b of the negative part of a signed tabulated potential")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zeroresonance", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("yukawa-bracket", help="certified Yukawa bracket in n = 3")
    p.add_argument("--tol", type=float, default=0.012)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--lo", default="1.67626", help="left end (exact decimal), certified W > 0 there")
    p.add_argument("--hi", default="1.68742", help="right end (exact decimal), certified W < 0 there")
    p.add_argument("--k-int", type=int, default=16, help="interior coefficient table depth")
    p.add_argument("--k-ext", type=int, default=1, help="exterior truncation K (orders 2K-1, 2K)")
    p.add_argument("--escalations", type=int, default=5, help="precision escalations allowed")
    p.add_argument("--sweep", action="store_true", help="certify W > 0 at 64 points below the bracket")
    _common(p)

    p = sub.add_parser("resonance", help="first resonance of a radial potential")
    _potential_args(p)
    p.add_argument("--dim", type=_dimension, default=3)
    p.add_argument("--method", choices=("series", "volterra", "variational", "both"), default="volterra")
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.add_argument("--search-hi", type=_positive_float, default=20.0)
    _common(p)

    p = sub.add_parser("compare", help="comparison lower bound for V <= C0 * Yukawa")
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--reference", type=_range, default=None,
                   help="reference enclosure 'lo,hi' of kappa*(Yukawa); default: compute it")
    p.add_argument("--potential", default=None, help="optional potential to spot-check V <= C0 V0")
    p.add_argument("--scale", type=_positive_float, default=1.0)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--negative-decay", type=float, default=None)
    _common(p)

    p = sub.add_parser("plot-data", help="columns for plotting")
    p.add_argument("what", choices=("wronskian", "u_int", "u_ext", "alpha_k", "omega_k"))
    p.add_argument("--range", type=_range, default=None, help="'lo,hi' of the abscissa")
    p.add_argument("--resolution", type=int, default=None, help="number of points (alpha_k: max k)")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--k", type=int, default=3, help="order for omega_k")
    _common(p)
    p.set_defaults(format="csv")
    return ap


def _load_potential(args) -> RadialPotential:
    src = args.potential
    path = Path(src)
    if path.suffix or path.exists():
        if not path.exists():
            raise UsageError(f"potential file not found: {src}")
        V = load_tabulated(path, negative_decay=args.negative_decay)
        return V if args.scale == 1.0 else RadialPotential.scaled(args.scale, V)
    return RadialPotential.from_preset(src, scale=args.scale, eps=args.eps)


def _run(args) -> tuple[str, int]:
    ts = not args.no_timestamp
    if args.command == "yukawa-bracket":
        if args.dim != 3:
            raise UsageError("yukawa-bracket is defined for n = 3 only")
        rep = cmd_yukawa_bracket(args.tol, args.lo, args.hi, args.k_int, args.k_ext,
                                 args.escalations, args.sweep)
        code = EXIT_OK if rep.diagnostics["bracket"]["converged"] else EXIT_PRECISION
        return _render_report(_finalize(rep.as_dict(), ts), args.format), code
    if args.command == "resonance":
        V = _load_potential(args)
        rep = cmd_resonance(V, args.dim, args.method, args.tol, args.search_hi)
        return _render_report(_finalize(rep.as_dict(), ts), args.format), EXIT_OK
    if args.command == "compare":
        ref = Enclosure(*args.reference) if args.reference else None
        V = _load_potential(args) if args.potential else None
        doc = cmd_compare(args.c0, ref, V)
        return _render_report(_finalize(doc, ts), args.format), EXIT_OK
    if args.command == "plot-data":
        lo, hi = args.range if args.range else (None, None)
        header, rows = cmd_plot_data(args.what, lo, hi, args.resolution, args.kappa, args.k)
        meta = _finalize({"schema": 1, "what": args.what}, ts)
        fmt = "json" if args.format == "json" else "csv"
        return _render_table(header, rows, fmt, meta), EXIT_OK
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = _run(args)
    except AdmissibilityError as exc:
        sys.stderr.write(f"refused: {exc}\n")
        if exc.report is not None:
            sys.stderr.write(json.dumps(exc.report.as_dict(), sort_keys=True) + "\n")
        return EXIT_ADMISSIBILITY
    except (PrecisionError, CertificationError, ConvergenceError) as exc:
        sys.stderr.write(f"precision failure: {exc}\n")
        return EXIT_PRECISION
    except (DomainError, ValueError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    _emit(text, args.out)
    return code
