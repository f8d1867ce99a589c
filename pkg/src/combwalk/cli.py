"""Command-line interface: tables of amplitudes, profiles, escape constants and atlas data.

Every subcommand takes ``--engine exact|analytic|both``.  ``exact`` is
brute-force propagation (or the direct spectral quadrature for
completeness-check), ``analytic`` the large-time or closed-form result, and
``both`` prints the two side by side with a residual column.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 domain or
numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from . import escape, spectral, stokes
from .comb import Truncation, WaveState
from .contour import ContourSpec, amplitude_contour
from .errors import CombWalkError, DomainError
from .evolution import DEFAULT_TOL, amplitude_exact, evolve, evolve_times, light_cone_truncation, truncation_for

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3
QUAD_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class Table:
    columns: list[tuple[str, str]]  # (name, unit)
    rows: list[list] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)


# ---------------------------------------------------------------- output

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _json_value(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in x) + "]"
    return json.dumps(str(x))


def render(command: str, table: Table, fmt: str) -> str:
    if fmt == "json":
        names = [c for c, _ in table.columns]
        doc = {
            "command": command,
            "columns": [{"name": c, "unit": u} for c, u in table.columns],
            "meta": table.meta,
            "rows": [dict(zip(names, r)) for r in table.rows],
        }
        return _json_value(doc) + "\n"
    buf = io.StringIO()
    schema = ", ".join(f"{c} [{u}]" if u else c for c, u in table.columns)
    buf.write(f"# schema: {schema}\n")
    for k, v in table.meta.items():
        buf.write(f"# {k}: {_fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([c for c, _ in table.columns])
    for r in table.rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


# ---------------------------------------------------------------- engine helpers

def _want(args) -> tuple[bool, bool]:
    return args.engine in ("exact", "both"), args.engine in ("analytic", "both")


def _value_columns(args, name: str, unit: str = "", complex_valued: bool = False) -> list[tuple[str, str]]:
    ex, an = _want(args)
    cols = []
    for flag, prefix in ((ex, "exact"), (an, "analytic")):
        if flag:
            if complex_valued:
                cols += [(f"{name}_{prefix}_re", unit), (f"{name}_{prefix}_im", unit)]
            else:
                cols.append((f"{name}_{prefix}", unit))
    if ex and an:
        cols.append(("residual", unit))
    return cols


def _values(args, exact, analytic, complex_valued: bool = False) -> list:
    ex, an = _want(args)
    out = []
    for flag, val in ((ex, exact), (an, analytic)):
        if flag:
            out += [val.real, val.imag] if complex_valued else [val]
    if ex and an:
        out.append(abs(exact - analytic))
    return out


def _check_residuals(args, table: Table) -> None:
    limit = getattr(args, "max_residual", None)
    if limit is None or args.engine != "both":
        return
    k = [c for c, _ in table.columns].index("residual")
    worst = max((r[k] for r in table.rows if np.isfinite(r[k])), default=0.0)
    table.meta["max_residual"] = worst
    if worst > limit:
        table.failures.append(f"residual {worst:.3e} exceeds --max-residual {limit:g}")


# ---------------------------------------------------------------- subcommands

def cmd_evolve(args) -> Table:
    ex, an = _want(args)
    cols = [("n", ""), ("j", "")] + _value_columns(args, "amp", complex_valued=True)
    table = Table(cols)
    state = None
    if ex:
        trunc = truncation_for(args.t)
        trunc = Truncation(max(trunc.L, args.n_max + 1), max(trunc.M, args.j_max + 1))
        state = evolve(WaveState.point(trunc, (0, 0)), args.t, args.tol)
        table.meta["total_probability"] = state.norm ** 2
    for n in range(-args.n_max, args.n_max + 1):
        for j in range(0, args.j_max + 1):
            e = state[(n, j)] if ex else 0j
            a = stokes.amplitude_asymptotic(n, j, args.t) if an else 0j
            table.rows.append([n, j] + _values(args, e, a, complex_valued=True))
    _check_residuals(args, table)
    return table


def cmd_amplitude(args) -> Table:
    ex, an = _want(args)
    cols = [("n", ""), ("j", ""), ("j0", ""), ("t", "")] + _value_columns(args, "amp", complex_valued=True)
    table = Table(cols, meta={"analytic_method": args.method})
    e = amplitude_exact((0, args.j0), (args.n, args.j), args.t, args.tol) if ex else 0j
    a = 0j
    if an:
        if args.method == "contour":
            a = amplitude_contour(args.n, args.j, args.t, args.j0, ContourSpec(dps="auto"), tol=args.quad_tol)
        else:
            if args.j0 != 0:
                raise DomainError("the asymptotic method needs j0 = 0; use --method contour")
            a = stokes.amplitude_asymptotic(args.n, args.j, args.t)
    table.rows.append([args.n, args.j, args.j0, args.t] + _values(args, e, a, complex_valued=True))
    _check_residuals(args, table)
    return table


def cmd_return_prob(args) -> Table:
    ex, an = _want(args)
    times = np.arange(args.t_min, args.t_max + args.dt / 2, args.dt)
    cols = [("t", "")] + _value_columns(args, "prob") + [("ref_9_over_8pi_t", ""), ("ref_2_over_9pi_t", "")]
    table = Table(cols)
    exact = {}
    if ex:
        psi = WaveState.point(light_cone_truncation(times[-1]), (0, 0))
        for t, st in evolve_times(psi, times, args.tol):
            exact[t] = abs(st[(0, 0)]) ** 2
    for t in times:
        e = exact.get(t, 0.0)
        a = abs(asy.return_amplitude_asymptotic(t)[0]) ** 2 if an else 0.0
        table.rows.append([float(t)] + _values(args, e, a) + [9 / (8 * math.pi) / t, 2 / (9 * math.pi) / t])
    _check_residuals(args, table)
    return table


def _window_average(values: np.ndarray, centre: int, half: int) -> float:
    lo, hi = max(centre - half, 0), min(centre + half, len(values) - 1)
    return float(np.mean(values[lo:hi + 1]))


def cmd_profile_tooth(args) -> Table:
    ex, an = _want(args)
    us = np.arange(args.step, asy.U_C - args.step / 2, args.step)
    cols = [("u", "j/t")] + _value_columns(args, "t_prob")
    if an and args.n == 0:
        cols += [("d_minus", ""), ("d_plus", "")]
    table = Table(cols, meta={"t": args.t, "n": args.n, "window": args.window})
    line = None
    if ex:
        st = evolve(WaveState.point(truncation_for(args.t), (0, 0)), args.t, args.tol)
        line = args.t * np.abs(st.amp[st.trunc.L + args.n, :]) ** 2
    for u in us:
        e = _window_average(line, int(round(u * args.t)), args.window) if ex else 0.0
        a = asy.coarse_profile_tooth(u, args.n) if an else 0.0
        row = [float(u)] + _values(args, e, a)
        if an and args.n == 0:
            row += list(asy.tooth_bounds(u))
        table.rows.append(row)
    _check_residuals(args, table)
    return table


def cmd_profile_spine(args) -> Table:
    ex, an = _want(args)
    vs = np.arange(args.step, asy.V_C - args.step / 2, args.step)
    cols = [("v", "n/t")] + _value_columns(args, "t_prob")
    table = Table(cols, meta={"t": args.t, "j": args.j, "window": args.window, "direction": "n > 0"})
    line = None
    if ex:
        st = evolve(WaveState.point(truncation_for(args.t), (0, 0)), args.t, args.tol)
        L = st.trunc.L
        line = args.t * np.abs(st.amp[L:, args.j]) ** 2  # n = 0, 1, 2, ...
    for v in vs:
        e = _window_average(line, int(round(v * args.t)), args.window) if ex else 0.0
        a = asy.coarse_profile_spine(v, args.j) if an else 0.0
        table.rows.append([float(v)] + _values(args, e, a))
    _check_residuals(args, table)
    return table


def cmd_escape(args) -> Table:
    ex, an = _want(args)
    table = Table([("quantity", "")] + _value_columns(args, "probability"), meta={"j0": args.j0})
    e_teeth = e_spine = 0.0
    if ex:
        st = evolve(WaveState.point(truncation_for(args.t, args.margin + args.j0), (0, args.j0)), args.t, args.tol)
        L = st.trunc.L
        n = np.abs(np.arange(-L, L + 1))[:, None]
        j = np.arange(st.trunc.M + 1)[None, :]
        prob = np.abs(st.amp) ** 2
        # finite-t split: sites above the diagonal j = |n| count as escaped into the teeth
        e_teeth, e_spine = float(prob[j > n].sum()), float(prob[j <= n].sum())
        table.meta["t"] = args.t
    a_teeth = escape.prob_teeth_total_j0(args.j0) if an else 0.0
    a_spine = escape.prob_spine_total_j0(args.j0) if an else 0.0
    table.rows += [["P_Teeth"] + _values(args, e_teeth, a_teeth),
                   ["P_Spine"] + _values(args, e_spine, a_spine),
                   ["sum"] + _values(args, e_teeth + e_spine, a_teeth + a_spine)]
    for flag, total, label in ((ex, e_teeth + e_spine, "exact"), (an, a_teeth + a_spine, "analytic")):
        if flag and abs(total - 1) > args.sum_tol:
            table.failures.append(f"{label} P_Teeth + P_Spine = {total:.12f} differs from 1 by more than {args.sum_tol:g}")
    _check_residuals(args, table)
    return table


def cmd_saddles(args) -> Table:
    """Saddle table; with --t the analytic engine adds each saddle's amplitude term.

    The exact engine is the oracle amplitude at the nearest site, so the
    residual column (relative, repeated on each row) compares it with the
    relevant-saddle sum.
    """
    ex, an = _want(args)
    ss = stokes.relevant_saddles(args.u, args.v)
    labels = {}
    if args.u > 0 or args.v > 0:
        for k, w in enumerate(stokes.allowed_saddles(args.u, args.v)):
            labels[int(np.argmin(np.abs(ss.roots - w)))] = f"w{k + 1}"
    cols = [("w_re", ""), ("w_im", ""), ("W_re", ""), ("W_im", ""), ("W2_abs", ""),
            ("multiplicity", ""), ("relevant", ""), ("label", "")]
    table = Table(cols, meta={"u": args.u, "v": args.v})
    terms = np.full(len(ss.roots), np.nan, dtype=complex)
    residual = math.nan
    if args.t is not None:
        n, j = int(round(args.v * args.t)), int(round(args.u * args.t))
        table.meta.update({"t": args.t, "site_n": n, "site_j": j})
        if ex:
            e = amplitude_exact((0, 0), (n, j), args.t, args.tol)
            table.meta.update({"amp_exact_re": e.real, "amp_exact_im": e.imag})
        if an:
            site_ss, terms = stokes.saddle_contributions(n, j, args.t)
            # the site rounds (u, v); match its saddles back to the requested ones
            terms = np.array([terms[int(np.argmin(np.abs(site_ss.roots - w)))] for w in ss.roots])
            a = complex(terms.sum())
            table.meta.update({"amp_analytic_re": a.real, "amp_analytic_im": a.imag})
        if ex and an:
            residual = abs(a - e) / abs(e)
    if an:
        table.columns += [("term_re", ""), ("term_im", "")]
    if ex and an:
        table.columns.append(("residual", ""))
    for k, w in enumerate(ss.roots):
        row = [w.real, w.imag, ss.W[k].real, ss.W[k].imag, abs(ss.W2[k]),
               int(ss.multiplicity[k]), bool(ss.relevant[k]), labels.get(k, "")]
        if an:
            row += [terms[k].real, terms[k].imag]
        if ex and an:
            row.append(residual)
        table.rows.append(row)
    _check_residuals(args, table)
    return table


def cmd_stokes_atlas(args) -> Table:
    ex, an = _want(args)
    grid = np.arange(1, args.grid + 1)
    us, vs = args.u_max * grid / args.grid, args.v_max * grid / args.grid
    cols = [("u", "j/t"), ("v", "n/t"), ("region", ""), ("subregion", "")] + _value_columns(args, "decay_rate", "1/t")
    table = Table(cols)
    state = None
    if ex:
        trunc = truncation_for(args.t)
        trunc = Truncation(max(trunc.L, int(args.v_max * args.t) + 2), max(trunc.M, int(args.u_max * args.t) + 2))
        state = evolve(WaveState.point(trunc, (0, 0)), args.t, args.tol)
        table.meta["t"] = args.t
    for u, v, major, sub in stokes.region_atlas(us, vs):
        row = [u, v, major, sub]
        if ex or an:
            e = a = math.nan
            if ex:
                amp = abs(state[(int(round(v * args.t)), int(round(u * args.t)))])
                e = math.log(amp) / args.t if amp > args.floor else math.nan
            if an:
                try:
                    ss = stokes.relevant_saddles(u, v)
                    a = float(max(ss.W[ss.relevant].real))
                except CombWalkError:
                    a = math.nan
            row += _values(args, e, a)
        table.rows.append(row)
    if args.stokes_point:
        table.meta["stokes_point_u"] = stokes.stokes_point_on_u_axis()
    _check_residuals(args, table)
    return table


def cmd_completeness(args) -> Table:
    ex, an = _want(args)
    k = args.max_coord
    verts = [(n, j) for n in range(-k, k + 1) for j in range(0, k + 1)]
    cols = [("n1", ""), ("j1", ""), ("n2", ""), ("j2", "")] + _value_columns(args, "overlap", complex_valued=True)
    table = Table(cols)
    gram = None
    if ex:
        quad = spectral.QuadratureSpec(n_theta=args.n_theta, alpha_density=args.alpha_density)
        gram = spectral.completeness_matrix(verts, quad) + np.eye(len(verts))
        defect = float(np.abs(gram - np.eye(len(verts))).max())
        table.meta["max_defect"] = defect
        if defect > args.max_defect:
            table.failures.append(f"completeness defect {defect:.3e} exceeds {args.max_defect:g}")
    for a_idx, va in enumerate(verts):
        for b_idx, vb in enumerate(verts):
            if b_idx < a_idx:
                continue
            e = complex(gram[a_idx, b_idx]) if ex else 0j
            d = complex(1.0 if a_idx == b_idx else 0.0)
            table.rows.append([va[0], va[1], vb[0], vb[1]] + _values(args, e, d, complex_valued=True))
    return table


# ---------------------------------------------------------------- parser

COMMANDS = {
    "evolve": cmd_evolve,
    "amplitude": cmd_amplitude,
    "return-prob": cmd_return_prob,
    "profile-tooth": cmd_profile_tooth,
    "profile-spine": cmd_profile_spine,
    "escape": cmd_escape,
    "saddles": cmd_saddles,
    "stokes-atlas": cmd_stokes_atlas,
    "completeness-check": cmd_completeness,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--engine", choices=("exact", "analytic", "both"), default="both")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="output file (default: standard output)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="evolution tolerance (default 1e-10)")
    common.add_argument("--quad-tol", type=float, default=QUAD_TOL, help="quadrature tolerance (default 1e-9)")
    common.add_argument("--max-residual", type=float, default=None,
                        help="with --engine both, exit 2 when a residual exceeds this")

    p = _Parser(prog="combwalk", description="Quantum walk on the comb: exact and asymptotic results.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("evolve", parents=[common], help="amplitudes A_t(0,0;n,j) on a block of sites")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--n-max", type=int, default=3)
    s.add_argument("--j-max", type=int, default=3)

    s = sub.add_parser("amplitude", parents=[common], help="a single amplitude A_t(0,j0;n,j)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--j0", type=int, default=0)
    s.add_argument("--method", choices=("asymptotic", "contour"), default="asymptotic",
                   help="analytic engine: large-t asymptotics or contour quadrature")

    s = sub.add_parser("return-prob", parents=[common], help="return probability |A_t(0,0;0,0)|^2 over time")
    s.add_argument("--t-min", type=float, default=10.0)
    s.add_argument("--t-max", type=float, default=100.0)
    s.add_argument("--dt", type=float, default=10.0)

    s = sub.add_parser("profile-tooth", parents=[common], help="coarse-grained t|A|^2 along tooth n")
    s.add_argument("--t", type=float, default=100.0)
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--step", type=float, default=0.05)
    s.add_argument("--window", type=int, default=5, help="half-width of the site average")

    s = sub.add_parser("profile-spine", parents=[common], help="coarse-grained t|A|^2 along the spine, n > 0")
    s.add_argument("--t", type=float, default=100.0)
    s.add_argument("--j", type=int, default=0)
    s.add_argument("--step", type=float, default=0.05)
    s.add_argument("--window", type=int, default=5, help="half-width of the site average")

    s = sub.add_parser("escape", parents=[common], help="escape probabilities into teeth and along the spine")
    s.add_argument("--j0", type=int, default=0)
    s.add_argument("--t", type=float, default=60.0, help="time of the finite-t split (exact engine)")
    s.add_argument("--margin", type=int, default=40)
    s.add_argument("--sum-tol", type=float, default=1e-5)

    s = sub.add_parser("saddles", parents=[common], help="saddle points of W(w; u, v) and their relevance")
    s.add_argument("--u", type=float, required=True)
    s.add_argument("--v", type=float, required=True)
    s.add_argument("--t", type=float, default=None, help="also compare the saddle sum with the oracle at this t")

    s = sub.add_parser("stokes-atlas", parents=[common], help="region labels over the (u, v) quadrant")
    s.add_argument("--grid", type=int, default=24)
    s.add_argument("--u-max", type=float, default=3.0)
    s.add_argument("--v-max", type=float, default=3.0)
    s.add_argument("--t", type=float, default=40.0, help="time of the exact decay-rate estimate")
    s.add_argument("--floor", type=float, default=1e-12, help="amplitudes below this give no exact rate")
    s.add_argument("--stokes-point", action="store_true", help="also locate the Stokes point on v = 0")

    s = sub.add_parser("completeness-check", parents=[common], help="spectral resolution of the identity")
    s.add_argument("--max-coord", type=int, default=3)
    s.add_argument("--n-theta", type=int, default=200)
    s.add_argument("--alpha-density", type=float, default=40.0)
    s.add_argument("--max-defect", type=float, default=1e-6)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        table = COMMANDS[args.command](args)
    except (CombWalkError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(args.command, table, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for msg in table.failures:
        print(f"validation failed: {msg}", file=sys.stderr)
    return EXIT_VALIDATION if table.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
