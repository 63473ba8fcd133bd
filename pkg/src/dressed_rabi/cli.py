"""Command-line entry point: ``dressed-rabi <command> [options]``.

Exit codes: 0 success, 1 computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from dressed_rabi import dressed, plotting, resonance
from dressed_rabi.core import ModelParams, params_with_g, read_config
from dressed_rabi.hamiltonians import SpinFockBasis, block_spectrum, h0_blocks, operator_matrix, spectrum_of
from dressed_rabi.fock import write_matrix

SPECTRUM_MAX_N_MAX = 5000


class UsageError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:count`` -> evenly spaced grid, or a comma separated list."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            count = int(count)
            if count < 1:
                raise ValueError
            grid = np.linspace(float(lo), float(hi), count)
        else:
            grid = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"bad grid {text!r}; expected lo:hi:count") from None
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise UsageError(f"grid {text!r} must be strictly ascending")
    return grid


def parse_int_list(text: str) -> list[int]:
    try:
        out = []
        for part in text.split(","):
            if "-" in part.strip()[1:]:
                a, b = part.split("-")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
        return out
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


def _number(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dressed-rabi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", type=Path, help="key = value file with delta_e, u, n, g")
        p.add_argument("-o", "--output", type=Path, help="CSV output path (default: stdout)")
        p.add_argument("--plot", action="store_true", help="also render a PNG and write a plot script")

    def physical(p, with_u=True):
        p.add_argument("--delta-e", type=_number, help="two-level splitting in units of hbar omega0")
        p.add_argument("--n", type=_number, help="photon number (scientific notation accepted)")
        if with_u:
            p.add_argument("--u", type=_number, help="coupling U in units of hbar omega0")
        p.add_argument("--g", dest="g_value", type=_number, help="dimensionless coupling U sqrt(n)/delta_e")

    p = sub.add_parser("dressed", help="dressed two-level energy on a g grid")
    common(p)
    p.add_argument("--delta-e", type=_number)
    p.add_argument("--n", type=_number)
    p.add_argument("--g", dest="grid", default="0:1:201", help="grid lo:hi:count (default 0:1:201)")
    p.add_argument("--method", default="auto", choices=("auto",) + dressed.CURVE_METHODS)
    p.add_argument("--k", type=int, help="resonance index for the ahmad_bullough expansion")
    p.add_argument("--allow-large-n", action="store_true",
                   help="let the quadrature method run above n = 2000")

    p = sub.add_parser("spectrum", help="eigenvalues of the truncated Hamiltonian")
    common(p)
    physical(p)
    p.add_argument("--n-max", type=int, required=False)
    p.add_argument("--operator", default="full", choices=("full", "h0", "rotated", "v", "w"))
    p.add_argument("--export-matrix", type=Path, help="also dump the matrix as plain text")

    p = sub.add_parser("resonance", help="couplings solving Delta E(g) = (2k+1) hbar omega0")
    common(p)
    p.add_argument("--delta-e", type=_number)
    p.add_argument("--n", type=_number)
    p.add_argument("--k", default=None, help="resonance index or list, e.g. 4,5,6 or 1-11")
    p.add_argument("--method", default="wkb", choices=dressed.CURVE_METHODS)
    p.add_argument("--scan", action="store_true", help="append exact-diagonalization anticrossings")
    p.add_argument("--n-max", type=int, help="truncation for --scan (default 4n + 136)")
    p.add_argument("--u-range", help="U scan grid lo:hi:count (default around the variational root)")
    p.add_argument("--allow-large-n", action="store_true")

    p = sub.add_parser("compare", help="resonance couplings from several methods side by side")
    common(p)
    p.add_argument("--delta-e", type=_number)
    p.add_argument("--n", type=_number)
    p.add_argument("--k", default=None)
    p.add_argument("--methods", default="wkb,series,ostrovsky,ahmad_bullough")
    p.add_argument("--text", action="store_true", help="print an aligned table instead of CSV")
    p.add_argument("--allow-large-n", action="store_true")

    p = sub.add_parser("figure1", help="Delta E(g) at delta_e = 11, n = 1e8: WKB and small-g series")
    common(p)
    p.add_argument("--delta-e", type=_number, default=None)
    p.add_argument("--n", type=_number, default=None)
    p.add_argument("--g", dest="grid", default="0:1:201")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG")
    return parser


def _merged(args, keys=("delta_e", "u", "n", "g")):
    """Config-file values overridden by explicit flags."""
    values = {}
    if getattr(args, "config", None) is not None:
        try:
            values.update(read_config(args.config))
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    flag_names = {"delta_e": "delta_e", "u": "u", "n": "n", "g": "g_value"}
    explicit = {k: getattr(args, flag_names[k], None) for k in keys}
    explicit = {k: v for k, v in explicit.items() if v is not None}
    if "u" in explicit and "g" in explicit:
        raise UsageError("specify either --u or --g, not both")
    if "u" in explicit:
        values.pop("g", None)
    if "g" in explicit:
        values.pop("u", None)
    values.update(explicit)
    return values


def _require(values, *keys):
    missing = [k for k in keys if k not in values]
    if missing:
        raise UsageError("missing required parameter(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _stamp(command, config):
    return "dressed-rabi " + command + " " + json.dumps(config, sort_keys=True)


def _emit(text, args):
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)


def _require_output_for_plot(args):
    if args.plot and args.output is None:
        raise UsageError("--plot needs --output so the figure has somewhere to go")


def _is_fock(n):
    return float(n) >= 0 and float(n).is_integer()


def _dressed_method(values, method, allow_large):
    n = values["n"]
    if method == "auto":
        method = "quadrature" if _is_fock(n) and n <= dressed.QUADRATURE_MAX_N else "wkb"
    if method == "quadrature" and n > dressed.QUADRATURE_MAX_N and not allow_large:
        raise UsageError("n too large for quadrature; use wkb")
    if method in ("quadrature", "operator") and not _is_fock(n):
        raise UsageError(f"{method} needs an integer photon number, got n={n:g}")
    if method == "wkb" and n <= 0:
        raise UsageError("wkb needs n > 0")
    return method


def run_dressed(args) -> int:
    values = _merged(args, ("delta_e", "n"))
    _require(values, "delta_e", "n")
    _require_output_for_plot(args)
    if values["delta_e"] <= 0:
        raise UsageError("delta_e must be positive")
    grid = parse_grid(args.grid)
    method = _dressed_method(values, args.method, args.allow_large_n)
    if method == "ahmad_bullough" and (args.k is None or args.k < 1):
        raise UsageError("ahmad_bullough needs --k >= 1")
    config = {"delta_e": values["delta_e"], "n": values["n"], "method": method, "k": args.k,
              "grid": args.grid, "allow_large_n": args.allow_large_n}
    n = int(values["n"]) if method in ("quadrature", "operator") else values["n"]
    curve = dressed.dressed_curve(values["delta_e"], n, grid, method, args.k, args.allow_large_n)
    _emit(curve.to_csv(_stamp("dressed", config)), args)
    if args.plot:
        plotting.plot_dressed_curves([curve], args.output.with_suffix(".png"))
        plotting.write_plot_script(args.output, "g", "ratio", group="method")
    return 0


def run_figure1(args) -> int:
    values = _merged(args, ("delta_e", "n"))
    values.setdefault("delta_e", 11.0)
    values.setdefault("n", 1e8)
    grid = parse_grid(args.grid)
    config = {"delta_e": values["delta_e"], "n": values["n"], "grid": args.grid, "methods": ["wkb", "series"]}
    curves = [
        dressed.dressed_curve(values["delta_e"], values["n"], grid, "wkb"),
        dressed.dressed_curve(values["delta_e"], values["n"], grid, "series"),
    ]
    _emit(dressed.curves_to_csv(curves, _stamp("figure1", config)), args)
    if args.output is not None and not args.no_plot:
        plotting.plot_dressed_curves(curves, args.output.with_suffix(".png"))
        plotting.write_plot_script(args.output, "g", "ratio", group="method")
    return 0


def run_spectrum(args) -> int:
    values = _merged(args)
    _require(values, "delta_e")
    _require_output_for_plot(args)
    if args.n_max is None:
        raise UsageError("--n-max is required")
    if not 1 <= args.n_max <= SPECTRUM_MAX_N_MAX:
        raise UsageError(f"--n-max must be in [1, {SPECTRUM_MAX_N_MAX}]")
    try:
        if "g" in values:
            _require(values, "n")
            params = params_with_g(values["delta_e"], values["n"], values["g"])
        else:
            params = ModelParams(values["delta_e"], values.get("u", 0.0), values.get("n", 0.0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    config = {"delta_e": params.delta_e, "u": params.u, "n_max": args.n_max, "operator": args.operator}
    basis = SpinFockBasis(args.n_max)
    matrix = operator_matrix(args.operator, params, args.n_max)
    if args.operator == "h0":
        spec = block_spectrum(matrix, basis, h0_blocks(basis))
    else:
        spec = spectrum_of(matrix, basis)
    buf = io.StringIO()
    buf.write(f"# {_stamp('spectrum', config)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "eigenvalue", "dominant_n", "dominant_m", "parity"])
    for i, (e, lab) in enumerate(zip(spec.eigenvalues, spec.labels)):
        writer.writerow([i, repr(float(e)), lab.n, repr(lab.m), lab.parity])
    _emit(buf.getvalue(), args)
    if args.export_matrix is not None:
        write_matrix(args.export_matrix, matrix)
    if args.plot:
        plotting.plot_spectrum(spec.eigenvalues, [l.n for l in spec.labels], [l.m for l in spec.labels],
                               args.output.with_suffix(".png"), title=f"operator {args.operator}")
        plotting.write_plot_script(args.output, "dominant_n", "eigenvalue", group="dominant_m", fmt=".")
    return 0


def _k_list(args):
    if args.k is None:
        raise UsageError("--k is required")
    ks = parse_int_list(args.k)
    if any(k < 0 for k in ks):
        raise UsageError("k must be non-negative")
    return ks


def run_resonance(args) -> int:
    values = _merged(args, ("delta_e", "n"))
    _require(values, "delta_e", "n")
    _require_output_for_plot(args)
    ks = _k_list(args)
    method = _dressed_method(values, args.method, args.allow_large_n)
    n = int(values["n"]) if method in ("quadrature", "operator") else values["n"]
    report = resonance.resonance_report(values["delta_e"], n, ks, [method], args.allow_large_n)
    config = {"delta_e": values["delta_e"], "n": values["n"], "k": ks, "method": method, "scan": args.scan}
    header = ["k", "method", "g_star", "residual", "status"]
    scan_points = []
    if args.scan:
        if not _is_fock(values["n"]):
            raise UsageError("--scan needs an integer photon number")
        n_target = int(values["n"])
        n_max = args.n_max or 4 * n_target + 136
        config["n_max"] = n_max
        if args.u_range:
            grid = parse_grid(args.u_range)
            if grid.size < 3:
                raise UsageError("--u-range needs at least 3 points")
            interval, points = (grid[0], grid[-1]), grid.size
        else:
            solved = [r.g_star for r in report.rows if r.g_star]
            if not solved:
                raise UsageError("no feasible k to center the scan on; give --u-range")
            us = [g * values["delta_e"] / math.sqrt(n_target) for g in solved]
            interval, points = (0.5 * min(us), 1.5 * max(us)), 41
        config["u_range"] = [float(interval[0]), float(interval[1]), points]
        scan_points = resonance.anticrossing_scan(values["delta_e"], n_target, interval, points, n_max)
        header += ["g_star_exact", "u_star_exact", "gap_exact"]
    buf = io.StringIO()
    buf.write(f"# {_stamp('resonance', config)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in report.rows:
        if row.error:
            line = [row.k, row.method, "", "", "infeasible: " + row.error]
        else:
            line = [row.k, row.method, repr(float(row.g_star)), repr(float(row.residual)), "ok"]
        if args.scan:
            best = None
            if row.g_star and scan_points:
                best = min(scan_points, key=lambda p: abs(p.g_star(values["delta_e"], values["n"]) - row.g_star))
            if best is None:
                line += ["", "", ""]
            else:
                line += [repr(float(best.g_star(values["delta_e"], values["n"]))), repr(float(best.u_star)),
                         repr(float(best.gap))]
        writer.writerow(line)
    _emit(buf.getvalue(), args)
    if args.plot:
        plotting.plot_resonances(report, args.output.with_suffix(".png"))
        plotting.write_plot_script(args.output, "k", "g_star", group="method", fmt="o-")
    return 0 if any(r.error is None for r in report.rows) else 1


def run_compare(args) -> int:
    values = _merged(args, ("delta_e", "n"))
    _require(values, "delta_e", "n")
    _require_output_for_plot(args)
    ks = _k_list(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in dressed.CURVE_METHODS:
            raise UsageError(f"unknown method {m!r}")
    n = int(values["n"]) if _is_fock(values["n"]) else values["n"]
    report = resonance.resonance_report(values["delta_e"], n, ks, methods, args.allow_large_n)
    config = {"delta_e": values["delta_e"], "n": values["n"], "k": ks, "methods": methods}
    text = report.to_text() if args.text else report.to_csv(_stamp("compare", config))
    _emit(text, args)
    if args.plot:
        plotting.plot_resonances(report, args.output.with_suffix(".png"))
    return 0 if any(r.error is None for r in report.rows) else 1


COMMANDS = {
    "dressed": run_dressed,
    "spectrum": run_spectrum,
    "resonance": run_resonance,
    "compare": run_compare,
    "figure1": run_figure1,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dressed-rabi {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"dressed-rabi {args.command}: computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
