"""Command-line front end.

Subcommands: convolve, idlaw, diagnose, verify, mc.  Inputs are JSON files
(measures, id-law parameters, array configurations); reports are emitted as
schema-versioned JSON plus a CSV table, with matplotlib figures rendered next
to the output files unless --no-figures is given.  Identical inputs and seeds
produce byte-identical JSON/CSV.

Exit codes: 0 success, 1 numerical or criterion failure, 2 input validation
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .arrays import ArraySpec, DiagnoseConfig, diagnose, load_array_config
from .errors import InputError, NumericalError
from .freeconv import boxtimes_moments, nc_moment_oracle
from .infdiv import (
    ClassicalIdParams,
    FreeIdCircParams,
    FreeIdPosParams,
    classical_phi_idlaw,
    free_params_from_json,
    classical_params_from_json,
    idlaw_moments_circ,
    idlaw_s_pos,
    u_series,
)
from .measures import (
    GridSpec,
    Space,
    classical_multconv,
    finite_measure_to_json,
    measure_from_json,
    measure_to_json,
)
from .montecarlo import MCConfig, rmt_oracle_circ, rmt_oracle_pos
from .verify import corollary34_check, verify_circ, verify_haar, verify_pos

SCHEMA_VERSION = 1


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FREEMULT_THREADS", "1")))
    except ValueError:
        return 1


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc


def _emit(report: dict, args, csv_rows=None, csv_header=None) -> list[str]:
    """Write the JSON report (stdout or file), the CSV table, and figures."""
    report = {"schema_version": SCHEMA_VERSION, **report}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    written = []
    if args.output:
        out = Path(args.output)
        out.write_text(text, encoding="utf-8")
        written.append(str(out))
        if csv_rows is not None:
            csv_path = out.with_suffix(".csv")
            with open(csv_path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(csv_header)
                writer.writerows(csv_rows)
            written.append(str(csv_path))
    else:
        sys.stdout.write(text)
    return written


def _figure_prefix(args) -> str | None:
    if not args.output or args.no_figures:
        return None
    return str(Path(args.output).with_suffix(""))


def _complexes(values) -> list[list[float]]:
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


# -- convolve ---------------------------------------------------------------------


def cmd_convolve(args) -> int:
    inputs = args.input or []
    if len(inputs) != 2:
        raise InputError("convolve needs exactly two measure files (-i twice)")
    mu = measure_from_json(_load_json(inputs[0]))
    nu = measure_from_json(_load_json(inputs[1]))
    order = args.order or 6
    box = boxtimes_moments(mu, nu, order)
    report = {
        "command": "convolve",
        "order": order,
        "boxtimes_moments": _complexes(box.values),
    }
    oracle = None
    if order <= 8:
        oracle = nc_moment_oracle(mu, nu, order)
        report["oracle_moments"] = _complexes(oracle.values)
        report["max_route_deviation"] = float(
            max(abs(a - b) for a, b in zip(box.values, oracle.values))
        )
    classical = classical_multconv(mu, nu)
    report["classical_product"] = measure_to_json(classical)
    csv_rows = [
        [k + 1, np.real(v), np.imag(v)] + (
            [np.real(oracle.values[k]), np.imag(oracle.values[k])] if oracle else []
        )
        for k, v in enumerate(box.values)
    ]
    header = ["order", "boxtimes_re", "boxtimes_im"] + (
        ["oracle_re", "oracle_im"] if oracle else []
    )
    written = _emit(report, args, csv_rows, header)
    prefix = _figure_prefix(args)
    if prefix and oracle:
        from .figures import save_moment_comparison_figure

        zeros = [0.0] * order
        save_moment_comparison_figure(
            list(range(1, order + 1)),
            box.values,
            zeros,
            oracle.values,
            f"{prefix}_moments.png",
            title="free product moments: series route vs partition oracle",
        )
    return 0


# -- idlaw ------------------------------------------------------------------------


def cmd_idlaw(args) -> int:
    inputs = args.input or []
    if len(inputs) != 1:
        raise InputError("idlaw needs exactly one parameter file")
    data = _load_json(inputs[0])
    order = args.order or 8
    if "lambda" in data:
        params = classical_params_from_json(data)
        panel = np.linspace(-3.0, 3.0, 25)
        values = [classical_phi_idlaw(params, s) for s in panel]
        report = {
            "command": "idlaw",
            "kind": "classical",
            "lambda": params.lam,
            "rho": finite_measure_to_json(params.rho),
            "s_panel": [float(s) for s in panel],
            "phi": _complexes(values),
        }
        csv_rows = [[float(s), v.real, v.imag] for s, v in zip(panel, values)]
        written_header = ["s", "phi_re", "phi_im"]
        curve = (panel, [abs(v) for v in values], "|Phi(s)|", "s")
    else:
        params = free_params_from_json(data)
        if isinstance(params, FreeIdCircParams):
            u = u_series(params, order)
            moments = idlaw_moments_circ(params, order)
            report = {
                "command": "idlaw",
                "kind": "free-circle",
                "gamma": params.gamma,
                "sigma": finite_measure_to_json(params.sigma),
                "u_coefficients": _complexes(u.coeffs),
                "moments": _complexes(moments.values),
            }
            csv_rows = [[k + 1, m.real, m.imag] for k, m in enumerate(moments.values)]
            written_header = ["order", "moment_re", "moment_im"]
            curve = (
                list(range(1, order + 1)),
                [abs(m) for m in moments.values],
                "|m_k|",
                "order",
            )
        else:
            grid = GridSpec.default_half_line(args.grid or 16)
            svals = idlaw_s_pos(params, grid)
            report = {
                "command": "idlaw",
                "kind": "free-positive",
                "gamma": params.gamma,
                "sigma": finite_measure_to_json(params.sigma),
                "w_grid": [float(w) for w in grid.points],
                "s_values": [float(v) for v in svals],
            }
            csv_rows = [[float(w), float(v)] for w, v in zip(grid.points, svals)]
            written_header = ["w", "S"]
            curve = (list(grid.points), svals, "S(w)", "w")
    _emit(report, args, csv_rows, written_header)
    prefix = _figure_prefix(args)
    if prefix:
        import matplotlib.pyplot as plt

        xs, ys, ylabel, xlabel = curve
        fig, ax = plt.subplots(figsize=(5.5, 4.0))
        ax.plot(xs, ys, "o-")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title("infinitely divisible law")
        fig.tight_layout()
        fig.savefig(f"{prefix}_idlaw.png", dpi=130)
        plt.close(fig)
    return 0


# -- diagnose -----------------------------------------------------------------------


def _schedule(args, default) -> list[int]:
    if args.rows:
        return [int(round(float(tok))) for tok in args.rows.split(",") if tok.strip()]
    return default


def cmd_diagnose(args) -> int:
    inputs = args.input or []
    if len(inputs) != 1:
        raise InputError("diagnose needs exactly one array configuration file")
    spec, schedule = load_array_config(_load_json(inputs[0]))
    if args.tau:
        spec = ArraySpec(spec.space, spec.family, spec.params, args.tau,
                         spec.scaling_value, spec.inline_rows)
    ns = _schedule(args, schedule)
    config = DiagnoseConfig(cauchy_tol=args.tol) if args.tol else DiagnoseConfig()
    result = diagnose(spec, ns, config)
    rows_out = []
    csv_rows = []
    for r in result.rows:
        rows_out.append(
            {
                "n": r.n,
                "gamma_n": r.gamma_n,
                "sigma_n": finite_measure_to_json(r.sigma_n),
                "haar_stat": r.haar_stat,
                "infinitesimality": r.infinitesimality,
            }
        )
        csv_rows.append(
            [r.n, r.gamma_n, r.sigma_n.total_mass,
             "" if r.haar_stat is None else r.haar_stat, r.infinitesimality]
        )
    report = {
        "command": "diagnose",
        "verdict": result.verdict.kind.value,
        "gamma_hat": result.verdict.gamma_hat,
        "sigma_hat": (
            finite_measure_to_json(result.verdict.sigma_hat)
            if result.verdict.sigma_hat is not None
            else None
        ),
        "rows": rows_out,
    }
    _emit(report, args, csv_rows, ["n", "gamma_n", "sigma_mass", "haar_stat", "infinitesimality"])
    prefix = _figure_prefix(args)
    if prefix:
        from .figures import save_diagnose_figures

        save_diagnose_figures(result, prefix)
    return 0


# -- verify -------------------------------------------------------------------------


def cmd_verify(args) -> int:
    inputs = args.input or []
    if len(inputs) != 1:
        raise InputError("verify needs exactly one array configuration file")
    spec, schedule = load_array_config(_load_json(inputs[0]))
    if args.tau:
        spec = ArraySpec(spec.space, spec.family, spec.params, args.tau,
                         spec.scaling_value, spec.inline_rows)
    ns = _schedule(args, schedule)
    check = args.check
    if check == "auto":
        check = "pos" if spec.space is Space.POSITIVE else "circ"
    tol = args.tol if args.tol is not None else (5e-2 if check == "cor34" else 1e-2)
    if check == "pos":
        grid = GridSpec.default_half_line(args.grid or 16)
        report = verify_pos(spec, ns, grid, tol)
    elif check == "circ":
        report = verify_circ(spec, ns, args.order or 8, tol)
    elif check == "haar":
        report = verify_haar(spec, ns)
    elif check == "cor34":
        report = corollary34_check(spec, ns, tol=tol)
    else:
        raise InputError(f"unknown check {check!r}")
    payload = {"command": "verify", "check": check, **report.to_json_dict()}
    haar_stats = report.extras.get("haar_statistics", [""] * len(report.rows))
    m1s = report.extras.get("row_first_moment_abs", [""] * len(report.rows))
    csv_rows = [
        [n, d, h, m, report.monotone, report.passed]
        for n, d, h, m in zip(report.rows, report.discrepancies, haar_stats, m1s)
    ]
    _emit(payload, args, csv_rows, ["n", "D_n", "haar_stat", "m1_abs", "monotone", "passed"])
    prefix = _figure_prefix(args)
    if prefix:
        from .figures import save_verify_figure

        save_verify_figure(report, f"{prefix}_decay.png")
    if not report.passed:
        print(f"verify: criterion failed (final D = {report.final_discrepancy:g}, "
              f"tol = {report.tolerance:g})", file=sys.stderr)
        return 1
    return 0


# -- mc -----------------------------------------------------------------------------


def cmd_mc(args) -> int:
    inputs = args.input or []
    if len(inputs) != 2:
        raise InputError("mc needs exactly two measure files (-i twice)")
    if args.seed is None:
        raise InputError("mc requires --seed for reproducibility")
    mu = measure_from_json(_load_json(inputs[0]))
    nu = measure_from_json(_load_json(inputs[1]))
    order = args.order or 4
    cfg = MCConfig(dim=args.dim or 512, samples=args.samples or 200,
                   seed=args.seed, space=mu.space)
    workers = _threads()
    if mu.space is Space.POSITIVE:
        result = rmt_oracle_pos(mu, nu, cfg, order, workers=workers)
    else:
        result = rmt_oracle_circ(mu, nu, cfg, order, workers=workers)
    predicted = boxtimes_moments(mu, nu, order)
    deltas = [abs(e - p) for e, p in zip(result.estimates, predicted.values)]
    report = {
        "command": "mc",
        "dim": cfg.dim,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "order": order,
        "estimates": _complexes(result.estimates),
        "stderr": [float(s) for s in result.stderr],
        "predicted": _complexes(predicted.values),
        "abs_deviation": [float(d) for d in deltas],
    }
    csv_rows = [
        [k + 1, np.real(e), np.imag(e), s, np.real(p), np.imag(p), d]
        for k, (e, s, p, d) in enumerate(
            zip(result.estimates, result.stderr, predicted.values, deltas)
        )
    ]
    _emit(report, args, csv_rows,
          ["order", "mc_re", "mc_im", "stderr", "predicted_re", "predicted_im", "abs_dev"])
    prefix = _figure_prefix(args)
    if prefix:
        from .figures import save_moment_comparison_figure

        save_moment_comparison_figure(
            list(range(1, order + 1)),
            result.estimates,
            result.stderr,
            predicted.values,
            f"{prefix}_mc.png",
            title=f"Monte Carlo vs series (d={cfg.dim}, {cfg.samples} samples)",
        )
    return 0


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freemult",
        description="Free multiplicative convolution calculus and limit diagnostics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-i", "--input", action="append", help="input JSON file (repeatable)")
        p.add_argument("-o", "--output", help="output JSON report path (CSV/figures alongside)")
        p.add_argument("--rows", help="row schedule, e.g. '1e2,1e3,1e4'")
        p.add_argument("--grid", type=int, help="number of half-line grid points")
        p.add_argument("--order", type=int, help="series/moment truncation order")
        p.add_argument("--tol", type=float, help="pass tolerance")
        p.add_argument("--tau", type=float, help="centering window parameter")
        p.add_argument("--seed", type=int, help="Monte Carlo seed")
        p.add_argument("--dim", type=int, help="Monte Carlo matrix dimension")
        p.add_argument("--samples", type=int, help="Monte Carlo sample count")
        p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    handlers = {
        "convolve": (cmd_convolve, "free and classical products of two measures"),
        "idlaw": (cmd_idlaw, "evaluate an infinitely divisible law from parameters"),
        "diagnose": (cmd_diagnose, "triangular-array row diagnostics and verdict"),
        "verify": (cmd_verify, "limit-theorem discrepancy checks"),
        "mc": (cmd_mc, "random-matrix Monte Carlo check of the free product"),
    }
    for name, (fn, help_text) in handlers.items():
        p = sub.add_parser(name, help=help_text)
        common(p)
        if name == "verify":
            p.add_argument("--check", default="auto",
                           choices=["auto", "pos", "circ", "haar", "cor34"],
                           help="which theorem to check (default: by space)")
        p.set_defaults(handler=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
