"""Figure rendering for the report path.

Every figure goes to a file next to the delimited output; nothing is shown
interactively.  Figures are a convenience view of the numbers already in the
JSON/CSV reports and are not part of the byte-determinism contract.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .arrays import DiagnoseResult, VerdictKind  # noqa: E402
from .measures import Space  # noqa: E402
from .verify import VerificationReport  # noqa: E402


def save_verify_figure(report: VerificationReport, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(report.rows, report.discrepancies, "o-", label="$D_n$")
    ax.axhline(report.tolerance, color="crimson", ls="--", lw=1, label="tolerance")
    ax.set_xscale("log")
    positive = [d for d in report.discrepancies if d > 0]
    if positive and max(report.discrepancies) / max(min(positive), 1e-300) > 50:
        ax.set_yscale("symlog", linthresh=max(min(positive) * 0.5, 1e-16))
    ax.set_xlabel("row size $n$")
    ax.set_ylabel("sup discrepancy")
    ax.set_title(f"{report.scenario}: {'pass' if report.passed else 'fail'}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def save_diagnose_figures(result: DiagnoseResult, prefix: str) -> list[str]:
    paths = []
    ns = [r.n for r in result.rows]

    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(ns, [r.gamma_n for r in result.rows], "o-", label=r"$\gamma_n$")
    ax.plot(ns, [r.sigma_n.total_mass for r in result.rows], "s-", label=r"$\sigma_n$ mass")
    if result.rows[0].haar_stat is not None:
        ax.plot(ns, [r.haar_stat for r in result.rows], "^-", label="haar statistic")
    ax.set_xscale("log")
    ax.set_xlabel("row size $n$")
    ax.set_title(f"diagnostics (verdict: {result.verdict.kind.value})")
    ax.legend()
    fig.tight_layout()
    path = f"{prefix}_trends.png"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    paths.append(path)

    last = result.rows[-1].sigma_n
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    if last.space is Space.COMPACTIFIED:
        xs = [t / (1.0 + t) for t, _ in last.atoms]
        ws = [w for _, w in last.atoms]
        if last.mass_at_zero:
            xs.append(0.0)
            ws.append(last.mass_at_zero)
        if last.mass_at_infinity:
            xs.append(1.0)
            ws.append(last.mass_at_infinity)
        ax.set_xlabel("chart coordinate $t/(1+t)$")
    else:
        xs = [t for t, _ in last.atoms]
        ws = [w for _, w in last.atoms]
        ax.set_xlim(-math.pi, math.pi)
        ax.set_xlabel("angle")
    if xs:
        ax.stem(xs, ws)
    ax.set_ylabel("mass")
    ax.set_title(f"final-row $\\sigma_n$ (n = {ns[-1]})")
    fig.tight_layout()
    path = f"{prefix}_sigma.png"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    paths.append(path)
    return paths


def save_moment_comparison_figure(
    orders, estimates, stderr, predicted, path: str, title: str = "moments"
) -> str:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    est = [abs(e) for e in estimates]
    pred = [abs(p) for p in predicted]
    ax.errorbar(orders, est, yerr=[3 * s for s in stderr], fmt="o", capsize=4, label="Monte Carlo")
    ax.plot(orders, pred, "x--", label="series prediction")
    ax.set_xlabel("moment order")
    ax.set_ylabel("|moment|")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
