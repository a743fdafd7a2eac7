"""Figure rendering for experiment reports.

This is a consumer of the report tables (the same rows the CSV files carry):
experiments never depend on it, verdicts never come from it.  Each renderer
writes PNG files next to the delimited output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ExperimentReport

_FIGSIZE = (6.0, 4.0)


def _save(fig, out_dir: Path, name: str) -> None:
    fig.tight_layout()
    fig.savefig(out_dir / f"{name}.png", dpi=150)
    plt.close(fig)


def _plot_data_convergence(report: ExperimentReport, out_dir: Path) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name, rows in sorted(report.tables.items()):
        if not (name.startswith("lp_") or name.startswith("hs_")):
            continue
        eps = [r["epsilon"] for r in rows if r.get("distance") is not None]
        dist = [r["distance"] for r in rows if r.get("distance") is not None]
        if eps:
            ax.loglog(eps, dist, "o-", label=name)
        n_div = sum(1 for r in rows if r.get("status") == "divergent")
        if n_div:
            ax.plot([], [], "x", label=f"{name}: {n_div} divergent rows")
    ax.set_xlabel("eps")
    ax.set_ylabel("distance to singular data")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    ax.invert_xaxis()
    _save(fig, out_dir, "data_convergence")

    rows = report.tables.get("l2_growth", [])
    if rows:
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        eps = [r["epsilon"] for r in rows]
        ax.semilogx(eps, [r["l2_squared"] for r in rows], "o", label="quadrature")
        ax.semilogx(eps, [r["closed_form"] for r in rows], "-", label="2 log(1 + 1/eps)")
        ax.set_xlabel("eps")
        ax.set_ylabel("squared L2 norm on (-1, 1)")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
        ax.invert_xaxis()
        _save(fig, out_dir, "l2_growth")


def _plot_bifurcation(report: ExperimentReport, out_dir: Path) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name, rows in sorted(report.tables.items()):
        if name.startswith("twolog_"):
            ax.semilogy([r["n"] for r in rows], [r["sup_distance"] for r in rows], "o-", label=name)
    ax.set_xlabel("sequence index n")
    ax.set_ylabel("sup distance to the limit field")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, out_dir, "bifurcation_convergence")

    rows = report.tables.get("cross_distances", [])
    if rows:
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        labels = [f"{r['alpha_a']:.2f} vs {r['alpha_b']:.2f}" for r in rows]
        xs = np.arange(len(rows))
        ax.bar(xs - 0.15, [r["l1_cross"] for r in rows], width=0.3, label="measured")
        ax.bar(xs + 0.15, [r["expected"] for r in rows], width=0.3, label="expected")
        ax.set_xticks(xs, labels, rotation=20, fontsize=8)
        ax.set_ylabel("L1 cross distance")
        ax.legend(fontsize=8)
        _save(fig, out_dir, "bifurcation_cross")


def _plot_product_dichotomy(report: ExperimentReport, out_dir: Path) -> None:
    rows = report.tables.get("exact_m0", [])
    if rows:
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        for label, marker in (("plus", "o"), ("minus", "s")):
            sel = [r for r in rows if r["sequence"] == label]
            ax.plot(
                [r["re_uv"] for r in sel],
                [r["im_uv"] for r in sel],
                marker,
                alpha=0.7,
                label=f"uv along {label} sequence",
            )
        ax.axhline(0.0, color="k", lw=0.5)
        ax.axvline(0.0, color="k", lw=0.5)
        ax.set_xlabel("Re uv")
        ax.set_ylabel("Im uv")
        ax.legend(fontsize=8)
        ax.set_title("massless product along the two pinned sequences")
        _save(fig, out_dir, "dichotomy_m0")

    rows = report.tables.get("solver_gaps", [])
    if rows:
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        xs = np.arange(len(rows))
        ax.bar(xs, [r["gap"] for r in rows], width=0.6, label="|uv_plus - uv_minus|")
        ax.plot(xs, [r["threshold"] for r in rows], "r--", label="separation threshold")
        ax.set_xlabel("sampled ball point")
        ax.set_ylabel("gap")
        ax.legend(fontsize=8)
        _save(fig, out_dir, "dichotomy_massive_gap")


def _plot_self_similar(report: ExperimentReport, out_dir: Path) -> None:
    rows = [r for r in report.tables.get("phase_slopes", []) if r.get("status") == "ok"]
    if not rows:
        return
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    exp_u = [r["u_expected"] for r in rows]
    exp_v = [r["v_expected"] for r in rows]
    ax.plot(exp_u, [r["u_slope"] for r in rows], "o", label="u phase slope")
    ax.plot(exp_v, [r["v_slope"] for r in rows], "s", label="v phase slope")
    lim = min(exp_u + exp_v + [0.0]), max(exp_u + exp_v + [0.0])
    ax.plot(lim, lim, "k--", lw=0.8, label="slope = -(sum of squared moduli)")
    ax.set_xlabel("expected slope")
    ax.set_ylabel("fitted slope vs log eps")
    ax.legend(fontsize=8)
    _save(fig, out_dir, "self_similar_slopes")


def _plot_pv_residual(report: ExperimentReport, out_dir: Path) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name, rows in sorted(report.tables.items()):
        if name.startswith("twolog_"):
            ax.semilogy(
                [r["n"] for r in rows],
                [max(r["abs_R"], 1e-300) for r in rows],
                "o-",
                label=f"{name} |R|",
            )
            ax.semilogy([r["n"] for r in rows], [r["bound"] for r in rows], "--", label=f"{name} bound")
    ax.set_xlabel("n")
    ax.set_ylabel("|R(delta_n)|")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    _save(fig, out_dir, "pv_matched_sequences")

    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name, rows in sorted(report.tables.items()):
        if name.startswith("generic_"):
            ax.plot([r["n"] for r in rows], [r["abs_R"] for r in rows], "o-", ms=3, label=name)
    ax.axhline(0.5, color="r", ls="--", label="0.5 |theta(0)| threshold")
    ax.set_xlabel("n (delta = 2^-n)")
    ax.set_ylabel("|R(delta)|")
    ax.legend(fontsize=8)
    _save(fig, out_dir, "pv_generic_sequence")


def _plot_solver_validation(report: ExperimentReport, out_dir: Path) -> None:
    rows = report.tables.get("order", [])
    if rows:
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        d = [r["delta"] for r in rows]
        e = [r["max_node_error"] for r in rows]
        ax.loglog(d, e, "o-", label="max node error")
        ref = [e[0] * (x / d[0]) ** 2 for x in d]
        ax.loglog(d, ref, "k--", lw=0.8, label="slope 2 reference")
        ax.set_xlabel("delta")
        ax.set_ylabel("error vs closed form")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
        _save(fig, out_dir, "solver_order")

    rows = report.tables.get("cone_residuals", [])
    if rows:
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        xs = np.arange(len(rows))
        ax.bar(xs, [max(r["residual"], 1e-300) for r in rows], width=0.7)
        ax.set_yscale("log")
        ax.axhline(1e-5, color="r", ls="--", label="1e-5 target")
        ax.set_xticks(
            xs,
            [f"m={r['mass']:g},e={r['epsilon']:g}\n({r['x']:g},{r['t']:g})" for r in rows],
            fontsize=5,
            rotation=45,
        )
        ax.set_ylabel("cone residual")
        ax.legend(fontsize=8)
        _save(fig, out_dir, "solver_cone_residuals")

    rows = report.tables.get("gronwall", [])
    if rows:
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        xs = np.arange(len(rows))
        ax.bar(xs, [r["max_bound_ratio"] for r in rows], width=0.7)
        ax.axhline(1.0, color="r", ls="--", label="bound")
        ax.set_xticks(xs, [f"m={r['mass']:g}\ne={r['epsilon']:g}" for r in rows], fontsize=6)
        ax.set_ylabel("max A(t) / (8 sqrt(t) e^(2mt))")
        ax.legend(fontsize=8)
        _save(fig, out_dir, "solver_gronwall")


_RENDERERS = {
    "data-convergence": _plot_data_convergence,
    "bifurcation": _plot_bifurcation,
    "product-dichotomy": _plot_product_dichotomy,
    "self-similar": _plot_self_similar,
    "pv-residual": _plot_pv_residual,
    "solver-validation": _plot_solver_validation,
}


def render_report(report: ExperimentReport, out_dir: Path) -> None:
    """Render the figures for one report into out_dir (PNG, next to the CSVs)."""
    renderer = _RENDERERS.get(report.experiment)
    if renderer is not None:
        renderer(report, Path(out_dir))
