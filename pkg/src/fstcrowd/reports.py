"""Report assembly: JSON and aligned-text tables for machines and humans,
CSV for spreadsheets, and matplotlib figures rendered next to them.

Everything here is read-only over label maps produced elsewhere (gold
columns, consensus labels, ITA results, annotation pools).
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .errors import UnknownMethod
from .irr import (
    ConfusionMatrix,
    CrowdCurvePoint,
    IrrReport,
    bootstrap_crowd_curve,
    confusion_matrix,
    irr_report,
    within_k_agreement,
)
from .ita.batch import read_results_csv
from .labels import FstLabel
from .state import ADJUDICATED, SETTLED, PlatformState

EXPERT_METHODS = ["expert1", "expert2", "expert3"]


def label_sources(state: PlatformState,
                  ita_results_path: str | Path | None = None,
                  extra: dict[str, dict[str, FstLabel]] | None = None,
                  ) -> dict[str, dict[str, FstLabel]]:
    """All label maps known to the platform, keyed by method id.

    expert1..expert3 come from gold columns, "consensus" from settled and
    adjudicated images, "ita" from a results CSV when present.
    """
    sources: dict[str, dict[str, FstLabel]] = {}
    for expert in EXPERT_METHODS:
        labels = {i: rec.gold_labels[expert] for i, rec in state.images.items()
                  if expert in rec.gold_labels}
        if labels:
            sources[expert] = labels
    consensus = {i: c.settled_label for i, c in state.consensus.items()
                 if c.status in (SETTLED, ADJUDICATED) and c.settled_label}
    if consensus:
        sources["consensus"] = consensus
    if ita_results_path and Path(ita_results_path).exists():
        sources["ita"] = read_results_csv(Path(ita_results_path).read_text())
    if extra:
        sources.update(extra)
    return sources


def resolve_methods(sources: dict[str, dict[str, FstLabel]],
                    names: list[str]) -> dict[str, dict[str, FstLabel]]:
    unknown = [n for n in names if n not in sources]
    if unknown:
        raise UnknownMethod(f"no labels for method(s) {unknown}; "
                            f"available: {sorted(sources)}")
    return {n: sources[n] for n in names}


def annotation_pools(state: PlatformState) -> dict[str, list[FstLabel]]:
    """Per-image multisets of all stored annotations, submission order."""
    return {image_id: [a.label for a in state.image_annotations(image_id)]
            for image_id in state.images}


# ---------------------------------------------------------------------------
# Text and CSV rendering


def irr_text_table(report: IrrReport) -> str:
    methods = report.methods
    cells = {}
    for a in methods:
        for b in methods:
            if a == b:
                cells[(a, b)] = "1.000"
            else:
                key = (a, b) if a <= b else (b, a)
                cells[(a, b)] = f"{report.rho[key]:.3f} (n={report.n[key]})"
    width = max(max(len(c) for c in cells.values()),
                max(len(m) for m in methods)) + 2
    lines = ["Pairwise Pearson correlation (n effective in parens)"]
    lines.append(" " * width + "".join(f"{m:>{width}}" for m in methods))
    for a in methods:
        lines.append(f"{a:<{width}}"
                     + "".join(f"{cells[(a, b)]:>{width}}" for b in methods))
    if report.min_p:
        lines.append("")
        lines.append("Minimum Fisher-Z p-values vs expert pairs")
        for (expert, method), p in sorted(report.min_p.items()):
            shown = "<0.001" if p < 0.001 else f"{p:.3f}"
            lines.append(f"  {method:<14} vs {expert:<10} p = {shown}")
    return "\n".join(lines) + "\n"


def confusion_csv(matrix: ConfusionMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [l.name for l in matrix.labels]
    writer.writerow(["a\\b", *names, "row_total"])
    for i, name in enumerate(names):
        row = matrix.counts[i]
        writer.writerow([name, *row.tolist(), int(row.sum())])
    writer.writerow(["col_total", *matrix.counts.sum(axis=0).tolist(), matrix.total])
    col_pct = matrix.column_percent()
    for i, name in enumerate(names):
        writer.writerow([f"{name}_col_pct", *[f"{v:.1f}" for v in col_pct[i]], ""])
    return buf.getvalue()


def crowd_curve_csv(points: list[CrowdCurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample_size", "mean_rho", "sd_rho", "ci_low", "ci_high"])
    for p in points:
        writer.writerow([p.sample_size, f"{p.mean_rho:.6f}", f"{p.sd_rho:.6f}",
                         f"{p.ci_low:.6f}", f"{p.ci_high:.6f}"])
    return buf.getvalue()


def crowd_curve_json(points: list[CrowdCurvePoint]) -> str:
    return json.dumps([{
        "sample_size": p.sample_size,
        "mean_rho": p.mean_rho,
        "sd_rho": p.sd_rho,
        "ci_low": p.ci_low,
        "ci_high": p.ci_high,
    } for p in points], indent=2)


# ---------------------------------------------------------------------------
# Figures


def render_irr_heatmap(report: IrrReport, path: str | Path) -> None:
    matrix = report.rho_matrix()
    fig, ax = plt.subplots(figsize=(1.1 * len(report.methods) + 2.0, 1.0 * len(report.methods) + 1.5))
    im = ax.imshow(matrix, vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xticks(range(len(report.methods)), report.methods, rotation=45, ha="right")
    ax.set_yticks(range(len(report.methods)), report.methods)
    for i in range(len(report.methods)):
        for j in range(len(report.methods)):
            color = "white" if matrix[i, j] < 0.6 else "black"
            ax.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center", color=color)
    ax.set_title("Inter-rater reliability (Pearson rho)")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_confusion(matrix: ConfusionMatrix, path: str | Path,
                     a_name: str = "method A", b_name: str = "method B") -> None:
    pct = matrix.column_percent()
    names = [l.name for l in matrix.labels]
    fig, ax = plt.subplots(figsize=(7.5, 7))
    ax.imshow(pct, vmin=0, vmax=100, cmap="Greys")
    for i in range(7):
        for j in range(7):
            color = "white" if pct[i, j] > 50 else "black"
            ax.text(j, i, f"{matrix.counts[i, j]}\n{pct[i, j]:.0f}%",
                    ha="center", va="center", color=color, fontsize=9)
    ax.set_xticks(range(7), names)
    ax.set_yticks(range(7), names)
    ax.set_xlabel(b_name)
    ax.set_ylabel(a_name)
    ax.set_title(f"Confusion matrix: {a_name} vs {b_name} "
                 f"(n={matrix.total}, cell % of column)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_crowd_curve(points: list[CrowdCurvePoint], path: str | Path,
                       reference_name: str = "reference") -> None:
    sizes = [p.sample_size for p in points]
    means = [p.mean_rho for p in points]
    lows = [p.ci_low for p in points]
    highs = [p.ci_high for p in points]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.fill_between(sizes, lows, highs, alpha=0.25, color="gray", label="95% CI")
    ax.plot(sizes, means, marker="o", color="tab:blue")
    ax.set_xscale("log", base=2)
    ax.set_xticks(sizes, [str(s) for s in sizes])
    ax.set_xlabel("annotations per image")
    ax.set_ylabel(f"Pearson rho vs {reference_name}")
    ax.set_title("Inter-rater reliability by crowd size")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Bundled report writers (CLI entry points)


def write_irr_report(sources: dict[str, dict[str, FstLabel]], methods: list[str],
                     experts: list[str], outdir: str | Path) -> IrrReport:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    chosen = resolve_methods(sources, methods)
    report = irr_report(chosen, [e for e in experts if e in chosen])
    (outdir / "irr.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    (outdir / "irr.txt").write_text(irr_text_table(report))
    render_irr_heatmap(report, outdir / "irr_heatmap.png")
    return report


def write_confusion_report(sources: dict[str, dict[str, FstLabel]],
                           a: str, b: str, outdir: str | Path) -> ConfusionMatrix:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    chosen = resolve_methods(sources, [a, b])
    matrix = confusion_matrix(chosen[a], chosen[b])
    (outdir / f"confusion_{a}_vs_{b}.csv").write_text(confusion_csv(matrix))
    render_confusion(matrix, outdir / f"confusion_{a}_vs_{b}.png", a, b)
    return matrix


def write_within_k_report(sources: dict[str, dict[str, FstLabel]],
                          a: str, b: str, k: int, outdir: str | Path) -> dict:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    chosen = resolve_methods(sources, [a, b])
    result = {
        "a": a, "b": b, "k": k,
        "within_k": within_k_agreement(chosen[a], chosen[b], k),
        "exact": within_k_agreement(chosen[a], chosen[b], 0),
    }
    (outdir / f"within{k}_{a}_vs_{b}.json").write_text(json.dumps(result, indent=2) + "\n")
    return result


def write_crowd_curve_report(pool: dict[str, list[FstLabel]],
                             reference: dict[str, FstLabel],
                             sizes: list[int], draws: int, rng_seed: int,
                             outdir: str | Path,
                             reference_name: str = "reference") -> list[CrowdCurvePoint]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    points = bootstrap_crowd_curve(pool, reference, sizes, draws, rng_seed)
    (outdir / "crowd_curve.csv").write_text(crowd_curve_csv(points))
    (outdir / "crowd_curve.json").write_text(crowd_curve_json(points) + "\n")
    render_crowd_curve(points, outdir / "crowd_curve.png", reference_name)
    return points
