"""Command-line interface.

Verbs: ingest, serve, ita compute|calibrate, report irr|confusion|
within-k|crowd-curve, review select, simulate, export. Every verb reads
the shared config file (--config / FSTCROWD_CONFIG) plus its own flags.
Report verbs write figures (PNG) next to their delimited outputs.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from . import exports, reports
from .config import AppConfig, load_config
from .errors import FstCrowdError
from .ingest import parse_manifest
from .ita.angle import DEFAULT_THRESHOLDS, ItaThresholds
from .ita.batch import annotate_files, results_csv
from .ita.calibrate import calibrate_thresholds
from .labels import FstLabel
from .platform import Platform
from .review import select_review_set
from .sim import SimConfig, run_simulation, summarize


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="TOML or JSON config file (or set FSTCROWD_CONFIG).")
@click.pass_context
def main(ctx, config_path):
    """Skin-tone annotation platform: consensus, ITA labeling, IRR reports."""
    ctx.obj = load_config(config_path)


def _platform(cfg: AppConfig) -> Platform:
    cfg.data_dir.mkdir(parents=True, exist_ok=True)
    return Platform(cfg.events_path, cfg.protocol, fsync=cfg.fsync)


def _fail(exc: FstCrowdError):
    click.echo(f"error [{exc.code}]: {exc}", err=True)
    sys.exit(1)


@main.command()
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--image-root", type=click.Path(), default=None)
@click.option("--allow-missing", is_flag=True, help="Skip image file existence checks.")
@click.pass_obj
def ingest(cfg: AppConfig, manifest, image_root, allow_missing):
    """Ingest a dataset manifest CSV into the event log."""
    try:
        entries = parse_manifest(manifest, image_root, require_files=not allow_missing)
        summary = _platform(cfg).ingest_records(entries)
    except FstCrowdError as exc:
        _fail(exc)
    click.echo(f"ingested {summary.n_images} images ({summary.n_gold} gold seeds)")


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_obj
def serve(cfg: AppConfig, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(cfg), host=host or cfg.host, port=port or cfg.port)


# ---------------------------------------------------------------------------
# ITA


@main.group()
def ita():
    """Algorithmic ITA-FST annotation."""


@ita.command("compute")
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--image-root", type=click.Path(), default=None)
@click.option("--thresholds", "thresholds_path", type=click.Path(exists=True),
              default=None, help="Calibrated thresholds JSON (default: literature cuts).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Results CSV (default: <data_dir>/ita_results.csv).")
@click.pass_obj
def ita_compute(cfg: AppConfig, manifest, image_root, thresholds_path, out_path):
    """Compute per-image ITA and estimated FST from image files."""
    thresholds = (ItaThresholds.load(thresholds_path) if thresholds_path
                  else DEFAULT_THRESHOLDS)
    root = Path(image_root) if image_root else Path(manifest).parent
    try:
        entries = parse_manifest(manifest, root)
        paths = {e["image_id"]: root / e["file_path"] for e in entries}
        results = annotate_files(paths, thresholds, cfg.skin_rule, cfg.ita_aggregate)
    except FstCrowdError as exc:
        _fail(exc)
    out = Path(out_path) if out_path else cfg.ita_results_path
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(results_csv(results))
    n_na = sum(1 for r in results.values() if r.masked_pixel_count == 0)
    click.echo(f"wrote {out} ({len(results)} images, {n_na} with no skin detected)")


@ita.command("calibrate")
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--results", "results_path", type=click.Path(exists=True), required=True,
              help="ITA results CSV from `ita compute`.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Thresholds JSON (default: <data_dir>/thresholds.json).")
@click.pass_obj
def ita_calibrate(cfg: AppConfig, manifest, results_path, out_path):
    """Fit ITA thresholds to the manifest's expert1/expert2 gold labels."""
    try:
        entries = parse_manifest(manifest, require_files=False)
        gold_e1 = {e["image_id"]: FstLabel.parse(e["gold"]["expert1"])
                   for e in entries if "expert1" in e["gold"]}
        gold_e2 = {e["image_id"]: FstLabel.parse(e["gold"]["expert2"])
                   for e in entries if "expert2" in e["gold"]}
        ita_by_image = {}
        with open(results_path, newline="") as fh:
            for row in csv.DictReader(fh):
                if row["mean_ita_deg"]:
                    ita_by_image[row["image_id"]] = float(row["mean_ita_deg"])
        thresholds = calibrate_thresholds(ita_by_image, gold_e1, gold_e2)
    except FstCrowdError as exc:
        _fail(exc)
    out = Path(out_path) if out_path else cfg.thresholds_path
    out.parent.mkdir(parents=True, exist_ok=True)
    thresholds.save(out)
    click.echo(f"wrote {out}: {thresholds.as_tuple()}")


# ---------------------------------------------------------------------------
# Reports (delimited output + rendered figures)


@main.group()
def report():
    """Inter-rater reliability reports; each writes tables and figures."""


def _sources(cfg: AppConfig):
    platform = _platform(cfg)
    return reports.label_sources(platform.state, cfg.ita_results_path), platform


@report.command("irr")
@click.option("--methods", default=None, help="Comma-separated method ids.")
@click.option("--outdir", type=click.Path(), default="reports")
@click.pass_obj
def report_irr(cfg: AppConfig, methods, outdir):
    """Pairwise Pearson rho matrix with minimum Fisher-Z p-values."""
    sources, _ = _sources(cfg)
    names = methods.split(",") if methods else sorted(sources)
    try:
        rep = reports.write_irr_report(sources, names, reports.EXPERT_METHODS, outdir)
    except FstCrowdError as exc:
        _fail(exc)
    click.echo(reports.irr_text_table(rep))
    click.echo(f"wrote {outdir}/irr.json, irr.txt, irr_heatmap.png")


@report.command("confusion")
@click.option("--a", "method_a", required=True)
@click.option("--b", "method_b", required=True)
@click.option("--outdir", type=click.Path(), default="reports")
@click.pass_obj
def report_confusion(cfg: AppConfig, method_a, method_b, outdir):
    """7x7 confusion matrix (counts + column percentages)."""
    sources, _ = _sources(cfg)
    try:
        matrix = reports.write_confusion_report(sources, method_a, method_b, outdir)
    except FstCrowdError as exc:
        _fail(exc)
    click.echo(f"n={matrix.total}, exact match {100 * matrix.exact_match_rate():.1f}%")
    click.echo(f"wrote {outdir}/confusion_{method_a}_vs_{method_b}.csv and .png")


@report.command("within-k")
@click.option("--a", "method_a", required=True)
@click.option("--b", "method_b", required=True)
@click.option("--k", type=int, default=1)
@click.option("--outdir", type=click.Path(), default="reports")
@click.pass_obj
def report_within_k(cfg: AppConfig, method_a, method_b, k, outdir):
    """Fraction of NA-free pairs within k units."""
    sources, _ = _sources(cfg)
    try:
        result = reports.write_within_k_report(sources, method_a, method_b, k, outdir)
    except FstCrowdError as exc:
        _fail(exc)
    click.echo(f"within-{k}: {100 * result['within_k']:.1f}%  "
               f"exact: {100 * result['exact']:.1f}%")


@report.command("crowd-curve")
@click.option("--reference", default="expert1")
@click.option("--sizes", default="3,6,12,24,48,96")
@click.option("--draws", type=int, default=25)
@click.option("--seed", type=int, default=0)
@click.option("--outdir", type=click.Path(), default="reports")
@click.pass_obj
def report_crowd_curve(cfg: AppConfig, reference, sizes, draws, seed, outdir):
    """Bootstrap correlation of the crowd mean vs a reference, by crowd size."""
    sources, platform = _sources(cfg)
    pool = {i: anns for i, anns in reports.annotation_pools(platform.state).items()
            if anns}
    try:
        ref = reports.resolve_methods(sources, [reference])[reference]
        points = reports.write_crowd_curve_report(
            pool, ref, [int(s) for s in sizes.split(",")], draws, seed, outdir,
            reference_name=reference)
    except FstCrowdError as exc:
        _fail(exc)
    for pt in points:
        click.echo(f"size {pt.sample_size:>3}: rho {pt.mean_rho:.3f} "
                   f"(sd {pt.sd_rho:.3f}, CI {pt.ci_low:.3f}..{pt.ci_high:.3f})")
    click.echo(f"wrote {outdir}/crowd_curve.csv, .json, .png")


# ---------------------------------------------------------------------------
# Review selection


@main.group()
def review():
    """Expert-review tooling."""


@review.command("select")
@click.option("--a", "method_a", required=True)
@click.option("--b", "method_b", required=True)
@click.option("--n-per-stratum", type=int, default=10)
@click.option("--threshold", type=int, default=1)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), default="review_selection.csv")
@click.option("--apply", "apply_", is_flag=True,
              help="Escalate the selected images into the review queue.")
@click.pass_obj
def review_select(cfg: AppConfig, method_a, method_b, n_per_stratum, threshold,
                  seed, out_path, apply_):
    """Stratified random review set over two methods' discrepancies."""
    sources, platform = _sources(cfg)
    try:
        chosen = reports.resolve_methods(sources, [method_a, method_b])
        common = set(chosen[method_a]) & set(chosen[method_b])
        labels_a = {i: chosen[method_a][i] for i in common}
        labels_b = {i: chosen[method_b][i] for i in common}
        selection = select_review_set(labels_a, labels_b, n_per_stratum,
                                      threshold, seed)
    except FstCrowdError as exc:
        _fail(exc)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "stratum", "discrepant"])
        for (stratum, discrepant), ids in sorted(selection.by_stratum.items()):
            for image_id in ids:
                writer.writerow([image_id, stratum, int(discrepant)])
    click.echo(f"selected {len(selection.images)} images "
               f"({len(selection.short_strata)} short strata); wrote {out_path}")
    if apply_:
        n = platform.escalate_for_review(selection.images)
        click.echo(f"escalated {n} images for expert review")


# ---------------------------------------------------------------------------
# Simulation and exports


@main.command()
@click.argument("sim_config", type=click.Path(exists=True))
@click.option("--outdir", type=click.Path(), default="sim_out")
def simulate(sim_config, outdir):
    """Run the synthetic-annotator simulator from a SimConfig JSON."""
    config = SimConfig.from_json(Path(sim_config).read_text())
    transcript = run_simulation(config)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "events.jsonl", "w") as fh:
        for record in transcript.events:
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    metrics = summarize(transcript)
    (out / "summary.json").write_text(json.dumps(metrics, indent=2) + "\n")
    click.echo(json.dumps(metrics, indent=2))


@main.command("export")
@click.argument("kind", type=click.Choice(["consensus", "annotations"]))
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_obj
def export_cmd(cfg: AppConfig, kind, out_path):
    """Write a consensus or annotations CSV export."""
    platform = _platform(cfg)
    text = (exports.consensus_csv(platform.state) if kind == "consensus"
            else exports.annotations_csv(platform.state))
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
