"""File-level ITA pipeline: rasters in, labeled results out.

Emits one row per image: ``image_id,mean_ita_deg,masked_pixel_count,fst``.
Images whose mask comes up empty get fst=NA with a zero pixel count.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import NoSkinDetected
from ..labels import FstLabel
from .angle import DEFAULT_THRESHOLDS, ItaResult, ItaThresholds, compute_ita, ita_to_fst
from .mask import DEFAULT_SKIN_RULE, SkinRule, skin_mask

RESULTS_HEADER = ["image_id", "mean_ita_deg", "masked_pixel_count", "fst"]


def load_raster(path: str | Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def annotate_image(image: np.ndarray,
                   thresholds: ItaThresholds = DEFAULT_THRESHOLDS,
                   rule: SkinRule = DEFAULT_SKIN_RULE,
                   aggregate: str = "mean") -> ItaResult:
    """Mask, compute ITA, and attach the estimated FST for one raster."""
    mask = skin_mask(image, rule)
    try:
        result = compute_ita(image, mask, aggregate=aggregate)
    except NoSkinDetected:
        return ItaResult(mean_ita_deg=float("nan"), masked_pixel_count=0,
                         fst=FstLabel.NA)
    result.fst = ita_to_fst(result.mean_ita_deg, thresholds)
    return result


def annotate_files(paths: dict[str, Path],
                   thresholds: ItaThresholds = DEFAULT_THRESHOLDS,
                   rule: SkinRule = DEFAULT_SKIN_RULE,
                   aggregate: str = "mean") -> dict[str, ItaResult]:
    return {image_id: annotate_image(load_raster(p), thresholds, rule, aggregate)
            for image_id, p in sorted(paths.items())}


def results_csv(results: dict[str, ItaResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for image_id in sorted(results):
        r = results[image_id]
        ita = "" if r.masked_pixel_count == 0 else f"{r.mean_ita_deg:.6f}"
        writer.writerow([image_id, ita, r.masked_pixel_count, r.fst.name])
    return buf.getvalue()


def read_results_csv(text: str) -> dict[str, FstLabel]:
    """Label map from a results CSV (for report inputs)."""
    labels: dict[str, FstLabel] = {}
    reader = csv.DictReader(io.StringIO(text))
    for row in reader:
        labels[row["image_id"]] = FstLabel.parse(row["fst"])
    return labels
