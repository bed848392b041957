"""Threshold calibration against paired expert labels.

Initialization places each cut between adjacent classes: the mean of the
lighter class's lower quartile and the darker class's upper quartile of
per-image ITA values (classes taken from the first expert's labels).
Each cut is then adjusted greedily, in light-to-dark order, over integer
offsets -5..+5 degrees, keeping the offset that maximizes the number of
images where both experts and the ITA label all agree. Adjusted cuts
apply immediately, before the next cut is scanned; the scan is a single
pass. Ties prefer the smaller |offset|, then the smaller signed offset.
"""

from __future__ import annotations

import numpy as np

from ..errors import CalibrationDegenerate, CalibrationUnderdetermined
from ..labels import FstLabel
from .angle import ItaThresholds

OFFSETS = range(-5, 6)


def _classify(ita: float, cuts: list[float]) -> int:
    """FST number 1..6 under possibly-unordered candidate cuts."""
    for k, cut in enumerate(cuts, start=1):
        if ita > cut:
            return k
    return 6


def concordance(ita_by_image: dict[str, float],
                gold_e1: dict[str, FstLabel],
                gold_e2: dict[str, FstLabel],
                cuts: list[float]) -> int:
    """Images where expert 1, expert 2, and the ITA label all agree."""
    agreed = 0
    for image_id, ita in ita_by_image.items():
        a = gold_e1.get(image_id)
        b = gold_e2.get(image_id)
        if a is None or b is None or not (a.applicable and b.applicable):
            continue
        if a == b and a.value == _classify(ita, cuts):
            agreed += 1
    return agreed


def calibrate_thresholds(ita_by_image: dict[str, float],
                         gold_e1: dict[str, FstLabel],
                         gold_e2: dict[str, FstLabel]) -> ItaThresholds:
    """Fit the five ITA cut points to two experts' labels.

    Requires every class 1..6 to contain at least one expert-1-labeled
    image with an ITA value (NotApplicable entries are excluded).
    """
    by_class: dict[int, list[float]] = {k: [] for k in range(1, 7)}
    for image_id, ita in ita_by_image.items():
        label = gold_e1.get(image_id)
        if label is not None and label.applicable:
            by_class[label.value].append(ita)
    empty = [k for k, v in by_class.items() if not v]
    if empty:
        raise CalibrationUnderdetermined(f"no expert-1 images in class(es) {empty}")

    cuts = []
    for k in range(1, 6):
        q1_light = float(np.percentile(by_class[k], 25))
        q3_dark = float(np.percentile(by_class[k + 1], 75))
        cuts.append((q1_light + q3_dark) / 2.0)

    for j in range(5):
        base = cuts[j]
        best_offset = 0
        best = concordance(ita_by_image, gold_e1, gold_e2, cuts)
        for i in OFFSETS:
            candidate = cuts.copy()
            candidate[j] = base + i
            score = concordance(ita_by_image, gold_e1, gold_e2, candidate)
            if (score, -abs(i), -i) > (best, -abs(best_offset), -best_offset):
                best = score
                best_offset = i
        cuts[j] = base + best_offset

    try:
        return ItaThresholds(*cuts)
    except ValueError as exc:
        raise CalibrationDegenerate(str(exc)) from exc
