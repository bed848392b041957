"""Stratified selection of images for expert review.

Candidates are partitioned by (first method's label) x (discrepant or
not), where a pair is discrepant when the two labels differ by more than
``discrepancy_threshold`` units or exactly one side is NotApplicable.
A fixed number of images is drawn uniformly without replacement from
each cell; cells smaller than the quota contribute all members and are
flagged instead of failing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .labels import FstLabel, unit_distance


@dataclass
class ReviewSelection:
    images: list[str]
    #: (label_a stratum name, discrepant?) -> chosen image ids
    by_stratum: dict[tuple[str, bool], list[str]] = field(default_factory=dict)
    #: cells that had fewer members than requested
    short_strata: list[tuple[str, bool]] = field(default_factory=list)


def is_discrepant(a: FstLabel, b: FstLabel, threshold: int) -> bool:
    """More than ``threshold`` units apart; a lone NA counts as discrepant."""
    dist = unit_distance(a, b)
    if dist is None:
        return a != b  # NA vs NA agrees; NA vs anything else cannot be compared
    return dist > threshold


def select_review_set(labels_a: dict[str, FstLabel],
                      labels_b: dict[str, FstLabel],
                      n_per_stratum: int,
                      discrepancy_threshold: int = 1,
                      rng_seed: int = 0) -> ReviewSelection:
    """Draw a review set stratified on labels_a and pairwise discrepancy.

    Both maps must cover the same images. Deterministic for a fixed seed.
    """
    if set(labels_a) != set(labels_b):
        missing = set(labels_a) ^ set(labels_b)
        raise ValueError(f"label maps do not cover the same images: {sorted(missing)[:5]}")
    cells: dict[tuple[str, bool], list[str]] = {}
    for image_id in sorted(labels_a):
        a, b = labels_a[image_id], labels_b[image_id]
        key = (a.name, is_discrepant(a, b, discrepancy_threshold))
        cells.setdefault(key, []).append(image_id)

    rng = random.Random(rng_seed)
    selection = ReviewSelection(images=[])
    for key in sorted(cells):
        members = cells[key]
        if len(members) <= n_per_stratum:
            chosen = list(members)
            if len(members) < n_per_stratum:
                selection.short_strata.append(key)
        else:
            chosen = sorted(rng.sample(members, n_per_stratum))
        selection.by_stratum[key] = chosen
        selection.images.extend(chosen)
    return selection


def discrepant_images(labels_a: dict[str, FstLabel],
                      labels_b: dict[str, FstLabel],
                      threshold: int = 1) -> list[str]:
    """All images whose two labels disagree by more than ``threshold`` units."""
    return [i for i in sorted(labels_a)
            if i in labels_b and is_discrepant(labels_a[i], labels_b[i], threshold)]
