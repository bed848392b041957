"""Task routing: which image an annotator should label next.

Policy: least qualified annotations first (ties broken by image id), so
images move toward their consensus threshold quickly. With probability
``gold_probe_rate`` an unlabeled gold image is assigned instead, keeping
qualification windows fresh.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .state import OPEN, PlatformState


@dataclass(frozen=True)
class TaskAssignment:
    image_id: str
    file_url: str
    assigned_to: str
    reason: str  # "LeastAnnotated" | "GoldProbe"


def eligible_images(state: PlatformState, annotator_id: str,
                    gold_only: bool = False) -> list[str]:
    """Open images this annotator has not labeled, least-annotated first."""
    out = []
    for image_id, cstate in state.consensus.items():
        if cstate.status != OPEN:
            continue
        if (image_id, annotator_id) in state.annotations:
            continue
        if gold_only and not state.images[image_id].is_gold_seed:
            continue
        # counted == qualified annotations (all annotations in raw mode)
        out.append((cstate.tally.counted, image_id))
    out.sort()
    return [image_id for _, image_id in out]


def next_task(state: PlatformState, annotator_id: str,
              rng: random.Random,
              gold_probe_rate: float = 0.1) -> Optional[TaskAssignment]:
    """Next assignment for an annotator, or None when no work is eligible."""
    candidates = eligible_images(state, annotator_id)
    if not candidates:
        return None
    reason = "LeastAnnotated"
    image_id = candidates[0]
    if gold_probe_rate > 0 and rng.random() < gold_probe_rate:
        gold = eligible_images(state, annotator_id, gold_only=True)
        if gold:
            image_id = gold[0]
            reason = "GoldProbe"
    return TaskAssignment(
        image_id=image_id,
        file_url=state.images[image_id].file_path,
        assigned_to=annotator_id,
        reason=reason,
    )
