"""Delimited exports of platform state.

Formats are part of the platform's external contract:
consensus CSV ``image_id,status,label,total_qualified,agreement,
difficulty,incorrect_flags,inappropriate_flags`` and annotations CSV
``image_id,annotator_id,label,seq,qualified``.
"""

from __future__ import annotations

import csv
import io

from .state import PlatformState

CONSENSUS_HEADER = ["image_id", "status", "label", "total_qualified",
                    "agreement", "difficulty", "incorrect_flags",
                    "inappropriate_flags"]
ANNOTATIONS_HEADER = ["image_id", "annotator_id", "label", "seq", "qualified"]


def consensus_csv(state: PlatformState) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONSENSUS_HEADER)
    for image_id in sorted(state.consensus):
        c = state.consensus[image_id]
        writer.writerow([
            image_id,
            c.status,
            c.settled_label.name if c.settled_label else "",
            c.tally.total_qualified,
            _fmt(c.agreement),
            _fmt(c.difficulty),
            c.incorrect_flags,
            c.inappropriate_flags,
        ])
    return buf.getvalue()


def annotations_csv(state: PlatformState) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ANNOTATIONS_HEADER)
    rows = sorted(state.annotations.values(), key=lambda a: a.submitted_at)
    for ann in rows:
        writer.writerow([ann.image_id, ann.annotator_id, ann.label.name,
                         ann.submitted_at, int(ann.qualified_at_submission)])
    return buf.getvalue()


def _fmt(value) -> str:
    # repr round-trips floats exactly; exports must be replay-stable.
    return "" if value is None else repr(value)
