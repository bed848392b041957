"""Command engine: validates operations, writes events, applies them.

Single logical writer: every mutation is one or more events appended to
the log and applied to the in-memory state in the same order. Consequence
events detected by ``PlatformState.apply`` are drained FIFO, so the log
is a complete, self-contained account of every transition.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import (
    DuplicateAnnotation,
    ImageNotOpen,
    InvalidInput,
    NotReviewable,
    UnknownImage,
)
from .events import EventLog
from .labels import FstLabel
from .protocol import ProtocolConfig
from .state import ADJUDICATED, ESCALATED, HALTED, OPEN, SETTLED, PlatformState


@dataclass(frozen=True)
class SubmissionOutcome:
    accepted: bool
    new_status: str
    qualification_state: str
    settled_label: Optional[FstLabel] = None


@dataclass(frozen=True)
class DatasetSummary:
    n_images: int
    n_gold: int


class Platform:
    def __init__(self, log_path: Optional[str | Path] = None,
                 config: ProtocolConfig | None = None, fsync: bool = False):
        self.config = config or ProtocolConfig()
        self.log = EventLog(log_path, fsync=fsync)
        self.state = PlatformState(self.config)
        if self.log.last_seq:
            for record in self.log:
                self.state.apply(record)

    # -- event plumbing ------------------------------------------------------

    def _record(self, event_type: str, payload: dict) -> None:
        """Append an event plus every consequence it triggers, FIFO."""
        queue: deque[tuple[str, dict]] = deque([(event_type, payload)])
        while queue:
            etype, body = queue.popleft()
            seq = self.log.append(etype, body)
            followups = self.state.apply({"seq": seq, "type": etype, **body})
            queue.extend(followups)

    # -- commands ------------------------------------------------------------

    def ingest_records(self, entries: list[dict]) -> DatasetSummary:
        """Register parsed manifest entries (see ingest.parse_manifest)."""
        for entry in entries:
            if entry["image_id"] in self.state.images:
                raise InvalidInput(f"image_id already ingested: {entry['image_id']}")
        self._record("DatasetIngested", {"images": entries})
        n_gold = sum(1 for e in entries if e.get("gold"))
        return DatasetSummary(n_images=len(entries), n_gold=n_gold)

    def submit_annotation(self, annotator_id: str, image_id: str,
                          label: FstLabel) -> SubmissionOutcome:
        if image_id not in self.state.images:
            raise UnknownImage(image_id)
        cstate = self.state.consensus[image_id]
        if cstate.status != OPEN:
            raise ImageNotOpen(f"{image_id} is {cstate.status}")
        if (image_id, annotator_id) in self.state.annotations:
            raise DuplicateAnnotation(f"{annotator_id} already labeled {image_id}")
        profile = self.state.profile(annotator_id)
        qualified = profile.state == "Qualified"
        seq = self.log.next_seq()
        self._record("AnnotationSubmitted", {
            "annotation_id": f"a{seq:06d}",
            "image_id": image_id,
            "annotator_id": annotator_id,
            "label": label.name,
            "qualified": qualified,
        })
        cstate = self.state.consensus[image_id]
        return SubmissionOutcome(
            accepted=True,
            new_status=cstate.status,
            qualification_state=self.state.profile(annotator_id).state,
            settled_label=cstate.settled_label,
        )

    def file_failure_report(self, image_id: str, annotator_id: str,
                            kind: str, text: str = "") -> str:
        """Record a failure report; returns the image status afterwards."""
        if image_id not in self.state.images:
            raise UnknownImage(image_id)
        if kind not in ("IncorrectLabel", "InappropriateOrIrrelevant"):
            raise InvalidInput(f"unknown failure kind {kind!r}")
        self._record("FlagFiled", {
            "image_id": image_id,
            "annotator_id": annotator_id,
            "kind": kind,
            "text": text,
        })
        return self.state.consensus[image_id].status

    def adjudicate(self, image_id: str, expert_id: str, label: FstLabel):
        """Expert ruling on a halted/escalated/settled image."""
        if image_id not in self.state.images:
            raise UnknownImage(image_id)
        status = self.state.consensus[image_id].status
        if status not in (HALTED, ESCALATED, SETTLED):
            raise NotReviewable(f"{image_id} is {status}")
        self._record("Adjudicated", {
            "image_id": image_id,
            "expert_id": expert_id,
            "label": label.name,
        })
        return self.state.consensus[image_id]

    def escalate_for_review(self, image_ids: list[str],
                            reason: str = "discrepancy") -> int:
        """Queue images for expert review (e.g. a discrepancy selection)."""
        n = 0
        for image_id in image_ids:
            if image_id not in self.state.images:
                raise UnknownImage(image_id)
            if self.state.consensus[image_id].status in (OPEN, SETTLED):
                self._record("ImageEscalated", {"image_id": image_id, "reason": reason})
                n += 1
        return n

    # -- queries -------------------------------------------------------------

    def compute_agreement_difficulty(self, image_id: str) -> tuple[float, float]:
        return self.state.agreement_difficulty(image_id)

    def review_queue(self) -> list[dict]:
        """Halted and escalated images awaiting expert review.

        Never includes tallies or label distributions: experts adjudicate
        without seeing them. Ordering is stable (image id).
        """
        items = []
        for image_id in sorted(self.state.consensus):
            c = self.state.consensus[image_id]
            if c.status in (HALTED, ESCALATED):
                if c.status == HALTED:
                    reason = "flagged"
                else:
                    reason = "tie" if c.escalation_reason == "tie_at_cap" else "discrepancy"
                items.append({
                    "image_id": image_id,
                    "file_path": self.state.images[image_id].file_path,
                    "reason": reason,
                })
        return items
