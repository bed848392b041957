"""Platform state and the event-application rules that build it.

State is only ever mutated by ``PlatformState.apply`` acting on one event
record. ``apply`` additionally *detects* consequences that the engine must
record as their own events (consensus settlement, halting, qualification
flips) and returns them as payloads; it never applies a consequence
itself. Replaying a log therefore reconstructs the live state exactly:
the consequence events are already in the log.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import LogCorruption, NoQualifiedAnnotations, NotSettled, UnknownImage
from .labels import FstLabel
from .protocol import (
    DISQUALIFIED,
    NON_QUALIFIED,
    QUALIFIED,
    ProtocolConfig,
    ScoreWindow,
    check_consensus,
    halt_reason,
    qualification_transition,
    weight_of,
)

OPEN = "Open"
SETTLED = "Settled"
HALTED = "Halted"
ESCALATED = "Escalated"
ADJUDICATED = "Adjudicated"

INCORRECT = "IncorrectLabel"
INAPPROPRIATE = "InappropriateOrIrrelevant"


@dataclass
class ImageRecord:
    image_id: str
    file_path: str
    source: str = ""
    gold_labels: dict[str, FstLabel] = field(default_factory=dict)

    @property
    def is_gold_seed(self) -> bool:
        return bool(self.gold_labels)

    def primary_gold(self) -> Optional[FstLabel]:
        """Reference label for scoring: the first expert column that is set."""
        if not self.gold_labels:
            return None
        return self.gold_labels[sorted(self.gold_labels)[0]]


@dataclass
class Annotation:
    annotation_id: str
    image_id: str
    annotator_id: str
    label: FstLabel
    submitted_at: int  # event seq; the protocol's ordering authority
    qualified_at_submission: bool
    scored: bool = False


@dataclass
class Tally:
    counts: dict[FstLabel, int] = field(default_factory=dict)
    total_qualified: int = 0
    total_all: int = 0

    @property
    def counted(self) -> int:
        return sum(self.counts.values())


@dataclass
class ConsensusState:
    image_id: str
    tally: Tally = field(default_factory=Tally)
    status: str = OPEN
    settled_label: Optional[FstLabel] = None
    agreement: Optional[float] = None
    difficulty: Optional[float] = None
    incorrect_flags: int = 0
    inappropriate_flags: int = 0
    escalation_reason: Optional[str] = None


@dataclass
class AnnotatorProfile:
    annotator_id: str
    state: str = NON_QUALIFIED
    window: ScoreWindow = field(default_factory=ScoreWindow)

    @property
    def scored_total(self) -> int:
        return self.window.scored_total


class PlatformState:
    def __init__(self, config: ProtocolConfig | None = None):
        self.config = config or ProtocolConfig()
        self.images: dict[str, ImageRecord] = {}
        self.consensus: dict[str, ConsensusState] = {}
        self.profiles: dict[str, AnnotatorProfile] = {}
        self.annotations: dict[tuple[str, str], Annotation] = {}
        # Per-image annotator ids in submission order; drives lazy scoring.
        self.annotation_order: dict[str, list[str]] = {}
        self.last_seq = 0

    # -- lookups -----------------------------------------------------------

    def profile(self, annotator_id: str) -> AnnotatorProfile:
        prof = self.profiles.get(annotator_id)
        if prof is None:
            prof = AnnotatorProfile(annotator_id)
            self.profiles[annotator_id] = prof
        return prof

    def image_annotations(self, image_id: str) -> list[Annotation]:
        return [self.annotations[(image_id, a)]
                for a in self.annotation_order.get(image_id, [])]

    def annotator_weight(self, annotator_id: str) -> float:
        prof = self.profiles.get(annotator_id)
        if prof is None or not prof.window.bits:
            return 1.0
        return weight_of(prof.window, self.config)

    def reference_label(self, image_id: str) -> Optional[FstLabel]:
        """Scoring reference: expert gold where present, else the settled label."""
        gold = self.images[image_id].primary_gold()
        if gold is not None:
            return gold
        return self.consensus[image_id].settled_label

    # -- event application ---------------------------------------------------

    def apply(self, record: dict) -> list[tuple[str, dict]]:
        """Mutate state for one event; return follow-up event payloads.

        Follow-ups are detections only. The caller (engine) appends them to
        the log and applies them in order; replay ignores the return value
        because the log already contains them.
        """
        seq = record["seq"]
        if seq != self.last_seq + 1:
            raise LogCorruption(f"expected seq {self.last_seq + 1}, got {seq}")
        self.last_seq = seq
        handler = getattr(self, "_apply_" + _snake(record["type"]))
        return handler(record)

    def _apply_dataset_ingested(self, record: dict) -> list[tuple[str, dict]]:
        for entry in record["images"]:
            image = ImageRecord(
                image_id=entry["image_id"],
                file_path=entry["file_path"],
                source=entry.get("source", ""),
                gold_labels={k: FstLabel.parse(v) for k, v in entry.get("gold", {}).items()},
            )
            self.images[image.image_id] = image
            self.consensus[image.image_id] = ConsensusState(image.image_id)
            self.annotation_order[image.image_id] = []
        return []

    def _apply_annotation_submitted(self, record: dict) -> list[tuple[str, dict]]:
        image_id = record["image_id"]
        annotator_id = record["annotator_id"]
        label = FstLabel.parse(record["label"])
        qualified = bool(record["qualified"])
        ann = Annotation(
            annotation_id=record["annotation_id"],
            image_id=image_id,
            annotator_id=annotator_id,
            label=label,
            submitted_at=record["seq"],
            qualified_at_submission=qualified,
        )
        self.annotations[(image_id, annotator_id)] = ann
        self.annotation_order[image_id].append(annotator_id)

        cstate = self.consensus[image_id]
        cstate.tally.total_all += 1
        if qualified:
            cstate.tally.total_qualified += 1
        if qualified or self.config.raw_mode:
            cstate.tally.counts[label] = cstate.tally.counts.get(label, 0) + 1

        followups: list[tuple[str, dict]] = []
        gold = self.images[image_id].primary_gold()
        if gold is not None:
            self._score(ann, gold, from_gold=True)
            change = self._pending_qualification(annotator_id)
            if change:
                followups.append(change)

        if cstate.status == OPEN:
            outcome = check_consensus(cstate.tally.counts, self.config)
            if outcome.kind == "consensus":
                followups.append(("ConsensusSettled",
                                  {"image_id": image_id, "label": outcome.label.name}))
            elif outcome.kind == "tie_at_cap":
                followups.append(("ImageEscalated",
                                  {"image_id": image_id, "reason": "tie_at_cap"}))
        return followups

    def _apply_consensus_settled(self, record: dict) -> list[tuple[str, dict]]:
        image_id = record["image_id"]
        label = FstLabel.parse(record["label"])
        cstate = self.consensus[image_id]
        cstate.status = SETTLED
        cstate.settled_label = label
        followups = self._score_pending(image_id, label, from_gold=False)
        cstate.agreement, cstate.difficulty = self._agreement_or_none(image_id, label)
        return followups

    def _apply_image_escalated(self, record: dict) -> list[tuple[str, dict]]:
        cstate = self.consensus[record["image_id"]]
        cstate.status = ESCALATED
        cstate.settled_label = None
        cstate.agreement = None
        cstate.difficulty = None
        cstate.escalation_reason = record.get("reason", "tie_at_cap")
        return []

    def _apply_flag_filed(self, record: dict) -> list[tuple[str, dict]]:
        cstate = self.consensus[record["image_id"]]
        if record["kind"] == INCORRECT:
            cstate.incorrect_flags += 1
        elif record["kind"] == INAPPROPRIATE:
            cstate.inappropriate_flags += 1
        else:
            raise LogCorruption(f"unknown flag kind {record['kind']!r}")
        if cstate.status in (OPEN, SETTLED, ESCALATED):
            reason = halt_reason(cstate.incorrect_flags, cstate.inappropriate_flags,
                                 self.config)
            if reason:
                return [("ImageHalted", {"image_id": cstate.image_id, "reason": reason})]
        return []

    def _apply_image_halted(self, record: dict) -> list[tuple[str, dict]]:
        cstate = self.consensus[record["image_id"]]
        cstate.status = HALTED
        cstate.settled_label = None
        cstate.agreement = None
        cstate.difficulty = None
        return []

    def _apply_adjudicated(self, record: dict) -> list[tuple[str, dict]]:
        image_id = record["image_id"]
        label = FstLabel.parse(record["label"])
        cstate = self.consensus[image_id]
        cstate.status = ADJUDICATED
        cstate.settled_label = label
        # Expert adjudication is the highest-precedence reference.
        followups = self._score_pending(image_id, label, from_gold=True)
        cstate.agreement, cstate.difficulty = self._agreement_or_none(image_id, label)
        return followups

    def _apply_qualification_changed(self, record: dict) -> list[tuple[str, dict]]:
        prof = self.profile(record["annotator_id"])
        if prof.state != record["from_state"]:
            raise LogCorruption(
                f"qualification event expects {record['from_state']}, "
                f"profile is {prof.state}")
        prof.state = record["to_state"]
        return []

    # -- scoring helpers -----------------------------------------------------

    def _score(self, ann: Annotation, reference: FstLabel, from_gold: bool) -> None:
        ann.scored = True
        prof = self.profile(ann.annotator_id)
        if prof.state == DISQUALIFIED and not self.config.allow_requalification:
            return  # terminal state: window frozen
        prof.window.push(ann.label == reference, from_gold, self.config.qual_window)

    def _score_pending(self, image_id: str, reference: FstLabel,
                       from_gold: bool) -> list[tuple[str, dict]]:
        """Lazily score unscored annotations in submission order."""
        touched: list[str] = []
        for ann in self.image_annotations(image_id):
            if not ann.scored:
                self._score(ann, reference, from_gold)
                if ann.annotator_id not in touched:
                    touched.append(ann.annotator_id)
        followups = []
        for annotator_id in touched:
            change = self._pending_qualification(annotator_id)
            if change:
                followups.append(change)
        return followups

    def _pending_qualification(self, annotator_id: str) -> Optional[tuple[str, dict]]:
        prof = self.profile(annotator_id)
        new_state = qualification_transition(prof.state, prof.window, self.config)
        if new_state is None:
            return None
        return ("QualificationChanged", {
            "annotator_id": annotator_id,
            "from_state": prof.state,
            "to_state": new_state,
        })

    def _agreement_or_none(self, image_id: str,
                           label: FstLabel) -> tuple[Optional[float], Optional[float]]:
        try:
            return self.agreement_difficulty(image_id, label)
        except NoQualifiedAnnotations:
            return None, None

    # -- queries -------------------------------------------------------------

    def agreement_difficulty(self, image_id: str,
                             label: Optional[FstLabel] = None) -> tuple[float, float]:
        """Weighted agreement A and difficulty D = 1 - A for a settled image.

        A is the weight of qualified annotations carrying the consensus label
        over the weight of all qualified annotations, using each annotator's
        current agreement weight. If every weight is zero the annotations
        count unweighted.
        """
        if image_id not in self.images:
            raise UnknownImage(image_id)
        cstate = self.consensus[image_id]
        if label is None:
            label = cstate.settled_label
            if label is None:
                raise NotSettled(image_id)
        qualified = [a for a in self.image_annotations(image_id)
                     if a.qualified_at_submission]
        if not qualified:
            raise NoQualifiedAnnotations(image_id)
        weights = [self.annotator_weight(a.annotator_id) for a in qualified]
        total = sum(weights)
        if total == 0.0:
            weights = [1.0] * len(qualified)
            total = float(len(qualified))
        matched = sum(w for a, w in zip(qualified, weights) if a.label == label)
        agreement = matched / total
        return agreement, 1.0 - agreement

    def snapshot(self) -> dict:
        """Canonical comparable view: statuses, labels, tallies, windows."""
        return {
            "images": sorted(self.images),
            "consensus": {
                cid: {
                    "status": c.status,
                    "label": c.settled_label.name if c.settled_label else None,
                    "counts": {l.name: n for l, n in sorted(c.tally.counts.items(),
                                                            key=lambda kv: kv[0].name)},
                    "total_qualified": c.tally.total_qualified,
                    "total_all": c.tally.total_all,
                    "agreement": c.agreement,
                    "difficulty": c.difficulty,
                    "incorrect_flags": c.incorrect_flags,
                    "inappropriate_flags": c.inappropriate_flags,
                }
                for cid, c in sorted(self.consensus.items())
            },
            "profiles": {
                pid: {
                    "state": p.state,
                    "bits": [(m, g) for m, g in p.window.bits],
                    "scored_total": p.window.scored_total,
                }
                for pid, p in sorted(self.profiles.items())
            },
            "annotations": {
                f"{img}/{ann}": {
                    "label": self.annotations[(img, ann)].label.name,
                    "qualified": self.annotations[(img, ann)].qualified_at_submission,
                    "seq": self.annotations[(img, ann)].submitted_at,
                }
                for img, ann in sorted(self.annotations)
            },
        }


def replay(events: Iterable[dict], config: ProtocolConfig | None = None) -> PlatformState:
    """Rebuild state from a seq-ordered, gap-free event stream."""
    state = PlatformState(config)
    for record in events:
        state.apply(record)
    return state


def _snake(name: str) -> str:
    out = []
    for ch in name:
        if ch.isupper() and out:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)
