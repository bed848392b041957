"""Pure rules of the dynamic consensus protocol.

Everything here is a function of its arguments: no event log, no
platform state. The engine in ``platform.py`` and the test oracles both
call into (or re-derive) these rules.

Deployed defaults: an image settles when one category leads every other
by 3 qualified annotations, or by majority once 20 qualified annotations
accumulate (tie at the cap escalates to expert review). Labeling halts
after one inappropriate/irrelevant flag or two incorrect-label flags.
Annotators qualify at >= 40% agreement over >= 25 scored images and are
disqualified when agreement over the 50 most recent drops below 40%.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .labels import FstLabel


@dataclass(frozen=True)
class ProtocolConfig:
    lead_margin: int = 3
    max_annotations: int = 20
    qual_min_agreement: float = 0.40
    qual_min_scored: int = 25
    qual_window: int = 50
    incorrect_halt: int = 2
    inappropriate_halt: int = 1
    # When true, non-qualified annotations count in tallies (Scale-AI-style
    # aggregation); default models the qualified-only protocol.
    raw_mode: bool = False
    # Disqualification is terminal unless this is set.
    allow_requalification: bool = False
    # Weight = windowed agreement against expert references only, instead
    # of the mixed gold+consensus scoring window.
    weights_from_gold_only: bool = False

    def __post_init__(self):
        for name in ("lead_margin", "max_annotations", "qual_min_scored",
                     "qual_window", "incorrect_halt", "inappropriate_halt"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.qual_min_agreement <= 1.0:
            raise ValueError("qual_min_agreement must be in [0,1]")

    def to_dict(self) -> dict:
        return {
            "lead_margin": self.lead_margin,
            "max_annotations": self.max_annotations,
            "qual_min_agreement": self.qual_min_agreement,
            "qual_min_scored": self.qual_min_scored,
            "qual_window": self.qual_window,
            "incorrect_halt": self.incorrect_halt,
            "inappropriate_halt": self.inappropriate_halt,
            "raw_mode": self.raw_mode,
            "allow_requalification": self.allow_requalification,
            "weights_from_gold_only": self.weights_from_gold_only,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolConfig":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)


# ---------------------------------------------------------------------------
# Consensus check


@dataclass(frozen=True)
class ConsensusOutcome:
    """Result of checking a tally: kind is 'none', 'consensus' or 'tie_at_cap'."""

    kind: str
    label: Optional[FstLabel] = None

    @property
    def settles(self) -> bool:
        return self.kind == "consensus"


NO_CONSENSUS = ConsensusOutcome("none")


def check_consensus(counts: dict[FstLabel, int], config: ProtocolConfig) -> ConsensusOutcome:
    """Apply the dynamic consensus threshold to a tally of counted annotations.

    ``counts`` maps each label to the number of counted (qualified, or all
    in raw mode) annotations. Returns consensus when one category leads
    every other by at least ``lead_margin``; otherwise, once the counted
    total reaches ``max_annotations``, the majority label wins and an
    exact tie escalates.
    """
    live = {lab: c for lab, c in counts.items() if c > 0}
    if not live:
        return NO_CONSENSUS
    ordered = sorted(live.items(), key=lambda kv: (-kv[1], kv[0].name))
    top_label, top_count = ordered[0]
    runner_up = ordered[1][1] if len(ordered) > 1 else 0
    if top_count - runner_up >= config.lead_margin:
        return ConsensusOutcome("consensus", top_label)
    if sum(live.values()) >= config.max_annotations:
        if runner_up == top_count:
            return ConsensusOutcome("tie_at_cap")
        return ConsensusOutcome("consensus", top_label)
    return NO_CONSENSUS


# ---------------------------------------------------------------------------
# Qualification window

NON_QUALIFIED = "NonQualified"
QUALIFIED = "Qualified"
DISQUALIFIED = "Disqualified"


@dataclass
class ScoreWindow:
    """Sliding match/mismatch record for one annotator.

    ``bits`` holds at most ``qual_window`` most-recent scorings; each entry
    is (matched, from_gold). ``scored_total`` counts every scoring ever
    pushed, which gates initial qualification.
    """

    bits: list[tuple[bool, bool]] = field(default_factory=list)
    scored_total: int = 0

    def push(self, matched: bool, from_gold: bool, window: int) -> None:
        self.bits.append((bool(matched), bool(from_gold)))
        if len(self.bits) > window:
            del self.bits[: len(self.bits) - window]
        self.scored_total += 1

    def agreement(self) -> float:
        if not self.bits:
            return 0.0
        return sum(1 for m, _ in self.bits if m) / len(self.bits)

    def gold_agreement(self) -> float:
        gold = [(m, g) for m, g in self.bits if g]
        if not gold:
            return 0.0
        return sum(1 for m, _ in gold if m) / len(gold)


def weight_of(window: ScoreWindow, config: ProtocolConfig) -> float:
    if config.weights_from_gold_only:
        return window.gold_agreement()
    return window.agreement()


def qualification_transition(state: str, window: ScoreWindow,
                             config: ProtocolConfig) -> Optional[str]:
    """New qualification state implied by the window, or None if unchanged.

    Qualification uses an inclusive boundary (agreement >= 40% qualifies);
    disqualification fires strictly below 40%.
    """
    agree = window.agreement()
    eligible = (window.scored_total >= config.qual_min_scored
                and agree >= config.qual_min_agreement)
    if state == NON_QUALIFIED and eligible:
        return QUALIFIED
    if state == QUALIFIED and agree < config.qual_min_agreement:
        return DISQUALIFIED
    if state == DISQUALIFIED and config.allow_requalification and eligible:
        return QUALIFIED
    return None


def halt_reason(incorrect_flags: int, inappropriate_flags: int,
                config: ProtocolConfig) -> Optional[str]:
    if inappropriate_flags >= config.inappropriate_halt:
        return "inappropriate_flags"
    if incorrect_flags >= config.incorrect_halt:
        return "incorrect_flags"
    return None
