"""Spec-level behavior of the consensus protocol rules and engine commands."""

import pytest

from fstcrowd.errors import (
    DuplicateAnnotation,
    ImageNotOpen,
    NoQualifiedAnnotations,
    NotReviewable,
    NotSettled,
    UnknownImage,
)
from fstcrowd.labels import FstLabel
from fstcrowd.platform import Platform
from fstcrowd.protocol import (
    ProtocolConfig,
    ScoreWindow,
    check_consensus,
    qualification_transition,
)
from fstcrowd.state import (
    ADJUDICATED,
    ESCALATED,
    HALTED,
    OPEN,
    SETTLED,
    Annotation,
    AnnotatorProfile,
    ConsensusState,
    ImageRecord,
    PlatformState,
    replay,
)

CFG = ProtocolConfig()

I, II, III, IV = FstLabel.I, FstLabel.II, FstLabel.III, FstLabel.IV


# ---------------------------------------------------------------------------
# check_consensus (pure rule)


def test_three_unanimous_is_consensus():
    out = check_consensus({II: 3}, CFG)
    assert out.kind == "consensus" and out.label is II


def test_lead_of_two_is_no_consensus():
    out = check_consensus({II: 5, III: 3}, CFG)
    assert out.kind == "none"


def test_tie_at_cap():
    out = check_consensus({II: 10, III: 10}, CFG)
    assert out.kind == "tie_at_cap"


def test_majority_at_cap():
    out = check_consensus({II: 11, III: 9}, CFG)
    assert out.kind == "consensus" and out.label is II


def test_na_counts_like_any_category():
    out = check_consensus({FstLabel.NA: 3}, CFG)
    assert out.kind == "consensus" and out.label is FstLabel.NA


# ---------------------------------------------------------------------------
# score_and_requalify (window rule)


def _window(matches: int, total: int) -> ScoreWindow:
    w = ScoreWindow()
    for i in range(total):
        w.push(i < matches, True, CFG.qual_window)
    return w


def test_qualifies_at_10_of_25():
    w = _window(10, 25)
    assert w.agreement() == pytest.approx(0.40)
    assert qualification_transition("NonQualified", w, CFG) == "Qualified"


def test_not_qualified_at_9_of_25():
    w = _window(9, 25)
    assert qualification_transition("NonQualified", w, CFG) is None


def test_not_qualified_below_25_scored():
    w = _window(10, 24)
    assert qualification_transition("NonQualified", w, CFG) is None


def test_disqualified_when_window_drops_below_040():
    # Qualified annotator: 25 matches, then mismatches slide the window down.
    w = ScoreWindow()
    state = "NonQualified"
    for _ in range(25):
        w.push(True, True, CFG.qual_window)
        state = qualification_transition(state, w, CFG) or state
    assert state == "Qualified"
    flips = []
    for _ in range(31):
        w.push(False, True, CFG.qual_window)
        new = qualification_transition(state, w, CFG)
        flips.append((w.agreement(), new))
        state = new or state
    # 20/50 = 0.40 stays qualified; the next mismatch (19/50 = 0.38) flips.
    assert flips[-2][0] == pytest.approx(0.40) and flips[-2][1] is None
    assert flips[-1][0] == pytest.approx(0.38) and flips[-1][1] == "Disqualified"


def test_disqualification_is_terminal_by_default():
    w = _window(0, 30)
    assert qualification_transition("Disqualified", w, CFG) is None
    perfect = _window(30, 30)
    assert qualification_transition("Disqualified", perfect, CFG) is None


def test_requalification_when_enabled():
    cfg = ProtocolConfig(allow_requalification=True)
    perfect = _window(30, 30)
    assert qualification_transition("Disqualified", perfect, cfg) == "Qualified"


# ---------------------------------------------------------------------------
# Engine: submit_annotation


def platform_with_qualified(n: int, config: ProtocolConfig | None = None,
                            extra_images: list[dict] | None = None) -> Platform:
    """Platform with n qualified annotators w0..w{n-1} (via a tiny window)."""
    config = config or ProtocolConfig(qual_min_scored=1, qual_window=50)
    p = Platform(config=config)
    entries = [{"image_id": "gold0", "file_path": "g.png", "source": "",
                "gold": {"expert1": "II"}}]
    entries.extend(extra_images or [])
    p.ingest_records(entries)
    for i in range(n):
        p.submit_annotation(f"w{i}", "gold0", II)
        assert p.state.profile(f"w{i}").state == "Qualified"
    return p


def fresh_image(p: Platform, image_id: str = "x0"):
    p.ingest_records([{"image_id": image_id, "file_path": image_id + ".png",
                       "source": "", "gold": {}}])


def test_three_consecutive_qualified_submissions_settle():
    p = platform_with_qualified(3)
    fresh_image(p)
    outcomes = [p.submit_annotation(f"w{i}", "x0", II) for i in range(3)]
    assert [o.new_status for o in outcomes] == [OPEN, OPEN, SETTLED]
    assert outcomes[-1].settled_label is II


def test_cap_majority_after_constructed_interleaving():
    # 20 qualified annotations, final counts II:11 III:9, lead never >= 3.
    p = platform_with_qualified(20)
    fresh_image(p)
    sequence = [II, III] * 9 + [II, II]
    statuses = []
    for i, label in enumerate(sequence):
        statuses.append(p.submit_annotation(f"w{i}", "x0", label))
    assert all(o.new_status == OPEN for o in statuses[:-1])
    assert statuses[-1].new_status == SETTLED
    assert statuses[-1].settled_label is II
    counts = p.state.consensus["x0"].tally.counts
    assert counts[II] == 11 and counts[III] == 9


def test_cap_tie_escalates():
    p = platform_with_qualified(20)
    fresh_image(p)
    for i, label in enumerate([II, III] * 10):
        out = p.submit_annotation(f"w{i}", "x0", label)
    assert out.new_status == ESCALATED
    assert p.state.consensus["x0"].settled_label is None


def test_submission_to_halted_image_rejected():
    p = platform_with_qualified(1)
    fresh_image(p)
    p.file_failure_report("x0", "w9", "InappropriateOrIrrelevant")
    with pytest.raises(ImageNotOpen):
        p.submit_annotation("w0", "x0", II)


def test_duplicate_annotation_rejected():
    p = platform_with_qualified(1)
    fresh_image(p)
    p.submit_annotation("w0", "x0", II)
    with pytest.raises(DuplicateAnnotation):
        p.submit_annotation("w0", "x0", III)


def test_unknown_image_rejected():
    p = Platform()
    with pytest.raises(UnknownImage):
        p.submit_annotation("w0", "nope", II)


def test_non_qualified_annotations_not_tallied_by_default():
    p = Platform()
    fresh_image(p)
    for w in ("a", "b", "c"):
        p.submit_annotation(w, "x0", II)
    c = p.state.consensus["x0"]
    assert c.status == OPEN and c.tally.counts == {} and c.tally.total_all == 3


def test_raw_mode_tallies_everyone():
    p = Platform(config=ProtocolConfig(raw_mode=True))
    fresh_image(p)
    for w in ("a", "b", "c"):
        out = p.submit_annotation(w, "x0", II)
    assert out.new_status == SETTLED and out.settled_label is II


# ---------------------------------------------------------------------------
# Agreement / difficulty


def _settled_state(weights_and_matches: list[tuple[float, bool]]) -> PlatformState:
    """Hand-built settled image with qualified annotations of given weights."""
    state = PlatformState(ProtocolConfig(qual_min_scored=5, qual_window=5))
    state.images["x"] = ImageRecord("x", "x.png")
    cstate = ConsensusState("x", status=SETTLED, settled_label=II)
    state.consensus["x"] = cstate
    state.annotation_order["x"] = []
    for i, (weight, matches_consensus) in enumerate(weights_and_matches):
        annotator = f"w{i}"
        prof = AnnotatorProfile(annotator, state="Qualified")
        n_match = round(weight * 5)
        for j in range(5):
            prof.window.push(j < n_match, True, 5)
        assert prof.window.agreement() == pytest.approx(weight)
        state.profiles[annotator] = prof
        label = II if matches_consensus else III
        state.annotations[("x", annotator)] = Annotation(
            f"a{i}", "x", annotator, label, i + 1, qualified_at_submission=True)
        state.annotation_order["x"].append(annotator)
    return state


def test_all_matching_gives_a1_d0():
    state = _settled_state([(0.8, True), (0.6, True)])
    a, d = state.agreement_difficulty("x")
    assert a == 1.0 and d == 0.0


def test_equal_weights_split():
    state = _settled_state([(0.6, True), (0.6, False)])
    a, d = state.agreement_difficulty("x")
    assert a == pytest.approx(0.5) and d == pytest.approx(0.5)


def test_weighted_agreement_two_thirds():
    state = _settled_state([(0.8, True), (0.4, False)])
    a, d = state.agreement_difficulty("x")
    assert a == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert d == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert a + d == pytest.approx(1.0, abs=1e-12)


def test_agreement_requires_settlement_and_qualified_annotations():
    p = platform_with_qualified(1)
    fresh_image(p)
    with pytest.raises(NotSettled):
        p.compute_agreement_difficulty("x0")
    state = _settled_state([])
    with pytest.raises(NoQualifiedAnnotations):
        state.agreement_difficulty("x")


def test_engine_stores_agreement_at_settlement():
    p = platform_with_qualified(3)
    fresh_image(p)
    for i in range(3):
        p.submit_annotation(f"w{i}", "x0", II)
    c = p.state.consensus["x0"]
    assert c.agreement == 1.0 and c.difficulty == 0.0


# ---------------------------------------------------------------------------
# Failure reports


def test_first_inappropriate_flag_halts():
    p = Platform()
    fresh_image(p)
    assert p.file_failure_report("x0", "w", "InappropriateOrIrrelevant") == HALTED


def test_incorrect_flags_halt_at_two():
    p = Platform()
    fresh_image(p)
    assert p.file_failure_report("x0", "w1", "IncorrectLabel") == OPEN
    assert p.file_failure_report("x0", "w2", "IncorrectLabel") == HALTED


def test_flag_unknown_image():
    p = Platform()
    with pytest.raises(UnknownImage):
        p.file_failure_report("nope", "w", "IncorrectLabel")


# ---------------------------------------------------------------------------
# Adjudication


def test_adjudicating_tie_gives_expert_label():
    p = platform_with_qualified(20)
    fresh_image(p)
    for i, label in enumerate([II, III] * 10):
        p.submit_annotation(f"w{i}", "x0", label)
    cstate = p.adjudicate("x0", "expert9", III)
    assert cstate.status == ADJUDICATED and cstate.settled_label is III


def test_adjudicating_open_image_is_not_reviewable():
    p = Platform()
    fresh_image(p)
    with pytest.raises(NotReviewable):
        p.adjudicate("x0", "expert9", III)


def test_adjudication_overrides_settled_and_log_retains_both():
    p = platform_with_qualified(3)
    fresh_image(p)
    for i in range(3):
        p.submit_annotation(f"w{i}", "x0", II)
    assert p.state.consensus["x0"].settled_label is II
    p.adjudicate("x0", "expert9", IV)
    assert p.state.consensus["x0"].settled_label is IV
    types = [e["type"] for e in p.log.events()]
    assert "ConsensusSettled" in types and "Adjudicated" in types
    # replay preserves adjudication precedence
    state = replay(p.log.events(), p.config)
    assert state.consensus["x0"].settled_label is IV
    assert state.consensus["x0"].status == ADJUDICATED


def test_qualified_at_submission_is_frozen():
    # Annotator disqualified after submitting: old annotation stays qualified.
    cfg = ProtocolConfig(qual_min_scored=1, qual_window=2)
    p = Platform(config=cfg)
    p.ingest_records([
        {"image_id": "g1", "file_path": "g", "source": "", "gold": {"expert1": "II"}},
        {"image_id": "g2", "file_path": "g", "source": "", "gold": {"expert1": "II"}},
        {"image_id": "g3", "file_path": "g", "source": "", "gold": {"expert1": "II"}},
        {"image_id": "x0", "file_path": "x", "source": "", "gold": {}},
    ])
    p.submit_annotation("w0", "g1", II)        # match: qualified
    p.submit_annotation("w0", "x0", III)        # counted as qualified
    assert p.state.annotations[("x0", "w0")].qualified_at_submission
    p.submit_annotation("w0", "g2", IV)         # mismatch
    p.submit_annotation("w0", "g3", IV)         # mismatch: window 0/2 -> disqualified
    assert p.state.profile("w0").state == "Disqualified"
    ann = p.state.annotations[("x0", "w0")]
    assert ann.qualified_at_submission  # frozen, never retroactively changed
    assert p.state.consensus["x0"].tally.counts[III] == 1
