"""Deterministic synthetic-annotator simulator.

Exercises the consensus protocol without real annotation data: truth
labels per image, a population of annotators with per-true-label emission
kernels, weighted round-robin scheduling, and a submission budget.
Everything is driven by one seeded RNG, so a transcript is a pure
function of its config.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .labels import APPLICABLE_LABELS, FstLabel
from .platform import Platform
from .protocol import ProtocolConfig
from .routing import eligible_images
from .state import OPEN

Kernel = dict[FstLabel, dict[FstLabel, float]]


def offby1_kernel(p: float) -> Kernel:
    """Symmetric off-by-one error model: mass p on truth, rest on neighbors.

    Interior classes split (1-p) evenly between the two adjacent classes;
    the end classes fold it onto their single neighbor, so the match
    probability is exactly p for every true label. NA emits NA.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0,1]")
    kernel: Kernel = {FstLabel.NA: {FstLabel.NA: 1.0}}
    for label in APPLICABLE_LABELS:
        row: dict[FstLabel, float] = {label: p}
        neighbors = [n for n in (label.value - 1, label.value + 1) if 1 <= n <= 6]
        for n in neighbors:
            row[FstLabel(n)] = (1.0 - p) / len(neighbors)
        kernel[label] = row
    return kernel


def identity_kernel() -> Kernel:
    return {label: {label: 1.0} for label in [FstLabel.NA, *APPLICABLE_LABELS]}


def _validate_kernel(kernel: Kernel) -> None:
    for truth, row in kernel.items():
        total = sum(row.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"kernel row for {truth} sums to {total}, not 1")


@dataclass
class AnnotatorSpec:
    annotator_id: str
    confusion_kernel: Kernel
    arrival_rate: float = 1.0

    def __post_init__(self):
        _validate_kernel(self.confusion_kernel)
        if self.arrival_rate <= 0:
            raise ValueError("arrival_rate must be positive")

    def emit(self, truth: FstLabel, rng: random.Random) -> FstLabel:
        row = self.confusion_kernel.get(truth)
        if row is None:
            return truth
        labels = sorted(row, key=lambda l: l.name)
        return rng.choices(labels, weights=[row[l] for l in labels], k=1)[0]

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotatorSpec":
        kern = d.get("kernel", {})
        if "diag" in kern:
            kernel = offby1_kernel(float(kern["diag"]))
        else:
            kernel = {FstLabel.parse(t): {FstLabel.parse(e): float(p)
                                          for e, p in row.items()}
                      for t, row in kern.items()}
        return cls(annotator_id=d["annotator_id"], confusion_kernel=kernel,
                   arrival_rate=float(d.get("arrival_rate", 1.0)))


@dataclass
class SimConfig:
    n_images: int
    population: list[AnnotatorSpec]
    truth: dict[str, FstLabel] = field(default_factory=dict)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    gold_fraction: float = 0.0
    seed: int = 0
    max_submissions: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.gold_fraction <= 1.0:
            raise ValueError("gold_fraction must be in [0,1]")

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        d = json.loads(text)
        truth = {i: FstLabel.parse(v) for i, v in (d.get("truth") or {}).items()}
        return cls(
            n_images=int(d["n_images"]),
            population=[AnnotatorSpec.from_dict(a) for a in d["population"]],
            truth=truth,
            protocol=ProtocolConfig.from_dict(d.get("protocol", {})),
            gold_fraction=float(d.get("gold_fraction", 0.0)),
            seed=int(d.get("seed", 0)),
            max_submissions=d.get("max_submissions"),
        )


@dataclass
class Transcript:
    config: SimConfig
    platform: Platform
    n_submissions: int
    budget_exhausted: bool

    @property
    def events(self) -> list[dict]:
        return self.platform.log.events()


def run_simulation(config: SimConfig) -> Transcript:
    rng = random.Random(config.seed)
    image_ids = [f"img{i:05d}" for i in range(config.n_images)]
    truth = dict(config.truth)
    for image_id in image_ids:
        if image_id not in truth:
            truth[image_id] = rng.choice(APPLICABLE_LABELS)
    config.truth = truth

    n_gold = round(config.gold_fraction * config.n_images)
    gold_ids = set(rng.sample(image_ids, n_gold)) if n_gold else set()

    platform = Platform(config=config.protocol)
    platform.ingest_records([{
        "image_id": i,
        "file_path": f"{i}.png",
        "source": "sim",
        "gold": {"expert1": truth[i].name} if i in gold_ids else {},
    } for i in image_ids])

    budget = config.max_submissions
    if budget is None:
        budget = config.n_images * config.protocol.max_annotations * 5 + 1000

    n_submissions = 0
    budget_exhausted = False
    credits = {spec.annotator_id: 0.0 for spec in config.population}
    specs = {spec.annotator_id: spec for spec in config.population}

    while config.population:
        # One scheduling round: arrival_rate accumulates as appearance credit.
        round_slots: list[str] = []
        for spec in config.population:
            credits[spec.annotator_id] += spec.arrival_rate
            appearances = int(credits[spec.annotator_id])
            credits[spec.annotator_id] -= appearances
            round_slots.extend([spec.annotator_id] * appearances)
        rng.shuffle(round_slots)

        submitted_this_round = 0
        for annotator_id in round_slots:
            if not any(c.status == OPEN for c in platform.state.consensus.values()):
                break
            candidates = eligible_images(platform.state, annotator_id)
            if not candidates:
                continue
            image_id = candidates[0]
            label = specs[annotator_id].emit(truth[image_id], rng)
            platform.submit_annotation(annotator_id, image_id, label)
            n_submissions += 1
            submitted_this_round += 1
            if n_submissions >= budget:
                budget_exhausted = any(
                    c.status == OPEN for c in platform.state.consensus.values())
                break
        open_left = any(c.status == OPEN for c in platform.state.consensus.values())
        if not open_left or submitted_this_round == 0 or n_submissions >= budget:
            break

    return Transcript(config=config, platform=platform,
                      n_submissions=n_submissions, budget_exhausted=budget_exhausted)


def summarize(transcript: Transcript) -> dict:
    """Aggregate metrics recounted from the transcript's event log."""
    truth = transcript.config.truth
    settled: dict[str, str] = {}
    submissions: dict[str, int] = {}
    to_settle: dict[str, int] = {}
    qual_states: dict[str, str] = {}
    n_images = 0
    for record in transcript.events:
        etype = record["type"]
        if etype == "DatasetIngested":
            n_images += len(record["images"])
        elif etype == "AnnotationSubmitted":
            submissions[record["image_id"]] = submissions.get(record["image_id"], 0) + 1
            qual_states.setdefault(record["annotator_id"], "NonQualified")
        elif etype in ("ConsensusSettled", "Adjudicated"):
            image_id = record["image_id"]
            settled[image_id] = record["label"]
            to_settle[image_id] = submissions.get(image_id, 0)
        elif etype == "QualificationChanged":
            qual_states[record["annotator_id"]] = record["to_state"]

    agree = sum(1 for i, lab in settled.items() if truth[i].name == lab)
    counts = {"NonQualified": 0, "Qualified": 0, "Disqualified": 0}
    for state_name in qual_states.values():
        counts[state_name] += 1
    return {
        "n_images": n_images,
        "n_submissions": transcript.n_submissions,
        "settlement_rate": len(settled) / n_images if n_images else 0.0,
        "mean_annotations_to_settle": (
            sum(to_settle.values()) / len(to_settle) if to_settle else None),
        "truth_agreement": agree / len(settled) if settled else None,
        "qualification_counts": counts,
        "budget_exhausted": transcript.budget_exhausted,
    }


def generate_pools(truth: dict[str, FstLabel],
                   population: list[AnnotatorSpec],
                   per_image: int,
                   seed: int = 0) -> dict[str, list[FstLabel]]:
    """Raw annotation pools (no protocol): per_image draws per image.

    Each draw picks an annotator by arrival weight and emits through its
    kernel; feed the result to irr.bootstrap_crowd_curve.
    """
    rng = random.Random(seed)
    weights = [spec.arrival_rate for spec in population]
    pools: dict[str, list[FstLabel]] = {}
    for image_id in sorted(truth):
        pool = []
        for _ in range(per_image):
            spec = rng.choices(population, weights=weights, k=1)[0]
            pool.append(spec.emit(truth[image_id], rng))
        pools[image_id] = pool
    return pools
