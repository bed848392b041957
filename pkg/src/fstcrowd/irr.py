"""Inter-rater reliability statistics.

Reliability between two annotation methods is the Pearson correlation of
their numeric label projections (I..VI -> 1..6), dropping any image that
either method marks NotApplicable. Two correlations are compared by the
Fisher variance-stabilizing transform: Z = |atanh(r1) - atanh(r2)| /
sqrt(2/(n-3)), converted to a two-sided normal tail probability. Report
p-values are the minimum over all pairwise expert correlations.

Also here: exact and within-k agreement rates, 7x7 confusion matrices,
and the bootstrap crowd-size curve (correlation of the crowd-mean label
against a reference as a function of how many annotations are drawn).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInput,
    EmptyInput,
    InvalidRho,
    NoApplicablePairs,
    PoolTooSmall,
    SampleTooSmall,
)
from .labels import LABEL_ORDER, FstLabel, unit_distance


@dataclass(frozen=True)
class LabelVectorPair:
    """Aligned labels from two methods over a shared image set."""

    pairs: list[tuple[FstLabel, FstLabel]]

    @property
    def n_effective(self) -> int:
        return len(self.applicable())

    def applicable(self) -> list[tuple[FstLabel, FstLabel]]:
        return [(a, b) for a, b in self.pairs if a.applicable and b.applicable]

    @classmethod
    def from_maps(cls, labels_a: dict[str, FstLabel],
                  labels_b: dict[str, FstLabel]) -> "LabelVectorPair":
        common = sorted(set(labels_a) & set(labels_b))
        return cls([(labels_a[i], labels_b[i]) for i in common])


def pearson(pair: LabelVectorPair) -> float:
    """Sample Pearson correlation over the numeric projections."""
    applicable = pair.applicable()
    if len(applicable) < 3:
        raise DegenerateInput(f"need >= 3 applicable pairs, have {len(applicable)}")
    x = np.array([a.value for a, _ in applicable], dtype=float)
    y = np.array([b.value for _, b in applicable], dtype=float)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateInput("constant label vector")
    xc = x - x.mean()
    yc = y - y.mean()
    return float((xc @ yc) / math.sqrt((xc @ xc) * (yc @ yc)))


def fisher_z_compare(rho_ab: float, rho_cd: float, n: int) -> tuple[float, float]:
    """(Z, two-sided p) for the difference of two independent correlations."""
    for rho in (rho_ab, rho_cd):
        if abs(rho) >= 1.0:
            raise InvalidRho(f"|rho| must be < 1, got {rho}")
    if n < 4:
        raise SampleTooSmall(f"need n >= 4, got {n}")
    z1 = math.atanh(rho_ab)
    z2 = math.atanh(rho_cd)
    z_stat = abs(z1 - z2) / math.sqrt(2.0 / (n - 3))
    return z_stat, normal_two_sided_p(z_stat)


def normal_two_sided_p(z: float) -> float:
    """P(|N(0,1)| >= z), via the complementary error function."""
    return math.erfc(abs(z) / math.sqrt(2.0))


def min_pairwise_pvalue(expert_rhos: list[float], method_rho: float, n: int) -> float:
    """Smallest p comparing a method's rho against each expert-pair rho."""
    if not expert_rhos:
        raise DegenerateInput("no expert correlations to compare against")
    return min(fisher_z_compare(method_rho, er, n)[1] for er in expert_rhos)


# ---------------------------------------------------------------------------
# Agreement tables


@dataclass
class ConfusionMatrix:
    """7x7 counts with percentages; axis order NA, 1..6 on both sides."""

    labels: list[FstLabel]
    counts: np.ndarray          # rows: method A, columns: method B
    total: int

    def column_percent(self) -> np.ndarray:
        totals = self.counts.sum(axis=0, keepdims=True).astype(float)
        with np.errstate(invalid="ignore", divide="ignore"):
            pct = np.where(totals > 0, 100.0 * self.counts / totals, 0.0)
        return pct

    def row_percent(self) -> np.ndarray:
        totals = self.counts.sum(axis=1, keepdims=True).astype(float)
        with np.errstate(invalid="ignore", divide="ignore"):
            pct = np.where(totals > 0, 100.0 * self.counts / totals, 0.0)
        return pct

    def exact_match_rate(self) -> float:
        return float(np.trace(self.counts)) / self.total


def confusion_matrix(labels_a: dict[str, FstLabel],
                     labels_b: dict[str, FstLabel]) -> ConfusionMatrix:
    """Tabulate two label maps over their shared images."""
    common = sorted(set(labels_a) & set(labels_b))
    if not common:
        raise EmptyInput("no shared images")
    index = {label: i for i, label in enumerate(LABEL_ORDER)}
    counts = np.zeros((7, 7), dtype=int)
    for image_id in common:
        counts[index[labels_a[image_id]], index[labels_b[image_id]]] += 1
    return ConfusionMatrix(labels=list(LABEL_ORDER), counts=counts, total=len(common))


def within_k_agreement(labels_a: dict[str, FstLabel],
                       labels_b: dict[str, FstLabel], k: int) -> float:
    """Fraction of NA-free pairs at most k units apart."""
    distances = [unit_distance(labels_a[i], labels_b[i])
                 for i in set(labels_a) & set(labels_b)]
    distances = [d for d in distances if d is not None]
    if not distances:
        raise NoApplicablePairs("every pair has a NotApplicable side")
    return sum(1 for d in distances if d <= k) / len(distances)


# ---------------------------------------------------------------------------
# IRR report


@dataclass
class IrrReport:
    methods: list[str]
    rho: dict[tuple[str, str], float]
    n: dict[tuple[str, str], int]
    min_p: dict[tuple[str, str], float] = field(default_factory=dict)
    experts: list[str] = field(default_factory=list)

    def rho_matrix(self) -> np.ndarray:
        m = np.ones((len(self.methods), len(self.methods)))
        for i, a in enumerate(self.methods):
            for j, b in enumerate(self.methods):
                if i != j:
                    m[i, j] = self.rho[_key(a, b)]
        return m

    def to_dict(self) -> dict:
        return {
            "methods": self.methods,
            "experts": self.experts,
            "rho": [{"a": a, "b": b, "rho": v, "n": self.n[(a, b)]}
                    for (a, b), v in sorted(self.rho.items())],
            "min_p": [{"expert": e, "method": m, "p": p}
                      for (e, m), p in sorted(self.min_p.items())],
        }


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def irr_report(label_maps: dict[str, dict[str, FstLabel]],
               experts: list[str]) -> IrrReport:
    """Pairwise correlations plus minimum Fisher-Z p-values per method.

    The p-value for (expert e, method m) is the minimum over comparisons
    of rho(e, m) against every pairwise expert correlation; when m is
    itself an expert, the pair {e, m} is excluded from the comparison set.
    The Fisher n is the smaller effective sample of the two correlations
    being compared (NA exclusion makes the pairwise n's differ).
    Comparisons where either correlation is exactly +-1 are skipped (the
    Fisher transform is undefined there); an entry is omitted when none
    of its comparisons are computable.
    """
    methods = list(label_maps)
    report = IrrReport(methods=methods, rho={}, n={}, experts=list(experts))
    for i, a in enumerate(methods):
        for b in methods[i + 1:]:
            pair = LabelVectorPair.from_maps(label_maps[a], label_maps[b])
            report.rho[_key(a, b)] = pearson(pair)
            report.n[_key(a, b)] = pair.n_effective

    expert_pairs = [(x, y) for i, x in enumerate(experts)
                    for y in experts[i + 1:]]
    for method in methods:
        for expert in experts:
            if method == expert:
                continue
            usable = [p for p in expert_pairs if not (method in p and expert in p)]
            if not usable:
                continue
            k_me = _key(method, expert)
            ps = []
            for x, y in usable:
                k_xy = _key(x, y)
                n = min(report.n[k_me], report.n[k_xy])
                try:
                    ps.append(fisher_z_compare(report.rho[k_me], report.rho[k_xy], n)[1])
                except (InvalidRho, SampleTooSmall):
                    continue
            if ps:
                report.min_p[(expert, method)] = min(ps)
    return report


# ---------------------------------------------------------------------------
# Bootstrap crowd-size curve


@dataclass(frozen=True)
class CrowdCurvePoint:
    sample_size: int
    mean_rho: float
    sd_rho: float
    ci_low: float
    ci_high: float


def bootstrap_crowd_curve(pool: dict[str, list[FstLabel]],
                          reference: dict[str, FstLabel],
                          sizes: list[int],
                          draws: int = 25,
                          rng_seed: int = 0,
                          with_replacement: bool = False) -> list[CrowdCurvePoint]:
    """Correlation of the crowd-mean label with a reference, by crowd size.

    For each draw, ``size`` annotations are sampled per image (without
    replacement by default), averaged over their numeric projections (NA
    annotations are left out of the mean; an image whose sample is all NA
    is dropped for that draw, as are reference-NA images), and the mean
    vector is correlated against the reference. Each curve point reports
    the mean, standard deviation, and a normal-approximation 95% interval
    over the draws. Deterministic for a fixed seed.
    """
    images = sorted(i for i in pool if i in reference and reference[i].applicable)
    if not images:
        raise EmptyInput("no images with an applicable reference label")
    largest = max(sizes)
    if not with_replacement:
        short = [i for i in images if len(pool[i]) < largest]
        if short:
            raise PoolTooSmall(
                f"{len(short)} image(s) have fewer than {largest} annotations")
    rng = random.Random(rng_seed)
    points = []
    for size in sizes:
        rhos = []
        for _ in range(draws):
            ref_vals, means = [], []
            for image_id in images:
                annotations = pool[image_id]
                if with_replacement:
                    sample = rng.choices(annotations, k=size)
                else:
                    sample = rng.sample(annotations, size)
                numbers = [lab.value for lab in sample if lab.applicable]
                if not numbers:
                    continue
                means.append(sum(numbers) / len(numbers))
                ref_vals.append(reference[image_id].value)
            rhos.append(_pearson_floats(ref_vals, means))
        mean = float(np.mean(rhos))
        sd = float(np.std(rhos, ddof=1)) if len(rhos) > 1 else 0.0
        half = 1.959964 * sd
        points.append(CrowdCurvePoint(size, mean, sd, mean - half, mean + half))
    return points


def _pearson_floats(x: list[float], y: list[float]) -> float:
    if len(x) < 3:
        raise DegenerateInput("fewer than 3 images survived NA exclusion")
    xa = np.asarray(x) - np.mean(x)
    ya = np.asarray(y) - np.mean(y)
    denom = math.sqrt(float(xa @ xa) * float(ya @ ya))
    if denom == 0.0:
        raise DegenerateInput("constant vector in bootstrap draw")
    return float((xa @ ya) / denom)
