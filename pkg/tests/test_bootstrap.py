"""Bootstrap crowd-size curve behavior."""

import pytest

from fstcrowd.errors import PoolTooSmall
from fstcrowd.irr import bootstrap_crowd_curve
from fstcrowd.labels import FstLabel
from fstcrowd.sim import AnnotatorSpec, generate_pools, offby1_kernel


def _truth(n=80, seed=1):
    import random
    rng = random.Random(seed)
    return {f"i{k}": FstLabel(rng.randint(1, 6)) for k in range(n)}


def test_perfect_pool_is_rho_one_sd_zero():
    truth = _truth(40)
    pool = {i: [lab] * 10 for i, lab in truth.items()}
    points = bootstrap_crowd_curve(pool, truth, sizes=[3, 6], draws=8, rng_seed=0)
    for p in points:
        assert p.mean_rho == pytest.approx(1.0, abs=1e-12)
        assert p.sd_rho == 0.0
        assert p.ci_low <= p.mean_rho <= p.ci_high


def test_noisy_pool_improves_with_size():
    truth = _truth(100)
    population = [AnnotatorSpec(f"w{i}", offby1_kernel(0.45)) for i in range(5)]
    pool = generate_pools(truth, population, per_image=24, seed=3)
    points = bootstrap_crowd_curve(pool, truth, sizes=[3, 12], draws=25, rng_seed=5)
    assert points[1].mean_rho > points[0].mean_rho


def test_seeded_determinism():
    truth = _truth(30)
    population = [AnnotatorSpec("w", offby1_kernel(0.6))]
    pool = generate_pools(truth, population, per_image=6, seed=2)
    a = bootstrap_crowd_curve(pool, truth, sizes=[3], draws=1, rng_seed=42)
    b = bootstrap_crowd_curve(pool, truth, sizes=[3], draws=1, rng_seed=42)
    assert a == b
    c = bootstrap_crowd_curve(pool, truth, sizes=[3], draws=1, rng_seed=43)
    assert c != a  # different stream actually reshuffles


def test_pool_too_small():
    truth = _truth(10)
    pool = {i: [lab] * 4 for i, lab in truth.items()}
    with pytest.raises(PoolTooSmall):
        bootstrap_crowd_curve(pool, truth, sizes=[6], draws=2, rng_seed=0)


def test_with_replacement_permits_small_pools():
    truth = _truth(30)
    pool = {i: [lab] * 4 for i, lab in truth.items()}
    points = bootstrap_crowd_curve(pool, truth, sizes=[8], draws=3, rng_seed=0,
                                   with_replacement=True)
    assert points[0].mean_rho == pytest.approx(1.0, abs=1e-12)


def test_na_annotations_left_out_of_means():
    truth = {"a": FstLabel.II, "b": FstLabel.IV, "c": FstLabel.VI}
    pool = {
        "a": [FstLabel.II, FstLabel.NA, FstLabel.II],
        "b": [FstLabel.IV, FstLabel.IV, FstLabel.NA],
        "c": [FstLabel.VI, FstLabel.VI, FstLabel.VI],
    }
    points = bootstrap_crowd_curve(pool, truth, sizes=[3], draws=4, rng_seed=1)
    assert points[0].mean_rho == pytest.approx(1.0, abs=1e-12)


def test_ci_width_shrinks_for_most_seeds():
    truth = _truth(60)
    population = [AnnotatorSpec(f"w{i}", offby1_kernel(0.5)) for i in range(4)]
    pool = generate_pools(truth, population, per_image=50, seed=0)
    shrank = 0
    seeds = range(12)
    for seed in seeds:
        points = bootstrap_crowd_curve(pool, truth, sizes=[3, 48], draws=20,
                                       rng_seed=seed)
        w3 = points[0].ci_high - points[0].ci_low
        w48 = points[1].ci_high - points[1].ci_low
        shrank += w48 < w3
    assert shrank >= 0.95 * len(list(seeds))
