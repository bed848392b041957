"""Colorimetry, skin masking, and ITA computation.

REFERENCE_LAB values were produced by an independent reference CIELAB
converter (scikit-image 0.2x rgb2lab, D65/2deg) ahead of this
implementation and frozen here as the oracle.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fstcrowd.errors import InvalidInput, NoSkinDetected
from fstcrowd.ita import (
    DEFAULT_THRESHOLDS,
    ItaThresholds,
    compute_ita,
    ita_to_fst,
    skin_mask,
    srgb_to_lab,
)
from fstcrowd.ita.angle import pixel_ita
from fstcrowd.ita.batch import annotate_image
from fstcrowd.ita.color import srgb_image_to_lab
from fstcrowd.labels import APPLICABLE_LABELS, FstLabel

# 22-color reference panel: (r, g, b) -> (L*, a*, b*)
REFERENCE_LAB = {
    (255, 255, 255): (100.0000000000, -0.0024549379, 0.0046534212),
    (0, 0, 0): (0.0, 0.0, 0.0),
    (188, 143, 143): (63.6073684833, 17.0112704964, 6.6126188636),
    (255, 0, 0): (53.2405879437, 80.0923082257, 67.2027510444),
    (0, 255, 0): (87.7350994883, -86.1830297444, 83.1797031754),
    (0, 0, 255): (32.2956725650, 79.1855909118, -107.8573002067),
    (128, 128, 128): (53.5850134522, -0.0014726456, 0.0027914515),
    (255, 255, 0): (97.1395070397, -21.5546810170, 94.4781222765),
    (0, 255, 255): (91.1133014407, -48.0905962330, -14.1263298201),
    (255, 0, 255): (60.3235065274, 98.2330538631, -60.8210152441),
    (229, 194, 152): (80.4661630332, 6.5165580440, 25.7803873541),
    (224, 172, 105): (73.7885075521, 11.2767112383, 41.5337125203),
    (198, 134, 66): (61.1786566114, 18.0410262963, 45.5912218786),
    (141, 85, 36): (41.6711228172, 18.9050353713, 37.2399225670),
    (255, 219, 172): (89.3482799158, 5.9263847481, 27.7703930267),
    (92, 51, 23): (25.8784883772, 15.7999750523, 25.1754754401),
    (64, 32, 16): (16.3090130102, 13.7603887490, 17.1962250905),
    (243, 190, 160): (80.9733286744, 14.9936875259, 22.4510035660),
    (45, 34, 30): (14.3767273896, 4.4915890547, 4.6959592443),
    (120, 90, 70): (40.8133017911, 9.4365694759, 16.3300407645),
    (210, 180, 140): (74.9757642390, 5.0198800314, 24.4309693739),
    (87, 58, 41): (27.3328560736, 10.5662407919, 15.7095199087),
}


# ---------------------------------------------------------------------------
# srgb_to_lab


def test_white_point_identity():
    L, a, b = srgb_to_lab(255, 255, 255)
    assert L == pytest.approx(100.0, abs=1e-9)
    assert abs(a) < 0.01 and abs(b) < 0.01


def test_black_identity():
    assert srgb_to_lab(0, 0, 0) == (0.0, 0.0, 0.0)


def test_rosybrown_matches_reference():
    got = srgb_to_lab(188, 143, 143)
    want = REFERENCE_LAB[(188, 143, 143)]
    assert got == pytest.approx(want, abs=1e-3)


def test_reference_panel_to_1e3():
    for rgb, want in REFERENCE_LAB.items():
        got = srgb_to_lab(*rgb)
        for g, w in zip(got, want):
            assert abs(g - w) < 1e-3, f"{rgb}: {got} vs {want}"


def test_channel_range_checked():
    with pytest.raises(ValueError):
        srgb_to_lab(256, 0, 0)
    with pytest.raises(ValueError):
        srgb_to_lab(0, -1, 0)


def test_array_and_scalar_paths_agree():
    rng = np.random.default_rng(7)
    img = rng.integers(0, 256, size=(5, 4, 3))
    lab = srgb_image_to_lab(img)
    for i in range(5):
        for j in range(4):
            want = srgb_to_lab(*img[i, j])
            assert lab[i, j] == pytest.approx(want, abs=1e-12)


# ---------------------------------------------------------------------------
# skin_mask


def _uniform(rgb, h=3, w=4):
    return np.full((h, w, 3), rgb, dtype=np.uint8)


def test_white_image_masks_empty():
    # Cr = 128 for neutral gray, outside the 135..180 skin band.
    assert not skin_mask(_uniform((255, 255, 255))).any()


def test_skin_tone_masks_full():
    assert skin_mask(_uniform((229, 194, 152))).all()


def test_green_masks_empty():
    assert not skin_mask(_uniform((0, 255, 0))).any()


def test_mask_shape_matches_image():
    mask = skin_mask(_uniform((229, 194, 152), h=7, w=2))
    assert mask.shape == (7, 2)


def test_zero_area_image_rejected():
    with pytest.raises(InvalidInput):
        skin_mask(np.zeros((0, 4, 3)))


def test_mask_is_deterministic():
    rng = np.random.default_rng(11)
    img = rng.integers(0, 256, size=(16, 16, 3))
    m1, m2 = skin_mask(img), skin_mask(img)
    assert np.array_equal(m1, m2)


# ---------------------------------------------------------------------------
# compute_ita / pixel_ita


def test_ita_zero_when_l_is_50():
    lab = np.array([[50.0, 3.0, 10.0]])
    assert pixel_ita(lab)[0] == pytest.approx(0.0, abs=1e-12)


def test_ita_of_l70_b10_is_atan2():
    lab = np.array([[70.0, 0.0, 10.0]])
    assert pixel_ita(lab)[0] == pytest.approx(63.43494882292201, abs=1e-9)


def test_ita_of_white_is_90_degrees():
    lab = np.array([[100.0, 0.0, 0.0]])
    assert pixel_ita(lab)[0] == pytest.approx(90.0, abs=1e-12)


def test_per_pixel_ita_matches_scalar_oracle():
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, size=(6, 5, 3))
    lab = srgb_image_to_lab(img)
    angles = pixel_ita(lab)
    for i in range(6):
        for j in range(5):
            want = math.degrees(math.atan2(lab[i, j, 0] - 50.0, lab[i, j, 2]))
            rel = abs(angles[i, j] - want) / max(abs(want), 1e-30)
            assert rel < 1e-9


def test_compute_ita_uniform_patch():
    img = _uniform((229, 194, 152))
    mask = np.ones((3, 4), dtype=bool)
    result = compute_ita(img, mask)
    L, _, b = srgb_to_lab(229, 194, 152)
    want = math.degrees(math.atan2(L - 50.0, b))
    assert result.mean_ita_deg == pytest.approx(want, rel=1e-12)
    assert result.masked_pixel_count == 12


def test_compute_ita_median_aggregate():
    img = np.zeros((1, 3, 3), dtype=np.uint8)
    img[0, 0] = (229, 194, 152)
    img[0, 1] = (229, 194, 152)
    img[0, 2] = (64, 32, 16)
    mask = np.ones((1, 3), dtype=bool)
    lab = srgb_image_to_lab(img.astype(float))
    angles = sorted(math.degrees(math.atan2(l - 50, b)) for l, _, b in lab[0])
    result = compute_ita(img, mask, aggregate="median")
    assert result.mean_ita_deg == pytest.approx(angles[1], rel=1e-12)


def test_empty_mask_raises_no_skin():
    img = _uniform((0, 255, 0))
    with pytest.raises(NoSkinDetected):
        compute_ita(img, np.zeros((3, 4), dtype=bool))


def test_mask_dimension_mismatch():
    with pytest.raises(InvalidInput):
        compute_ita(_uniform((1, 2, 3)), np.ones((2, 2), dtype=bool))


def test_annotate_image_falls_back_to_na():
    result = annotate_image(_uniform((0, 255, 0)))
    assert result.fst is FstLabel.NA and result.masked_pixel_count == 0


def test_annotate_image_labels_skin():
    result = annotate_image(_uniform((229, 194, 152)))
    assert result.fst in APPLICABLE_LABELS and result.masked_pixel_count == 12


# ---------------------------------------------------------------------------
# ita_to_fst


def test_above_t12_is_type_one():
    t = DEFAULT_THRESHOLDS
    assert ita_to_fst(t.t12 + 1.0, t) is FstLabel.I


def test_boundary_goes_darker():
    t = DEFAULT_THRESHOLDS
    assert ita_to_fst(t.t56, t) is FstLabel.VI
    assert ita_to_fst(t.t12, t) is FstLabel.II


def test_midband_is_type_four():
    t = DEFAULT_THRESHOLDS
    assert ita_to_fst((t.t34 + t.t45) / 2.0, t) is FstLabel.IV


def test_thresholds_must_strictly_decrease():
    with pytest.raises(ValueError):
        ItaThresholds(55, 41, 41, 10, -30)


def test_thresholds_json_roundtrip(tmp_path):
    path = tmp_path / "thresholds.json"
    DEFAULT_THRESHOLDS.save(path)
    assert ItaThresholds.load(path) == DEFAULT_THRESHOLDS
    import json
    doc = json.loads(path.read_text())
    assert set(doc) == {"t12", "t23", "t34", "t45", "t56"}


@given(st.floats(-90, 90), st.floats(-90, 90))
def test_fst_monotone_in_ita(x, y):
    lo, hi = sorted((x, y))
    darker, lighter = ita_to_fst(lo), ita_to_fst(hi)
    assert lighter.value <= darker.value
