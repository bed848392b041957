"""Individual typology angle and its FST mapping.

ITA is computed per pixel as atan2(L* - 50, b*) in degrees and averaged
over the masked pixels (median available as an alternative aggregate).
atan2 rather than atan keeps b* = 0 well defined: pure white yields +90.

Thresholds map the angle to the six types; higher angle is lighter skin.
A value exactly on a cut belongs to the darker class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import InvalidInput, NoSkinDetected
from ..labels import FstLabel
from .color import srgb_image_to_lab


@dataclass(frozen=True)
class ItaThresholds:
    """Five cut points in degrees, strictly decreasing t12 > ... > t56."""

    t12: float
    t23: float
    t34: float
    t45: float
    t56: float

    def __post_init__(self):
        cuts = self.as_tuple()
        if any(a <= b for a, b in zip(cuts, cuts[1:])):
            raise ValueError(f"thresholds must be strictly decreasing: {cuts}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.t12, self.t23, self.t34, self.t45, self.t56)

    def to_json(self) -> str:
        return json.dumps({"t12": self.t12, "t23": self.t23, "t34": self.t34,
                           "t45": self.t45, "t56": self.t56}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ItaThresholds":
        d = json.loads(text)
        return cls(d["t12"], d["t23"], d["t34"], d["t45"], d["t56"])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ItaThresholds":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


#: Constitutive-pigmentation category cuts from the colorimetry literature.
DEFAULT_THRESHOLDS = ItaThresholds(55.0, 41.0, 28.0, 10.0, -30.0)


@dataclass
class ItaResult:
    mean_ita_deg: float
    masked_pixel_count: int
    fst: Optional[FstLabel] = None


def pixel_ita(lab: np.ndarray) -> np.ndarray:
    """Per-pixel ITA in degrees for an (..., 3) L*a*b* array."""
    return np.degrees(np.arctan2(lab[..., 0] - 50.0, lab[..., 2]))


def compute_ita(image: np.ndarray, mask: np.ndarray,
                aggregate: str = "mean") -> ItaResult:
    """ITA over the masked pixels of an sRGB raster (fst left unset).

    Raises NoSkinDetected on an empty mask; the caller maps that to
    FST = NotApplicable.
    """
    arr = np.asarray(image)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != arr.shape[:2]:
        raise InvalidInput(
            f"mask shape {mask.shape} does not match image {arr.shape[:2]}")
    count = int(mask.sum())
    if count == 0:
        raise NoSkinDetected("no healthy-skin pixels in mask")
    lab = srgb_image_to_lab(arr[mask])
    angles = pixel_ita(lab)
    if aggregate == "mean":
        value = float(np.mean(angles))
    elif aggregate == "median":
        value = float(np.median(angles))
    else:
        raise ValueError(f"unknown aggregate {aggregate!r}")
    return ItaResult(mean_ita_deg=value, masked_pixel_count=count)


def ita_to_fst(ita_deg: float, thresholds: ItaThresholds = DEFAULT_THRESHOLDS) -> FstLabel:
    """Map an ITA in degrees to an FST; boundary values go darker."""
    t12, t23, t34, t45, t56 = thresholds.as_tuple()
    if ita_deg > t12:
        return FstLabel.I
    if ita_deg > t23:
        return FstLabel.II
    if ita_deg > t34:
        return FstLabel.III
    if ita_deg > t45:
        return FstLabel.IV
    if ita_deg > t56:
        return FstLabel.V
    return FstLabel.VI
