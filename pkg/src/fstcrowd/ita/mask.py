"""Healthy-skin candidate masking.

The default rule combines an RGB gate with a BT.601 full-range YCbCr
band: skin iff R>95, G>40, B>20, R>G, R>B and Y>80, 85<=Cb<=135,
135<=Cr<=180. The bounds are configurable because range masks are
imperfect: they miss skin under odd lighting and pass skin-colored
backgrounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput


@dataclass(frozen=True)
class SkinRule:
    r_min: float = 95.0
    g_min: float = 40.0
    b_min: float = 20.0
    require_r_dominant: bool = True
    y_min: float = 80.0
    cb_min: float = 85.0
    cb_max: float = 135.0
    cr_min: float = 135.0
    cr_max: float = 180.0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, d: dict) -> "SkinRule":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


DEFAULT_SKIN_RULE = SkinRule()


def ycbcr(image: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """BT.601 full-range Y, Cb, Cr for an (..., 3) sRGB array."""
    arr = np.asarray(image, dtype=np.float64)
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return y, cb, cr


def skin_mask(image: np.ndarray, rule: SkinRule = DEFAULT_SKIN_RULE) -> np.ndarray:
    """Boolean mask of healthy-skin candidate pixels, same height/width.

    Deterministic: a pure function of the pixel values and the rule.
    """
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[-1] != 3:
        raise InvalidInput(f"expected an HxWx3 raster, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInput("zero-area image")
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    mask = (r > rule.r_min) & (g > rule.g_min) & (b > rule.b_min)
    if rule.require_r_dominant:
        mask &= (r > g) & (r > b)
    y, cb, cr = ycbcr(arr)
    mask &= (y > rule.y_min)
    mask &= (cb >= rule.cb_min) & (cb <= rule.cb_max)
    mask &= (cr >= rule.cr_min) & (cr <= rule.cr_max)
    return mask
