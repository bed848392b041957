"""sRGB to CIELAB conversion (D65 reference white, 2 degree observer).

Chain: sRGB gamma expansion -> linear RGB -> XYZ (sRGB primaries) ->
CIELAB. Constants follow the classic sRGB derivation (matrix to six
decimals, D65 white 0.95047/1.0/1.08883) so results line up with common
reference converters; sRGB white lands at L=100 with |a*|,|b*| < 0.01.
"""

from __future__ import annotations

import numpy as np

# Linear RGB -> XYZ, sRGB primaries, D65.
_RGB_TO_XYZ = np.array([
    [0.412453, 0.357580, 0.180423],
    [0.212671, 0.715160, 0.072169],
    [0.019334, 0.119193, 0.950227],
])

_WHITE = np.array([0.95047, 1.0, 1.08883])

_EPS = 0.008856     # (6/29)^3 to the customary 6 decimals
_KAPPA = 7.787      # 1/(3*(6/29)^2) to the customary precision
_OFFSET = 16.0 / 116.0


def _gamma_expand(channels: np.ndarray) -> np.ndarray:
    c = channels / 255.0
    return np.where(c > 0.04045, ((c + 0.055) / 1.055) ** 2.4, c / 12.92)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _EPS, np.cbrt(t), _KAPPA * t + _OFFSET)


def srgb_image_to_lab(image: np.ndarray) -> np.ndarray:
    """Convert an (..., 3) uint8-range sRGB array to stacked L*, a*, b*."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.shape[-1] != 3:
        raise ValueError(f"expected trailing RGB axis of size 3, got {arr.shape}")
    linear = _gamma_expand(arr)
    xyz = linear @ _RGB_TO_XYZ.T
    f = _lab_f(xyz / _WHITE)
    L = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    return np.stack([L, a, b], axis=-1)


def srgb_to_lab(r: int, g: int, b: int) -> tuple[float, float, float]:
    """Convert one sRGB triplet (channels 0..255) to (L*, a*, b*)."""
    for name, v in (("r", r), ("g", g), ("b", b)):
        if not 0 <= v <= 255:
            raise ValueError(f"channel {name} out of range 0..255: {v}")
    lab = srgb_image_to_lab(np.array([[r, g, b]], dtype=np.float64))[0]
    return float(lab[0]), float(lab[1]), float(lab[2])
