from .angle import DEFAULT_THRESHOLDS, ItaResult, ItaThresholds, compute_ita, ita_to_fst
from .calibrate import calibrate_thresholds
from .color import srgb_to_lab, srgb_image_to_lab
from .mask import SkinRule, skin_mask

__all__ = [
    "DEFAULT_THRESHOLDS",
    "ItaResult",
    "ItaThresholds",
    "SkinRule",
    "calibrate_thresholds",
    "compute_ita",
    "ita_to_fst",
    "skin_mask",
    "srgb_image_to_lab",
    "srgb_to_lab",
]
