"""fstcrowd: skin-tone annotation with dynamic crowd consensus,
an ITA-based algorithmic annotator, and inter-rater reliability analytics."""

from .labels import FstLabel
from .platform import Platform
from .protocol import ProtocolConfig

__version__ = "0.1.0"

__all__ = ["FstLabel", "Platform", "ProtocolConfig", "__version__"]
