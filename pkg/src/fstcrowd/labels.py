"""Fitzpatrick skin type labels.

The annotation alphabet is seven-way: the six ordinal Fitzpatrick types
plus NotApplicable. NotApplicable takes part in tallies and consensus
like any other category but is dropped from correlation statistics.
"""

from __future__ import annotations

import enum


class FstLabel(enum.Enum):
    I = 1
    II = 2
    III = 3
    IV = 4
    V = 5
    VI = 6
    NA = 0  # NotApplicable

    @property
    def number(self) -> int | None:
        """Numeric projection 1..6, or None for NotApplicable."""
        return self.value if self is not FstLabel.NA else None

    @property
    def applicable(self) -> bool:
        return self is not FstLabel.NA

    def __str__(self) -> str:
        return self.name

    @classmethod
    def from_number(cls, n: int) -> "FstLabel":
        if not 1 <= int(n) <= 6:
            raise ValueError(f"FST number out of range 1..6: {n!r}")
        return cls(int(n))

    @classmethod
    def parse(cls, text: str) -> "FstLabel":
        """Parse '1'..'6', 'I'..'VI', or an NA spelling."""
        s = str(text).strip()
        if not s:
            raise ValueError("empty FST label")
        upper = s.upper()
        if upper in ("NA", "N/A", "NOTAPPLICABLE", "NOT APPLICABLE"):
            return cls.NA
        if upper in cls.__members__ and upper != "NA":
            return cls[upper]
        if s.isdigit():
            return cls.from_number(int(s))
        raise ValueError(f"not an FST label: {text!r}")


#: Fixed report ordering: NA first, then I..VI (matches the 7x7 matrices).
LABEL_ORDER = [FstLabel.NA, FstLabel.I, FstLabel.II,
               FstLabel.III, FstLabel.IV, FstLabel.V, FstLabel.VI]

APPLICABLE_LABELS = [l for l in LABEL_ORDER if l.applicable]


def unit_distance(a: FstLabel, b: FstLabel) -> int | None:
    """|numeric(a) - numeric(b)|, or None when either side is NA."""
    if not (a.applicable and b.applicable):
        return None
    return abs(a.value - b.value)
