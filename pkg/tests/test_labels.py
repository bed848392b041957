import pytest

from fstcrowd.labels import APPLICABLE_LABELS, LABEL_ORDER, FstLabel, unit_distance


def test_numeric_projection():
    assert [l.number for l in APPLICABLE_LABELS] == [1, 2, 3, 4, 5, 6]
    assert FstLabel.NA.number is None


def test_parse_accepts_numbers_romans_and_na():
    assert FstLabel.parse("4") is FstLabel.IV
    assert FstLabel.parse("iii") is FstLabel.III
    assert FstLabel.parse("NA") is FstLabel.NA
    assert FstLabel.parse("n/a") is FstLabel.NA
    assert FstLabel.parse(" VI ") is FstLabel.VI


@pytest.mark.parametrize("bad", ["", "0", "7", "VII", "x"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        FstLabel.parse(bad)


def test_label_order_is_seven_way():
    assert len(LABEL_ORDER) == 7
    assert LABEL_ORDER[0] is FstLabel.NA


def test_unit_distance():
    assert unit_distance(FstLabel.I, FstLabel.III) == 2
    assert unit_distance(FstLabel.V, FstLabel.V) == 0
    assert unit_distance(FstLabel.NA, FstLabel.II) is None
    assert unit_distance(FstLabel.NA, FstLabel.NA) is None
