"""Dataset manifest parsing.

Manifest format: CSV with header
``image_id,file_path,source,expert1,expert2,expert3`` where expert
columns hold ``1..6``, ``NA``, or empty. Images with at least one expert
value become gold seeds.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import ManifestParseError, MissingImageFiles
from .labels import FstLabel

MANIFEST_COLUMNS = ["image_id", "file_path", "source", "expert1", "expert2", "expert3"]


def parse_manifest(manifest_path: str | Path,
                   image_root: str | Path | None = None,
                   require_files: bool = True) -> list[dict]:
    """Parse a dataset manifest into ingestable entries.

    Raises ManifestParseError (with the offending line number) on a bad
    header, bad FST value, or duplicate image_id; MissingImageFiles when
    ``require_files`` and a referenced file does not exist under
    ``image_root`` (defaults to the manifest's directory).
    """
    manifest_path = Path(manifest_path)
    root = Path(image_root) if image_root is not None else manifest_path.parent
    entries: list[dict] = []
    seen: set[str] = set()
    with open(manifest_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        if [h.strip() for h in header] != MANIFEST_COLUMNS:
            raise ManifestParseError(
                f"bad header, expected {','.join(MANIFEST_COLUMNS)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(MANIFEST_COLUMNS):
                raise ManifestParseError(
                    f"expected {len(MANIFEST_COLUMNS)} columns, got {len(row)}",
                    line=lineno)
            image_id, file_path, source = (c.strip() for c in row[:3])
            if not image_id:
                raise ManifestParseError("empty image_id", line=lineno)
            if image_id in seen:
                raise ManifestParseError(f"duplicate image_id {image_id}", line=lineno)
            seen.add(image_id)
            gold = {}
            for expert, cell in zip(("expert1", "expert2", "expert3"), row[3:]):
                cell = cell.strip()
                if not cell:
                    continue
                try:
                    gold[expert] = FstLabel.parse(cell).name
                except ValueError as exc:
                    raise ManifestParseError(str(exc), line=lineno) from exc
            entries.append({
                "image_id": image_id,
                "file_path": file_path,
                "source": source,
                "gold": gold,
            })
    if require_files:
        missing = [e["file_path"] for e in entries
                   if not (root / e["file_path"]).exists()]
        if missing:
            raise MissingImageFiles(missing)
    return entries
