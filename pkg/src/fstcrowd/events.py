"""Append-only event log, the single source of truth for platform state.

Format: JSON Lines, one event per line, UTF-8. Each line is an object
``{"seq": n, "type": ..., ...payload}`` with strictly increasing ``seq``
starting at 1. Ordering authority is the sequence number, not wall-clock
time: the protocol depends on submission order.

The log supports a disk-backed mode (path given) and an in-memory mode
(path None) used by the simulator and fast tests.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterator, Optional

from .errors import LogCorruption

EVENT_TYPES = frozenset({
    "DatasetIngested",
    "AnnotationSubmitted",
    "FlagFiled",
    "ConsensusSettled",
    "ImageHalted",
    "ImageEscalated",
    "Adjudicated",
    "QualificationChanged",
})


class EventLog:
    """Single-writer append-only log with replayable iteration."""

    def __init__(self, path: Optional[str | Path] = None, fsync: bool = False):
        self.path = Path(path) if path is not None else None
        self.fsync = fsync
        self._memory: list[dict] = []
        self._last_seq = 0
        if self.path is not None and self.path.exists():
            for event in self._read_disk():
                self._last_seq = event["seq"]

    @property
    def last_seq(self) -> int:
        return self._last_seq

    def next_seq(self) -> int:
        return self._last_seq + 1

    def append(self, event_type: str, payload: dict) -> int:
        """Durably append one event; returns its sequence number."""
        if event_type not in EVENT_TYPES:
            raise ValueError(f"unknown event type: {event_type}")
        seq = self._last_seq + 1
        record = {"seq": seq, "type": event_type, **payload}
        line = json.dumps(record, separators=(",", ":"), sort_keys=False)
        if self.path is not None:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                if self.fsync:
                    os.fsync(fh.fileno())
        else:
            self._memory.append(record)
        self._last_seq = seq
        return seq

    def _read_disk(self) -> Iterator[dict]:
        assert self.path is not None
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise LogCorruption(f"line {lineno}: undecodable event") from exc
                yield record

    def __iter__(self) -> Iterator[dict]:
        """Iterate events in order, verifying seq is gap-free from 1."""
        source = self._read_disk() if self.path is not None else iter(list(self._memory))
        expected = 1
        for record in source:
            seq = record.get("seq")
            if seq != expected:
                raise LogCorruption(
                    f"expected seq {expected}, found {seq!r}", expected=expected, found=seq)
            if record.get("type") not in EVENT_TYPES:
                raise LogCorruption(f"seq {seq}: unknown event type {record.get('type')!r}")
            expected += 1
            yield record

    def events(self) -> list[dict]:
        return list(self)
