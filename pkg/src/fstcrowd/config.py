"""Application configuration: one TOML or JSON file plus environment.

Env vars: FSTCROWD_CONFIG (config path), FSTCROWD_DATA_DIR (overrides
data_dir), FSTCROWD_LISTEN (host:port).
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .ita.mask import DEFAULT_SKIN_RULE, SkinRule
from .protocol import ProtocolConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class Principal:
    principal_id: str
    role: str  # Annotator | Expert | Admin


@dataclass
class AppConfig:
    data_dir: Path = Path("./data")
    host: str = "127.0.0.1"
    port: int = 8000
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    skin_rule: SkinRule = DEFAULT_SKIN_RULE
    ita_aggregate: str = "mean"
    gold_probe_rate: float = 0.1
    routing_seed: int = 0
    fsync: bool = False
    #: bearer token -> principal; empty means open mode (role via X-Role).
    tokens: dict[str, Principal] = field(default_factory=dict)

    @property
    def events_path(self) -> Path:
        return self.data_dir / "events.jsonl"

    @property
    def ita_results_path(self) -> Path:
        return self.data_dir / "ita_results.csv"

    @property
    def thresholds_path(self) -> Path:
        return self.data_dir / "thresholds.json"

    @classmethod
    def from_dict(cls, d: dict) -> "AppConfig":
        cfg = cls()
        if "data_dir" in d:
            cfg.data_dir = Path(d["data_dir"])
        cfg.host = d.get("host", cfg.host)
        cfg.port = int(d.get("port", cfg.port))
        cfg.protocol = ProtocolConfig.from_dict(d.get("protocol", {}))
        if "skin_rule" in d:
            cfg.skin_rule = SkinRule.from_dict(d["skin_rule"])
        cfg.ita_aggregate = d.get("ita_aggregate", cfg.ita_aggregate)
        cfg.gold_probe_rate = float(d.get("gold_probe_rate", cfg.gold_probe_rate))
        cfg.routing_seed = int(d.get("routing_seed", cfg.routing_seed))
        cfg.fsync = bool(d.get("fsync", cfg.fsync))
        for token, spec in d.get("tokens", {}).items():
            cfg.tokens[token] = Principal(spec["principal_id"], spec["role"])
        return cfg


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load config from a TOML/JSON file; env vars override."""
    path = path or os.environ.get("FSTCROWD_CONFIG")
    data: dict = {}
    if path:
        raw = Path(path).read_bytes()
        if str(path).endswith(".json"):
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    cfg = AppConfig.from_dict(data)
    if "FSTCROWD_DATA_DIR" in os.environ:
        cfg.data_dir = Path(os.environ["FSTCROWD_DATA_DIR"])
    if "FSTCROWD_LISTEN" in os.environ:
        host, _, port = os.environ["FSTCROWD_LISTEN"].partition(":")
        cfg.host = host or cfg.host
        if port:
            cfg.port = int(port)
    return cfg
