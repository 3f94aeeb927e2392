"""Service and pipeline configuration.

Config files are plain text, one ``key = value`` per line with '#'
comments; list values are comma-separated. Every CLI flag overrides its
config key, and ISF_CONFIG names the default file.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

ENV_CONFIG = "ISF_CONFIG"


@dataclass
class PipelineConfig:
    # data paths
    taxonomy_path: str | None = None
    pages_path: str | None = None
    index_path: str | None = None
    db_path: str = "db.jsonl"
    rdb_path: str = "rdb.jsonl"
    profiles_dir: str = "profiles"
    records_path: str | None = None
    desktop_dir: str | None = None
    ui_dir: str | None = None

    # pipeline behavior
    sources: list[str] = field(default_factory=lambda: ["crawl"])
    k_neighbors: int = 5
    relevance_threshold: float = 0.0
    cluster_enabled: bool = True
    expansion_enabled: bool = True
    expansion_cap: int = 5
    backend_cap: int = 20
    backend_timeout_s: float = 5.0
    result_k: int = 10
    kmeans_max_iter: int = 50
    classifier_max_depth: int | None = None

    # service
    host: str = "127.0.0.1"
    port: int = 8080
    private_sources: list[str] = field(default_factory=list)
    access_token: str | None = None
    remote_backends: list[tuple[str, str]] = field(default_factory=list)

    # crawling
    seeds_path: str | None = None
    budget: int = 100
    delta: float = 0.85
    epsilon: float = 0.1
    width: int = 4
    per_host_delay_ms: int = 500
    obey_robots: bool = True

    def validate(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")
        for name in ("k_neighbors", "expansion_cap", "backend_cap", "result_k",
                     "budget", "width", "kmeans_max_iter"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.per_host_delay_ms < 0:
            raise ValueError("per_host_delay_ms must be >= 0")


_BOOL_VALUES = {"on": True, "true": True, "yes": True, "1": True,
                "off": False, "false": False, "no": False, "0": False}


def _parse_value(name: str, raw: str, kind):
    raw = raw.strip()
    if kind == "bool":
        try:
            return _BOOL_VALUES[raw.lower()]
        except KeyError:
            raise ValueError(f"{name}: expected on/off, got {raw!r}") from None
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "list":
        return [item.strip() for item in raw.split(",") if item.strip()]
    if kind == "pairs":
        pairs = []
        for item in raw.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise ValueError(f"{name}: expected name=url, got {item!r}")
            key, value = item.split("=", 1)
            pairs.append((key.strip(), value.strip()))
        return pairs
    return raw


_FIELD_KINDS = {
    "sources": "list",
    "private_sources": "list",
    "remote_backends": "pairs",
    "k_neighbors": "int", "expansion_cap": "int", "backend_cap": "int",
    "result_k": "int", "budget": "int", "width": "int", "port": "int",
    "per_host_delay_ms": "int", "kmeans_max_iter": "int", "classifier_max_depth": "int",
    "relevance_threshold": "float", "backend_timeout_s": "float",
    "delta": "float", "epsilon": "float",
    "cluster_enabled": "bool", "expansion_enabled": "bool", "obey_robots": "bool",
}


def load_config(path=None) -> PipelineConfig:
    """Build a config from a file, the ISF_CONFIG environment variable, or
    defaults (in that order of preference)."""
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    config = PipelineConfig()
    if path is None:
        return config
    known = {f.name for f in fields(PipelineConfig)}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            value = _parse_value(key, raw, _FIELD_KINDS.get(key))
            setattr(config, key, value)
    config.validate()
    return config
