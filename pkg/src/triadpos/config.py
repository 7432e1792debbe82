"""Flat ``key = value`` pipeline configuration."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .synthetic import GrowthConfig, grow
from .temporal_graph import IngestConfig, TemporalGraph, ingest_edge_list


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    # data: a file path, or "synthetic:key=value,..." for a generated graph
    data: str = ""
    name: str = ""
    sep: str = ","
    header: bool = False
    time_format: str = "int"
    bin_width: float = 1
    origin: float = 0
    task: str = "prominence"
    feature_sets: tuple[str, ...] = ("TPP",)
    t: int = 0
    delta_t: int = 1
    # prominence: "cohort" splits one arrival cohort; "temporal" trains on the
    # cohort at t_train. link: always temporal.
    split: str = "cohort"
    t_train: int | None = None
    train_fraction: float = 0.5
    obs_window: int = 1
    tem_lag: int | None = None
    influence_window: int | None = None
    bags: int = 10
    k: int = 50
    seed: int = 0
    runs: int = 1000
    dd_p: float = 0.01
    ks: tuple[int, ...] = (5, 10, 20)
    out: str = "out"

    def __post_init__(self):
        if self.task not in ("prominence", "link"):
            raise ConfigError(f"task must be 'prominence' or 'link', got {self.task!r}")
        if self.split not in ("cohort", "temporal"):
            raise ConfigError(f"split must be 'cohort' or 'temporal', got {self.split!r}")
        if not 0 < self.train_fraction < 1:
            raise ConfigError("train_fraction must lie in (0, 1)")

    @property
    def dataset_name(self) -> str:
        return self.name or Path(self.data).stem or "dataset"

    @property
    def ingest(self) -> IngestConfig:
        return IngestConfig(self.sep, self.header, self.time_format, self.bin_width, self.origin)

    def as_dict(self, with_out: bool = True) -> dict:
        d = asdict(self)
        if not with_out:
            d.pop("out")
        return d

    def digest(self) -> str:
        """Hash of everything that determines results (the output location
        does not)."""
        blob = json.dumps(self.as_dict(with_out=False), sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def override(self, **kw) -> PipelineConfig:
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **_coerce(kw))


_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key == "feature_set":
            key = "feature_sets"
        if key not in _TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        if not isinstance(value, str):
            out[key] = value
            continue
        typ = _TYPES[key]
        try:
            if typ == "bool":
                out[key] = value.strip().lower() in ("1", "true", "yes", "on")
            elif typ == "int":
                out[key] = int(value)
            elif typ == "int | None":
                out[key] = None if value.strip().lower() in ("", "none") else int(value)
            elif typ == "float":
                out[key] = float(value)
            elif typ == "tuple[str, ...]":
                out[key] = tuple(x.strip() for x in value.split(",") if x.strip())
            elif typ == "tuple[int, ...]":
                out[key] = tuple(int(x) for x in value.split(",") if x.strip())
            else:
                out[key] = value
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None
    return out


def parse_config(text: str) -> PipelineConfig:
    raw = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {n}: expected key = value")
        key, value = line.split("=", 1)
        raw[key.strip()] = value.strip()
    # separators are written literally; allow the escaped tab
    if raw.get("sep") == "\\t":
        raw["sep"] = "\t"
    return PipelineConfig(**_coerce(raw))


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    cfg = parse_config(path.read_text())
    if cfg.data and not cfg.data.startswith("synthetic:") and not Path(cfg.data).is_absolute():
        cfg = replace(cfg, data=str((path.parent / cfg.data)))
    return cfg


def parse_synthetic(data: str) -> GrowthConfig:
    body = data.split(":", 1)[1]
    kw = {}
    types = {f.name: f.type for f in fields(GrowthConfig)}
    for part in filter(None, (p.strip() for p in body.split(","))):
        k, v = part.split("=", 1)
        k = k.strip()
        if k not in types:
            raise ConfigError(f"unknown synthetic parameter {k!r}")
        kw[k] = {"int": int, "float": float}.get(types[k], str)(v.strip())
    return GrowthConfig(**kw)


def load_graph(cfg: PipelineConfig) -> TemporalGraph:
    if not cfg.data:
        raise ConfigError("no dataset configured (key 'data')")
    if cfg.data.startswith("synthetic:"):
        return grow(parse_synthetic(cfg.data))
    with open(cfg.data, encoding="utf-8") as fh:
        return ingest_edge_list(fh, cfg.ingest)
