"""Run configuration shared by every CLI command."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .device import GRANULARITIES


@dataclass(frozen=True)
class RunConfig:
    bins: int = 20
    truncation_order: int = 4
    # None: first period of the series / first location in sort order.
    reference_month: str | None = None
    reference_location: str | None = None
    threshold_override: float | None = None
    group_granularity: str = "monthly"
    seed: int = 0
    dedup_daily: bool = False
    # "mean" (average over the dataset), "record" (per record) or a value in ns.
    gate_duration: str = "mean"

    def __post_init__(self):
        if int(self.bins) != self.bins or self.bins < 1:
            raise ValueError(f"bins must be a positive integer, got {self.bins!r}")
        if not 0 <= self.truncation_order <= 64:
            raise ValueError("truncation_order must be between 0 and 64")
        if self.group_granularity not in GRANULARITIES:
            raise ValueError(f"group_granularity must be one of {GRANULARITIES}")
        if self.threshold_override is not None and not self.threshold_override >= 0:
            raise ValueError("threshold_override must be non-negative")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.gate_duration not in ("mean", "record"):
            try:
                value = float(self.gate_duration)
            except ValueError:
                raise ValueError(f"gate_duration must be 'mean', 'record' or a number, "
                                 f"got {self.gate_duration!r}") from None
            if not value > 0:
                raise ValueError("gate_duration must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config key(s): {sorted(unknown)}")
        if "gate_duration" in data and data["gate_duration"] is not None:
            data = {**data, "gate_duration": str(data["gate_duration"])}
        return cls(**data)

    def updated(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def load_config(path) -> RunConfig:
    return RunConfig.from_dict(json.loads(Path(path).read_text()))
