"""Flat dotted-key pipeline configuration with named presets.

A config is a flat mapping like ``{"classify.band": 0.2}``. Sources merge
in a fixed order: built-in defaults, then a preset or JSON file, then any
command-line ``key=value`` overrides. Unknown keys are rejected outright
rather than silently ignored, and the merged mapping is echoed into
evaluation reports so a result can always be traced to its settings.

Two presets ship with the package:

* ``heavy``: classify on the scaled feature vectors directly, compare
  against every reference, no path constraint. Slow and most accurate.
* ``encoded``: compress frames through the trained codec, shortlist 30
  references, constrain the warping path to a 20% band. Fast.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .autoencoder import TrainConfig
from .classify import ClassifierConfig
from .depth import LiftConfig
from .errors import ConfigError
from .normalize import NormalizeConfig

# key: (default, type). A None default carries its type alongside.
_SCHEMA: dict[str, tuple] = {
    "lift.target_area_mm": (90.0, float),
    "lift.min_window_px": (3, int),
    "lift.background_margin_m": (1.5, float),
    "lift.quartile": (0.25, float),
    "normalize.torso_multiplier": (2.5, float),
    "normalize.orient": (True, bool),
    "scale.clamp": (1.5, float),
    "codec.enabled": (True, bool),
    "codec.hidden": ([256, 64], list),
    "codec.latent_dim": (16, int),
    "codec.learning_rate": (1e-3, float),
    "codec.epochs": (200, int),
    "codec.batch_size": (64, int),
    "codec.patience": (20, int),
    "codec.val_fraction": (0.1, float),
    "codec.seed": (0, int),
    "classify.k": (5, int),
    "classify.shortlist": (30, int),      # 0 compares against every reference
    "classify.band": (0.2, float),
    "classify.reject_threshold": (None, float),
    "classify.vote_over_shortlist": (False, bool),
    "split.ratio": (0.2, float),
    "split.seed": (7, int),
    "stream.idle_gap_s": (0.5, float),
    "stream.motion_threshold": (0.02, float),
    "stream.queue_size": (64, int),
}

PRESETS: dict[str, dict] = {
    "heavy": {
        "codec.enabled": False,
        "classify.shortlist": 0,
        "classify.band": 1.0,
    },
    "encoded": {
        "codec.enabled": True,
        "classify.shortlist": 30,
        "classify.band": 0.2,
    },
}


def _coerce(key: str, value):
    default, typ = _SCHEMA[key]
    if value is None:
        if default is None:
            return None
        raise ConfigError(f"{key}: null is not allowed")
    if typ is bool:
        if isinstance(value, bool):
            return value
        raise ConfigError(f"{key}: expected true/false, got {value!r}")
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if typ is list:
        if not isinstance(value, list) or \
                not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{key}: expected a list of integers, got {value!r}")
        return list(value)
    raise ConfigError(f"{key}: unsupported type in schema")  # pragma: no cover


@dataclass
class PipelineConfig:
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        merged = {k: v for k, (v, _) in _SCHEMA.items()}
        for key, value in self.values.items():
            if key not in _SCHEMA:
                known = ", ".join(sorted(_SCHEMA))
                raise ConfigError(f"unknown config key {key!r} (known: {known})")
            merged[key] = _coerce(key, value)
        self.values = merged

    @classmethod
    def load(cls, source: str | None) -> "PipelineConfig":
        """Build from a preset name, a JSON file path, or None (defaults)."""
        if source is None:
            return cls()
        if source in PRESETS:
            return cls(dict(PRESETS[source]))
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"{source!r} is neither a preset "
                              f"({', '.join(sorted(PRESETS))}) nor a file")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{source}: invalid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{source}: expected a JSON object of dotted keys")
        return cls(data)

    def with_overrides(self, pairs: list[str]) -> "PipelineConfig":
        """Apply ``key=value`` strings; values parse as JSON scalars."""
        out = dict(self.values)
        for pair in pairs:
            key, sep, raw = pair.partition("=")
            if not sep or not key:
                raise ConfigError(f"override {pair!r} is not of the form key=value")
            if key not in _SCHEMA:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                raise ConfigError(f"{key}: cannot parse value {raw!r}") from None
            out[key] = _coerce(key, value)
        return PipelineConfig(out)

    def __getitem__(self, key: str):
        return self.values[key]

    def echo(self) -> dict:
        """The full merged mapping, for embedding into reports."""
        return dict(sorted(self.values.items()))

    # Typed views over the flat mapping.

    def lift_config(self) -> LiftConfig:
        return LiftConfig(
            target_area_mm=self["lift.target_area_mm"],
            min_window_px=self["lift.min_window_px"],
            background_margin_m=self["lift.background_margin_m"],
            quartile=self["lift.quartile"])

    def normalize_config(self) -> NormalizeConfig:
        return NormalizeConfig(
            torso_multiplier=self["normalize.torso_multiplier"],
            orient=self["normalize.orient"])

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            hidden=tuple(self["codec.hidden"]),
            latent_dim=self["codec.latent_dim"],
            learning_rate=self["codec.learning_rate"],
            epochs=self["codec.epochs"],
            batch_size=self["codec.batch_size"],
            seed=self["codec.seed"],
            patience=self["codec.patience"],
            val_fraction=self["codec.val_fraction"])

    def classifier_config(self) -> ClassifierConfig:
        m = self["classify.shortlist"]
        return ClassifierConfig(
            k=self["classify.k"],
            shortlist_size=None if m == 0 else m,
            band=self["classify.band"],
            reject_threshold=self["classify.reject_threshold"],
            vote_over_shortlist=self["classify.vote_over_shortlist"])
