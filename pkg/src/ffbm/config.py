"""Experiment configuration: defaults, config files, command-line overrides."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .dataio import DataFormatError


@dataclass
class RunConfig:
    """Full experiment description.

    Defaults reproduce the bundled political-books experiment; dataset paths
    left as None select the bundled data.
    """

    edges: str = None
    features: str = None
    categorical_features: str = None

    num_blocks: int = 3
    train_fraction: float = 0.7
    sigma: float = 1.0

    block_iters: int = 1000
    block_burn_in: float = 0.2
    block_thinning: int = 5
    proposal_smoothing: float = 1.0
    init_restarts: int = 8

    theta_iters: int = 10000
    theta_burn_in: float = 0.4
    theta_thinning: int = 10
    step_scale: float = 0.05

    reduce_multiplier: float = 1.0
    reduce_dim: int = None
    reduced_theta_iters: int = 10000
    reduced_theta_burn_in: float = 0.4
    reduced_theta_thinning: int = 10
    reduced_step_scale: float = None  # defaults to step_scale

    repetitions: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")
        if self.reduced_step_scale is None:
            self.reduced_step_scale = self.step_scale

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_STRING_FIELDS = {"edges", "features", "categorical_features"}
_INT_FIELDS = {
    "num_blocks", "block_iters", "block_thinning", "init_restarts",
    "theta_iters", "theta_thinning",
    "reduce_dim", "reduced_theta_iters", "reduced_theta_thinning", "repetitions", "seed",
}


def _coerce(key: str, value):
    if key not in _FIELD_TYPES:
        raise DataFormatError(f"unknown configuration key {key!r}")
    if value is None or (isinstance(value, str) and value.lower() in ("none", "null", "")):
        return None
    if key in _STRING_FIELDS:
        return str(value)
    try:
        if key in _INT_FIELDS:
            return int(value)
        return float(value)
    except (TypeError, ValueError):
        raise DataFormatError(f"configuration key {key!r} has non-numeric value {value!r}") from None


def parse_config_file(path) -> dict:
    """Read a config file: JSON object, or 'key = value' lines with # comments."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON config: {exc}") from None
        if not isinstance(data, dict):
            raise DataFormatError(f"{path}: JSON config must be an object")
        return data
    data = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataFormatError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
        key, _, value = line.partition("=")
        data[key.strip()] = value.strip()
    return data


def build_config(file_path=None, overrides=(), seed=None) -> RunConfig:
    """Assemble a RunConfig from an optional file plus key=value overrides."""
    mapping = {}
    if file_path is not None:
        mapping.update(parse_config_file(file_path))
    for item in overrides:
        if "=" not in item:
            raise DataFormatError(f"override {item!r} is not of the form key=value")
        key, _, value = item.partition("=")
        mapping[key.strip()] = value.strip()
    if seed is not None:
        mapping["seed"] = seed
    coerced = {key: _coerce(key, value) for key, value in mapping.items()}
    try:
        return RunConfig(**coerced)
    except (TypeError, ValueError) as exc:
        raise DataFormatError(f"invalid configuration: {exc}") from None
