"""Run configuration: one JSON file covering every stage's knobs.

Every key has a default, so ``{}`` is a valid config. Unknown keys anywhere
are rejected with error "schema" rather than silently ignored, since a typoed
knob that falls back to its default is the worst kind of bug to chase.

The master seed lives at the top level and is pushed into the nested GA and
training configs, so one number pins the whole run.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import PipelineError
from .features import GlcmParams, MarginParams
from .gafs import GaConfig
from .neural import TrainConfig

_TOP_KEYS = {"seed", "out_dir", "sweep_steps", "glcm", "margin", "train", "ga"}
_GLCM_KEYS = {"gray_bins", "angles", "distances"}
_MARGIN_KEYS = {"waveforms", "waveform_length", "angle_step"}
_TRAIN_KEYS = {"learning_rate", "momentum", "batch_size", "max_epochs", "patience"}
_GA_KEYS = {
    "n_features", "l_range", "elite_count", "crossover_prob", "mutation_prob",
    "stagnation_window", "population_size", "generation_cap", "fitness_split",
    "validation_fraction", "fitness_train", "n_jobs",
}


@dataclass
class RunConfig:
    seed: int = 0
    out_dir: str = "out"
    sweep_steps: int = 64
    glcm: GlcmParams = field(default_factory=GlcmParams)
    margin: MarginParams = field(default_factory=MarginParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    ga: GaConfig = field(default_factory=GaConfig)

    def with_seed(self, seed: int) -> "RunConfig":
        """Copy with the master seed pushed into the nested configs."""
        return replace(
            self,
            seed=seed,
            train=replace(self.train, seed=seed),
            ga=replace(
                self.ga, seed=seed, fitness_train=replace(self.ga.fitness_train)
            ),
        )


def _check_keys(section: str, given: dict, allowed: set[str]) -> None:
    unknown = sorted(set(given) - allowed)
    if unknown:
        raise PipelineError(
            "schema", f"unknown {section} config keys: {', '.join(unknown)}"
        )


def _build(section: str, cls, kwargs: dict):
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise PipelineError("schema", f"bad {section} config: {exc}") from exc


def parse_config(text: str) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PipelineError("schema", f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise PipelineError("schema", "config root must be a JSON object")
    _check_keys("top-level", raw, _TOP_KEYS)

    glcm_raw = dict(raw.get("glcm", {}))
    _check_keys("glcm", glcm_raw, _GLCM_KEYS)
    if "angles" in glcm_raw:
        glcm_raw["angles"] = tuple(float(a) for a in glcm_raw["angles"])
    if glcm_raw.get("distances") is not None and "distances" in glcm_raw:
        glcm_raw["distances"] = tuple(int(d) for d in glcm_raw["distances"])
    glcm = _build("glcm", GlcmParams, glcm_raw)

    margin_raw = dict(raw.get("margin", {}))
    _check_keys("margin", margin_raw, _MARGIN_KEYS)
    margin = _build("margin", MarginParams, margin_raw)

    train_raw = dict(raw.get("train", {}))
    _check_keys("train", train_raw, _TRAIN_KEYS)
    train = _build("train", TrainConfig, train_raw)

    ga_raw = dict(raw.get("ga", {}))
    _check_keys("ga", ga_raw, _GA_KEYS)
    if "l_range" in ga_raw:
        lr = ga_raw["l_range"]
        if not (isinstance(lr, (list, tuple)) and len(lr) == 2):
            raise PipelineError("schema", "ga.l_range must be a [lo, hi] pair")
        ga_raw["l_range"] = (int(lr[0]), int(lr[1]))
    if "fitness_train" in ga_raw:
        ft_raw = dict(ga_raw["fitness_train"])
        _check_keys("ga.fitness_train", ft_raw, _TRAIN_KEYS)
        ga_raw["fitness_train"] = _build("ga.fitness_train", TrainConfig, ft_raw)
    ga = _build("ga", GaConfig, ga_raw)

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise PipelineError("schema", f"seed must be a non-negative integer, got {seed!r}")
    sweep_steps = raw.get("sweep_steps", 64)
    if not isinstance(sweep_steps, int) or sweep_steps < 2:
        raise PipelineError("schema", f"sweep_steps must be an integer >= 2, got {sweep_steps!r}")
    out_dir = raw.get("out_dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise PipelineError("schema", "out_dir must be a non-empty string")

    cfg = RunConfig(
        seed=seed, out_dir=out_dir, sweep_steps=sweep_steps,
        glcm=glcm, margin=margin, train=train, ga=ga,
    )
    return cfg.with_seed(seed)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PipelineError("io", f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
