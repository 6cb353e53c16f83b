"""Per-feature min-max scaling with bounds learned from training rows only."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import PipelineError
from ..fsio import atomic_write_text

BOUNDS_VERSION = 1


@dataclass
class NormalizationBounds:
    names: list[str]
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if not (len(self.names) == self.lo.size == self.hi.size):
            raise ValueError("names and bounds disagree in length")
        if (self.hi < self.lo).any():
            raise ValueError("upper bound below lower bound")


def fit_bounds(matrix: np.ndarray, names: list[str]) -> NormalizationBounds:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError("need a non-empty 2D feature matrix")
    return NormalizationBounds(list(names), matrix.min(axis=0), matrix.max(axis=0))


def apply_bounds(matrix: np.ndarray, bounds: NormalizationBounds) -> np.ndarray:
    """Map each feature to [0, 1] as (d - min) / (max - min), clamping values
    outside the learned range; a zero-range feature maps to 0."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[-1] != bounds.lo.size:
        raise ValueError("feature count does not match bounds")
    span = bounds.hi - bounds.lo
    safe = np.where(span > 0, span, 1.0)
    out = (matrix - bounds.lo) / safe
    out = np.where(span > 0, out, 0.0)
    return np.clip(out, 0.0, 1.0)


def normalize_dataset(
    matrix: np.ndarray, names: list[str]
) -> tuple[np.ndarray, NormalizationBounds]:
    """Fit bounds on the given rows (the training portion) and scale them. The
    returned bounds are meant to be applied to unseen rows afterwards."""
    bounds = fit_bounds(matrix, names)
    return apply_bounds(matrix, bounds), bounds


def save_bounds(bounds: NormalizationBounds, path: str | Path) -> None:
    doc = {
        "version": BOUNDS_VERSION,
        "names": bounds.names,
        "min": [float(v) for v in bounds.lo],
        "max": [float(v) for v in bounds.hi],
    }
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def load_bounds(path: str | Path) -> NormalizationBounds:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise PipelineError("io", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PipelineError("schema", f"{path}: {exc}") from exc
    try:
        return NormalizationBounds(
            list(doc["names"]),
            np.array(doc["min"], dtype=float),
            np.array(doc["max"], dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PipelineError("schema", f"{path}: {exc}") from exc
