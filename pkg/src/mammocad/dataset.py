"""Feature table persistence and split views for model training.

A features CSV holds one row per ROI: the id, the 130 normalized feature
values under their canonical names, the raw mass size and age for
traceability, the class label and the split tag. Header and column count are
checked strictly on read.

``SplitDataset`` wraps the rows for training code. Test labels stay locked
until ``unlock_test_labels`` is called, so nothing upstream of final scoring
can touch them by accident.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PipelineError
from .features import FEATURE_COUNT, feature_names
from .fsio import atomic_write_text
from .imaging import BIRADS_LABELS
from .manifest import SPLITS

METADATA_COLUMNS = ("mass_size_mm2", "patient_age", "label", "split")


def csv_header() -> list[str]:
    return ["roi_id", *feature_names(), *METADATA_COLUMNS]


@dataclass(frozen=True)
class FeatureRow:
    roi_id: str
    values: np.ndarray  # 130 normalized features
    mass_size_mm2: float
    patient_age: float
    label: str
    split: str

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=float).reshape(-1)
        )
        if self.values.shape != (FEATURE_COUNT,):
            raise ValueError(f"expected {FEATURE_COUNT} values, got {self.values.shape}")
        if self.label not in BIRADS_LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}")

    @property
    def label_index(self) -> int:
        return BIRADS_LABELS.index(self.label)


def write_features_csv(rows: list[FeatureRow], path: str | Path) -> None:
    lines = [",".join(csv_header())]
    for r in rows:
        cells = [r.roi_id]
        cells += [repr(float(v)) for v in r.values]
        cells += [repr(r.mass_size_mm2), repr(r.patient_age), r.label, r.split]
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_features_csv(path: str | Path) -> list[FeatureRow]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PipelineError("io", f"cannot read features {path}: {exc}") from exc
    lines = text.splitlines()
    expected = csv_header()
    if not lines or lines[0].split(",") != expected:
        raise PipelineError("schema", f"{path}: bad or missing header")
    rows: list[FeatureRow] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) != len(expected):
            raise PipelineError(
                "schema",
                f"{path} line {lineno}: {len(cells)} cells, expected {len(expected)}",
            )
        try:
            rows.append(
                FeatureRow(
                    roi_id=cells[0],
                    values=np.array([float(c) for c in cells[1 : 1 + FEATURE_COUNT]]),
                    mass_size_mm2=float(cells[1 + FEATURE_COUNT]),
                    patient_age=float(cells[2 + FEATURE_COUNT]),
                    label=cells[3 + FEATURE_COUNT],
                    split=cells[4 + FEATURE_COUNT],
                )
            )
        except ValueError as exc:
            raise PipelineError("schema", f"{path} line {lineno}: {exc}") from exc
    if not rows:
        raise PipelineError("schema", f"{path}: no data rows")
    return rows


class SplitDataset:
    """Train/test matrices from feature rows, with guarded test labels."""

    def __init__(self, rows: list[FeatureRow]):
        train = [r for r in rows if r.split == "train"]
        test = [r for r in rows if r.split == "test"]
        if not train or not test:
            raise PipelineError(
                "schema",
                f"need both splits, got {len(train)} train / {len(test)} test rows",
            )
        self.train_ids = [r.roi_id for r in train]
        self.test_ids = [r.roi_id for r in test]
        self.train_x = np.stack([r.values for r in train])
        self.train_y = np.array([r.label_index for r in train], dtype=int)
        self.test_x = np.stack([r.values for r in test])
        self._test_y = np.array([r.label_index for r in test], dtype=int)
        self._test_unlocked = False

    def unlock_test_labels(self) -> None:
        """Call exactly once, at final scoring."""
        self._test_unlocked = True

    @property
    def test_y(self) -> np.ndarray:
        if not self._test_unlocked:
            raise RuntimeError(
                "test labels are locked until final scoring; call unlock_test_labels()"
            )
        return self._test_y
