"""Dataset manifest: the list of cases a pipeline run works through.

The on-disk format is line-oriented, tab-separated text with a versioned
header so files stay diff-able and parseable from any language:

    mammocad-manifest v1
    e  <case_id>  <image>  <center_row>  <center_col>  <radius>  \
       <spacing_mm>  <patient_age>  <view>  <birads_label>  <split>

``split`` is ``train``, ``test`` or ``-`` for unassigned. Unassigned entries
get a stratified 60/40 draw keyed by the master seed.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import PipelineError
from .fsio import atomic_write_text
from .imaging import BIRADS_LABELS, VIEWS

MANIFEST_HEADER = "mammocad-manifest v1"
SPLITS = ("train", "test")
_ENTRY_FIELDS = 11


@dataclass(frozen=True)
class ManifestEntry:
    case_id: str
    image: str  # path, relative paths resolve against the manifest file
    center: tuple[int, int]  # (row, col) of the mass centre in the full image
    radius: int
    spacing_mm: float
    patient_age: float
    view: str
    birads_label: str
    split: str | None = None

    def __post_init__(self):
        if not self.case_id or any(c in self.case_id for c in "\t\n/"):
            raise ValueError(f"bad case_id {self.case_id!r}")
        if self.birads_label not in BIRADS_LABELS:
            raise ValueError(f"unknown label {self.birads_label!r}")
        if self.view not in VIEWS:
            raise ValueError(f"unknown view {self.view!r}")
        if self.split is not None and self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}")
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if self.spacing_mm <= 0:
            raise ValueError("spacing_mm must be positive")
        if not (0 <= self.patient_age <= 130):
            raise ValueError(f"implausible age {self.patient_age}")

    @property
    def label_index(self) -> int:
        return BIRADS_LABELS.index(self.birads_label)


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry]

    def __post_init__(self):
        ids = [e.case_id for e in self.entries]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise PipelineError("schema", f"duplicate case_ids: {', '.join(dupes)}")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def fully_split(self) -> bool:
        return all(e.split is not None for e in self.entries)

    def split_entries(self, split: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == split]


def _parse_entry(fields: list[str], lineno: int) -> ManifestEntry:
    if len(fields) != _ENTRY_FIELDS:
        raise PipelineError(
            "schema", f"line {lineno}: expected {_ENTRY_FIELDS} fields, got {len(fields)}"
        )
    (_, case_id, image, row, col, radius, spacing, age, view, label, split) = fields
    try:
        entry = ManifestEntry(
            case_id=case_id,
            image=image,
            center=(int(row), int(col)),
            radius=int(radius),
            spacing_mm=float(spacing),
            patient_age=float(age),
            view=view,
            birads_label=label,
            split=None if split == "-" else split,
        )
    except ValueError as exc:
        raise PipelineError("schema", f"line {lineno}: {exc}") from exc
    return entry


def parse_manifest(text: str) -> DatasetManifest:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MANIFEST_HEADER:
        raise PipelineError("schema", f"missing header line {MANIFEST_HEADER!r}")
    entries = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip() or raw.startswith("#"):
            continue
        fields = raw.split("\t")
        if fields[0] != "e":
            raise PipelineError("schema", f"line {lineno}: unknown record {fields[0]!r}")
        entries.append(_parse_entry(fields, lineno))
    if not entries:
        raise PipelineError("schema", "manifest has no entries")
    return DatasetManifest(entries)


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PipelineError("io", f"cannot read manifest {path}: {exc}") from exc
    return parse_manifest(text)


def format_manifest(manifest: DatasetManifest) -> str:
    lines = [MANIFEST_HEADER]
    for e in manifest.entries:
        lines.append(
            "\t".join(
                [
                    "e", e.case_id, e.image,
                    str(e.center[0]), str(e.center[1]), str(e.radius),
                    repr(e.spacing_mm), repr(e.patient_age),
                    e.view, e.birads_label, e.split or "-",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    atomic_write_text(path, format_manifest(manifest))


def assign_splits(
    manifest: DatasetManifest, seed: int, train_fraction: float = 0.6
) -> DatasetManifest:
    """Fill in missing split tags, stratified per label at the given fraction.

    Entries that already carry a tag keep it. Each label's unassigned entries
    are shuffled with a seed-derived stream and the first round(fraction * n)
    go to train; with 2+ unassigned entries both splits get at least one.
    """
    if not (0 < train_fraction < 1):
        raise ValueError("train_fraction must be in (0, 1)")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1,)))
    assigned: dict[str, str] = {}
    for label in BIRADS_LABELS:
        todo = [e.case_id for e in manifest.entries
                if e.birads_label == label and e.split is None]
        if not todo:
            continue
        n_train = round(train_fraction * len(todo))
        if len(todo) >= 2:
            n_train = min(max(n_train, 1), len(todo) - 1)
        order = rng.permutation(len(todo))
        for pos, idx in enumerate(order):
            assigned[todo[idx]] = "train" if pos < n_train else "test"
    entries = [
        e if e.split is not None else replace(e, split=assigned[e.case_id])
        for e in manifest.entries
    ]
    return DatasetManifest(entries)
