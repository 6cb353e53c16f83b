"""Synthetic data so the whole pipeline runs without any external images.

Two generators live here. ``generate_demo_dataset`` draws blob phantoms whose
margin sharpness, lobulation and interior texture vary by class, writes them
as PNGs and emits a manifest. ``make_informative_dataset`` builds a bare
feature matrix where a handful of columns carry class signal and the rest are
noise, sized for subset-search experiments.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fsio import atomic_write_text
from .imaging import BIRADS_LABELS, GrayImage, save_png
from .manifest import DatasetManifest, ManifestEntry, format_manifest

# per class (B-2 .. B-5): rounder and sharper -> lobulated, fuzzy, spiculated
_LOBES = (0, 3, 5, 9)
_LOBE_AMP = (0.0, 0.08, 0.14, 0.22)
_EDGE_WIDTH = (1.0, 2.2, 3.5, 5.5)
_TEXTURE_AMP = (5.0, 9.0, 13.0, 18.0)


def _blob_levels(
    rng: np.random.Generator, side: int, class_index: int
) -> tuple[np.ndarray, tuple[int, int], int]:
    """One synthetic phantom; returns (levels, mass centre (row, col), r0)."""
    rows, cols = np.indices((side, side), dtype=float)
    cr = side // 2 + int(rng.integers(-6, 7))
    cc = side // 2 + int(rng.integers(-6, 7))
    r0 = side * (0.13 + 0.04 * rng.random())

    theta = np.arctan2(rows - cr, cols - cc)
    rho = np.hypot(rows - cr, cols - cc)
    phase = rng.uniform(0, 2 * np.pi)
    boundary = r0 * (1.0 + _LOBE_AMP[class_index] * np.sin(_LOBES[class_index] * theta + phase))
    if class_index == 3:
        boundary *= 1.0 + 0.10 * np.sin(17 * theta + rng.uniform(0, 2 * np.pi))
    inside = 1.0 / (1.0 + np.exp((rho - boundary) / _EDGE_WIDTH[class_index]))

    grating = np.sin(
        2 * np.pi * (rows * rng.uniform(0.05, 0.15) + cols * rng.uniform(0.05, 0.15))
    )
    fg = 172.0 + _TEXTURE_AMP[class_index] * (
        0.6 * rng.standard_normal((side, side)) + 0.7 * grating
    )
    bg = (
        68.0
        + 4.0 * rng.standard_normal((side, side))
        + 18.0 * (rows + cols) / (2 * side)
    )
    levels = np.clip(np.rint(bg * (1 - inside) + fg * inside), 0, 255)
    return levels.astype(np.int64), (cr, cc), int(round(r0))


def generate_demo_dataset(
    out_dir: str | Path,
    n_per_class: int = 3,
    side: int = 128,
    seed: int = 0,
    spacing_mm: float = 0.2,
) -> tuple[DatasetManifest, Path]:
    """Write ``4 * n_per_class`` phantom images plus a manifest (splits left
    unassigned). Returns the manifest and its file path."""
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(3,)))
    entries = []
    for class_index, label in enumerate(BIRADS_LABELS):
        for i in range(n_per_class):
            case_id = f"case-{label.lower()}-{i:02d}"
            levels, center, r0 = _blob_levels(rng, side, class_index)
            rel = f"images/{case_id}.png"
            save_png(GrayImage(levels, 8, spacing_mm), out_dir / rel)
            age = float(np.clip(40 + 9 * class_index + int(rng.integers(-8, 9)), 25, 95))
            entries.append(
                ManifestEntry(
                    case_id=case_id,
                    image=rel,
                    center=center,
                    radius=2 * r0,
                    spacing_mm=spacing_mm,
                    patient_age=age,
                    view=("CC", "MLO")[i % 2],
                    birads_label=label,
                )
            )
    manifest = DatasetManifest(entries)
    manifest_path = out_dir / "manifest.tsv"
    atomic_write_text(manifest_path, format_manifest(manifest))
    return manifest, manifest_path


# --- feature-matrix generator ----------------------------------------------

# Distinct class-membership bit patterns (one per informative column, order
# B-2..B-5). The first six give every pair of classes Hamming distance >= 3,
# so no small sub-code separates the classes as well as the full set does.
_CODE_COLUMNS = (
    (0, 1, 1, 0), (0, 0, 1, 1), (0, 1, 0, 1), (1, 1, 0, 1), (0, 1, 1, 1),
    (1, 0, 1, 1), (0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0),
    (1, 1, 1, 0), (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1),
)


@dataclass
class InformativeDataset:
    x: np.ndarray  # (n_samples, n_features) in [0, 1]
    y: np.ndarray  # class indices 0..3
    informative_ids: tuple[int, ...]  # 1-based column ids carrying signal


def make_informative_dataset(
    n_samples: int = 400,
    n_features: int = 130,
    n_informative: int = 6,
    seed: int = 0,
    noise_sigma: float = 0.17,
    low: float = 0.3,
    high: float = 0.7,
) -> InformativeDataset:
    """Balanced 4-class matrix: informative columns sit at ``low`` or ``high``
    depending on the class's code bit plus Gaussian jitter, all other columns
    are uniform noise."""
    if not (1 <= n_informative <= n_features):
        raise ValueError("n_informative must be in 1..n_features")
    if n_samples < 8:
        raise ValueError("need at least 2 samples per class")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(2,)))

    y = np.arange(n_samples) % 4
    y = y[rng.permutation(n_samples)]

    x = rng.uniform(0.0, 1.0, size=(n_samples, n_features))
    positions = np.sort(rng.permutation(n_features)[:n_informative])
    for j, col in enumerate(positions):
        bits = np.array(_CODE_COLUMNS[j % len(_CODE_COLUMNS)], dtype=float)
        means = low + (high - low) * bits[y]
        x[:, col] = np.clip(means + noise_sigma * rng.standard_normal(n_samples), 0, 1)
    return InformativeDataset(x, y, tuple(int(p) + 1 for p in positions))


def split_matrix(
    x: np.ndarray, y: np.ndarray, seed: int, train_fraction: float = 0.6
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Stratified train/test partition of a bare matrix, same scheme as the
    manifest splitter."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1,)))
    y = np.asarray(y, dtype=int)
    train_mask = np.zeros(len(y), dtype=bool)
    for cls in np.unique(y):
        members = np.nonzero(y == cls)[0]
        n_train = round(train_fraction * len(members))
        if len(members) >= 2:
            n_train = min(max(n_train, 1), len(members) - 1)
        order = rng.permutation(len(members))
        train_mask[members[order[:n_train]]] = True
    return x[train_mask], y[train_mask], x[~train_mask], y[~train_mask]
