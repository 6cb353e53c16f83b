"""End-to-end stage drivers behind the CLI commands.

Each function takes parsed inputs plus a RunConfig and writes its outputs
under the run directory. They are plain functions so tests can call them
without a subprocess. All primary outputs are deterministic for a given
(inputs, config, seed) triple; nothing here writes a timestamp.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .config import RunConfig
from .dataset import FeatureRow, SplitDataset, read_features_csv, write_features_csv
from .errors import PipelineError
from .evaluation import (
    EvaluationReport,
    confusion,
    evaluate_matrix,
    write_confusion_csv,
    write_evaluation_report,
    write_metrics_csv,
)
from .features import (
    ADDITIONAL_SLICE,
    extract_features,
    feature_names,
)
from .features.normalize import apply_bounds, fit_bounds, save_bounds
from .fsio import atomic_write_text
from .gafs import SearchResult, full_search, subset_seed, write_curve_csv, write_search_report
from .imaging import RoiRecord, crop_roi, equalize_histogram, load_png
from .manifest import DatasetManifest, ManifestEntry, assign_splits, save_manifest
from .neural import Model, NetworkShape, hidden_size, predict_batch, save_model, train
from .segmentation import (
    emit_review_bundle,
    load_review_bundle,
    load_selections,
    resolve_selection,
    threshold_sweep,
)


@dataclass
class SegmentOutcome:
    succeeded: list[str] = field(default_factory=list)
    failed: list[tuple[str, str]] = field(default_factory=list)  # (case_id, reason)

    @property
    def partial(self) -> bool:
        return bool(self.failed)


def _resolve(base: Path, relative: str) -> Path:
    p = Path(relative)
    return p if p.is_absolute() else base / p


def segment_entry(entry: ManifestEntry, manifest_dir: Path, cfg: RunConfig):
    """Crop, equalize and sweep one case; returns (roi record, candidates)."""
    full = load_png(_resolve(manifest_dir, entry.image), entry.spacing_mm)
    roi_img = equalize_histogram(crop_roi(full, entry.center, entry.radius))
    roi = RoiRecord(
        roi_id=entry.case_id,
        image=roi_img,
        patient_age=entry.patient_age,
        birads_label=entry.birads_label,
        view=entry.view,
    )
    cands = threshold_sweep(roi_img, cfg.sweep_steps, roi_id=entry.case_id)
    return roi, cands


def cmd_segment(
    manifest: DatasetManifest,
    cfg: RunConfig,
    manifest_dir: str | Path,
    out_dir: str | Path,
) -> SegmentOutcome:
    """Emit a review bundle per manifest entry; per-entry failures are
    recorded and the run continues."""
    out_dir = Path(out_dir)
    bundles = out_dir / "bundles"
    bundles.mkdir(parents=True, exist_ok=True)
    outcome = SegmentOutcome()
    lines = ["mammocad-segment v1"]
    for entry in manifest.entries:
        try:
            roi, cands = segment_entry(entry, Path(manifest_dir), cfg)
            emit_review_bundle(roi, cands, bundles)
        except PipelineError as exc:
            outcome.failed.append((entry.case_id, str(exc)))
            lines.append(f"fail\t{entry.case_id}\t{exc.code}\t{exc.message}")
            continue
        outcome.succeeded.append(entry.case_id)
        lines.append(f"ok\t{entry.case_id}\t{len(cands)}")
    lines.append(f"succeeded\t{len(outcome.succeeded)}/{len(manifest)}")
    atomic_write_text(out_dir / "segment-report.txt", "\n".join(lines) + "\n")
    return outcome


def cmd_features(
    manifest: DatasetManifest,
    selections_path: str | Path,
    cfg: RunConfig,
    bundles_dir: str | Path,
    out_dir: str | Path,
) -> list[FeatureRow]:
    """Extract the 130 features per reviewed ROI, normalize with bounds fitted
    on the training rows only, and write the CSV plus the bounds file."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not manifest.fully_split:
        manifest = assign_splits(manifest, cfg.seed)
        save_manifest(manifest, out_dir / "manifest-with-splits.tsv")
    selections = load_selections(selections_path)

    raw = np.zeros((len(manifest), len(feature_names())))
    for i, entry in enumerate(manifest.entries):
        bundle_dir = Path(bundles_dir) / entry.case_id
        if entry.case_id not in selections:
            raise PipelineError("unreviewed-roi", f"no selection for case {entry.case_id}")
        _, roi, cands = load_review_bundle(bundle_dir)
        roi = replace(roi, patient_age=entry.patient_age, birads_label=entry.birads_label)
        mask = resolve_selection(cands, selections)
        raw[i] = extract_features(roi, mask, cfg.glcm, cfg.margin)

    train_rows = [i for i, e in enumerate(manifest.entries) if e.split == "train"]
    bounds = fit_bounds(raw[train_rows], feature_names())
    normalized = apply_bounds(raw, bounds)
    save_bounds(bounds, out_dir / "bounds.json")

    size_col, age_col = ADDITIONAL_SLICE.start, ADDITIONAL_SLICE.start + 1
    rows = [
        FeatureRow(
            roi_id=e.case_id,
            values=normalized[i],
            mass_size_mm2=float(raw[i, size_col]),
            patient_age=float(raw[i, age_col]),
            label=e.birads_label,
            split=e.split,
        )
        for i, e in enumerate(manifest.entries)
    ]
    write_features_csv(rows, out_dir / "features.csv")
    return rows


@dataclass
class SelectOutcome:
    search: SearchResult
    model: Model
    report: EvaluationReport
    test_accuracy: float


def final_fit(
    ds: SplitDataset, genes: tuple[int, ...], cfg: RunConfig
) -> Model:
    """Retrain on the whole training split restricted to the chosen subset."""
    cols = [g - 1 for g in genes]
    shape = NetworkShape(len(cols), hidden_size(len(cols)))
    train_cfg = replace(cfg.train, seed=subset_seed(cfg.seed, genes))
    model = train(ds.train_x[:, cols], ds.train_y, shape, train_cfg)
    model.feature_ids = list(genes)
    return model


def cmd_select(
    csv_path: str | Path, cfg: RunConfig, out_dir: str | Path
) -> SelectOutcome:
    """Run the subset search, retrain the winner on the full training split,
    score it on the test split, and write every report."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = read_features_csv(csv_path)
    ds = SplitDataset(rows)
    n_cols = ds.train_x.shape[1]
    ga = cfg.ga if cfg.ga.n_features == n_cols else replace(cfg.ga, n_features=n_cols)

    if ga.fitness_split == "paper-test":
        ds.unlock_test_labels()
        result = full_search(ds.train_x, ds.train_y, ga, ds.test_x, ds.test_y)
    else:
        result = full_search(ds.train_x, ds.train_y, ga)

    names = feature_names()
    write_search_report(result, out_dir / "search-report.txt", names)
    write_curve_csv(result, out_dir / "curve.csv")

    genes = result.best.best
    model = final_fit(ds, genes, cfg)
    save_model(model, out_dir / "model.json")

    cols = [g - 1 for g in genes]
    preds = predict_batch(model, ds.test_x[:, cols])
    ds.unlock_test_labels()
    report = evaluate_matrix(confusion(ds.test_y, preds))
    write_evaluation_report(report, out_dir / "evaluation-report.txt")
    write_confusion_csv(report, out_dir / "confusion.csv")
    write_metrics_csv(report, out_dir / "metrics.csv")
    return SelectOutcome(result, model, report, report.accuracy)


def cmd_train(
    csv_path: str | Path,
    cfg: RunConfig,
    out_dir: str | Path,
    subset: tuple[int, ...] | None = None,
) -> Model:
    """Train one model on the training split (optionally a feature subset)
    and persist it."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = SplitDataset(read_features_csv(csv_path))
    genes = subset or tuple(range(1, ds.train_x.shape[1] + 1))
    if sorted(set(genes)) != sorted(genes) or not all(
        1 <= g <= ds.train_x.shape[1] for g in genes
    ):
        raise PipelineError("schema", f"bad feature subset {genes}")
    model = final_fit(ds, tuple(genes), cfg)
    save_model(model, out_dir / "model.json")
    return model


def cmd_evaluate(
    csv_path: str | Path, model: Model, out_dir: str | Path
) -> EvaluationReport:
    """Score a trained model on the test split and write the metric reports."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = SplitDataset(read_features_csv(csv_path))
    genes = model.feature_ids or list(range(1, ds.test_x.shape[1] + 1))
    cols = [g - 1 for g in genes]
    if max(cols) >= ds.test_x.shape[1]:
        raise PipelineError(
            "dimension-mismatch",
            f"model uses feature id {max(genes)} but the table has {ds.test_x.shape[1]} columns",
        )
    preds = predict_batch(model, ds.test_x[:, cols])
    ds.unlock_test_labels()
    report = evaluate_matrix(confusion(ds.test_y, preds))
    write_evaluation_report(report, out_dir / "evaluation-report.txt")
    write_confusion_csv(report, out_dir / "confusion.csv")
    write_metrics_csv(report, out_dir / "metrics.csv")
    return report


def auto_select_fixture(bundles_dir: str | Path, selections_path: str | Path) -> int:
    """Stand-in for the human review pass: pick a sensible candidate for every
    bundle and write the selections file. Returns the number of entries."""
    from .segmentation import SelectionEntry, auto_select, save_selections

    bundles_dir = Path(bundles_dir)
    entries = {}
    for desc_path in sorted(bundles_dir.glob("*/bundle.json")):
        _, _, cands = load_review_bundle(desc_path.parent)
        entries[desc_path.parent.name] = SelectionEntry(
            candidate_index=auto_select(cands), reviewer="auto"
        )
    if not entries:
        raise PipelineError("io", f"no bundles under {bundles_dir}")
    save_selections(entries, selections_path)
    return len(entries)
