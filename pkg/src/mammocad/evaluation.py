"""Four-class evaluation: confusion matrix, per-class and aggregate metrics.

Rows of the confusion matrix are actual classes, columns predicted. Per-class
rates come from one-vs-rest reductions; micro aggregates pool the one-vs-rest
counts over classes and macro aggregates average the per-class values. Any
0 / 0 rate is reported as 0.0 and flagged as degenerate instead of raising.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PipelineError
from .fsio import atomic_write_text
from .imaging import BIRADS_LABELS
from .neural import N_CLASSES

METRIC_NAMES = ("accuracy", "sensitivity", "specificity", "ppv", "npv", "mcc")


@dataclass
class ClassMetrics:
    label: str
    tp: int
    fp: int
    fn: int
    tn: int
    sensitivity: float
    specificity: float
    ppv: float
    npv: float
    mcc: float
    degenerate: list[str] = field(default_factory=list)


@dataclass
class EvaluationReport:
    matrix: np.ndarray  # (4, 4) int, rows actual
    n_samples: int
    accuracy: float
    per_class: list[ClassMetrics]
    totals: dict[str, int]  # tp/fp/fn/tn pooled over classes
    micro: dict[str, float]
    macro: dict[str, float]
    degenerate: list[str] = field(default_factory=list)


def confusion(actual, predicted, n_classes: int = N_CLASSES) -> np.ndarray:
    actual = np.asarray(actual, dtype=int)
    predicted = np.asarray(predicted, dtype=int)
    if actual.shape != predicted.shape or actual.ndim != 1:
        raise PipelineError(
            "length-mismatch",
            f"actual {actual.shape} and predicted {predicted.shape} must be equal-length vectors",
        )
    if actual.size == 0:
        raise PipelineError("empty-evaluation", "no samples to evaluate")
    for name, arr in (("actual", actual), ("predicted", predicted)):
        if arr.min() < 0 or arr.max() >= n_classes:
            raise PipelineError(
                "bad-class-index", f"{name} labels must lie in 0..{n_classes - 1}"
            )
    m = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(m, (actual, predicted), 1)
    return m


def _rate(num: int, den: int, flag: str, degenerate: list[str]) -> float:
    if den == 0:
        degenerate.append(flag)
        return 0.0
    return num / den


def _mcc(tp: int, fp: int, fn: int, tn: int, flag: str, degenerate: list[str]) -> float:
    denom = math.sqrt(
        float(tp + fp) * float(tp + fn) * float(tn + fp) * float(tn + fn)
    )
    if denom == 0:
        degenerate.append(flag)
        return 0.0
    return (tp * tn - fp * fn) / denom


def evaluate_matrix(matrix: np.ndarray, labels=BIRADS_LABELS) -> EvaluationReport:
    """Compute the full metric set from a confusion matrix with rows actual."""
    m = np.asarray(matrix, dtype=int)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(labels):
        raise PipelineError(
            "dimension-mismatch", f"expected a {len(labels)}x{len(labels)} matrix, got {m.shape}"
        )
    if m.min() < 0:
        raise PipelineError("bad-confusion", "negative counts")
    n = int(m.sum())
    if n == 0:
        raise PipelineError("empty-evaluation", "confusion matrix has no samples")

    accuracy = float(np.trace(m)) / n
    per_class: list[ClassMetrics] = []
    pooled = {"tp": 0, "fp": 0, "fn": 0, "tn": 0}
    degenerate_all: list[str] = []
    for k, label in enumerate(labels):
        tp = int(m[k, k])
        fn = int(m[k].sum() - tp)
        fp = int(m[:, k].sum() - tp)
        tn = n - tp - fn - fp
        flags: list[str] = []
        cm = ClassMetrics(
            label=label,
            tp=tp, fp=fp, fn=fn, tn=tn,
            sensitivity=_rate(tp, tp + fn, f"{label}:sensitivity", flags),
            specificity=_rate(tn, tn + fp, f"{label}:specificity", flags),
            ppv=_rate(tp, tp + fp, f"{label}:ppv", flags),
            npv=_rate(tn, tn + fn, f"{label}:npv", flags),
            mcc=_mcc(tp, fp, fn, tn, f"{label}:mcc", flags),
            degenerate=flags,
        )
        per_class.append(cm)
        degenerate_all.extend(flags)
        for key, v in (("tp", tp), ("fp", fp), ("fn", fn), ("tn", tn)):
            pooled[key] += v

    micro_flags: list[str] = []
    micro = {
        "sensitivity": _rate(pooled["tp"], pooled["tp"] + pooled["fn"], "micro:sensitivity", micro_flags),
        "specificity": _rate(pooled["tn"], pooled["tn"] + pooled["fp"], "micro:specificity", micro_flags),
        "ppv": _rate(pooled["tp"], pooled["tp"] + pooled["fp"], "micro:ppv", micro_flags),
        "npv": _rate(pooled["tn"], pooled["tn"] + pooled["fn"], "micro:npv", micro_flags),
        "mcc": _mcc(pooled["tp"], pooled["fp"], pooled["fn"], pooled["tn"], "micro:mcc", micro_flags),
    }
    macro = {
        "sensitivity": float(np.mean([c.sensitivity for c in per_class])),
        "specificity": float(np.mean([c.specificity for c in per_class])),
        "ppv": float(np.mean([c.ppv for c in per_class])),
        "npv": float(np.mean([c.npv for c in per_class])),
        "mcc": float(np.mean([c.mcc for c in per_class])),
    }
    degenerate_all.extend(micro_flags)
    return EvaluationReport(
        matrix=m,
        n_samples=n,
        accuracy=accuracy,
        per_class=per_class,
        totals=pooled,
        micro=micro,
        macro=macro,
        degenerate=degenerate_all,
    )


def evaluate_predictions(actual, predicted, labels=BIRADS_LABELS) -> EvaluationReport:
    return evaluate_matrix(confusion(actual, predicted, len(labels)), labels)


def write_evaluation_report(report: EvaluationReport, path: str | Path) -> None:
    """Line-oriented, tab-separated report; floats use repr so a reader gets
    the exact values back."""
    lines = ["mammocad-evaluation v1", f"samples\t{report.n_samples}"]
    lines.append("matrix\tactual\\predicted\t" + "\t".join(BIRADS_LABELS))
    for label, row in zip(BIRADS_LABELS, report.matrix):
        lines.append("row\t" + label + "\t" + "\t".join(str(int(v)) for v in row))
    lines.append(f"accuracy\t{report.accuracy!r}")
    header = "class\tlabel\ttp\tfp\tfn\ttn\tsensitivity\tspecificity\tppv\tnpv\tmcc"
    lines.append(header)
    for c in report.per_class:
        lines.append(
            "c\t" + "\t".join(
                [c.label, str(c.tp), str(c.fp), str(c.fn), str(c.tn),
                 repr(c.sensitivity), repr(c.specificity), repr(c.ppv),
                 repr(c.npv), repr(c.mcc)]
            )
        )
    lines.append(
        "totals\t" + "\t".join(f"{k}={report.totals[k]}" for k in ("tp", "fp", "fn", "tn"))
    )
    for scope, metrics in (("micro", report.micro), ("macro", report.macro)):
        for name in ("sensitivity", "specificity", "ppv", "npv", "mcc"):
            lines.append(f"{scope}-{name}\t{metrics[name]!r}")
    if report.degenerate:
        lines.append("degenerate\t" + ",".join(report.degenerate))
    atomic_write_text(path, "\n".join(lines) + "\n")


def metrics_csv_row(report: EvaluationReport) -> tuple[list[str], list[str]]:
    """One flat header/value row covering every reported number, handy for
    aggregating many runs into a single table."""
    header = ["samples", "accuracy"]
    values = [str(report.n_samples), repr(report.accuracy)]
    for c in report.per_class:
        for name in ("sensitivity", "specificity", "ppv", "npv", "mcc"):
            header.append(f"{c.label}_{name}")
            values.append(repr(getattr(c, name)))
    for scope, metrics in (("micro", report.micro), ("macro", report.macro)):
        for name in ("sensitivity", "specificity", "ppv", "npv", "mcc"):
            header.append(f"{scope}_{name}")
            values.append(repr(metrics[name]))
    return header, values


def write_metrics_csv(report: EvaluationReport, path: str | Path) -> None:
    header, values = metrics_csv_row(report)
    atomic_write_text(path, ",".join(header) + "\n" + ",".join(values) + "\n")


def write_confusion_csv(report: EvaluationReport, path: str | Path) -> None:
    lines = ["actual\\predicted," + ",".join(BIRADS_LABELS)]
    for label, row in zip(BIRADS_LABELS, report.matrix):
        lines.append(label + "," + ",".join(str(int(v)) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")
