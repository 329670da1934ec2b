"""Evaluation harness: confusion matrix, accuracy, weighted F1, reports.

Rejected queries count against accuracy (a null answer to a labeled query
is wrong) and show up as an extra confusion-matrix column, never a row:
the ground truth is always a real class.

The JSON report is fully deterministic so two runs over the same inputs
produce byte-identical files; timing, which is not, goes to the CSV
report instead.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import NULL_ACTION
from .errors import EmptyInput, ValidationError


@dataclass
class EvalReport:
    classes: list[str]
    true_labels: list[str]
    pred_labels: list[str]
    elapsed_ms: list[float] | None = None   # per-query classify time
    e2e_ms: list[float] | None = None       # embed + scale + encode + classify
    config_echo: dict = field(default_factory=dict)
    confusion: np.ndarray = field(init=False)   # (n_classes, n_classes + 1)

    def __post_init__(self):
        if len(self.true_labels) != len(self.pred_labels):
            raise ValidationError("label list lengths differ")
        if not self.true_labels:
            raise EmptyInput("nothing to score")
        for series in (self.elapsed_ms, self.e2e_ms):
            if series is not None and len(series) != len(self.true_labels):
                raise ValidationError("one timing per query required")
        index = {c: i for i, c in enumerate(self.classes)}
        unknown = set(self.true_labels) - set(index)
        if unknown:
            raise ValidationError(f"true labels outside registry: {sorted(unknown)}")
        n = len(self.classes)
        self.confusion = np.zeros((n, n + 1), dtype=int)
        for t, p in zip(self.true_labels, self.pred_labels):
            col = index[p] if p in index else n   # last column: rejected
            self.confusion[index[t], col] += 1

    @property
    def accuracy(self) -> float:
        correct = sum(t == p for t, p in zip(self.true_labels, self.pred_labels))
        return correct / len(self.true_labels)

    @property
    def per_class_f1(self) -> dict[str, float]:
        """F1 per class; 0.0 when precision + recall is undefined."""
        out = {}
        n = len(self.classes)
        for i, cls in enumerate(self.classes):
            tp = int(self.confusion[i, i])
            fn = int(self.confusion[i].sum()) - tp
            fp = int(self.confusion[:, i].sum()) - tp
            denom = 2 * tp + fp + fn
            out[cls] = 2 * tp / denom if denom else 0.0
        return out

    @property
    def weighted_f1(self) -> float:
        """Support-weighted mean of the per-class F1 scores."""
        f1 = self.per_class_f1
        support = self.confusion.sum(axis=1)
        total = int(support.sum())
        return float(sum(f1[c] * int(support[i])
                         for i, c in enumerate(self.classes)) / total)

    @property
    def mean_ms(self) -> float | None:
        if not self.elapsed_ms:
            return None
        return float(np.mean(self.elapsed_ms))

    @property
    def total_s(self) -> float | None:
        """Summed classification time over every query, in seconds."""
        if not self.elapsed_ms:
            return None
        return float(np.sum(self.elapsed_ms)) / 1e3

    def to_dict(self) -> dict:
        """Deterministic summary: no timing, stable key order downstream."""
        return {
            "classes": self.classes,
            "n_queries": len(self.true_labels),
            "accuracy": round(self.accuracy, 6),
            "weighted_f1": round(self.weighted_f1, 6),
            "per_class_f1": {c: round(v, 6)
                             for c, v in self.per_class_f1.items()},
            "rejected": int(self.confusion[:, -1].sum()),
            "config": self.config_echo,
        }


def write_report_json(report: EvalReport, path: str | Path) -> None:
    with open(path, "w") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def write_report_csv(report: EvalReport, path: str | Path) -> None:
    """Per-query rows with timing; the non-deterministic half of the report."""
    nan = [float("nan")] * len(report.true_labels)
    times = report.elapsed_ms or nan
    e2e = report.e2e_ms or nan
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["index", "true", "predicted", "correct",
                    "classify_ms", "end_to_end_ms"])
        for i, (t, p, ms, full) in enumerate(zip(report.true_labels,
                                                 report.pred_labels, times, e2e)):
            w.writerow([i, t, p, int(t == p), f"{ms:.3f}", f"{full:.3f}"])


def write_confusion_csv(report: EvalReport, path: str | Path) -> None:
    """Rows are true classes; columns are predictions plus a null column."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["true\\pred"] + report.classes + [NULL_ACTION])
        for i, cls in enumerate(report.classes):
            w.writerow([cls] + [int(v) for v in report.confusion[i]])


def load_report_json(path: str | Path) -> dict:
    with open(path) as f:
        return json.load(f)
