"""Classifier evaluation: class-wise P/R/F1, micro/macro/weighted averages,
per-event binary confusion matrices, and the predicted-vs-actual
set-combination table.

Conventions: metrics with a zero denominator are 0, not NaN, so reports
over missing classes aggregate cleanly (affected classes are listed in
``zero_support_classes``); the macro average covers only classes with
support. Micro averaging pools one-vs-rest counts over all 8 classes,
which for single-label multiclass equals accuracy.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Sequence

from .labels import CLASS_NAMES, NUM_CLASSES, EventKind, events_of


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class Averages:
    precision: float
    recall: float
    f1: float


@dataclass
class MetricsReport:
    per_class: dict[int, ClassMetrics]
    micro: Averages
    macro: Averages
    weighted: Averages
    per_event: dict[EventKind, tuple[ConfusionCounts, float, float, float]]
    n_examples: int
    zero_support_classes: list[int] = field(default_factory=list)


def _check_lengths(preds: Sequence[int], golds: Sequence[int]) -> None:
    if len(preds) != len(golds):
        raise ValueError(f"length mismatch: {len(preds)} preds vs {len(golds)} golds")


def confusion_for_class(
    preds: Sequence[int], golds: Sequence[int], class_id: int
) -> ConfusionCounts:
    """One-vs-rest confusion counts for a single class."""
    _check_lengths(preds, golds)
    tp = fp = fn = tn = 0
    for p, g in zip(preds, golds):
        if p == class_id and g == class_id:
            tp += 1
        elif p == class_id:
            fp += 1
        elif g == class_id:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def prf(counts: ConfusionCounts) -> tuple[float, float, float]:
    """(precision, recall, F1); zero-denominator metrics are 0."""
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
    return precision, recall, f1


def micro_f1(preds: Sequence[int], golds: Sequence[int]) -> float:
    """F1 over one-vs-rest counts pooled across all 8 classes."""
    _check_lengths(preds, golds)
    if not preds:
        raise ValueError("micro_f1 needs at least one example")
    return _pooled(preds, golds)[2]


def _pooled(preds: Sequence[int], golds: Sequence[int]) -> tuple[float, float, float]:
    tp = fp = fn = 0
    for c in range(NUM_CLASSES):
        counts = confusion_for_class(preds, golds, c)
        tp += counts.tp
        fp += counts.fp
        fn += counts.fn
    return prf(ConfusionCounts(tp=tp, fp=fp, fn=fn))


def classwise_report(preds: Sequence[int], golds: Sequence[int]) -> MetricsReport:
    """Full metrics over a batch of (predicted, actual) class ids."""
    _check_lengths(preds, golds)
    per_class: dict[int, ClassMetrics] = {}
    zero_support: list[int] = []
    for c in range(NUM_CLASSES):
        counts = confusion_for_class(preds, golds, c)
        p, r, f = prf(counts)
        support = counts.tp + counts.fn
        per_class[c] = ClassMetrics(precision=p, recall=r, f1=f, support=support)
        if support == 0:
            zero_support.append(c)

    populated = [m for m in per_class.values() if m.support > 0]
    if populated:
        macro = Averages(
            precision=sum(m.precision for m in populated) / len(populated),
            recall=sum(m.recall for m in populated) / len(populated),
            f1=sum(m.f1 for m in populated) / len(populated),
        )
        n = len(preds)
        weighted = Averages(
            precision=sum(m.precision * m.support for m in populated) / n,
            recall=sum(m.recall * m.support for m in populated) / n,
            f1=sum(m.f1 * m.support for m in populated) / n,
        )
    else:
        macro = weighted = Averages(0.0, 0.0, 0.0)

    micro = Averages(*_pooled(preds, golds)) if preds else Averages(0.0, 0.0, 0.0)

    per_event: dict[EventKind, tuple[ConfusionCounts, float, float, float]] = {}
    for kind in EventKind:
        tp = fp = fn = tn = 0
        for p, g in zip(preds, golds):
            p_has = kind in events_of(p)
            g_has = kind in events_of(g)
            if p_has and g_has:
                tp += 1
            elif p_has:
                fp += 1
            elif g_has:
                fn += 1
            else:
                tn += 1
        counts = ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)
        per_event[kind] = (counts, *prf(counts))

    return MetricsReport(
        per_class=per_class,
        micro=micro,
        macro=macro,
        weighted=weighted,
        per_event=per_event,
        n_examples=len(preds),
        zero_support_classes=zero_support,
    )


@dataclass
class SetCombinationTable:
    """8x8 predicted-vs-actual counts with a category per cell."""

    counts: dict[tuple[int, int], int]

    @staticmethod
    def category(predicted: int, actual: int) -> str:
        if predicted == actual:
            return "exact"
        if events_of(predicted) & events_of(actual):
            return "partial"
        return "wrong"


def set_combination_table(
    preds: Sequence[int], golds: Sequence[int]
) -> SetCombinationTable:
    _check_lengths(preds, golds)
    counts: dict[tuple[int, int], int] = {}
    for p, g in zip(preds, golds):
        counts[(p, g)] = counts.get((p, g), 0) + 1
    return SetCombinationTable(counts=counts)


def metrics_to_dict(report: MetricsReport, table: SetCombinationTable | None = None) -> dict:
    """JSON-ready view of a MetricsReport (the metrics.json schema)."""
    out = {
        "n_examples": report.n_examples,
        "per_class": {
            str(c): {
                "name": CLASS_NAMES[c],
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for c, m in sorted(report.per_class.items())
        },
        "micro": vars(report.micro),
        "macro": vars(report.macro),
        "weighted": vars(report.weighted),
        "per_event": {
            kind.name: {
                "tp": counts.tp,
                "fp": counts.fp,
                "fn": counts.fn,
                "tn": counts.tn,
                "precision": p,
                "recall": r,
                "f1": f,
            }
            for kind, (counts, p, r, f) in report.per_event.items()
        },
        "zero_support_classes": report.zero_support_classes,
    }
    if table is not None:
        out["combination_table"] = [
            {
                "predicted": p,
                "actual": a,
                "count": n,
                "category": SetCombinationTable.category(p, a),
            }
            for (p, a), n in sorted(table.counts.items())
        ]
    return out


def write_classwise_csv(report: MetricsReport, path: str | os.PathLike) -> None:
    """Class-wise metric table (one row per class, named)."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["class_id", "class", "precision", "recall", "f1", "support"])
        for c, m in sorted(report.per_class.items()):
            writer.writerow(
                [c, CLASS_NAMES[c], f"{m.precision:.4f}", f"{m.recall:.4f}",
                 f"{m.f1:.4f}", m.support]
            )


def write_combination_csv(table: SetCombinationTable, path: str | os.PathLike) -> None:
    """Predicted-vs-actual set combination counts for plotting."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["predicted", "actual", "count", "category"])
        for (p, a), n in sorted(table.counts.items()):
            writer.writerow([p, a, n, SetCombinationTable.category(p, a)])
