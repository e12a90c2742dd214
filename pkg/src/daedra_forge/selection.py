"""Candidate comparison harness.

Runs each candidate configuration through the same shortened training
protocol on the same subsample, collects micro precision/recall/F1 and
wall-clock runtime, and picks a winner: within an epsilon-wide band
below the best F1, ties go to the fastest run.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .baseline_model import TrainConfig, train
from .corpus_ingest import Report
from .tokenizer import Vocabulary

DEFAULT_EPSILON = 0.001
SELECTION_EPOCHS = 3


@dataclass
class CandidateConfig:
    """One tokenizer/model variant to compare.

    ``vocab`` carries the candidate's own vocabulary; every candidate is
    otherwise trained under the same shortened protocol, modulo explicit
    ``overrides`` on the training config.
    """

    name: str
    vocab: Vocabulary
    overrides: dict = field(default_factory=dict)


@dataclass
class ComparisonRow:
    name: str
    precision: float | None
    recall: float | None
    f1: float | None
    runtime_seconds: float
    error: str | None = None


def run_comparison(
    candidates: Sequence[CandidateConfig],
    train_set: Sequence[Report],
    test_set: Sequence[Report],
    base_config: TrainConfig | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> list[ComparisonRow]:
    """Train every candidate sequentially and tabulate the results.

    Sequential on purpose: concurrent candidates would contend for cores
    and corrupt the runtime column. A candidate that raises becomes a row
    with ``error`` set instead of aborting the sweep.
    """
    if not candidates:
        raise ValueError("no candidates to compare")
    names = [c.name for c in candidates]
    if len(set(names)) != len(names):
        raise ValueError("candidate names must be unique")
    base = base_config if base_config is not None else TrainConfig(epochs=SELECTION_EPOCHS)
    rows: list[ComparisonRow] = []
    for candidate in candidates:
        started = clock()
        try:
            config = replace(base, **candidate.overrides)
            best, _ = train(train_set, test_set, candidate.vocab, config)
        except Exception as exc:  # noqa: BLE001 - row-level isolation
            rows.append(
                ComparisonRow(
                    name=candidate.name,
                    precision=None,
                    recall=None,
                    f1=None,
                    runtime_seconds=clock() - started,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            continue
        micro = best.test_metrics.micro
        rows.append(
            ComparisonRow(
                name=candidate.name,
                precision=micro.precision,
                recall=micro.recall,
                f1=micro.f1,
                runtime_seconds=clock() - started,
            )
        )
    return sort_rows(rows)


def sort_rows(rows: Sequence[ComparisonRow]) -> list[ComparisonRow]:
    """Best F1 first; ties by runtime ascending; failed rows last."""
    return sorted(
        rows,
        key=lambda r: (
            r.f1 is None,
            -(r.f1 if r.f1 is not None else 0.0),
            r.runtime_seconds,
            r.name,
        ),
    )


def select_best(rows: Sequence[ComparisonRow], epsilon: float = DEFAULT_EPSILON) -> ComparisonRow:
    """Fastest row whose F1 is within ``epsilon`` of the maximum.

    A strict argmax would overfit noise in the third decimal; the epsilon
    band treats statistically indistinguishable scores as tied and lets
    runtime break the tie.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    scored = [r for r in rows if r.f1 is not None]
    if not scored:
        raise ValueError("no candidate finished successfully")
    best_f1 = max(r.f1 for r in scored)
    tied = [r for r in scored if r.f1 >= best_f1 - epsilon]
    return min(tied, key=lambda r: (r.runtime_seconds, r.name))


def render_table(rows: Sequence[ComparisonRow], selected: ComparisonRow | None = None) -> str:
    """Plain-text comparison table, one candidate per line."""
    headers = ("candidate", "precision", "recall", "F1", "runtime (s)", "")
    body: list[tuple[str, ...]] = []
    for row in rows:
        if row.error is not None:
            cells = (row.name, "-", "-", "-", f"{row.runtime_seconds:.2f}",
                     f"FAILED: {row.error}")
        else:
            mark = "<- selected" if selected is not None and row.name == selected.name else ""
            cells = (
                row.name,
                f"{row.precision:.4f}",
                f"{row.recall:.4f}",
                f"{row.f1:.4f}",
                f"{row.runtime_seconds:.2f}",
                mark,
            )
        body.append(cells)
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * widths[i] for i in range(len(headers))).rstrip(),
    ]
    for cells in body:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(cells)).rstrip())
    return "\n".join(lines)


def comparison_to_dict(
    rows: Sequence[ComparisonRow],
    selected: ComparisonRow,
    epsilon: float,
    seed: int,
    fraction: float | None = None,
) -> dict:
    return {
        "epsilon": epsilon,
        "seed": seed,
        "fraction": fraction,
        "rows": [
            {
                "name": r.name,
                "precision": r.precision,
                "recall": r.recall,
                "f1": r.f1,
                "runtime_seconds": r.runtime_seconds,
                "error": r.error,
            }
            for r in rows
        ],
        "selected": selected.name,
    }


def write_comparison_json(
    path: str | os.PathLike,
    rows: Sequence[ComparisonRow],
    selected: ComparisonRow,
    epsilon: float,
    seed: int,
    fraction: float | None = None,
) -> None:
    payload = comparison_to_dict(rows, selected, epsilon, seed, fraction)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
