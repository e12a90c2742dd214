"""Deterministic 70/15/15 splits stratified on sex and age quintile.

Strata are the cross product of sex {F, M, U} and age band {Q1..Q5,
UNKNOWN}. Within each stratum, ids are sorted, shuffled by a seeded
frozen PRNG, and partitioned by largest-remainder apportionment, so each
stratum's train/test/validation shares match the requested ratios up to
integer rounding and the whole assignment is reproducible from the seed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus_ingest import Report
from .determinism import ALGORITHM_ID, apportion, derive_seed, deterministic_shuffle

RATIO_TOLERANCE = 1e-9


class Partition(enum.Enum):
    TRAIN = "train"
    TEST = "test"
    VALIDATION = "validation"


class AgeBand(enum.Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"
    Q5 = "Q5"
    UNKNOWN = "UNKNOWN"


_QUINTILE_BANDS = (AgeBand.Q1, AgeBand.Q2, AgeBand.Q3, AgeBand.Q4)


@dataclass(frozen=True)
class QuintileBoundaries:
    """Cut points at the 20/40/60/80th percentiles of the non-missing ages."""

    cuts: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.cuts) != 4:
            raise ValueError("quintile boundaries need exactly 4 cuts")
        if any(a > b for a, b in zip(self.cuts, self.cuts[1:])):
            raise ValueError(f"cuts must be non-decreasing, got {self.cuts}")


@dataclass(frozen=True)
class StratumKey:
    sex: str
    age_band: AgeBand

    def __str__(self) -> str:
        return f"{self.sex}:{self.age_band.value}"


@dataclass
class SplitAssignment:
    """Immutable product of a split run; everything needed to reproduce it."""

    partition_of: dict[str, Partition]
    stratum_of_id: dict[str, StratumKey]
    seed: int
    ratios: tuple[float, float, float]
    algorithm: str = ALGORITHM_ID
    quintiles: QuintileBoundaries | None = None
    per_stratum_counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def ids_in(self, partition: Partition) -> list[str]:
        return [rid for rid, p in self.partition_of.items() if p is partition]


def age_quintiles(ages: Iterable[float]) -> QuintileBoundaries:
    """Nearest-rank 20/40/60/80th percentiles over the non-missing ages."""
    values = sorted(a for a in ages if a is not None)
    if len(values) < 5:
        raise ValueError(
            f"need at least 5 non-missing ages to form quintiles, got {len(values)}; "
            "fall back to a single age band"
        )
    n = len(values)
    cuts = tuple(values[math.ceil(p / 100 * n) - 1] for p in (20, 40, 60, 80))
    return QuintileBoundaries(cuts=cuts)


def stratum_of(report: Report, quintiles: QuintileBoundaries | None) -> StratumKey:
    """Band membership is boundary-inclusive: age <= cuts[k] lands in band k."""
    if report.age_yrs is None or quintiles is None:
        band = AgeBand.UNKNOWN
    else:
        band = AgeBand.Q5
        for cut, candidate in zip(quintiles.cuts, _QUINTILE_BANDS):
            if report.age_yrs <= cut:
                band = candidate
                break
    return StratumKey(sex=report.sex, age_band=band)


def _check_ratios(ratios: Sequence[float]) -> tuple[float, float, float]:
    if len(ratios) != 3:
        raise ValueError(f"expected 3 ratios, got {len(ratios)}")
    if any(r <= 0 for r in ratios):
        raise ValueError(f"ratios must be positive, got {tuple(ratios)}")
    if abs(sum(ratios) - 1.0) > RATIO_TOLERANCE:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)!r}")
    return (ratios[0], ratios[1], ratios[2])


def stratified_split(
    reports: Iterable[Report],
    ratios: Sequence[float] = (0.70, 0.15, 0.15),
    seed: int = 0,
) -> SplitAssignment:
    """Assign every report id to TRAIN/TEST/VALIDATION, stratum by stratum.

    Quintile boundaries are computed once over the whole input population
    so band definitions agree across partitions. When fewer than 5 ages
    are available every record falls into the single UNKNOWN band.
    """
    ratios = _check_ratios(ratios)
    reports = list(reports)
    if len({r.vaers_id for r in reports}) != len(reports):
        raise ValueError("duplicate report ids; a split over duplicates is ill-defined")

    ages = [r.age_yrs for r in reports if r.age_yrs is not None]
    quintiles = age_quintiles(ages) if len(ages) >= 5 else None

    strata: dict[StratumKey, list[str]] = {}
    stratum_of_id: dict[str, StratumKey] = {}
    for report in reports:
        key = stratum_of(report, quintiles)
        strata.setdefault(key, []).append(report.vaers_id)
        stratum_of_id[report.vaers_id] = key

    partition_of: dict[str, Partition] = {}
    per_stratum: dict[str, dict[str, int]] = {}
    for key in sorted(strata, key=str):
        ids = sorted(strata[key])
        deterministic_shuffle(ids, derive_seed(seed, "split", str(key)))
        counts = apportion(len(ids), ratios)
        cursor = 0
        for partition, count in zip(Partition, counts):
            for rid in ids[cursor : cursor + count]:
                partition_of[rid] = partition
            cursor += count
        per_stratum[str(key)] = {
            p.value: c for p, c in zip(Partition, counts)
        }

    return SplitAssignment(
        partition_of=partition_of,
        stratum_of_id=stratum_of_id,
        seed=seed,
        ratios=ratios,
        quintiles=quintiles,
        per_stratum_counts=per_stratum,
    )


def subsample_reports(
    reports: Sequence[Report],
    fraction: float,
    seed: int,
) -> list[Report]:
    """Stratum-proportional subsample of a plain report list.

    Same mechanics as stratified_subsample but self-contained: quintiles
    are computed over the given reports. Returns reports in input order.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    reports = list(reports)
    ages = [r.age_yrs for r in reports if r.age_yrs is not None]
    quintiles = age_quintiles(ages) if len(ages) >= 5 else None

    by_stratum: dict[StratumKey, list[str]] = {}
    for report in reports:
        by_stratum.setdefault(stratum_of(report, quintiles), []).append(report.vaers_id)

    selected: set[str] = set()
    for key in sorted(by_stratum, key=str):
        ids = sorted(by_stratum[key])
        deterministic_shuffle(ids, derive_seed(seed, "subsample", str(key)))
        take = apportion(len(ids), (fraction, 1.0 - fraction))[0]
        selected.update(ids[:take])
    return [r for r in reports if r.vaers_id in selected]


def stratified_subsample(
    assignment: SplitAssignment,
    partition: Partition,
    fraction: float,
    seed: int,
) -> set[str]:
    """Per-stratum largest-remainder sample of one partition.

    fraction 1.0 returns the whole partition; the same seed always returns
    the same set.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")

    by_stratum: dict[StratumKey, list[str]] = {}
    for rid, part in assignment.partition_of.items():
        if part is partition:
            by_stratum.setdefault(assignment.stratum_of_id[rid], []).append(rid)

    selected: set[str] = set()
    for key in sorted(by_stratum, key=str):
        ids = sorted(by_stratum[key])
        deterministic_shuffle(ids, derive_seed(seed, "subsample", str(key)))
        take = apportion(len(ids), (fraction, 1.0 - fraction))[0]
        selected.update(ids[:take])
    return selected
