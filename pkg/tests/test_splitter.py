"""Stratified splitting: quintiles, strata, apportioned partitions,
deterministic reruns, subsampling."""

import pytest

from daedra_forge.determinism import apportion
from daedra_forge.splitter import (
    AgeBand,
    Partition,
    QuintileBoundaries,
    StratumKey,
    age_quintiles,
    stratified_split,
    stratified_subsample,
    stratum_of,
    subsample_reports,
)

from synthkit import make_report


def test_partition_values():
    assert [p.value for p in Partition] == ["train", "test", "validation"]


def test_age_quintiles_nearest_rank():
    # n=100, ages 1..100: nearest-rank cut at p% is the ceil(p*n/100)-th value
    assert age_quintiles(range(1, 101)).cuts == (20, 40, 60, 80)
    assert age_quintiles([5, 1, 4, 2, 3]).cuts == (1, 2, 3, 4)
    # repeated values produce repeated cuts
    assert age_quintiles([1, 1, 1, 1, 2]).cuts == (1, 1, 1, 1)


def test_age_quintiles_needs_five_ages():
    with pytest.raises(ValueError, match="5"):
        age_quintiles([1, 2, 3, 4])


def test_quintile_boundaries_must_be_sorted():
    with pytest.raises(ValueError):
        QuintileBoundaries(cuts=(4, 3, 2, 1))


def test_stratum_of_boundary_inclusive():
    quintiles = QuintileBoundaries(cuts=(20, 40, 60, 80))
    bands = {
        20: AgeBand.Q1,
        20.5: AgeBand.Q2,
        40: AgeBand.Q2,
        60: AgeBand.Q3,
        80: AgeBand.Q4,
        80.1: AgeBand.Q5,
        99: AgeBand.Q5,
    }
    for age, band in bands.items():
        report = make_report(0, sex="F", age=age)
        assert stratum_of(report, quintiles) == StratumKey("F", band), age


def test_stratum_of_unknown_band():
    quintiles = QuintileBoundaries(cuts=(20, 40, 60, 80))
    assert stratum_of(make_report(0, age=None), quintiles).age_band is AgeBand.UNKNOWN
    assert stratum_of(make_report(0, age=30.0), None).age_band is AgeBand.UNKNOWN


def test_stratum_key_str():
    assert str(StratumKey("F", AgeBand.Q1)) == "F:Q1"
    assert str(StratumKey("U", AgeBand.UNKNOWN)) == "U:UNKNOWN"


def test_split_ratio_validation():
    reports = [make_report(i, age=float(i + 1)) for i in range(10)]
    with pytest.raises(ValueError):
        stratified_split(reports, ratios=(0.5, 0.5))
    with pytest.raises(ValueError):
        stratified_split(reports, ratios=(0.9, 0.2, -0.1))
    with pytest.raises(ValueError):
        stratified_split(reports, ratios=(0.5, 0.3, 0.3))


def test_split_rejects_duplicate_ids():
    reports = [make_report(1, age=10.0), make_report(1, age=20.0)]
    with pytest.raises(ValueError, match="duplicate"):
        stratified_split(reports)


def test_split_single_stratum_exact_fractions():
    # one stratum (all F, one age value): counts follow apportionment
    reports = [make_report(i, sex="F", age=30.0) for i in range(100)]
    assignment = stratified_split(reports, seed=5)
    counts = {p: len(assignment.ids_in(p)) for p in Partition}
    assert counts[Partition.TRAIN] == 70
    assert counts[Partition.TEST] == 15
    assert counts[Partition.VALIDATION] == 15


def test_split_partitions_are_disjoint_and_cover():
    reports = [
        make_report(i, sex="FMU"[i % 3], age=float(1 + i % 50) if i % 7 else None)
        for i in range(500)
    ]
    assignment = stratified_split(reports, seed=11)
    all_ids = {r.vaers_id for r in reports}
    seen = []
    for p in Partition:
        seen.extend(assignment.ids_in(p))
    assert len(seen) == len(all_ids)
    assert set(seen) == all_ids


def test_split_reruns_identical():
    reports = [make_report(i, sex="FM"[i % 2], age=float(1 + i % 90)) for i in range(300)]
    a = stratified_split(reports, seed=3)
    b = stratified_split(list(reports), seed=3)
    assert a.partition_of == b.partition_of
    assert a.per_stratum_counts == b.per_stratum_counts
    c = stratified_split(reports, seed=4)
    assert a.partition_of != c.partition_of


def test_split_input_order_does_not_matter():
    reports = [make_report(i, sex="FM"[i % 2], age=float(1 + i % 90)) for i in range(200)]
    a = stratified_split(reports, seed=9)
    b = stratified_split(list(reversed(reports)), seed=9)
    assert a.partition_of == b.partition_of


def test_split_stratum_counts_match_apportionment():
    reports = [make_report(i, sex="FM"[i % 2], age=float(1 + i % 80)) for i in range(1000)]
    assignment = stratified_split(reports, seed=2)
    strata: dict[str, int] = {}
    for rid, key in assignment.stratum_of_id.items():
        strata[str(key)] = strata.get(str(key), 0) + 1
    for key, size in strata.items():
        expected = apportion(size, (0.70, 0.15, 0.15))
        got = [assignment.per_stratum_counts[key][p.value] for p in Partition]
        assert got == expected


def test_split_few_ages_falls_back_to_unknown_band():
    reports = [make_report(i, sex="F", age=None) for i in range(20)]
    reports += [make_report(100 + i, sex="M", age=float(i)) for i in range(3)]
    assignment = stratified_split(reports, seed=0)
    assert assignment.quintiles is None
    bands = {key.age_band for key in assignment.stratum_of_id.values()}
    assert bands == {AgeBand.UNKNOWN}


def test_subsample_reports_fraction_and_determinism():
    reports = [make_report(i, sex="FM"[i % 2], age=float(1 + i % 70)) for i in range(400)]
    sample = subsample_reports(reports, 0.10, seed=1)
    again = subsample_reports(reports, 0.10, seed=1)
    assert [r.vaers_id for r in sample] == [r.vaers_id for r in again]
    assert set(r.vaers_id for r in sample) <= {r.vaers_id for r in reports}
    # stratum-level apportionment sums over strata
    assert 0.08 <= len(sample) / len(reports) <= 0.12
    assert subsample_reports(reports, 1.0, seed=1) == reports


def test_subsample_reports_rejects_bad_fraction():
    reports = [make_report(i, age=30.0) for i in range(10)]
    for fraction in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            subsample_reports(reports, fraction, seed=0)


def test_stratified_subsample_within_partition():
    reports = [make_report(i, sex="FM"[i % 2], age=float(1 + i % 70)) for i in range(600)]
    assignment = stratified_split(reports, seed=8)
    chosen = stratified_subsample(assignment, Partition.TRAIN, 0.5, seed=1)
    train_ids = set(assignment.ids_in(Partition.TRAIN))
    assert chosen <= train_ids
    assert abs(len(chosen) - 0.5 * len(train_ids)) <= len(assignment.per_stratum_counts)
    assert stratified_subsample(assignment, Partition.TRAIN, 0.5, seed=1) == chosen
