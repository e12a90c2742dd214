"""Streaming CSV ingestion: encodings, malformed-row policy, filtering,
JSONL round trips."""

import io
import json

import pytest

from daedra_forge.corpus_ingest import (
    IngestError,
    ParseStats,
    RawReport,
    Report,
    corpus_stats,
    derive_outcomes,
    filter_reports,
    parse_vaers_csv,
    read_reports_jsonl,
    report_from_dict,
    report_to_dict,
    write_reports_jsonl,
)
from daedra_forge.labels import OutcomeSet

from synthkit import VAERS_HEADER, flags_for_label, make_report, vaers_csv_bytes


def parse_all(data: bytes, **kwargs):
    stats = ParseStats()
    raws = list(parse_vaers_csv(io.BytesIO(data), stats=stats, **kwargs))
    return raws, stats


def simple_row(i: int = 0, **overrides) -> dict:
    row = {
        "VAERS_ID": str(900000 + i),
        "AGE_YRS": "33",
        "SEX": "F",
        "SYMPTOM_TEXT": "mild soreness at injection site",
    }
    row.update(overrides)
    return row


def test_parse_basic_rows():
    data = vaers_csv_bytes([simple_row(0), simple_row(1, SEX="M", AGE_YRS="7.5")])
    raws, stats = parse_all(data)
    assert stats.rows == 2 and stats.errors == 0
    assert raws[0].vaers_id == "900000"
    assert raws[0].sex == "F" and raws[0].age_yrs == 33.0
    assert raws[1].sex == "M" and raws[1].age_yrs == 7.5


def test_column_order_is_by_name_not_position():
    header = list(reversed(VAERS_HEADER)) + ["EXTRA_COL"]
    row = simple_row(3)
    row["EXTRA_COL"] = "ignored"
    data = vaers_csv_bytes([row], header=header)
    raws, _ = parse_all(data)
    assert raws[0].vaers_id == "900003"
    assert raws[0].symptom_text == "mild soreness at injection site"


def test_latin1_default_encoding():
    row = simple_row(0, SYMPTOM_TEXT="fi\xe8vre \xe9lev\xe9e")
    data = vaers_csv_bytes([row], encoding="latin-1")
    raws, _ = parse_all(data)
    assert raws[0].symptom_text == "fi\xe8vre \xe9lev\xe9e"


def test_utf8_bom_overrides_default():
    row = simple_row(0, SYMPTOM_TEXT="fi\xe8vre 39°C")
    data = vaers_csv_bytes([row], encoding="utf-8", bom=True)
    raws, _ = parse_all(data)  # default latin-1, BOM wins
    assert raws[0].symptom_text == "fi\xe8vre 39°C"


def test_explicit_utf8_encoding():
    row = simple_row(0, SYMPTOM_TEXT="éruption cutanée")
    data = vaers_csv_bytes([row], encoding="utf-8")
    raws, _ = parse_all(data, encoding="utf-8")
    assert raws[0].symptom_text == "éruption cutanée"


def test_quoted_fields_with_commas_and_newlines():
    row = simple_row(0, SYMPTOM_TEXT='fever, chills,\nand "rigors"')
    data = vaers_csv_bytes([row])
    raws, stats = parse_all(data)
    assert stats.errors == 0
    assert raws[0].symptom_text == 'fever, chills,\nand "rigors"'


def test_skip_policy_counts_malformed_rows():
    rows = [simple_row(i) for i in range(4)]
    # row index 1: too few fields; row index 2: empty id
    rows[2]["VAERS_ID"] = "   "
    data = vaers_csv_bytes(rows, raw_lines=[(1, "only,three,fields")])
    raws, stats = parse_all(data)
    assert stats.rows == 5
    assert stats.errors == 2
    assert stats.error_lines == [2, 4]
    assert [r.vaers_id for r in raws] == ["900000", "900001", "900003"]


def test_abort_policy_raises_on_first_bad_row():
    rows = [simple_row(0), simple_row(1)]
    data = vaers_csv_bytes(rows, raw_lines=[(1, "short,row")])
    stream = io.BytesIO(data)
    raws = parse_vaers_csv(stream, on_error="abort")
    first = next(raws)
    assert first.vaers_id == "900000"
    with pytest.raises(IngestError, match="row 2"):
        list(raws)


def test_unknown_policy_rejected():
    with pytest.raises(ValueError):
        list(parse_vaers_csv(io.BytesIO(b"VAERS_ID\n1\n"), on_error="ignore"))


def test_missing_id_column_is_fatal():
    data = b"SYMPTOM_TEXT,SEX\nfever,F\n"
    with pytest.raises(IngestError, match="VAERS_ID"):
        list(parse_vaers_csv(io.BytesIO(data)))


def test_empty_input_is_fatal():
    with pytest.raises(IngestError, match="header"):
        list(parse_vaers_csv(io.BytesIO(b"")))


def test_flag_normalization_is_exact_y():
    rows = [
        simple_row(0, DIED="Y", ER_VISIT="y", HOSPITAL="N", ER_ED_VISIT=" Y "),
        simple_row(1, DIED="", ER_VISIT="YES"),
    ]
    data = vaers_csv_bytes(rows)
    raws, _ = parse_all(data)
    assert raws[0].died == "Y"
    assert raws[0].er_visit is None  # lowercase y is not set
    assert raws[0].hospital is None
    assert raws[0].er_ed_visit == "Y"  # whitespace tolerated
    assert raws[1].died is None and raws[1].er_visit is None


def test_sex_and_age_normalization():
    rows = [
        simple_row(0, SEX="f", AGE_YRS="0.5"),
        simple_row(1, SEX="X", AGE_YRS="-3"),
        simple_row(2, SEX="", AGE_YRS="not-a-number"),
    ]
    raws, _ = parse_all(vaers_csv_bytes(rows))
    assert raws[0].sex == "F" and raws[0].age_yrs == 0.5
    assert raws[1].sex is None and raws[1].age_yrs is None
    assert raws[2].sex is None and raws[2].age_yrs is None


def test_derive_outcomes_er_or_logic():
    base = dict(vaers_id="1")
    assert derive_outcomes(RawReport(**base, er_visit="Y")) == OutcomeSet(er=True)
    assert derive_outcomes(RawReport(**base, er_ed_visit="Y")) == OutcomeSet(er=True)
    assert derive_outcomes(
        RawReport(**base, er_visit="Y", er_ed_visit="Y")
    ) == OutcomeSet(er=True)
    assert derive_outcomes(RawReport(**base)) == OutcomeSet()
    assert derive_outcomes(
        RawReport(**base, died="Y", hospital="Y")
    ) == OutcomeSet(hospitalised=True, died=True)


def test_filter_reports_drops_blank_narratives():
    raws = [
        RawReport(vaers_id="1", symptom_text="  fever  ", sex="F", age_yrs=30.0),
        RawReport(vaers_id="2", symptom_text="   "),
        RawReport(vaers_id="3", symptom_text=None),
        RawReport(vaers_id="4", symptom_text="chills", sex=None),
    ]
    kept = list(filter_reports(raws))
    assert [r.vaers_id for r in kept] == ["1", "4"]
    assert kept[0].text == "fever"  # stripped
    assert kept[1].sex == "U"  # missing sex defaults


def test_corpus_stats():
    reports = [
        make_report(0, label=0, text="one two three"),
        make_report(1, label=0, text="four five"),
        make_report(2, label=3, text="six"),
        make_report(3, label=7, text="seven eight"),
    ]
    stats = corpus_stats(reports)
    assert stats.record_count == 4
    assert stats.word_count == 8
    assert stats.class_histogram[0] == (2, 0.5)
    assert stats.class_histogram[3] == (1, 0.25)
    assert stats.class_histogram[7] == (1, 0.25)
    assert sum(c for c, _ in stats.class_histogram.values()) == 4
    assert abs(sum(f for _, f in stats.class_histogram.values()) - 1.0) < 1e-12


def test_report_dict_roundtrip():
    report = make_report(5, label=6, sex="M", age=None, text="x y z")
    obj = report_to_dict(report)
    assert obj == {"id": "1000005", "text": "x y z", "sex": "M", "age": None, "label": 6}
    assert report_from_dict(obj) == report


def test_report_from_dict_validation():
    good = {"id": "1", "text": "t", "sex": "F", "age": 3, "label": 0}
    report_from_dict(good)
    with pytest.raises(ValueError, match="missing"):
        report_from_dict({"id": "1", "text": "t", "sex": "F"})
    with pytest.raises(ValueError, match="sex"):
        report_from_dict({**good, "sex": "Z"})
    with pytest.raises(ValueError):
        report_from_dict({**good, "label": 9})


def test_jsonl_roundtrip(tmp_path):
    reports = [make_report(i, label=i % 8) for i in range(20)]
    path = tmp_path / "corpus.jsonl"
    assert write_reports_jsonl(reports, path) == 20
    assert list(read_reports_jsonl(path)) == reports


def test_jsonl_rejects_garbage_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "1", "text": "t", "sex": "F", "age": 1, "label": 0}\nnot json\n')
    with pytest.raises(ValueError):
        list(read_reports_jsonl(path))


def test_ingest_pipeline_derives_labels():
    rows = []
    for label in range(8):
        row = simple_row(label, SYMPTOM_TEXT=f"class {label} narrative")
        row.update(flags_for_label(label))
        rows.append(row)
    raws, _ = parse_all(vaers_csv_bytes(rows))
    reports = list(filter_reports(raws))
    assert [r.label for r in reports] == list(range(8))
