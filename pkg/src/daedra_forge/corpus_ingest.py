"""Streaming ingestion of VAERS-format CSV exports.

VAERS ships one ``*VAERSDATA.csv`` per year: RFC 4180 CSV with a header
row, Latin-1 encoded (the exports predate UTF-8 adoption; a UTF-8 BOM,
when present, wins). Parsing is strictly streaming -- memory stays
proportional to one record, never the corpus, because real inputs run to
millions of rows.

The canonical downstream record format is JSONL, one object per report:

    {"id": str, "text": str, "sex": "F|M|U", "age": number|null, "label": int}

``label`` is the powerset class id from :mod:`daedra_forge.labels`.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .labels import OutcomeSet, decode_class, encode_class

_UTF8_BOM = b"\xef\xbb\xbf"

# Columns we consume; anything else in the header is ignored.
_FLAG_COLUMNS = ("DIED", "ER_VISIT", "ER_ED_VISIT", "HOSPITAL")


class IngestError(Exception):
    """Unrecoverable ingestion failure (bad header, or abort-on-error)."""


@dataclass
class RawReport:
    """One data row of a VAERS file, lightly normalized.

    Flag fields hold ``"Y"`` or ``None``; VAERS data dictionaries define
    no other value, and anything else means "not set".
    """

    vaers_id: str
    symptom_text: str | None = None
    died: str | None = None
    er_visit: str | None = None
    er_ed_visit: str | None = None
    hospital: str | None = None
    sex: str | None = None
    age_yrs: float | None = None


@dataclass
class Report:
    """A filtered record: non-empty narrative plus derived outcomes."""

    vaers_id: str
    text: str
    sex: str
    age_yrs: float | None
    outcomes: OutcomeSet

    @property
    def label(self) -> int:
        return encode_class(self.outcomes)


@dataclass
class CorpusStats:
    record_count: int
    word_count: int
    class_histogram: dict[int, tuple[int, float]]


@dataclass
class ParseStats:
    """Counters updated as :func:`parse_vaers_csv` is consumed."""

    rows: int = 0
    errors: int = 0
    error_lines: list[int] = field(default_factory=list)


class _ChainedBytes(io.RawIOBase):
    """Serve a sniffed prefix, then the rest of the underlying stream."""

    def __init__(self, head: bytes, tail: IO[bytes]):
        self._head = head
        self._tail = tail

    def readable(self) -> bool:
        return True

    def readinto(self, buffer) -> int:
        if self._head:
            n = min(len(buffer), len(self._head))
            buffer[:n] = self._head[:n]
            self._head = self._head[n:]
            return n
        data = self._tail.read(len(buffer))
        if not data:
            return 0
        buffer[: len(data)] = data
        return len(data)


def _open_text(stream: IO[bytes], default_encoding: str) -> io.TextIOWrapper:
    head = stream.read(len(_UTF8_BOM))
    if head.startswith(_UTF8_BOM):
        encoding = "utf-8"
        head = head[len(_UTF8_BOM):]
    else:
        encoding = default_encoding
    raw = _ChainedBytes(head, stream)
    return io.TextIOWrapper(io.BufferedReader(raw), encoding=encoding, newline="")


def _normalize_flag(value: str | None) -> str | None:
    # Exact, case-sensitive "Y"; anything else counts as not set.
    if value is not None and value.strip() == "Y":
        return "Y"
    return None


def _normalize_sex(value: str | None) -> str | None:
    if value is None:
        return None
    value = value.strip().upper()
    return value if value in ("F", "M", "U") else None


def _parse_age(value: str | None) -> float | None:
    if value is None or not value.strip():
        return None
    try:
        age = float(value)
    except ValueError:
        return None
    return age if age >= 0 else None


def parse_vaers_csv(
    stream: IO[bytes],
    on_error: str = "skip",
    encoding: str = "latin-1",
    stats: ParseStats | None = None,
) -> Iterator[RawReport]:
    """Stream RawReports out of a VAERS CSV byte stream.

    ``on_error`` is ``"skip"`` (malformed rows are counted and dropped) or
    ``"abort"`` (first malformed row raises). A missing VAERS_ID column
    always raises: without ids the file is unusable. Quoted fields with
    embedded commas and newlines are handled by the csv module.
    """
    if on_error not in ("skip", "abort"):
        raise ValueError(f"on_error must be 'skip' or 'abort', got {on_error!r}")
    if stats is None:
        stats = ParseStats()

    text = _open_text(stream, encoding)
    reader = csv.reader(text, strict=True)

    def rows():
        # csv.Error inside iteration must respect the row policy, so pull
        # rows one at a time instead of a plain for loop.
        while True:
            try:
                yield next(reader), None
            except StopIteration:
                return
            except csv.Error as exc:
                yield None, exc

    row_iter = rows()
    try:
        header, exc = next(row_iter)
    except StopIteration:
        raise IngestError("empty input: no header row")
    if exc is not None or header is None:
        raise IngestError(f"malformed header row: {exc}")

    columns = {name.strip().upper(): i for i, name in enumerate(header)}
    if "VAERS_ID" not in columns:
        raise IngestError("input has no VAERS_ID column")

    def cell(row: list[str], name: str) -> str | None:
        idx = columns.get(name)
        if idx is None or idx >= len(row):
            return None
        return row[idx]

    for row, exc in row_iter:
        stats.rows += 1
        problem = None
        if exc is not None:
            problem = f"bad quoting: {exc}"
        elif len(row) != len(header):
            problem = f"expected {len(header)} fields, got {len(row)}"
        elif not row[columns["VAERS_ID"]].strip():
            problem = "empty VAERS_ID"
        if problem is not None:
            stats.errors += 1
            stats.error_lines.append(stats.rows)
            if on_error == "abort":
                raise IngestError(f"row {stats.rows}: {problem}")
            continue
        yield RawReport(
            vaers_id=row[columns["VAERS_ID"]].strip(),
            symptom_text=cell(row, "SYMPTOM_TEXT"),
            died=_normalize_flag(cell(row, "DIED")),
            er_visit=_normalize_flag(cell(row, "ER_VISIT")),
            er_ed_visit=_normalize_flag(cell(row, "ER_ED_VISIT")),
            hospital=_normalize_flag(cell(row, "HOSPITAL")),
            sex=_normalize_sex(cell(row, "SEX")),
            age_yrs=_parse_age(cell(row, "AGE_YRS")),
        )


def derive_outcomes(raw: RawReport) -> OutcomeSet:
    """Read the three target outcomes off a record's flag fields.

    ER attendance is an OR over ER_VISIT and ER_ED_VISIT: different
    generations of the VAERS form use different names for the same event.
    Absent flags mean the event did not happen.
    """
    return OutcomeSet(
        er=raw.er_visit == "Y" or raw.er_ed_visit == "Y",
        hospitalised=raw.hospital == "Y",
        died=raw.died == "Y",
    )


def filter_reports(raws: Iterable[RawReport]) -> Iterator[Report]:
    """Keep records with a usable narrative; order is preserved.

    A narrative is usable when SYMPTOM_TEXT is present and non-empty after
    trimming. Missing sex becomes "U".
    """
    for raw in raws:
        if raw.symptom_text is None:
            continue
        text = raw.symptom_text.strip()
        if not text:
            continue
        yield Report(
            vaers_id=raw.vaers_id,
            text=text,
            sex=raw.sex if raw.sex is not None else "U",
            age_yrs=raw.age_yrs,
            outcomes=derive_outcomes(raw),
        )


def corpus_stats(reports: Iterable[Report]) -> CorpusStats:
    """Record count, whitespace-delimited word count, and class histogram."""
    records = 0
    words = 0
    counts: dict[int, int] = {}
    for report in reports:
        records += 1
        words += len(report.text.split())
        label = encode_class(report.outcomes)
        counts[label] = counts.get(label, 0) + 1
    histogram = {
        label: (count, count / records) for label, count in sorted(counts.items())
    }
    return CorpusStats(record_count=records, word_count=words, class_histogram=histogram)


def report_to_dict(report: Report) -> dict:
    return {
        "id": report.vaers_id,
        "text": report.text,
        "sex": report.sex,
        "age": report.age_yrs,
        "label": report.label,
    }


def report_from_dict(obj: dict) -> Report:
    missing = {"id", "text", "sex", "label"} - obj.keys()
    if missing:
        raise ValueError(f"record is missing fields: {sorted(missing)}")
    if obj["sex"] not in ("F", "M", "U"):
        raise ValueError(f"record sex must be F, M or U, got {obj['sex']!r}")
    age = obj.get("age")
    return Report(
        vaers_id=str(obj["id"]),
        text=obj["text"],
        sex=obj["sex"],
        age_yrs=float(age) if age is not None else None,
        outcomes=decode_class(obj["label"]),
    )


def write_reports_jsonl(reports: Iterable[Report], path: str | os.PathLike) -> int:
    """Stream reports to a JSONL file; returns the number written."""
    written = 0
    with open(path, "w", encoding="utf-8") as handle:
        for report in reports:
            handle.write(json.dumps(report_to_dict(report), ensure_ascii=False))
            handle.write("\n")
            written += 1
    return written


def read_reports_jsonl(path: str | os.PathLike) -> Iterator[Report]:
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            yield report_from_dict(obj)
