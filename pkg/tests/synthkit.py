"""Synthetic corpus builders shared across the test suite.

All generators take explicit seeds and use only the stdlib RNG, so any
failing case reproduces exactly.
"""

from __future__ import annotations

import csv
import io
import random
import string
from typing import Sequence

from daedra_forge.corpus_ingest import Report
from daedra_forge.labels import decode_class

VAERS_HEADER = [
    "VAERS_ID",
    "RECVDATE",
    "STATE",
    "AGE_YRS",
    "SEX",
    "SYMPTOM_TEXT",
    "DIED",
    "ER_VISIT",
    "HOSPITAL",
    "ER_ED_VISIT",
]


def vaers_csv_bytes(
    rows: Sequence[dict],
    header: Sequence[str] = VAERS_HEADER,
    encoding: str = "latin-1",
    bom: bool = False,
    raw_lines: Sequence[tuple[int, str]] = (),
) -> bytes:
    """Render dict rows as CSV bytes; missing keys become empty fields.

    ``raw_lines`` splices literal (unescaped) lines at the given data-row
    positions, for building deliberately malformed fixtures.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    pending = dict(raw_lines)
    for i, row in enumerate(rows):
        if i in pending:
            buf.write(pending.pop(i) + "\r\n")
        writer.writerow([row.get(col, "") for col in header])
    for _, line in sorted(pending.items()):
        buf.write(line + "\r\n")
    data = buf.getvalue().encode(encoding)
    if bom:
        data = b"\xef\xbb\xbf" + data
    return data


def flags_for_label(label: int) -> dict:
    """CSV flag fields that derive to the given class id."""
    outcomes = decode_class(label)
    return {
        "ER_VISIT": "Y" if outcomes.er else "",
        "HOSPITAL": "Y" if outcomes.hospitalised else "",
        "DIED": "Y" if outcomes.died else "",
        "ER_ED_VISIT": "",
    }


def make_report(
    i: int,
    label: int = 0,
    sex: str = "F",
    age: float | None = 30.0,
    text: str = "patient reported mild soreness",
) -> Report:
    return Report(
        vaers_id=f"{1000000 + i}",
        text=text,
        sex=sex,
        age_yrs=age,
        outcomes=decode_class(label),
    )


# ---------------------------------------------------------------------------
# Separable corpus: each class writes narratives over its own three-letter
# alphabet, so even character-level token supports are disjoint and a
# linear bag-of-tokens model can reach perfect accuracy.
# ---------------------------------------------------------------------------

_CLASS_ALPHABETS = [
    "abc", "def", "ghi", "jkl", "mno", "pqr", "stu", "vwx",
]


def class_lexicon(label: int, words: int = 12, seed: int = 99) -> list[str]:
    rng = random.Random(seed * 8 + label)
    alphabet = _CLASS_ALPHABETS[label]
    lexicon = set()
    while len(lexicon) < words:
        length = rng.randint(4, 8)
        lexicon.add("".join(rng.choice(alphabet) for _ in range(length)))
    return sorted(lexicon)


def separable_text(label: int, rng: random.Random, n_words: int = 10) -> str:
    lexicon = class_lexicon(label)
    return " ".join(rng.choice(lexicon) for _ in range(n_words))


def separable_reports(n: int, seed: int = 0) -> list[Report]:
    """n reports cycling through all 8 classes with varied demographics."""
    rng = random.Random(seed)
    sexes = ["F", "M", "U"]
    reports = []
    for i in range(n):
        label = i % 8
        reports.append(
            make_report(
                i,
                label=label,
                sex=sexes[i % 3],
                age=float(1 + (i * 7) % 90),
                text=separable_text(label, rng),
            )
        )
    return reports


def separable_csv_rows(n: int, seed: int = 0) -> list[dict]:
    """Same corpus shaped as VAERS CSV rows (for pipeline-level tests)."""
    rng = random.Random(seed)
    sexes = ["F", "M", "U"]
    rows = []
    for i in range(n):
        label = i % 8
        row = {
            "VAERS_ID": str(1000000 + i),
            "AGE_YRS": str(1 + (i * 7) % 90),
            "SEX": sexes[i % 3],
            "SYMPTOM_TEXT": separable_text(label, rng),
        }
        row.update(flags_for_label(label))
        rows.append(row)
    return rows


def random_word_corpus(
    n_words: int, seed: int = 0, min_len: int = 10, max_len: int = 10
) -> list[str]:
    """Distinct random lowercase words, one document per word."""
    rng = random.Random(seed)
    words = set()
    while len(words) < n_words:
        length = rng.randint(min_len, max_len)
        words.add("".join(rng.choice(string.ascii_lowercase) for _ in range(length)))
    return sorted(words)


def split_population(seed: int = 0) -> list[Report]:
    """100,000 reports forming exactly 11 strata.

    90,000 F/M records with ages spread over [1, 100] (five quintile bands
    per sex) plus 10,000 U records with missing age (the UNKNOWN band).
    """
    rng = random.Random(seed)
    reports = []
    for i in range(90_000):
        reports.append(
            make_report(
                i,
                label=i % 8,
                sex="F" if i % 2 == 0 else "M",
                age=float(rng.randint(1, 100)),
            )
        )
    for i in range(90_000, 100_000):
        reports.append(make_report(i, label=i % 8, sex="U", age=None))
    return reports
