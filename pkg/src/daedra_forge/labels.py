"""Powerset encoding between outcome sets and the 8-way class target.

Each report is labelled with the subset of {ER attendance, hospitalisation,
death} it triggered; the empty set is its own class. Bit assignment
(ER=1, HOSP=2, DEATH=4) is frozen: it is part of the JSONL record schema.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

NUM_CLASSES = 8


class EventKind(enum.Enum):
    ER = "er"
    HOSP = "hospitalisation"
    DEATH = "death"


_EVENT_BITS = {EventKind.ER: 1, EventKind.HOSP: 2, EventKind.DEATH: 4}


@dataclass(frozen=True)
class OutcomeSet:
    """The three regulatory outcomes derivable from a report's flags."""

    er: bool = False
    hospitalised: bool = False
    died: bool = False


def encode_class(outcomes: OutcomeSet) -> int:
    """Map an outcome set to its class id in [0, 7]."""
    return (
        (1 if outcomes.er else 0)
        + (2 if outcomes.hospitalised else 0)
        + (4 if outcomes.died else 0)
    )


def decode_class(class_id: int) -> OutcomeSet:
    """Inverse of :func:`encode_class`; rejects ids outside [0, 7]."""
    if not isinstance(class_id, int) or isinstance(class_id, bool):
        raise ValueError(f"class id must be an int, got {class_id!r}")
    if not 0 <= class_id < NUM_CLASSES:
        raise ValueError(f"class id must be in [0, {NUM_CLASSES - 1}], got {class_id}")
    return OutcomeSet(
        er=bool(class_id & 1),
        hospitalised=bool(class_id & 2),
        died=bool(class_id & 4),
    )


def events_of(class_id: int) -> frozenset[EventKind]:
    """Set view of a class id, as used by per-event evaluation."""
    decode_class(class_id)  # range check
    return frozenset(kind for kind, bit in _EVENT_BITS.items() if class_id & bit)


# Human-readable class names for rendered reports, in class-id order.
CLASS_NAMES = (
    "No event",
    "ER attendance",
    "Hospitalisation",
    "ER attendance + hospitalisation",
    "Mortality",
    "ER attendance + mortality",
    "Hospitalisation + mortality",
    "ER attendance + hospitalisation + mortality",
)
