#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Verdict records shared by every module: structural validations,
identity batteries and structure-constant tables of induced operations.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

logger = logging.getLogger("opcalc.verdicts")

# Failures kept verbatim in serialized reports
MAX_REPORTED_FAILURES = 20


def scalar_str(value):
    """Render a field element for JSON output."""
    return str(value)


def matrix_rows(matrix):
    """Nested lists of rendered scalars."""
    return [[scalar_str(v) for v in row] for row in np.asarray(matrix, dtype=object)]


def first_nonzero(array):
    """Index tuple of the first nonzero entry, or None."""
    hits = np.argwhere(np.asarray(array != 0, dtype=bool))
    if len(hits) == 0:
        return None
    return tuple(int(i) for i in hits[0])


@dataclass
class CheckRecord:
    relation: str
    passed: bool
    indices: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None

    def to_dict(self):
        record = {"relation": self.relation, "passed": self.passed, "indices": self.indices}
        if self.witness is not None:
            record["witness"] = self.witness
        return record


@dataclass
class ValidationReport:
    """Pass/fail record of structural axioms."""

    subject: str
    records: List[CheckRecord] = field(default_factory=list)

    def add(self, relation, passed, witness=None, **indices):
        passed = bool(passed)
        self.records.append(CheckRecord(relation, passed, indices, witness))
        if not passed:
            logger.debug(f"{self.subject}: {relation} failed at {indices}")
        return passed

    def extend(self, other):
        self.records.extend(other.records)
        return self

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    @property
    def failures(self):
        return [r for r in self.records if not r.passed]

    @property
    def checked(self):
        return len(self.records)

    def summary(self):
        counts = OrderedDict()
        for record in self.records:
            entry = counts.setdefault(record.relation, {"checked": 0, "failed": 0})
            entry["checked"] += 1
            if not record.passed:
                entry["failed"] += 1
        return counts

    def to_dict(self):
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checked": self.checked,
            "relations": self.summary(),
            "failures": [r.to_dict() for r in self.failures[:MAX_REPORTED_FAILURES]],
        }


@dataclass
class IdentityReport:
    """Outcome of one identity of the calculus battery.

    A recorded-only identity keeps its verdict in the report but never
    makes a run fail.
    """

    name: str
    tag: str
    recorded_only: bool = False
    checked: int = 0
    skipped: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)

    def record(self, passed, **where):
        self.checked += 1
        if not passed:
            self.failures.append(where)
            logger.debug(f"{self.name} failed at {where}")
        return passed

    def skip(self, count=1):
        self.skipped += count

    @property
    def holds(self):
        return not self.failures

    @property
    def passed(self):
        return self.holds or self.recorded_only

    def merge(self, other):
        self.checked += other.checked
        self.skipped += other.skipped
        self.failures.extend(other.failures)
        return self

    def to_dict(self):
        return {
            "name": self.name,
            "tag": self.tag,
            "recorded_only": self.recorded_only,
            "holds": self.holds,
            "checked": self.checked,
            "skipped": self.skipped,
            "failures": self.failures[:MAX_REPORTED_FAILURES],
        }


@dataclass
class BracketTable:
    """Structure constants of a bilinear operation on homology bases.

    ``entries[(a, b)]`` has shape ``(dims[a + b + shift], dims[a], dims[b])``;
    degree pairs that are not trusted are absent.
    """

    name: str
    tag: str
    shift: int
    grading: str
    dims: Dict[int, int] = field(default_factory=dict)
    entries: Dict[Tuple[int, int], np.ndarray] = field(default_factory=dict)
    checks: Optional[ValidationReport] = None
    cross_checked: Optional[int] = None

    def __post_init__(self):
        if self.checks is None:
            self.checks = ValidationReport(self.name)

    def target(self, a, b):
        return a + b + self.shift

    def set(self, a, b, tensor):
        self.entries[(a, b)] = tensor

    def has(self, a, b):
        return (a, b) in self.entries

    def apply(self, a, x, b, y):
        """Value on coordinate vectors x in degree a and y in degree b."""
        tensor = self.entries[(a, b)]
        partial = np.tensordot(tensor, np.asarray(x, dtype=object), axes=([1], [0]))
        return np.tensordot(partial, np.asarray(y, dtype=object), axes=([1], [0]))

    def is_zero(self, field_spec):
        return all(field_spec.is_zero(t) for t in self.entries.values())

    def nonzero_witness(self, field_spec):
        for (a, b), tensor in sorted(self.entries.items()):
            reduced = field_spec.reduce(tensor)
            hit = first_nonzero(reduced)
            if hit is not None:
                return {"degrees": [a, b], "entry": list(hit)}
        return None

    @property
    def passed(self):
        return self.checks.passed

    def to_dict(self, include_entries=True):
        data = {
            "name": self.name,
            "tag": self.tag,
            "shift": self.shift,
            "grading": self.grading,
            "dims": {str(k): v for k, v in sorted(self.dims.items())},
            "checks": self.checks.to_dict(),
            "cross_checked": self.cross_checked,
        }
        if include_entries:
            data["entries"] = {
                f"{a},{b}": [matrix_rows(t[k]) for k in range(t.shape[0])]
                for (a, b), t in sorted(self.entries.items())
            }
        return data
