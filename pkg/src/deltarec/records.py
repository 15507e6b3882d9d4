"""Integer observation sequences, delta-record samples and their count statistics.

A delta-record with delta = -(k+1) < 0 is any observation at least as large as
the running maximum minus k; the first observation always qualifies. The sample
kept from a sequence is (records, near-record counts, near-record values); the
count statistics a/v/n derived from it feed every estimator in this package.

All operations are pure; the value types are frozen dataclasses.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class DataError(ValueError):
    """Invalid input data (empty sequences, broken invariants, bad tokens)."""


@dataclass(frozen=True)
class IntSequence:
    """A nonempty sequence of integers, each at least ``offset``.

    ``offset`` is the smallest possible support value (1 for count data that
    starts at one, 0 by default); all internal formulas index the shifted
    support ``value - offset``.
    """

    values: tuple[int, ...]
    offset: int = 0

    def __post_init__(self):
        if len(self.values) == 0:
            raise DataError("empty input")
        if self.offset < 0:
            raise DataError("offset must be >= 0")
        for v in self.values:
            if v < self.offset:
                raise DataError(f"value {v} below support offset {self.offset}")

    def __len__(self) -> int:
        return len(self.values)

    def shifted(self) -> tuple[int, ...]:
        if self.offset == 0:
            return self.values
        return tuple(v - self.offset for v in self.values)

    @classmethod
    def from_iterable(cls, values: Iterable[int], offset: int = 0) -> "IntSequence":
        return cls(tuple(int(v) for v in values), offset)

    @classmethod
    def parse(cls, text: str, offset: int = 0) -> "IntSequence":
        """Parse whitespace- or comma-separated integers."""
        tokens = text.replace(",", " ").split()
        vals = []
        for t in tokens:
            try:
                vals.append(int(t))
            except ValueError:
                raise DataError(f"non-integer token {t!r}") from None
        return cls.from_iterable(vals, offset)


@dataclass(frozen=True)
class DeltaRecordSample:
    """The delta-record sample (R, S, Y) for a given k = -delta - 1.

    ``records`` are the strictly increasing record values R_1..R_n,
    ``near_values[i]`` holds the near-records attached to records[i] in
    observation order, and ``last_record_complete`` says whether the sample is
    guaranteed to contain every near-record of the final record (true for
    simulation with a record-count stopping rule, false for raw data).
    """

    k: int
    records: tuple[int, ...]
    near_values: tuple[tuple[int, ...], ...]
    last_record_complete: bool = False
    offset: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise DataError("k must be >= 0")
        if len(self.records) == 0:
            raise DataError("empty input")
        if len(self.near_values) != len(self.records):
            raise DataError("near_values must align with records")
        prev = None
        for r in self.records:
            if prev is not None and r <= prev:
                raise DataError("records must be strictly increasing")
            prev = r
        for r, ys in zip(self.records, self.near_values):
            for y in ys:
                if not (r - self.k <= y <= r):
                    raise DataError(f"near-record {y} outside [{r - self.k}, {r}]")

    @property
    def delta(self) -> int:
        return -self.k - 1

    @property
    def n_records(self) -> int:
        return len(self.records)

    @property
    def near_counts(self) -> tuple[int, ...]:
        return tuple(len(ys) for ys in self.near_values)

    @property
    def total(self) -> int:
        """Total number of delta-records (n + S_1 + ... + S_n)."""
        return len(self.records) + sum(len(ys) for ys in self.near_values)

    @property
    def max_value(self) -> int:
        return self.records[-1]

    def flattened(self) -> tuple[int, ...]:
        """All delta-record values in observation order."""
        out: list[int] = []
        for r, ys in zip(self.records, self.near_values):
            out.append(r)
            out.extend(ys)
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "delta": self.delta,
            "records": list(self.records),
            "nearCounts": list(self.near_counts),
            "nearValues": [list(ys) for ys in self.near_values],
            "totals": {"records": self.n_records, "deltaRecords": self.total},
            "lastRecordComplete": self.last_record_complete,
            "offset": self.offset,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DeltaRecordSample":
        return cls(
            k=int(d["k"]),
            records=tuple(int(r) for r in d["records"]),
            near_values=tuple(tuple(int(y) for y in ys) for ys in d["nearValues"]),
            last_record_complete=bool(d.get("lastRecordComplete", False)),
            offset=int(d.get("offset", 0)),
        )


def extract_delta_records(seq: IntSequence, k: int,
                          last_record_complete: bool = False) -> DeltaRecordSample:
    """Extract the delta-record sample with delta = -(k+1) from a raw sequence.

    The first observation starts the record list; any later observation within
    k of the running maximum is kept (a new record if it strictly exceeds the
    maximum, a near-record of the current record otherwise).
    """
    if k < 0:
        raise DataError("k must be >= 0")
    records = [seq.values[0]]
    near: list[list[int]] = [[]]
    m = seq.values[0]
    for x in seq.values[1:]:
        if x > m:
            records.append(x)
            near.append([])
            m = x
        elif x >= m - k:
            near[-1].append(x)
    return DeltaRecordSample(
        k=k,
        records=tuple(records),
        near_values=tuple(tuple(ys) for ys in near),
        last_record_complete=last_record_complete,
        offset=seq.offset,
    )


def reduce_k(sample: DeltaRecordSample, k_new: int) -> DeltaRecordSample:
    """Derive the sample at a smaller k by re-extracting the flattened values.

    Used to restore the exact-distribution regime for large j: estimates at
    level k' <= k only need the delta-records that survive the stricter
    condition, all of which are present in the level-k sample.
    """
    if k_new > sample.k:
        raise DataError("reduce_k requires k_new <= k")
    flat = IntSequence(sample.flattened(), sample.offset)
    return extract_delta_records(flat, k_new,
                                 last_record_complete=sample.last_record_complete)


@dataclass(frozen=True)
class CountTable:
    """Sparse a/v/n count statistics of a sample, indexed on the shifted support.

    ``a[(m, l)]`` counts, for l = 0, the times value m was a weak record
    (record or tie with the current maximum) and, for l >= 1, the times m was
    observed equal to the current record minus l. ``v`` and ``nstat`` follow:

        v(m, l) = sum_{u <= l} a(m, u)
        nstat(m, l) = 1 + sum_{u <= l} v(m + u, l - u)

    ``censor_boundary`` = max_value - k: values at or below it have counts that
    coincide with the full-sequence versions, so the exact sampling law applies.
    """

    k: int
    max_value: int
    offset: int = 0
    last_record_complete: bool = False
    _a: dict = field(default_factory=dict, repr=False)

    def a(self, m: int, l: int) -> int:
        return self._a.get((m, l), 0)

    def v(self, m: int, l: int) -> int:
        return sum(self.a(m, u) for u in range(l + 1))

    def nstat(self, m: int, l: int) -> int:
        return 1 + sum(self.v(m + u, l - u) for u in range(l + 1))

    @property
    def censor_boundary(self) -> int:
        return self.max_value - self.k

    def support(self) -> tuple[int, ...]:
        return tuple(sorted({m for (m, _l) in self._a}))

    def total(self) -> int:
        return sum(self._a.values())

    def dense_a(self) -> "np.ndarray":
        import numpy as np

        A = np.zeros((self.max_value + 1, self.k + 1), np.int64)
        for (m, l), c in self._a.items():
            A[m, l] = c
        return A

    def vn_arrays(self):
        """(V[j], N[j]) for j = 0..max_value at level k, complete-form N."""
        import numpy as np

        V = np.array([self.v(j, self.k) for j in range(self.max_value + 1)], np.int64)
        N = np.array([self.nstat(j, self.k) for j in range(self.max_value + 1)], np.int64)
        return V, N

    def to_json_dict(self) -> dict:
        items = sorted(self._a.items())
        return {
            "k": self.k,
            "maxValue": self.max_value,
            "offset": self.offset,
            "censorBoundary": self.censor_boundary,
            "lastRecordComplete": self.last_record_complete,
            "a": [[m, l, c] for (m, l), c in items],
            "v": [[m, l, self.v(m, l)] for (m, l), _ in items],
            "nStat": [[j, self.k, self.nstat(j, self.k)]
                      for j in range(self.max_value + 1)],
        }


def count_table(sample: DeltaRecordSample) -> CountTable:
    """Build the a/v/n count table of a sample (shifted to 0-based support)."""
    off = sample.offset
    a: dict[tuple[int, int], int] = {}

    def bump(m: int, l: int):
        a[(m, l)] = a.get((m, l), 0) + 1

    for r, ys in zip(sample.records, sample.near_values):
        bump(r - off, 0)
        for y in ys:
            bump(y - off, r - y)  # y == r lands in level 0 (weak-record tie)
    return CountTable(
        k=sample.k,
        max_value=sample.max_value - off,
        offset=off,
        last_record_complete=sample.last_record_complete,
        _a=a,
    )


@dataclass(frozen=True)
class StoppedView:
    """Hit counts of a sequence stopped at the first value above a threshold."""

    threshold: int
    stop_index: int
    hit_count_at_j: int
    at_least_j_count: int

    def __post_init__(self):
        if self.stop_index < 1:
            raise DataError("stop index must be >= 1")
        if self.hit_count_at_j > self.at_least_j_count:
            raise DataError("hit count cannot exceed at-least count")


def stopped_view(seq: IntSequence, j: int, k: int) -> StoppedView:
    """Scan until the first observation above j+k; count value-j hits and >= j.

    The ratio hit/at-least equals the per-value hazard MLE at j whenever the
    sequence maximum reaches j+k; the final exceeding observation is included
    in the at-least count.
    """
    threshold = j + k
    hits = 0
    atleast = 0
    for i, x in enumerate(seq.values, start=1):
        if x >= j:
            atleast += 1
        if x == j:
            hits += 1
        if x > threshold:
            return StoppedView(threshold, i, hits, atleast)
    raise DataError("threshold never exceeded")


def read_sequence(path_or_dash: str, offset: int = 0) -> IntSequence:
    """Read a sequence from a file path or '-' for stdin."""
    import sys

    if path_or_dash == "-":
        text = sys.stdin.read()
    else:
        with open(path_or_dash, "r", encoding="utf-8") as fh:
            text = fh.read()
    # tolerate comment lines in data files
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    return IntSequence.parse("\n".join(lines), offset)


def sample_to_json(sample: DeltaRecordSample) -> str:
    return json.dumps(sample.to_json_dict(), indent=2)
