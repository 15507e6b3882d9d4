"""Hazard-rate estimators from delta-record count tables.

All estimates are exact rationals (numerator/denominator of small integer
counts); floats are derived for display only. Per value j the regimes are

* ``exact``    j <= max-k : the estimator has the known finite-sample law,
* ``censored`` max-k < j < max : later near-records could still have occurred,
* ``terminal`` j = max (incomplete variant only): the estimate is 1.

The plain variant uses the complete-sample likelihood (denominator
``N_j = 1 + V_j + W_j``); the incomplete variant (raw data) drops the ``+1``
for j above max-k, which reproduces the published real-data estimates table
cell for cell.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .records import CountTable, DataError

VARIANT_PLAIN = "plain"
VARIANT_INCOMPLETE = "incomplete"
VARIANT_ISO_INC = "isotonic-increasing"
VARIANT_ISO_DEC = "isotonic-decreasing"


@dataclass(frozen=True)
class EstimateEntry:
    j: int              # original (unshifted) support value
    numerator: int
    denominator: int
    regime: str

    @property
    def fraction(self) -> Fraction:
        if self.denominator == 0:
            return Fraction(0)
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return float(self.fraction)


@dataclass(frozen=True)
class HazardEstimate:
    k: int
    offset: int
    variant: str
    entries: tuple[EstimateEntry, ...]

    def __getitem__(self, j: int) -> EstimateEntry:
        idx = j - self.offset
        if not 0 <= idx < len(self.entries):
            raise DataError(f"no estimate at value {j}")
        return self.entries[idx]

    def values(self) -> list[float]:
        return [e.value for e in self.entries]

    def fractions(self) -> list[Fraction]:
        return [e.fraction for e in self.entries]

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "offset": self.offset,
            "variant": self.variant,
            "estimates": [
                {"j": e.j, "numerator": e.numerator, "denominator": e.denominator,
                 "value": e.value, "regime": e.regime}
                for e in self.entries
            ],
        }

    def to_csv(self) -> str:
        lines = ["j,numerator,denominator,value,regime"]
        for e in self.entries:
            lines.append(f"{e.j},{e.numerator},{e.denominator},{e.value:.6f},{e.regime}")
        return "\n".join(lines) + "\n"


def _regime(j: int, rn: int, k: int, variant: str) -> str:
    if j == rn and variant != VARIANT_PLAIN:
        return "terminal"
    if j <= rn - k:
        return "exact"
    return "censored"


def incomplete_pairs(counts: CountTable, boundary: int | None = None):
    """(numerator, denominator) pairs of the incomplete likelihood per value.

    ``boundary`` is the largest j whose denominator keeps the ``+1`` term;
    default max-k (the convention of the published real-data tables), except
    that the maximum itself never keeps it (its completeness is always unknown
    on raw data, making its estimate 1).
    """
    rn, k = counts.max_value, counts.k
    if boundary is None:
        boundary = min(rn - k, rn - 1)
    pairs = []
    for j in range(rn + 1):
        v = counts.v(j, k)
        n = counts.nstat(j, k)
        pairs.append((v, n if j <= boundary else n - 1))
    return pairs


def npmle_plain(counts: CountTable) -> HazardEstimate:
    """Per-value MLE V_j / N_j under the complete-sample likelihood."""
    rn, k = counts.max_value, counts.k
    entries = []
    for j in range(rn + 1):
        entries.append(EstimateEntry(
            j=j + counts.offset,
            numerator=counts.v(j, k),
            denominator=counts.nstat(j, k),
            regime=_regime(j, rn, k, VARIANT_PLAIN),
        ))
    return HazardEstimate(k, counts.offset, VARIANT_PLAIN, tuple(entries))


def npmle_incomplete(counts: CountTable) -> HazardEstimate:
    """Per-value MLE under the incomplete likelihood (raw-data default).

    Equals the plain estimator up to max-k; above, the ``+1`` term leaves the
    denominator, and at the maximum itself the estimate is 1.
    """
    rn, k = counts.max_value, counts.k
    entries = []
    for j, (v, den) in enumerate(incomplete_pairs(counts)):
        entries.append(EstimateEntry(
            j=j + counts.offset,
            numerator=v,
            denominator=den if den > 0 else v,
            regime=_regime(j, rn, k, VARIANT_INCOMPLETE),
        ))
    return HazardEstimate(k, counts.offset, VARIANT_INCOMPLETE, tuple(entries))


def _pava(pairs, increasing: bool):
    """Weighted pool-adjacent-violators on (numerator, denominator) pairs.

    Exact rational arithmetic; returns one Fraction per input position.
    """
    blocks: list[list[int]] = []  # [num, den, count]

    def value(b) -> Fraction:
        return Fraction(b[0], b[1]) if b[1] else Fraction(0)

    def violates(left, right) -> bool:
        return value(right) < value(left) if increasing else value(right) > value(left)

    for num, den in pairs:
        blocks.append([num, den, 1])
        while len(blocks) > 1 and violates(blocks[-2], blocks[-1]):
            num2, den2, c2 = blocks.pop()
            blocks[-1][0] += num2
            blocks[-1][1] += den2
            blocks[-1][2] += c2
    out: list[Fraction] = []
    for b in blocks:
        out.extend([value(b)] * b[2])
    return out


def _max_min(pairs, j: int, increasing: bool) -> Fraction:
    """Direct max-min (increasing) / min-max (decreasing) partial-sum ratio."""
    rn = len(pairs) - 1
    best = None
    for low in range(j + 1):
        inner = None
        for high in range(j, rn + 1):
            num = sum(p[0] for p in pairs[low:high + 1])
            den = sum(p[1] for p in pairs[low:high + 1])
            ratio = Fraction(num, den) if den else Fraction(0)
            if inner is None:
                inner = ratio
            elif increasing:
                inner = min(inner, ratio)
            else:
                inner = max(inner, ratio)
        if best is None:
            best = inner
        elif increasing:
            best = max(best, inner)
        else:
            best = min(best, inner)
    return best


def isotonic_fit(pairs, increasing: bool):
    """Isotonic likelihood maximiser for exponent pairs; PAVA, exact rationals."""
    return _pava(pairs, increasing)


def npmle_isotonic(counts: CountTable, direction: str,
                   variant: str = VARIANT_PLAIN) -> HazardEstimate:
    """Monotone hazard MLE (increasing or decreasing failure rate).

    Maximises the chosen likelihood variant's product form over monotone
    hazard vectors; computed by pool-adjacent-violators on the count pairs,
    which agrees exactly with the max-min partial-sum-ratio formula.
    """
    if direction not in ("increasing", "decreasing"):
        raise DataError("direction must be 'increasing' or 'decreasing'")
    rn, k = counts.max_value, counts.k
    if variant == VARIANT_PLAIN:
        pairs = [(counts.v(j, k), counts.nstat(j, k)) for j in range(rn + 1)]
    elif variant == VARIANT_INCOMPLETE:
        pairs = incomplete_pairs(counts)
    else:
        raise DataError("variant must be 'plain' or 'incomplete'")
    fitted = _pava(pairs, increasing=(direction == "increasing"))
    tag = VARIANT_ISO_INC if direction == "increasing" else VARIANT_ISO_DEC
    entries = []
    for j, f in enumerate(fitted):
        entries.append(EstimateEntry(
            j=j + counts.offset,
            numerator=f.numerator,
            denominator=f.denominator,
            regime=_regime(j, rn, k, variant),
        ))
    return HazardEstimate(k, counts.offset, tag, tuple(entries))


@dataclass(frozen=True)
class PooledRatio:
    numerator: int
    denominator: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return float(self.fraction)


def geometric_mle(counts: CountTable, incomplete: bool = False) -> PooledRatio:
    """Pooled-ratio MLE of a constant hazard: sum V_j / sum N_j.

    The numerator equals the total number of delta-records in the sample.
    """
    rn, k = counts.max_value, counts.k
    if incomplete:
        pairs = incomplete_pairs(counts)
        num = sum(v for v, _ in pairs)
        den = sum(d for _, d in pairs)
    else:
        num = sum(counts.v(j, k) for j in range(rn + 1))
        den = sum(counts.nstat(j, k) for j in range(rn + 1))
    if den <= 0:
        raise DataError("empty count table")
    return PooledRatio(num, den)
