"""Discrete hazard-rate vectors, parametric families, and delta-record likelihoods.

Hazards determine the distribution through
``P(j) = h_j * prod_{i<j}(1-h_i)`` and ``surv(j) = prod_{i<=j}(1-h_i)``
(shifted support, i.e. after removing the offset). Family hazards are computed
with the tail-ratio sum ``h_j = 1 / (1 + sum_t prod_{s<=t} P(j+s)/P(j+s-1))``,
which never subtracts survival values and so stays accurate far into the tail.

Likelihoods of a delta-record sample come in two algebraically equal shapes
(a product over the sampled values, and a product over support points with
count exponents) and in a complete / incomplete variant. The complete variant
carries a ``+1`` survival exponent at every support point up to the maximum;
the incomplete variant (raw data, the last record's near-records possibly
unseen) drops that exponent for the values above ``max - k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .records import CountTable, DataError, DeltaRecordSample


class ParameterError(ValueError):
    """Family parameter out of range."""


@dataclass(frozen=True)
class Geometric:
    """P(X = offset + x) = p (1-p)^x."""

    p: float
    offset: int = 0
    name = "geometric"

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ParameterError("geometric p must be in (0, 1)")

    def hazard(self, j: int) -> float:
        return self.p

    def pmf_ratio(self, i: int) -> float:
        return 1.0 - self.p

    def params(self) -> dict:
        return {"p": self.p}


@dataclass(frozen=True)
class Poisson:
    """P(X = offset + x) = e^{-lam} lam^x / x!."""

    lam: float
    offset: int = 0
    name = "poisson"

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ParameterError("poisson lambda must be > 0")

    def hazard(self, j: int) -> float:
        return _ratio_sum_hazard(self, j)

    def pmf_ratio(self, i: int) -> float:
        return self.lam / (i + 1.0)

    def params(self) -> dict:
        return {"lambda": self.lam}


@dataclass(frozen=True)
class NegativeBinomial:
    """P(X = offset + x) = C(x+m-1, x) p^m (1-p)^x (failures before m-th success)."""

    m: int
    p: float
    offset: int = 0
    name = "negbinom"

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError("negbinom m must be a positive integer")
        if not 0.0 < self.p < 1.0:
            raise ParameterError("negbinom p must be in (0, 1)")

    def hazard(self, j: int) -> float:
        return _ratio_sum_hazard(self, j)

    def pmf_ratio(self, i: int) -> float:
        return (i + self.m) / (i + 1.0) * (1.0 - self.p)

    def params(self) -> dict:
        return {"m": self.m, "p": self.p}


ParametricFamily = Geometric | Poisson | NegativeBinomial


def _ratio_sum_hazard(fam, j: int) -> float:
    # h_j = 1/(1 + R) with R = sum_{t>=1} prod_{s=1..t} P(j+s)/P(j+s-1)
    r = 0.0
    term = 1.0
    s = 0
    while True:
        rho = fam.pmf_ratio(j + s)
        term *= rho
        r += term
        s += 1
        if term < 1e-17 * (1.0 + r) and rho < 0.9:
            break
        if s > 100000:
            raise ParameterError("hazard tail sum failed to converge")
    return 1.0 / (1.0 + r)


def parse_family(spec: str) -> ParametricFamily:
    """Parse a CLI family spec like 'geometric:p=0.8' or 'negbinom:m=5,p=0.8'."""
    head, _, rest = spec.partition(":")
    kv = {}
    if rest:
        for part in rest.split(","):
            key, _, val = part.partition("=")
            if not val:
                raise DataError(f"malformed family parameter {part!r}")
            kv[key.strip()] = val.strip()
    try:
        offset = int(kv.pop("offset", 0))
        if head == "geometric":
            return Geometric(p=float(kv.pop("p")), offset=offset)
        if head == "poisson":
            return Poisson(lam=float(kv.pop("lambda", kv.pop("lam", None) or "")), offset=offset)
        if head == "negbinom":
            return NegativeBinomial(m=int(kv.pop("m")), p=float(kv.pop("p")), offset=offset)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"bad family spec {spec!r}: {exc}") from None
    raise DataError(f"unknown family {head!r} (expected geometric|poisson|negbinom)")


@dataclass(frozen=True)
class HazardVector:
    """Hazards h_0..h_J on the shifted support, each in [0, 1).

    ``family`` optionally supplies the exact tail rule for j > J; bare vectors
    refuse queries beyond their range.
    """

    h: tuple[float, ...]
    offset: int = 0
    family: ParametricFamily | None = None

    def __post_init__(self):
        for x in self.h:
            if not (0.0 <= x < 1.0):
                raise ParameterError(f"hazard {x} outside [0, 1)")

    @property
    def J(self) -> int:
        return len(self.h) - 1

    def hazard(self, j: int) -> float:
        if j < 0:
            raise DataError("negative support index")
        if j <= self.J:
            return self.h[j]
        if self.family is not None:
            return self.family.hazard(j)
        raise DataError(f"hazard queried at {j} beyond J={self.J} with no tail rule")

    def log_pmf(self, j: int) -> float:
        hj = self.hazard(j)
        if hj == 0.0:
            return -math.inf
        return math.log(hj) + self.log_survival(j - 1)

    def pmf(self, j: int) -> float:
        return math.exp(self.log_pmf(j))

    def log_survival(self, j: int) -> float:
        if j < 0:
            return 0.0
        return sum(math.log1p(-self.hazard(i)) for i in range(j + 1))

    def survival(self, j: int) -> float:
        return math.exp(self.log_survival(j))

    def to_json_dict(self) -> dict:
        return {"h": list(self.h), "offset": self.offset}


def hazard_of_family(fam: ParametricFamily, J: int) -> HazardVector:
    """Hazards h_0..h_J of a parametric family, with the family as tail rule."""
    if J < 0:
        raise DataError("J must be >= 0")
    return HazardVector(h=tuple(fam.hazard(j) for j in range(J + 1)),
                        offset=fam.offset, family=fam)


@dataclass(frozen=True)
class ConditionalQuantities:
    """Hazards of j..j+k conditioned on reaching j, and the pair-law parameter d."""

    cond_hazards: tuple[float, ...]  # h_{j+i|j}, i = 0..k
    cond_survival: float             # surv(j+k | j)
    d: float                         # h_j + surv(j+k | j)


def conditional_quantities(hv: HazardVector, j: int, k: int) -> ConditionalQuantities:
    hs = [hv.hazard(j + i) for i in range(k + 1)]
    cond = []
    prod = 1.0
    for i, hi in enumerate(hs):
        cond.append(hi * prod)
        prod *= 1.0 - hi
    d = hs[0] + prod
    return ConditionalQuantities(tuple(cond), prod, d)


def _exponents(counts: CountTable, incomplete: bool):
    """(V[j], beta[j]) exponent arrays of the likelihood for j = 0..max."""
    rn = counts.max_value
    k = counts.k
    bound = min(rn - k, rn - 1) if incomplete else rn
    V = []
    beta = []
    for j in range(rn + 1):
        V.append(counts.v(j, k))
        w = sum(counts.v(j + l, k - l) for l in range(1, k + 1))
        beta.append(w + (1 if j <= bound else 0))
    return V, beta


def log_likelihood(counts: CountTable, hv: HazardVector, incomplete: bool = False) -> float:
    """Hazard-form log-likelihood sum_j [v_j log h_j + beta_j log(1-h_j)].

    Returns -inf when some h_j = 0 carries a positive count (or h_j -> 1 with a
    positive survival exponent).
    """
    rn = counts.max_value
    if hv.family is None and hv.J < rn:
        raise DataError(f"hazard vector must reach {rn}, got J={hv.J}")
    V, beta = _exponents(counts, incomplete)
    total = 0.0
    for j in range(rn + 1):
        hj = hv.hazard(j)
        if V[j] > 0:
            if hj == 0.0:
                return -math.inf
            total += V[j] * math.log(hj)
        if beta[j] > 0:
            total += beta[j] * math.log1p(-hj)
    return total


def log_likelihood_sample(sample: DeltaRecordSample, hv: HazardVector,
                          incomplete: bool = False) -> float:
    """Product-form log-likelihood over the sampled values (dual of the hazard form)."""
    off = sample.offset
    k = sample.k
    rn = sample.max_value - off
    total = hv.log_survival(min(rn - k, rn - 1) if incomplete else rn)
    for r, ys in zip(sample.records, sample.near_values):
        rj = r - off
        total += hv.log_pmf(rj) - (len(ys) + 1) * hv.log_survival(rj - k - 1)
        for y in ys:
            total += hv.log_pmf(y - off)
    return total
