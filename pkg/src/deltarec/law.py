"""Exact finite-sample law of the per-value hazard estimator.

For a value j with hazard h = h_j, the estimator V/(1+V+W) built from the
count pair (V, W) ~ Geom*(h, 1-d) is supported on the rationals of [0, 1);
d = h_j + conditional survival past j+k given reaching j. Its pmf at a reduced
fraction a/b and its CDF are single / double series with eventually geometric
terms; both are summed here with certified tail bounds. Closed-form mean,
variance and MSE involve the dilogarithm.

Everything is parameterized by the pair (h, d) alone — ``EstimatorLaw`` —
plus the truncation tolerance ``tol`` used by the series evaluations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import betainc, gammaln

from .records import DataError

_PI26 = math.pi * math.pi / 6.0


@dataclass(frozen=True)
class EstimatorLaw:
    """Parameters (h, d) of the estimator's law, 0 < h < d <= 1."""

    hj: float
    djk: float
    tol: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.hj < self.djk <= 1.0):
            raise DataError(f"law requires 0 < h < d <= 1, got ({self.hj}, {self.djk})")
        if not 0.0 < self.tol < 1e-3:
            raise DataError("tol must be in (0, 1e-3)")


@dataclass(frozen=True)
class RationalQ:
    """A reduced fraction a/b in [0, 1)."""

    a: int
    b: int

    def __post_init__(self):
        if self.b < 1 or not 0 <= self.a < self.b:
            raise DataError(f"need 0 <= a < b, got {self.a}/{self.b}")
        if math.gcd(self.a, self.b) != 1:
            raise DataError(f"{self.a}/{self.b} is not reduced")

    @classmethod
    def of(cls, a: int, b: int) -> "RationalQ":
        """Normalizing constructor: reduces a/b."""
        if b < 1 or a < 0:
            raise DataError("need b >= 1 and a >= 0")
        g = math.gcd(a, b) or 1
        return cls(a // g, b // g)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "RationalQ":
        return cls(f.numerator, f.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.a, self.b)

    def __float__(self) -> float:
        return self.a / self.b


def _as_q(q) -> RationalQ:
    if isinstance(q, RationalQ):
        return q
    if isinstance(q, Fraction):
        return RationalQ.from_fraction(q)
    if isinstance(q, tuple):
        return RationalQ.of(q[0], q[1])
    raise DataError(f"cannot interpret {q!r} as a rational in [0,1)")


def pmf(law: EstimatorLaw, q) -> float:
    """P(estimator = a/b): (d-h) * sum_i C(bi-1, ai) h^{ai} (1-d)^{(b-a)i - 1}.

    The terms are eventually geometric with ratio
    rho = h^a (1-d)^{b-a} b^b / (a^a (b-a)^{b-a}) < 1 (strict since h < d);
    summation stops once the geometric tail bound drops below tol * sum.
    """
    q = _as_q(q)
    h, d, tol = law.hj, law.djk, law.tol
    a, b = q.a, q.b
    logh = math.log(h)
    one_minus_d = 1.0 - d
    if one_minus_d == 0.0:
        # d = 1: only exponent (b-a)i - 1 == 0 survives, i.e. i = 1, b = a+1
        if b - a == 1:
            return (d - h) * math.exp(
                gammaln(b) - gammaln(a + 1.0) - gammaln(1.0) + a * logh)
        return 0.0
    log1md = math.log1p(-d)
    if a == 0:
        return (d - h) / d if b == 1 else 0.0  # b > 1 not reduced-impossible; b==1 only
    log_rho = (a * logh + (b - a) * log1md + b * math.log(b)
               - a * math.log(a) - (b - a) * math.log(b - a))
    total = 0.0
    i0 = 1
    chunk = 64
    last = math.inf
    while i0 < 10_000_000:
        i = np.arange(i0, i0 + chunk, dtype=np.float64)
        logt = (gammaln(b * i) - gammaln(a * i + 1.0) - gammaln((b - a) * i)
                + (a * i) * logh + ((b - a) * i - 1.0) * log1md)
        t = np.exp(logt)
        total += float(t.sum())
        last = float(t[-1])
        rho = math.exp(log_rho)
        if t[-2] > 0:
            rho = max(rho, float(t[-1] / t[-2]))
        if rho < 1.0 and last * rho / (1.0 - rho) < tol * max(total, 1e-300):
            break
        i0 += chunk
    return (d - h) * total


def _floor_sequence(x, m: np.ndarray) -> np.ndarray:
    """floor((1+m) x / (1-x)) for a block of m; exact when x is rational."""
    if isinstance(x, (Fraction, RationalQ)):
        f = x.fraction if isinstance(x, RationalQ) else x
        a, b = f.numerator, f.denominator
        num = (m.astype(np.int64) + 1) * a
        return num // (b - a)
    return np.floor((1.0 + m) * (x / (1.0 - x))).astype(np.int64)


def cdf(law: EstimatorLaw, x, tol: float | None = None) -> float:
    """P(estimator <= x) for x in [0, 1).

    Evaluated through the W-marginal: G(x) = sum_m (1-r) r^m I_{1-h}(m+1, L_m+1)
    with r = (1-d)/(1-h) and L_m = floor((1+m)x/(1-x)); the remainder past M is
    at most r^{M+1}. Rational x uses exact integer floors (the floor is
    discontinuous exactly at the law's atoms).
    """
    xf = float(x) if not isinstance(x, RationalQ) else x.a / x.b
    if not 0.0 <= xf < 1.0:
        raise DataError("cdf argument must lie in [0, 1)")
    h, d = law.hj, law.djk
    tol = law.tol if tol is None else tol
    if d == 1.0:
        L0 = int(_floor_sequence(x, np.array([0]))[0])
        return float(betainc(1.0, L0 + 1.0, 1.0 - h))
    r = (1.0 - d) / (1.0 - h)
    one_minus_r = (d - h) / (1.0 - h)
    total = 0.0
    m0 = 0
    chunk = 4096
    log_r = math.log(r)
    while True:
        m = np.arange(m0, m0 + chunk, dtype=np.float64)
        L = _floor_sequence(x, m)
        w = one_minus_r * np.exp(m * log_r)
        total += float((w * betainc(m + 1.0, L + 1.0, 1.0 - h)).sum())
        m0 += chunk
        if (m0 + 1) * log_r < math.log(max(tol, 1e-300)):
            break
        if m0 > 50_000_000:
            break
    return min(total, 1.0)


def prob_le_ge(law: EstimatorLaw, q, tol: float | None = None) -> tuple[float, float]:
    """(P(est <= q), P(est >= q)) at an atom q, sharing one pmf evaluation."""
    q = _as_q(q)
    tol = law.tol if tol is None else tol
    le = cdf(law, q, tol)
    atom = pmf(law, q)
    return le, 1.0 - le + atom


def _chernoff_le(law: EstimatorLaw, x: float) -> float:
    """Upper bound on P(est <= x), valid (finite) when x < h."""
    h, d = law.hj, law.djk
    c = x / (1.0 - x)
    if c >= h / (1.0 - h):
        return 1.0
    s = c / (h * (1.0 + c))  # minimiser of s^{-c} (1-h)/(1-hs) on (0, 1)
    if s <= 0.0:
        s = 1e-12
    phi = s ** (-c) * (1.0 - h) / (1.0 - h * s)
    if d == 1.0:
        return phi
    r = (1.0 - d) / (1.0 - h)
    if r * phi >= 1.0:
        return 1.0
    return (1.0 - r) * phi / (1.0 - r * phi)


def _chernoff_ge(law: EstimatorLaw, x: float) -> float:
    """Upper bound on P(est >= x), valid (finite) when x > h."""
    h, d = law.hj, law.djk
    c = x / (1.0 - x)
    if c <= h / (1.0 - h):
        return 1.0
    s = c / (h * (1.0 + c))  # now s > 1, still requires hs < 1
    if s * h >= 1.0:
        s = (1.0 + 1.0 / h) / 2.0  # midpoint of (1, 1/h)
    psi = s ** (-c) * (1.0 - h) / (1.0 - h * s)
    if d == 1.0:
        return psi
    r = (1.0 - d) / (1.0 - h)
    if r * psi >= 1.0:
        return 1.0
    return (1.0 - r) * psi / (1.0 - r * psi)


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    mse: float


def moments(law: EstimatorLaw) -> Moments:
    """Closed-form mean, variance and MSE of the estimator.

    mean = g h log(g) / s^2 + h / s with g = d - h and s = 1 + h - d; the
    second moment brings in Li2(s). MSE is variance + squared bias (an exact
    identity of the three returned values).
    """
    h, d = law.hj, law.djk
    g = d - h
    s = 1.0 + h - d
    if s <= 0.0:
        raise DataError("degenerate law: requires d < 1 + h")
    logg = math.log(g)
    mean = g * h * logg / (s * s) + h / s
    second = (g * (h + d - 1.0) * h / s ** 3 * dilog(s)
              + g * (2.0 * h + d - 1.0) * h / s ** 3 * logg
              + h * h / (s * s))
    var = second - mean * mean
    mse = var + (mean - h) ** 2
    return Moments(mean, var, mse)


def geometric_mean_formula(p: float, k: int) -> float:
    """Constant-hazard special case of the mean: depends on (p, k) only."""
    q = (1.0 - p) ** (k + 1)
    return (k + 1) * q * p * math.log1p(-p) / (1.0 - q) ** 2 + p / (1.0 - q)


def _dilog_series(x: float) -> float:
    # |x| <= 0.5: plain power series
    total = 0.0
    term = x
    n = 1
    while True:
        total += term / (n * n)
        n += 1
        term *= x
        if abs(term) / (n * n) < 1e-18 * max(abs(total), 1e-10):
            return total


def dilog(x: float) -> float:
    """Dilogarithm sum_{n>=1} x^n / n^2 on [-1, 1], absolute accuracy ~1e-14.

    Series on |x| <= 1/2; the reflection x -> 1-x and Landen x -> x/(x-1)
    identities move the argument there from either end.
    """
    if not -1.0 <= x <= 1.0:
        raise DataError("dilog argument must lie in [-1, 1]")
    if x == 1.0:
        return _PI26
    if x == -1.0:
        return -_PI26 / 2.0
    if x > 0.5:
        return _PI26 - math.log(x) * math.log1p(-x) - _dilog_series(1.0 - x)
    if x < -0.5:
        z = x / (x - 1.0)
        return -_dilog_series(z) - 0.5 * math.log1p(-x) ** 2
    if x == 0.0:
        return 0.0
    return _dilog_series(x)


@dataclass(frozen=True)
class GeomStarParams:
    """Multidimensional geometric parameters: failure probabilities summing < 1."""

    pis: tuple[float, ...]

    def __post_init__(self):
        for p in self.pis:
            if not 0.0 <= p < 1.0:
                raise DataError("each pi must lie in [0, 1)")
        if sum(self.pis) >= 1.0:
            raise DataError("pi values must sum to < 1")

    @property
    def rho(self) -> float:
        return 1.0 - sum(self.pis)


def geomstar_pmf(params: GeomStarParams, m) -> float:
    """P(Z = m) = pi_1^{m_1} ... pi_n^{m_n} rho multinomial(m_1 + ... + m_n; m)."""
    ms = tuple(int(v) for v in m)
    if len(ms) != len(params.pis):
        raise DataError("length mismatch between m and parameters")
    if any(v < 0 for v in ms):
        return 0.0
    logp = math.log(params.rho)
    tot = sum(ms)
    logp += float(gammaln(tot + 1.0))
    for mi, pi in zip(ms, params.pis):
        if mi == 0:
            continue
        if pi == 0.0:
            return 0.0
        logp += mi * math.log(pi) - float(gammaln(mi + 1.0))
    return math.exp(logp)


@dataclass(frozen=True)
class NStatLaw:
    """Geometric law (starting at 1) of the estimator's denominator count."""

    parameter: float

    def pmf(self, n: int) -> float:
        if n < 1:
            return 0.0
        return self.parameter * (1.0 - self.parameter) ** (n - 1)

    @property
    def mean(self) -> float:
        return 1.0 / self.parameter


def n_stat_law(law: EstimatorLaw) -> NStatLaw:
    """The denominator count is geometric with success parameter d - h."""
    return NStatLaw(parameter=law.djk - law.hj)


def moments_by_cdf_quadrature(law: EstimatorLaw, tol: float = 1e-6):
    """Independent oracle: mean and second moment by integrating 1 - G.

    mean = int_0^1 (1-G) dx and E[X^2] = int_0^1 2x (1-G) dx. G is a monotone
    step function, so each panel [a, b] brackets its integral contribution by
    the endpoint values; panels are bisected greedily until both bracket
    widths fall below tol. The far upper tail is bounded analytically.
    Returns ((mean_lo, mean_hi), (m2_lo, m2_hi)).
    """
    import heapq

    gtol = tol * 1e-3
    cache: dict[float, float] = {}

    def G(x: float) -> float:
        if x not in cache:
            cache[x] = cdf(law, x, gtol)
        return cache[x]

    # choose the analytic-tail cutoff
    x_hi = 0.5
    while True:
        ub = min(_chernoff_ge(law, x_hi), 1.0 - G(x_hi))
        if ub * (1.0 - x_hi) <= tol / 8 and ub * (1.0 - x_hi * x_hi) <= tol / 8:
            break
        x_hi = 0.5 + 0.5 * x_hi
        if 1.0 - x_hi < 1e-9:
            break
    tail_hi1 = ub * (1.0 - x_hi)
    tail_hi2 = ub * (1.0 - x_hi * x_hi)

    def bounds(a: float, b: float):
        ca, cb = 1.0 - G(b), 1.0 - G(a)  # 1-G decreasing: [min, max] on panel
        w1 = b - a
        w2 = b * b - a * a
        return (w1 * ca, w1 * cb, w2 * ca, w2 * cb)

    heap = []
    items = {}
    key = 0
    gap1 = tail_hi1
    gap2 = tail_hi2

    def push(a: float, b: float):
        nonlocal key, gap1, gap2
        lo1, hi1, lo2, hi2 = bounds(a, b)
        items[key] = (a, b, lo1, hi1, lo2, hi2)
        gap1 += hi1 - lo1
        gap2 += hi2 - lo2
        heapq.heappush(heap, (-(max(hi1 - lo1, hi2 - lo2)), key))
        key += 1

    push(0.0, x_hi / 2)
    push(x_hi / 2, x_hi)
    for _ in range(500_000):
        if gap1 <= tol and gap2 <= tol:
            break
        _, kk = heapq.heappop(heap)
        a, b, lo1, hi1, lo2, hi2 = items.pop(kk)
        gap1 -= hi1 - lo1
        gap2 -= hi2 - lo2
        mid = 0.5 * (a + b)
        push(a, mid)
        push(mid, b)
    m1_lo = sum(v[2] for v in items.values())
    m1_hi = sum(v[3] for v in items.values()) + tail_hi1
    m2_lo = sum(v[4] for v in items.values())
    m2_hi = sum(v[5] for v in items.values()) + tail_hi2
    return (m1_lo, m1_hi), (m2_lo, m2_hi)
