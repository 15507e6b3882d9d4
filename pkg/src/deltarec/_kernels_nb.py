"""Numba-compiled hot kernels: sequence simulation, count extraction, LR bootstrap.

Mirror of ``_kernels_py``; both backends consume the same splitmix64 streams and
must produce bit-identical results (covered by tests/test_backends.py). All
values handled here live on the shifted support {0,1,...} (offset removed by the
callers). Stream rule: replicate ``i`` of seed ``s`` starts from
``mix64(s + (i+1)*PHI)`` and then steps ``state += PHI; out = mix64(state)``.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

PHI = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

GEOMETRIC = 0
POISSON = 1
NEGBINOMIAL = 2

COMPLETE = 0
INCOMPLETE = 1

NULL_GEOM_COMPOSITE = 0
NULL_POIS_COMPOSITE = 1
NULL_GEOM_SIMPLE = 2

DESIGN_FIXEDLEN = 0
DESIGN_NRECORDS = 1


@njit(cache=True)
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _stream(seed, idx):
    return _mix(np.uint64(seed) + (np.uint64(idx) + np.uint64(1)) * PHI)


@njit(cache=True)
def _u01(state):
    state = state + PHI
    z = _mix(state)
    return state, (z >> np.uint64(11)) * _INV53


@njit(cache=True)
def rng_uniforms(seed, idx, n):
    out = np.empty(n, np.float64)
    st = _stream(seed, idx)
    for i in range(n):
        st, u = _u01(st)
        out[i] = u
    return out


@njit(cache=True)
def _geom_from_u(u, p):
    # draws on {0,1,...}; success probability p
    if p >= 1.0:
        return 0
    return int(math.floor(math.log1p(-u) / math.log1p(-p)))


@njit(cache=True)
def _pois_tail(lam, t):
    # P(X >= t)
    if t <= 0:
        return 1.0
    logp = t * math.log(lam) - lam - math.lgamma(t + 1.0)
    if logp < -700.0:
        return 0.0
    p = math.exp(logp)
    s = p
    x = t
    while True:
        x += 1
        p *= lam / x
        s += p
        if p < 1e-18 * s and x > lam:
            break
    return s


@njit(cache=True)
def _pois_draw_ge(state, lam, t):
    # X | X >= t by inverse cdf on the conditional tail
    tail = _pois_tail(lam, t)
    state, u = _u01(state)
    target = u * tail
    logp = t * math.log(lam) - lam - math.lgamma(t + 1.0) if t > 0 else -lam
    p = math.exp(logp)
    c = p
    x = t
    while target > c and x < t + 10000:
        x += 1
        p *= lam / x
        c += p
    return state, x


@njit(cache=True)
def _draw(state, fam, par1, par2):
    if fam == GEOMETRIC:
        state, u = _u01(state)
        return state, _geom_from_u(u, par1)
    elif fam == POISSON:
        return _pois_draw_ge(state, par1, 0)
    else:  # negative binomial: failures before the par2-th success
        m = int(par2)
        tot = 0
        for _ in range(m):
            state, u = _u01(state)
            tot += _geom_from_u(u, par1)
        return state, tot


@njit(cache=True)
def _draw_ge(state, fam, par1, par2, t):
    # X | X >= t; geometric uses memorylessness, others invert the tail cdf
    if t <= 0:
        return _draw(state, fam, par1, par2)
    if fam == GEOMETRIC:
        state, u = _u01(state)
        return state, t + _geom_from_u(u, par1)
    elif fam == POISSON:
        return _pois_draw_ge(state, par1, t)
    else:
        # no closed tail; rejection on the unconditional sampler (values small)
        while True:
            state, x = _draw(state, fam, par1, par2)
            if x >= t:
                return state, x


@njit(cache=True)
def _tail_prob(fam, par1, par2, t):
    # P(X >= t)
    if t <= 0:
        return 1.0
    if fam == GEOMETRIC:
        return math.exp(t * math.log1p(-par1))
    elif fam == POISSON:
        return _pois_tail(par1, t)
    else:
        m = int(par2)
        s = 0.0
        logq = math.log1p(-par1)
        for x in range(t):
            lp = m * math.log(par1) + x * logq + math.lgamma(x + m) - math.lgamma(x + 1.0) - math.lgamma(float(m))
            s += math.exp(lp)
        r = 1.0 - s
        return r if r > 0.0 else 0.0


@njit(cache=True)
def mc_threshold_vvec(seed, fam, par1, par2, j, k, reps, cap):
    """Per replicate, counts of values j..j+k until the first draw > j+k.

    Returns (counts[reps, k+1], n_capped); capped replicates are retried on
    fresh substreams so every row is a completed run.
    """
    counts = np.zeros((reps, k + 1), np.int64)
    ncap = 0
    for i in range(reps):
        idx = i
        done = False
        while not done:
            st = _stream(seed, idx)
            for c in range(k + 1):
                counts[i, c] = 0
            ndraws = 0
            while True:
                st, x = _draw(st, fam, par1, par2)
                ndraws += 1
                if x > j + k:
                    done = True
                    break
                if j <= x:
                    counts[i, x - j] += 1
                if ndraws >= cap:
                    break
            if not done:
                ncap += 1
                idx = reps + ncap
    return counts, ncap


@njit(cache=True)
def sim_values_fixedlen(seed, idx, fam, par1, par2, n):
    out = np.empty(n, np.int64)
    st = _stream(seed, idx)
    for i in range(n):
        st, x = _draw(st, fam, par1, par2)
        out[i] = x
    return out


@njit(cache=True)
def sim_values_nrecords(seed, idx, fam, par1, par2, n_rec, k, cap):
    """Delta-record values (obs order) until the (n_rec+1)-th record arrives.

    Irrelevant draws (below current max - k) are skipped in closed form, so the
    cost is O(number of delta-records); the skip count still advances the raw
    index checked against ``cap``. Returns (values, is_record, ok).
    """
    buf = np.empty(4096, np.int64)
    rec = np.zeros(4096, np.uint8)
    st = _stream(seed, idx)
    st, x = _draw(st, fam, par1, par2)
    buf[0] = x
    rec[0] = 1
    nout = 1
    m = x
    nrecords = 1
    raw = 1
    ok = True
    while nrecords < n_rec + 1:
        t = m - k
        if t < 0:
            t = 0
        pge = _tail_prob(fam, par1, par2, t)
        if pge <= 0.0:
            ok = False
            break
        if pge < 1.0:
            st, u = _u01(st)
            raw += _geom_from_u(u, pge)
        raw += 1
        if raw > cap:
            ok = False
            break
        st, y = _draw_ge(st, fam, par1, par2, t)
        is_rec = y > m
        if is_rec:
            nrecords += 1
            if nrecords == n_rec + 1:
                break  # arrival observed, value not part of the sample
            m = y
        if nout >= buf.shape[0]:
            nb = np.empty(buf.shape[0] * 2, np.int64)
            nr = np.zeros(buf.shape[0] * 2, np.uint8)
            nb[:nout] = buf[:nout]
            nr[:nout] = rec[:nout]
            buf = nb
            rec = nr
        buf[nout] = y
        rec[nout] = 1 if is_rec else 0
        nout += 1
    return buf[:nout], rec[:nout], ok


@njit(cache=True)
def extract_acounts(values, k, vmax):
    """A[m, l] counts from a raw sequence; returns (A, rn, ok)."""
    n = values.shape[0]
    A = np.zeros((vmax + 1, k + 1), np.int64)
    m = values[0]
    if m > vmax:
        return A, 0, False
    A[m, 0] += 1
    for i in range(1, n):
        x = values[i]
        if x > m:
            if x > vmax:
                return A, 0, False
            A[x, 0] += 1
            m = x
        elif x >= m - k:
            A[x, m - x if x < m else 0] += 1
    return A, m, True


@njit(cache=True)
def counts_vnw(A, rn, k):
    """Level-k counts: V[j] and W[j] = sum_{l=1..k} v_{j+l}^{k-l}; N = 1+V+W."""
    V = np.zeros(rn + 1, np.int64)
    W = np.zeros(rn + 1, np.int64)
    for j in range(rn + 1):
        s = 0
        for l in range(k + 1):
            s += A[j, l]
        V[j] = s
        w = 0
        for l in range(1, k + 1):
            if j + l <= rn:
                for u in range(k - l + 1):
                    w += A[j + l, u]
        W[j] = w
    return V, W


@njit(cache=True)
def _sup_loglik(V, W, bound):
    # log-likelihood at the per-value NPMLE; bound = last j with the +1 exponent
    s = 0.0
    for j in range(V.shape[0]):
        v = V[j]
        den = V[j] + W[j] + (1 if j <= bound else 0)
        if den == 0:
            continue
        o = den - v
        if v > 0:
            s += v * math.log(v / den)
        if o > 0:
            s += o * math.log(o / den)
    return s


@njit(cache=True)
def logLR_geometric(V, W, bound, simple_p):
    """Log LR against a geometric hazard; simple_p < 0 means composite (fit p)."""
    sv = 0
    sd = 0
    for j in range(V.shape[0]):
        sv += V[j]
        sd += V[j] + W[j] + (1 if j <= bound else 0)
    if simple_p >= 0.0:
        p = simple_p
    else:
        p = sv / sd
    l0 = 0.0
    if sv > 0:
        if p <= 0.0:
            return -np.inf, p
        l0 += sv * math.log(p)
    if sd - sv > 0:
        if p >= 1.0:
            return -np.inf, p
        l0 += (sd - sv) * math.log1p(-p)
    return l0 - _sup_loglik(V, W, bound), p


@njit(cache=True)
def pois_hazards(lam, J):
    """Poisson hazards h_0..h_J via the stable tail-ratio sum (no 1-cdf subtraction)."""
    h = np.empty(J + 1, np.float64)
    for j in range(J + 1):
        r = 0.0
        term = 1.0
        s = 1
        while True:
            term *= lam / (j + s)
            r += term
            if term < 1e-17 * (1.0 + r) and lam / (j + s) < 0.9:
                break
            s += 1
            if s > 10000:
                break
        h[j] = 1.0 / (1.0 + r)
    return h


@njit(cache=True)
def _pois_loglik(V, W, bound, lam):
    h = pois_hazards(lam, V.shape[0] - 1)
    s = 0.0
    for j in range(V.shape[0]):
        v = V[j]
        beta = W[j] + (1 if j <= bound else 0)
        if v > 0:
            s += v * math.log(h[j])
        if beta > 0:
            s += beta * math.log1p(-h[j])
    return s


@njit(cache=True)
def fit_poisson(V, W, bound, lam_lo, lam_hi, tol):
    """Golden-section maximiser of the Poisson delta-record log-likelihood."""
    invphi = 0.6180339887498949
    a = lam_lo
    b = lam_hi
    c = b - (b - a) * invphi
    d = a + (b - a) * invphi
    fc = _pois_loglik(V, W, bound, c)
    fd = _pois_loglik(V, W, bound, d)
    while b - a > tol:
        if fc > fd:
            b = d
            d = c
            fd = fc
            c = b - (b - a) * invphi
            fc = _pois_loglik(V, W, bound, c)
        else:
            a = c
            c = d
            fc = fd
            d = a + (b - a) * invphi
            fd = _pois_loglik(V, W, bound, d)
    return 0.5 * (a + b)


@njit(cache=True)
def logLR_poisson(V, W, bound, lam_hat):
    return _pois_loglik(V, W, bound, lam_hat) - _sup_loglik(V, W, bound)


@njit(cache=True)
def _sim_design_counts(st, fam, par1, par2, design, n_design, k, cap, vmax):
    """One bootstrap replicate's A-counts for either sampling design."""
    if design == DESIGN_FIXEDLEN:
        vals = np.empty(n_design, np.int64)
        for i in range(n_design):
            st, x = _draw(st, fam, par1, par2)
            vals[i] = x
        A, rn, ok = extract_acounts(vals, k, vmax)
        return st, A, rn, ok
    A = np.zeros((vmax + 1, k + 1), np.int64)
    st, x = _draw(st, fam, par1, par2)
    if x > vmax:
        return st, A, 0, False
    A[x, 0] += 1
    m = x
    nrecords = 1
    raw = 1
    while nrecords < n_design + 1:
        t = m - k
        if t < 0:
            t = 0
        pge = _tail_prob(fam, par1, par2, t)
        if pge <= 0.0:
            return st, A, m, False
        if pge < 1.0:
            st, u = _u01(st)
            raw += _geom_from_u(u, pge)
        raw += 1
        if raw > cap:
            return st, A, m, False
        st, y = _draw_ge(st, fam, par1, par2, t)
        if y > m:
            nrecords += 1
            if nrecords == n_design + 1:
                break
            if y > vmax:
                return st, A, m, False
            A[y, 0] += 1
            m = y
        elif y == m:
            A[y, 0] += 1
        else:
            A[y, m - y] += 1
    return st, A, m, True


@njit(cache=True)
def bootstrap_count_le(seed, B, design, n_design, k, cap, vmax, null_kind,
                       theta, obs_loglr, bound_mode):
    """Parametric bootstrap: #{logLR_b <= obs} over B replicates.

    Replicate b uses substream (seed, b+1); capped replicates are retried on
    substreams (seed, B+1+retry). Returns (count_le, n_capped).
    """
    count = 0
    ncap = 0
    fam = POISSON if null_kind == NULL_POIS_COMPOSITE else GEOMETRIC
    for b in range(B):
        idx = b + 1
        while True:
            st = _stream(seed, idx)
            st, A, rn, ok = _sim_design_counts(st, fam, theta, 0.0, design,
                                               n_design, k, cap, vmax)
            if ok:
                break
            ncap += 1
            idx = B + ncap
        V, W = counts_vnw(A, rn, k)
        bound = rn if bound_mode == COMPLETE else min(rn - k, rn - 1)
        if null_kind == NULL_GEOM_COMPOSITE:
            loglr, _ = logLR_geometric(V, W, bound, -1.0)
        elif null_kind == NULL_GEOM_SIMPLE:
            loglr, _ = logLR_geometric(V, W, bound, theta)
        else:
            lam_b = fit_poisson(V, W, bound, 1e-6, 10.0 * (rn + 1.0), 1e-8)
            loglr = logLR_poisson(V, W, bound, lam_b)
        if loglr <= obs_loglr:
            count += 1
    return count, ncap
