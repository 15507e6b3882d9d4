"""Pure python/numpy fallback for the hot kernels (no numba).

Same public names and bit-identical output as ``_kernels_nb`` (the splitmix64
streams use masked python-int arithmetic here, uint64 ops there). Sequential
and therefore much slower; ``deltarec bench`` quantifies the gap.
"""
from __future__ import annotations

import math

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
PHI = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
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


def _mix(z):
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _stream(seed, idx):
    return _mix((seed + (idx + 1) * PHI) & _MASK)


def _u01(state):
    state = (state + PHI) & _MASK
    z = _mix(state)
    return state, (z >> 11) * _INV53


def rng_uniforms(seed, idx, n):
    out = np.empty(n, np.float64)
    st = _stream(seed, idx)
    for i in range(n):
        st, u = _u01(st)
        out[i] = u
    return out


def _geom_from_u(u, p):
    if p >= 1.0:
        return 0
    return int(math.floor(math.log1p(-u) / math.log1p(-p)))


def _pois_tail(lam, t):
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


def _pois_draw_ge(state, lam, t):
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


def _draw(state, fam, par1, par2):
    if fam == GEOMETRIC:
        state, u = _u01(state)
        return state, _geom_from_u(u, par1)
    elif fam == POISSON:
        return _pois_draw_ge(state, par1, 0)
    else:
        m = int(par2)
        tot = 0
        for _ in range(m):
            state, u = _u01(state)
            tot += _geom_from_u(u, par1)
        return state, tot


def _draw_ge(state, fam, par1, par2, t):
    if t <= 0:
        return _draw(state, fam, par1, par2)
    if fam == GEOMETRIC:
        state, u = _u01(state)
        return state, t + _geom_from_u(u, par1)
    elif fam == POISSON:
        return _pois_draw_ge(state, par1, t)
    else:
        while True:
            state, x = _draw(state, fam, par1, par2)
            if x >= t:
                return state, x


def _tail_prob(fam, par1, par2, t):
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
            lp = (m * math.log(par1) + x * logq + math.lgamma(x + m)
                  - math.lgamma(x + 1.0) - math.lgamma(float(m)))
            s += math.exp(lp)
        r = 1.0 - s
        return r if r > 0.0 else 0.0


def mc_threshold_vvec(seed, fam, par1, par2, j, k, reps, cap):
    counts = np.zeros((reps, k + 1), np.int64)
    ncap = 0
    for i in range(reps):
        idx = i
        done = False
        while not done:
            st = _stream(seed, idx)
            counts[i, :] = 0
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


def sim_values_fixedlen(seed, idx, fam, par1, par2, n):
    out = np.empty(n, np.int64)
    st = _stream(seed, idx)
    for i in range(n):
        st, x = _draw(st, fam, par1, par2)
        out[i] = x
    return out


def sim_values_nrecords(seed, idx, fam, par1, par2, n_rec, k, cap):
    buf = []
    rec = []
    st = _stream(seed, idx)
    st, x = _draw(st, fam, par1, par2)
    buf.append(x)
    rec.append(1)
    m = x
    nrecords = 1
    raw = 1
    ok = True
    while nrecords < n_rec + 1:
        t = max(m - k, 0)
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
                break
            m = y
        buf.append(y)
        rec.append(1 if is_rec else 0)
    return np.asarray(buf, np.int64), np.asarray(rec, np.uint8), ok


def extract_acounts(values, k, vmax):
    n = len(values)
    A = np.zeros((vmax + 1, k + 1), np.int64)
    m = int(values[0])
    if m > vmax:
        return A, 0, False
    A[m, 0] += 1
    for i in range(1, n):
        x = int(values[i])
        if x > m:
            if x > vmax:
                return A, 0, False
            A[x, 0] += 1
            m = x
        elif x >= m - k:
            A[x, m - x if x < m else 0] += 1
    return A, m, True


def counts_vnw(A, rn, k):
    V = np.zeros(rn + 1, np.int64)
    W = np.zeros(rn + 1, np.int64)
    for j in range(rn + 1):
        V[j] = A[j, : k + 1].sum()
        w = 0
        for l in range(1, k + 1):
            if j + l <= rn:
                w += A[j + l, : k - l + 1].sum()
        W[j] = w
    return V, W


def _sup_loglik(V, W, bound):
    s = 0.0
    for j in range(len(V)):
        v = int(V[j])
        den = int(V[j] + W[j]) + (1 if j <= bound else 0)
        if den == 0:
            continue
        o = den - v
        if v > 0:
            s += v * math.log(v / den)
        if o > 0:
            s += o * math.log(o / den)
    return s


def logLR_geometric(V, W, bound, simple_p):
    sv = int(V.sum())
    sd = sv + int(W.sum()) + sum(1 for j in range(len(V)) if j <= bound)
    p = simple_p if simple_p >= 0.0 else sv / sd
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


def pois_hazards(lam, J):
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


def _pois_loglik(V, W, bound, lam):
    h = pois_hazards(lam, len(V) - 1)
    s = 0.0
    for j in range(len(V)):
        v = int(V[j])
        beta = int(W[j]) + (1 if j <= bound else 0)
        if v > 0:
            s += v * math.log(h[j])
        if beta > 0:
            s += beta * math.log1p(-h[j])
    return s


def fit_poisson(V, W, bound, lam_lo, lam_hi, tol):
    invphi = 0.6180339887498949
    a, b = lam_lo, lam_hi
    c = b - (b - a) * invphi
    d = a + (b - a) * invphi
    fc = _pois_loglik(V, W, bound, c)
    fd = _pois_loglik(V, W, bound, d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * invphi
            fc = _pois_loglik(V, W, bound, c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * invphi
            fd = _pois_loglik(V, W, bound, d)
    return 0.5 * (a + b)


def logLR_poisson(V, W, bound, lam_hat):
    return _pois_loglik(V, W, bound, lam_hat) - _sup_loglik(V, W, bound)


def _sim_design_counts(st, fam, par1, par2, design, n_design, k, cap, vmax):
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
        t = max(m - k, 0)
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


def bootstrap_count_le(seed, B, design, n_design, k, cap, vmax, null_kind,
                       theta, obs_loglr, bound_mode):
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
