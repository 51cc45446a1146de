"""Independent reference implementations used as test oracles.

Everything here is written naively and separately from the package:
direct products over neighbor sets, dict/list bookkeeping, no shared
helpers, so agreement is evidence rather than tautology. The one
exception is ref_nwrbp_exact, which deliberately reuses the package's
low-level row arithmetic (through the uncompiled py_func entry points)
while reimplementing the scheduling logic sequentially; it pins down
the scheduler's behavior bit for bit, and the arithmetic itself is
covered by the naive references and hand examples elsewhere.
"""

import itertools
import math

import numpy as np

EPS = 1e-12


def clamp(v):
    return min(max(v, EPS), 1.0 - EPS)


def rho_clamped(rho):
    return min(max(rho, 1e-9), 1.0 - 1e-9)


def or_rows(dense, x):
    out = []
    for row in dense:
        hit = 0
        for a, xi in zip(row, x):
            if a and xi:
                hit = 1
        out.append(hit)
    return out


def mismatches(y, x, dense):
    noiseless = or_rows(dense, x)
    return sum(1 for yt, zt in zip(y, noiseless) if yt != zt)


def loglik(y, x, dense, rho):
    # One multiply per term keeps equal mismatch counts at equal floats,
    # so likelihood ties are exact regardless of which tests flipped.
    r = rho_clamped(rho)
    d = mismatches(y, x, dense)
    return d * math.log(r) + (len(y) - d) * math.log(1.0 - r)


def test_message(neighbor_msgs, y_t, rho):
    """Candidate m_{t->i} from the OTHER members' item-to-test values."""
    r = rho_clamped(rho)
    prod = 1.0
    for m in neighbor_msgs:
        prod *= 1.0 - m
    if y_t == 0:
        u0, u1 = r + (1.0 - 2.0 * r) * prod, r
    else:
        u0, u1 = 1.0 - r - (1.0 - 2.0 * r) * prod, 1.0 - r
    return clamp(u1 / (u0 + u1))


def item_message(neighbor_msgs, q):
    """Candidate m_{i->t} from the OTHER tests' test-to-item values."""
    u1 = q
    u0 = 1.0 - q
    for m in neighbor_msgs:
        u1 *= m
        u0 *= 1.0 - m
    return clamp(u1 / (u0 + u1))


def _graph(dense):
    m = len(dense)
    n = len(dense[0]) if m else 0
    tests_of = [[t for t in range(m) if dense[t][i]] for i in range(n)]
    items_of = [[i for i in range(n) if dense[t][i]] for t in range(m)]
    return m, n, tests_of, items_of


def ref_llrs(mu_ti, tests_of, q):
    prior = math.log(q) - math.log(1.0 - q)
    out = []
    for i, tests in enumerate(tests_of):
        acc = prior
        for t in tests:
            acc += math.log(mu_ti[(t, i)]) - math.log(1.0 - mu_ti[(t, i)])
        out.append(acc)
    return np.array(out)


def ref_flood(dense, y, q, rho, iterations):
    """Naive flooding BP with dict messages; returns the LLR vector."""
    m, n, tests_of, items_of = _graph(dense)
    mu_it = {(i, t): q for i in range(n) for t in tests_of[i]}
    mu_ti = {(t, i): 0.5 for t in range(m) for i in items_of[t]}
    for _ in range(iterations):
        for t in range(m):
            for i in items_of[t]:
                others = [mu_it[(i2, t)] for i2 in items_of[t] if i2 != i]
                mu_ti[(t, i)] = test_message(others, y[t], rho)
        for i in range(n):
            for t in tests_of[i]:
                others = [mu_ti[(t2, i)] for t2 in tests_of[i] if t2 != t]
                mu_it[(i, t)] = item_message(others, q)
    return ref_llrs(mu_ti, tests_of, q)


def ref_rsbp(dense, y, q, rho, uniforms):
    """Naive random-schedule BP consuming the given per-step uniforms."""
    m, n, tests_of, items_of = _graph(dense)
    mu_it = {(i, t): q for i in range(n) for t in tests_of[i]}
    mu_ti = {(t, i): 0.5 for t in range(m) for i in items_of[t]}
    for u in uniforms:
        t1 = min(int(u * m), m - 1)
        for i in items_of[t1]:
            others = [mu_it[(i2, t1)] for i2 in items_of[t1] if i2 != i]
            mu_ti[(t1, i)] = test_message(others, y[t1], rho)
        for i in items_of[t1]:
            for t in tests_of[i]:
                others = [mu_ti[(t2, i)] for t2 in tests_of[i] if t2 != t]
                mu_it[(i, t)] = item_message(others, q)
    return ref_llrs(mu_ti, tests_of, q)


def ref_residual(mu_it, mu_ti, items_of, t, i, y, rho):
    others = [mu_it[(i2, t)] for i2 in items_of[t] if i2 != i]
    cand = test_message(others, y[t], rho)
    stored = clamp(mu_ti[(t, i)])
    return abs((math.log(cand) - math.log(1.0 - cand))
               - (math.log(stored) - math.log(1.0 - stored)))


def ref_nwrbp_naive(dense, y, q, rho, budget):
    """Naive node-wise residual BP: every residual recomputed from
    scratch each step, selection by literal argmax with low-index ties."""
    m, n, tests_of, items_of = _graph(dense)
    mu_it = {(i, t): q for i in range(n) for t in tests_of[i]}
    mu_ti = {(t, i): 0.5 for t in range(m) for i in items_of[t]}
    res = {(t, i): ref_residual(mu_it, mu_ti, items_of, t, i, y, rho)
           for t in range(m) for i in items_of[t]}
    chosen = []
    for _ in range(budget):
        best_t, best_r = 0, -1.0
        for t in range(m):
            row = max((res[(t, i)] for i in items_of[t]), default=0.0)
            if row > best_r:
                best_t, best_r = t, row
        t1 = best_t
        chosen.append(t1)
        for i in items_of[t1]:
            others = [mu_it[(i2, t1)] for i2 in items_of[t1] if i2 != i]
            mu_ti[(t1, i)] = test_message(others, y[t1], rho)
            res[(t1, i)] = 0.0
        for i in items_of[t1]:
            for t2 in tests_of[i]:
                if t2 == t1:
                    continue
                others = [mu_ti[(t3, i)] for t3 in tests_of[i] if t3 != t2]
                mu_it[(i, t2)] = item_message(others, q)
                for i2 in items_of[t2]:
                    if i2 != i:
                        res[(t2, i2)] = ref_residual(mu_it, mu_ti, items_of, t2, i2, y, rho)
    return chosen, ref_llrs(mu_ti, tests_of, q)


def ref_nwrbp_exact(matrix, y, q, rho, budget):
    """Literal sequential node-wise residual schedule, bit-compatible.

    Reuses the package kernels' uncompiled row arithmetic so every float
    matches, but keeps residual bookkeeping as plain arrays, selection as
    a linear scan, and refreshes interleaved per item exactly as the
    sequential description reads. Returns (chosen tests, msg_item,
    msg_test, residual ratios, llrs).
    """
    from gtbp import _kernels as k

    r = rho_clamped(rho)
    tp, ei, et = matrix.test_ptr, matrix.edge_item, matrix.edge_test
    ip, ie = matrix.item_ptr, matrix.item_edges
    m = matrix.m
    e = matrix.edge_count
    maxdeg = 1
    for t in range(m):
        maxdeg = max(maxdeg, tp[t + 1] - tp[t])
    for i in range(matrix.n):
        maxdeg = max(maxdeg, ip[i + 1] - ip[i])
    pref = np.empty(maxdeg + 1)
    suff = np.empty(maxdeg + 1)
    cand = np.empty(maxdeg + 1)
    prefm = np.empty(maxdeg + 1)
    sufm = np.empty(maxdeg + 1)
    prefq = np.empty(maxdeg + 1)
    sufq = np.empty(maxdeg + 1)
    msg_item = np.full(e, q)
    msg_test = np.full(e, 0.5)
    res = np.empty(e)

    def refresh(t2, skip_item):
        d = k._test_row_candidates.py_func(t2, tp, msg_item, y, r, pref, suff, cand)
        for j in range(d):
            if ei[tp[t2] + j] != skip_item:
                res[tp[t2] + j] = k._ratio_residual.py_func(cand[j], msg_test[tp[t2] + j])

    for t in range(m):
        refresh(t, -1)
    chosen = []
    for _ in range(budget):
        best_t, best_key = 0, -np.inf
        for t in range(m):
            row = 1.0
            for j in range(tp[t], tp[t + 1]):
                row = max(row, res[j])
            if row > best_key:
                best_t, best_key = t, row
        t1 = best_t
        chosen.append(t1)
        s1 = tp[t1]
        d1 = k._test_row_candidates.py_func(t1, tp, msg_item, y, r, pref, suff, cand)
        for j in range(d1):
            msg_test[s1 + j] = cand[j]
            res[s1 + j] = 1.0
        for j in range(d1):
            i = ei[s1 + j]
            k._update_item_messages.py_func(i, ip, ie, msg_test, msg_item, q, s1 + j,
                                            prefm, sufm, prefq, sufq)
            for jj in range(ip[i], ip[i + 1]):
                t2 = et[ie[jj]]
                if t2 != t1:
                    refresh(t2, i)
    llrs = np.empty(matrix.n)
    k._compute_llrs.py_func(ip, ie, msg_test, math.log(q) - math.log(1.0 - q), llrs)
    return chosen, msg_item, msg_test, res, llrs


def brute_ml(y, dense, rho, kk):
    """Exhaustive ML over k-subsets by direct likelihood evaluation."""
    n = len(dense[0]) if dense else 0
    best, best_set = -math.inf, ()
    for subset in itertools.combinations(range(n), kk):
        x = [1 if i in subset else 0 for i in range(n)]
        ll = loglik(y, x, dense, rho)
        if ll > best:
            best, best_set = ll, subset
    return list(best_set)


def brute_map(y, dense, rho, q, w_max):
    """Exhaustive MAP over supports of weight <= w_max."""
    n = len(dense[0]) if dense else 0
    lq1 = math.log(q)
    lq0 = math.log(1.0 - q)
    best, best_set = -math.inf, None
    for w in range(0, w_max + 1):
        for subset in itertools.combinations(range(n), w):
            x = [1 if i in subset else 0 for i in range(n)]
            score = w * lq1 + (n - w) * lq0 + loglik(y, x, dense, rho)
            if score > best:
                best, best_set = score, subset
    return list(best_set)


def brute_marginal_llrs(y, dense, rho, prior_kind, n, kk):
    """Posterior LLRs by full 2^n enumeration with log-sum-exp."""
    q = kk / n
    acc1 = [[] for _ in range(n)]
    acc0 = [[] for _ in range(n)]
    for bits in itertools.product((0, 1), repeat=n):
        w = sum(bits)
        if prior_kind == "combinatorial":
            if w != kk:
                continue
            lp = 0.0
        else:
            lp = w * math.log(q) + (n - w) * math.log(1.0 - q)
        score = lp + loglik(y, list(bits), dense, rho)
        for i in range(n):
            (acc1[i] if bits[i] else acc0[i]).append(score)

    def lse(vals):
        if not vals:
            return -math.inf
        top = max(vals)
        return top + math.log(sum(math.exp(v - top) for v in vals))

    return np.array([lse(acc1[i]) - lse(acc0[i]) for i in range(n)])
