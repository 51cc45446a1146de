"""Compiled message-passing and enumeration kernels.

Everything here is numba-compiled, operates on the flat CSR adjacency
arrays of MeasurementMatrix, and is deliberately free of randomness
(uniforms are drawn by callers and passed in) and of fastmath so results
are bit-reproducible across runs and thread counts.

Message convention: msg_item[e] is the item-to-test belief on edge e,
msg_test[e] the test-to-item belief, both "probability the item is
defective" and clamped to [EPS, 1 - EPS] before storing.
"""

import numpy as np
from numba import njit

# Messages are clamped into [EPS, 1 - EPS] before storing.
EPS = 1e-12
# Below this, item-side products switch to a log-domain recompute.
_TINY = 1e-280


@njit(cache=True, nogil=True)
def _clamp(m):
    if m < EPS:
        return EPS
    if m > 1.0 - EPS:
        return 1.0 - EPS
    return m


@njit(cache=True, nogil=True)
def _logit(m):
    return np.log(m) - np.log(1.0 - m)


@njit(cache=True, nogil=True)
def _test_row_candidates(t, test_ptr, msg_item, y, rho, pref, suff, cand):
    """Candidate test-to-item messages for every edge of test t.

    For a negative test: (u0, u1) = (rho + (1-2 rho) P, rho); positive:
    (u0, u1) = (1 - rho - (1-2 rho) P, 1 - rho), with P the product of
    (1 - msg_item) over the other member items. Candidates are clamped.
    Returns the row degree.
    """
    s = test_ptr[t]
    d = test_ptr[t + 1] - s
    pref[0] = 1.0
    for j in range(d):
        pref[j + 1] = pref[j] * (1.0 - msg_item[s + j])
    suff[d] = 1.0
    for j in range(d - 1, -1, -1):
        suff[j] = (1.0 - msg_item[s + j]) * suff[j + 1]
    if y[t] == 0:
        u1 = rho
        for j in range(d):
            pexcl = pref[j] * suff[j + 1]
            u0 = rho + (1.0 - 2.0 * rho) * pexcl
            tot = u0 + u1
            if not tot > 0.0:
                # Impossible with clamped rho; a zero normalizer means a bug.
                raise AssertionError("test update normalizer is not positive")
            cand[j] = _clamp(u1 / tot)
    else:
        u1 = 1.0 - rho
        for j in range(d):
            pexcl = pref[j] * suff[j + 1]
            u0 = 1.0 - rho - (1.0 - 2.0 * rho) * pexcl
            tot = u0 + u1
            if not tot > 0.0:
                raise AssertionError("test update normalizer is not positive")
            cand[j] = _clamp(u1 / tot)
    return d


@njit(cache=True, nogil=True)
def _commit_test_row(t, test_ptr, msg_item, msg_test, y, rho, pref, suff, cand):
    d = _test_row_candidates(t, test_ptr, msg_item, y, rho, pref, suff, cand)
    s = test_ptr[t]
    for j in range(d):
        msg_test[s + j] = cand[j]
    return d


@njit(cache=True, nogil=True)
def _update_item_messages(i, item_ptr, item_edges, msg_test, msg_item, p, skip_edge,
                          prefm, sufm, prefq, sufq):
    """Recompute item i's outgoing messages from its incoming ones.

    Each outgoing message excludes the destination edge's own incoming
    value: u1 = p * prod m, u0 = (1-p) * prod (1-m) over the others.
    skip_edge (an edge id, or -1) is left unwritten. Returns the number
    of prior fallbacks taken (normally 0).
    """
    s = item_ptr[i]
    d = item_ptr[i + 1] - s
    prefm[0] = 1.0
    prefq[0] = 1.0
    for j in range(d):
        m = msg_test[item_edges[s + j]]
        prefm[j + 1] = prefm[j] * m
        prefq[j + 1] = prefq[j] * (1.0 - m)
    sufm[d] = 1.0
    sufq[d] = 1.0
    for j in range(d - 1, -1, -1):
        m = msg_test[item_edges[s + j]]
        sufm[j] = m * sufm[j + 1]
        sufq[j] = (1.0 - m) * sufq[j + 1]
    fallbacks = 0
    for j in range(d):
        eid = item_edges[s + j]
        if eid == skip_edge:
            continue
        u1 = p * (prefm[j] * sufm[j + 1])
        u0 = (1.0 - p) * (prefq[j] * sufq[j + 1])
        tot = u0 + u1
        if tot > _TINY:
            msg_item[eid] = _clamp(u1 / tot)
        else:
            l1 = np.log(p)
            l0 = np.log(1.0 - p)
            for jj in range(d):
                if jj != j:
                    m = msg_test[item_edges[s + jj]]
                    l1 += np.log(m)
                    l0 += np.log(1.0 - m)
            diff = l0 - l1
            if diff > 700.0:
                msg_item[eid] = EPS
            elif diff < -700.0:
                msg_item[eid] = 1.0 - EPS
            elif diff == diff:
                msg_item[eid] = _clamp(1.0 / (1.0 + np.exp(diff)))
            else:
                msg_item[eid] = p
                fallbacks += 1
    return fallbacks


@njit(cache=True, nogil=True)
def _compute_llrs(item_ptr, item_edges, msg_test, prior_logit, out):
    n = item_ptr.shape[0] - 1
    for i in range(n):
        acc = prior_logit
        for j in range(item_ptr[i], item_ptr[i + 1]):
            m = msg_test[item_edges[j]]
            acc += np.log(m) - np.log(1.0 - m)
        out[i] = acc


@njit(cache=True, nogil=True)
def _max_degree(test_ptr, item_ptr):
    maxdeg = 1
    for t in range(test_ptr.shape[0] - 1):
        d = test_ptr[t + 1] - test_ptr[t]
        if d > maxdeg:
            maxdeg = d
    for i in range(item_ptr.shape[0] - 1):
        d = item_ptr[i + 1] - item_ptr[i]
        if d > maxdeg:
            maxdeg = d
    return maxdeg


@njit(cache=True, nogil=True)
def _flood(test_ptr, edge_item, item_ptr, item_edges, y, rho, p, prior_logit,
           iterations, early_delta, msg_item, msg_test, llrs):
    """Flooding schedule: per round all test rows, then all item rows.

    In-place is exact here: the test half-step writes only msg_test and
    reads only msg_item, and vice versa. early_delta < 0 disables the
    convergence check. Returns (rounds run, prior fallbacks).
    """
    m_tests = test_ptr.shape[0] - 1
    n_items = item_ptr.shape[0] - 1
    maxdeg = _max_degree(test_ptr, item_ptr)
    pref = np.empty(maxdeg + 1)
    suff = np.empty(maxdeg + 1)
    cand = np.empty(maxdeg + 1)
    prefm = np.empty(maxdeg + 1)
    sufm = np.empty(maxdeg + 1)
    prefq = np.empty(maxdeg + 1)
    sufq = np.empty(maxdeg + 1)
    prev = np.empty(n_items)
    check = early_delta >= 0.0
    if check:
        _compute_llrs(item_ptr, item_edges, msg_test, prior_logit, prev)
    fallbacks = 0
    rounds = 0
    for _ in range(iterations):
        for t in range(m_tests):
            _commit_test_row(t, test_ptr, msg_item, msg_test, y, rho, pref, suff, cand)
        for i in range(n_items):
            fallbacks += _update_item_messages(i, item_ptr, item_edges, msg_test, msg_item,
                                               p, -1, prefm, sufm, prefq, sufq)
        rounds += 1
        if check:
            _compute_llrs(item_ptr, item_edges, msg_test, prior_logit, llrs)
            dmax = 0.0
            for i in range(n_items):
                dd = abs(llrs[i] - prev[i])
                if dd > dmax:
                    dmax = dd
                prev[i] = llrs[i]
            if dmax < early_delta:
                break
    _compute_llrs(item_ptr, item_edges, msg_test, prior_logit, llrs)
    return rounds, fallbacks


@njit(cache=True, nogil=True)
def _rsbp(test_ptr, edge_item, item_ptr, item_edges, y, rho, p, prior_logit,
          uniforms, msg_item, msg_test, llrs):
    """Random schedule: each step commits one uniformly drawn test row,
    then updates every outgoing message of that test's items.

    uniforms has one entry per step; test index is min(int(u * M), M - 1).
    Returns prior fallbacks.
    """
    m_tests = test_ptr.shape[0] - 1
    maxdeg = _max_degree(test_ptr, item_ptr)
    pref = np.empty(maxdeg + 1)
    suff = np.empty(maxdeg + 1)
    cand = np.empty(maxdeg + 1)
    prefm = np.empty(maxdeg + 1)
    sufm = np.empty(maxdeg + 1)
    prefq = np.empty(maxdeg + 1)
    sufq = np.empty(maxdeg + 1)
    fallbacks = 0
    for step in range(uniforms.shape[0]):
        t = int(uniforms[step] * m_tests)
        if t >= m_tests:
            t = m_tests - 1
        _commit_test_row(t, test_ptr, msg_item, msg_test, y, rho, pref, suff, cand)
        for j in range(test_ptr[t], test_ptr[t + 1]):
            fallbacks += _update_item_messages(edge_item[j], item_ptr, item_edges, msg_test,
                                               msg_item, p, -1, prefm, sufm, prefq, sufq)
    _compute_llrs(item_ptr, item_edges, msg_test, prior_logit, llrs)
    return fallbacks


# Residuals are kept as odds ratios max(R, 1/R) >= 1.0, a strictly
# monotone transform of the LLR-domain residual |logit(c) - logit(m)|;
# 1.0 means a zero residual. This keeps the hot refresh loop log-free.

@njit(cache=True, nogil=True)
def _ratio_residual(c, m):
    num = c * (1.0 - m)
    den = (1.0 - c) * m
    r = num / den
    if r < 1.0:
        r = den / num
    return r


@njit(cache=True, nogil=True)
def _heap_prior(ka, ta, kb, tb):
    # Priority order: larger key first, ties to the lower test index.
    if ka > kb:
        return True
    if ka < kb:
        return False
    return ta < tb


@njit(cache=True, nogil=True)
def _heap_swap(a, b, hkey, htest, hpos):
    ka = hkey[a]
    ta = htest[a]
    hkey[a] = hkey[b]
    htest[a] = htest[b]
    hkey[b] = ka
    htest[b] = ta
    hpos[htest[a]] = a
    hpos[htest[b]] = b


@njit(cache=True, nogil=True)
def _sift_up(pos, hkey, htest, hpos):
    while pos > 0:
        parent = (pos - 1) // 2
        if _heap_prior(hkey[pos], htest[pos], hkey[parent], htest[parent]):
            _heap_swap(pos, parent, hkey, htest, hpos)
            pos = parent
        else:
            return


@njit(cache=True, nogil=True)
def _sift_down(pos, size, hkey, htest, hpos):
    while True:
        child = 2 * pos + 1
        if child >= size:
            return
        right = child + 1
        if right < size and _heap_prior(hkey[right], htest[right], hkey[child], htest[child]):
            child = right
        if _heap_prior(hkey[child], htest[child], hkey[pos], htest[pos]):
            _heap_swap(pos, child, hkey, htest, hpos)
            pos = child
        else:
            return


@njit(cache=True, nogil=True)
def _heap_update(t, newkey, size, hkey, htest, hpos):
    pos = hpos[t]
    old = hkey[pos]
    hkey[pos] = newkey
    if newkey > old:
        _sift_up(pos, hkey, htest, hpos)
    elif newkey < old:
        _sift_down(pos, size, hkey, htest, hpos)


@njit(cache=True, nogil=True)
def _refresh_row(t, skip_item, test_ptr, edge_item, msg_item, msg_test, y, rho,
                 pref, suff, cand, res):
    """Recompute residuals of test row t (except the edge to skip_item)
    and return the row's max ratio, stale entries included."""
    d = _test_row_candidates(t, test_ptr, msg_item, y, rho, pref, suff, cand)
    s = test_ptr[t]
    for j in range(d):
        if edge_item[s + j] != skip_item:
            res[s + j] = _ratio_residual(cand[j], msg_test[s + j])
    mx = 1.0
    for j in range(d):
        if res[s + j] > mx:
            mx = res[s + j]
    return mx


@njit(cache=True, nogil=True)
def _nwrbp(test_ptr, edge_item, edge_test, item_ptr, item_edges, y, rho, p,
           prior_logit, budget, msg_item, msg_test, llrs):
    """Node-wise residual schedule.

    Each step commits the test row with the largest residual (ties to the
    lowest test index), zeroes that row's residuals, updates the outgoing
    messages of its items (except back to the committed test), then
    refreshes the residuals of every touched test row. A row touched by a
    single item i skips the edge to i, whose candidate is unaffected by
    mu_{i->t}; rows touched more than once are refreshed in full, which
    matches the per-item sequential refresh exactly because candidates
    never depend on their own destination's message. Returns fallbacks.
    """
    m_tests = test_ptr.shape[0] - 1
    n_edges = edge_item.shape[0]
    maxdeg = _max_degree(test_ptr, item_ptr)
    pref = np.empty(maxdeg + 1)
    suff = np.empty(maxdeg + 1)
    cand = np.empty(maxdeg + 1)
    prefm = np.empty(maxdeg + 1)
    sufm = np.empty(maxdeg + 1)
    prefq = np.empty(maxdeg + 1)
    sufq = np.empty(maxdeg + 1)

    res = np.empty(n_edges)
    hkey = np.empty(m_tests)
    htest = np.empty(m_tests, np.int64)
    hpos = np.empty(m_tests, np.int64)
    for t in range(m_tests):
        hkey[t] = _refresh_row(t, -1, test_ptr, edge_item, msg_item, msg_test, y, rho,
                               pref, suff, cand, res)
        htest[t] = t
        hpos[t] = t
    for pos in range(m_tests // 2 - 1, -1, -1):
        _sift_down(pos, m_tests, hkey, htest, hpos)

    stamp = np.full(m_tests, -1, np.int64)
    first_toucher = np.empty(m_tests, np.int64)
    touched = np.empty(m_tests, np.int64)
    fallbacks = 0
    for step in range(budget):
        t1 = htest[0]
        s1 = test_ptr[t1]
        d1 = test_ptr[t1 + 1] - s1
        _commit_test_row(t1, test_ptr, msg_item, msg_test, y, rho, pref, suff, cand)
        for j in range(d1):
            res[s1 + j] = 1.0
        _heap_update(t1, 1.0, m_tests, hkey, htest, hpos)

        n_touched = 0
        for j in range(d1):
            i = edge_item[s1 + j]
            fallbacks += _update_item_messages(i, item_ptr, item_edges, msg_test, msg_item,
                                               p, s1 + j, prefm, sufm, prefq, sufq)
            for jj in range(item_ptr[i], item_ptr[i + 1]):
                t2 = edge_test[item_edges[jj]]
                if t2 == t1:
                    continue
                if stamp[t2] != step:
                    stamp[t2] = step
                    first_toucher[t2] = i
                    touched[n_touched] = t2
                    n_touched += 1
                else:
                    first_toucher[t2] = -1
        for idx in range(n_touched):
            t2 = touched[idx]
            key = _refresh_row(t2, first_toucher[t2], test_ptr, edge_item, msg_item,
                               msg_test, y, rho, pref, suff, cand, res)
            _heap_update(t2, key, m_tests, hkey, htest, hpos)
    _compute_llrs(item_ptr, item_edges, msg_test, prior_logit, llrs)
    return fallbacks


@njit(cache=True, nogil=True)
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, nogil=True)
def _best_subset_w1(cols, ypack, n, w, lm, out_idx):
    """Best weight-w support by channel log likelihood, single packed word.

    Enumerates the C(n, w) supports in lexicographic order with a prefix-OR
    stack; keeps the first strict maximum of lm * mismatches. Writes the
    winner into out_idx[:w]; returns (best score, candidates evaluated).
    """
    best = -np.inf
    count = 0
    idx = np.empty(w, np.int64)
    ors = np.empty(w + 1, np.uint64)
    ors[0] = np.uint64(0)
    d = 0
    idx[0] = -1
    while d >= 0:
        idx[d] += 1
        if idx[d] > n - w + d:
            d -= 1
            continue
        cur = ors[d] | cols[idx[d]]
        if d == w - 1:
            mism = _popcount64(cur ^ ypack)
            sc = lm * mism
            count += 1
            if sc > best:
                best = sc
                for j in range(w):
                    out_idx[j] = idx[j]
        else:
            ors[d + 1] = cur
            d += 1
            idx[d] = idx[d - 1]
    return best, count


@njit(cache=True, nogil=True)
def _best_subset_wide(cols, ypack, n, w, lm, out_idx):
    """As _best_subset_w1 but for designs wider than 64 tests."""
    n_words = ypack.shape[0]
    best = -np.inf
    count = 0
    idx = np.empty(w, np.int64)
    ors = np.empty((w + 1, n_words), np.uint64)
    for word in range(n_words):
        ors[0, word] = np.uint64(0)
    d = 0
    idx[0] = -1
    while d >= 0:
        idx[d] += 1
        if idx[d] > n - w + d:
            d -= 1
            continue
        if d == w - 1:
            mism = np.uint64(0)
            for word in range(n_words):
                cur = ors[d, word] | cols[idx[d], word]
                mism += _popcount64(cur ^ ypack[word])
            sc = lm * mism
            count += 1
            if sc > best:
                best = sc
                for j in range(w):
                    out_idx[j] = idx[j]
        else:
            for word in range(n_words):
                ors[d + 1, word] = ors[d, word] | cols[idx[d], word]
            d += 1
            idx[d] = idx[d - 1]
    return best, count
