"""Reference decoders: exhaustive ML over K-subsets, bounded-weight MAP,
and exact posterior marginals by enumeration.

These serve both as the "best achievable" benchmark and as correctness
oracles for the message-passing decoders. All enumeration is lexicographic
with incremental OR-column maintenance over packed 64-bit test words, so a
candidate costs O(1) words on designs up to 64 tests.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .model import MeasurementMatrix, NoiseChannel, Prior

DEFAULT_CANDIDATE_CAP = 10_000_000

# exact_llrs enumerates all 2^N supports; beyond this it refuses.
_EXACT_MAX_ITEMS = 20


class CapacityError(RuntimeError):
    """An enumeration would exceed the configured candidate budget."""


def _packed_outcomes(y: np.ndarray, matrix: MeasurementMatrix) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (matrix.m,):
        raise ValueError("y must have one entry per test")
    ypack = np.zeros(max(matrix.words, 1), dtype=np.uint64)
    ones = np.flatnonzero(y)
    np.bitwise_or.at(ypack, ones // 64, np.uint64(1) << (ones % 64).astype(np.uint64))
    return ypack


def _mismatch_weight(channel: NoiseChannel) -> float:
    rho = channel.rho_clamped
    return float(np.log(rho) - np.log1p(-rho))


def _best_of_weight(matrix: MeasurementMatrix, ypack: np.ndarray, w: int, lm: float):
    """(best lm*mismatches score, winning subset) over all weight-w supports."""
    n = matrix.n
    out = np.empty(w, dtype=np.int64)
    if matrix.words <= 1:
        cols = np.ascontiguousarray(matrix.cols_packed[:, 0]) if matrix.words == 1 \
            else np.zeros(n, dtype=np.uint64)
        score, _ = _kernels._best_subset_w1(cols, ypack[0], n, w, lm, out)
    else:
        score, _ = _kernels._best_subset_wide(matrix.cols_packed, ypack, n, w, lm, out)
    return float(score), out


def ml_combinatorial(
    y: np.ndarray,
    matrix: MeasurementMatrix,
    channel: NoiseChannel,
    k: int,
    candidate_cap: int = DEFAULT_CANDIDATE_CAP,
) -> np.ndarray:
    """Maximum-likelihood support of size exactly k; ties go to the
    lexicographically smallest subset. Returns sorted item indices.
    """
    if not 0 <= k <= matrix.n:
        raise ValueError("k must be in [0, n]")
    total = math.comb(matrix.n, k)
    if total > candidate_cap:
        raise CapacityError(
            f"C({matrix.n}, {k}) = {total} candidates exceeds the cap of "
            f"{candidate_cap}; reduce k or n, or raise candidate_cap"
        )
    if k == 0:
        return np.empty(0, dtype=np.int64)
    ypack = _packed_outcomes(y, matrix)
    _, best = _best_of_weight(matrix, ypack, k, _mismatch_weight(channel))
    return np.sort(best)


def map_probabilistic(
    y: np.ndarray,
    matrix: MeasurementMatrix,
    channel: NoiseChannel,
    prior: Prior,
    w_max: int | None = None,
    candidate_cap: int = DEFAULT_CANDIDATE_CAP,
) -> np.ndarray:
    """Bounded-weight MAP: argmax of prior times likelihood over all
    supports of weight <= w_max; ties go to the smallest weight, then
    lexicographic. Exact MAP when w_max = n. Returns sorted indices.
    """
    if prior.kind != "probabilistic":
        raise ValueError("map_probabilistic needs a probabilistic prior")
    if prior.n != matrix.n:
        raise ValueError("prior and design disagree on the number of items")
    if prior.k >= prior.n:
        raise ValueError("decoding requires k < n")
    n = matrix.n
    if w_max is None:
        w_max = min(prior.k + 3, n)
    if not 0 <= w_max <= n:
        raise ValueError("w_max must be in [0, n]")
    total = sum(math.comb(n, w) for w in range(w_max + 1))
    if total > candidate_cap:
        raise CapacityError(
            f"sum of C({n}, w) for w <= {w_max} is {total} candidates, over the "
            f"cap of {candidate_cap}; reduce w_max or raise candidate_cap"
        )

    y = np.asarray(y)
    ypack = _packed_outcomes(y, matrix)
    lm = _mismatch_weight(channel)
    lp = prior.logit()
    # Any weight-w support scores at most w*lp plus the best possible
    # channel term, so whole weight classes can be skipped exactly.
    slack = matrix.m * lm if lm > 0 else 0.0

    best_total = lm * float(np.count_nonzero(y))  # empty support
    best: np.ndarray = np.empty(0, dtype=np.int64)
    for w in range(1, w_max + 1):
        bound = w * lp + slack
        if bound <= best_total:
            if lp < 0:
                break  # bounds only shrink from here
            continue
        score, subset = _best_of_weight(matrix, ypack, w, lm)
        total_w = score + w * lp
        if total_w > best_total:
            best_total = total_w
            best = subset.copy()
    return np.sort(best)


def exact_llrs(
    y: np.ndarray,
    matrix: MeasurementMatrix,
    channel: NoiseChannel,
    prior: Prior,
) -> np.ndarray:
    """Exact posterior LLRs by enumeration over all 2^n supports (n <= 20).

    lambda_i = log of (posterior mass with item i defective) over (mass
    with item i healthy), accumulated with log-sum-exp.
    """
    n = matrix.n
    if n > _EXACT_MAX_ITEMS:
        raise CapacityError(f"exact enumeration supports n <= {_EXACT_MAX_ITEMS}, got {n}")
    if prior.n != n:
        raise ValueError("prior and design disagree on the number of items")
    if prior.k >= prior.n:
        raise ValueError("decoding requires k < n")
    y = np.asarray(y)
    if y.shape != (matrix.m,):
        raise ValueError("y must have one entry per test")

    rho = channel.rho_clamped
    lr_match, lr_flip = float(np.log1p(-rho)), float(np.log(rho))
    supports = np.arange(1 << n, dtype=np.uint64)
    ll = np.zeros(supports.size)
    for t in range(matrix.m):
        mask = np.uint64(0)
        for i in matrix.items_in_test(t):
            mask |= np.uint64(1) << np.uint64(i)
        hit = (supports & mask) != 0
        agrees = hit == bool(y[t])
        ll += np.where(agrees, lr_match, lr_flip)

    weights = np.bitwise_count(supports).astype(np.int64)
    p = prior.prevalence
    if prior.kind == "combinatorial":
        log_prior = np.where(weights == prior.k, 0.0, -np.inf)
    else:
        log_prior = weights * float(np.log(p)) + (n - weights) * float(np.log1p(-p))
    score = ll + log_prior

    def lse(a: np.ndarray) -> float:
        hi = a.max()
        if hi == -np.inf:
            return -np.inf
        return float(hi + np.log(np.exp(a - hi).sum()))

    lam = np.empty(n)
    for i in range(n):
        sel = ((supports >> np.uint64(i)) & np.uint64(1)) == 1
        lam[i] = lse(score[sel]) - lse(score[~sel])
    return lam
