"""Turning LLR vectors into declared defective sets, and scoring them."""

from __future__ import annotations

import numpy as np


def top_k_select(llrs: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest LLRs, ties to the lower index; sorted."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 1:
        raise ValueError("llrs must be 1-D")
    if not 0 <= k <= llrs.size:
        raise ValueError("k must be in [0, n]")
    # Stable sort on the negated values keeps ties in index order.
    order = np.argsort(-llrs, kind="stable")
    return np.sort(order[:k]).astype(np.int64)


def threshold_select(llrs: np.ndarray, tau: float) -> np.ndarray:
    """Indices with llr >= tau, sorted ascending."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 1:
        raise ValueError("llrs must be 1-D")
    return np.flatnonzero(llrs >= tau).astype(np.int64)


def confusion_counts(declared: np.ndarray, truth: np.ndarray, n: int) -> tuple[int, int]:
    """(false negatives, false positives) of a declared set vs the truth."""
    declared_mask = np.zeros(n, dtype=bool)
    declared_mask[np.asarray(declared, dtype=np.int64)] = True
    truth_mask = np.zeros(n, dtype=bool)
    truth_mask[np.asarray(truth, dtype=np.int64)] = True
    fn = int(np.count_nonzero(truth_mask & ~declared_mask))
    fp = int(np.count_nonzero(declared_mask & ~truth_mask))
    return fn, fp


def exact_recovery(declared: np.ndarray, truth: np.ndarray) -> bool:
    """True iff the declared set equals the true set exactly."""
    return np.array_equal(
        np.sort(np.asarray(declared, dtype=np.int64)),
        np.sort(np.asarray(truth, dtype=np.int64)),
    )
