"""Problem model: pooled designs, OR measurements, symmetric noise.

A measurement design pools N items into M tests. A test's noiseless
outcome is the OR of the defectivity indicators of its members; each
outcome is then flipped independently with probability rho.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import RandomStream

# rho enters logs and ratios only after clamping to this open interval.
RHO_CLAMP = 1e-9

_MODELS = ("combinatorial", "probabilistic")


@dataclass(frozen=True)
class Prior:
    """Defectivity prior.

    kind "combinatorial": exactly k of the n items are defective, uniformly.
    kind "probabilistic": each item is defective independently w.p. k/n.
    """

    kind: str
    n: int
    k: int

    def __post_init__(self):
        if self.kind not in _MODELS:
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        # k = n is legal for sampling (everything defective); decoders that
        # need a finite prior logit reject it separately.
        if not 0 < self.k <= self.n:
            raise ValueError("k must satisfy 0 < k <= n")

    @property
    def prevalence(self) -> float:
        return self.k / self.n

    def logit(self) -> float:
        """log(p / (1 - p)) with p = k/n. Requires k < n."""
        if self.k >= self.n:
            raise ValueError("prior logit undefined for k = n")
        p = self.prevalence
        return float(np.log(p) - np.log(1.0 - p))


@dataclass(frozen=True)
class NoiseChannel:
    """Binary symmetric channel with flip probability rho."""

    rho: float

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must be in [0, 1]")

    @property
    def rho_clamped(self) -> float:
        """rho pushed into (0, 1) for use in logs and likelihood ratios."""
        return min(max(self.rho, RHO_CLAMP), 1.0 - RHO_CLAMP)


class MeasurementMatrix:
    """Binary M x N pooling design with both adjacency views.

    Stores the dense matrix plus CSR-style edge arrays used by the message
    passing kernels. Edge e is "test major": edges of test t occupy
    test_ptr[t]:test_ptr[t+1] with item indices ascending. The item-major
    view item_edges groups the same edge ids by item, tests ascending.
    """

    def __init__(self, dense: np.ndarray):
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError("design must be a 2-D array")
        if dense.size and not ((dense == 0) | (dense == 1)).all():
            raise ValueError("design entries must be 0 or 1")
        self.dense = dense.astype(np.uint8)
        self.m, self.n = self.dense.shape
        if self.n < 1:
            raise ValueError("design must have at least one item")

        rows, cols = np.nonzero(self.dense)
        self.edge_count = rows.size
        self.test_ptr = np.searchsorted(rows, np.arange(self.m + 1)).astype(np.int64)
        self.edge_item = cols.astype(np.int64)
        self.edge_test = rows.astype(np.int64)
        order = np.argsort(cols, kind="stable")
        self.item_ptr = np.searchsorted(cols[order], np.arange(self.n + 1)).astype(np.int64)
        self.item_edges = order.astype(np.int64)

        # Packed test-index bitmask per item column, for subset enumeration.
        self.words = (self.m + 63) // 64
        packed = np.zeros((self.n, self.words), dtype=np.uint64)
        if self.edge_count:
            np.bitwise_or.at(
                packed,
                (cols, rows // 64),
                np.uint64(1) << (rows % 64).astype(np.uint64),
            )
        self.cols_packed = packed
        self._check_views()

    def _check_views(self):
        # The two adjacency views must transpose to each other exactly.
        assert self.test_ptr[0] == 0 and self.test_ptr[-1] == self.edge_count
        assert self.item_ptr[-1] == self.edge_count
        by_item = self.edge_item[self.item_edges]
        counts = np.diff(self.item_ptr)
        assert np.array_equal(by_item, np.repeat(np.arange(self.n), counts))
        if self.edge_count > 1:
            # Tests strictly ascending within each item's edge block.
            t_sorted = self.edge_test[self.item_edges]
            same_item = by_item[1:] == by_item[:-1]
            assert (~same_item | (np.diff(t_sorted) > 0)).all()

    @classmethod
    def from_test_lists(cls, m: int, n: int, tests: list[list[int]]) -> "MeasurementMatrix":
        """Build from per-test member lists."""
        if len(tests) != m:
            raise ValueError("need exactly one member list per test")
        dense = np.zeros((m, n), dtype=np.uint8)
        for t, members in enumerate(tests):
            for i in members:
                if not 0 <= i < n:
                    raise ValueError(f"test {t}: item index {i} out of range")
                dense[t, i] = 1
        return cls(dense)

    def items_in_test(self, t: int) -> np.ndarray:
        return self.edge_item[self.test_ptr[t] : self.test_ptr[t + 1]]

    def tests_of_item(self, i: int) -> np.ndarray:
        edges = self.item_edges[self.item_ptr[i] : self.item_ptr[i + 1]]
        return self.edge_test[edges]

    def density(self) -> float:
        return self.edge_count / (self.m * self.n)

    def __eq__(self, other) -> bool:
        return isinstance(other, MeasurementMatrix) and np.array_equal(self.dense, other.dense)

    def __repr__(self) -> str:
        return f"MeasurementMatrix(m={self.m}, n={self.n}, edges={self.edge_count})"


@dataclass
class ProblemInstance:
    """One decoding problem: a design, a channel, a prior, observed outcomes."""

    matrix: MeasurementMatrix
    prior: Prior
    channel: NoiseChannel
    outcomes: np.ndarray
    truth: np.ndarray | None = field(default=None)

    def __post_init__(self):
        y = np.asarray(self.outcomes)
        if y.shape != (self.matrix.m,):
            raise ValueError("outcomes must have one entry per test")
        if y.size and not ((y == 0) | (y == 1)).all():
            raise ValueError("outcomes must be 0 or 1")
        self.outcomes = y.astype(np.uint8)
        if self.prior.n != self.matrix.n:
            raise ValueError("prior and design disagree on the number of items")
        if self.truth is not None:
            x = np.asarray(self.truth)
            if x.shape != (self.matrix.n,):
                raise ValueError("truth must have one entry per item")
            if x.size and not ((x == 0) | (x == 1)).all():
                raise ValueError("truth entries must be 0 or 1")
            self.truth = x.astype(np.uint8)


def or_measure(matrix: MeasurementMatrix, x: np.ndarray) -> np.ndarray:
    """Noiseless outcomes: y_t = OR of x_i over items i pooled in test t."""
    x = np.asarray(x)
    if x.shape != (matrix.n,):
        raise ValueError("x must have one entry per item")
    if x.size and not ((x == 0) | (x == 1)).all():
        raise ValueError("x entries must be 0 or 1")
    return (matrix.dense @ x.astype(np.int64) > 0).astype(np.uint8)


def apply_noise(y: np.ndarray, channel: NoiseChannel, stream: RandomStream) -> np.ndarray:
    """Flip each outcome independently with probability rho.

    Draws exactly len(y) uniforms from the stream, in test order; outcome t
    flips iff its uniform is < rho. Uses the raw (unclamped) rho so rho = 0
    and rho = 1 are exact.
    """
    y = np.asarray(y, dtype=np.uint8)
    flips = stream.uniforms(y.shape[0]) < channel.rho
    return y ^ flips.astype(np.uint8)


def log_likelihood(
    y: np.ndarray, x: np.ndarray, matrix: MeasurementMatrix, channel: NoiseChannel
) -> float:
    """log P(y | x): symmetric-channel likelihood of outcomes y given support x.

    Each test contributes log(1 - rho) where y agrees with the noiseless
    outcome of x and log(rho) where it differs; rho enters clamped.
    """
    y = np.asarray(y)
    if y.shape != (matrix.m,):
        raise ValueError("y must have one entry per test")
    noiseless = or_measure(matrix, x)
    rho = channel.rho_clamped
    mismatches = int(np.count_nonzero(y != noiseless))
    return mismatches * float(np.log(rho)) + (matrix.m - mismatches) * float(np.log1p(-rho))
