"""Belief propagation on the pooling graph: state, single-node updates,
and the flooding decoder.

LLR convention: lambda_i = log(p/(1-p)) + sum over neighbor tests of
logit(m_ti); positive means "more likely defective than the prior alone
would say". Messages are probabilities of defectivity and are clamped to
[EPS, 1 - EPS] whenever stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import EPS
from .model import MeasurementMatrix, ProblemInstance

_MODES = ("flooding", "sequential")


@dataclass(frozen=True)
class BpConfig:
    """Flooding decoder knobs. Damping is fixed at 1.0 (none)."""

    iterations: int = 10
    early_stop_delta: float | None = None
    damping: float = 1.0

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.damping != 1.0:
            raise ValueError("damping is not supported; it is fixed at 1.0")
        if self.early_stop_delta is not None and self.early_stop_delta <= 0:
            raise ValueError("early_stop_delta must be positive")


@dataclass
class MessageState:
    """Per-edge message arrays, aligned with the matrix's test-major edges."""

    matrix: MeasurementMatrix
    msg_item: np.ndarray
    msg_test: np.ndarray
    fallback_count: int = 0

    def edge_index(self, t: int, i: int) -> int:
        """Edge id of (test t, item i); raises KeyError if absent."""
        s, e = self.matrix.test_ptr[t], self.matrix.test_ptr[t + 1]
        row = self.matrix.edge_item[s:e]
        j = int(np.searchsorted(row, i))
        if j == row.size or row[j] != i:
            raise KeyError(f"item {i} is not pooled in test {t}")
        return int(s) + j

    def item_to_test(self, i: int, t: int) -> float:
        return float(self.msg_item[self.edge_index(t, i)])

    def test_to_item(self, t: int, i: int) -> float:
        return float(self.msg_test[self.edge_index(t, i)])

    def set_item_to_test(self, i: int, t: int, value: float) -> None:
        self.msg_item[self.edge_index(t, i)] = value

    def set_test_to_item(self, t: int, i: int, value: float) -> None:
        self.msg_test[self.edge_index(t, i)] = value

    def messages_in_bounds(self) -> bool:
        """True iff every stored message lies in [EPS, 1 - EPS]."""
        for arr in (self.msg_item, self.msg_test):
            if arr.size and not ((arr >= EPS) & (arr <= 1.0 - EPS)).all():
                return False
        return True


@dataclass
class BpResult:
    """Decoder output: posterior LLRs plus the final message state."""

    llrs: np.ndarray
    state: MessageState
    test_updates: int
    rounds: int = 0
    fallback_count: int = 0


def _require_decodable(instance: ProblemInstance) -> None:
    if instance.prior.k >= instance.prior.n:
        raise ValueError("decoding requires k < n (prior logit must be finite)")


def init_messages(instance: ProblemInstance, mode: str = "flooding") -> MessageState:
    """Fresh message state: item-to-test at the prior prevalence k/n,
    test-to-item at 1/2 (uninformative).

    Flooding overwrites the test side before ever reading it; sequential
    schedules read it, so both modes share the same initial values.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown schedule mode {mode!r}")
    _require_decodable(instance)
    m = instance.matrix
    p = instance.prior.prevalence
    return MessageState(
        matrix=m,
        msg_item=np.full(m.edge_count, p, dtype=np.float64),
        msg_test=np.full(m.edge_count, 0.5, dtype=np.float64),
    )


def _scratch(matrix: MeasurementMatrix) -> tuple[np.ndarray, ...]:
    d = 1
    if matrix.edge_count:
        d = max(
            int(np.diff(matrix.test_ptr).max()),
            int(np.diff(matrix.item_ptr).max()),
        )
    return tuple(np.empty(d + 1) for _ in range(4))


def update_test_to_item(state: MessageState, instance: ProblemInstance, t: int) -> None:
    """Commit test t's outgoing messages from the current item messages."""
    if not 0 <= t < instance.matrix.m:
        raise IndexError(f"test index {t} out of range")
    pref, suff, cand, _ = _scratch(instance.matrix)
    _kernels._commit_test_row(
        t, instance.matrix.test_ptr, state.msg_item, state.msg_test,
        instance.outcomes, instance.channel.rho_clamped, pref, suff, cand,
    )


def update_item_to_test(state: MessageState, instance: ProblemInstance, i: int) -> None:
    """Commit item i's outgoing messages to all of its neighbor tests."""
    if not 0 <= i < instance.matrix.n:
        raise IndexError(f"item index {i} out of range")
    a, b, c, d = _scratch(instance.matrix)
    fb = _kernels._update_item_messages(
        i, instance.matrix.item_ptr, instance.matrix.item_edges,
        state.msg_test, state.msg_item, instance.prior.prevalence, -1, a, b, c, d,
    )
    state.fallback_count += int(fb)


def compute_llrs(state: MessageState, instance: ProblemInstance) -> np.ndarray:
    """Posterior LLR per item from the current test-to-item messages."""
    out = np.empty(instance.matrix.n)
    _kernels._compute_llrs(
        instance.matrix.item_ptr, instance.matrix.item_edges,
        state.msg_test, instance.prior.logit(), out,
    )
    return out


def bp_flood(instance: ProblemInstance, config: BpConfig | None = None) -> BpResult:
    """Flooding-schedule decoder: per round, update every test row from the
    pre-round item messages, then every item row from the fresh test
    messages. Runs exactly config.iterations rounds unless
    config.early_stop_delta is set, in which case a round whose max
    absolute LLR change falls below the threshold ends the run early.
    """
    if config is None:
        config = BpConfig()
    _require_decodable(instance)
    state = init_messages(instance, "flooding")
    m = instance.matrix
    llrs = np.empty(m.n)
    delta = -1.0 if config.early_stop_delta is None else float(config.early_stop_delta)
    rounds, fallbacks = _kernels._flood(
        m.test_ptr, m.edge_item, m.item_ptr, m.item_edges,
        instance.outcomes, instance.channel.rho_clamped,
        instance.prior.prevalence, instance.prior.logit(),
        config.iterations, delta, state.msg_item, state.msg_test, llrs,
    )
    state.fallback_count = int(fallbacks)
    return BpResult(
        llrs=llrs, state=state, test_updates=int(rounds) * m.m,
        rounds=int(rounds), fallback_count=int(fallbacks),
    )
