"""Estimator-style wrappers over the functional decoders.

The pattern: `fit(X)` binds a pooling design (X is the M x N 0/1 test
membership matrix), `predict(Y)` decodes one or more length-M outcome
vectors into 0/1 support declarations, and `decision_function(Y)`
exposes the per-item log-likelihood ratios where the decoder has them.
All heavy lifting stays in the functional modules; these classes only
validate, route, and reshape.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .bp import BpConfig, bp_flood
from .model import MeasurementMatrix, NoiseChannel, Prior, ProblemInstance
from .oracle import DEFAULT_CANDIDATE_CAP, map_probabilistic, ml_combinatorial
from .rng import trial_stream
from .schedulers import nwrbp, rsbp
from .selection import threshold_select, top_k_select


def _as_binary_matrix(x, name: str) -> np.ndarray:
    arr = check_array(x, dtype="numeric", ensure_2d=True)
    if not ((arr == 0) | (arr == 1)).all():
        raise ValueError(f"{name} must contain only 0/1 entries")
    return arr.astype(np.uint8)


class _PooledDecoder(BaseEstimator):
    """Shared fit/predict plumbing; subclasses provide _decode_one."""

    def __init__(self, k=1, rho=0.0, model="combinatorial", tau=0.0):
        self.k = k
        self.rho = rho
        self.model = model
        self.tau = tau

    def fit(self, X, y=None):
        dense = _as_binary_matrix(X, "X")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        prior = Prior(self.model, dense.shape[1], self.k)
        if prior.k >= prior.n:
            raise ValueError("k must be smaller than the number of items")
        self.matrix_ = MeasurementMatrix(dense)
        self.prior_ = prior
        self.channel_ = NoiseChannel(self.rho)
        self.n_items_ = self.matrix_.n
        self.n_tests_ = self.matrix_.m
        return self

    def _outcomes_2d(self, Y) -> tuple[np.ndarray, bool]:
        arr = np.asarray(Y)
        single = arr.ndim == 1
        if single:
            arr = arr.reshape(1, -1)
        arr = _as_binary_matrix(arr, "Y") if arr.size else arr.astype(np.uint8)
        if arr.shape[1] != self.n_tests_:
            raise ValueError("Y must have one column per test")
        return arr, single

    def _instance(self, y: np.ndarray, row: int) -> ProblemInstance:
        return ProblemInstance(
            matrix=self.matrix_, prior=self.prior_, channel=self.channel_, outcomes=y,
        )

    def _select(self, llrs: np.ndarray) -> np.ndarray:
        if self.model == "combinatorial":
            return top_k_select(llrs, self.k)
        return threshold_select(llrs, self.tau)

    def _decode_one(self, instance: ProblemInstance, row: int) -> np.ndarray:
        raise NotImplementedError

    def predict(self, Y) -> np.ndarray:
        check_is_fitted(self, "matrix_")
        outcomes, single = self._outcomes_2d(Y)
        declared = np.zeros((outcomes.shape[0], self.n_items_), dtype=np.uint8)
        for row in range(outcomes.shape[0]):
            idx = self._decode_one(self._instance(outcomes[row], row), row)
            declared[row, idx] = 1
        return declared[0] if single else declared


class _LlrDecoder(_PooledDecoder):
    def _llrs_one(self, instance: ProblemInstance, row: int) -> np.ndarray:
        raise NotImplementedError

    def _decode_one(self, instance: ProblemInstance, row: int) -> np.ndarray:
        return self._select(self._llrs_one(instance, row))

    def decision_function(self, Y) -> np.ndarray:
        check_is_fitted(self, "matrix_")
        outcomes, single = self._outcomes_2d(Y)
        llrs = np.zeros((outcomes.shape[0], self.n_items_))
        for row in range(outcomes.shape[0]):
            llrs[row] = self._llrs_one(self._instance(outcomes[row], row), row)
        return llrs[0] if single else llrs


class BeliefPropagationDecoder(_LlrDecoder):
    """Flooding-schedule belief propagation."""

    def __init__(self, k=1, rho=0.0, model="combinatorial", tau=0.0,
                 iterations=10, early_stop_delta=None):
        super().__init__(k=k, rho=rho, model=model, tau=tau)
        self.iterations = iterations
        self.early_stop_delta = early_stop_delta

    def _llrs_one(self, instance, row):
        config = BpConfig(iterations=self.iterations,
                          early_stop_delta=self.early_stop_delta)
        return bp_flood(instance, config).llrs


class RandomScheduleDecoder(_LlrDecoder):
    """Belief propagation with a uniformly random sequential schedule.

    Each outcome row decodes with its own stream derived from
    (random_state, row index), so repeated predict calls agree.
    """

    def __init__(self, k=1, rho=0.0, model="combinatorial", tau=0.0,
                 budget=None, random_state=0):
        super().__init__(k=k, rho=rho, model=model, tau=tau)
        self.budget = budget
        self.random_state = random_state

    def _llrs_one(self, instance, row):
        seed = 0 if self.random_state is None else self.random_state
        return rsbp(instance, self.budget, rng=trial_stream(seed, row)).llrs


class ResidualScheduleDecoder(_LlrDecoder):
    """Belief propagation scheduled by largest node-wise residual."""

    def __init__(self, k=1, rho=0.0, model="combinatorial", tau=0.0, budget=None):
        super().__init__(k=k, rho=rho, model=model, tau=tau)
        self.budget = budget

    def _llrs_one(self, instance, row):
        return nwrbp(instance, self.budget).llrs


class ExhaustiveMLDecoder(_PooledDecoder):
    """Exact maximum-likelihood search over all k-subsets."""

    def __init__(self, k=1, rho=0.0, candidate_cap=DEFAULT_CANDIDATE_CAP):
        super().__init__(k=k, rho=rho, model="combinatorial")
        self.candidate_cap = candidate_cap

    def _decode_one(self, instance, row):
        return ml_combinatorial(instance.outcomes, self.matrix_, self.channel_,
                                self.k, candidate_cap=self.candidate_cap)


class BoundedWeightMAPDecoder(_PooledDecoder):
    """Exact MAP search restricted to supports of weight <= w_max."""

    def __init__(self, k=1, rho=0.0, w_max=None, candidate_cap=DEFAULT_CANDIDATE_CAP):
        super().__init__(k=k, rho=rho, model="probabilistic")
        self.w_max = w_max
        self.candidate_cap = candidate_cap

    def _decode_one(self, instance, row):
        return map_probabilistic(instance.outcomes, self.matrix_, self.channel_,
                                 self.prior_, w_max=self.w_max,
                                 candidate_cap=self.candidate_cap)
