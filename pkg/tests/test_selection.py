"""Declared-set selection rules and scoring."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtbp import confusion_counts, exact_recovery, threshold_select, top_k_select

llr_arrays = st.lists(
    st.floats(-50, 50, allow_nan=False), min_size=1, max_size=30
).map(np.array)


class TestTopK:
    def test_basic(self):
        assert top_k_select(np.array([0.3, -1.0, 2.0, 0.9]), 2).tolist() == [2, 3]

    def test_ties_go_to_lower_index(self):
        assert top_k_select(np.array([5.0, 3.0, 5.0]), 1).tolist() == [0]
        assert top_k_select(np.array([3.0, 5.0, 5.0, 1.0]), 2).tolist() == [1, 2]

    def test_k_zero_and_k_n(self):
        llrs = np.array([1.0, -2.0, 0.5])
        assert top_k_select(llrs, 0).size == 0
        assert top_k_select(llrs, 3).tolist() == [0, 1, 2]

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            top_k_select(np.array([1.0, 2.0]), 3)
        with pytest.raises(ValueError):
            top_k_select(np.array([1.0, 2.0]), -1)
        with pytest.raises(ValueError):
            top_k_select(np.zeros((2, 2)), 1)

    @settings(deadline=None, max_examples=80)
    @given(llr_arrays, st.data())
    def test_selected_dominate_rest(self, llrs, data):
        k = data.draw(st.integers(0, llrs.size))
        sel = top_k_select(llrs, k)
        assert sel.size == k
        assert np.all(np.diff(sel) > 0)
        rest = np.setdiff1d(np.arange(llrs.size), sel)
        if sel.size and rest.size:
            assert llrs[sel].min() >= llrs[rest].max()


class TestThreshold:
    def test_boundary_is_inclusive(self):
        got = threshold_select(np.array([-1.0, 0.0, 2.0]), 0.0)
        assert got.tolist() == [1, 2]

    def test_empty_and_full(self):
        llrs = np.array([0.1, 0.2])
        assert threshold_select(llrs, 5.0).size == 0
        assert threshold_select(llrs, -5.0).tolist() == [0, 1]

    def test_rejects_2d(self):
        with pytest.raises(ValueError):
            threshold_select(np.zeros((2, 2)), 0.0)

    @settings(deadline=None, max_examples=80)
    @given(llr_arrays, st.floats(-60, 60, allow_nan=False))
    def test_partition_property(self, llrs, tau):
        sel = threshold_select(llrs, tau)
        mask = np.zeros(llrs.size, dtype=bool)
        mask[sel] = True
        assert np.all(llrs[mask] >= tau)
        assert np.all(llrs[~mask] < tau)


class TestScoring:
    def test_confusion_counts(self):
        fn, fp = confusion_counts(np.array([0, 2]), np.array([1, 2]), 4)
        assert (fn, fp) == (1, 1)
        assert confusion_counts(np.array([], dtype=int), np.array([1]), 3) == (1, 0)
        assert confusion_counts(np.array([1]), np.array([], dtype=int), 3) == (0, 1)

    def test_exact_recovery_ignores_order(self):
        assert exact_recovery(np.array([2, 0]), np.array([0, 2]))
        assert not exact_recovery(np.array([0, 1]), np.array([0, 2]))
        assert exact_recovery(np.array([], dtype=int), np.array([], dtype=int))

    @settings(deadline=None, max_examples=60)
    @given(st.data())
    def test_counts_consistent_with_recovery(self, data):
        n = data.draw(st.integers(1, 20))
        declared = data.draw(st.sets(st.integers(0, n - 1)))
        truth = data.draw(st.sets(st.integers(0, n - 1)))
        fn, fp = confusion_counts(
            np.array(sorted(declared), dtype=int), np.array(sorted(truth), dtype=int), n)
        assert fn == len(truth - declared)
        assert fp == len(declared - truth)
        assert exact_recovery(
            np.array(sorted(declared), dtype=int), np.array(sorted(truth), dtype=int)
        ) == (fn == 0 and fp == 0)
