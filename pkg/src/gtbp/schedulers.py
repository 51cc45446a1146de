"""Sequential message schedules: random and node-wise residual.

Both spend their budget in committed test-row updates, so a budget of
10 * M does the same test-side work as 10 flooding rounds. The residual
of an edge is the LLR-domain gap between the message a test commit would
write right now (the candidate) and the stored message.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bp import MessageState, _require_decodable, _scratch, compute_llrs, init_messages
from .model import ProblemInstance
from .rng import RandomStream


@dataclass
class ScheduleResult:
    """Sequential decoder output."""

    llrs: np.ndarray
    state: MessageState
    test_updates: int
    fallback_count: int = 0


def default_budget(instance: ProblemInstance, flood_iterations: int = 10) -> int:
    """Test-update budget matching `flood_iterations` flooding rounds."""
    return flood_iterations * instance.matrix.m


def compute_residual(state: MessageState, instance: ProblemInstance, t: int, i: int) -> float:
    """LLR-domain residual |logit(candidate) - logit(stored)| of edge (t, i).

    The candidate is what committing test t right now would write on that
    edge, computed without committing. Immediately after such a commit the
    residual is exactly 0.
    """
    eid = state.edge_index(t, i)
    pref, suff, cand, _ = _scratch(instance.matrix)
    _kernels._test_row_candidates(
        t, instance.matrix.test_ptr, state.msg_item,
        instance.outcomes, instance.channel.rho_clamped, pref, suff, cand,
    )
    j = eid - int(instance.matrix.test_ptr[t])
    c = float(cand[j])
    m = float(state.msg_test[eid])
    return abs((math.log(c) - math.log(1.0 - c)) - (math.log(m) - math.log(1.0 - m)))


def _empty_result(instance: ProblemInstance, state: MessageState, budget: int) -> ScheduleResult:
    return ScheduleResult(llrs=compute_llrs(state, instance), state=state,
                          test_updates=budget, fallback_count=0)


def rsbp(
    instance: ProblemInstance,
    budget: int | None = None,
    rng: RandomStream | int | None = None,
) -> ScheduleResult:
    """Uniform random schedule, with replacement.

    Each step draws one uniform u, commits test min(int(u * M), M - 1),
    then updates all outgoing messages of that test's member items.
    Consumes exactly `budget` uniforms from the stream, one per step.
    """
    _require_decodable(instance)
    if rng is None:
        raise ValueError("rsbp needs a random stream or seed")
    if budget is None:
        budget = default_budget(instance)
    if budget < 0:
        raise ValueError("budget must be >= 0")
    stream = rng if isinstance(rng, RandomStream) else RandomStream(rng)
    state = init_messages(instance, "sequential")
    m = instance.matrix
    uniforms = stream.uniforms(budget)
    if m.m == 0:
        return _empty_result(instance, state, budget)
    llrs = np.empty(m.n)
    fallbacks = _kernels._rsbp(
        m.test_ptr, m.edge_item, m.item_ptr, m.item_edges,
        instance.outcomes, instance.channel.rho_clamped,
        instance.prior.prevalence, instance.prior.logit(),
        uniforms, state.msg_item, state.msg_test, llrs,
    )
    state.fallback_count = int(fallbacks)
    return ScheduleResult(llrs=llrs, state=state, test_updates=budget,
                          fallback_count=int(fallbacks))


def nwrbp(instance: ProblemInstance, budget: int | None = None) -> ScheduleResult:
    """Node-wise residual schedule; fully deterministic.

    Each step commits the test row whose largest edge residual is maximal
    (ties to the lowest test index); the committed row's residuals drop
    to 0; its member items then update their other outgoing messages and
    the residuals of every affected test row are refreshed. With all
    residuals at zero the schedule keeps committing test 0, which leaves
    messages fixed.
    """
    _require_decodable(instance)
    if budget is None:
        budget = default_budget(instance)
    if budget < 0:
        raise ValueError("budget must be >= 0")
    state = init_messages(instance, "sequential")
    m = instance.matrix
    if m.m == 0:
        return _empty_result(instance, state, budget)
    llrs = np.empty(m.n)
    fallbacks = _kernels._nwrbp(
        m.test_ptr, m.edge_item, m.edge_test, m.item_ptr, m.item_edges,
        instance.outcomes, instance.channel.rho_clamped,
        instance.prior.prevalence, instance.prior.logit(),
        budget, state.msg_item, state.msg_test, llrs,
    )
    state.fallback_count = int(fallbacks)
    return ScheduleResult(llrs=llrs, state=state, test_updates=budget,
                          fallback_count=int(fallbacks))
