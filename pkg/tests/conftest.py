"""Shared builders and the acceptance-criteria report hook."""

import numpy as np
import pytest

from gtbp import (
    MeasurementMatrix,
    NoiseChannel,
    Prior,
    ProblemInstance,
    RandomStream,
    apply_noise,
    bernoulli_design,
    or_measure,
    sample_support,
)

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record_criterion():
    def record(label, ok, detail):
        line = f"[{label}] {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def toy_matrix():
    """The six-item, four-test example graph used across hand oracles."""
    tests = [[0, 2, 4], [1, 2, 3, 5], [1, 3, 4], [0, 3, 4, 5]]
    return MeasurementMatrix.from_test_lists(4, 6, tests)


def make_instance(seed, n=10, m=6, k=2, rho=0.05, model="combinatorial"):
    """One random decodable instance drawn through the package pipeline."""
    stream = RandomStream(seed)
    matrix = bernoulli_design(n, m, k, stream)
    prior = Prior(model, n, k)
    channel = NoiseChannel(rho)
    truth = sample_support(Prior("combinatorial", n, k), stream)
    y = apply_noise(or_measure(matrix, truth), channel, stream)
    return ProblemInstance(matrix=matrix, prior=prior, channel=channel, outcomes=y, truth=truth)


def make_forest_instance(rng, n_max=12, rho=0.1):
    """Random acyclic bipartite instance (union-find forest) with a
    probabilistic prior and arbitrary random outcomes."""
    n = int(rng.integers(4, n_max + 1))
    m = int(rng.integers(2, max(3, n - 1)))
    parent = list(range(n + m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tests = [[] for _ in range(m)]
    # Edge candidates in random order; keep those that close no cycle.
    cand = [(t, i) for t in range(m) for i in range(n)]
    rng.shuffle(cand)
    edges = 0
    for t, i in cand:
        ra, rb = find(t), find(m + i)
        if ra != rb:
            parent[ra] = rb
            tests[t].append(i)
            edges += 1
        if edges >= n + m - 2:
            break
    for t in range(m):
        tests[t].sort()
    matrix = MeasurementMatrix.from_test_lists(m, n, tests)
    k = int(rng.integers(1, max(2, n // 2)))
    prior = Prior("probabilistic", n, k)
    y = rng.integers(0, 2, size=m).astype(np.uint8)
    return ProblemInstance(matrix=matrix, prior=prior, channel=NoiseChannel(rho), outcomes=y)
