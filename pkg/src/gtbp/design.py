"""Random pooling designs, defective-set sampling, matrix file format.

The text format for a design is line oriented: the first line holds
"M N", then one line per test listing its member item indices in
ascending order, space separated (an empty test is a blank line).
"""

from __future__ import annotations

import math

import numpy as np

from .model import MeasurementMatrix, Prior
from .rng import RandomStream

# Yields per-entry inclusion probability nu/k; ln 2 maximizes the
# information of a single OR outcome at k defectives.
DEFAULT_NU = math.log(2.0)


class MatrixFormatError(ValueError):
    """Raised on an ill-formed matrix file; carries the offending line."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


def _as_stream(rng: RandomStream | int) -> RandomStream:
    return rng if isinstance(rng, RandomStream) else RandomStream(rng)


def bernoulli_design(
    n_items: int,
    n_tests: int,
    k: int,
    rng: RandomStream | int,
    nu: float = DEFAULT_NU,
) -> MeasurementMatrix:
    """Draw an i.i.d. Bernoulli design with entry probability min(nu/k, 1).

    Consumes exactly n_tests * n_items uniforms, row major (test 0's items
    first); entry (t, i) is 1 iff its uniform is < p.
    """
    if n_items < 1 or n_tests < 1:
        raise ValueError("need at least one item and one test")
    if k < 1:
        raise ValueError("k must be >= 1")
    if nu <= 0:
        raise ValueError("nu must be positive")
    p = min(nu / k, 1.0)
    stream = _as_stream(rng)
    u = stream.uniforms(n_tests * n_items).reshape(n_tests, n_items)
    return MeasurementMatrix((u < p).astype(np.uint8))


def sample_support(prior: Prior, rng: RandomStream | int) -> np.ndarray:
    """Draw a defectivity indicator vector (length n, entries 0/1).

    Combinatorial: a uniform k-subset via partial Fisher-Yates, consuming
    exactly k uniforms. Probabilistic: n uniforms in item order, item i
    defective iff its uniform is < k/n.
    """
    stream = _as_stream(rng)
    n, k = prior.n, prior.k
    if prior.kind == "combinatorial":
        pool = np.arange(n, dtype=np.int64)
        u = stream.uniforms(k)
        for i in range(k):
            j = i + min(int(u[i] * (n - i)), n - i - 1)
            pool[i], pool[j] = pool[j], pool[i]
        x = np.zeros(n, dtype=np.uint8)
        x[pool[:k]] = 1
        return x
    u = stream.uniforms(n)
    return (u < prior.prevalence).astype(np.uint8)


def write_matrix_text(matrix: MeasurementMatrix) -> str:
    """Serialize a design to the line-oriented text format."""
    lines = [f"{matrix.m} {matrix.n}"]
    for t in range(matrix.m):
        lines.append(" ".join(str(i) for i in matrix.items_in_test(t)))
    return "\n".join(lines) + "\n"


def read_matrix_text(text: str) -> MeasurementMatrix:
    """Parse the text format; raises MatrixFormatError with a line number."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise MatrixFormatError(1, "expected header 'M N'")
    head = lines[0].split()
    if len(head) != 2:
        raise MatrixFormatError(1, "expected header 'M N'")
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError:
        raise MatrixFormatError(1, "header entries must be integers") from None
    if m < 0 or n < 1:
        raise MatrixFormatError(1, "M must be >= 0 and N >= 1")
    if len(lines) < m + 1:
        raise MatrixFormatError(len(lines) + 1, f"expected {m} test lines, found {len(lines) - 1}")
    for extra in range(m + 1, len(lines)):
        if lines[extra].strip():
            raise MatrixFormatError(extra + 1, "unexpected content after last test line")

    tests: list[list[int]] = []
    for t in range(m):
        line_no = t + 2
        fields = lines[t + 1].split()
        members: list[int] = []
        prev = -1
        for f in fields:
            try:
                i = int(f)
            except ValueError:
                raise MatrixFormatError(line_no, f"item index {f!r} is not an integer") from None
            if not 0 <= i < n:
                raise MatrixFormatError(line_no, f"item index {i} out of range [0, {n})")
            if i <= prev:
                raise MatrixFormatError(line_no, "item indices must be strictly ascending")
            prev = i
            members.append(i)
        tests.append(members)
    return MeasurementMatrix.from_test_lists(m, n, tests)


def save_matrix(matrix: MeasurementMatrix, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(write_matrix_text(matrix))


def load_matrix(path: str) -> MeasurementMatrix:
    with open(path, "r", encoding="ascii") as fh:
        return read_matrix_text(fh.read())
