"""Seeded Monte Carlo harness: per-trial pipeline, pooled metrics, CSV.

Trial t of an experiment uses the stream split(base_seed, t), from which
it draws, in order: the design (M*N uniforms, row major; skipped in
fixed-matrix mode), the support (k uniforms), the noise (M uniforms),
and any decoder draws (RSBP: one per step). A trial's outcome therefore
depends only on (config, trial_index), never on thread scheduling.

Truth vectors always carry exactly k defectives, in both models; the
model only changes what the decoder assumes (prior term and selection
rule). Decoding with the itemwise prior against fixed-count truths is
what the reference tables report: their probabilistic success rates sit
above the Bayes bound for itemwise-sampled truths, which pins down how
those experiments were run.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .bp import BpConfig, bp_flood
from .design import DEFAULT_NU, bernoulli_design, sample_support
from .model import MeasurementMatrix, NoiseChannel, Prior, ProblemInstance, apply_noise, or_measure
from .oracle import DEFAULT_CANDIDATE_CAP, map_probabilistic, ml_combinatorial
from .rng import trial_stream
from .schedulers import nwrbp, rsbp
from .selection import confusion_counts, threshold_select, top_k_select

CSV_HEADER = (
    "model,N,K,M,rho,algorithm,tau,trials,iters_or_budget,seed,"
    "success_rate,fnr,fpr,fn_count,fp_count,defective_total,"
    "nondefective_total,wall_time_s"
)

_MODELS = ("combinatorial", "probabilistic")
_ALGORITHMS = ("bp", "rsbp", "nwrbp", "optimal")
_LLR_ALGORITHMS = ("bp", "rsbp", "nwrbp")
_MATRIX_MODES = ("per-trial", "fixed")
_AGGREGATES = ("pooled", "per-trial")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment depends on. Immutable."""

    model: str
    n: int
    k: int
    m: int
    rho: float
    algorithm: str
    trials: int
    seed: int
    tau: float = 0.0
    iterations: int = 10
    budget: int | None = None
    matrix_mode: str = "per-trial"
    matrix: MeasurementMatrix | None = field(default=None, compare=False)
    w_max: int | None = None
    candidate_cap: int = DEFAULT_CANDIDATE_CAP
    aggregate: str = "pooled"
    nu: float = DEFAULT_NU

    def __post_init__(self):
        if self.model not in _MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        for name in ("n", "k", "m", "trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must be in [0, 1]")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.matrix_mode not in _MATRIX_MODES:
            raise ValueError(f"unknown matrix_mode {self.matrix_mode!r}")
        if self.matrix_mode == "fixed":
            if self.matrix is None:
                raise ValueError("fixed matrix_mode needs a matrix")
            if (self.matrix.m, self.matrix.n) != (self.m, self.n):
                raise ValueError("fixed matrix shape disagrees with (m, n)")
        if self.aggregate not in _AGGREGATES:
            raise ValueError(f"unknown aggregate {self.aggregate!r}")
        if self.nu <= 0:
            raise ValueError("nu must be positive")

    @property
    def prior(self) -> Prior:
        return Prior(self.model, self.n, self.k)

    @property
    def channel(self) -> NoiseChannel:
        return NoiseChannel(self.rho)

    @property
    def effective_budget(self) -> int:
        return self.budget if self.budget is not None else self.iterations * self.m

    @property
    def iters_or_budget(self) -> int:
        if self.algorithm == "bp":
            return self.iterations
        if self.algorithm in ("rsbp", "nwrbp"):
            return self.effective_budget
        return 0


class TrialOutcome(NamedTuple):
    success: bool
    fn: int
    fp: int
    defectives: int


@dataclass
class ExperimentResult:
    """Pooled metrics over an experiment's trials, plus the config echo."""

    config: ExperimentConfig
    trials: int
    success_rate: float
    fnr: float
    fpr: float
    fn_count: int
    fp_count: int
    defective_total: int
    nondefective_total: int
    wall_time_s: float

    def __post_init__(self):
        for name in ("success_rate", "fnr", "fpr"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def _trial_instance(config: ExperimentConfig, trial_index: int):
    """Draw one trial's (instance, stream); stream is left positioned for
    decoder draws."""
    stream = trial_stream(config.seed, trial_index)
    if config.matrix_mode == "fixed":
        matrix = config.matrix
    else:
        matrix = bernoulli_design(config.n, config.m, config.k, stream, nu=config.nu)
    # Fixed-count truth in both models; see the module docstring.
    truth = sample_support(Prior("combinatorial", config.n, config.k), stream)
    noiseless = or_measure(matrix, truth)
    y = apply_noise(noiseless, config.channel, stream)
    instance = ProblemInstance(
        matrix=matrix, prior=config.prior, channel=config.channel, outcomes=y, truth=truth,
    )
    return instance, stream


def _decode_llrs(config: ExperimentConfig, instance: ProblemInstance, stream) -> np.ndarray:
    if config.algorithm == "bp":
        return bp_flood(instance, BpConfig(iterations=config.iterations)).llrs
    if config.algorithm == "rsbp":
        return rsbp(instance, config.effective_budget, rng=stream).llrs
    if config.algorithm == "nwrbp":
        return nwrbp(instance, config.effective_budget).llrs
    raise ValueError(f"algorithm {config.algorithm!r} does not produce LLRs")


def _declared_set(config: ExperimentConfig, instance: ProblemInstance, stream) -> np.ndarray:
    if config.algorithm == "optimal":
        if config.model == "combinatorial":
            return ml_combinatorial(instance.outcomes, instance.matrix, instance.channel,
                                    config.k, candidate_cap=config.candidate_cap)
        return map_probabilistic(instance.outcomes, instance.matrix, instance.channel,
                                 instance.prior, w_max=config.w_max,
                                 candidate_cap=config.candidate_cap)
    llrs = _decode_llrs(config, instance, stream)
    if config.model == "combinatorial":
        return top_k_select(llrs, config.k)
    return threshold_select(llrs, config.tau)


def run_trial(
    config: ExperimentConfig,
    trial_index: int,
    decoder: Callable[[ProblemInstance], np.ndarray] | None = None,
) -> TrialOutcome:
    """Run one seeded trial; returns (success, fn, fp, defectives).

    `decoder` is a test hook replacing decode+selection; it receives the
    ProblemInstance and must return declared item indices.
    """
    instance, stream = _trial_instance(config, trial_index)
    if decoder is not None:
        declared = np.asarray(decoder(instance), dtype=np.int64)
    else:
        declared = _declared_set(config, instance, stream)
    truth_idx = np.flatnonzero(instance.truth)
    fn, fp = confusion_counts(declared, truth_idx, config.n)
    success = fn == 0 and fp == 0
    # Metric consistency: an imperfect declaration is never a success.
    assert success == (np.array_equal(np.sort(declared), truth_idx))
    return TrialOutcome(success=success, fn=fn, fp=fp, defectives=int(truth_idx.size))


def _run_indexed(trials: int, threads: int, work: Callable[[int], None]) -> None:
    if threads <= 1:
        for idx in range(trials):
            work(idx)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, range(trials)))


def _rates(config, successes, fns, fps, defs, nondefs):
    trials = successes.size
    fn_count = int(fns.sum())
    fp_count = int(fps.sum())
    defective_total = int(defs.sum())
    nondefective_total = int(nondefs.sum())
    if config.aggregate == "pooled":
        fnr = fn_count / defective_total if defective_total else 0.0
        fpr = fp_count / nondefective_total if nondefective_total else 0.0
    else:
        has_def = defs > 0
        has_nondef = nondefs > 0
        fnr = float((fns[has_def] / defs[has_def]).mean()) if has_def.any() else 0.0
        fpr = float((fps[has_nondef] / nondefs[has_nondef]).mean()) if has_nondef.any() else 0.0
    return (
        float(successes.sum() / trials), fnr, fpr,
        fn_count, fp_count, defective_total, nondefective_total,
    )


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run all trials and pool the counts.

    Per-trial results land in arrays indexed by trial, and the reduction
    always runs in index order, so the result is identical for any thread
    count (wall time aside).
    """
    t0 = time.perf_counter()
    trials = config.trials
    successes = np.zeros(trials, dtype=bool)
    fns = np.zeros(trials, dtype=np.int64)
    fps = np.zeros(trials, dtype=np.int64)
    defs = np.zeros(trials, dtype=np.int64)

    def work(idx: int) -> None:
        out = run_trial(config, idx)
        successes[idx] = out.success
        fns[idx] = out.fn
        fps[idx] = out.fp
        defs[idx] = out.defectives

    _run_indexed(trials, threads, work)
    nondefs = config.n - defs
    rate, fnr, fpr, fn_count, fp_count, def_total, nondef_total = _rates(
        config, successes, fns, fps, defs, nondefs)
    return ExperimentResult(
        config=config, trials=trials, success_rate=rate, fnr=fnr, fpr=fpr,
        fn_count=fn_count, fp_count=fp_count, defective_total=def_total,
        nondefective_total=nondef_total, wall_time_s=time.perf_counter() - t0,
    )


def default_tau_grid() -> np.ndarray:
    return np.linspace(-2.0, 2.0, 41)


def sweep_tau(
    config: ExperimentConfig,
    tau_grid: np.ndarray | None = None,
    threads: int = 1,
) -> list[ExperimentResult]:
    """Decode each trial once, re-threshold across the grid.

    Only meaningful for threshold selection, so the model must be
    probabilistic and the algorithm must produce LLRs. Every returned
    result carries the same wall time (the whole sweep's).
    """
    if config.model != "probabilistic":
        raise ValueError("sweep_tau requires the probabilistic model")
    if config.algorithm not in _LLR_ALGORITHMS:
        raise ValueError("sweep_tau requires an LLR-producing algorithm (bp, rsbp, nwrbp)")
    grid = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("tau_grid must be a non-empty 1-D array")

    t0 = time.perf_counter()
    trials = config.trials
    g = grid.size
    successes = np.zeros((trials, g), dtype=bool)
    fns = np.zeros((trials, g), dtype=np.int64)
    fps = np.zeros((trials, g), dtype=np.int64)
    defs = np.zeros(trials, dtype=np.int64)

    def work(idx: int) -> None:
        instance, stream = _trial_instance(config, idx)
        llrs = _decode_llrs(config, instance, stream)
        truth_idx = np.flatnonzero(instance.truth)
        defs[idx] = truth_idx.size
        truth_mask = np.zeros(config.n, dtype=bool)
        truth_mask[truth_idx] = True
        def_sorted = np.sort(llrs[truth_mask])
        nondef_sorted = np.sort(llrs[~truth_mask])
        # Selection at tau keeps llr >= tau, so misses are strictly below.
        fn_row = np.searchsorted(def_sorted, grid, side="left")
        fp_row = nondef_sorted.size - np.searchsorted(nondef_sorted, grid, side="left")
        fns[idx] = fn_row
        fps[idx] = fp_row
        successes[idx] = (fn_row == 0) & (fp_row == 0)

    _run_indexed(trials, threads, work)
    nondefs = config.n - defs
    wall = time.perf_counter() - t0
    results = []
    for j, tau in enumerate(grid):
        rate, fnr, fpr, fn_count, fp_count, def_total, nondef_total = _rates(
            config, successes[:, j], fns[:, j], fps[:, j], defs, nondefs)
        results.append(ExperimentResult(
            config=replace(config, tau=float(tau)), trials=trials,
            success_rate=rate, fnr=fnr, fpr=fpr, fn_count=fn_count,
            fp_count=fp_count, defective_total=def_total,
            nondefective_total=nondef_total, wall_time_s=wall,
        ))
    return results


def _fmt(value: float) -> str:
    return format(value, ".6g")


def csv_row(result: ExperimentResult) -> str:
    """One CSV line; floats carry 6 significant digits."""
    c = result.config
    fields = (
        c.model, str(c.n), str(c.k), str(c.m), _fmt(c.rho), c.algorithm,
        _fmt(c.tau), str(result.trials), str(c.iters_or_budget), str(c.seed),
        _fmt(result.success_rate), _fmt(result.fnr), _fmt(result.fpr),
        str(result.fn_count), str(result.fp_count), str(result.defective_total),
        str(result.nondefective_total), _fmt(result.wall_time_s),
    )
    return ",".join(fields)


def write_csv(results: list[ExperimentResult], path: str | None) -> str:
    """Append rows to `path` (header added when the file is new or empty);
    path None returns the full text instead. Returns what was written."""
    lines = [csv_row(r) for r in results]
    if path is None:
        return "\n".join([CSV_HEADER] + lines) + "\n"
    try:
        with open(path, "r", encoding="ascii") as fh:
            has_content = bool(fh.read(1))
    except FileNotFoundError:
        has_content = False
    with open(path, "a", encoding="ascii") as fh:
        if not has_content:
            fh.write(CSV_HEADER + "\n")
        for line in lines:
            fh.write(line + "\n")
    return "\n".join(lines) + "\n"
