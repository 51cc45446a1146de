"""Noisy group testing with belief propagation decoders.

Pooled tests with OR semantics and symmetric outcome flips, decoded by
flooding BP, randomly scheduled BP, residual-scheduled BP, or exhaustive
likelihood search, plus a seeded Monte Carlo harness and CSV reporting.
"""

from .bp import BpConfig, BpResult, MessageState, bp_flood, compute_llrs, init_messages, update_item_to_test, update_test_to_item
from .decoders import (
    BeliefPropagationDecoder,
    BoundedWeightMAPDecoder,
    ExhaustiveMLDecoder,
    RandomScheduleDecoder,
    ResidualScheduleDecoder,
)
from .design import (
    DEFAULT_NU,
    MatrixFormatError,
    bernoulli_design,
    load_matrix,
    read_matrix_text,
    sample_support,
    save_matrix,
    write_matrix_text,
)
from .harness import (
    CSV_HEADER,
    ExperimentConfig,
    ExperimentResult,
    TrialOutcome,
    csv_row,
    default_tau_grid,
    run_experiment,
    run_trial,
    sweep_tau,
    write_csv,
)
from .model import (
    MeasurementMatrix,
    NoiseChannel,
    Prior,
    ProblemInstance,
    apply_noise,
    log_likelihood,
    or_measure,
)
from .oracle import (
    DEFAULT_CANDIDATE_CAP,
    CapacityError,
    exact_llrs,
    map_probabilistic,
    ml_combinatorial,
)
from .rng import RandomStream, trial_stream
from .schedulers import ScheduleResult, compute_residual, default_budget, nwrbp, rsbp
from .selection import confusion_counts, exact_recovery, threshold_select, top_k_select

__version__ = "0.1.0"

__all__ = [
    "BpConfig",
    "BpResult",
    "MessageState",
    "bp_flood",
    "compute_llrs",
    "init_messages",
    "update_item_to_test",
    "update_test_to_item",
    "BeliefPropagationDecoder",
    "BoundedWeightMAPDecoder",
    "ExhaustiveMLDecoder",
    "RandomScheduleDecoder",
    "ResidualScheduleDecoder",
    "DEFAULT_NU",
    "MatrixFormatError",
    "bernoulli_design",
    "load_matrix",
    "read_matrix_text",
    "sample_support",
    "save_matrix",
    "write_matrix_text",
    "CSV_HEADER",
    "ExperimentConfig",
    "ExperimentResult",
    "TrialOutcome",
    "csv_row",
    "default_tau_grid",
    "run_experiment",
    "run_trial",
    "sweep_tau",
    "write_csv",
    "MeasurementMatrix",
    "NoiseChannel",
    "Prior",
    "ProblemInstance",
    "apply_noise",
    "log_likelihood",
    "or_measure",
    "DEFAULT_CANDIDATE_CAP",
    "CapacityError",
    "exact_llrs",
    "map_probabilistic",
    "ml_combinatorial",
    "RandomStream",
    "trial_stream",
    "ScheduleResult",
    "compute_residual",
    "default_budget",
    "nwrbp",
    "rsbp",
    "confusion_counts",
    "exact_recovery",
    "threshold_select",
    "top_k_select",
]
