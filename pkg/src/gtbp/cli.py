"""Command-line front end: `run`, `sweep-tau`, and `matrix` subcommands.

Exit codes: 0 success, 2 invalid flags (message names the flag), 3
capacity or matrix-format errors. Output rows append to `--out`, or go
to stdout when no path is given.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .design import DEFAULT_NU, MatrixFormatError, bernoulli_design, load_matrix, write_matrix_text
from .harness import (
    _ALGORITHMS,
    _LLR_ALGORITHMS,
    ExperimentConfig,
    run_experiment,
    sweep_tau,
    write_csv,
)
from .oracle import DEFAULT_CANDIDATE_CAP, CapacityError


class _CliError(Exception):
    """Flag-level problem; message already names the offending flag."""

    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _fail(message: str, code: int = 2) -> "_CliError":
    return _CliError(message, code)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--model", choices=("combinatorial", "probabilistic"))
    sub.add_argument("--n", type=int)
    sub.add_argument("--k", type=int)
    sub.add_argument("--m", type=str, help="tests per design; comma list allowed on run")
    sub.add_argument("--rho", type=float)
    sub.add_argument("--algo", type=str, default="bp",
                     help="comma list from bp,rsbp,nwrbp,optimal")
    sub.add_argument("--trials", type=int, default=3000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--iters", type=int, default=10)
    sub.add_argument("--budget", type=int)
    sub.add_argument("--nu", type=float, default=DEFAULT_NU)
    sub.add_argument("--w-max", type=int, dest="w_max")
    sub.add_argument("--candidate-cap", type=int, dest="candidate_cap",
                     default=DEFAULT_CANDIDATE_CAP)
    sub.add_argument("--threads", type=int)
    sub.add_argument("--out", type=str)
    sub.add_argument("--config", type=str, help="flat key = value file; flags override")


def _build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="gtbp")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p_run = subparsers.add_parser("run", help="run experiments, emit CSV rows")
    _add_common_flags(p_run)
    p_run.add_argument("--tau", type=float, default=0.0)
    p_run.add_argument("--matrix-in", type=str, dest="matrix_in",
                       help="fix the design across trials from a matrix file")

    p_sweep = subparsers.add_parser("sweep-tau", help="threshold sweep, one row per (algorithm, tau)")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--tau-min", type=float, default=-2.0, dest="tau_min")
    p_sweep.add_argument("--tau-max", type=float, default=2.0, dest="tau_max")
    p_sweep.add_argument("--tau-steps", type=int, default=41, dest="tau_steps")

    p_matrix = subparsers.add_parser("matrix", help="generate or re-serialize a design")
    p_matrix.add_argument("--n", type=int)
    p_matrix.add_argument("--m", type=int)
    p_matrix.add_argument("--k", type=int)
    p_matrix.add_argument("--seed", type=int, default=0)
    p_matrix.add_argument("--nu", type=float, default=DEFAULT_NU)
    p_matrix.add_argument("--matrix-in", type=str, dest="matrix_in")
    p_matrix.add_argument("--matrix-out", type=str, dest="matrix_out")
    p_matrix.add_argument("--config", type=str)

    return parser, {"run": p_run, "sweep-tau": p_sweep, "matrix": p_matrix}


def _read_config_file(path: str) -> dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment; keys match long
    flag names (hyphen or underscore)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _fail(f"--config: cannot read {path!r}: {exc.strerror}")
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _fail(f"--config: line {line_no}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _find_config_path(argv: list[str]) -> str | None:
    for i, token in enumerate(argv):
        if token == "--config":
            if i + 1 >= len(argv):
                raise _fail("--config: missing value")
            return argv[i + 1]
        if token.startswith("--config="):
            return token.split("=", 1)[1]
    return None


def _apply_config_defaults(argv: list[str], sub_by_name: dict) -> None:
    path = _find_config_path(argv)
    if path is None:
        return
    values = _read_config_file(path)
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    sub = sub_by_name.get(command)
    if sub is None:
        return
    known = {a.dest for a in sub._actions}
    for key, value in values.items():
        if key not in known:
            raise _fail(f"--config: unknown key {key!r}")
        # String defaults run through each flag's type converter in argparse.
        sub.set_defaults(**{key: value})


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise _fail(f"--{name.replace('_', '-')}: required")


def _positive(args: argparse.Namespace, name: str, minimum: int = 1) -> None:
    value = getattr(args, name)
    if value is not None and value < minimum:
        raise _fail(f"--{name.replace('_', '-')}: must be >= {minimum}")


def _parse_m_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            value = int(part)
        except ValueError:
            raise _fail(f"--m: non-numeric value {part!r}")
        if value < 1:
            raise _fail("--m: must be >= 1")
        out.append(value)
    return out


def _parse_algo_list(text: str, allowed: tuple[str, ...]) -> list[str]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part not in allowed:
            raise _fail(f"--algo: unknown algorithm {part!r}")
        out.append(part)
    return out


def _resolve_threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise _fail("--threads: must be >= 1")
        return args.threads
    env = os.environ.get("GT_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise _fail(f"--threads: GT_THREADS is non-numeric: {env!r}")
        if value < 1:
            raise _fail("--threads: GT_THREADS must be >= 1")
        return value
    return 1


def _validate_shared(args: argparse.Namespace) -> None:
    if not 0.0 <= args.rho <= 1.0:
        raise _fail("--rho: must lie in [0, 1]")
    _positive(args, "n")
    _positive(args, "k")
    _positive(args, "trials")
    _positive(args, "iters", minimum=0)
    _positive(args, "budget", minimum=0)
    _positive(args, "candidate_cap")
    _positive(args, "w_max", minimum=0)
    if args.nu <= 0:
        raise _fail("--nu: must be positive")


def _cmd_run(args: argparse.Namespace) -> int:
    matrix = None
    if args.matrix_in is not None:
        matrix = load_matrix(args.matrix_in)
        if args.n is None:
            args.n = matrix.n
        if args.m is None:
            args.m = str(matrix.m)
    _require(args, "model", "n", "k", "m", "rho")
    _validate_shared(args)
    m_list = _parse_m_list(args.m)
    algos = _parse_algo_list(args.algo, _ALGORITHMS)
    if matrix is not None:
        if matrix.n != args.n:
            raise _fail("--matrix-in: matrix has a different item count than --n")
        if m_list != [matrix.m]:
            raise _fail("--matrix-in: matrix has a different test count than --m")
    threads = _resolve_threads(args)

    results = []
    for m in m_list:
        for algo in algos:
            try:
                config = ExperimentConfig(
                    model=args.model, n=args.n, k=args.k, m=m, rho=args.rho,
                    algorithm=algo, trials=args.trials, seed=args.seed,
                    tau=args.tau, iterations=args.iters, budget=args.budget,
                    matrix_mode="per-trial" if matrix is None else "fixed",
                    matrix=matrix, w_max=args.w_max,
                    candidate_cap=args.candidate_cap, nu=args.nu,
                )
            except ValueError as exc:
                raise _fail(f"invalid flags: {exc}")
            results.append(run_experiment(config, threads=threads))
    text = write_csv(results, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _cmd_sweep_tau(args: argparse.Namespace) -> int:
    if args.model is None:
        args.model = "probabilistic"
    if args.model != "probabilistic":
        raise _fail("--model: sweep-tau requires the probabilistic model")
    _require(args, "n", "k", "m", "rho")
    _validate_shared(args)
    _positive(args, "tau_steps")
    m_list = _parse_m_list(args.m)
    if len(m_list) != 1:
        raise _fail("--m: sweep-tau takes a single test count")
    algos = _parse_algo_list(args.algo, _LLR_ALGORITHMS)
    threads = _resolve_threads(args)
    if args.tau_steps == 1:
        grid = np.array([args.tau_min])
    else:
        grid = np.linspace(args.tau_min, args.tau_max, args.tau_steps)

    results = []
    for algo in algos:
        try:
            config = ExperimentConfig(
                model=args.model, n=args.n, k=args.k, m=m_list[0], rho=args.rho,
                algorithm=algo, trials=args.trials, seed=args.seed,
                iterations=args.iters, budget=args.budget, nu=args.nu,
            )
        except ValueError as exc:
            raise _fail(f"invalid flags: {exc}")
        results.extend(sweep_tau(config, grid, threads=threads))
    text = write_csv(results, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _cmd_matrix(args: argparse.Namespace) -> int:
    if args.matrix_in is not None:
        matrix = load_matrix(args.matrix_in)
    else:
        _require(args, "n", "m", "k")
        _positive(args, "n")
        _positive(args, "m")
        _positive(args, "k")
        if args.nu <= 0:
            raise _fail("--nu: must be positive")
        matrix = bernoulli_design(args.n, args.m, args.k, args.seed, nu=args.nu)
    text = write_matrix_text(matrix)
    if args.matrix_out is None:
        sys.stdout.write(text)
    else:
        with open(args.matrix_out, "w", encoding="ascii") as fh:
            fh.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, sub_by_name = _build_parser()
    try:
        _apply_config_defaults(argv, sub_by_name)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return exc.code if isinstance(exc.code, int) else 2
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep-tau":
            return _cmd_sweep_tau(args)
        return _cmd_matrix(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except MatrixFormatError as exc:
        print(f"error: matrix file: {exc}", file=sys.stderr)
        return 3
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
