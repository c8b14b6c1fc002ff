# -*- coding: utf-8 -*-
"""
Command-line front end.

Exit codes: 0 success, 1 validation violations, 2 unreadable or malformed inputs,
3 iteration limit reached, 4 solver failure.
"""
import argparse
import logging
import os
import pprint
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from pygtep.__version__ import __version__
from pygtep.analysis import METHODS, digest, compute_vss, evaluate_plan, solve_mvp, solve_planning
from pygtep.benders import BendersConfig
from pygtep.exceptions import GtepError, SolverFailureError
from pygtep.formulation import build_monolithic
from pygtep.mps import write_mps
from pygtep.reports import write_evaluation, write_reports, write_vss
from pygtep.toys import Inputs, random_documents, random_toy, read_inputs, write_documents
from pygtep.validation import validate_instance

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INPUT = 2
EXIT_ITERATION_LIMIT = 3
EXIT_SOLVER = 4

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


@dataclass(frozen=True)
class RunConfig:
    """Options of the ``solve`` and ``vss`` commands."""

    method: str = "benders"
    eps: float = 1e-3
    max_iter: int = 100
    parallelism: int = 1
    relax_uc: bool = False
    discount_operations: bool = False
    seed: Optional[int] = None
    out: str = "out"

    def __post_init__(self):
        """Check the options."""
        _check_method(self.method)
        _check_eps(self.eps)
        _check_at_least_one("max_iter", self.max_iter)
        _check_at_least_one("parallelism", self.parallelism)

    def benders_config(self) -> BendersConfig:
        return BendersConfig(
            eps=self.eps,
            max_iter=self.max_iter,
            parallelism=self.parallelism,
            relax_uc=self.relax_uc,
            discount_operations=self.discount_operations,
        )


def _check_method(method: str):
    if method not in METHODS:
        raise ValueError("Method must be one of {}. Found {}.".format(METHODS, pprint.pformat(method)))


def _check_eps(eps: float):
    if not eps >= 0:
        raise ValueError("Tolerance eps must be nonnegative. Found {}.".format(pprint.pformat(eps)))


def _check_at_least_one(name: str, value: int):
    if value < 1:
        raise ValueError("Option {} must be at least 1. Found {}.".format(name, pprint.pformat(value)))


def _load(args: argparse.Namespace) -> Inputs:
    """The input triple read from files, or generated from ``--seed`` when no file is given."""
    files = [args.instance, args.calendar, args.scenarios]
    seed = getattr(args, "seed", None)
    if all(path is None for path in files):
        if seed is None:
            raise ValueError("Give the three input files, or --seed to generate them.")
        logger.info("solving the random toy of seed %d", seed)
        return random_toy(seed)
    if any(path is None for path in files):
        raise ValueError("Give all three input files. Found {}.".format(pprint.pformat(files)))
    if seed is not None:
        raise ValueError("Option --seed generates the inputs and cannot be used with input files.")
    return read_inputs(*files)


def _validated(args: argparse.Namespace) -> Optional[Inputs]:
    """The inputs, or None after printing the violations."""
    inputs = _load(args)
    report = validate_instance(*inputs)
    if not report.ok:
        print(str(report), file=sys.stderr)
        return None
    return inputs


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        method=args.method,
        eps=args.eps,
        max_iter=args.max_iter,
        parallelism=args.parallelism,
        relax_uc=args.relax_uc,
        discount_operations=args.discount_operations,
        seed=args.seed,
        out=args.out,
    )


def cmd_validate(args: argparse.Namespace) -> int:
    """Check an input triple and print the violations found."""
    inputs = _load(args)
    report = validate_instance(*inputs)
    if report.ok:
        print("ok: {} is consistent".format(inputs[0].name), file=sys.stderr)
        return EXIT_OK
    print(str(report), file=sys.stderr)
    return EXIT_INVALID


def cmd_solve(args: argparse.Namespace) -> int:
    """Solve the planning problem and write the reports."""
    config = _run_config(args)
    inputs = _validated(args)
    if inputs is None:
        return EXIT_INVALID
    instance, calendar, scenarios = inputs
    report = solve_planning(instance, calendar, scenarios, config.method, config.benders_config())
    for path in write_reports(config.out, report, scenarios):
        logger.info("wrote %s", path)
    print(
        "{}: objective {:.10g}, gap {:.3g}, {} iterations".format(
            report.method, report.objective, report.rel_gap, report.iterations
        ),
        file=sys.stderr,
    )
    return EXIT_OK if report.converged else EXIT_ITERATION_LIMIT


def cmd_vss(args: argparse.Namespace) -> int:
    """Solve the stochastic and mean-value problems and compare their plans."""
    config = _run_config(args)
    inputs = _validated(args)
    if inputs is None:
        return EXIT_INVALID
    instance, calendar, scenarios = inputs
    benders_config = config.benders_config()
    report = solve_planning(instance, calendar, scenarios, config.method, benders_config)
    write_reports(config.out, report, scenarios)
    mvp_plan, mvp_objective = solve_mvp(instance, calendar, scenarios, config.method, benders_config)
    logger.info("mean-value objective %.10g", mvp_objective)
    evaluation = evaluate_plan(
        instance,
        calendar,
        scenarios,
        mvp_plan,
        uc="relaxed" if config.relax_uc else "integer",
        discount_operations=config.discount_operations,
        parallelism=config.parallelism,
    )
    write_evaluation(config.out, evaluation, scenarios)
    result = compute_vss(
        report.final_objective,
        evaluation,
        digest(instance, calendar, scenarios),
        "relaxed" if report.relax_uc else "integer",
    )
    write_vss(config.out, result)
    print(
        "VSS {:.10g} ({:.4%} of the mean-value plan's expected cost)".format(result.vss, result.vss_pct),
        file=sys.stderr,
    )
    return EXIT_OK if report.converged else EXIT_ITERATION_LIMIT


def cmd_generate(args: argparse.Namespace) -> int:
    """Write a seeded random instance triple."""
    paths = write_documents(args.out, random_documents(args.seed))
    for path in paths.values():
        print(path, file=sys.stderr)
    return EXIT_OK


def cmd_export_mps(args: argparse.Namespace) -> int:
    """Write the monolithic problem in fixed MPS format."""
    inputs = _validated(args)
    if inputs is None:
        return EXIT_INVALID
    problem = build_monolithic(*inputs, relax_uc=args.relax_uc, discount_operations=args.discount_operations)
    directory = os.path.dirname(args.output)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(args.output, "w") as f:
        write_mps(problem, f, with_labels=args.labels)
    print("{}: {} rows, {} columns".format(args.output, problem.m, problem.n), file=sys.stderr)
    return EXIT_OK


def _add_inputs(parser: argparse.ArgumentParser, generated: bool = False) -> None:
    nargs = "?" if generated else None
    parser.add_argument("instance", nargs=nargs, help="instance file (JSON)")
    parser.add_argument("calendar", nargs=nargs, help="representative-day calendar file (JSON)")
    parser.add_argument("scenarios", nargs=nargs, help="scenario file (JSON)")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", choices=METHODS, default="benders")
    parser.add_argument("--eps", type=float, default=1e-3, help="relative gap tolerance")
    parser.add_argument("--max-iter", type=int, default=100)
    parser.add_argument("--parallelism", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--relax-uc", action="store_true", help="relax unit commitment integrality")
    parser.add_argument("--discount-operations", action="store_true", help="discount operating costs")
    parser.add_argument("--seed", type=int, help="solve the random toy of this seed instead of input files")
    parser.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pygtep", description="Two-stage stochastic expansion planning of coupled electricity and gas systems."
    )
    parser.add_argument("--version", action="version", version="%(prog)s {}".format(__version__))
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    validate = commands.add_parser("validate", help="check an input triple")
    _add_inputs(validate)
    validate.set_defaults(handler=cmd_validate)

    solve = commands.add_parser("solve", help="solve the planning problem")
    _add_inputs(solve, generated=True)
    _add_run_options(solve)
    solve.set_defaults(handler=cmd_solve)

    vss = commands.add_parser("vss", help="value of the stochastic solution")
    _add_inputs(vss, generated=True)
    _add_run_options(vss)
    vss.set_defaults(handler=cmd_vss)

    generate = commands.add_parser("generate", help="write a seeded random instance triple")
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--out", default="toy", help="output directory")
    generate.set_defaults(handler=cmd_generate)

    export = commands.add_parser("export-mps", help="write the monolithic problem as fixed MPS")
    _add_inputs(export)
    export.add_argument("--output", default="problem.mps")
    export.add_argument("--relax-uc", action="store_true")
    export.add_argument("--discount-operations", action="store_true")
    export.add_argument("--labels", action="store_true", help="add a comment map from names to labels")
    export.set_defaults(handler=cmd_export_mps)
    return parser


def _log_level(verbose: int, quiet: bool) -> int:
    if quiet:
        return logging.ERROR
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    return logging.WARNING


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run a command; return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=_log_level(args.verbose, args.quiet), format=LOG_FORMAT)
    try:
        return args.handler(args)
    except SolverFailureError as e:
        print("solver failure: {}".format(e), file=sys.stderr)
        return EXIT_SOLVER
    except (GtepError, OSError) as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print("invalid option: {}".format(e), file=sys.stderr)
        return EXIT_INPUT


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
