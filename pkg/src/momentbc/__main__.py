#!/usr/bin/env python
"""Truncated moment problems via the boundary control method.

Usage:
    # Classify moment data
    PYTHONPATH=src python -m momentbc check fixtures/hilbert.json

    # Recover an N-atom measure
    PYTHONPATH=src python -m momentbc solve fixtures/symmetric_pair.json --order 2

    # Step function of the recovered measure as CSV
    PYTHONPATH=src python -m momentbc solve fixtures/hilbert.json --order 4 --format csv

    # Simulate a Jacobi system and compare with its Dirichlet spectral data
    PYTHONPATH=src python -m momentbc simulate fixtures/free_jacobi.json --tmax 8

    # Reproducing kernel on a grid
    PYTHONPATH=src python -m momentbc kernel fixtures/hilbert.json --order 3 --grid --format csv

    # Determinacy table
    PYTHONPATH=src python -m momentbc determinacy fixtures/hilbert.json --problem stieltjes --tmax 4

    # Randomized round trips
    PYTHONPATH=src python -m momentbc roundtrip --random 50 --seed 7
"""

import argparse
import sys

from dotenv import load_dotenv

from momentbc.backend import Backend
from momentbc.cli import Command, JobConfig, OutputFormat, SolveMethod, run
from momentbc.config import runtime_settings
from momentbc.determinacy import Problem
from momentbc.logging import configure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momentbc",
        description="Truncated Hamburger/Stieltjes/Hausdorff moment problems via boundary control",
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # Common arguments
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=str, default=None, help="Output file (default: stdout)")
    common.add_argument(
        "--format",
        type=str,
        default=OutputFormat.JSON.value,
        choices=[f.value for f in OutputFormat],
        help="Output format (default: json)",
    )
    common.add_argument(
        "--backend",
        type=str,
        default=None,
        choices=[b.value for b in Backend],
        help="Arithmetic (default: from the input file, rational when every entry is exact)",
    )
    common.add_argument("--tol", type=float, default=None, help="Eigen-solver / pivot tolerance override")
    common.add_argument("--order", type=int, default=None, help="Truncation order N")
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    def add(command: Command, help_text: str, needs_input: bool = True) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(command.value, parents=[common], help=help_text)
        sub.add_argument("input", nargs=None if needs_input else "?", default=None, help="Input JSON file")
        return sub

    add(Command.CHECK, "Classify moment data (Hamburger/Stieltjes/Hausdorff)")
    add(Command.TRANSFORM, "Convert moments to response entries or back")
    add(Command.OPERATORS, "Assemble C^N, B^N, R^N and check the Hankel factorizations")

    solve = add(Command.SOLVE, "Recover an N-atom measure from moments")
    solve.add_argument(
        "--method",
        type=str,
        default=SolveMethod.PENCIL.value,
        choices=[m.value for m in SolveMethod],
        help="Recovery route (default: pencil)",
    )
    solve.add_argument(
        "--extended",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Force (or forbid) the extended-precision pencil solve",
    )

    simulate = add(Command.SIMULATE, "Simulate a Jacobi system")
    simulate.add_argument("--tmax", type=int, default=None, help="Horizon T (default: from file, else 2N)")

    kernel = add(Command.KERNEL, "Reproducing kernel and Christoffel function")
    kernel.add_argument("--z", type=str, default="0", help="First point (default: 0)")
    kernel.add_argument("--lambda", dest="lam", type=str, default="0", help="Second point (default: 0)")
    kernel.add_argument("--grid", action="store_true", help="Also tabulate K_N(z, λ) on a grid × grid lattice")
    kernel.add_argument("--grid-min", type=float, default=-2.0)
    kernel.add_argument("--grid-max", type=float, default=2.0)
    kernel.add_argument("--grid-points", type=int, default=9)

    determinacy = add(Command.DETERMINACY, "Finite-order determinacy report")
    determinacy.add_argument(
        "--problem",
        type=str,
        default=Problem.HAMBURGER.value,
        choices=[p.value for p in Problem],
    )
    determinacy.add_argument("--tmax", type=int, default=None, help="Largest order T (default: from data)")

    roundtrip = add(Command.ROUNDTRIP, "simulate → moments → solve → moments", needs_input=False)
    roundtrip.add_argument("--random", type=int, default=None, help="Number of random Jacobi systems")
    roundtrip.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    roundtrip.add_argument(
        "--extended",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Force (or forbid) the extended-precision pencil solve for float data",
    )
    return parser


def main():
    """CLI entry point."""
    load_dotenv()

    parser = build_parser()
    args = parser.parse_args()
    if not args.command:
        parser.print_help()
        sys.exit(1)

    try:
        settings = runtime_settings()
    except ValueError as e:
        parser.error(str(e))
    configure("DEBUG" if args.verbose else settings.log_level)

    options = vars(args)
    try:
        config = JobConfig(
            command=Command(args.command),
            input=options.get("input"),
            output=options.get("out"),
            order=options.get("order"),
            tmax=options.get("tmax"),
            backend=options.get("backend"),
            tol=options.get("tol"),
            format=options.get("format"),
            problem=options.get("problem") or Problem.HAMBURGER,
            method=options.get("method") or SolveMethod.PENCIL,
            extended=options.get("extended"),
            z=options.get("z", "0"),
            lam=options.get("lam", "0"),
            grid=options.get("grid", False),
            grid_min=options.get("grid_min", -2.0),
            grid_max=options.get("grid_max", 2.0),
            grid_points=options.get("grid_points", 9),
            random=options.get("random"),
            seed=options.get("seed", 0),
        )
    except ValueError as e:
        parser.error(str(e))

    sys.exit(run(config, settings))


if __name__ == "__main__":
    main()
