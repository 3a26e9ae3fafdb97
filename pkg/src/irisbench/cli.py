"""Command-line entry point: generate, calibrate, run, report."""

from __future__ import annotations

import argparse
import os
import sys

from . import engine, runner

USAGE_EXIT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isb",
        description="1:N vs 1:First identification search benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("generate", "generate the synthetic population only"),
        ("calibrate", "generate population and calibrate thresholds"),
        ("run", "run the full experimental sweep"),
        ("report", "re-aggregate results from saved transaction logs"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="experiment config file")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--jobs", type=int, default=None, help="worker thread count")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT

    seed = args.seed
    if seed is None and os.environ.get("ISB_SEED"):
        seed = int(os.environ["ISB_SEED"])
    try:
        config = runner.load_config(args.config, seed_override=seed)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "generate":
            engine.set_jobs(args.jobs)
            pop = runner.generate_population(
                config.population,
                config.n_subjects,
                config.samples_per_subject,
                runner.rng_for(config.seed, 0),
            )
            config.output_dir.mkdir(parents=True, exist_ok=True)
            runner.write_population(pop, config.output_dir)
            print(config.output_dir / "population.csv")
        elif args.command == "calibrate":
            engine.set_jobs(args.jobs)
            pop = runner.generate_population(
                config.population,
                config.n_subjects,
                config.samples_per_subject,
                runner.rng_for(config.seed, 0),
            )
            config.output_dir.mkdir(parents=True, exist_ok=True)
            state = runner._SweepState(config, pop)
            runner._calibrate(state, config.output_dir)
            print(config.output_dir / "calibration.csv")
        elif args.command == "run":
            runner.run_experiment(config, jobs=args.jobs)
            print(config.output_dir / "results.csv")
        elif args.command == "report":
            rows = runner.report_from_artifacts(config.output_dir)
            runner.write_results_csv(config.output_dir / "results.csv", rows)
            print(config.output_dir / "results.csv")
    except Exception as exc:  # surface one diagnostic line, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:  # console-script shim
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
