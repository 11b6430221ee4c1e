"""
Command line front end.

Commands::

    optimal-cbf simulate --config closing.cfg --out run.csv
    optimal-cbf compare --preset closing --out fig.svg
    optimal-cbf safeset --preset closing --out grid.csv
    optimal-cbf verify --seed 0

Exit codes: 0 success, 2 safety violation or failed check, 3 infeasible QP, 4 config error.
"""

import argparse
from gettext import gettext as _
import logging
import logging.config
import os
from pathlib import Path
import sys

from optimal_cbf.app import __version__, settings
from optimal_cbf.app.exceptions import CbfError, ConfigError
from optimal_cbf.app.oracle import GridSpec, RolloutConfig, grid_safe_set
from optimal_cbf.app.plots import PlotSpec, write_bound_plot
from optimal_cbf.app.serializers import (
    format_metrics,
    load_config,
    write_comparison,
    write_grid,
    write_metrics,
    write_trajectory,
)
from optimal_cbf.app.tasks import compare_scenarios, run_scenario, run_verification
from optimal_cbf.app.tasks.simulating import PRESETS, ControllerKind


log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_INFEASIBLE = 3
EXIT_CONFIG = 4

COMMANDS = ("simulate", "compare", "safeset", "verify")
DEFAULT_OUT = {
    "simulate": "run.csv",
    "compare": "compare.svg",
    "safeset": "safeset.csv",
}
GRID = GridSpec(b_range=(-50.0, 0.0), bdot_range=(0.0, 25.0), counts=(101, 101))


def configure_logging(environ=None):
    """Configure logging from ``settings.LOGGING`` and the CBF_OPT_LOG variable."""
    environ = os.environ if environ is None else environ
    choice = environ.get(settings.LOG_ENV_VAR, "info").lower()
    if choice not in settings.LOG_LEVELS:
        raise ConfigError(
            _("{var} must be one of {choices}, got '{choice}'").format(
                var=settings.LOG_ENV_VAR, choices=", ".join(settings.LOG_LEVELS), choice=choice
            )
        )
    config = dict(settings.LOGGING)
    config["loggers"] = {
        name: dict(logger, level=settings.LOG_LEVELS[choice])
        for name, logger in settings.LOGGING["loggers"].items()
    }
    logging.config.dictConfig(config)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="optimal-cbf",
        description=_("Optimal control barrier functions for adaptive cruise control."),
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": _("run one scenario and write its trajectory CSV and metrics"),
        "compare": _("run the optimal and linear CBFs and plot their bounds against b"),
        "safeset": _("label a grid of (b, b') by rollout and compare with the C2 test"),
        "verify": _("run the verification suite"),
    }
    for name in COMMANDS:
        command = commands.add_parser(name, help=helps[name])
        if name != "verify":
            source = command.add_mutually_exclusive_group()
            source.add_argument("--config", type=Path, help=_("key=value scenario file"))
            source.add_argument(
                "--preset", choices=sorted(PRESETS), help=_("shipped scenario (default: closing)")
            )
            command.add_argument("--out", type=Path, default=Path(DEFAULT_OUT[name]))
            command.add_argument("--dt", type=float, help=_("override the step size"))
        if name == "simulate":
            command.add_argument(
                "--controller", choices=[kind.value for kind in ControllerKind]
            )
        command.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
        if name == "verify":
            command.add_argument(
                "--check", action="append", help=_("run only this check (repeatable)")
            )
    return parser


def scenario_from_args(args):
    """Build the ScenarioConfig selected by ``--config``/``--preset`` and the overrides."""
    if args.config is not None:
        try:
            cfg = load_config(args.config, args.command)
        except OSError as exc:
            raise ConfigError(_("Cannot read {path}: {err}").format(path=args.config, err=exc))
    else:
        cfg = PRESETS[args.preset or "closing"]
    changes = {}
    if getattr(args, "controller", None):
        changes["controller"] = args.controller
    if args.command != "safeset" and args.dt is not None:
        changes["dt"] = args.dt
    return cfg.replace(**changes) if changes else cfg


def exit_code(*all_metrics):
    if any(m.violations or m.aborted for m in all_metrics):
        return EXIT_VIOLATION
    if any(m.infeasible_steps for m in all_metrics):
        return EXIT_INFEASIBLE
    return EXIT_OK


def simulate(args):
    cfg = scenario_from_args(args)
    trajectory, metrics = run_scenario(cfg)
    write_trajectory(trajectory, args.out)
    write_metrics(metrics, args.out.with_suffix(".metrics"))
    sys.stdout.write(format_metrics(metrics))
    return exit_code(metrics)


def compare(args):
    cfg = scenario_from_args(args)
    comparison = compare_scenarios(
        cfg.replace(controller=ControllerKind.OPTIMAL),
        cfg.replace(controller=ControllerKind.LINEAR),
    )
    write_bound_plot(PlotSpec(series=comparison.bound_curves(), u_max=cfg.u_max), args.out)
    write_comparison(comparison, args.out.with_suffix(".csv"))
    optimal, linear = comparison.metrics
    sys.stdout.write(
        "onset_optimal={a}\nonset_linear={b}\nonset_delta={d}\n".format(
            a=optimal.braking_onset, b=linear.braking_onset, d=comparison.onset_delta
        )
    )
    return exit_code(*comparison.metrics)


def safeset(args):
    cfg = scenario_from_args(args)
    rollout = RolloutConfig(u_max=cfg.u_max, dt=args.dt or settings.ROLLOUT_DT)
    report = grid_safe_set(cfg.barrier, GRID, rollout)
    write_grid(report, args.out)
    sys.stdout.write(
        "agreement={a:.6f}\ndisagreements={n}\n".format(
            a=report.agreement, n=len(report.disagreements)
        )
    )
    return EXIT_OK if report.agreement >= 0.99 else EXIT_VIOLATION


def verify(args):
    results = run_verification(seed=args.seed, only=args.check)
    for result in results:
        sys.stdout.write(
            "{status} {name}: {detail}\n".format(
                status="PASS" if result.passed else "FAIL", name=result.name, detail=result.detail
            )
        )
    return EXIT_OK if all(result.passed for result in results) else EXIT_VIOLATION


HANDLERS = {"simulate": simulate, "compare": compare, "safeset": safeset, "verify": verify}


def dispatch(command, args):
    """
    Run ``command`` and map its outcome to an exit code.

    Args:
        command (str): One of ``COMMANDS``.
        args (argparse.Namespace): Parsed arguments.

    Returns:
        int: The exit code.
    """
    try:
        return HANDLERS[command](args)
    except ConfigError as exc:
        log.error(_("Configuration error: {err}").format(err=exc))
        return EXIT_CONFIG
    except CbfError as exc:
        log.error(_("{command} failed: {err}").format(command=command, err=exc))
        return EXIT_VIOLATION


def main(argv=None):
    try:
        configure_logging()
    except ConfigError as exc:
        sys.stderr.write("{err}\n".format(err=exc))
        return EXIT_CONFIG
    args = build_parser().parse_args(argv)
    return dispatch(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
