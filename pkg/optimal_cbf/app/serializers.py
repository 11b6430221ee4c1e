"""
Conversions between domain objects and text: scenario config files, trajectory and grid
CSV, and the key=value metrics block.
"""

from dataclasses import asdict
from gettext import gettext as _
import logging
import math

import pandas as pd

from optimal_cbf.app import settings
from optimal_cbf.app.exceptions import ConfigError
from optimal_cbf.app.tasks.simulating import (
    CONFIG_KEYS,
    LOG_COLUMNS,
    REQUIRED_KEYS,
    ControllerKind,
    ScenarioConfig,
)


log = logging.getLogger(__name__)

FLOAT_FORMAT = "%.{digits}g".format(digits=settings.CSV_DIGITS)
TEXT_KEYS = ("lead_kind", "controller")
LINEAR_COMMANDS = ("compare",)


def parse_config(text, command=None):
    """
    Parse a key=value scenario config.

    Blank lines and text after ``#`` are ignored. Omitted optional keys take their defaults.

    Args:
        text (str): File contents.
        command (str): CLI command the config is for; ``compare`` also requires cA and cB.

    Returns:
        ScenarioConfig: The validated scenario.

    Raises:
        ConfigError: On a malformed line, an unknown, duplicate or missing key, an
            unparseable number or a violated invariant. Names the line when there is one.
    """
    values = {}
    lines = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError(_("Expected key=value, got '{line}'").format(line=line), number)
        if key not in CONFIG_KEYS:
            raise ConfigError(_("Unknown key '{key}'").format(key=key), number, key)
        if key in values:
            raise ConfigError(
                _("Duplicate key '{key}' (first set on line {first})").format(
                    key=key, first=lines[key]
                ),
                number,
                key,
            )
        values[key] = value if key in TEXT_KEYS else _parse_number(key, value, number)
        lines[key] = number

    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(_("Missing key '{key}'").format(key=key), key=key)

    try:
        cfg = ScenarioConfig(**values)
        if command in LINEAR_COMMANDS:
            cfg.require_linear_gains()
    except ConfigError as exc:
        if exc.line is None and exc.key in lines:
            raise ConfigError(str(exc), lines[exc.key], exc.key) from exc
        raise
    return cfg


def _parse_number(key, value, line):
    try:
        number = float(value)
    except ValueError:
        raise ConfigError(
            _("'{key}' is not a number: '{value}'").format(key=key, value=value), line, key
        )
    if not math.isfinite(number):
        raise ConfigError(_("'{key}' must be finite").format(key=key), line, key)
    return number


def load_config(path, command=None):
    """Read and parse the scenario config at ``path``."""
    log.debug(_("Loading scenario config {path}").format(path=path))
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read(), command)


def dump_config(cfg):
    """Render ``cfg`` as a config file that parses back to an equal ScenarioConfig."""
    data = cfg.as_dict()
    lines = []
    for key in CONFIG_KEYS:
        value = data[key]
        if value is None:
            continue
        text = value if key in TEXT_KEYS else repr(value)
        lines.append("{key}={text}".format(key=key, text=text))
    return "\n".join(lines) + "\n"


def trajectory_frame(trajectory):
    """Return the trajectory as a frame with booleans as 0/1, columns in log order."""
    frame = trajectory.frame.loc[:, list(LOG_COLUMNS)].copy()
    for column in ("cbf_active", "infeasible"):
        frame[column] = frame[column].astype(int)
    return frame


def write_trajectory(trajectory, path):
    """Write the trajectory CSV to ``path``."""
    trajectory_frame(trajectory).to_csv(path, index=False, float_format=FLOAT_FORMAT)


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def format_metrics(metrics):
    """Render metrics as ``key=value`` lines."""
    return "".join(
        "{key}={value}\n".format(key=key, value=_format_value(value))
        for key, value in asdict(metrics).items()
    )


def write_metrics(metrics, path):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(format_metrics(metrics))


def grid_frame(report):
    """Return one row per grid cell with both labels, the residual and the rollout peak."""
    return pd.DataFrame(
        {
            "b": [cell.b for cell in report.cells],
            "bdot": [cell.bdot for cell in report.cells],
            "rollout_label": ["safe" if cell.rollout_safe else "unsafe" for cell in report.cells],
            "classify_label": [cell.label for cell in report.cells],
            "M": [cell.residual for cell in report.cells],
            "rollout_peak": [cell.peak for cell in report.cells],
            "agrees": [int(cell.agrees) for cell in report.cells],
            "error": [cell.error or "" for cell in report.cells],
        }
    )


def write_grid(report, path):
    grid_frame(report).to_csv(path, index=False, float_format=FLOAT_FORMAT)


def comparison_frame(comparison):
    """
    Pair two runs row by row.

    Columns are ``t`` followed by ``b``, ``bdot``, ``u`` and ``cbf_upper_bound`` of each run,
    suffixed with the controller name, or with ``a`` and ``b`` when both runs use the same
    controller.
    """
    log_a, log_b = comparison.logs
    if log_a.controller == log_b.controller:
        suffixes = ("a", "b")
    else:
        suffixes = (ControllerKind(log_a.controller).value, ControllerKind(log_b.controller).value)
    columns = {"t": log_a.column("t")}
    for suffix, trajectory in zip(suffixes, comparison.logs):
        for name in ("b", "bdot", "u", "cbf_upper_bound"):
            columns["{name}_{suffix}".format(name=name, suffix=suffix)] = trajectory.column(name)
    rows = min(len(log_a), len(log_b))
    return pd.DataFrame({name: values[:rows] for name, values in columns.items()})


def write_comparison(comparison, path):
    comparison_frame(comparison).to_csv(path, index=False, float_format=FLOAT_FORMAT)
