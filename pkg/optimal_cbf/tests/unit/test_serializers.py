import os
import tempfile
import unittest

import pandas as pd

from optimal_cbf.app.exceptions import ConfigError
from optimal_cbf.app.oracle import GridCell, GridReport
from optimal_cbf.app.serializers import (
    comparison_frame,
    dump_config,
    format_metrics,
    grid_frame,
    load_config,
    parse_config,
    write_trajectory,
)
from optimal_cbf.app.tasks.simulating import (
    CLOSING,
    LOG_COLUMNS,
    PRESETS,
    Comparison,
    ControllerKind,
    Metrics,
    run_scenario,
)


STEADY_TEXT = """\
# printed parameters
p0=0
v0=10
v_star=10
gamma=10
u_max=5
c1=3
cA=100
cB=1
dt=0.001
T_end=30
delta0=1
delta_dot0=10
"""


class TestParseConfig(unittest.TestCase):
    """Test parse_config."""

    def assertConfigError(self, text, line, key, command=None):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(text, command)
        self.assertEqual(ctx.exception.line, line)
        self.assertEqual(ctx.exception.key, key)
        return ctx.exception

    def test_steady(self):
        """Test that the printed parameters parse to the steady preset."""
        self.assertEqual(parse_config(STEADY_TEXT), PRESETS["steady"])

    def test_comments_and_spacing(self):
        """Test that comments, blank lines and spaces around '=' are ignored."""
        text = STEADY_TEXT.replace("p0=0", "\n  p0 = 0   # start\n")
        self.assertEqual(parse_config(text).p0, 0.0)

    def test_text_keys(self):
        """Test the lead model and controller keys."""
        text = STEADY_TEXT + "lead_kind=worst-case-braking\ndelta_ddot=-2\ncontroller=none\n"
        cfg = parse_config(text)
        self.assertEqual(cfg.lead_kind.value, "worst-case-braking")
        self.assertIs(cfg.controller, ControllerKind.NONE)

    def test_missing_key(self):
        """Test that a missing required key is named."""
        text = STEADY_TEXT.replace("u_max=5\n", "")
        error = self.assertConfigError(text, None, "u_max")
        self.assertIn("Missing key 'u_max'", str(error))

    def test_invalid_value_names_its_line(self):
        """Test that an invariant violation is reported at the key's line."""
        error = self.assertConfigError(STEADY_TEXT.replace("dt=0.001", "dt=-1"), 10, "dt")
        self.assertTrue(str(error).startswith("line 10: "))

    def test_malformed_lines(self):
        """Test unknown keys, duplicates, bad numbers and lines without '='."""
        self.assertConfigError(STEADY_TEXT + "speed=3\n", 14, "speed")
        self.assertConfigError(STEADY_TEXT + "p0=1\n", 14, "p0")
        self.assertConfigError(STEADY_TEXT.replace("v0=10", "v0=ten"), 3, "v0")
        self.assertConfigError(STEADY_TEXT.replace("v0=10", "v0=nan"), 3, "v0")
        self.assertConfigError(STEADY_TEXT + "gamma 10\n", 14, None)

    def test_compare_needs_gains(self):
        """Test that compare requires the linear gains."""
        text = STEADY_TEXT.replace("cA=100\n", "")
        self.assertEqual(parse_config(text).cA, None)
        self.assertConfigError(text, None, "cA", command="compare")

    def test_dump_parses_back(self):
        """Test that a dumped config parses to an equal one."""
        for cfg in PRESETS.values():
            self.assertEqual(parse_config(dump_config(cfg)), cfg)

    def test_load_config(self):
        """Test reading a config from disk."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "closing.cfg")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(dump_config(CLOSING))
            self.assertEqual(load_config(path), CLOSING)


class TestWriters(unittest.TestCase):
    """Test the CSV and metrics writers."""

    @classmethod
    def setUpClass(cls):
        """Run a short closing scenario under both CBFs."""
        short = CLOSING.replace(T_end=0.05, dt=0.01)
        cls.optimal = run_scenario(short)
        cls.linear = run_scenario(short.replace(controller=ControllerKind.LINEAR))

    def test_trajectory_csv(self):
        """Test the header, row count and 0/1 flags of the trajectory CSV."""
        trajectory, _metrics = self.optimal
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.csv")
            write_trajectory(trajectory, path)
            frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), list(LOG_COLUMNS))
        self.assertEqual(len(frame), 6)
        self.assertTrue(set(frame["cbf_active"]) <= {0, 1})
        self.assertAlmostEqual(frame["b"][0], -50.0)

    def test_metrics_block(self):
        """Test the key=value rendering of metrics."""
        metrics = Metrics(-11.0, -11.0, 0.0, None, 0, 0, 0.0)
        lines = format_metrics(metrics).splitlines()
        self.assertIn("max_b=-11", lines)
        self.assertIn("braking_onset=none", lines)
        self.assertIn("violations=0", lines)
        self.assertIn("aborted=false", lines)
        self.assertEqual(lines[0], "max_b=-11")

    def test_comparison_columns(self):
        """Test that comparison columns carry the controller names."""
        comparison = Comparison(
            logs=(self.optimal[0], self.linear[0]),
            metrics=(self.optimal[1], self.linear[1]),
            onset_delta=None,
        )
        frame = comparison_frame(comparison)
        self.assertEqual(
            list(frame.columns),
            [
                "t",
                "b_optimal",
                "bdot_optimal",
                "u_optimal",
                "cbf_upper_bound_optimal",
                "b_linear",
                "bdot_linear",
                "u_linear",
                "cbf_upper_bound_linear",
            ],
        )

    def test_comparison_of_one_controller(self):
        """Test that two runs of one controller are suffixed a and b."""
        comparison = Comparison(
            logs=(self.optimal[0], self.optimal[0]),
            metrics=(self.optimal[1], self.optimal[1]),
            onset_delta=0.0,
        )
        self.assertIn("b_a", comparison_frame(comparison).columns)
        self.assertIn("u_b", comparison_frame(comparison).columns)

    def test_grid_frame(self):
        """Test one row per cell with both labels."""
        report = GridReport(
            cells=[
                GridCell(-10.0, 10.0, True, "BoundaryC2", 0.0, 5e-4),
                GridCell(-10.0, 11.0, False, "OutsideC2WithinC1", 21.0, 2.1),
            ],
            tolerance=5e-3,
        )
        frame = grid_frame(report)
        self.assertEqual(list(frame["rollout_label"]), ["safe", "unsafe"])
        self.assertEqual(list(frame["agrees"]), [1, 1])
        self.assertEqual(list(frame["error"]), ["", ""])
