"""Tests that drive the optimal-cbf command line."""
import dataclasses
import os
import unittest
from unittest import mock

import pandas as pd

from optimal_cbf.app.cli import EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, EXIT_VIOLATION
from optimal_cbf.app.tasks import run_scenario
from optimal_cbf.app.tasks.simulating import CLOSING, LOG_COLUMNS
from optimal_cbf.tests.functional.constants import CLOSING_ROWS
from optimal_cbf.tests.functional.utils import (
    gen_workdir,
    read_key_values,
    run_cli,
    write_config,
)


class SimulateTestCase(unittest.TestCase):
    """Test the simulate command."""

    def setUp(self):
        """Create a working directory."""
        self.workdir = gen_workdir(self)

    def test_config_file(self):
        """Test a run from a config file.

        1. Write the closing scenario to a config file.
        2. Simulate it.
        3. Assert that the CSV has one row per step plus the initial row.
        4. Assert that the metrics file matches what was printed.
        """
        config = write_config(self.workdir, CLOSING)
        out = os.path.join(self.workdir, "run.csv")
        code, stdout = run_cli("simulate", "--config", config, "--out", out)
        self.assertEqual(code, EXIT_OK)

        frame = pd.read_csv(out)
        self.assertEqual(list(frame.columns), list(LOG_COLUMNS))
        self.assertEqual(len(frame), CLOSING_ROWS)

        with open(os.path.join(self.workdir, "run.metrics"), encoding="utf-8") as handle:
            self.assertEqual(handle.read(), stdout)
        self.assertEqual(read_key_values(stdout)["violations"], "0")

    def test_preset_with_step_override(self):
        """Test that --dt overrides the preset's step."""
        out = os.path.join(self.workdir, "steady.csv")
        code, stdout = run_cli("simulate", "--preset", "steady", "--dt", "0.01", "--out", out)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(pd.read_csv(out)), 3001)
        self.assertEqual(read_key_values(stdout)["braking_onset"], "none")

    def test_unfiltered_run_fails(self):
        """Test that a collision maps to exit code 2."""
        out = os.path.join(self.workdir, "none.csv")
        code, stdout = run_cli("simulate", "--controller", "none", "--out", out)
        self.assertEqual(code, EXIT_VIOLATION)
        self.assertNotEqual(read_key_values(stdout)["violations"], "0")

    def test_config_errors(self):
        """Test that config problems map to exit code 4.

        1. A file with a missing key.
        2. A file that does not exist.
        3. A controller that needs gains the file does not set.
        """
        config = os.path.join(self.workdir, "broken.cfg")
        with open(config, "w", encoding="utf-8") as handle:
            handle.write("p0=0\nv0=10\n")
        out = os.path.join(self.workdir, "run.csv")
        self.assertEqual(run_cli("simulate", "--config", config, "--out", out)[0], EXIT_CONFIG)

        missing = os.path.join(self.workdir, "missing.cfg")
        self.assertEqual(run_cli("simulate", "--config", missing, "--out", out)[0], EXIT_CONFIG)

        no_gains = write_config(self.workdir, CLOSING.replace(cA=None, cB=None), "gains.cfg")
        code, _stdout = run_cli(
            "simulate", "--config", no_gains, "--controller", "linear", "--out", out
        )
        self.assertEqual(code, EXIT_CONFIG)
        self.assertFalse(os.path.exists(out))

    def test_log_level_variable(self):
        """Test that an unknown CBF_OPT_LOG value is a config error."""
        out = os.path.join(self.workdir, "run.csv")
        with mock.patch.dict(os.environ, {"CBF_OPT_LOG": "loud"}):
            self.assertEqual(run_cli("simulate", "--out", out)[0], EXIT_CONFIG)
        with mock.patch.dict(os.environ, {"CBF_OPT_LOG": "quiet"}):
            code, _stdout = run_cli("simulate", "--preset", "steady", "--dt", "0.1", "--out", out)
        self.assertEqual(code, EXIT_OK)

    def test_repeated_runs_are_identical(self):
        """Test that one config gives a byte-identical CSV and metrics on every run."""
        config = write_config(self.workdir, CLOSING.replace(dt=0.01))
        outputs = []
        for name in ("first.csv", "second.csv"):
            out = os.path.join(self.workdir, name)
            code, stdout = run_cli("simulate", "--config", config, "--seed", "5", "--out", out)
            with open(out, "rb") as handle:
                outputs.append((code, handle.read(), stdout))
        self.assertEqual(outputs[0], outputs[1])

    def test_infeasible_steps(self):
        """Test that infeasible steps without a violation map to exit code 3."""

        def with_infeasible_steps(cfg):
            trajectory, metrics = run_scenario(cfg)
            return trajectory, dataclasses.replace(metrics, infeasible_steps=2)

        out = os.path.join(self.workdir, "run.csv")
        with mock.patch("optimal_cbf.app.cli.run_scenario", with_infeasible_steps):
            code, stdout = run_cli("simulate", "--preset", "steady", "--dt", "0.1", "--out", out)
        self.assertEqual(code, EXIT_INFEASIBLE)
        self.assertEqual(read_key_values(stdout)["infeasible_steps"], "2")


class CompareTestCase(unittest.TestCase):
    """Test the compare command."""

    def test_compare(self):
        """Test that compare writes the SVG and the paired CSV.

        1. Compare both CBFs on the closing scenario.
        2. Assert that the SVG exists.
        3. Assert that the CSV carries one column group per controller.
        4. Assert that the linear controller brakes first.
        """
        workdir = gen_workdir(self)
        out = os.path.join(workdir, "fig.svg")
        code, stdout = run_cli("compare", "--preset", "closing", "--out", out)
        self.assertEqual(code, EXIT_OK)

        with open(out, encoding="utf-8") as handle:
            self.assertIn("<svg", handle.read())
        frame = pd.read_csv(os.path.join(workdir, "fig.csv"))
        for column in ("t", "b_optimal", "cbf_upper_bound_optimal", "b_linear", "u_linear"):
            self.assertIn(column, frame.columns)
        self.assertLess(float(read_key_values(stdout)["onset_delta"]), 0.0)

    def test_compare_needs_gains(self):
        """Test that a config without linear gains is refused."""
        workdir = gen_workdir(self)
        config = write_config(workdir, CLOSING.replace(cA=None, cB=None))
        out = os.path.join(workdir, "fig.svg")
        self.assertEqual(run_cli("compare", "--config", config, "--out", out)[0], EXIT_CONFIG)


class SafesetTestCase(unittest.TestCase):
    """Test the safeset command."""

    def test_grid(self):
        """Test that the rollout labels agree with the C2 test on the default grid."""
        workdir = gen_workdir(self)
        out = os.path.join(workdir, "grid.csv")
        code, stdout = run_cli("safeset", "--preset", "steady", "--dt", "0.001", "--out", out)
        self.assertEqual(code, EXIT_OK)
        frame = pd.read_csv(out)
        self.assertEqual(len(frame), 101 * 101)
        self.assertGreaterEqual(float(read_key_values(stdout)["agreement"]), 0.99)


class VerifyTestCase(unittest.TestCase):
    """Test the verify command."""

    def test_selected_checks(self):
        """Test that --check runs only the named checks."""
        code, stdout = run_cli("verify", "--check", "qp-oracle", "--check", "matching-slope")
        self.assertEqual(code, EXIT_OK)
        lines = stdout.splitlines()
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[0].startswith("PASS qp-oracle"))
        self.assertTrue(lines[1].startswith("PASS matching-slope"))
