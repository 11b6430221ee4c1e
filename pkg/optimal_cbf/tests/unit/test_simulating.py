import math
import unittest

import numpy as np
import pandas as pd

from optimal_cbf.app.exceptions import ConfigError
from optimal_cbf.app.models import LeadKind
from optimal_cbf.app.tasks.simulating import (
    CLOSING,
    LOG_COLUMNS,
    PRESETS,
    STEADY,
    Comparison,
    ControllerKind,
    ScenarioConfig,
    TrajectoryLog,
    compare_scenarios,
    controller_bound,
    run_scenario,
    step,
    summarize,
)


class TestScenarioConfig(unittest.TestCase):
    """Test ScenarioConfig validation."""

    def assertConfigError(self, key, **changes):
        with self.assertRaises(ConfigError) as ctx:
            STEADY.replace(**changes)
        self.assertEqual(ctx.exception.key, key)

    def test_positive_fields(self):
        """Test that step, horizon, gap, bound and slope must be positive."""
        self.assertConfigError("dt", dt=0.0)
        self.assertConfigError("T_end", T_end=-1.0)
        self.assertConfigError("gamma", gamma=0.0)
        self.assertConfigError("u_max", u_max=-5.0)
        self.assertConfigError("c1", c1=0.0)

    def test_linear_needs_gains(self):
        """Test that the linear controller needs cA and cB."""
        self.assertConfigError("cA", controller=ControllerKind.LINEAR, cA=None)
        self.assertConfigError("cB", controller=ControllerKind.LINEAR, cB=-1.0)

    def test_lead_validation(self):
        """Test that the lead model is validated."""
        self.assertConfigError("delta_ddot", delta_ddot=-1.0)
        self.assertConfigError(
            "delta_ddot", lead_kind=LeadKind.WORST_CASE_BRAKING, delta_ddot=1.0
        )
        self.assertConfigError("lead_kind", lead_kind=LeadKind.TABULATED_PROFILE)

    def test_text_values(self):
        """Test that enum fields accept their text values."""
        cfg = STEADY.replace(lead_kind="worst-case-braking", delta_ddot=-2.0, controller="none")
        self.assertIs(cfg.lead_kind, LeadKind.WORST_CASE_BRAKING)
        self.assertIs(cfg.controller, ControllerKind.NONE)
        with self.assertRaises(ConfigError):
            STEADY.replace(controller="pid")

    def test_presets(self):
        """Test the shipped scenarios."""
        self.assertEqual(set(PRESETS), {"steady", "closing", "lead-braking"})
        self.assertEqual(STEADY.steps, 30000)
        self.assertEqual((CLOSING.delta0, CLOSING.delta_dot0), (40.0, 1.0))
        self.assertEqual(PRESETS["lead-braking"].signal.ddot_lower, -2.0)

    def test_physics(self):
        """Test that physics excludes the controller and its gains."""
        self.assertEqual(
            CLOSING.physics(), CLOSING.replace(controller="linear", cA=9.0, c1=1.0).physics()
        )


class TestStep(unittest.TestCase):
    """Test the Euler step."""

    def test_step(self):
        """Test one step of the double integrator."""
        np.testing.assert_allclose(step((0.0, 10.0), 0.0, 0.1), [1.0, 10.0])
        np.testing.assert_allclose(step((0.0, 10.0), -5.0, 0.1), [1.0, 9.5])


class TestControllerBound(unittest.TestCase):
    """Test controller_bound on the closing scenario."""

    # p = 40, v = 10 at t = 0 puts the headway barrier at b = -10, b' = 9.
    state = (40.0, 10.0)

    def test_optimal(self):
        """Test the reduced constraint bound."""
        self.assertAlmostEqual(controller_bound(CLOSING, self.state, 0.0), -1.5)

    def test_optimal_boundary(self):
        """Test full braking on the boundary of C2."""
        self.assertEqual(controller_bound(CLOSING, (40.0, 11.0), 0.0), -5.0)

    def test_optimal_outside(self):
        """Test full braking outside C2."""
        self.assertEqual(controller_bound(CLOSING, (40.0, 12.0), 0.0), -5.0)

    def test_linear(self):
        """Test the linear bound -cB b' - cA cB b."""
        cfg = CLOSING.replace(controller=ControllerKind.LINEAR)
        self.assertAlmostEqual(controller_bound(cfg, self.state, 0.0), -16.0)
        cfg = cfg.replace(cA=100.0, cB=1.0)
        self.assertAlmostEqual(controller_bound(cfg, self.state, 0.0), 991.0)

    def test_receding(self):
        """Test that neither CBF bounds a receding state."""
        for kind in ControllerKind:
            cfg = CLOSING.replace(controller=kind)
            self.assertEqual(controller_bound(cfg, (40.0, 0.5), 0.0), math.inf)


class TestRunScenario(unittest.TestCase):
    """Test run_scenario on short runs."""

    def test_steady_holds_still(self):
        """Test that a lead at the target speed needs no control."""
        trajectory, metrics = run_scenario(STEADY.replace(T_end=0.01))
        self.assertEqual(len(trajectory), 11)
        self.assertEqual(list(trajectory.frame.columns), list(LOG_COLUMNS))
        np.testing.assert_array_equal(trajectory.column("u"), 0.0)
        np.testing.assert_allclose(trajectory.column("b"), -11.0)
        self.assertIsNone(metrics.braking_onset)
        self.assertEqual(metrics.violations, 0)
        self.assertFalse(metrics.aborted)

    def test_time_column(self):
        """Test that rows are spaced by dt and the last row is at T_end."""
        trajectory, _metrics = run_scenario(CLOSING.replace(T_end=0.5, dt=0.01))
        t = trajectory.column("t")
        self.assertEqual(len(t), 51)
        self.assertAlmostEqual(t[-1], 0.5)
        self.assertTrue(np.allclose(np.diff(t), 0.01))

    def test_outside_c2_is_reported(self):
        """Test that steps starting outside C2 brake fully and are summarized in the log."""
        # b = -10 with b' = 11 is above alpha(-10) = 10 for the whole run.
        cfg = CLOSING.replace(p0=40.0, v0=12.0, T_end=0.01)
        with self.assertLogs("optimal_cbf.app.tasks.simulating", level="WARNING") as logs:
            trajectory, metrics = run_scenario(cfg)
        self.assertEqual(metrics.outside_c2_steps, 11)
        np.testing.assert_array_equal(trajectory.column("u"), -5.0)
        self.assertTrue(any("11 steps found the state outside C2" in line for line in logs.output))

    def test_rows_follow_the_dynamics(self):
        """Test that each row is the Euler step of the previous one."""
        trajectory, _metrics = run_scenario(CLOSING.replace(T_end=0.1, dt=0.01))
        p, v, u = (trajectory.column(name) for name in ("p", "v", "u"))
        np.testing.assert_allclose(p[1:], p[:-1] + v[:-1] * 0.01)
        np.testing.assert_allclose(v[1:], v[:-1] + u[:-1] * 0.01)


class TestSummarize(unittest.TestCase):
    """Test summarize."""

    def test_metrics(self):
        """Test every metric on a hand-written log."""
        frame = pd.DataFrame(
            {
                "t": [0.0, 0.1, 0.2],
                "b": [-1.0, 0.5, 0.002],
                "bdot": [1.0, 0.0, -0.5],
                "u": [0.0, -5.0, -0.005],
                "infeasible": [False, True, False],
            }
        )
        metrics = summarize(TrajectoryLog(frame, ControllerKind.NONE), outside_c2_steps=1)
        self.assertEqual(metrics.max_b, 0.5)
        self.assertEqual(metrics.terminal_b, 0.002)
        self.assertEqual(metrics.terminal_bdot, -0.5)
        self.assertEqual(metrics.braking_onset, 0.1)
        self.assertEqual(metrics.violations, 2)
        self.assertEqual(metrics.infeasible_steps, 1)
        self.assertEqual(metrics.min_u, -5.0)
        self.assertEqual(metrics.outside_c2_steps, 1)


class TestCompareScenarios(unittest.TestCase):
    """Test compare_scenarios."""

    def test_physics_must_match(self):
        """Test that runs with different physics are refused."""
        with self.assertRaises(ConfigError) as ctx:
            compare_scenarios(CLOSING, CLOSING.replace(dt=0.01))
        self.assertEqual(ctx.exception.key, "dt")

    def test_short_comparison(self):
        """Test the curves and the onset difference of two short runs."""
        short = CLOSING.replace(T_end=0.1, dt=0.01)
        comparison = compare_scenarios(short, short.replace(controller=ControllerKind.LINEAR))
        self.assertIsInstance(comparison, Comparison)
        self.assertEqual(set(comparison.bound_curves()), {"optimal", "linear"})
        b, bound = comparison.bound_curves()["linear"]
        self.assertEqual(len(b), len(bound))
