from .simulating import compare_scenarios, run_scenario, sweep_slope  # noqa
from .verifying import run_verification  # noqa
