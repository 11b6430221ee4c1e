"""
Default tolerances, step sizes and logging configuration.

Every module reads its defaults from here; callers override them through explicit arguments
or the scenario config file.
"""

# Barrier geometry
TOL_B_ANALYTIC = 1e-9
TOL_B_SIM = 1e-6
B_FLOOR = 1e-6
CLASSIFY_TOL = 1e-6
DEFAULT_MARGIN = 1.0

# Shortest line integral quadrature
QUAD_RTOL = 1e-10
QUAD_ATOL = 1e-14
ENVELOPE_CHECK_POINTS = 65

# Finite differences
FD_STEP = 1e-5
FD_RTOL = 1e-4
FD_SECOND_RTOL = 1e-3
FD_SECOND_STEP = 1e-3

# Brute-force oracle
ROLLOUT_DT = 1e-4
ROLLOUT_HORIZON = 20.0
ROLLOUT_TOL = 5e-3
PROFILE_SEGMENTS = 10
MINIMALITY_TOL_STEPS = 10
DEFAULT_SEED = 0

# Closed-loop simulation
DEFAULT_C1 = 3.0
DEFAULT_DT = 1e-3
DEFAULT_T_END = 30.0
BRAKING_ONSET = -0.01
VIOLATION_TOL = 1e-3

# Output
CSV_DIGITS = 12
SVG_SIZE = (6.4, 4.8)

LOG_ENV_VAR = "CBF_OPT_LOG"
LOG_LEVELS = {"quiet": "WARNING", "info": "INFO", "debug": "DEBUG"}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "stderr": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "optimal_cbf": {"handlers": ["stderr"], "level": "INFO", "propagate": False},
    },
}
