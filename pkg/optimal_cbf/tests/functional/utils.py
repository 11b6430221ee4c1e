"""Utilities for optimal_cbf end-to-end tests."""
import contextlib
import io
import os
import tempfile

from optimal_cbf.app.cli import main
from optimal_cbf.app.serializers import dump_config


def gen_workdir(test_case):
    """Return a temporary directory removed when ``test_case`` finishes."""
    tmp = tempfile.TemporaryDirectory()
    test_case.addCleanup(tmp.cleanup)
    return tmp.name


def write_config(directory, cfg, name="scenario.cfg"):
    """Write ``cfg`` as a key=value file in ``directory`` and return its path."""
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dump_config(cfg))
    return path


def run_cli(*argv):
    """Run the command line and return ``(exit code, stdout)``."""
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


def read_key_values(text):
    """Parse ``key=value`` lines into a dict of strings."""
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)
