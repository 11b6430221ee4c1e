import math
import os
import tempfile
import unittest

import numpy as np

from optimal_cbf.app.exceptions import ParameterError
from optimal_cbf.app.plots import PlotSpec, write_bound_plot


class TestWriteBoundPlot(unittest.TestCase):
    """Test write_bound_plot."""

    def test_writes_svg(self):
        """Test that both curves are drawn into an SVG file, infinite bounds included."""
        b = np.linspace(-50.0, 0.0, 20)
        spec = PlotSpec(
            series={
                "optimal": (b, np.sqrt(-10.0 * b)),
                "linear": (b, np.where(b < -25.0, math.inf, -b)),
            },
            u_max=5.0,
        )
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "bounds.svg")
            write_bound_plot(spec, path)
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        self.assertIn("<svg", text)
        self.assertTrue(text.rstrip().endswith("</svg>"))

    def test_mismatched_series(self):
        """Test that every series needs as many bounds as b values."""
        with self.assertRaises(ParameterError):
            PlotSpec(series={"optimal": ([0.0, -1.0], [1.0])})
