"""Upper control bound against barrier value, one curve per controller, as SVG."""

from dataclasses import dataclass, field
from gettext import gettext as _
import logging
from typing import Dict, Optional, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from optimal_cbf.app import settings  # noqa: E402
from optimal_cbf.app.exceptions import ParameterError  # noqa: E402


log = logging.getLogger(__name__)


@dataclass
class PlotSpec:
    """
    What to draw.

    Attributes:
        series (dict): ``{label: (b, bound)}``; each pair of arrays has matching length.
        size (tuple): Figure size in inches.
        b_range (tuple): x-axis limits, automatic when None.
        bound_range (tuple): y-axis limits, automatic when None.
        u_max (float): Draws the control bound as a reference line when set.
    """

    series: Dict[str, Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    size: Tuple[float, float] = settings.SVG_SIZE
    b_range: Optional[Tuple[float, float]] = None
    bound_range: Optional[Tuple[float, float]] = None
    u_max: Optional[float] = None

    def __post_init__(self):
        for label, (b, bound) in self.series.items():
            if len(b) != len(bound):
                raise ParameterError(
                    _("Series '{label}' has {nb} b values but {nu} bounds").format(
                        label=label, nb=len(b), nu=len(bound)
                    )
                )


def write_bound_plot(spec, path):
    """
    Draw every series of ``spec`` and save it as SVG at ``path``.

    Infinite bounds (no active constraint) are left as gaps.
    """
    figure, axes = plt.subplots(figsize=spec.size)
    try:
        for label, (b, bound) in spec.series.items():
            bound = np.asarray(bound, dtype=float)
            axes.plot(b, np.where(np.isfinite(bound), bound, np.nan), label=label)
        if spec.u_max is not None:
            axes.axhline(-spec.u_max, color="k", linestyle="--", linewidth=0.5)
            axes.axhline(spec.u_max, color="k", linestyle="--", linewidth=0.5)
        if spec.b_range:
            axes.set_xlim(*spec.b_range)
        if spec.bound_range:
            axes.set_ylim(*spec.bound_range)
        axes.set_xlabel("b [m]")
        axes.set_ylabel("upper bound on u [m/s^2]")
        axes.grid(True)
        axes.legend()
        figure.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(figure)
    log.info(_("Wrote {path}").format(path=path))
