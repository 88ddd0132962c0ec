"""Figure renderer for robust eigenspace estimation corruption sweeps.

Reads the experiment harness's ``results.csv`` files (one per subspace
dimension) and draws mean subspace distance with a one-standard-deviation
band versus the corruption fraction, one panel per file. The statistics are
recomputed from the raw rows so the figure is self-contained evidence; the
estimator library is never imported.
"""

__version__ = "0.1.0"

from .reader import SCHEMA, SchemaError, SweepData, load_sweep
from .render import PlotSpec, aggregate, build_figure, render_figure

__all__ = [
    "__version__",
    "SCHEMA",
    "SchemaError",
    "SweepData",
    "load_sweep",
    "PlotSpec",
    "aggregate",
    "build_figure",
    "render_figure",
]
