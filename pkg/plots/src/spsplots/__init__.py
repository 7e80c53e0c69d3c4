"""Figure rendering for energy-curve CSV files.

Consumes only the curve CSV contract emitted by the solver CLI
(columns c, lambda, converged, ...); never recomputes mathematics.
"""

__version__ = "0.1.0"

from .curves import CurveData, PlotSpec, load_curve_csv, plot_curve
