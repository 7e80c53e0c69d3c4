"""Energy-curve figures from solver CSV output.

The orientation follows the usual presentation of prescribed-energy
results: the energy level c runs up the vertical axis, the coupling
lambda along the horizontal one, so each curve descends from the
threshold line c = c* toward the lambda axis.  Optional markers show
the extrapolated limiting coupling (vertical dashed line) and, for
r = q, the first eigenvalue where the curve meets c = 0.

Rendering is deterministic for fixed input: fixed figure geometry, text
kept as text in SVG, a pinned hash salt, and no date metadata.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

REQUIRED_COLUMNS = ("c", "lambda", "converged")

# pinned so repeated renders of the same input are byte-identical
_DETERMINISTIC_RC = {
    "svg.hashsalt": "sps-plots",
    "svg.fonttype": "none",
    "figure.figsize": (7.0, 5.0),
    "figure.dpi": 100,
    "savefig.dpi": 100,
}


class PlotDataError(ValueError):
    """Input CSV is unusable: missing columns or no plottable rows."""


@dataclass(frozen=True)
class CurveData:
    label: str
    c: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple[str, ...]
    out: str
    c_star: float | None = None
    lambda_tilde_1: float | None = None
    lambda_1: float | None = None
    title: str | None = None
    labels: tuple[str, ...] | None = None


def load_curve_csv(path) -> CurveData:
    """Read one curve CSV, keeping converged rows sorted by c."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        header = reader.fieldnames or []
        missing = [col for col in REQUIRED_COLUMNS if col not in header]
        if missing:
            raise PlotDataError(f"{path}: missing required columns {missing}")
        rows = [(float(r["c"]), float(r["lambda"]))
                for r in reader if float(r["converged"]) == 1.0]
    if not rows:
        raise PlotDataError(f"{path}: no converged data rows to plot")
    rows.sort()
    arr = np.asarray(rows)
    return CurveData(label=path.stem, c=arr[:, 0], lam=arr[:, 1])


def plot_curve(spec: PlotSpec) -> list[str]:
    """Render the spec to <out>.png and <out>.svg; returns written paths."""
    curves = []
    labels = spec.labels or tuple(None for _ in spec.inputs)
    if spec.labels and len(spec.labels) != len(spec.inputs):
        raise PlotDataError("one label per input CSV required")
    for path, label in zip(spec.inputs, labels):
        data = load_curve_csv(path)
        if label:
            data = CurveData(label=label, c=data.c, lam=data.lam)
        curves.append(data)

    with matplotlib.rc_context(_DETERMINISTIC_RC):
        fig, ax = plt.subplots()
        for data in curves:
            ax.plot(data.lam, data.c, marker="o", markersize=3.5, label=data.label)
        ax.set_xlabel(r"$\lambda$")
        ax.set_ylabel("c")
        if spec.c_star is not None:
            ax.axhline(spec.c_star, linestyle="--", color="0.4", linewidth=1.0)
            ax.annotate(r"$c^*$", xy=(0.005, spec.c_star), xycoords=("axes fraction", "data"),
                        va="bottom", fontsize=11)
        if spec.lambda_tilde_1 is not None:
            ax.axvline(spec.lambda_tilde_1, linestyle="--", color="0.6", linewidth=1.0)
            ax.annotate(r"$\tilde{\lambda}_1$", xy=(spec.lambda_tilde_1, 0.01),
                        xycoords=("data", "axes fraction"), ha="left", fontsize=11)
        if spec.lambda_1 is not None:
            ax.plot([spec.lambda_1], [0.0], marker="|", markersize=12, color="k")
            ax.annotate(r"$\lambda_1$", xy=(spec.lambda_1, 0.03),
                        xycoords=("data", "axes fraction"), ha="center", fontsize=11)
        ax.set_ylim(bottom=0.0)
        if spec.title:
            ax.set_title(spec.title)
        if any(data.label for data in curves) and len(curves) > 1:
            ax.legend()

        out = Path(spec.out)
        stem = out.with_suffix("")
        written = []
        for suffix in (".png", ".svg"):
            target = stem.with_suffix(suffix)
            fig.savefig(target, metadata=_no_date_metadata(suffix))
            written.append(str(target))
        plt.close(fig)
    return written


def _no_date_metadata(suffix: str) -> dict:
    # PNG embeds a software tag only; SVG would embed a timestamp unless
    # the date field is cleared
    if suffix == ".svg":
        return {"Date": None}
    return {}
