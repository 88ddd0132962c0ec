"""Figure construction: mean distance curves with one-standard-deviation bands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .reader import SweepData, load_sweep

METHOD_ORDER = ("Robust", "Procrustes", "Naive")
METHOD_COLORS = {"Robust": "#1b7837", "Procrustes": "#2166ac", "Naive": "#b2182b"}
PANEL_WIDTH, PANEL_HEIGHT, DPI = 5.0, 4.0, 100


@dataclass(frozen=True)
class PlotSpec:
    csv_paths: tuple[Path, ...]
    output_path: Path
    image_format: str = "png"  # png or svg
    band_stds: float = 1.0

    def __post_init__(self):
        if not self.csv_paths:
            raise ValueError("need at least one input CSV")
        if self.image_format not in ("png", "svg"):
            raise ValueError(f"image format must be png or svg, got {self.image_format}")
        if self.band_stds <= 0:
            raise ValueError("band width must be positive")


def _sample_std(values: list[float]) -> float:
    if len(values) < 2:
        return 0.0
    mean = sum(values) / len(values)
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (len(values) - 1))


def aggregate(sweep: SweepData) -> dict[str, tuple[list[float], list[float], list[float]]]:
    """Per method: sorted alphas with mean and sample std of dist."""
    cells: dict[tuple[str, float], list[float]] = {}
    for row in sweep.rows:
        cells.setdefault((row["method"], row["alpha"]), []).append(row["dist"])
    out = {}
    for method in sweep.methods():
        alphas = sorted(a for (m, a) in cells if m == method)
        means = [sum(cells[(method, a)]) / len(cells[(method, a)]) for a in alphas]
        stds = [_sample_std(cells[(method, a)]) for a in alphas]
        out[method] = (alphas, means, stds)
    return out


def _panel_label(path: Path) -> str:
    return path.stem


def build_figure(spec: PlotSpec) -> plt.Figure:
    sweeps = [load_sweep(p) for p in spec.csv_paths]
    n_panels = len(sweeps)
    fig, axes = plt.subplots(
        1,
        n_panels,
        figsize=(PANEL_WIDTH * n_panels, PANEL_HEIGHT),
        dpi=DPI,
        squeeze=False,
    )
    for ax, sweep in zip(axes[0], sweeps):
        stats = aggregate(sweep)
        ordered = [m for m in METHOD_ORDER if m in stats]
        ordered += [m for m in stats if m not in ordered]
        for method in ordered:
            alphas, means, stds = stats[method]
            color = METHOD_COLORS.get(method)
            ax.plot(alphas, means, marker="o", markersize=3, label=method, color=color)
            lower = [m - spec.band_stds * s for m, s in zip(means, stds)]
            upper = [m + spec.band_stds * s for m, s in zip(means, stds)]
            ax.fill_between(alphas, lower, upper, alpha=0.2, color=color, linewidth=0)
        ax.set_xlabel("corruption fraction")
        ax.set_ylabel("subspace distance")
        ax.set_ylim(0.0, 1.05)
        ax.set_title(_panel_label(sweep.path))
        ax.legend(loc="upper left")
    fig.tight_layout()
    return fig


def render_figure(spec: PlotSpec) -> Path:
    """Render and save the figure; deterministic for identical inputs."""
    plt.rcParams["svg.hashsalt"] = "plot-fig1"
    fig = build_figure(spec)
    metadata = {"Date": None} if spec.image_format == "svg" else None
    out = Path(spec.output_path)
    fig.savefig(out, format=spec.image_format, metadata=metadata)
    plt.close(fig)
    return out
