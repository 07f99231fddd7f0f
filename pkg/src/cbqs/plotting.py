"""Figure rendering for benchmark CSVs.

Pure view layer: every number comes from a CSV produced by the bench module;
the only transforms applied here are axis scales.  Rendering is deterministic
(fixed style, hashed SVG ids, no embedded dates) so identical inputs yield
identical image bytes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import (
    SUMMARY_COLUMNS,
    SchemaError,
    read_curves_csv,
    read_trajectory_csv,
)

FIGURE_KINDS = ("trajectory", "curves", "sweep")

_STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "cbqs",
}


class PlotDataError(ValueError):
    """Raised when inputs are empty or do not match the expected schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    x_field: str = "auto"
    logx: bool = False
    logy: bool = False

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise PlotDataError(f"figure kind must be one of {FIGURE_KINDS}")
        if not self.inputs:
            raise PlotDataError("at least one input CSV required")


def render(spec: FigureSpec) -> str:
    """Render the figure described by the spec; returns the output path.

    Validates all inputs before any file is written so a failed render never
    leaves a partial image behind.
    """
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            if spec.kind == "trajectory":
                _plot_trajectories(ax, spec)
            elif spec.kind == "curves":
                _plot_curves(ax, spec)
            else:
                _plot_sweep(ax, spec)
            if spec.logx:
                ax.set_xscale("log")
            if spec.logy:
                ax.set_yscale("log")
            ax.legend(fontsize=7)
            fig.tight_layout()
            _save(fig, spec.output)
        finally:
            plt.close(fig)
    return spec.output


def _save(fig, output: str) -> None:
    ext = os.path.splitext(output)[1].lower()
    metadata = {"Date": None} if ext == ".svg" else None
    fig.savefig(output, metadata=metadata)


def _series_x(rows, x_field: str):
    """Pick the x values; 'auto' uses modeled seconds when present, else wall."""
    if x_field == "auto":
        field_name = (
            "modeled_seconds" if any(r.modeled_seconds > 0 for r in rows) else "wall_seconds"
        )
    else:
        field_name = x_field
    return [getattr(r, field_name) for r in rows], field_name


def _plot_trajectories(ax, spec: FigureSpec) -> None:
    groups: dict = {}
    for path in spec.inputs:
        for row in read_trajectory_csv(path):
            groups.setdefault((row.instance_id, row.algorithm, row.seed), []).append(row)
    if not groups:
        raise PlotDataError("no trajectory rows in input")
    x_names = set()
    for (inst_id, algorithm, seed), rows in sorted(groups.items()):
        xs, x_name = _series_x(rows, spec.x_field)
        x_names.add(x_name)
        ys = [r.incumbent_value for r in rows]
        ax.step(xs, ys, where="post", label=f"{algorithm} {inst_id[:6]} s{seed}")
    ax.set_xlabel(" / ".join(sorted(x_names)))
    ax.set_ylabel("incumbent value")


def _plot_curves(ax, spec: FigureSpec) -> None:
    rows = []
    for path in spec.inputs:
        rows.extend(read_curves_csv(path))
    if not rows:
        raise PlotDataError("no curve rows in input")
    by_p: dict = {}
    for p, T, classical, aa, mc in rows:
        by_p.setdefault(p, []).append((T, classical, aa, mc))
    for p, entries in sorted(by_p.items()):
        entries.sort()
        Ts = [e[0] for e in entries]
        ax.plot(Ts, [e[1] for e in entries], label=f"classical p={p:g}")
        ax.plot(Ts, [e[2] for e in entries], linestyle="--", label=f"protocol p={p:g}")
        if any(e[3] >= 0 for e in entries):
            ax.plot(
                Ts,
                [e[3] for e in entries],
                linestyle=":",
                marker=".",
                label=f"monte carlo p={p:g}",
            )
    ax.set_xscale("log")
    ax.set_xlabel("iteration maximum T")
    ax.set_ylabel("success probability")


def _plot_sweep(ax, spec: FigureSpec) -> None:
    import csv as _csv

    rows = []
    for path in spec.inputs:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = _csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file") from None
            if tuple(header) != SUMMARY_COLUMNS:
                raise SchemaError(
                    f"{path}: header {header!r} does not match {list(SUMMARY_COLUMNS)}"
                )
            for rec in reader:
                if len(rec) != len(SUMMARY_COLUMNS):
                    raise SchemaError(f"{path}: malformed summary row {rec!r}")
                rows.append(rec)
    if not rows:
        raise PlotDataError("no sweep summary rows in input")
    # one line per (ordering, f): cycles to best vs look-ahead depth
    series: dict = {}
    for rec in rows:
        f_val, depth, ordering = rec[2], int(rec[3]), rec[4]
        series.setdefault((ordering, f_val), []).append((depth, float(rec[8])))
    for (ordering, f_val), pts in sorted(series.items()):
        pts.sort()
        ax.plot(
            [d for d, _ in pts],
            [c for _, c in pts],
            marker="o",
            label=f"{ordering} f={f_val}",
        )
    ax.set_xlabel("look-ahead depth")
    ax.set_ylabel("cycles to best incumbent")
