"""CSV-to-image rendering for the standard figure ids.

Usage as a script:

    figrender <figure-id> <input.csv> <output.png> [--xscale ...] [--yscale ...]

Each figure id fixes which variables sit on which axis and the default
axis scales; the CSV supplies all values and series labels.
"""

from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

from matplotlib.figure import Figure

__all__ = ["FigureSpec", "SchemaError", "load_figure_csv", "render", "main"]

REQUIRED_COLUMNS = ("x", "y", "series")

# figure id -> (x label, y label, xscale, yscale)
FIGURE_AXES = {
    "fig3": ("t", "epsilon", "log", "log"),
    "fig4": ("t", "epsilon", "log", "log"),
    "fig5": ("epsilon0", "epsilon", "linear", "linear"),
    "fig7": ("epsilon0", "epsilon", "linear", "log"),
    "fig8": ("central_epsilon", "squared_error", "linear", "log"),
}


class SchemaError(ValueError):
    """The CSV does not match the versioned schema for the figure id."""


@dataclass(frozen=True)
class FigureSpec:
    """What to render: input CSV, figure id, output path, axis scales."""

    csv_path: str | Path
    figure_id: str
    output_path: str | Path
    xscale: str | None = None
    yscale: str | None = None

    def __post_init__(self):
        if self.figure_id not in FIGURE_AXES:
            raise ValueError(f"unknown figure id {self.figure_id!r}")


def load_figure_csv(path, figure_id: str):
    """Parse and validate a figure CSV; returns (metadata, series dict).

    The series dict maps each series label to parallel (x, y) float lists,
    in file order.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"figure CSV not found: {path}")
    metadata = {}
    data_lines = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                metadata[key] = value
            elif line:
                data_lines.append(line)
    expected_schema = f"figure-{figure_id}.v1"
    if metadata.get("schema") != expected_schema:
        raise SchemaError(
            f"schema mismatch: expected {expected_schema}, got {metadata.get('schema')!r}"
        )
    rows = list(csv.reader(data_lines))
    if not rows:
        raise SchemaError("CSV has no header row")
    header = rows[0]
    for column in REQUIRED_COLUMNS:
        if column not in header:
            raise SchemaError(f"missing column {column!r}")
    if len(rows) == 1:
        raise SchemaError("CSV has no data rows")
    ix, iy, iseries = (header.index(c) for c in REQUIRED_COLUMNS)
    series: dict[str, tuple[list, list]] = {}
    for row in rows[1:]:
        xs, ys = series.setdefault(row[iseries], ([], []))
        xs.append(float(row[ix]))
        ys.append(float(row[iy]))
    return metadata, series


def render(spec: FigureSpec) -> Figure:
    """Render one figure CSV to ``spec.output_path`` and return the Figure.

    Values are plotted verbatim, one line per series, labeled from the
    series column. Deterministic given the inputs.
    """
    _, series = load_figure_csv(spec.csv_path, spec.figure_id)
    xlabel, ylabel, default_xscale, default_yscale = FIGURE_AXES[spec.figure_id]

    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.subplots()
    for label in sorted(series):
        xs, ys = series[label]
        style = "--" if label.startswith("single") or "gamma=10" in label else "-"
        ax.plot(xs, ys, style, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_xscale(spec.xscale or default_xscale)
    ax.set_yscale(spec.yscale or default_yscale)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.savefig(spec.output_path, dpi=150, metadata={"Software": "figrender"})
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="figrender", description=__doc__)
    parser.add_argument("figure_id", choices=sorted(FIGURE_AXES))
    parser.add_argument("csv_path")
    parser.add_argument("output_path")
    parser.add_argument("--xscale", choices=("linear", "log"), default=None)
    parser.add_argument("--yscale", choices=("linear", "log"), default=None)
    args = parser.parse_args(argv)
    spec = FigureSpec(
        csv_path=args.csv_path,
        figure_id=args.figure_id,
        output_path=args.output_path,
        xscale=args.xscale,
        yscale=args.yscale,
    )
    try:
        render(spec)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}")
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
