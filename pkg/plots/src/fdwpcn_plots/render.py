"""Render fdwpcn CSV output as figures.

Two figure kinds, matching the two CSV schemas the simulator emits:

- ``sweep``: x = the swept variable (first column), mean lines with
  standard-error bands for the practical and/or genie series.
- ``region``: rate-pair boundary curves, one per residual-SI level
  (rows grouped by the ``alpha`` column).

Rendering is deliberately deterministic: fixed style, fixed dpi, no
timestamps or version strings in the output, so the same CSV and spec
always produce identical bytes.  This package reads only CSV; it never
recomputes model quantities.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

SWEEP_SERIES_COLUMNS = {
    "practical": ("mean_practical", "se_practical"),
    "genie": ("mean_genie", "se_genie"),
}
REGION_COLUMNS = ("omega_1", "omega_2", "rate_1", "rate_2", "alpha")

SERIES_COLORS = {"practical": "#0173b2", "genie": "#de8f05"}

_FIGSIZE = (6.4, 4.2)
_DPI = 120


class SchemaError(ValueError):
    """CSV columns do not match the requested figure kind."""


@dataclass(frozen=True)
class FigureSpec:
    """What to render and where to put it."""

    csv_paths: tuple[str, ...]
    kind: str  # "sweep" | "region"
    out_path: str
    series: str = "both"  # "practical" | "genie" | "both" (sweep only)
    x_label: str | None = None
    y_label: str = "sum-throughput (bits/s/Hz)"
    x_scale: str = "linear"  # "linear" | "log"
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("sweep", "region"):
            raise SchemaError(f"kind={self.kind!r} must be 'sweep' or 'region'")
        if self.series not in ("practical", "genie", "both"):
            raise SchemaError(
                f"series={self.series!r} must be 'practical', 'genie' or 'both'"
            )
        if self.x_scale not in ("linear", "log"):
            raise SchemaError(f"x_scale={self.x_scale!r} must be linear or log")
        if not self.csv_paths:
            raise SchemaError("at least one CSV path required")


@dataclass
class Table:
    """One parsed CSV: column name -> float array."""

    path: str
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def __len__(self) -> int:
        if not self.columns:
            return 0
        return len(next(iter(self.columns.values())))


def read_table(path: str) -> Table:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file, no header row")
    header, data = rows[0], rows[1:]
    if not data:
        raise SchemaError(f"{path}: no data rows")
    try:
        values = np.array([[float(cell) for cell in row] for row in data])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric cell ({exc})") from None
    if values.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows")
    return Table(path=path,
                 columns={name: values[:, i] for i, name in enumerate(header)})


def _require(table: Table, needed: tuple[str, ...]) -> None:
    missing = [c for c in needed if c not in table.columns]
    if missing:
        raise SchemaError(
            f"{table.path}: expected columns {list(needed)}, found "
            f"{table.names} (missing {missing})"
        )


def _sweep_series(spec: FigureSpec) -> list[str]:
    if spec.series == "both":
        return ["practical", "genie"]
    return [spec.series]


def _draw_sweep(ax, spec: FigureSpec) -> str:
    x_name = None
    many = len(spec.csv_paths) > 1
    for path in spec.csv_paths:
        table = read_table(path)
        if not table.names:
            raise SchemaError(f"{path}: no columns")
        x_col = table.names[0]
        needed = tuple(c for s in _sweep_series(spec)
                       for c in SWEEP_SERIES_COLUMNS[s])
        _require(table, needed)
        x_name = x_name or x_col
        x = table.columns[x_col]
        stem = path.rsplit("/", 1)[-1].rsplit(".", 1)[0]
        for s in _sweep_series(spec):
            mean_col, se_col = SWEEP_SERIES_COLUMNS[s]
            mean = table.columns[mean_col]
            se = table.columns[se_col]
            label = f"{stem}: {s}" if many else s
            color = None if many else SERIES_COLORS[s]
            line, = ax.plot(x, mean, label=label, color=color)
            ax.fill_between(x, mean - se, mean + se,
                            color=line.get_color(), alpha=0.25, linewidth=0)
    return x_name or "x"


def _draw_region(ax, spec: FigureSpec) -> str:
    drew = False
    for path in spec.csv_paths:
        table = read_table(path)
        _require(table, REGION_COLUMNS)
        alphas = table.columns["alpha"]
        for alpha in sorted(set(alphas.tolist()), reverse=True):
            mask = alphas == alpha
            ax.plot(table.columns["rate_1"][mask],
                    table.columns["rate_2"][mask],
                    label=f"alpha = {alpha:g}")
            drew = True
    if not drew:
        raise SchemaError("region CSV contained no curves")
    return "rate of device 1 (bits/s/Hz)"


def build_figure(spec: FigureSpec):
    """Assemble the matplotlib figure for a spec (no file output)."""
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    try:
        if spec.kind == "sweep":
            default_x = _draw_sweep(ax, spec)
            default_y = spec.y_label
        else:
            default_x = _draw_region(ax, spec)
            default_y = "rate of device 2 (bits/s/Hz)"
        ax.set_xlabel(spec.x_label or default_x)
        ax.set_ylabel(default_y)
        ax.set_xscale(spec.x_scale)
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, alpha=0.3)
        ax.legend()
    except Exception:
        plt.close(fig)
        raise
    return fig


def render(spec: FigureSpec) -> None:
    """Render a spec to its output path.

    The figure is fully built before the file is opened, so a schema
    error never leaves a partial image behind.
    """
    fig = build_figure(spec)
    try:
        fig.savefig(spec.out_path, format="png",
                    metadata={"Software": None})
    finally:
        plt.close(fig)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdwpcn-render",
        description="Render fdwpcn sweep/region CSV files as figures",
    )
    parser.add_argument("--csv", action="append", required=True,
                        metavar="PATH", help="input CSV; repeatable")
    parser.add_argument("--kind", choices=("sweep", "region"), required=True)
    parser.add_argument("--out", required=True, metavar="PATH")
    parser.add_argument("--series", choices=("practical", "genie", "both"),
                        default="both")
    parser.add_argument("--x-label", default=None)
    parser.add_argument("--x-scale", choices=("linear", "log"),
                        default="linear")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = FigureSpec(
        csv_paths=tuple(args.csv),
        kind=args.kind,
        out_path=args.out,
        series=args.series,
        x_label=args.x_label,
        x_scale=args.x_scale,
        title=args.title,
    )
    try:
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
