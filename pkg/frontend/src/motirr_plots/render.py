"""Render figures from the simulator's CSV outputs.

Strictly a view: the input CSV is never modified and no physics is computed
here. Two figure kinds are supported, matching the CLI's CSV contracts:

* ``efficiency`` — columns R, n, eta_closed_form, eta_brute_force; one
  log-scale curve of eta_closed_form vs n per distinct R.
* ``fringes`` — columns bin_center, count, mode plus ``# key=value``
  metadata; one histogram per mode, visibility quoted in the legend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

EFFICIENCY_COLUMNS = ("R", "n", "eta_closed_form", "eta_brute_force")
FRINGES_COLUMNS = ("bin_center", "count", "mode")


class SchemaError(ValueError):
    """The CSV does not match the declared figure kind's contract."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    figure_kind: str                  # "efficiency" | "fringes"
    output_image: str
    log_y: Optional[bool] = None      # default: True for efficiency, False for fringes
    title: str = ""
    x_label: str = ""
    y_label: str = ""

    def __post_init__(self) -> None:
        if self.figure_kind not in ("efficiency", "fringes"):
            raise SchemaError(f"unknown figure kind {self.figure_kind!r}")


@dataclass
class ParsedCsv:
    metadata: dict[str, str]
    header: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def column(self, name: str) -> list[str]:
        index = self.header.index(name)
        return [row[index] for row in self.rows]


def parse_csv(path: str) -> ParsedCsv:
    text = Path(path).read_text()
    metadata: dict[str, str] = {}
    header: Optional[list[str]] = None
    rows: list[list[str]] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                metadata[key.strip()] = value.strip()
            continue
        cells = line.split(",")
        if header is None:
            header = cells
        else:
            rows.append(cells)
    if header is None:
        raise SchemaError(f"{path}: no header row found")
    return ParsedCsv(metadata=metadata, header=header, rows=rows)


def check_schema(parsed: ParsedCsv, required: tuple[str, ...], path: str) -> None:
    for column in required:
        if column not in parsed.header:
            raise SchemaError(f"{path}: missing required column {column!r}")
    if not parsed.rows:
        raise SchemaError(f"{path}: no data rows")
    width = len(parsed.header)
    for row in parsed.rows:
        if len(row) != width:
            raise SchemaError(f"{path}: ragged row {row!r}")


def _render_efficiency(spec: FigureSpec, parsed: ParsedCsv, ax) -> list[str]:
    reflectivities = parsed.column("R")
    trips = [int(v) for v in parsed.column("n")]
    etas = [float(v) for v in parsed.column("eta_closed_form")]
    series: dict[str, tuple[list[int], list[float]]] = {}
    for r, n, eta in zip(reflectivities, trips, etas):
        xs, ys = series.setdefault(r, ([], []))
        xs.append(n)
        ys.append(eta)
    for r in sorted(series, key=float):
        xs, ys = series[r]
        ax.plot(xs, ys, label=f"R = {r}")
    if spec.log_y or spec.log_y is None:
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_label or "round trips n")
    ax.set_ylabel(spec.y_label or "efficiency")
    ax.legend()
    return sorted(series, key=float)


def _render_fringes(spec: FigureSpec, parsed: ParsedCsv, ax) -> list[str]:
    centers = [float(v) for v in parsed.column("bin_center")]
    counts = [int(v) for v in parsed.column("count")]
    modes = parsed.column("mode")
    series: dict[str, tuple[list[float], list[int]]] = {}
    for x, c, mode in zip(centers, counts, modes):
        xs, ys = series.setdefault(mode, ([], []))
        xs.append(x)
        ys.append(c)
    for mode in sorted(series):
        xs, ys = series[mode]
        label = mode
        visibility = parsed.metadata.get(f"visibility_{mode}")
        if visibility is not None:
            label = f"{mode} (V = {float(visibility):.3f})"
        ax.step(xs, ys, where="mid", label=label)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_label or "screen position [m]")
    ax.set_ylabel(spec.y_label or "atom counts")
    ax.legend()
    return sorted(series)


def render(spec: FigureSpec) -> list[str]:
    """Parse, validate, plot, and write the image.

    Returns the group keys plotted (one series each). The output file is
    only touched after the input has parsed and validated, so a failed
    render never writes or clobbers an image.
    """
    parsed = parse_csv(spec.input_csv)
    if spec.figure_kind == "efficiency":
        check_schema(parsed, EFFICIENCY_COLUMNS, spec.input_csv)
    else:
        check_schema(parsed, FRINGES_COLUMNS, spec.input_csv)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        if spec.figure_kind == "efficiency":
            keys = _render_efficiency(spec, parsed, ax)
        else:
            keys = _render_fringes(spec, parsed, ax)
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        fig.savefig(spec.output_image, dpi=150, metadata={"Software": "motirr-plots"})
    finally:
        plt.close(fig)
    return keys
