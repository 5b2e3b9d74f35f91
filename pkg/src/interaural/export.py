"""CSV / SVG writers for grids and curves.

CSV layout: ``# key=value`` metadata lines, one header row, then
comma-separated values printed with 17 significant digits. Grids are
written in long form (one row per grid point, axis1 varying slowest);
undefined cells carry the ``-1`` sentinel.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .stimulus import GRID_SENTINEL, PdfGrid

__all__ = ["fmt", "write_grid_csv", "read_grid_csv", "write_columns_csv",
           "read_columns_csv", "write_grid_svg"]


def fmt(x) -> str:
    return format(float(x), ".17g")


def _meta_lines(meta: dict) -> list[str]:
    return [f"# {k}={v}" for k, v in meta.items()]


def _write(path, lines):
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_grid_csv(path, grid: PdfGrid, meta: dict | None = None) -> None:
    meta = dict(meta or {})
    meta.setdefault("undefined_sentinel", fmt(GRID_SENTINEL))
    lines = _meta_lines(meta)
    lines.append(f"{grid.axis1_name},{grid.axis2_name},density")
    for i, a in enumerate(grid.axis1):
        sa = fmt(a)
        for b, v in zip(grid.axis2, grid.values[i]):
            lines.append(f"{sa},{fmt(b)},{fmt(v)}")
    _write(path, lines)


def _read(path):
    meta, rows, header = {}, [], None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = v
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line)
    data = np.loadtxt(io.StringIO("\n".join(rows)), delimiter=",", ndmin=2)
    return meta, header, data


def read_grid_csv(path) -> PdfGrid:
    meta, header, data = _read(path)
    a1 = np.unique(data[:, 0])
    a2 = np.unique(data[:, 1])
    values = data[:, 2].reshape(a1.size, a2.size)
    return PdfGrid(header[0], header[1], a1, a2, values, meta=meta)


def write_columns_csv(path, columns: dict, meta: dict | None = None) -> None:
    """Equal-length named columns; NaN / inf are written as-is."""
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=float) for k in names]
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise ValueError("columns differ in length")
    lines = _meta_lines(meta or {})
    lines.append(",".join(names))
    for row in zip(*arrays):
        lines.append(",".join(fmt(v) for v in row))
    _write(path, lines)


def read_columns_csv(path):
    meta, header, data = _read(path)
    return meta, {name: data[:, i] for i, name in enumerate(header)}


def write_grid_svg(path, grid: PdfGrid, title: str = "") -> None:
    """Log-scaled heat map clipped to [1e-3, 1]; undefined cells left white."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import LogNorm

    vals = np.ma.masked_where(~grid.defined, np.clip(grid.values, 1e-3, 1.0))
    with matplotlib.rc_context({"svg.hashsalt": "interaural", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        mesh = ax.pcolormesh(grid.axis2, grid.axis1, vals, shading="nearest",
                             norm=LogNorm(vmin=1e-3, vmax=1.0), cmap="viridis")
        ax.set_xlabel(grid.axis2_name)
        ax.set_ylabel(grid.axis1_name)
        if title:
            ax.set_title(title)
        fig.colorbar(mesh, ax=ax, label="density")
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
