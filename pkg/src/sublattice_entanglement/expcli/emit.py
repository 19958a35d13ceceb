"""Writers for result tables: CSV, JSON and a bare-bones SVG plot."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .runner import ResultTable


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def to_json(table: ResultTable) -> str:
    doc = {
        "schema": [{"name": n, "unit": u} for n, u in table.schema],
        "rows": [[_plain(v) for v in row] for row in table.rows],
        "provenance": table.provenance,
    }
    return json.dumps(doc, indent=2) + "\n"


def _plot_columns(table: ResultTable) -> tuple[int, int]:
    return (1, 2) if table.columns[0] in ("index", "case") else (0, 1)


def to_svg(table: ResultTable, kind: str, width: int = 640, height: int = 400) -> str:
    """Scatter (for eigenstate spectra) or polyline of the two leading data columns."""
    ix, iy = _plot_columns(table)
    x = np.array([float(r[ix]) for r in table.rows])
    y = np.array([float(r[iy]) for r in table.rows])
    pad = 50
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    xname, yname = table.columns[ix], table.columns[iy]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="13">{xname}</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {height / 2:.1f})">{yname}</text>',
    ]
    for v, anchor in ((x0, "start"), (x1, "end")):
        parts.append(f'<text x="{px(v):.1f}" y="{height - pad + 16}" text-anchor="{anchor}" font-size="11">{v:.4g}</text>')
    for v in (y0, y1):
        parts.append(f'<text x="{pad - 4}" y="{py(v) + 4:.1f}" text-anchor="end" font-size="11">{v:.4g}</text>')
    if kind == "spectrum_scatter":
        parts += [f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2" fill="steelblue"/>' for a, b in zip(x, y)]
    else:
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
        parts += [f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.5" fill="steelblue"/>' for a, b in zip(x, y)]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def default_out_path(cfg: ExperimentConfig) -> str:
    return f"{cfg.kind}.{cfg.format}"


def emit(table: ResultTable, cfg: ExperimentConfig) -> list[Path]:
    """Write the data file (and optional SVG next to it); return the paths written."""
    path = Path(cfg.out_path or default_out_path(cfg))
    text = to_csv(table) if cfg.format == "csv" else to_json(table)
    written = []
    try:
        if path.parent and not path.parent.exists():
            raise OSError(f"directory {path.parent} does not exist")
        # newline="" keeps the CRLF row terminators of the CSV intact
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(path)
        if cfg.plot:
            svg = path.with_suffix(".svg")
            with open(svg, "w", encoding="utf-8", newline="") as fh:
                fh.write(to_svg(table, cfg.kind))
            written.append(svg)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return written
