"""Deterministic SVG rendering of macro layouts."""

from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import quoteattr

import numpy as np

from .grid import GridSpec
from .netlist import Netlist

MACRO_FILL = "#f5d742"
FRAME_STROKE = "#202020"
GRID_STROKE = "#c8c8c8"


def _n(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def render_svg(positions, netlist: Netlist, grid: Optional[GridSpec] = None,
               size: float = 800.0, title: Optional[str] = None) -> str:
    """Canvas frame, optional grid lines, and one rectangle per macro.

    SVG's y axis points down, so canvas y is flipped.
    """
    W, H = netlist.canvas_width, netlist.canvas_height
    s = size / max(W, H)
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(W * s)}" height="{_n(H * s)}" '
        f'viewBox="0 0 {_n(W * s)} {_n(H * s)}">',
    ]
    if title:
        out.append(f"<title>{title.replace('&', '&amp;').replace('<', '&lt;')}</title>")
    out.append(f'<rect class="canvas" x="0" y="0" width="{_n(W * s)}" height="{_n(H * s)}" '
               f'fill="white" stroke="{FRAME_STROKE}" stroke-width="1"/>')
    if grid is not None:
        d = []
        for x in grid.xs[1:]:
            d.append(f"M{_n(x * s)} 0V{_n(H * s)}")
        for y in grid.ys[1:]:
            d.append(f"M0 {_n((H - y) * s)}H{_n(W * s)}")
        out.append(f'<path class="grid" d="{"".join(d)}" stroke="{GRID_STROKE}" '
                   f'stroke-width="0.5" fill="none"/>')
    names = netlist.macro_ids
    for i, (x, y) in enumerate(pos):
        w, h = netlist.macro_w[i], netlist.macro_h[i]
        out.append(f'<rect class="macro" id={quoteattr(names[i])} x="{_n(x * s)}" '
                   f'y="{_n((H - y - h) * s)}" width="{_n(w * s)}" height="{_n(h * s)}" '
                   f'fill="{MACRO_FILL}" stroke="{FRAME_STROKE}" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path: str, positions, netlist: Netlist, grid: Optional[GridSpec] = None,
              **kwargs) -> None:
    with open(path, "w") as fh:
        fh.write(render_svg(positions, netlist, grid, **kwargs))
