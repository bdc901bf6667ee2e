"""Post-hoc placement metrics: HPWL and RUDY congestion."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .evaluate import Placement, hpwl_full, net_extents
from .grid import GridSpec
from .netlist import Netlist, exact_overlap_area, out_of_bounds_count

COVERED = "covered"
AREA_WEIGHTED = "area-weighted"
TOP_FRACTION = 0.1


@dataclass
class CongestionMap:
    values: np.ndarray  # (m, m), indexed [i, j]
    rudy: float
    grid: GridSpec


@dataclass
class MetricRecord:
    hpwl: float
    rudy: float
    overlap_area: float
    oob_count: int
    eval_seconds: float

    def to_json(self) -> str:
        d = asdict(self)
        for key, v in d.items():
            if isinstance(v, float) and not math.isfinite(v):
                d[key] = None
        return json.dumps(d, sort_keys=True)


def top_mean(values: np.ndarray, fraction: float = TOP_FRACTION) -> float:
    flat = np.sort(values, axis=None)
    n = math.ceil(fraction * flat.size)
    return float(flat[-n:].mean()) if n else 0.0


def _overlaps(lo: float, hi: float, edges: np.ndarray) -> np.ndarray:
    """Length of ``[lo, hi]`` inside each grid interval ``[edges[i], edges[i+1]]``."""
    return np.clip(np.minimum(hi, edges[1:]) - np.maximum(lo, edges[:-1]), 0.0, None)


def congestion(placement: Placement, netlist: Netlist, grid: GridSpec,
               mode: str = COVERED) -> CongestionMap:
    """RUDY map of a feasible placement.

    Each net spreads ``(w + h) / (w * h)`` over its pin bounding box. In
    ``covered`` mode every grid cell meeting the box with positive area gets
    the full amount; in ``area-weighted`` mode it is scaled by the covered
    fraction of the cell. A zero width or height is widened to one grid cell,
    centred on the pins, so the impact stays finite.
    """
    if not placement.feasible:
        raise ValueError("congestion is only defined for feasible placements")
    if mode not in (COVERED, AREA_WEIGHTED):
        raise ValueError(f"unknown congestion mode {mode!r}")
    m = grid.m
    ex = np.append(grid.xs, grid.canvas_width)
    ey = np.append(grid.ys, grid.canvas_height)
    cell_area = grid.cell_w * grid.cell_h
    values = np.zeros((m, m))
    lx, hx, ly, hy = net_extents(placement.positions, netlist)
    for j in range(len(netlist.nets)):
        if math.isnan(lx[j]):
            continue
        x0, x1, y0, y1 = lx[j], hx[j], ly[j], hy[j]
        w, h = x1 - x0, y1 - y0
        if w <= 0:
            c = 0.5 * (x0 + x1)
            x0, x1, w = c - grid.cell_w / 2, c + grid.cell_w / 2, grid.cell_w
        if h <= 0:
            c = 0.5 * (y0 + y1)
            y0, y1, h = c - grid.cell_h / 2, c + grid.cell_h / 2, grid.cell_h
        impact = (w + h) / (w * h)
        ox = _overlaps(x0, x1, ex)
        oy = _overlaps(y0, y1, ey)
        (ii,) = np.nonzero(ox > 0)
        (jj,) = np.nonzero(oy > 0)
        if len(ii) == 0 or len(jj) == 0:
            continue
        si = slice(ii[0], ii[-1] + 1)
        sj = slice(jj[0], jj[-1] + 1)
        if mode == COVERED:
            values[si, sj] += impact
        else:
            values[si, sj] += (impact / cell_area) * np.outer(ox[si], oy[sj])
    return CongestionMap(values, top_mean(values), grid)


def report(placement: Placement, netlist: Netlist, grid: GridSpec,
           mode: str = COVERED) -> MetricRecord:
    pos = placement.positions
    if not placement.feasible:
        return MetricRecord(math.inf, math.inf, math.nan, -1, placement.eval_seconds)
    cmap = congestion(placement, netlist, grid, mode)
    return MetricRecord(
        hpwl=hpwl_full(pos, netlist),
        rudy=cmap.rudy,
        overlap_area=exact_overlap_area(pos, netlist.macro_w, netlist.macro_h, netlist.geo_tol),
        oob_count=out_of_bounds_count(pos, netlist),
        eval_seconds=placement.eval_seconds,
    )

