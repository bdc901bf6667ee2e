"""Post local search: best-improvement single-macro relocation passes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .evaluate import (MacroOrder, Placement, clamp_genotype, delta_tolerance, evaluate,
                       hpwl_full)
from .grid import GridSpec
from .netlist import Netlist


@dataclass
class LocalSearchConfig:
    order: MacroOrder
    rng: np.random.Generator
    passes: int = 2

    def __post_init__(self):
        if self.passes < 1:
            raise ValueError("passes must be >= 1")


@dataclass
class Move:
    macro: int
    before: np.ndarray  # anchors of every macro just before the move
    old: tuple
    new: tuple
    hpwl_before: float
    hpwl_after: float


def _others_boxes(macro, anchors, grid, netlist):
    """Bounding boxes of each of ``macro``'s nets without ``macro``'s own pins."""
    ptr, pm, px, py = netlist.pin_arrays
    iptr, inets = netlist.incidence[:2]
    sel = inets[iptr[macro]:iptr[macro + 1]]
    n = len(sel)
    lx, hx, ly, hy = np.zeros(n), np.zeros(n), np.zeros(n), np.zeros(n)
    has = np.zeros(n, dtype=np.uint8)
    for t, j in enumerate(sel):
        s, e = ptr[j], ptr[j + 1]
        owner = pm[s:e]
        keep = owner != macro
        if not keep.any():
            continue
        owner = owner[keep]
        fixed = owner < 0
        idx = np.where(fixed, 0, owner)
        x = np.where(fixed, px[s:e][keep], grid.xs[anchors[idx, 0]] + px[s:e][keep])
        y = np.where(fixed, py[s:e][keep], grid.ys[anchors[idx, 1]] + py[s:e][keep])
        lx[t], hx[t], ly[t], hy[t] = x.min(), x.max(), y.min(), y.max()
        has[t] = 1
    return lx, hx, ly, hy, has


def local_search(placement: Placement, netlist: Netlist, grid: GridSpec,
                 config: LocalSearchConfig, exact: bool = False,
                 trace: Optional[list] = None) -> Placement:
    """Relocate macros one at a time to the anchor that lowers HPWL most.

    Every other macro stays fixed while one is moved; the moving macro's own
    footprint is vacated first. A move needs a strict improvement, and equal
    best anchors are chosen uniformly with ``config.rng``.
    """
    if not placement.feasible:
        raise ValueError("local search needs a feasible placement")
    anchors = np.array(placement.anchors, dtype=np.int64).reshape(-1, 2)
    k = len(anchors)
    fw, fh = grid.spans(netlist.macro_w, netlist.macro_h)
    bitmap = np.zeros((grid.m, grid.m), dtype=np.uint8)
    for v in range(k):
        i, j = anchors[v]
        bitmap[i:i + fw[v], j:j + fh[v]] = 1
    iptr, _, axn, axx, ayn, ayx = netlist.incidence
    tol = delta_tolerance(grid)
    hpwl = hpwl_full(np.column_stack([grid.xs[anchors[:, 0]], grid.ys[anchors[:, 1]]]), netlist)

    for _ in range(config.passes):
        for v in config.order.sequence:
            v = int(v)
            i0, j0 = anchors[v]
            w, h = netlist.macro_w[v], netlist.macro_h[v]
            if exact:
                others = np.delete(np.arange(k), v)
                x0 = grid.xs[anchors[others, 0]]
                y0 = grid.ys[anchors[others, 1]]
                free = kernels.exact_free_field(grid.xs, grid.ys, w, h, x0, y0,
                                                x0 + netlist.macro_w[others],
                                                y0 + netlist.macro_h[others], grid.geo_tol)
            else:
                bitmap[i0:i0 + fw[v], j0:j0 + fh[v]] = 0
                free = kernels.free_field(bitmap, fw[v], fh[v])
            valid = ((free != 0) & (grid.xs + w <= grid.canvas_width + grid.geo_tol)[:, None]
                     & (grid.ys + h <= grid.canvas_height + grid.geo_tol)[None, :])

            lx, hx, ly, hy, has = _others_boxes(v, anchors, grid, netlist)
            s, e = iptr[v], iptr[v + 1]
            dx = kernels.axis_cost(lx, hx, has, axn[s:e], axx[s:e], grid.xs)
            dy = kernels.axis_cost(ly, hy, has, ayn[s:e], ayx[s:e], grid.ys)
            delta = dx[:, None] + dy[None, :]
            current = delta[i0, j0]
            best = np.min(delta[valid])
            if best < current - tol:
                # column-major over (j, i) to match the scan order elsewhere
                cand = np.argwhere((valid & (delta <= best + tol)).T)
                j1, i1 = cand[config.rng.integers(len(cand))]
                if trace is not None:
                    before = anchors.copy()
                anchors[v] = (i1, j1)
                new_hpwl = hpwl + (delta[i1, j1] - current)
                if trace is not None:
                    trace.append(Move(v, before, (int(i0), int(j0)), (int(i1), int(j1)),
                                      hpwl, new_hpwl))
                hpwl = new_hpwl
            if not exact:
                i, j = anchors[v]
                bitmap[i:i + fw[v], j:j + fh[v]] = 1

    out = Placement.from_anchors(anchors, netlist, grid)
    out.order = np.asarray(config.order.sequence)
    return out


def snap_placement(genotype, netlist: Netlist, grid: GridSpec, order: MacroOrder,
                   exact: bool = False) -> Placement:
    """Round each macro to its nearest grid anchor, keeping the result if legal.

    If rounding creates an overlap (or, without ``exact``, two grid footprints
    share a cell) the genotype is legalized greedily instead.
    """
    g = clamp_genotype(genotype, netlist)
    m = grid.m
    ai = np.clip(np.rint(g[:, 0] / grid.cell_w), 0, m - 1).astype(np.int64)
    aj = np.clip(np.rint(g[:, 1] / grid.cell_h), 0, m - 1).astype(np.int64)
    snapped = Placement.from_anchors(np.column_stack([ai, aj]), netlist, grid)
    if snapped.feasible and not exact:
        fw, fh = grid.spans(netlist.macro_w, netlist.macro_h)
        count = np.zeros((m, m), dtype=np.int64)
        for v in range(len(ai)):
            count[ai[v]:ai[v] + fw[v], aj[v]:aj[v] + fh[v]] += 1
        if count.max(initial=0) > 1:
            snapped.feasible = False
    if snapped.feasible:
        snapped.order = np.asarray(order.sequence)
        return snapped
    return evaluate(genotype, netlist, grid, order, exact=exact)
