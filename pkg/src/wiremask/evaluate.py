"""Wire-mask-guided greedy evaluation: genotype -> legal placement + HPWL."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .grid import GEO_RTOL, GridSpec, Occupancy, valid_anchors
from .netlist import Netlist, exact_overlap_area, out_of_bounds_count

CONNECTED_AREA = "connected-area"
SIZE_ONLY = "size-only"
RANDOM = "random"
STRATEGIES = (CONNECTED_AREA, SIZE_ONLY, RANDOM)

# absolute tolerance on HPWL increments, relative to the canvas half-perimeter
DELTA_RTOL = 1e-9


@dataclass(frozen=True)
class MacroOrder:
    sequence: np.ndarray
    strategy: str = CONNECTED_AREA

    def __len__(self):
        return len(self.sequence)


@dataclass
class Placement:
    anchors: np.ndarray  # (k, 2) int grid indices, -1 when unplaced
    positions: np.ndarray  # (k, 2) canvas coordinates
    hpwl: float
    feasible: bool
    increments: np.ndarray = field(default_factory=lambda: np.zeros(0))  # per step, in order
    order: Optional[np.ndarray] = None
    eval_seconds: float = 0.0

    @classmethod
    def from_anchors(cls, anchors, netlist: Netlist, grid: GridSpec) -> "Placement":
        """Build a placement from grid anchors, checking legality exactly."""
        a = np.asarray(anchors, dtype=np.int64).reshape(-1, 2)
        pos = np.column_stack([grid.xs[a[:, 0]], grid.ys[a[:, 1]]])
        feasible = (exact_overlap_area(pos, netlist.macro_w, netlist.macro_h, netlist.geo_tol) == 0
                    and out_of_bounds_count(pos, netlist) == 0)
        return cls(a, pos, hpwl_full(pos, netlist) if feasible else math.inf, feasible)


def delta_tolerance(grid: GridSpec) -> float:
    return DELTA_RTOL * (grid.canvas_width + grid.canvas_height)


def order_macros(netlist: Netlist, strategy: str = CONNECTED_AREA,
                 rng: Optional[np.random.Generator] = None) -> MacroOrder:
    """Order in which macros are legalized.

    ``connected-area`` sorts by the total area of the distinct cells sharing a
    net with the macro (itself included), decreasing; ``size-only`` by the
    macro's own area. Ties go to the lower macro index.
    """
    k = netlist.num_macros
    if strategy == RANDOM:
        if rng is None:
            raise ValueError("random ordering needs an rng")
        return MacroOrder(rng.permutation(k).astype(np.int64), strategy)
    if strategy == SIZE_ONLY:
        keys = [netlist.cells[c].area for c in netlist.macro_cells]
    elif strategy == CONNECTED_AREA:
        neighbours: list[set[int]] = [{c} for c in netlist.macro_cells]
        c2m = netlist.cell_to_macro
        for net in netlist.nets:
            cells = {p.cell for p in net.pins}
            for c in cells:
                m = c2m.get(c)
                if m is not None:
                    neighbours[m] |= cells
        keys = [math.fsum(netlist.cells[c].area for c in sorted(s)) for s in neighbours]
    else:
        raise ValueError(f"unknown ordering strategy {strategy!r}")
    seq = sorted(range(k), key=lambda i: (-keys[i], i))
    return MacroOrder(np.asarray(seq, dtype=np.int64), strategy)


@dataclass
class NetBoxes:
    """Per-net bounding boxes of the pins placed so far."""

    lx: np.ndarray
    hx: np.ndarray
    ly: np.ndarray
    hy: np.ndarray
    has: np.ndarray  # uint8

    @classmethod
    def initial(cls, netlist: Netlist) -> "NetBoxes":
        has, lx, hx, ly, hy = netlist.fixed_boxes
        return cls(lx.copy(), hx.copy(), ly.copy(), hy.copy(), has.copy())

    def half_perimeter(self) -> np.ndarray:
        return np.where(self.has != 0, (self.hx - self.lx) + (self.hy - self.ly), 0.0)

    def add_macro(self, netlist: Netlist, macro: int, x: float, y: float) -> None:
        ptr, nets, axn, axx, ayn, ayx = netlist.incidence
        for t in range(ptr[macro], ptr[macro + 1]):
            n = nets[t]
            p0, p1, q0, q1 = x + axn[t], x + axx[t], y + ayn[t], y + ayx[t]
            if self.has[n]:
                self.lx[n] = min(self.lx[n], p0)
                self.hx[n] = max(self.hx[n], p1)
                self.ly[n] = min(self.ly[n], q0)
                self.hy[n] = max(self.hy[n], q1)
            else:
                self.lx[n], self.hx[n], self.ly[n], self.hy[n] = p0, p1, q0, q1
                self.has[n] = 1


@dataclass
class WireMask:
    delta: np.ndarray  # (m, m) HPWL increment per anchor
    valid: np.ndarray  # (m, m) bool

    @property
    def feasible(self) -> bool:
        return bool(self.valid.any())


def mask_axes(macro: int, boxes: NetBoxes, netlist: Netlist, grid: GridSpec):
    """Separable parts of the wire mask: ``delta[i, j] = dx[i] + dy[j]``."""
    ptr, nets, axn, axx, ayn, ayx = netlist.incidence
    s, e = ptr[macro], ptr[macro + 1]
    sel = nets[s:e]
    dx = kernels.axis_cost(boxes.lx[sel], boxes.hx[sel], boxes.has[sel], axn[s:e], axx[s:e], grid.xs)
    dy = kernels.axis_cost(boxes.ly[sel], boxes.hy[sel], boxes.has[sel], ayn[s:e], ayx[s:e], grid.ys)
    return dx, dy


def wire_mask(macro: int, boxes: NetBoxes, occ: Occupancy, grid: GridSpec,
              netlist: Netlist) -> WireMask:
    """HPWL increment of anchoring ``macro`` at every grid, with legality flags."""
    dx, dy = mask_axes(macro, boxes, netlist, grid)
    cell = netlist.cells[netlist.macro_cells[macro]]
    return WireMask(dx[:, None] + dy[None, :], valid_anchors(cell, occ, grid))


def clamp_genotype(genotype, netlist: Netlist) -> np.ndarray:
    g = np.asarray(genotype, dtype=np.float64).reshape(-1, 2)
    if len(g) != netlist.num_macros:
        raise ValueError(f"genotype has {len(g)} macros, netlist has {netlist.num_macros}")
    out = np.empty_like(g)
    np.clip(g[:, 0], 0.0, netlist.canvas_width, out=out[:, 0])
    np.clip(g[:, 1], 0.0, netlist.canvas_height, out=out[:, 1])
    return out


def evaluate(genotype, netlist: Netlist, grid: GridSpec, order: MacroOrder,
             exact: bool = False, backend=None) -> Placement:
    """Legalize ``genotype`` greedily and return the placement with its HPWL.

    Macros are visited in ``order``; each goes to the least-increment valid
    anchor nearest its genotype coordinate. Infeasible genotypes come back with
    ``feasible=False`` and ``hpwl=inf``.
    """
    t0 = time.perf_counter()
    impl = backend or kernels
    g = clamp_genotype(genotype, netlist)
    fw, fh = grid.spans(netlist.macro_w, netlist.macro_h)
    boxes = NetBoxes.initial(netlist)
    ptr, nets, axn, axx, ayn, ayx = netlist.incidence
    ai, aj, incr, placed = impl.greedy_place(
        order.sequence, np.ascontiguousarray(g[:, 0]), np.ascontiguousarray(g[:, 1]),
        netlist.macro_w, netlist.macro_h, fw, fh, grid.xs, grid.ys,
        grid.canvas_width, grid.canvas_height,
        ptr, nets, axn, axx, ayn, ayx,
        boxes.lx, boxes.hx, boxes.ly, boxes.hy, boxes.has,
        bool(exact), grid.geo_tol, delta_tolerance(grid))
    anchors = np.column_stack([ai, aj])
    k = netlist.num_macros
    feasible = placed == k
    pos = np.full((k, 2), np.nan)
    ok = ai >= 0
    pos[ok, 0] = grid.xs[ai[ok]]
    pos[ok, 1] = grid.ys[aj[ok]]
    # increments are measured from the fixed-pin boxes each net starts with
    base = float(np.sum(NetBoxes.initial(netlist).half_perimeter()))
    hpwl = base + float(np.sum(incr[:placed])) if feasible else math.inf
    return Placement(anchors, pos, hpwl, bool(feasible), incr[:placed].copy(),
                     np.asarray(order.sequence), time.perf_counter() - t0)


def hpwl_full(positions, netlist: Netlist) -> float:
    """Sum over nets of the pin bounding box half-perimeter."""
    ptr, pm, px, py = netlist.pin_arrays
    if len(pm) == 0:
        return 0.0
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    is_macro = pm >= 0
    idx = np.where(is_macro, pm, 0)
    x = np.where(is_macro, pos[idx, 0] + px, px)
    y = np.where(is_macro, pos[idx, 1] + py, py)
    starts = ptr[:-1]
    nonempty = ptr[1:] > starts
    starts = starts[nonempty]
    w = np.maximum.reduceat(x, starts) - np.minimum.reduceat(x, starts)
    h = np.maximum.reduceat(y, starts) - np.minimum.reduceat(y, starts)
    return float(np.sum(w + h))


def net_extents(positions, netlist: Netlist):
    """Per-net pin bounding boxes ``(lx, hx, ly, hy)``; NaN for pinless nets."""
    ptr, pm, px, py = netlist.pin_arrays
    n = len(netlist.nets)
    out = np.full((4, n), np.nan)
    if len(pm) == 0:
        return out
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    is_macro = pm >= 0
    idx = np.where(is_macro, pm, 0)
    x = np.where(is_macro, pos[idx, 0] + px, px)
    y = np.where(is_macro, pos[idx, 1] + py, py)
    nonempty = ptr[1:] > ptr[:-1]
    starts = ptr[:-1][nonempty]
    out[0, nonempty] = np.minimum.reduceat(x, starts)
    out[1, nonempty] = np.maximum.reduceat(x, starts)
    out[2, nonempty] = np.minimum.reduceat(y, starts)
    out[3, nonempty] = np.maximum.reduceat(y, starts)
    return out
