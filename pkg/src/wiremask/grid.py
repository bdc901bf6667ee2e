"""Canvas discretization, grid occupancy and anchor legality."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .netlist import CellRecord, Netlist

# Per-chip partition counts for the ISPD2005 chips.
PARTITIONS = {
    "adaptec1": 160,
    "adaptec2": 158,
    "adaptec3": 113,
    "adaptec4": 108,
    "bigblue1": 160,
    "bigblue3": 234,
    "bigblue4": 273,
    "ariane": 357,
}

MIN_PARTITIONS = 64
MAX_PARTITIONS = 512

# relative tolerance for geometric comparisons (scaled by the canvas size)
GEO_RTOL = 1e-9


class ContractError(RuntimeError):
    """An operation was called with a violated precondition."""


@dataclass(frozen=True)
class GridSpec:
    m: int
    canvas_width: float
    canvas_height: float
    origin_x: float = 0.0
    origin_y: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not (self.canvas_width > 0 and self.canvas_height > 0):
            raise ValueError("canvas extents must be positive")

    @classmethod
    def for_netlist(cls, netlist: Netlist, m: int) -> "GridSpec":
        return cls(int(m), netlist.canvas_width, netlist.canvas_height,
                   netlist.origin_x, netlist.origin_y)

    @property
    def cell_w(self) -> float:
        return self.canvas_width / self.m

    @property
    def cell_h(self) -> float:
        return self.canvas_height / self.m

    @cached_property
    def xs(self) -> np.ndarray:
        # via the absolute frame so that relative + origin round-trips exactly
        a = self.origin_x + np.arange(self.m) * self.cell_w
        return a - self.origin_x

    @cached_property
    def ys(self) -> np.ndarray:
        a = self.origin_y + np.arange(self.m) * self.cell_h
        return a - self.origin_y

    @property
    def geo_tol(self) -> float:
        return GEO_RTOL * max(self.canvas_width, self.canvas_height)

    def span(self, w: float, h: float) -> tuple[int, int]:
        """Number of grid columns and rows covered by a ``w x h`` macro."""
        fw = max(1, math.ceil(w / self.cell_w - GEO_RTOL))
        fh = max(1, math.ceil(h / self.cell_h - GEO_RTOL))
        return fw, fh

    def spans(self, w: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        fw = np.maximum(1, np.ceil(np.asarray(w) / self.cell_w - GEO_RTOL)).astype(np.int64)
        fh = np.maximum(1, np.ceil(np.asarray(h) / self.cell_h - GEO_RTOL)).astype(np.int64)
        return fw, fh


def default_partitions(netlist: Netlist, use_table: bool = True) -> int:
    """Pick the number of partitions per axis.

    Known ISPD2005 chips use the table above. Otherwise a grid cell is
    sized to the median macro's larger side, clamped to [64, 512].
    """
    if use_table and netlist.name in PARTITIONS:
        return PARTITIONS[netlist.name]
    if netlist.num_macros == 0:
        raise ValueError("netlist has no macros")
    side = float(np.median(np.maximum(netlist.macro_w, netlist.macro_h)))
    m = round(max(netlist.canvas_width, netlist.canvas_height) / side)
    return int(min(max(m, MIN_PARTITIONS), MAX_PARTITIONS))


def footprint(macro: CellRecord, grid: GridSpec, anchor: tuple[int, int]) -> tuple[range, range]:
    """Conservative set of grid cells covered by ``macro`` anchored at ``anchor``."""
    i, j = anchor
    fw, fh = grid.span(macro.width, macro.height)
    return range(i, i + fw), range(j, j + fh)


@dataclass
class Occupancy:
    """Bitmap of occupied grid cells plus the exact rectangles placed so far.

    With ``exact=True`` legality is judged against the exact rectangles
    instead of the conservative grid footprints.
    """

    grid: GridSpec
    exact: bool = False
    bitmap: np.ndarray = None
    placed: list = field(default_factory=list)  # (macro_id, (x0, y0, x1, y1))

    def __post_init__(self):
        if self.bitmap is None:
            self.bitmap = np.zeros((self.grid.m, self.grid.m), dtype=np.uint8)

    def copy(self) -> "Occupancy":
        return Occupancy(self.grid, self.exact, self.bitmap.copy(), list(self.placed))

    def _rect_arrays(self):
        if not self.placed:
            z = np.zeros(0)
            return z, z, z, z
        r = np.asarray([p[1] for p in self.placed], dtype=np.float64)
        return r[:, 0].copy(), r[:, 1].copy(), r[:, 2].copy(), r[:, 3].copy()


def valid_anchors(macro: CellRecord, occ: Occupancy, grid: GridSpec) -> np.ndarray:
    """Boolean ``m x m`` field (indexed ``[i, j]``) of anchors legal for ``macro``."""
    fw, fh = grid.span(macro.width, macro.height)
    if occ.exact:
        x0, y0, x1, y1 = occ._rect_arrays()
        field_ = kernels.exact_free_field(grid.xs, grid.ys, macro.width, macro.height,
                                          x0, y0, x1, y1, grid.geo_tol)
    else:
        field_ = kernels.free_field(occ.bitmap, fw, fh)
    inb_x = grid.xs + macro.width <= grid.canvas_width + grid.geo_tol
    inb_y = grid.ys + macro.height <= grid.canvas_height + grid.geo_tol
    return field_.astype(bool) & inb_x[:, None] & inb_y[None, :]


def commit(macro: CellRecord, occ: Occupancy, grid: GridSpec, anchor: tuple[int, int],
           macro_id=None) -> Occupancy:
    """Mark ``macro`` as placed at ``anchor`` (in place; the occupancy is returned)."""
    i, j = int(anchor[0]), int(anchor[1])
    if not (0 <= i < grid.m and 0 <= j < grid.m) or not valid_anchors(macro, occ, grid)[i, j]:
        raise ContractError(f"anchor {(i, j)} is not valid for macro {macro.name!r}")
    fw, fh = grid.span(macro.width, macro.height)
    occ.bitmap[i:i + fw, j:j + fh] = 1
    x, y = grid.xs[i], grid.ys[j]
    occ.placed.append((macro.name if macro_id is None else macro_id,
                       (x, y, x + macro.width, y + macro.height)))
    return occ
