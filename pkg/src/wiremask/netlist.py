"""Bookshelf (ISPD2005-style) netlist model and placement file I/O.

All coordinates inside a :class:`Netlist` are canvas-relative: the canvas is
``[0, canvas_width] x [0, canvas_height]`` and the Bookshelf origin is kept in
``origin_x``/``origin_y`` so that ``.pl`` files round-trip in absolute units.
Pin offsets are stored relative to the bottom-left corner of their cell.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

MACRO = "macro"
STANDARD = "standard"
FIXED_TERMINAL = "fixed-terminal"


class BookshelfError(ValueError):
    """Malformed or inconsistent Bookshelf input."""

    def __init__(self, message: str, path: Optional[str] = None, lineno: Optional[int] = None,
                 token: Optional[str] = None):
        where = ""
        if path is not None:
            where = f"{path}:{lineno}" if lineno is not None else str(path)
            where += ": "
        if token is not None:
            message = f"{message} (token {token!r})"
        super().__init__(where + message)
        self.path = path
        self.lineno = lineno
        self.token = token


class PlacementError(ValueError):
    """A placement violates a legality precondition."""


@dataclass(frozen=True)
class CellRecord:
    name: str
    width: float
    height: float
    kind: str = MACRO

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class PinRef:
    cell: int  # index into Netlist.cells
    offset_x: float
    offset_y: float


@dataclass(frozen=True)
class Net:
    id: int
    pins: tuple[PinRef, ...]
    name: str = ""


@dataclass(frozen=True, eq=False)
class Netlist:
    """Immutable hyper-graph of macros, fixed pins and macro-related nets.

    Only macros and (optionally) fixed terminals appear in ``cells``; standard
    cells are dropped at parse time since their positions are unknown during
    macro placement.
    """

    name: str
    cells: tuple[CellRecord, ...]
    nets: tuple[Net, ...]
    canvas_width: float
    canvas_height: float
    origin_x: float = 0.0
    origin_y: float = 0.0
    # canvas-relative bottom-left position of each fixed terminal, by cell index
    fixed_positions: dict = field(default_factory=dict)
    source_pl: Optional[str] = None

    def __post_init__(self):
        if not (self.canvas_width > 0 and self.canvas_height > 0):
            raise ValueError("canvas extents must be positive")
        seen = set()
        for c in self.cells:
            if c.name in seen:
                raise ValueError(f"duplicate cell name {c.name!r}")
            seen.add(c.name)
            if c.kind == MACRO and not (c.width > 0 and c.height > 0):
                raise ValueError(f"macro {c.name!r} has zero area")
        n = len(self.cells)
        for net in self.nets:
            for p in net.pins:
                if not 0 <= p.cell < n:
                    raise ValueError(f"net {net.id} references unknown cell {p.cell}")
                if self.cells[p.cell].kind == FIXED_TERMINAL and p.cell not in self.fixed_positions:
                    raise ValueError(f"fixed terminal {self.cells[p.cell].name!r} has no position")

    # ------------------------------------------------------------------ views

    @property
    def geo_tol(self) -> float:
        """Length below which two edges count as coincident."""
        return 1e-9 * max(self.canvas_width, self.canvas_height)
    @cached_property
    def macro_cells(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.cells) if c.kind == MACRO)

    @property
    def macro_ids(self) -> tuple[str, ...]:
        return tuple(self.cells[i].name for i in self.macro_cells)

    @property
    def num_macros(self) -> int:
        return len(self.macro_cells)

    @cached_property
    def cell_to_macro(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.macro_cells)}

    @cached_property
    def macro_index(self) -> dict[str, int]:
        return {self.cells[c].name: i for i, c in enumerate(self.macro_cells)}

    @cached_property
    def macro_w(self) -> np.ndarray:
        return np.array([self.cells[c].width for c in self.macro_cells], dtype=np.float64)

    @cached_property
    def macro_h(self) -> np.ndarray:
        return np.array([self.cells[c].height for c in self.macro_cells], dtype=np.float64)

    @cached_property
    def pin_arrays(self):
        """Flat pin arrays grouped by net.

        Returns ``(net_ptr, pin_macro, pin_x, pin_y)``; for macro pins
        ``pin_macro`` is the macro index and ``pin_x/pin_y`` the offset, for
        fixed pins ``pin_macro`` is -1 and ``pin_x/pin_y`` the absolute
        canvas-relative location.
        """
        ptr = [0]
        pm, px, py = [], [], []
        c2m = self.cell_to_macro
        for net in self.nets:
            for p in net.pins:
                m = c2m.get(p.cell, -1)
                pm.append(m)
                if m >= 0:
                    px.append(p.offset_x)
                    py.append(p.offset_y)
                else:
                    fx, fy = self.fixed_positions[p.cell]
                    px.append(fx + p.offset_x)
                    py.append(fy + p.offset_y)
            ptr.append(len(pm))
        return (np.asarray(ptr, dtype=np.int64), np.asarray(pm, dtype=np.int64),
                np.asarray(px, dtype=np.float64), np.asarray(py, dtype=np.float64))

    @cached_property
    def incidence(self):
        """Macro-to-net CSR with per-(macro, net) pin offset extremes.

        Returns ``(ptr, net, oxmin, oxmax, oymin, oymax)``; nets appear in
        ascending id order for each macro.
        """
        k = self.num_macros
        per_macro: list[dict[int, list[float]]] = [dict() for _ in range(k)]
        c2m = self.cell_to_macro
        for net in self.nets:
            for p in net.pins:
                m = c2m.get(p.cell)
                if m is None:
                    continue
                ext = per_macro[m].get(net.id)
                if ext is None:
                    per_macro[m][net.id] = [p.offset_x, p.offset_x, p.offset_y, p.offset_y]
                else:
                    ext[0] = min(ext[0], p.offset_x)
                    ext[1] = max(ext[1], p.offset_x)
                    ext[2] = min(ext[2], p.offset_y)
                    ext[3] = max(ext[3], p.offset_y)
        ptr = [0]
        nets, ext = [], []
        for m in range(k):
            for j in sorted(per_macro[m]):
                nets.append(j)
                ext.append(per_macro[m][j])
            ptr.append(len(nets))
        ext_a = np.asarray(ext, dtype=np.float64).reshape(-1, 4)
        return (np.asarray(ptr, dtype=np.int64), np.asarray(nets, dtype=np.int64),
                np.ascontiguousarray(ext_a[:, 0]), np.ascontiguousarray(ext_a[:, 1]),
                np.ascontiguousarray(ext_a[:, 2]), np.ascontiguousarray(ext_a[:, 3]))

    @cached_property
    def fixed_boxes(self):
        """Per-net bounding box of fixed pins: ``(has, lx, hx, ly, hy)``."""
        ptr, pm, px, py = self.pin_arrays
        n = len(self.nets)
        has = np.zeros(n, dtype=np.uint8)
        lx = np.zeros(n)
        hx = np.zeros(n)
        ly = np.zeros(n)
        hy = np.zeros(n)
        for j in range(n):
            sel = slice(ptr[j], ptr[j + 1])
            fixed = pm[sel] < 0
            if fixed.any():
                has[j] = 1
                xs, ys = px[sel][fixed], py[sel][fixed]
                lx[j], hx[j], ly[j], hy[j] = xs.min(), xs.max(), ys.min(), ys.max()
        return has, lx, hx, ly, hy

    # ------------------------------------------------------------- builders
    @classmethod
    def from_macros(cls, macros: Sequence[tuple[str, float, float]],
                    nets: Iterable[Sequence[tuple[str, float, float]]],
                    canvas: tuple[float, float], name: str = "toy") -> "Netlist":
        """Build a macro-only netlist.

        ``nets`` holds pin lists of ``(macro_name, offset_x, offset_y)`` with
        offsets relative to the macro's bottom-left corner.
        """
        cells = tuple(CellRecord(n, float(w), float(h), MACRO) for n, w, h in macros)
        idx = {c.name: i for i, c in enumerate(cells)}
        out = []
        for j, pins in enumerate(nets):
            out.append(Net(j, tuple(PinRef(idx[n], float(ox), float(oy)) for n, ox, oy in pins)))
        return cls(name, cells, tuple(out), float(canvas[0]), float(canvas[1]))


# ---------------------------------------------------------------------------
# Bookshelf parsing


def _records(path: str) -> Iterator[tuple[int, list[str]]]:
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line or line.startswith("UCLA"):
                continue
            yield lineno, line.split()


def _num(tok: str, path: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise BookshelfError("expected a number", path, lineno, tok) from None
    if not math.isfinite(v):
        raise BookshelfError("non-finite number", path, lineno, tok)
    return v


def _aux_files(path: str) -> dict[str, str]:
    if not os.path.exists(path):
        raise BookshelfError("file not found", path)
    base = os.path.dirname(os.path.abspath(path))
    files: dict[str, str] = {}
    for lineno, toks in _records(path):
        if ":" not in toks:
            raise BookshelfError("expected 'RowBasedPlacement : files...'", path, lineno, toks[0])
        for tok in toks[toks.index(":") + 1:]:
            ext = os.path.splitext(tok)[1].lower().lstrip(".")
            files[ext] = os.path.join(base, tok)
    for ext in ("nodes", "nets", "pl"):
        if ext not in files:
            raise BookshelfError(f"no .{ext} file listed", path)
        if not os.path.exists(files[ext]):
            raise BookshelfError("file not found", files[ext])
    return files


def parse_nodes(path: str) -> list[tuple[str, float, float, str]]:
    """Return ``(name, width, height, flag)`` per node; flag is '' or the terminal tag."""
    out = []
    for lineno, toks in _records(path):
        if toks[0] in ("NumNodes", "NumTerminals"):
            continue
        if len(toks) < 3:
            raise BookshelfError("expected 'name width height [terminal]'", path, lineno, toks[0])
        w, h = _num(toks[1], path, lineno), _num(toks[2], path, lineno)
        if w < 0 or h < 0:
            raise BookshelfError("negative node dimension", path, lineno, toks[0])
        flag = toks[3] if len(toks) > 3 else ""
        out.append((toks[0], w, h, flag))
    return out


def parse_pl(path: str) -> dict[str, tuple[float, float, bool]]:
    """Return ``name -> (x, y, fixed)`` in absolute coordinates."""
    out = {}
    for lineno, toks in _records(path):
        if len(toks) < 3:
            raise BookshelfError("expected 'name x y : orient'", path, lineno, toks[0])
        out[toks[0]] = (_num(toks[1], path, lineno), _num(toks[2], path, lineno),
                        any(t.upper() in ("/FIXED", "/FIXED_NI") for t in toks[3:]))
    return out


def parse_scl(path: str) -> tuple[float, float, float, float]:
    """Core-row extents ``(xl, yl, xh, yh)``."""
    xl = yl = math.inf
    xh = yh = -math.inf
    row: dict[str, float] = {}
    nrows = 0
    for lineno, toks in _records(path):
        key = toks[0]
        if key == "CoreRow":
            row = {}
        elif key == "End":
            try:
                y, h = row["coordinate"], row["height"]
                x0, n = row["subroworigin"], row["numsites"]
            except KeyError as e:
                raise BookshelfError(f"row is missing {e.args[0]}", path, lineno) from None
            sw = row.get("sitewidth", 1.0)
            xl, xh = min(xl, x0), max(xh, x0 + sw * n)
            yl, yh = min(yl, y), max(yh, y + h)
            nrows += 1
        elif key != "NumRows":
            # 'SubrowOrigin : x NumSites : n' carries two pairs on one line
            i = 0
            while i < len(toks):
                if i + 2 < len(toks) and toks[i + 1] == ":":
                    name = toks[i].lower()
                    if name in ("coordinate", "height", "sitewidth", "sitespacing",
                                "subroworigin", "numsites"):
                        row[name] = _num(toks[i + 2], path, lineno)
                    i += 3
                else:
                    i += 1
    if nrows == 0:
        raise BookshelfError("no rows found", path)
    return xl, yl, xh, yh


def parse_aux(path: str, include_fixed_pins: bool = False) -> Netlist:
    """Parse a Bookshelf benchmark given its ``.aux`` manifest.

    Terminal nodes with positive area become movable macros. A net is kept iff
    it has at least one macro pin; standard-cell pins are dropped from kept
    nets, and fixed-terminal pins are dropped unless ``include_fixed_pins``.
    """
    files = _aux_files(path)
    nodes = parse_nodes(files["nodes"])
    pl = parse_pl(files["pl"])

    kinds: dict[str, str] = {}
    dims: dict[str, tuple[float, float]] = {}
    for name, w, h, flag in nodes:
        if name in kinds:
            raise BookshelfError("duplicate node", files["nodes"], None, name)
        terminal = flag.lower().startswith("terminal")
        if terminal and flag.lower() == "terminal" and w * h > 0:
            kinds[name] = MACRO
        elif terminal:
            if (w > 0) != (h > 0):
                raise BookshelfError("zero-area macro", files["nodes"], None, name)
            kinds[name] = FIXED_TERMINAL
        else:
            kinds[name] = STANDARD
        dims[name] = (w, h)

    if "scl" in files and os.path.exists(files["scl"]):
        xl, yl, xh, yh = parse_scl(files["scl"])
    else:
        boxes = [(x, y, x + dims[n][0], y + dims[n][1])
                 for n, (x, y, fixed) in pl.items() if n in dims and kinds[n] != STANDARD]
        if not boxes:
            raise BookshelfError("no .scl file and no fixed content to bound the canvas", path)
        b = np.asarray(boxes)
        xl, yl, xh, yh = b[:, 0].min(), b[:, 1].min(), b[:, 2].max(), b[:, 3].max()

    # cells: macros in .nodes order, then fixed terminals that are referenced
    macro_names = [n for n, *_ in nodes if kinds[n] == MACRO]
    cell_index = {n: i for i, n in enumerate(macro_names)}
    cells = [CellRecord(n, *dims[n], MACRO) for n in macro_names]
    fixed_positions: dict[int, tuple[float, float]] = {}

    nets: list[Net] = []
    nets_path = files["nets"]
    pending: Optional[tuple[str, int, list]] = None

    def close(block):
        name, degree, pins = block
        if len(pins) != degree:
            logger.warning("%s: net %s declares %d pins, found %d", nets_path, name, degree, len(pins))
        kept = []
        has_macro = False
        for cname, ox, oy in pins:
            kind = kinds[cname]
            if kind == MACRO:
                has_macro = True
            elif kind == STANDARD or not include_fixed_pins:
                continue
            w, h = dims[cname]
            bx = min(max(ox + w / 2.0, 0.0), w)
            by = min(max(oy + h / 2.0, 0.0), h)
            if cname not in cell_index:
                cell_index[cname] = len(cells)
                cells.append(CellRecord(cname, w, h, FIXED_TERMINAL))
                if cname not in pl:
                    raise BookshelfError("fixed terminal has no position", files["pl"], None, cname)
                x, y, _ = pl[cname]
                fixed_positions[cell_index[cname]] = (x - xl, y - yl)
            kept.append(PinRef(cell_index[cname], bx, by))
        if has_macro:
            nets.append(Net(len(nets), tuple(kept), name))

    for lineno, toks in _records(nets_path):
        if toks[0] in ("NumNets", "NumPins"):
            continue
        if toks[0] == "NetDegree":
            if pending is not None:
                close(pending)
            if len(toks) < 3:
                raise BookshelfError("expected 'NetDegree : d [name]'", nets_path, lineno, toks[0])
            try:
                degree = int(toks[2])
            except ValueError:
                raise BookshelfError("bad net degree", nets_path, lineno, toks[2]) from None
            pending = (toks[3] if len(toks) > 3 else f"net{lineno}", degree, [])
            continue
        if pending is None:
            raise BookshelfError("pin line outside a NetDegree block", nets_path, lineno, toks[0])
        cname = toks[0]
        if cname not in kinds:
            raise BookshelfError("pin references unknown cell", nets_path, lineno, cname)
        ox = oy = 0.0
        if ":" in toks:
            rest = toks[toks.index(":") + 1:]
            if len(rest) >= 2:
                ox, oy = _num(rest[0], nets_path, lineno), _num(rest[1], nets_path, lineno)
            elif rest:
                raise BookshelfError("expected two pin offsets", nets_path, lineno, rest[0])
        # only macro pins need their real offsets; normalize below
        pending[2].append((cname, ox, oy))
    if pending is not None:
        close(pending)

    name = os.path.splitext(os.path.basename(path))[0]
    return Netlist(name, tuple(cells), tuple(nets), float(xh - xl), float(yh - yl),
                   float(xl), float(yl), fixed_positions, files["pl"])


# ---------------------------------------------------------------------------
# placement files


def _fmt(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 2 ** 53 else repr(v)


def read_placement(path: str, netlist: Netlist) -> tuple[np.ndarray, int]:
    """Read macro positions from a ``.pl`` file into a genotype.

    Returns ``(genotype, n_clamped)``; coordinates outside the canvas are
    clamped (a macro counts once even if both axes were clamped).
    """
    pl = parse_pl(path)
    k = netlist.num_macros
    g = np.empty(2 * k)
    clamped = 0
    for i, name in enumerate(netlist.macro_ids):
        if name not in pl:
            raise BookshelfError("macro missing from placement", path, None, name)
        x, y, _ = pl[name]
        x -= netlist.origin_x
        y -= netlist.origin_y
        cx = min(max(x, 0.0), netlist.canvas_width)
        cy = min(max(y, 0.0), netlist.canvas_height)
        if cx != x or cy != y:
            clamped += 1
        g[2 * i], g[2 * i + 1] = cx, cy
    if clamped:
        logger.warning("%s: clamped %d macro(s) into the canvas", path, clamped)
    return g, clamped


def exact_overlap_area(positions: np.ndarray, w: np.ndarray, h: np.ndarray,
                       tol: float = 0.0) -> float:
    """Total pairwise positive-area intersection of axis-aligned rectangles.

    Intersections no longer than ``tol`` on either axis count as touching.
    """
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    x0, y0 = pos[:, 0], pos[:, 1]
    x1, y1 = x0 + w, y0 + h
    total = 0.0
    for i in range(len(pos) - 1):
        ox = np.minimum(x1[i], x1[i + 1:]) - np.maximum(x0[i], x0[i + 1:])
        oy = np.minimum(y1[i], y1[i + 1:]) - np.maximum(y0[i], y0[i + 1:])
        ox = np.where(ox > tol, ox, 0.0)
        oy = np.where(oy > tol, oy, 0.0)
        total += float(np.sum(ox * oy))
    return total


def out_of_bounds_count(positions: np.ndarray, netlist: Netlist, tol: float = 1e-9) -> int:
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    eps = tol * max(netlist.canvas_width, netlist.canvas_height)
    bad = ((pos[:, 0] < -eps) | (pos[:, 1] < -eps)
           | (pos[:, 0] + netlist.macro_w > netlist.canvas_width + eps)
           | (pos[:, 1] + netlist.macro_h > netlist.canvas_height + eps))
    return int(bad.sum())


def write_placement(placement, netlist: Netlist, path: str, template: Optional[str] = None) -> None:
    """Write a legal placement as a Bookshelf ``.pl`` file.

    Macro lines come first in name order; every non-macro line of the source
    ``.pl`` (``template``, default ``netlist.source_pl``) is passed through.
    """
    positions = np.asarray(placement.positions if hasattr(placement, "positions") else placement,
                           dtype=np.float64).reshape(-1, 2)
    if len(positions) != netlist.num_macros:
        raise PlacementError("placement size does not match the netlist")
    if getattr(placement, "feasible", True) is False:
        raise PlacementError("placement is infeasible")
    if exact_overlap_area(positions, netlist.macro_w, netlist.macro_h, netlist.geo_tol) > 0:
        raise PlacementError("placement has overlapping macros")
    if out_of_bounds_count(positions, netlist):
        raise PlacementError("placement has macros outside the canvas")

    lines = ["UCLA pl 1.0", ""]
    names = netlist.macro_ids
    for i in sorted(range(len(names)), key=names.__getitem__):
        x = positions[i, 0] + netlist.origin_x
        y = positions[i, 1] + netlist.origin_y
        lines.append(f"{names[i]} {_fmt(x)} {_fmt(y)} : N /FIXED")
    template = template if template is not None else netlist.source_pl
    if template and os.path.exists(template):
        macros = set(names)
        with open(template) as fh:
            for raw in fh:
                s = raw.strip()
                if not s or s.startswith("#") or s.startswith("UCLA"):
                    continue
                if s.split()[0] not in macros:
                    lines.append(raw.rstrip("\n"))
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
