"""Random macro netlists for tests and benchmarks, and a Bookshelf writer."""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from .netlist import FIXED_TERMINAL, MACRO, CellRecord, Net, Netlist, PinRef


def _f(v) -> str:
    return repr(float(v))


def random_netlist(rng: np.random.Generator, k: int, n_nets: int,
                   canvas: tuple[float, float] = (100.0, 100.0),
                   side: tuple[float, float] = (0.05, 0.3), max_degree: int = 4,
                   n_fixed: int = 0, integer: bool = False, name: str = "synth") -> Netlist:
    """Random instance with ``k`` macros and ``n_nets`` nets.

    Macro sides are drawn as fractions ``side`` of the canvas; every net has
    at least one macro pin. With ``n_fixed > 0`` some nets also touch fixed
    point terminals spread over the canvas. ``integer`` rounds all
    dimensions and offsets to integers (canvas must then be integral).
    """
    W, H = map(float, canvas)
    cells = []
    for v in range(k):
        w = rng.uniform(*side) * W
        h = rng.uniform(*side) * H
        if integer:
            w, h = max(1.0, round(w)), max(1.0, round(h))
        cells.append(CellRecord(f"m{v}", float(w), float(h), MACRO))
    fixed_positions = {}
    for t in range(n_fixed):
        fx, fy = rng.uniform(0, W), rng.uniform(0, H)
        if integer:
            fx, fy = float(round(fx)), float(round(fy))
        fixed_positions[len(cells)] = (fx, fy)
        cells.append(CellRecord(f"p{t}", 0.0, 0.0, FIXED_TERMINAL))

    nets = []
    for j in range(n_nets):
        degree = int(rng.integers(2, max_degree + 1))
        pins = []
        for d in range(degree):
            if d > 0 and n_fixed and rng.random() < 0.2:
                pins.append(PinRef(k + int(rng.integers(n_fixed)), 0.0, 0.0))
                continue
            v = int(rng.integers(k))
            ox = rng.uniform(0, cells[v].width)
            oy = rng.uniform(0, cells[v].height)
            if integer:
                ox, oy = float(round(ox)), float(round(oy))
            pins.append(PinRef(v, float(ox), float(oy)))
        nets.append(Net(j, tuple(pins), f"n{j}"))
    return Netlist(name, tuple(cells), tuple(nets), W, H, fixed_positions=fixed_positions)


def write_bookshelf(netlist: Netlist, directory: str, positions=None,
                    origin: tuple[float, float] = (0.0, 0.0)) -> str:
    """Write ``netlist`` as a Bookshelf benchmark and return the ``.aux`` path.

    Macros become movable terminals placed at ``positions`` (default: all at
    the origin); pin offsets are written centre-relative as Bookshelf expects.
    One standard cell is added so that the row file has something to hold.
    """
    os.makedirs(directory, exist_ok=True)
    base = os.path.join(directory, netlist.name)
    ox0, oy0 = origin
    k = netlist.num_macros
    pos = np.zeros((k, 2)) if positions is None else np.asarray(positions, dtype=np.float64)

    with open(base + ".nodes", "w") as fh:
        fh.write("UCLA nodes 1.0\n\n")
        fh.write(f"NumNodes : {len(netlist.cells) + 1}\n")
        fh.write(f"NumTerminals : {len(netlist.cells)}\n")
        for c in netlist.cells:
            flag = "terminal" if c.kind == MACRO else "terminal_NI"
            fh.write(f"  {c.name} {_f(c.width)} {_f(c.height)} {flag}\n")
        fh.write("  sc0 1 1\n")

    with open(base + ".nets", "w") as fh:
        fh.write("UCLA nets 1.0\n\n")
        fh.write(f"NumNets : {len(netlist.nets)}\n")
        fh.write(f"NumPins : {sum(len(n.pins) for n in netlist.nets)}\n")
        for net in netlist.nets:
            fh.write(f"NetDegree : {len(net.pins)} {net.name or f'n{net.id}'}\n")
            for p in net.pins:
                c = netlist.cells[p.cell]
                dx = p.offset_x - c.width / 2.0
                dy = p.offset_y - c.height / 2.0
                fh.write(f"  {c.name} B : {_f(dx)} {_f(dy)}\n")

    with open(base + ".pl", "w") as fh:
        fh.write("UCLA pl 1.0\n\n")
        for v, c in enumerate(netlist.macro_cells):
            fh.write(f"{netlist.cells[c].name} {_f(pos[v, 0] + ox0)} {_f(pos[v, 1] + oy0)} : N\n")
        for c, (fx, fy) in sorted(netlist.fixed_positions.items()):
            fh.write(f"{netlist.cells[c].name} {_f(fx + ox0)} {_f(fy + oy0)} : N /FIXED_NI\n")
        fh.write(f"sc0 {_f(ox0)} {_f(oy0)} : N\n")

    W, H = netlist.canvas_width, netlist.canvas_height
    with open(base + ".scl", "w") as fh:
        fh.write("UCLA scl 1.0\n\nNumRows : 1\n\n")
        fh.write("CoreRow Horizontal\n")
        fh.write(f"  Coordinate : {_f(oy0)}\n  Height : {_f(H)}\n  Sitewidth : 1\n")
        fh.write("  Sitespacing : 1\n  Siteorient : 1\n  Sitesymmetry : 1\n")
        fh.write(f"  SubrowOrigin : {_f(ox0)} NumSites : {_f(W)}\n")
        fh.write("End\n")

    with open(base + ".aux", "w") as fh:
        fh.write(f"RowBasedPlacement : {netlist.name}.nodes {netlist.name}.nets "
                 f"{netlist.name}.wts {netlist.name}.pl {netlist.name}.scl\n")
    return base + ".aux"


def write_positions(netlist: Netlist, path: str, positions, origin: Optional[tuple] = None) -> None:
    """Plain ``.pl`` with one line per macro (no fixed content)."""
    ox0, oy0 = origin if origin is not None else (netlist.origin_x, netlist.origin_y)
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    with open(path, "w") as fh:
        fh.write("UCLA pl 1.0\n\n")
        for v, c in enumerate(netlist.macro_cells):
            fh.write(f"{netlist.cells[c].name} {_f(pos[v, 0] + ox0)} {_f(pos[v, 1] + oy0)} : N\n")
