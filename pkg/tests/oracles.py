"""Brute-force reference implementations used to check the fast paths.

Nothing here reuses the separable wire mask, the occupancy bitmap kernels or
the incremental boxes: every candidate is judged by recomputing geometry and
wirelength from scratch.
"""

import math

import numpy as np

from wiremask.synth import random_netlist


def footprint_cells(i, j, w, h, grid):
    fw = max(1, math.ceil(w / grid.cell_w - 1e-9))
    fh = max(1, math.ceil(h / grid.cell_h - 1e-9))
    return {(a, b) for a in range(i, i + fw) for b in range(j, j + fh)}


def rects_overlap(a, b, tol):
    """Positive-length intersection on both axes; rectangles are (x0, y0, x1, y1)."""
    ox = min(a[2], b[2]) - max(a[0], b[0])
    oy = min(a[3], b[3]) - max(a[1], b[1])
    return ox > tol and oy > tol


def in_bounds(x, y, w, h, netlist):
    tol = 1e-9 * max(netlist.canvas_width, netlist.canvas_height)
    return (x >= -tol and y >= -tol and x + w <= netlist.canvas_width + tol
            and y + h <= netlist.canvas_height + tol)


def partial_hpwl(netlist, where):
    """HPWL counting only pins of macros in ``where`` (macro -> (x, y)) and fixed pins."""
    c2m = netlist.cell_to_macro
    total = 0.0
    for net in netlist.nets:
        xs, ys = [], []
        for p in net.pins:
            m = c2m.get(p.cell)
            if m is None:
                fx, fy = netlist.fixed_positions[p.cell]
                xs.append(fx + p.offset_x)
                ys.append(fy + p.offset_y)
            elif m in where:
                xs.append(where[m][0] + p.offset_x)
                ys.append(where[m][1] + p.offset_y)
        if xs:
            total += (max(xs) - min(xs)) + (max(ys) - min(ys))
    return total


def legal(v, i, j, others, netlist, grid, exact):
    """Whether macro ``v`` may sit at anchor (i, j) given ``others`` (macro -> anchor)."""
    w, h = netlist.macro_w[v], netlist.macro_h[v]
    x, y = grid.xs[i], grid.ys[j]
    if not in_bounds(x, y, w, h, netlist):
        return False
    if exact:
        me = (x, y, x + w, y + h)
        for u, (a, b) in others.items():
            xu, yu = grid.xs[a], grid.ys[b]
            if rects_overlap(me, (xu, yu, xu + netlist.macro_w[u], yu + netlist.macro_h[u]),
                             grid.geo_tol):
                return False
        return True
    mine = footprint_cells(i, j, w, h, grid)
    for u, (a, b) in others.items():
        if mine & footprint_cells(a, b, netlist.macro_w[u], netlist.macro_h[u], grid):
            return False
    return True


def check_greedy(genotype, netlist, grid, order, placement, exact=False):
    """Replay the greedy mapping step by step against exhaustive enumeration.

    Returns a list of violation strings (empty when the placement agrees).
    """
    problems = []
    W, H = netlist.canvas_width, netlist.canvas_height
    g = np.asarray(genotype, dtype=float).reshape(-1, 2)
    g = np.column_stack([np.clip(g[:, 0], 0, W), np.clip(g[:, 1], 0, H)])
    tol = 1e-9 * (W + H)
    dtol = 1e-9 * (W * W + H * H)
    anchors = {}
    where = {}
    for step, v in enumerate(int(x) for x in order.sequence):
        before = partial_hpwl(netlist, where)
        cost = {}
        for i in range(grid.m):
            for j in range(grid.m):
                if legal(v, i, j, anchors, netlist, grid, exact):
                    where[v] = (grid.xs[i], grid.ys[j])
                    cost[(i, j)] = partial_hpwl(netlist, where) - before
        where.pop(v, None)
        if not cost:
            if placement.feasible:
                problems.append(f"step {step}: no legal anchor but placement is feasible")
            elif int(placement.anchors[v][0]) != -1:
                problems.append(f"step {step}: macro {v} placed although nothing is legal")
            return problems
        fmin = min(cost.values())
        best = [a for a, f in cost.items() if f <= fmin + tol]
        d2 = {a: (grid.xs[a[0]] - g[v, 0]) ** 2 + (grid.ys[a[1]] - g[v, 1]) ** 2 for a in best}
        dmin = min(d2.values())
        chosen = (int(placement.anchors[v][0]), int(placement.anchors[v][1]))
        if chosen not in d2:
            problems.append(f"step {step}: anchor {chosen} not in the argmin set {sorted(best)}")
            return problems
        if d2[chosen] > dmin + dtol:
            problems.append(f"step {step}: anchor {chosen} is not the nearest argmin member")
        if abs(placement.increments[step] - cost[chosen]) > 1e-9 * max(1.0, W + H):
            problems.append(f"step {step}: increment {placement.increments[step]} != {cost[chosen]}")
        anchors[v] = chosen
        where[v] = (grid.xs[chosen[0]], grid.ys[chosen[1]])
    if not placement.feasible:
        problems.append("every macro placed but placement reported infeasible")
    return problems


def full_hpwl(netlist, anchors, grid):
    return partial_hpwl(netlist, {v: (grid.xs[a], grid.ys[b]) for v, (a, b) in anchors.items()})


def local_search_oracle(anchors, netlist, grid, order, rng, passes=2, exact=False):
    """Exhaustive single-macro relocation passes; returns (final anchors, moves)."""
    cur = {v: (int(a), int(b)) for v, (a, b) in enumerate(np.asarray(anchors).reshape(-1, 2))}
    tol = 1e-9 * (netlist.canvas_width + netlist.canvas_height)
    moves = []
    for _ in range(passes):
        for v in (int(x) for x in order.sequence):
            others = {u: a for u, a in cur.items() if u != v}
            now = full_hpwl(netlist, cur, grid)
            cost = {}
            for j in range(grid.m):
                for i in range(grid.m):
                    if legal(v, i, j, others, netlist, grid, exact):
                        trial = dict(others)
                        trial[v] = (i, j)
                        cost[(i, j)] = full_hpwl(netlist, trial, grid)
            best = min(cost.values())
            if best < now - tol:
                # candidates listed row by row (j outer), matching the documented tie order
                cand = [a for a, f in cost.items() if f <= best + tol]
                new = cand[rng.integers(len(cand))]
                moves.append((v, cur[v], new, now, cost[new]))
                cur[v] = new
    return np.array([cur[v] for v in range(len(cur))], dtype=np.int64), moves


def small_instance(rng, exact_dims=None):
    """Random toy with k <= 6 macros, m <= 10, at most 8 nets."""
    k = int(rng.integers(1, 7))
    n = int(rng.integers(1, 9))
    m = int(rng.integers(3, 11))
    integer = bool(rng.random() < 0.5) if exact_dims is None else exact_dims
    canvas = (float(rng.integers(20, 60)), float(rng.integers(20, 60)))
    if not integer:
        canvas = (canvas[0] + rng.random(), canvas[1] + rng.random())
    nl = random_netlist(rng, k, n, canvas=canvas, side=(0.08, 0.35),
                        n_fixed=int(rng.integers(0, 3)), integer=integer)
    return nl, m
