import json
import math

import numpy as np
import pytest

from conftest import TOY3_GENOTYPE
from oracles import small_instance
from wiremask import GridSpec, MacroOrder, Netlist, Placement, evaluate, order_macros
from wiremask.metrics import AREA_WEIGHTED, COVERED, congestion, report, top_mean
from wiremask.netlist import Net
from wiremask.optimizers import random_genotype


def _one_net(w, h, canvas=(4.0, 4.0), m=4, at=(0.0, 0.0)):
    nl = Netlist.from_macros([("a", w, h)], [[("a", 0.0, 0.0), ("a", w, h)]], canvas)
    grid = GridSpec.for_netlist(nl, m)
    p = Placement.from_anchors([[int(at[0]), int(at[1])]], nl, grid)
    return nl, grid, p


def test_single_cell_net_covered():
    nl, grid, p = _one_net(1.0, 1.0, at=(2, 1))
    cm = congestion(p, nl, grid, COVERED)
    expect = np.zeros((4, 4))
    expect[2, 1] = 2.0
    np.testing.assert_array_equal(cm.values, expect)
    assert cm.rudy == 2.0 / 2


def test_boundary_touching_does_not_cover():
    nl, grid, p = _one_net(2.0, 1.0)
    cm = congestion(p, nl, grid, COVERED)
    assert np.count_nonzero(cm.values) == 2


def test_empty_netlist():
    nl = Netlist.from_macros([("a", 1, 1)], [], (4, 4))
    grid = GridSpec.for_netlist(nl, 4)
    cm = congestion(Placement.from_anchors([[0, 0]], nl, grid), nl, grid)
    assert not cm.values.any() and cm.rudy == 0.0


def test_top_fraction_uses_ceiling():
    v = np.arange(25, dtype=float).reshape(5, 5)
    # ceil(2.5) = 3 largest values
    assert top_mean(v) == (24 + 23 + 22) / 3


def test_degenerate_net_is_finite():
    nl = Netlist.from_macros([("a", 2, 2)], [[("a", 0.0, 1.0), ("a", 2.0, 1.0)]], (4, 4))
    grid = GridSpec.for_netlist(nl, 4)
    cm = congestion(Placement.from_anchors([[0, 0]], nl, grid), nl, grid, AREA_WEIGHTED)
    assert np.isfinite(cm.values).all()
    # width 2 with height widened to one cell: (2 + 1) / (2 * 1) over two cells' worth of area
    assert math.isclose(cm.values.sum() * grid.cell_w * grid.cell_h, 3.0)


def _net_sizes(p, nl):
    out = []
    for net in nl.nets:
        xs = [p.positions[pin.cell][0] + pin.offset_x for pin in net.pins]
        ys = [p.positions[pin.cell][1] + pin.offset_y for pin in net.pins]
        out.append((max(xs) - min(xs), max(ys) - min(ys)))
    return out


def test_area_weighted_identity_small():
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 20:
        nl, m = small_instance(rng)
        grid = GridSpec.for_netlist(nl, m)
        p = evaluate(random_genotype(nl, rng), nl, grid, order_macros(nl))
        if not p.feasible or nl.fixed_positions:
            continue
        sizes = _net_sizes(p, nl)
        keep = [n for n, (w, h) in zip(nl.nets, sizes) if w > 0 and h > 0]
        sub = Netlist(nl.name, nl.cells, tuple(Net(i, n.pins) for i, n in enumerate(keep)),
                      nl.canvas_width, nl.canvas_height)
        cm = congestion(p, sub, grid, AREA_WEIGHTED)
        total = cm.values.sum() * grid.cell_w * grid.cell_h
        expect = math.fsum(w + h for w, h in sizes if w > 0 and h > 0)
        assert math.isclose(total, expect, rel_tol=1e-9, abs_tol=1e-12)
        checked += 1


def test_adding_a_net_never_lowers_congestion(toy3):
    nl, grid, order = toy3
    p = evaluate(TOY3_GENOTYPE, nl, grid, order)
    base = congestion(p, nl, grid).values
    more = Netlist(nl.name, nl.cells, nl.nets + (Net(2, (nl.nets[0].pins[0], nl.nets[1].pins[3])),),
                   nl.canvas_width, nl.canvas_height)
    assert (congestion(p, more, grid).values >= base).all()


def test_scaling_keeps_grid_ranking(toy3):
    nl, grid, order = toy3
    p = evaluate(TOY3_GENOTYPE, nl, grid, order)
    c = 3.0
    big = Netlist.from_macros([(x.name, x.width * c, x.height * c) for x in nl.cells],
                              [[(nl.cells[q.cell].name, q.offset_x * c, q.offset_y * c) for q in n.pins]
                               for n in nl.nets], (5 * c, 5 * c))
    bgrid = GridSpec.for_netlist(big, 5)
    bp = Placement.from_anchors(p.anchors, big, bgrid)
    assert bp.hpwl == pytest.approx(c * p.hpwl)
    a = congestion(p, nl, grid).values
    b = congestion(bp, big, bgrid).values
    np.testing.assert_allclose(b, a / c)
    np.testing.assert_array_equal(np.argsort(a, axis=None, kind="stable"),
                                  np.argsort(b * c, axis=None, kind="stable"))


def test_report_toy3(toy3):
    nl, grid, order = toy3
    p = evaluate(TOY3_GENOTYPE, nl, grid, order)
    r = report(p, nl, grid)
    assert r.hpwl == 11.0 and r.overlap_area == 0.0 and r.oob_count == 0
    assert r.rudy == congestion(p, nl, grid).rudy
    d = json.loads(r.to_json())
    assert set(d) == {"hpwl", "rudy", "overlap_area", "oob_count", "eval_seconds"}


def test_infeasible_placement():
    nl = Netlist.from_macros([("a", 3, 3), ("b", 3, 3)], [], (5, 5))
    grid = GridSpec.for_netlist(nl, 5)
    p = evaluate([0, 0, 0, 0], nl, grid, MacroOrder(np.array([0, 1])))
    with pytest.raises(ValueError):
        congestion(p, nl, grid)
    d = json.loads(report(p, nl, grid).to_json())
    assert d["hpwl"] is None and d["rudy"] is None


def test_unknown_mode(toy3):
    nl, grid, order = toy3
    with pytest.raises(ValueError):
        congestion(evaluate(TOY3_GENOTYPE, nl, grid, order), nl, grid, "bogus")
