import math
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import TOY3_GENOTYPE, toy3_netlist
from oracles import check_greedy, partial_hpwl, small_instance
from wiremask import GridSpec, MacroOrder, Netlist, NetBoxes, Occupancy, evaluate, hpwl_full, order_macros, wire_mask
from wiremask.evaluate import CONNECTED_AREA, RANDOM, SIZE_ONLY, clamp_genotype
from wiremask.kernels import backends
from wiremask.optimizers import random_genotype

BACKENDS = sorted(backends().items())


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_toy3_increments(toy3, name, impl):
    nl, grid, order = toy3
    p = evaluate(TOY3_GENOTYPE, nl, grid, order, backend=impl)
    assert p.increments.tolist() == [6.0, 3.0, 2.0]
    assert p.hpwl == 11.0 and p.feasible
    assert p.anchors.tolist() == [[2, 2], [1, 3], [4, 1]]


def test_toy3_wire_mask_first_step(toy3):
    nl, grid, _ = toy3
    # before anything is placed every anchor costs the macro's own pin spread
    wm = wire_mask(0, NetBoxes.initial(nl), Occupancy(grid), grid, nl)
    assert np.all(wm.delta == 6.0)
    assert wm.valid[:4, :].all() and not wm.valid[4, :].any()


def test_connected_area_order():
    nl = toy3_netlist()
    # neighbour areas: A with B and C is 10, B with A is 8, C with A is 4
    assert order_macros(nl, CONNECTED_AREA).sequence.tolist() == [0, 1, 2]
    assert order_macros(nl, SIZE_ONLY).sequence.tolist() == [1, 0, 2]
    r1 = order_macros(nl, RANDOM, np.random.default_rng(5)).sequence
    r2 = order_macros(nl, RANDOM, np.random.default_rng(5)).sequence
    assert sorted(r1.tolist()) == [0, 1, 2] and r1.tolist() == r2.tolist()
    with pytest.raises(ValueError):
        order_macros(nl, RANDOM)


def test_order_ties_go_to_lower_index():
    nl = Netlist.from_macros([("a", 1, 1), ("b", 1, 1), ("c", 2, 1)], [], (10, 10))
    assert order_macros(nl, SIZE_ONLY).sequence.tolist() == [2, 0, 1]


def test_infeasible_when_canvas_fills():
    nl = Netlist.from_macros([("a", 3, 3), ("b", 3, 3)], [[("a", 0, 0), ("b", 1, 1)]], (5, 5))
    grid = GridSpec.for_netlist(nl, 5)
    p = evaluate([0, 0, 0, 0], nl, grid, MacroOrder(np.array([0, 1])))
    assert not p.feasible and math.isinf(p.hpwl)
    assert p.anchors[1].tolist() == [-1, -1]


def test_genotype_clamped_to_canvas(toy3):
    nl, grid, order = toy3
    g = np.array([-3.0, 9.0, 2.0, 2.0, 7.0, -1.0])
    np.testing.assert_array_equal(clamp_genotype(g, nl).ravel(), [0, 5, 2, 2, 5, 0])
    a = evaluate(g, nl, grid, order)
    b = evaluate(clamp_genotype(g, nl), nl, grid, order)
    np.testing.assert_array_equal(a.anchors, b.anchors)


def test_wrong_genotype_length(toy3):
    nl, grid, order = toy3
    with pytest.raises(ValueError):
        evaluate([1.0, 2.0], nl, grid, order)


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_greedy_matches_brute_force(name, impl):
    rng = np.random.default_rng(2024)
    for _ in range(120):
        nl, m = small_instance(rng)
        grid = GridSpec.for_netlist(nl, m)
        order = order_macros(nl)
        exact = bool(rng.random() < 0.3)
        g = random_genotype(nl, rng)
        p = evaluate(g, nl, grid, order, exact=exact, backend=impl)
        assert check_greedy(g, nl, grid, order, p, exact) == []
        if p.feasible:
            assert abs(p.hpwl - partial_hpwl(nl, {v: tuple(p.positions[v]) for v in range(nl.num_macros)})) \
                <= 1e-9 * max(1.0, p.hpwl)


def test_backends_bit_identical():
    impls = backends()
    if len(impls) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(7)
    for _ in range(200):
        nl, m = small_instance(rng)
        grid = GridSpec.for_netlist(nl, max(m, int(rng.integers(3, 40))))
        order = order_macros(nl)
        g = random_genotype(nl, rng)
        exact = bool(rng.random() < 0.5)
        a = evaluate(g, nl, grid, order, exact=exact, backend=impls["python"])
        b = evaluate(g, nl, grid, order, exact=exact, backend=impls["compiled"])
        np.testing.assert_array_equal(a.anchors, b.anchors)
        assert a.increments.tobytes() == b.increments.tobytes()
        assert a.hpwl == b.hpwl or (math.isinf(a.hpwl) and math.isinf(b.hpwl))


def test_hpwl_full_with_fixed_pins():
    from wiremask.netlist import FIXED_TERMINAL, CellRecord, Net, PinRef
    cells = (CellRecord("a", 2, 2), CellRecord("p", 0, 0, FIXED_TERMINAL))
    nets = (Net(0, (PinRef(0, 1.0, 1.0), PinRef(1, 0.0, 0.0))),)
    nl = Netlist("t", cells, nets, 10, 10, fixed_positions={1: (9.0, 0.0)})
    assert hpwl_full(np.array([[0.0, 4.0]]), nl) == (9 - 1) + (5 - 0)


def test_pure_python_switch():
    env = dict(os.environ, WIREMASK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import wiremask; print(wiremask.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
