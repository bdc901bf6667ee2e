import itertools
import math

import numpy as np
import pytest

from conftest import TOY3_GENOTYPE
from wiremask import GridSpec, evaluate, order_macros
from wiremask.optimizers import (Budget, MutationOp, OnePlusOneEA, RandomSearch, finetune, mutate,
                                 read_jsonl, rng_stream, run, run_ea, run_rs)
from wiremask.synth import random_netlist


@pytest.fixture
def toy():
    nl = random_netlist(np.random.default_rng(11), 8, 10, canvas=(100.0, 100.0), n_fixed=2)
    grid = GridSpec.for_netlist(nl, 20)
    return nl, grid, order_macros(nl)


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget()
    with pytest.raises(ValueError):
        Budget(max_evaluations=0)
    with pytest.raises(ValueError):
        Budget(max_wall_seconds=-1)
    assert Budget(max_wall_seconds=5).remaining(10) == math.inf
    with pytest.raises(ValueError):
        MutationOp("flip")


def test_swap_exchanges_two_macros():
    rng = np.random.default_rng(0)
    parent = np.arange(10, dtype=float)
    for _ in range(50):
        child = mutate(parent, MutationOp("swap"), rng)
        diff = np.flatnonzero((child != parent).reshape(-1, 2).any(axis=1))
        assert len(diff) == 2
        a, b = diff
        assert child[2 * a:2 * a + 2].tolist() == parent[2 * b:2 * b + 2].tolist()
    assert parent.tolist() == list(range(10))


def test_uniform_redraws_one_macro():
    rng = np.random.default_rng(1)
    parent = np.zeros(8)
    for _ in range(50):
        child = mutate(parent, MutationOp("uniform"), rng, canvas=(3.0, 7.0))
        moved = (child != parent).reshape(-1, 2).any(axis=1)
        assert moved.sum() == 1
        x, y = child.reshape(-1, 2)[moved][0]
        assert 0 <= x < 3 and 0 <= y < 7


def test_mix_uses_both_kinds():
    rng = np.random.default_rng(2)
    parent = np.array([1.0, 1.0, 2.0, 2.0, 3.0, 3.0])
    swaps = sum(sorted(mutate(parent, MutationOp("mix"), rng, (50, 50)).tolist()) == sorted(parent.tolist())
                for _ in range(200))
    assert 60 < swaps < 140


def test_swap_needs_two_macros(toy3):
    with pytest.raises(ValueError):
        mutate(np.zeros(2), MutationOp("swap"), np.random.default_rng(0))
    from wiremask import Netlist
    single = Netlist.from_macros([("a", 1, 1)], [], (4, 4))
    with pytest.raises(ValueError):
        OnePlusOneEA(single, 0, MutationOp("swap"))


def test_streams_are_independent():
    a = rng_stream(3, "init").random(4)
    b = rng_stream(3, "mutation").random(4)
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a, rng_stream(3, "init").random(4))


def test_ea_ask_tell_alternation(toy):
    nl, _, _ = toy
    ea = OnePlusOneEA(nl, 0)
    ea.ask()
    with pytest.raises(RuntimeError):
        ea.ask()


def test_ea_accepts_ties_and_rejects_worse(toy):
    nl, _, _ = toy
    ea = OnePlusOneEA(nl, 0, init_samples=1)
    g0 = ea.ask()
    ea.tell(g0, 10.0)
    g1 = ea.ask()
    ea.tell(g1, 10.0)
    assert ea.parent is g1
    g2 = ea.ask()
    ea.tell(g2, 10.5)
    assert ea.parent is g1


def test_best_so_far_never_increases(toy):
    nl, grid, order = toy
    for log in (run_rs(nl, grid, order, Budget(150), 4), run_ea(nl, grid, order, Budget(250), 4)):
        seq = [e.best_hpwl for e in log.entries]
        assert all(b <= a for a, b in zip(seq, seq[1:]))
        assert log.evaluations == log.entries[-1].eval
        assert log.best_hpwl == seq[-1]
        assert evaluate(log.best_genotype, nl, grid, order).hpwl == log.best_hpwl


def test_initial_samples_count_against_budget(toy):
    nl, grid, order = toy
    log = run_ea(nl, grid, order, Budget(40), 0, init_samples=100)
    assert log.evaluations == 40
    # with no mutation yet, the EA equals random search on the same stream
    rs = run_rs(nl, grid, order, Budget(40), 0)
    assert log.best_hpwl == rs.best_hpwl


def test_parallel_random_search_matches_serial(toy):
    nl, grid, order = toy
    a = run_rs(nl, grid, order, Budget(97), 9, parallel=1)
    b = run_rs(nl, grid, order, Budget(97), 9, parallel=4)
    assert a.lines() == b.lines()
    np.testing.assert_array_equal(a.best_genotype, b.best_genotype)


def test_log_file_round_trip(tmp_path, toy):
    nl, grid, order = toy
    log = run_ea(nl, grid, order, Budget(60), 1)
    path = tmp_path / "runlog.jsonl"
    log.write_jsonl(str(path))
    rows = read_jsonl(str(path))
    footer = rows[-1]
    assert footer["footer"] and footer["seed"] == 1 and footer["optimizer"] == "ea"
    assert footer["evaluations"] == 60 and footer["best_hpwl"] == log.best_hpwl
    assert len(footer["config_hash"]) == 16
    assert all(r["t"] is None for r in rows[:-1])


def test_heartbeat_only_under_wall_budget(toy):
    nl, grid, order = toy
    ticks = itertools.count(0.0, 1.0)
    obj = lambda g: evaluate(g, nl, grid, order)  # noqa: E731
    log = run(RandomSearch(nl, 0), obj, Budget(max_evaluations=300, max_wall_seconds=1e9), 0,
              heartbeat=50.0, clock=lambda: next(ticks))
    e = log.entries[:-1]
    repeats = [b for a, b in zip(e, e[1:]) if b.best_hpwl == a.best_hpwl]
    assert repeats, "expected heartbeat rows on a long plateau"
    assert all(e.t is not None for e in log.entries)
    plain = run_rs(nl, grid, order, Budget(300), 0)
    assert len(plain.entries) < len(log.entries)


def test_wall_budget_stops(toy):
    nl, grid, order = toy
    ticks = itertools.count(0.0, 0.5)
    log = run(RandomSearch(nl, 0), lambda g: evaluate(g, nl, grid, order),
              Budget(max_wall_seconds=10.0), 0, clock=lambda: next(ticks))
    assert 0 < log.evaluations < 20


def test_finetune_never_worse(toy):
    nl, grid, order = toy
    start = run_rs(nl, grid, order, Budget(5), 2).best_genotype
    before = evaluate(start, nl, grid, order).hpwl
    log = finetune(start, nl, grid, order, Budget(200), 2)
    assert log.entries[0].eval == 1 and log.entries[0].best_hpwl == before
    assert log.best_hpwl <= before


def test_finetune_length_check(toy3):
    nl, grid, order = toy3
    with pytest.raises(ValueError):
        finetune(TOY3_GENOTYPE[:4], nl, grid, order, Budget(3), 0)
