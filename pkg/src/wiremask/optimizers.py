"""Black-box optimizers over the genotype space.

Optimizers follow an ask/tell protocol (``ask() -> genotype``,
``tell(genotype, hpwl)``); :func:`run` drives one against the greedy
evaluation under a budget and records the best-so-far trajectory.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .evaluate import MacroOrder, Placement, evaluate
from .grid import GridSpec
from .netlist import Netlist

logger = logging.getLogger(__name__)

SWAP = "swap"
UNIFORM = "uniform"
MIX = "mix"
MUTATIONS = (SWAP, UNIFORM, MIX)

# named random sub-streams derived from one seed
STREAMS = {"init": 0, "mutation": 1, "tiebreak": 2, "order": 3}

HEARTBEAT_SECONDS = 60.0


def rng_stream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), STREAMS[name]])


@dataclass(frozen=True)
class Budget:
    max_evaluations: Optional[int] = None
    max_wall_seconds: Optional[float] = None

    def __post_init__(self):
        if self.max_evaluations is None and self.max_wall_seconds is None:
            raise ValueError("a budget needs an evaluation or a wall-clock bound")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ValueError("max_evaluations must be positive")
        if self.max_wall_seconds is not None and not self.max_wall_seconds > 0:
            raise ValueError("max_wall_seconds must be positive")

    def remaining(self, evals: int) -> float:
        return math.inf if self.max_evaluations is None else self.max_evaluations - evals


@dataclass(frozen=True)
class MutationOp:
    kind: str = SWAP

    def __post_init__(self):
        if self.kind not in MUTATIONS:
            raise ValueError(f"unknown mutation {self.kind!r}")


def uniform_coords(k: int, width: float, height: float, rng: np.random.Generator) -> np.ndarray:
    u = rng.random((k, 2))
    return (u * np.array([width, height])).ravel()


def random_genotype(netlist: Netlist, rng: np.random.Generator) -> np.ndarray:
    """Every macro coordinate uniform over the canvas."""
    return uniform_coords(netlist.num_macros, netlist.canvas_width, netlist.canvas_height, rng)


def _mutate(parent, kind, rng, canvas):
    child = np.array(parent, dtype=np.float64, copy=True)
    k = len(child) // 2
    if kind == MIX:
        kind = SWAP if (rng.random() < 0.5 and k >= 2) else UNIFORM
    if kind == SWAP:
        if k < 2:
            raise ValueError("swap mutation needs at least two macros")
        a, b = rng.choice(k, size=2, replace=False)
        child[2 * a:2 * a + 2], child[2 * b:2 * b + 2] = parent[2 * b:2 * b + 2], parent[2 * a:2 * a + 2]
    else:
        a = rng.integers(k)
        child[2 * a:2 * a + 2] = rng.random(2) * np.asarray(canvas, dtype=np.float64)
    return child, kind


def mutate(parent, op: MutationOp, rng: np.random.Generator,
           canvas: tuple[float, float] = (1.0, 1.0)) -> np.ndarray:
    """Return a mutated copy of ``parent``.

    ``swap`` exchanges the coordinates of two distinct macros, ``uniform``
    redraws one macro over the ``canvas``, ``mix`` flips a fair coin between
    the two.
    """
    return _mutate(np.asarray(parent, dtype=np.float64), op.kind, rng, canvas)[0]


class RandomSearch:
    name = "rs"
    batchable = True

    def __init__(self, netlist: Netlist, seed: int):
        self.netlist = netlist
        self.rng = rng_stream(seed, "init")

    def ask(self) -> np.ndarray:
        return random_genotype(self.netlist, self.rng)

    def tell(self, genotype, hpwl: float) -> None:
        pass


class OnePlusOneEA:
    """(1+1)-EA; the parent is the best of ``init_samples`` random genotypes,
    or ``initial`` when given. Children replace the parent on ``<=``."""

    name = "ea"
    batchable = False

    def __init__(self, netlist: Netlist, seed: int, op: MutationOp = MutationOp(),
                 init_samples: int = 100, initial=None):
        if init_samples < 1 and initial is None:
            raise ValueError("init_samples must be positive")
        if op.kind == SWAP and netlist.num_macros < 2:
            raise ValueError("swap mutation needs at least two macros")
        self.netlist = netlist
        self.op = op
        self.init_rng = rng_stream(seed, "init")
        self.mut_rng = rng_stream(seed, "mutation")
        self.initial = None if initial is None else np.asarray(initial, dtype=np.float64).copy()
        self.init_left = 1 if initial is not None else init_samples
        self.parent: Optional[np.ndarray] = None
        self.parent_hpwl = math.inf
        self._pending = None

    def ask(self) -> np.ndarray:
        if self._pending is not None:
            raise RuntimeError("(1+1)-EA expects tell() before the next ask()")
        if self.init_left > 0:
            g = self.initial if self.initial is not None else random_genotype(self.netlist, self.init_rng)
        else:
            canvas = (self.netlist.canvas_width, self.netlist.canvas_height)
            g = mutate(self.parent, self.op, self.mut_rng, canvas)
        self._pending = g
        return g

    def tell(self, genotype, hpwl: float) -> None:
        self._pending = None
        if self.init_left > 0:
            self.init_left -= 1
            if self.parent is None or hpwl < self.parent_hpwl:
                self.parent, self.parent_hpwl = genotype, hpwl
        elif hpwl <= self.parent_hpwl:
            self.parent, self.parent_hpwl = genotype, hpwl


@dataclass
class LogEntry:
    eval: int
    t: float
    best_hpwl: float


@dataclass
class RunLog:
    seed: int
    optimizer: str
    entries: list = field(default_factory=list)
    evaluations: int = 0
    best_genotype: Optional[np.ndarray] = None
    best_placement: Optional[Placement] = None
    config: dict = field(default_factory=dict)
    timestamps: bool = True

    @property
    def final_best(self):
        return self.best_genotype, self.best_placement

    @property
    def best_hpwl(self) -> float:
        return self.best_placement.hpwl if self.best_placement is not None else math.inf

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.config, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def lines(self, timestamps: Optional[bool] = None) -> list[str]:
        stamp = self.timestamps if timestamps is None else timestamps
        out = []
        for e in self.entries:
            out.append(json.dumps({"eval": e.eval, "t": round(e.t, 6) if stamp else None,
                                   "best_hpwl": e.best_hpwl if math.isfinite(e.best_hpwl) else None}))
        out.append(json.dumps({"footer": True, "seed": self.seed, "optimizer": self.optimizer,
                               "config_hash": self.config_hash, "evaluations": self.evaluations,
                               "best_hpwl": self.best_hpwl if math.isfinite(self.best_hpwl) else None},
                              sort_keys=True))
        return out

    def write_jsonl(self, path: str, timestamps: Optional[bool] = None) -> None:
        with open(path, "w") as fh:
            fh.write("\n".join(self.lines(timestamps)) + "\n")


def read_jsonl(path: str) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def run(optimizer, objective: Callable[[np.ndarray], Placement], budget: Budget, seed: int,
        parallel: int = 1, heartbeat: Optional[float] = None, config: Optional[dict] = None,
        clock: Callable[[], float] = time.perf_counter) -> RunLog:
    """Drive an ask/tell optimizer until the budget is spent.

    The time bound is checked before each evaluation (or batch), so a run may
    overshoot it by one evaluation. Heartbeat entries are only written for
    wall-clock budgets, keeping evaluation-bounded logs reproducible.
    """
    if heartbeat is None:
        heartbeat = HEARTBEAT_SECONDS if budget.max_wall_seconds is not None else math.inf
    log = RunLog(seed, optimizer.name, config=dict(config or {}),
                 timestamps=budget.max_wall_seconds is not None)
    width = max(1, int(parallel)) if optimizer.batchable else 1
    pool = ThreadPoolExecutor(width) if width > 1 else None
    start = clock()
    last = start
    best = math.inf
    try:
        while True:
            left = budget.remaining(log.evaluations)
            if left <= 0:
                break
            if budget.max_wall_seconds is not None and clock() - start >= budget.max_wall_seconds:
                break
            n = int(min(width, left))
            batch = [optimizer.ask() for _ in range(n)]
            results = list(pool.map(objective, batch)) if pool is not None else [objective(batch[0])]
            for g, p in zip(batch, results):
                log.evaluations += 1
                optimizer.tell(g, p.hpwl)
                now = clock()
                if p.hpwl < best or log.best_placement is None:
                    if p.hpwl < best:
                        best = p.hpwl
                        log.entries.append(LogEntry(log.evaluations, now - start, best))
                        last = now
                    log.best_genotype, log.best_placement = np.asarray(g).copy(), p
                elif now - last >= heartbeat:
                    log.entries.append(LogEntry(log.evaluations, now - start, best))
                    last = now
    finally:
        if pool is not None:
            pool.shutdown()
    if not log.entries or log.entries[-1].eval != log.evaluations:
        log.entries.append(LogEntry(log.evaluations, clock() - start, best))
    logger.info("%s seed=%d: %d evaluations, best HPWL %.6g", optimizer.name, seed,
                log.evaluations, best)
    return log


def _config(netlist, grid, order, budget, seed, **extra):
    cfg = {"netlist": netlist.name, "partitions": grid.m, "ordering": order.strategy,
           "max_evaluations": budget.max_evaluations, "max_wall_seconds": budget.max_wall_seconds,
           "seed": seed}
    cfg.update(extra)
    return cfg


def _objective(netlist, grid, order, exact):
    return lambda g: evaluate(g, netlist, grid, order, exact=exact)


def run_rs(netlist: Netlist, grid: GridSpec, order: MacroOrder, budget: Budget, seed: int,
           parallel: int = 1, exact: bool = False) -> RunLog:
    cfg = _config(netlist, grid, order, budget, seed, optimizer="rs", exact=exact)
    return run(RandomSearch(netlist, seed), _objective(netlist, grid, order, exact), budget, seed,
               parallel=parallel, config=cfg)


def run_ea(netlist: Netlist, grid: GridSpec, order: MacroOrder, budget: Budget, seed: int,
           op: MutationOp = MutationOp(), init_samples: int = 100, exact: bool = False) -> RunLog:
    cfg = _config(netlist, grid, order, budget, seed, optimizer="ea", mutation=op.kind,
                  init_samples=init_samples, exact=exact)
    return run(OnePlusOneEA(netlist, seed, op, init_samples), _objective(netlist, grid, order, exact),
               budget, seed, config=cfg)


def finetune(initial, netlist: Netlist, grid: GridSpec, order: MacroOrder, budget: Budget,
             seed: int, op: MutationOp = MutationOp(), exact: bool = False) -> RunLog:
    """(1+1)-EA seeded with an existing placement instead of random samples."""
    initial = np.asarray(initial, dtype=np.float64).ravel()
    if len(initial) != 2 * netlist.num_macros:
        raise ValueError("initial genotype has the wrong length")
    cfg = _config(netlist, grid, order, budget, seed, optimizer="ea-finetune", mutation=op.kind,
                  exact=exact)
    return run(OnePlusOneEA(netlist, seed, op, initial=initial),
               _objective(netlist, grid, order, exact), budget, seed, config=cfg)
