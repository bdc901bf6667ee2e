"""Command-line interface: place, evaluate, finetune, localsearch, plot."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import re
import sys
from typing import Optional

import numpy as np

from .evaluate import STRATEGIES, Placement, evaluate, order_macros
from .grid import GridSpec, default_partitions
from .metrics import report
from .netlist import BookshelfError, PlacementError, parse_aux, read_placement, write_placement
from .optimizers import (MUTATIONS, Budget, MutationOp, finetune, rng_stream, run_ea, run_rs)
from .refine import LocalSearchConfig, local_search, snap_placement
from .svg import write_svg

logger = logging.getLogger("wiremask")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2

_UNITS = {"": 1.0, "s": 1.0, "m": 60.0, "min": 60.0, "h": 3600.0}


def parse_duration(text: str) -> float:
    """``'90s'``, ``'10m'``, ``'1.5h'`` or plain seconds."""
    mt = re.fullmatch(r"\s*([0-9]*\.?[0-9]+)\s*(s|m|min|h)?\s*", str(text))
    if not mt:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}")
    return float(mt.group(1)) * _UNITS[mt.group(2) or ""]


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` comments; dashes in keys become underscores."""
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key.replace("-", "_")] = value
    return cfg


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("aux", help="Bookshelf .aux file")
    p.add_argument("--partitions", type=int, default=None,
                   help="grid partitions per axis (default: table or heuristic)")
    p.add_argument("--ordering", choices=STRATEGIES, default="connected-area")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--include-fixed-pins", action="store_true",
                   help="keep fixed-terminal pins on macro nets")
    p.add_argument("--exact-overlap", action="store_true",
                   help="judge overlap on exact rectangles instead of grid footprints")
    p.add_argument("--config", default=None, help="key=value file; flags take precedence")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _search(p: argparse.ArgumentParser, optimizer: bool = True) -> None:
    if optimizer:
        p.add_argument("--optimizer", choices=("rs", "ea"), default="ea")
        p.add_argument("--init-samples", type=int, default=100)
        p.add_argument("--parallel-evals", type=int, default=1,
                       help="concurrent evaluations (random search only)")
    p.add_argument("--mutation", choices=MUTATIONS, default="swap")
    p.add_argument("--max-evals", type=int, default=None)
    p.add_argument("--time", type=parse_duration, default=None, dest="time_budget",
                   help="wall-clock budget, e.g. 90s, 10m, 2h")
    p.add_argument("--out", "--output-dir", dest="output_dir", default="out")
    p.add_argument("--post-ls", action="store_true", help="run post local search on the result")
    p.add_argument("--ls-passes", type=int, default=2)
    p.add_argument("--grid", action="store_true", help="draw grid lines in layout.svg")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wiremask", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("place", help="optimize a macro placement from scratch")
    _common(p)
    _search(p)

    p = sub.add_parser("evaluate", help="greedily legalize a .pl once and print its metrics")
    _common(p)
    p.add_argument("pl")

    p = sub.add_parser("finetune", help="improve an existing placement with the (1+1)-EA")
    _common(p)
    p.add_argument("pl")
    _search(p, optimizer=False)

    p = sub.add_parser("localsearch", help="post local search on an existing placement")
    _common(p)
    p.add_argument("pl")
    p.add_argument("--passes", type=int, default=2)
    p.add_argument("--out", "--output-dir", dest="output_dir", default="out")

    p = sub.add_parser("plot", help="render a .pl as SVG")
    _common(p)
    p.add_argument("pl")
    p.add_argument("out_svg")
    p.add_argument("--grid", action="store_true")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in cfg.items():
            if key not in known:
                parser.error(f"unknown config key {key!r}")
            action = known[key]
            if action.type is not None:
                value = action.type(value)
            elif isinstance(action, argparse._StoreTrueAction):
                value = value.lower() in ("1", "true", "yes", "on")
            defaults[key] = value
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _setup(args):
    netlist = parse_aux(args.aux, include_fixed_pins=args.include_fixed_pins)
    m = args.partitions or default_partitions(netlist)
    grid = GridSpec.for_netlist(netlist, m)
    order = order_macros(netlist, args.ordering, rng_stream(args.seed, "order"))
    logger.info("%s: %d macros, %d nets, %dx%d grid", netlist.name, netlist.num_macros,
                len(netlist.nets), m, m)
    return netlist, grid, order


def _budget(args) -> Budget:
    if args.max_evals is None and args.time_budget is None:
        raise ValueError("give --max-evals and/or --time")
    return Budget(args.max_evals, args.time_budget)


def _write_outputs(out_dir, netlist, grid, placement: Placement, log=None, draw_grid=False):
    os.makedirs(out_dir, exist_ok=True)
    if log is not None:
        log.write_jsonl(os.path.join(out_dir, "runlog.jsonl"))
    record = report(placement, netlist, grid)
    with open(os.path.join(out_dir, "metrics.json"), "w") as fh:
        fh.write(record.to_json() + "\n")
    if placement.feasible:
        write_placement(placement, netlist, os.path.join(out_dir, "result.pl"))
        write_svg(os.path.join(out_dir, "layout.svg"), placement.positions, netlist,
                  grid if draw_grid else None, title=netlist.name)
    return record


def _post_ls(args, netlist, grid, order, placement):
    if not (args.post_ls and placement.feasible):
        return placement
    cfg = LocalSearchConfig(order, rng_stream(args.seed, "tiebreak"), args.ls_passes)
    return local_search(placement, netlist, grid, cfg, exact=args.exact_overlap)


def cmd_place(args) -> int:
    netlist, grid, order = _setup(args)
    budget = _budget(args)
    if args.optimizer == "rs":
        log = run_rs(netlist, grid, order, budget, args.seed, parallel=args.parallel_evals,
                     exact=args.exact_overlap)
    else:
        log = run_ea(netlist, grid, order, budget, args.seed, MutationOp(args.mutation),
                     args.init_samples, exact=args.exact_overlap)
    placement = _post_ls(args, netlist, grid, order, log.best_placement)
    record = _write_outputs(args.output_dir, netlist, grid, placement, log, args.grid)
    print(record.to_json())
    return EXIT_OK if placement.feasible else EXIT_INFEASIBLE


def cmd_evaluate(args) -> int:
    netlist, grid, order = _setup(args)
    genotype, _ = read_placement(args.pl, netlist)
    placement = evaluate(genotype, netlist, grid, order, exact=args.exact_overlap)
    print(report(placement, netlist, grid).to_json())
    return EXIT_OK if placement.feasible else EXIT_INFEASIBLE


def cmd_finetune(args) -> int:
    netlist, grid, order = _setup(args)
    genotype, _ = read_placement(args.pl, netlist)
    log = finetune(genotype, netlist, grid, order, _budget(args), args.seed,
                   MutationOp(args.mutation), exact=args.exact_overlap)
    before = log.entries[0].best_hpwl if log.entries else math.inf
    placement = _post_ls(args, netlist, grid, order, log.best_placement)
    record = _write_outputs(args.output_dir, netlist, grid, placement, log, args.grid)
    after = record.hpwl
    ratio = (before - after) / before if math.isfinite(before) and before > 0 else None
    with open(os.path.join(args.output_dir, "improvement.json"), "w") as fh:
        json.dump({"before": before if math.isfinite(before) else None,
                   "after": after if math.isfinite(after) else None,
                   "ratio": ratio}, fh, sort_keys=True)
        fh.write("\n")
    print(record.to_json())
    return EXIT_OK if placement.feasible else EXIT_INFEASIBLE


def cmd_localsearch(args) -> int:
    netlist, grid, order = _setup(args)
    genotype, _ = read_placement(args.pl, netlist)
    start = snap_placement(genotype, netlist, grid, order, exact=args.exact_overlap)
    if not start.feasible:
        print("error: could not legalize the input placement", file=sys.stderr)
        return EXIT_INFEASIBLE
    cfg = LocalSearchConfig(order, rng_stream(args.seed, "tiebreak"), args.passes)
    placement = local_search(start, netlist, grid, cfg, exact=args.exact_overlap)
    _write_outputs(args.output_dir, netlist, grid, placement)
    print(json.dumps({"before": start.hpwl, "after": placement.hpwl}))
    return EXIT_OK


def cmd_plot(args) -> int:
    netlist = parse_aux(args.aux, include_fixed_pins=args.include_fixed_pins)
    genotype, _ = read_placement(args.pl, netlist)
    grid = None
    if args.grid:
        grid = GridSpec.for_netlist(netlist, args.partitions or default_partitions(netlist))
    write_svg(args.out_svg, genotype.reshape(-1, 2), netlist, grid, title=netlist.name)
    return EXIT_OK


COMMANDS = {
    "place": cmd_place,
    "evaluate": cmd_evaluate,
    "finetune": cmd_finetune,
    "localsearch": cmd_localsearch,
    "plot": cmd_plot,
}


def main(argv: Optional[list] = None) -> int:
    args = parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    np.seterr(all="ignore")
    try:
        return COMMANDS[args.command](args)
    except (BookshelfError, PlacementError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
