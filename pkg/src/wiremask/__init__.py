"""Wire-mask-guided black-box optimization for VLSI macro placement."""

from .evaluate import (
    CONNECTED_AREA,
    RANDOM,
    SIZE_ONLY,
    MacroOrder,
    NetBoxes,
    Placement,
    WireMask,
    evaluate,
    hpwl_full,
    order_macros,
    wire_mask,
)
from .grid import GridSpec, Occupancy, commit, default_partitions, footprint, valid_anchors
from .kernels import BACKEND
from .netlist import (
    BookshelfError,
    CellRecord,
    Net,
    Netlist,
    PinRef,
    PlacementError,
    parse_aux,
    read_placement,
    write_placement,
)

from .metrics import CongestionMap, MetricRecord, congestion, report
from .optimizers import Budget, MutationOp, OnePlusOneEA, RandomSearch, RunLog, finetune, run_ea, run_rs
from .refine import LocalSearchConfig, local_search

__version__ = "0.1.0"
