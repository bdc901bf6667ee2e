import os

import numpy as np
import pytest

from wiremask import GridSpec, MacroOrder, Netlist

DATA = os.path.join(os.path.dirname(__file__), "data")

# (criterion, status, detail) rows filled in by test_acceptance
ACCEPTANCE_RESULTS = []


def corners(name, w, h):
    return [(name, 0.0, 0.0), (name, w, h)]


def toy3_netlist():
    """Three macros on a 5x5 canvas; pins at each macro's two opposite corners."""
    return Netlist.from_macros(
        [("A", 2, 1), ("B", 3, 2), ("C", 1, 2)],
        [corners("A", 2, 1) + corners("B", 3, 2), corners("A", 2, 1) + corners("C", 1, 2)],
        (5, 5), name="toy3")


TOY3_GENOTYPE = [2.0, 2.0, 1.0, 4.0, 4.0, 1.0]


@pytest.fixture
def toy3():
    nl = toy3_netlist()
    return nl, GridSpec.for_netlist(nl, 5), MacroOrder(np.array([0, 1, 2]))


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{status:4s}  {name}: {detail}")
