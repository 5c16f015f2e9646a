import pathlib
import sys

import pytest

from hybridq.circuit import Circuit, Component

HERE = pathlib.Path(__file__).parent
NETLISTS = HERE.parent / "netlists"
sys.path.insert(0, str(HERE))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance checks")


def lumped(name, kind, a, b, value, **kw):
    return Component(name, kind, (a, b), value=value, **kw)


def line(name, a, b, length, z0=50.0):
    return Component(name, "tline", (a, b), z0=z0, length=length)


def circuit(nodes, *components):
    return Circuit(("gnd",) + tuple(nodes), components)


@pytest.fixture
def netlist_dir():
    return NETLISTS


# acceptance criteria report lines, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
