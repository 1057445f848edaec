import pytest

from limitlab.machines import BLANK, MachineBuilder
from limitlab.transducers import Transducer


def machine(gamma, sigma, rows, start="q0"):
    b = MachineBuilder(gamma, sigma, start=start)
    for (q, s), (n, w, m) in rows.items():
        b.add(q, s, n, w, m)
    return b.build()[0]


@pytest.fixture
def identity_ab():
    return machine((BLANK, "a", "b"), ("a", "b"), {
        ("q0", "a"): ("q0", "a", "R"),
        ("q0", "b"): ("q0", "b", "R"),
        ("q0", BLANK): ("halt", BLANK, "S"),
    })


@pytest.fixture
def writer():
    return machine((BLANK, "1"), ("1",), {
        ("q0", BLANK): ("halt", "1", "S"),
        ("q0", "1"): ("halt", "1", "S"),
    })


@pytest.fixture
def parity():
    # output: parity of the number of b's read so far, current symbol included
    return Transducer.from_tables("ab", "01", [[0, 1], [1, 0]], [["0", "1"], ["1", "0"]])
