"""From tape behavior to rational functions.

``psi`` reads a Turing machine's transition diagram as a transducer from
scanned symbols to (written symbol, move) pairs, so a halting run's action
tuples become one input-output pair of that transducer.  Learning the
transducer on the induced source is then an ordinary rational-function
learning problem, solved here by enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from limitlab.machines import BLANK, MOVES, TuringMachine, build_tm
from limitlab.observations import PTO
from limitlab.transducers import PartialTransducer, Transducer, reachable_states, run

# output of the halt state's completion rows; never observed in a trajectory
SINK = (BLANK, "S")


def action_alphabet(gamma) -> tuple:
    return tuple((s, mv) for s in gamma for mv in MOVES)


def psi(tm: TuringMachine) -> Transducer:
    trans = {}
    for q, s, nxt, w, mv in tm.transitions():
        trans[q, s] = (nxt, (w, mv))
    for s in tm.gamma:
        trans[tm.halt, s] = (tm.halt, SINK)
    return Transducer(tm.n_states, tm.gamma, action_alphabet(tm.gamma), trans, tm.start, {tm.halt})


def reduce_behavior(scanned, actions) -> tuple[tuple, tuple]:
    """One tape behavior as a (scanned string, write-move string) pair."""
    if len(scanned) != len(actions):
        raise ValueError(f"scanned string has length {len(scanned)} "
                         f"but the trajectory has {len(actions)} steps")
    out = []
    for s, a in zip(scanned, actions):
        if len(a) != 3 or a[2] not in MOVES:
            raise ValueError(f"malformed action tuple {a!r}")
        if a[0] != s:
            raise ValueError(f"action {a!r} does not read the scanned symbol {s!r}")
        out.append((a[1], a[2]))
    return tuple(scanned), tuple(out)


def pto_reduce(examples) -> list:
    """Turn trajectory examples into transducer input-output pairs."""
    pairs = []
    for ex in examples:
        if ex.kind != PTO or ex.trace is None:
            raise ValueError(f"example for {ex.x!r} carries no trajectory")
        scanned = tuple(a[0] for a in ex.trace)
        pairs.append(reduce_behavior(scanned, ex.trace))
    return pairs


def fst_to_tm(m: PartialTransducer, gamma, sigma) -> TuringMachine:
    """Read a (write, move)-output transducer back as a Turing machine.

    Halting states become the halt state; missing rows become in-place loops,
    so the machine never halts along an unobserved transition.
    """
    order = [q for q in reachable_states(m) if q not in m.halting]
    if m.start in m.halting:
        # a start that halts at once: one working state that halts on anything
        table = {(0, s): (1, s, "S") for s in gamma}
        return build_tm(2, gamma, sigma, table)
    index = {q: i for i, q in enumerate(order)}
    halt = len(order)
    table = {}
    for q in order:
        for s in gamma:
            t = m.rows[q].get(s)
            if t is None:
                table[index[q], s] = (index[q], s, "S")
                continue
            r, (w, mv) = t
            table[index[q], s] = (halt if r in m.halting else index[r], w, mv)
    return build_tm(halt + 1, gamma, sigma, table)


class TransducerEnumeration:
    """Indices ``1, 2, ...`` onto total transducers over fixed alphabets.

    Grouped by state count from 1; inside a group, mixed radix over the
    (state, input) entries with digit ``target * |B| + output``, most
    significant entry first.  The start state is 0.
    """

    def __init__(self, inputs, outputs):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)

    def count(self, n: int) -> int:
        return (n * len(self.outputs)) ** (n * len(self.inputs))

    def group_start(self, n: int) -> int:
        return 1 + sum(self.count(k) for k in range(1, n))

    def __getitem__(self, index: int) -> Transducer:
        if index < 1:
            raise IndexError("enumeration indices start at 1")
        k = index - 1
        n = 1
        while k >= self.count(n):
            k -= self.count(n)
            n += 1
        base = n * len(self.outputs)
        entries = n * len(self.inputs)
        digits = []
        for _ in range(entries):
            k, d = divmod(k, base)
            digits.append(d)
        digits.reverse()
        trans = {}
        for q in range(n):
            for j, a in enumerate(self.inputs):
                target, out = divmod(digits[q * len(self.inputs) + j], len(self.outputs))
                trans[q, a] = (target, self.outputs[out])
        return Transducer(n, self.inputs, self.outputs, trans)

    def index_of(self, m: Transducer) -> int:
        n = m.n_states
        base = n * len(self.outputs)
        k = 0
        for q in range(n):
            for a in self.inputs:
                r, b = m.rows[q][a]
                k = k * base + r * len(self.outputs) + self.outputs.index(b)
        return self.group_start(n) + k


@dataclass
class RationalLearnerState:
    index: int = 1
    seen: dict = field(default_factory=dict)  # input tuple -> output tuple


def _consistent(m, pairs) -> bool:
    return all(run(m, u) == v for u, v in pairs)


def enum_rational_step(state: RationalLearnerState, pair, enumeration: TransducerEnumeration):
    """Feed one (input, output) pair; return the state and the least consistent machine."""
    u, v = tuple(pair[0]), tuple(pair[1])
    if len(u) != len(v):
        raise ValueError("input and output strings must have equal length")
    old = state.seen.get(u)
    if old is not None and old != v:
        raise ValueError(f"conflicting outputs for input {u!r}")
    state.seen[u] = v
    m = enumeration[state.index]
    if u and run(m, u) == v:
        return state, m
    pairs = list(state.seen.items())
    while True:
        state.index += 1
        m = enumeration[state.index]
        if _consistent(m, pairs):
            return state, m


class RationalLearner:
    def __init__(self, inputs, outputs):
        self.enumeration = TransducerEnumeration(inputs, outputs)
        self.state = RationalLearnerState()

    def feed(self, pair) -> Transducer:
        self.state, m = enum_rational_step(self.state, pair, self.enumeration)
        return m

    @property
    def index(self) -> int:
        return self.state.index


def psi_trace_check(tm: TuringMachine, actions) -> bool:
    """True when psi(tm) maps the scanned projection of ``actions`` to its
    write-move projection."""
    scanned, target = reduce_behavior(tuple(a[0] for a in actions), actions)
    return run(psi(tm), scanned) == target


__all__ = [
    "SINK",
    "RationalLearner",
    "RationalLearnerState",
    "TransducerEnumeration",
    "action_alphabet",
    "enum_rational_step",
    "fst_to_tm",
    "psi",
    "psi_trace_check",
    "pto_reduce",
    "reduce_behavior",
]
