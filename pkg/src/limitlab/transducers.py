"""Mealy-style finite-state transducers, total and partial.

A transducer reads a nonempty input string and emits one output symbol per
input symbol; its semantics is the last emitted symbol.  Input and output
symbols are arbitrary hashable tokens and strings are sequences of them.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence


class PartialTransducer:
    """Transducer whose transition map may be partial.

    ``trans`` maps ``(state, input)`` to ``(target, output)``.  ``halting``
    names states at which observed computations ended; such states may not
    carry transitions once merged (see :mod:`limitlab.learners.merging`).
    """

    require_reachable = True

    def __init__(self, n_states, inputs, outputs, trans, start=0, halting=()):
        self.n_states = n_states
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.trans = dict(trans)
        self.start = start
        self.halting = frozenset(halting)
        if not 0 <= start < n_states:
            raise ValueError("start state out of range")
        ins, outs = set(self.inputs), set(self.outputs)
        self.rows = [dict() for _ in range(n_states)]
        for (q, a), (r, b) in self.trans.items():
            if not (0 <= q < n_states and 0 <= r < n_states):
                raise ValueError(f"state out of range in transition {(q, a)}")
            if a not in ins:
                raise ValueError(f"input symbol {a!r} not in the input alphabet")
            if b not in outs:
                raise ValueError(f"output symbol {b!r} not in the output alphabet")
            self.rows[q][a] = (r, b)
        if self.require_reachable and len(reachable_states(self)) != n_states:
            raise ValueError("every state must be reachable from the start state")

    def delta(self, q, a):
        return self.rows[q].get(a)

    def is_total(self) -> bool:
        return len(self.trans) == self.n_states * len(self.inputs)

    def _key(self):
        return (self.n_states, self.inputs, self.outputs, frozenset(self.trans.items()),
                self.start, self.halting)

    def __eq__(self, other):
        return isinstance(other, PartialTransducer) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"{type(self).__name__}(states={self.n_states}, transitions={len(self.trans)})"


class Transducer(PartialTransducer):
    """A total transducer: every (state, input) pair has a transition.

    Unreachable states are allowed; they never affect the semantics.
    """

    require_reachable = False

    def __init__(self, n_states, inputs, outputs, trans, start=0, halting=()):
        super().__init__(n_states, inputs, outputs, trans, start, halting)
        if not self.is_total():
            missing = [(q, a) for q in range(n_states) for a in self.inputs if a not in self.rows[q]]
            raise ValueError(f"transducer is not total; missing {missing[0]}")

    @classmethod
    def from_tables(cls, inputs, outputs, next_table, out_table, start=0):
        """Build from per-state lists aligned with ``inputs``."""
        trans = {}
        for q, (nrow, orow) in enumerate(zip(next_table, out_table)):
            for a, r, b in zip(inputs, nrow, orow):
                trans[q, a] = (r, b)
        return cls(len(next_table), inputs, outputs, trans, start)


def reachable_states(m: PartialTransducer) -> list:
    """States reachable from the start, in BFS order over the input alphabet."""
    seen = {m.start}
    order = [m.start]
    queue = deque(order)
    while queue:
        q = queue.popleft()
        for a in m.inputs:
            t = m.rows[q].get(a)
            if t is not None and t[0] not in seen:
                seen.add(t[0])
                order.append(t[0])
                queue.append(t[0])
    return order


def run(m: PartialTransducer, u: Sequence) -> Optional[tuple]:
    """Outputs along ``u`` from the start, or None where a transition is missing."""
    q = m.start
    out = []
    rows = m.rows
    for a in u:
        t = rows[q].get(a)
        if t is None:
            return None
        q, b = t
        out.append(b)
    return tuple(out)


def semantics(m: PartialTransducer, u: Sequence):
    """gamma_M(u): the output emitted on the last symbol of ``u``."""
    if len(u) == 0:
        raise ValueError("semantics is defined on nonempty strings only")
    out = run(m, u)
    return None if out is None else out[-1]


def seq_map(m: PartialTransducer, u: Sequence) -> Optional[tuple]:
    if len(u) == 0:
        raise ValueError("seq_map is defined on nonempty strings only")
    return run(m, u)


# ---------------------------------------------------------------------------
# partition refinement


def hopcroft_partition(n, alphabet, successor, output_row) -> list:
    """Coarsest partition of ``range(n)`` compatible with outputs and successors.

    ``successor(q, a)`` gives the target state, ``output_row(q)`` a hashable
    signature of the state's outputs.  Returns the block id of every state.
    """
    groups = {}
    for q in range(n):
        groups.setdefault(output_row(q), []).append(q)
    blocks = [set(g) for g in groups.values()]
    block_of = [0] * n
    for i, b in enumerate(blocks):
        for q in b:
            block_of[q] = i
    pre = {a: [[] for _ in range(n)] for a in alphabet}
    for q in range(n):
        for a in alphabet:
            pre[a][successor(q, a)].append(q)

    largest = max(range(len(blocks)), key=lambda i: len(blocks[i]))
    waiting = deque((i, a) for i in range(len(blocks)) if i != largest for a in alphabet)
    pending = set(waiting)
    while waiting:
        splitter, a = waiting.popleft()
        pending.discard((splitter, a))
        sources = set()
        for q in blocks[splitter]:
            sources.update(pre[a][q])
        touched = {}
        for q in sources:
            touched.setdefault(block_of[q], set()).add(q)
        for bid, inside in touched.items():
            block = blocks[bid]
            if len(inside) == len(block):
                continue
            outside = block - inside
            # keep the larger half under the old id
            small, large = (inside, outside) if len(inside) <= len(outside) else (outside, inside)
            blocks[bid] = large
            new = len(blocks)
            blocks.append(small)
            for q in small:
                block_of[q] = new
            # the new id holds the smaller half: it must be queued whether or
            # not the old id is still pending
            for c in alphabet:
                waiting.append((new, c))
                pending.add((new, c))
    return block_of


def _total_partition(m: Transducer) -> list:
    return hopcroft_partition(
        m.n_states,
        m.inputs,
        lambda q, a: m.rows[q][a][0],
        lambda q: tuple(m.rows[q][a][1] for a in m.inputs),
    )


def minimize(m: Transducer) -> tuple[Transducer, dict]:
    """Minimal transducer with the same semantics, plus the state -> class map.

    Classes are numbered in BFS order from the start class; states whose class
    holds no reachable state map to None.
    """
    block_of = _total_partition(m)
    order = reachable_states(m)
    reach_blocks = {block_of[q] for q in order}
    rep = {}
    for q in order:
        rep.setdefault(block_of[q], q)
    numbering = {}
    queue = deque([block_of[m.start]])
    numbering[block_of[m.start]] = 0
    trans = {}
    while queue:
        b = queue.popleft()
        q = rep[b]
        for a in m.inputs:
            r, out = m.rows[q][a]
            rb = block_of[r]
            if rb not in numbering:
                numbering[rb] = len(numbering)
                queue.append(rb)
            trans[numbering[b], a] = (numbering[rb], out)
    class_map = {q: (numbering[block_of[q]] if block_of[q] in reach_blocks else None)
                 for q in range(m.n_states)}
    return Transducer(len(numbering), m.inputs, m.outputs, trans, 0), class_map


def canonical(m: PartialTransducer) -> PartialTransducer:
    """Relabel reachable states in BFS order from the start (alphabet order)."""
    order = reachable_states(m)
    index = {q: i for i, q in enumerate(order)}
    trans = {(index[q], a): (index[r], b) for (q, a), (r, b) in m.trans.items() if q in index}
    halting = {index[q] for q in m.halting if q in index}
    cls = Transducer if isinstance(m, Transducer) else PartialTransducer
    return cls(len(order), m.inputs, m.outputs, trans, 0, halting)


def isomorphic(m1: PartialTransducer, m2: PartialTransducer) -> bool:
    c1, c2 = canonical(m1), canonical(m2)
    return (c1.n_states == c2.n_states and c1.trans == c2.trans
            and c1.halting == c2.halting and set(c1.inputs) == set(c2.inputs))


# ---------------------------------------------------------------------------
# distinguishing strings


def _pair_search(m1, p, m2, q) -> Optional[tuple]:
    """Shortest string defined from both states whose outputs differ at the end."""
    if m1 is m2 and p == q:
        return None
    start = (p, q)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        s, t = pair
        for a in m1.inputs:
            x = m1.rows[s].get(a)
            y = m2.rows[t].get(a)
            if x is None or y is None:
                continue
            if x[1] != y[1]:
                path = [a]
                node = pair
                while parent[node] is not None:
                    node, sym = parent[node]
                    path.append(sym)
                return tuple(reversed(path))
            nxt = (x[0], y[0])
            if m1 is m2 and nxt[0] == nxt[1]:
                continue
            if nxt not in parent:
                parent[nxt] = (pair, a)
                queue.append(nxt)
    return None


class ApartnessWitness(NamedTuple):
    p: int
    q: int
    witness: tuple


def apart(m: PartialTransducer, p: int, q: int) -> Optional[ApartnessWitness]:
    """A distinguishing string for ``p`` and ``q`` using transitions defined on
    both paths, or None when the states are not apart."""
    w = _pair_search(m, p, m, q)
    return None if w is None else ApartnessWitness(p, q, w)


def equivalent(m1: Transducer, m2: Transducer) -> Optional[tuple]:
    """None when the semantics agree on every nonempty string, otherwise a
    shortest distinguishing string (length at most ``n1 + n2 - 1``)."""
    if tuple(m1.inputs) != tuple(m2.inputs):
        raise ValueError("transducers must share the input alphabet")
    n1 = m1.n_states
    rows = m1.rows + m2.rows

    block_of = hopcroft_partition(
        n1 + m2.n_states,
        m1.inputs,
        lambda s, a: rows[s][a][0] + (n1 if s >= n1 else 0),
        lambda s: tuple(rows[s][a][1] for a in m1.inputs),
    )
    if block_of[m1.start] == block_of[n1 + m2.start]:
        return None
    witness = _pair_search(m1, m1.start, m2, m2.start)
    assert witness is not None, "partition and pair search disagree"
    return witness


# ---------------------------------------------------------------------------
# quotients


@dataclass(frozen=True)
class QuotientResult:
    blocks: tuple  # frozensets of original states, ordered by least member
    block_of: dict
    relation: dict  # (block index, input) -> frozenset of (target block, output)
    start: int
    halting: frozenset  # blocks containing a halting state

    @property
    def deterministic(self) -> bool:
        return all(len(v) <= 1 for v in self.relation.values())

    @property
    def halting_consistent(self) -> bool:
        """No halting block carries an outgoing transition."""
        return not any(b in self.halting for b, _ in self.relation)

    def to_transducer(self, inputs, outputs) -> PartialTransducer:
        if not self.deterministic:
            raise ValueError("quotient is not deterministic")
        trans = {}
        for (b, a), targets in self.relation.items():
            (t, out), = targets
            trans[b, a] = (t, out)
        total = len(trans) == len(self.blocks) * len(inputs)
        cls = Transducer if total else PartialTransducer
        return cls(len(self.blocks), inputs, outputs, trans, self.start, self.halting)


def quotient(m: PartialTransducer, partition) -> QuotientResult:
    """M / pi: blocks of ``partition`` as states, transitions as the union over members."""
    blocks = sorted((frozenset(b) for b in partition), key=min)
    block_of = {}
    for i, b in enumerate(blocks):
        for q in b:
            if q in block_of:
                raise ValueError(f"state {q} appears in two blocks")
            block_of[q] = i
    if set(block_of) != set(range(m.n_states)):
        raise ValueError("partition must cover the state set exactly")
    relation = {}
    for (q, a), (r, out) in m.trans.items():
        relation.setdefault((block_of[q], a), set()).add((block_of[r], out))
    relation = {k: frozenset(v) for k, v in relation.items()}
    halting = frozenset(block_of[q] for q in m.halting)
    return QuotientResult(tuple(blocks), block_of, relation, block_of[m.start], halting)


# ---------------------------------------------------------------------------
# text format


def _token(sym) -> str:
    if isinstance(sym, tuple):
        return ":".join(map(str, sym))
    return str(sym)


def serialize_fst(m: PartialTransducer) -> str:
    head = (f"fst states={m.n_states} a={','.join(map(_token, m.inputs))} "
            f"b={','.join(map(_token, m.outputs))}")
    if m.start != 0:
        head += f" start=q{m.start}"
    if m.halting:
        head += " halt=" + ",".join(f"q{q}" for q in sorted(m.halting))
    lines = [head]
    for q in range(m.n_states):
        for a in m.inputs:
            t = m.rows[q].get(a)
            if t is not None:
                lines.append(f"q{q} {_token(a)} -> q{t[0]} {_token(t[1])}")
    return "\n".join(lines) + "\n"


_FST_HEADER = re.compile(r"^fst\s+states=(\d+)\s+a=(\S+)\s+b=(\S+)(?:\s+start=q(\d+))?(?:\s+halt=(\S+))?\s*$")
_FST_LINE = re.compile(r"^q(\d+)\s+(\S+)\s+->\s+q(\d+)\s+(\S+)\s*$")


def parse_fst(text: str, total: bool = False) -> PartialTransducer:
    from limitlab.machines import ParseError

    body = [(i + 1, ln) for i, ln in enumerate(text.splitlines())
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise ParseError("empty transducer description", 1)
    no, head = body[0]
    mh = _FST_HEADER.match(head.strip())
    if not mh:
        raise ParseError("expected header 'fst states=<n> a=<symbols> b=<symbols>'", no)
    n = int(mh.group(1))
    inputs = tuple(mh.group(2).split(","))
    outputs = tuple(mh.group(3).split(","))
    start = int(mh.group(4) or 0)
    halting = [int(h[1:]) for h in mh.group(5).split(",")] if mh.group(5) else []
    trans = {}
    for no, ln in body[1:]:
        m = _FST_LINE.match(ln.strip())
        col = len(ln) - len(ln.lstrip()) + 1
        if not m:
            raise ParseError("expected 'q<i> <a> -> q<j> <b>'", no, col)
        q, a, r, b = int(m.group(1)), m.group(2), int(m.group(3)), m.group(4)
        if q >= n or r >= n:
            raise ParseError(f"state index out of range (states={n})", no, col)
        if a not in inputs:
            raise ParseError(f"unknown input symbol {a!r}", no, col)
        if b not in outputs:
            raise ParseError(f"unknown output symbol {b!r}", no, ln.rindex(b) + 1)
        if (q, a) in trans:
            raise ParseError(f"duplicate transition for (q{q}, {a})", no, col)
        trans[q, a] = (r, b)
    cls = Transducer if total else PartialTransducer
    try:
        return cls(n, inputs, outputs, trans, start, halting)
    except ValueError as exc:
        raise ParseError(str(exc), body[-1][0]) from exc
