"""Observation trees, state merging and maximum-similarity merging (MSM)."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from limitlab.transducers import PartialTransducer, canonical


class PrefixConflict(ValueError):
    def __init__(self, prefix, first, second):
        super().__init__(f"prefix {prefix!r} is assigned outputs {first!r} and {second!r}")
        self.prefix = prefix


@dataclass
class ObservationTree:
    """A trie-shaped partial transducer encoding a set of example pairs.

    States are numbered in BFS order of their input prefixes, so the root is 0.
    """

    machine: PartialTransducer
    prefixes: list  # state -> input prefix (a tuple)
    provenance: dict = field(default_factory=dict)  # state -> example inputs through it

    @property
    def n_states(self) -> int:
        return self.machine.n_states

    def leaves(self) -> list:
        return [q for q in range(self.n_states) if not self.machine.rows[q]]

    def state_of(self, prefix) -> int:
        return self.prefixes.index(tuple(prefix))


def build_observation_tree(pairs, inputs=None, outputs=None, halting: bool = False) -> ObservationTree:
    """Trie over the input strings of ``pairs`` labeled with their outputs.

    With ``halting=True`` the end state of every example is marked halting;
    merging then refuses to give such states outgoing transitions.
    """
    pairs = [(tuple(u), tuple(v)) for u, v in pairs]
    label = {}  # nonempty prefix -> output of its last symbol
    ends = set()
    for u, v in pairs:
        if len(u) != len(v):
            raise ValueError(f"input {u!r} and output {v!r} differ in length")
        for i in range(1, len(u) + 1):
            p = u[:i]
            old = label.get(p)
            if old is not None and old != v[i - 1]:
                raise PrefixConflict(p, old, v[i - 1])
            label[p] = v[i - 1]
        ends.add(u)
    if inputs is None:
        inputs = sorted({a for u, _ in pairs for a in u}, key=repr)
    if outputs is None:
        outputs = sorted({b for _, v in pairs for b in v}, key=repr)
    order = {a: i for i, a in enumerate(inputs)}
    prefixes = sorted({()} | set(label),
                      key=lambda p: (len(p), [order[a] for a in p]))
    index = {p: i for i, p in enumerate(prefixes)}
    trans = {(index[p[:-1]], p[-1]): (index[p], b) for p, b in label.items()}
    provenance = {}
    for u, _ in pairs:
        for i in range(len(u) + 1):
            provenance.setdefault(index[u[:i]], []).append(u)
    halts = {index[u] for u in ends} if halting else ()
    m = PartialTransducer(len(prefixes), inputs, outputs, trans, 0, halts)
    return ObservationTree(m, prefixes, provenance)


# ---------------------------------------------------------------------------
# merging


@dataclass(frozen=True)
class Merged:
    machine: PartialTransducer
    mergers_performed: int
    block_of: tuple  # old state -> new state


@dataclass(frozen=True)
class Invalid:
    p: int
    q: int


def _cascade(m: PartialTransducer, p: int, q: int):
    """Union-find merge of p and q with BFS cascading.

    Returns ``(find, unions)`` or None when the merge is invalid.
    """
    parent = list(range(m.n_states))
    rows = {}  # root -> merged row; roots never merged keep m.rows
    halts = set(m.halting)  # roots of blocks holding a halting state

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    unions = 0
    queue = deque([(p, q)])
    while queue:
        a, b = queue.popleft()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if rb < ra:
            ra, rb = rb, ra
        merged = dict(rows.get(ra, m.rows[ra]))
        for sym, (t, out) in rows.pop(rb, m.rows[rb]).items():
            old = merged.get(sym)
            if old is None:
                merged[sym] = (t, out)
            elif old[1] != out:
                return None
            else:
                queue.append((old[0], t))
        parent[rb] = ra
        rows[ra] = merged
        unions += 1
        if rb in halts:
            halts.add(ra)
        if merged and ra in halts:
            return None
    return find, unions


def merge(m: PartialTransducer, p: int, q: int) -> Union[Merged, Invalid]:
    """Merge states ``p`` and ``q`` and everything the merge forces."""
    if p == q:
        raise ValueError("merge needs two distinct states")
    res = _cascade(m, p, q)
    if res is None:
        return Invalid(p, q)
    find, unions = res
    roots = sorted({find(s) for s in range(m.n_states)})
    index = {r: i for i, r in enumerate(roots)}
    block_of = [index[find(s)] for s in range(m.n_states)]
    trans = {}
    for (s, a), (t, out) in m.trans.items():
        trans[block_of[s], a] = (block_of[t], out)
    halting = {block_of[h] for h in m.halting}
    merged = PartialTransducer(len(roots), m.inputs, m.outputs, trans, block_of[m.start], halting)
    return Merged(merged, unions, tuple(block_of))


def similarity(m: PartialTransducer, p: int, q: int) -> int:
    """Number of states a valid merge of ``p`` and ``q`` eliminates, else 0."""
    if p == q:
        raise ValueError("similarity needs two distinct states")
    res = _cascade(m, p, q)
    return 0 if res is None else res[1]


def _as_machine(x) -> PartialTransducer:
    return x.machine if isinstance(x, ObservationTree) else x


@dataclass
class MSMTrace:
    rounds: list = field(default_factory=list)  # (p, q, score) per round


def msm(tree, trace: Optional[MSMTrace] = None) -> PartialTransducer:
    """Repeatedly merge a highest-scoring pair until every score is zero.

    Ties go to the lexicographically least (p, q) with states numbered in
    BFS order, which is the numbering kept after every round.
    """
    m = canonical(_as_machine(tree))
    while True:
        best, arg = 0, None
        n = m.n_states
        for p in range(n):
            for q in range(p + 1, n):
                s = similarity(m, p, q)
                if s > best:
                    best, arg = s, (p, q)
        if arg is None:
            return m
        if trace is not None:
            trace.rounds.append((arg[0], arg[1], best))
        res = merge(m, *arg)
        m = canonical(res.machine)
