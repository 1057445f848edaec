"""Executable gadgets: stay-move removal, transition doubling, halting gadget
pairs, and brute-force search for characteristic sets."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from limitlab.machines import BLANK, MachineBuilder, TuringMachine, build_tm, run_bounded
from limitlab.observations import Channel, Example, ExampleSet, example_set, make_example

# ---------------------------------------------------------------------------
# stay moves


def remove_stay_moves(tm: TuringMachine) -> TuringMachine:
    """Equivalent machine moving only L or R.

    A stay move into ``q`` becomes a right move into a bounce state that moves
    back left into ``q`` without touching the tape.
    """
    if not tm.has_stay_moves():
        return tm
    targets = sorted({nxt for _, _, nxt, _, mv in tm.transitions() if mv == "S"})
    working = tm.n_states - 1
    bounce = {q: working + i for i, q in enumerate(targets)}
    halt = working + len(targets)

    def renum(q):
        return halt if q == tm.halt else q

    table = {}
    for q, s, nxt, w, mv in tm.transitions():
        if mv == "S":
            table[q, s] = (bounce[nxt], w, "R")
        else:
            table[q, s] = (renum(nxt), w, mv)
    for q, b in bounce.items():
        for s in tm.gamma:
            table[b, s] = (renum(q), s, "L")
    return build_tm(halt + 1, tm.gamma, tm.sigma, table)


# ---------------------------------------------------------------------------
# transition doubling


@dataclass(frozen=True)
class DoubledMachine:
    original: TuringMachine
    doubled: TuringMachine
    # (state, read) of the original -> (dummy state, fresh symbol)
    transition_index: dict

    @property
    def m(self) -> int:
        return len(self.transition_index)


def fresh_symbols(gamma, m: int) -> list:
    taken = set(gamma)
    out = []
    k = 1
    while len(out) < m:
        g = f"g{k}"
        if g not in taken:
            out.append(g)
        k += 1
    return out


def double(tm: TuringMachine) -> DoubledMachine:
    """Route every transition through its own dummy state and fresh symbol.

    Transition ``k`` reading ``s`` in ``q`` first writes ``g_k`` and stays,
    entering dummy ``p_k``; ``p_k`` reading ``g_k`` then performs the original
    write and move.  Every other row of ``p_k`` loops in place.
    """
    if tm.has_stay_moves():
        raise ValueError("double() expects a machine without stay moves")
    entries = list(tm.transitions())
    m = len(entries)
    fresh = fresh_symbols(tm.gamma, m)
    gamma = tm.gamma + tuple(fresh)
    working = tm.n_states - 1
    halt = working + m

    def renum(q):
        return halt if q == tm.halt else q

    table = {}
    index = {}
    for k, (q, s, nxt, w, mv) in enumerate(entries):
        p, g = working + k, fresh[k]
        index[q, s] = (p, g)
        table[q, s] = (p, g, "S")
        for t in gamma:
            table[p, t] = (renum(nxt), w, mv) if t == g else (p, t, "S")
    for q in range(working):
        for g in fresh:
            table[q, g] = (q, g, "S")
    doubled = build_tm(halt + 1, gamma, tm.sigma, table)
    return DoubledMachine(tm, doubled, index)


def covering_inputs(tm: TuringMachine, inputs, budget: int) -> list:
    """One input per exercised transition: the least (by length, then text)
    input whose run uses it.  Duplicates are dropped, first use kept."""
    first = {}
    for x in sorted(inputs, key=_lenlex):
        out = run_bounded(tm, x, budget, trace=True)
        if not out.halted:
            continue
        q = tm.start
        for a in out.trace:
            first.setdefault((q, a.read), x)
            q = tm.transition(q, a.read)[0]
    chosen = []
    for key in sorted(first):
        if first[key] not in chosen:
            chosen.append(first[key])
    return chosen


# ---------------------------------------------------------------------------
# halting gadgets

GADGET_SIGMA = ("0", "1")


def _t(s):
    return f"t:{s}"


def _h(s):
    return f"h:{s}"


@dataclass(frozen=True)
class HaltingGadgetPair:
    yes_machine: TuringMachine
    no_machine: TuringMachine
    subject: tuple  # (T, w)

    def stats(self) -> dict:
        return {"states": self.yes_machine.n_states, "symbols": len(self.yes_machine.gamma)}


def _gadget(tm: TuringMachine, w: str, verdict: str) -> TuringMachine:
    # Layout: the input x is a clock on cells 0..|x|-1.  T's tape lives to the
    # left as marked cells t:s, with its head cell marked h:s.  Each simulated
    # step first turns the leftmost unread clock cell into a blank T-cell, so T's
    # region grows right no faster than T's head can reach it.
    for s in w:
        if s not in tm.sigma:
            raise ValueError(f"{s!r} is not an input symbol of the subject machine")
    clock = GADGET_SIGMA
    tracked = [_t(s) for s in tm.gamma] + [_h(s) for s in tm.gamma]
    gamma = (BLANK,) + clock + tuple(tracked)
    b = MachineBuilder(gamma, GADGET_SIGMA, start="init")

    # initialization: copy w leftward onto cells -|w|..-1, head mark on the first
    cells = list(w) if w else [BLANK]
    for s in gamma:
        b.add("init", s, f"copy{len(cells) - 1}", s, "L")
    for j in range(len(cells) - 1, -1, -1):
        sym = _h(cells[j]) if j == 0 else _t(cells[j])
        nxt = "seek_clock:0" if j == 0 else f"copy{j - 1}"
        move = "R" if j == 0 else "L"
        b.add(f"copy{j}", BLANK, nxt, sym, move)

    for q in tm.working_states:
        seek_clock, seek_head = f"seek_clock:{q}", f"seek_head:{q}"
        for s in tracked:
            b.add(seek_clock, s, seek_clock, s, "R")
        for c in clock:
            b.add(seek_clock, c, seek_head, _t(BLANK), "L")
        b.add(seek_clock, BLANK, "no_left", BLANK, "L")
        for s in tm.gamma:
            b.add(seek_head, _t(s), seek_head, _t(s), "L")
            nxt, wr, mv = tm.transition(q, s)
            if nxt == tm.halt:
                b.add(seek_head, _h(s), "yes_left", _t(wr), "L")
            elif mv == "S":
                b.add(seek_head, _h(s), f"seek_clock:{nxt}", _h(wr), "S")
            else:
                b.add(seek_head, _h(s), f"mark:{nxt}", _t(wr), mv)
    for q in tm.working_states:
        mark = f"mark:{q}"
        for s in tm.gamma:
            b.add(mark, _t(s), f"seek_clock:{q}", _h(s), "R")
        b.add(mark, BLANK, f"seek_clock:{q}", _h(BLANK), "R")

    for branch in ("yes", "no"):
        left, erase = f"{branch}_left", f"{branch}_erase"
        for s in tracked:
            b.add(left, s, left, s, "L")
        for c in clock:
            b.add(left, c, left, c, "L")
        b.add(left, BLANK, erase, BLANK, "R")
        for s in tracked + list(clock):
            b.add(erase, s, erase, BLANK, "R")
    b.add("yes_erase", BLANK, "yes_write", BLANK, "S")
    b.add("yes_write", BLANK, "halt", verdict, "S")
    b.add("no_erase", BLANK, "halt", BLANK, "S")

    tm_g, _ = b.build(default=lambda name, s: (name, s, "S"))
    return tm_g


def halting_gadgets(tm: TuringMachine, w: str) -> HaltingGadgetPair:
    """Machines Y and N that watch T run on ``w`` for |x| steps.

    If T halts within |x| simulated steps, Y outputs 1 and N outputs 0;
    otherwise both erase the tape and halt with the empty output, along
    identical trajectories.
    """
    return HaltingGadgetPair(_gadget(tm, w, "1"), _gadget(tm, w, "0"), (tm, w))


# ---------------------------------------------------------------------------
# characteristic sets

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"


@dataclass(frozen=True)
class NotFoundWithinBounds:
    max_subset_size: int
    subsets_tried: int


@dataclass(frozen=True)
class CharacteristicSet:
    inputs: tuple
    size: int
    mass: int
    regime: str  # exhaustive | sampled
    supersets_checked: int

    def record(self) -> dict:
        return {"set": list(self.inputs), "size": self.size, "mass": self.mass,
                "regime": self.regime, "supersets_checked": self.supersets_checked}


def supersets(base, pool, cap: Optional[int] = None):
    """All S' with base <= S' <= pool and |S'| <= cap, smallest first."""
    rest = [x for x in pool if x not in base]
    limit = len(pool) if cap is None else cap
    for k in range(0, len(rest) + 1):
        if len(base) + k > limit:
            break
        for extra in itertools.combinations(rest, k):
            yield tuple(base) + extra


@dataclass
class _Oracle:
    learner: Callable
    tm: TuringMachine
    served: dict  # input -> Example
    source: object
    verify_depth: int
    budget: int
    cache: dict = field(default_factory=dict)

    def ok(self, subset) -> bool:
        key = frozenset(subset)
        hit = self.cache.get(key)
        if hit is None:
            from limitlab.harness.verify import verify_hypothesis

            h = self.learner(ExampleSet(self.served[x] for x in sorted(key, key=_lenlex)))
            hit = verify_hypothesis(h, self.tm, self.source, self.verify_depth, self.budget).agree
            self.cache[key] = hit
        return hit


def _lenlex(x):
    return (len(x), x)


def characteristic_set_search(learner, tm: TuringMachine, source, channel: Channel,
                              max_subset_size: int, verify_depth: int, budget: int = 1000,
                              exhaustive_limit: int = 12, samples: int = 200, seed: int = 0):
    """Smallest qualifying subset of the served source, or NotFoundWithinBounds.

    ``learner`` maps an ExampleSet to a hypothesis.  A subset qualifies when
    the learner's hypothesis agrees with ``tm`` for it and for every superset
    within the served source (all of them when the source has at most
    ``exhaustive_limit`` served inputs, otherwise ``samples`` seeded draws).
    Candidates are scanned by size, then mass, then input order.
    """
    served = {}
    for x in source.up_to(verify_depth):
        ex = make_example(tm, x, channel, budget)
        if isinstance(ex, Example):
            served[x] = ex
    pool = sorted(served, key=_lenlex)
    oracle = _Oracle(learner, tm, served, source, verify_depth, budget)
    exhaustive = len(pool) <= exhaustive_limit
    tried = 0
    for k in range(0, min(max_subset_size, len(pool)) + 1):
        cands = sorted(itertools.combinations(pool, k),
                       key=lambda c: (sum(served[x].size() for x in c), [_lenlex(x) for x in c]))
        for cand in cands:
            tried += 1
            if k == 0:
                continue  # the learner needs at least one example
            if not oracle.ok(cand):
                continue
            if exhaustive:
                checks = list(supersets(cand, pool))
            else:
                rng = random.Random(f"{seed}|{'|'.join(cand)}")
                rest = [x for x in pool if x not in cand]
                checks = [tuple(cand) + tuple(x for x in rest if rng.random() < 0.5)
                          for _ in range(samples)]
            if all(oracle.ok(s) for s in checks):
                mass = sum(served[x].size() for x in cand)
                return CharacteristicSet(tuple(cand), len(cand), mass,
                                         EXHAUSTIVE if exhaustive else SAMPLED, len(checks))
    return NotFoundWithinBounds(max_subset_size, tried)


def distinguishing_input(tm1: TuringMachine, tm2: TuringMachine, inputs, channel: Channel,
                         budget: int) -> Optional[str]:
    """First input whose examples differ (payload or halting status)."""
    for x in inputs:
        a = make_example(tm1, x, channel, budget)
        b = make_example(tm2, x, channel, budget)
        if isinstance(a, Example) != isinstance(b, Example):
            return x
        if isinstance(a, Example) and a != b:
            return x
    return None


def examples_coincide(tm1: TuringMachine, tm2: TuringMachine, inputs, channel: Channel,
                      budget: int) -> bool:
    return example_set(tm1, inputs, channel, budget) == example_set(tm2, inputs, channel, budget)


__all__ = [
    "CharacteristicSet",
    "DoubledMachine",
    "HaltingGadgetPair",
    "NotFoundWithinBounds",
    "characteristic_set_search",
    "covering_inputs",
    "distinguishing_input",
    "double",
    "examples_coincide",
    "fresh_symbols",
    "halting_gadgets",
    "remove_stay_moves",
    "supersets",
]
