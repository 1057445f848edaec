"""Learning by enumeration from input-output and time-bound observations.

A candidate index ``i`` is *(t, C)-valid* when ``i <= C`` and the machine
reproduces every seen output within the per-input step budget derived from C.
The learner returns the least valid index, raising C until one exists.
Indices rejected for a wrong output are never reconsidered; indices that were
merely too slow are re-checked whenever C grows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from limitlab.machines import Enumeration, Simulation, TuringMachine, tape_output
from limitlab.observations import IOO, TBO, Example, ExampleSet

WRONG_OUTPUT = "WrongOutput"
TOO_SLOW = "TooSlow"

CONSISTENT = "consistent"
POLY = "poly"


def linear_bound(c: int, n: int) -> int:
    return c * (n + 1)


def quadratic_bound(c: int, n: int) -> int:
    return c * (n + 1) ** 2


def identity_overhead(c: int, m: int) -> int:
    return m


def square_overhead(c: int, m: int) -> int:
    return m * m


BOUNDS = {"linear": linear_bound, "quadratic": quadratic_bound}
OVERHEADS = {"identity": identity_overhead, "square": square_overhead}


class RunCache:
    """Resumable runs of enumerated machines keyed by (index, input).

    Runs are pure, so one cache may be shared by any number of learners over
    the same enumeration.
    """

    def __init__(self, enumeration: Enumeration):
        self.enumeration = enumeration
        self._machines = {}
        self._runs = {}
        self.simulated_steps = 0

    def machine(self, index: int) -> TuringMachine:
        tm = self._machines.get(index)
        if tm is None:
            tm = self._machines[index] = self.enumeration[index]
        return tm

    def run(self, index: int, x: str, budget: int):
        """``(output, steps)`` if the run halts within ``budget``, else None."""
        key = (index, x)
        entry = self._runs.get(key)
        if isinstance(entry, tuple):
            return entry if entry[1] <= budget else None
        if entry is None:
            entry = Simulation(self.machine(index), x)
        if entry.diverged or entry.steps >= budget:
            self._runs[key] = entry
            return None
        before = entry.steps
        halted = entry.advance(budget)
        self.simulated_steps += entry.steps - before
        if halted:
            result = (tape_output(entry.tm, entry.cfg.tape), entry.steps)
            self._runs[key] = result
            return result
        self._runs[key] = entry
        return None


@dataclass
class EnumConfig:
    gamma: tuple
    sigma: tuple
    bound: Callable[[int, int], int] = linear_bound  # Q(c, n)
    overhead: Callable[[int, int], int] = identity_overhead  # q(c, m)
    mode: str = CONSISTENT
    # POLY mode: simulated-step allowance as a function of the observation mass
    work_cap: Callable[[int], int] = lambda size: 20 * size * size
    max_counter: int = 1_000_000

    def enumeration(self) -> Enumeration:
        return Enumeration(self.gamma, self.sigma)


@dataclass
class EnumLearnerState:
    C: int = 1
    discarded: dict = field(default_factory=dict)  # index -> reason
    hypothesis: Optional[int] = None
    seen: ExampleSet = field(default_factory=ExampleSet)

    def dumps(self) -> str:
        lines = ["enum-checkpoint 1", f"C {self.C}", f"hypothesis {self.hypothesis or 0}"]
        for i in sorted(self.discarded):
            lines.append(f"discarded {i} {self.discarded[i]}")
        for ex in self.seen:
            lines.append("seen " + ex.to_json())
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "EnumLearnerState":
        lines = text.splitlines()
        if not lines or lines[0] != "enum-checkpoint 1":
            raise ValueError("not an enumeration-learner checkpoint")
        state = cls()
        for ln in lines[1:]:
            key, _, rest = ln.partition(" ")
            if key == "C":
                state.C = int(rest)
            elif key == "hypothesis":
                state.hypothesis = int(rest) or None
            elif key == "discarded":
                i, reason = rest.split()
                state.discarded[int(i)] = reason
            elif key == "seen":
                state.seen.add(Example.from_record(json.loads(rest)))
            elif ln.strip():
                raise ValueError(f"unknown checkpoint line {ln!r}")
        return state


def _budget(config: EnumConfig, C: int, ex: Example) -> int:
    if ex.kind == TBO:
        return config.overhead(C, C * ex.bound)
    return config.overhead(C, C * config.bound(C, len(ex.x)))


def _check(cache: RunCache, config: EnumConfig, index: int, C: int, examples) -> Optional[str]:
    """None when valid, else the discard reason."""
    slow = False
    for ex in examples:
        res = cache.run(index, ex.x, _budget(config, C, ex))
        if res is None:
            slow = True
        elif res[0] != ex.y:
            return WRONG_OUTPUT
    return TOO_SLOW if slow else None


def enum_step(state: EnumLearnerState, ex: Example, config: EnumConfig,
              cache: Optional[RunCache] = None) -> tuple[EnumLearnerState, TuringMachine]:
    """Feed one example and return the updated state and hypothesis."""
    if cache is None:
        cache = RunCache(config.enumeration())
    new = state.seen.add(ex)
    if not new and state.hypothesis is not None:
        return state, cache.machine(state.hypothesis)
    examples = state.seen.sorted()
    if config.mode == POLY:
        return _poly_step(state, examples, config, cache)

    C = state.C
    first = state.hypothesis or 1
    while C <= config.max_counter:
        for i in range(first, C + 1):
            if state.discarded.get(i) == WRONG_OUTPUT:
                continue
            reason = _check(cache, config, i, C, examples)
            if reason is None:
                state.discarded.pop(i, None)
                state.C = C
                state.hypothesis = i
                return state, cache.machine(i)
            state.discarded[i] = reason
        C += 1
        first = 1
    raise RuntimeError(f"counter exceeded {config.max_counter}")


def _poly_step(state, examples, config, cache):
    # scan under a work allowance; on exhaustion return the least index
    # not yet discarded, consistent or not
    allowance = config.work_cap(sum(e.size() for e in examples))
    spent_before = cache.simulated_steps
    C = state.C
    first = state.hypothesis or 1
    while C <= config.max_counter:
        for i in range(first, C + 1):
            if state.discarded.get(i) == WRONG_OUTPUT:
                continue
            reason = _check(cache, config, i, C, examples)
            if reason is None:
                state.discarded.pop(i, None)
                state.C = C
                state.hypothesis = i
                return state, cache.machine(i)
            state.discarded[i] = reason
            if cache.simulated_steps - spent_before > allowance:
                state.C = C
                i = 1
                while i in state.discarded:
                    i += 1
                state.hypothesis = i
                return state, cache.machine(i)
        C += 1
        first = 1
    raise RuntimeError(f"counter exceeded {config.max_counter}")


def enum_ioo_step(state, ex: Example, config: EnumConfig, cache=None):
    if ex.kind != IOO:
        raise ValueError("the input-output learner takes examples with an empty payload")
    return enum_step(state, ex, config, cache)


def enum_tbo_step(state, ex: Example, config: EnumConfig, cache=None):
    if ex.kind != TBO:
        raise ValueError("the time-bound learner takes examples with a time bound")
    return enum_step(state, ex, config, cache)


class EnumerationLearner:
    """Convenience wrapper owning a state, a config and a run cache."""

    def __init__(self, config: EnumConfig, cache: Optional[RunCache] = None):
        self.config = config
        self.cache = cache or RunCache(config.enumeration())
        self.state = EnumLearnerState()

    def feed(self, ex: Example) -> TuringMachine:
        self.state, h = enum_step(self.state, ex, self.config, self.cache)
        return h

    @property
    def index(self) -> Optional[int]:
        return self.state.hypothesis

    def learn(self, examples) -> TuringMachine:
        """Feed a batch in length-lexicographic order; return the final hypothesis."""
        h = None
        for ex in sorted(examples, key=lambda e: (len(e.x), e.x)):
            h = self.feed(ex)
        if h is None:
            raise ValueError("no examples")
        return h
