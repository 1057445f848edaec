"""Input sources, presentation orderings and the three observation channels."""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from limitlab.machines import ActionTuple, TuringMachine, run_bounded

IOO = "ioo"
TBO = "tbo"
PTO = "pto"
CHANNELS = (IOO, TBO, PTO)


# ---------------------------------------------------------------------------
# input sources


def strings_by_length(sigma: Sequence[str], min_length: int = 0) -> Iterator[str]:
    """All strings over ``sigma`` in length-then-lexicographic order."""
    for n in itertools.count(min_length):
        for t in itertools.product(sigma, repeat=n):
            yield "".join(t)


class InputSource:
    finite = True

    def __contains__(self, x) -> bool:
        raise NotImplementedError

    def members(self) -> Iterator[str]:
        raise NotImplementedError

    def up_to(self, depth: int) -> list:
        """Members of length at most ``depth`` (finite for every source)."""
        raise NotImplementedError


class ExplicitSource(InputSource):
    def __init__(self, strings):
        self.strings = tuple(dict.fromkeys(strings))

    def __contains__(self, x):
        return x in self.strings

    def members(self):
        return iter(self.strings)

    def up_to(self, depth):
        return [x for x in self.strings if len(x) <= depth]

    def __len__(self):
        return len(self.strings)

    def __repr__(self):
        return f"ExplicitSource({list(self.strings)!r})"


class LengthBounded(InputSource):
    def __init__(self, sigma, max_length, min_length=1):
        self.sigma = tuple(sigma)
        self.max_length = max_length
        self.min_length = min_length

    def __contains__(self, x):
        return self.min_length <= len(x) <= self.max_length and all(c in self.sigma for c in x)

    def members(self):
        return itertools.takewhile(lambda x: len(x) <= self.max_length,
                                   strings_by_length(self.sigma, self.min_length))

    def up_to(self, depth):
        return [x for x in self.members() if len(x) <= depth]

    def __len__(self):
        k = len(self.sigma)
        return sum(k ** n for n in range(self.min_length, self.max_length + 1))

    def __repr__(self):
        return f"LengthBounded({''.join(self.sigma)!r}, {self.min_length}..{self.max_length})"


class PredicateSource(InputSource):
    """Strings over ``sigma`` accepted by a decidable predicate; infinite."""

    finite = False

    def __init__(self, sigma, predicate: Callable[[str], bool], min_length=0):
        self.sigma = tuple(sigma)
        self.predicate = predicate
        self.min_length = min_length

    def __contains__(self, x):
        return all(c in self.sigma for c in x) and len(x) >= self.min_length and self.predicate(x)

    def members(self):
        return (x for x in strings_by_length(self.sigma, self.min_length) if self.predicate(x))

    def up_to(self, depth):
        out = []
        for n in range(self.min_length, depth + 1):
            for t in itertools.product(self.sigma, repeat=n):
                x = "".join(t)
                if self.predicate(x):
                    out.append(x)
        return out


# ---------------------------------------------------------------------------
# orderings

ROUND_ROBIN = "round_robin"
SHUFFLE = "shuffle"
SCRIPT = "script"


class ScriptExhausted(IndexError):
    pass


@dataclass(frozen=True)
class Ordering:
    """A surjective presentation ``t -> source member`` (t starts at 1).

    ``round_robin`` cycles through the members in source order; ``shuffle``
    presents one seeded permutation per epoch, so every member appears within
    each block of ``len(source)`` positions; ``script`` follows explicit member
    indices and then either cycles (``then="cycle"``), falls back to round
    robin (``then="round_robin"``) or raises (``then=None``).
    Infinite sources are dovetailed: epoch ``e`` covers the first ``e + 1``
    members.
    """

    source: InputSource
    strategy: str = ROUND_ROBIN
    seed: int = 0
    script: tuple = ()
    then: Optional[str] = "cycle"

    def label(self) -> str:
        if self.strategy == SCRIPT:
            return "script:" + "-".join(map(str, self.script))
        if self.strategy == SHUFFLE:
            return f"shuffle:{self.seed}"
        return self.strategy


class _Members:
    """Lazily materialized member list, shared per source object."""

    _cache: dict = {}

    @classmethod
    def get(cls, source, n):
        key = id(source)
        entry = cls._cache.get(key)
        if entry is None or entry[0] is not source:
            entry = (source, [], source.members())
            cls._cache[key] = entry
        _, items, it = entry
        while len(items) < n:
            try:
                items.append(next(it))
            except StopIteration:
                break
        return items


def _epoch_position(t: int) -> tuple[int, int]:
    # infinite dovetail: epoch e has length e + 1
    e = int((math.isqrt(8 * (t - 1) + 1) - 1) // 2)
    start = e * (e + 1) // 2
    return e, (t - 1) - start


def _shuffled(seed: int, epoch: int, n: int) -> list:
    rng = random.Random((seed << 32) ^ (epoch * 0x9E3779B1))
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def next_input(ordering: Ordering, t: int) -> str:
    if t < 1:
        raise ValueError("time starts at 1")
    src = ordering.source
    strategy = ordering.strategy
    if strategy == SCRIPT:
        script = ordering.script
        if t <= len(script):
            return _member(src, script[t - 1])
        if ordering.then == "cycle" and script:
            return _member(src, script[(t - 1) % len(script)])
        if ordering.then == ROUND_ROBIN:
            return next_input(Ordering(src, ROUND_ROBIN, ordering.seed), t - len(script))
        raise ScriptExhausted(f"script of length {len(script)} exhausted at t={t}")
    if src.finite:
        members = _Members.get(src, 1 << 62)
        n = len(members)
        if n == 0:
            raise ValueError("empty input source")
        epoch, pos = divmod(t - 1, n)
        if strategy == ROUND_ROBIN:
            return members[pos]
        if strategy == SHUFFLE:
            return members[_shuffled(ordering.seed, epoch, n)[pos]]
    else:
        epoch, pos = _epoch_position(t)
        members = _Members.get(src, epoch + 1)
        if strategy == ROUND_ROBIN:
            return members[pos]
        if strategy == SHUFFLE:
            return members[_shuffled(ordering.seed, epoch, epoch + 1)[pos]]
    raise ValueError(f"unknown ordering strategy {strategy!r}")


def _member(src, i):
    members = _Members.get(src, i + 1)
    if i >= len(members):
        raise IndexError(f"script index {i} outside the source")
    return members[i]


# ---------------------------------------------------------------------------
# examples


@dataclass(frozen=True)
class Channel:
    kind: str = IOO
    scale: int = 1  # p: ground-truth steps <= scale * bound
    slack: int = 0  # maximum extra added to a time bound
    seed: int = 0

    def __post_init__(self):
        if self.kind not in CHANNELS:
            raise ValueError(f"unknown channel {self.kind!r}")
        if self.scale < 1 or self.slack < 0:
            raise ValueError("scale must be >= 1 and slack >= 0")


@dataclass(frozen=True)
class Example:
    x: str
    y: Optional[str]  # None: halted with an undefined output
    kind: str = IOO
    bound: Optional[int] = None  # time bound for TBO
    trace: Optional[tuple] = None  # action tuples for PTO

    def alpha(self) -> dict:
        if self.kind == TBO:
            return {"kind": TBO, "bound": self.bound}
        if self.kind == PTO:
            return {"kind": PTO, "trace": [list(a) for a in self.trace]}
        return {"kind": IOO}

    def record(self, t: Optional[int] = None) -> dict:
        rec = {}
        if t is not None:
            rec["t"] = t
        rec["x"] = self.x
        rec["y"] = self.y
        rec["alpha"] = self.alpha()
        return rec

    def to_json(self, t: Optional[int] = None) -> str:
        return json.dumps(self.record(t), separators=(",", ":"), ensure_ascii=False)

    @classmethod
    def from_record(cls, rec: dict) -> "Example":
        alpha = rec["alpha"]
        kind = alpha["kind"]
        trace = None
        if kind == PTO:
            trace = tuple(ActionTuple(*a) for a in alpha["trace"])
        return cls(rec["x"], rec["y"], kind, alpha.get("bound"), trace)

    def size(self) -> int:
        """Byte length of the record serialization without the time field."""
        return len(self.to_json().encode("utf-8"))


@dataclass(frozen=True)
class NonHaltingWithinBudget:
    x: str
    budget: int


def time_bound(steps: int, channel: Channel, x: str) -> int:
    bound = -(-steps // channel.scale)
    if channel.slack:
        rng = random.Random(f"{channel.seed}|{x}")
        bound += rng.randint(0, channel.slack)
    return bound


def make_example(tm: TuringMachine, x: str, channel: Channel, budget: int):
    """Example for ``x`` on ``channel``, or NonHaltingWithinBudget."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    out = run_bounded(tm, x, budget, trace=channel.kind == PTO)
    if not out.halted:
        return NonHaltingWithinBudget(x, budget)
    if channel.kind == TBO:
        return Example(x, out.output, TBO, bound=time_bound(out.steps, channel, x))
    if channel.kind == PTO:
        return Example(x, out.output, PTO, trace=out.trace)
    return Example(x, out.output, IOO)


class ExampleSet:
    """Examples keyed by input; at most one per input."""

    def __init__(self, examples=()):
        self._by_input = {}
        for ex in examples:
            self.add(ex)

    def add(self, ex: Example) -> bool:
        """Insert ``ex``; return True if the input was new."""
        old = self._by_input.get(ex.x)
        if old is not None:
            if old != ex:
                raise ValueError(f"conflicting examples for input {ex.x!r}")
            return False
        self._by_input[ex.x] = ex
        return True

    def __contains__(self, x):
        return x in self._by_input

    def __getitem__(self, x) -> Example:
        return self._by_input[x]

    def __iter__(self):
        return iter(self._by_input.values())

    def __len__(self):
        return len(self._by_input)

    def inputs(self) -> list:
        return list(self._by_input)

    def sorted(self) -> list:
        return sorted(self._by_input.values(), key=lambda e: (len(e.x), e.x))

    def union(self, other: "ExampleSet") -> "ExampleSet":
        return ExampleSet(list(self) + list(other))

    def __eq__(self, other):
        return isinstance(other, ExampleSet) and self._by_input == other._by_input

    def mass(self) -> int:
        return mass(self)


def mass(es) -> int:
    """Total serialized length of the (input, output, payload) triples."""
    return sum(ex.size() for ex in es)


def example_set(tm: TuringMachine, inputs, channel: Channel, budget: int) -> ExampleSet:
    """E_M(S) for the inputs that halt within ``budget``."""
    out = ExampleSet()
    for x in inputs:
        ex = make_example(tm, x, channel, budget)
        if isinstance(ex, Example):
            out.add(ex)
    return out
