"""Deterministic single-tape Turing machines.

States are the integers ``0 .. n_states-1``; state 0 is the start state and the
last state is the halt state, which carries no transitions.  The tape alphabet
``gamma`` is an ordered tuple of symbol tokens whose first entry is the blank.
Problem-alphabet symbols (``sigma``) are single characters, so inputs and
outputs are plain Python strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Sequence

BLANK = "_"
MOVES = ("L", "R", "S")
SHIFT = {"L": -1, "R": 1, "S": 0}

HALTED = "halted"
OUT_OF_BUDGET = "out_of_budget"


class ActionTuple(NamedTuple):
    """One observable step: symbol read, symbol written, head move."""

    read: str
    write: str
    move: str


@dataclass(frozen=True)
class TuringMachine:
    n_states: int
    gamma: tuple
    sigma: tuple
    # delta[q][i] = (next_state, written symbol index, move) for q < halt
    delta: tuple
    _rows: tuple = field(init=False, repr=False, compare=False, hash=False)
    _escape: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.n_states < 2:
            raise ValueError("a machine needs a start state and a distinct halt state")
        if not self.gamma or self.gamma[0] != BLANK:
            raise ValueError(f"gamma must start with the blank symbol {BLANK!r}")
        if len(set(self.gamma)) != len(self.gamma):
            raise ValueError("duplicate tape symbols")
        for s in self.sigma:
            if s == BLANK or s not in self.gamma:
                raise ValueError(f"problem symbol {s!r} must be a non-blank tape symbol")
            if len(s) != 1:
                raise ValueError(f"problem symbol {s!r} must be a single character")
        if len(self.delta) != self.n_states - 1:
            raise ValueError("delta must have one row per non-halt state")
        rows = []
        for q, row in enumerate(self.delta):
            if len(row) != len(self.gamma):
                raise ValueError(f"state {q} does not define every tape symbol")
            entries = {}
            for i, (nxt, w, mv) in enumerate(row):
                if not 0 <= nxt < self.n_states or not 0 <= w < len(self.gamma) or mv not in MOVES:
                    raise ValueError(f"malformed transition at ({q}, {self.gamma[i]!r})")
                entries[self.gamma[i]] = (nxt, self.gamma[w], SHIFT[mv], mv)
            rows.append(entries)
        object.__setattr__(self, "_rows", tuple(rows))
        object.__setattr__(self, "_escape", {})

    @property
    def start(self) -> int:
        return 0

    @property
    def halt(self) -> int:
        return self.n_states - 1

    @property
    def working_states(self) -> range:
        return range(self.n_states - 1)

    def transition(self, state: int, symbol: str) -> tuple[int, str, str]:
        nxt, w, _, mv = self._rows[state][symbol]
        return nxt, w, mv

    def transitions(self) -> Iterator[tuple[int, str, int, str, str]]:
        """Yield ``(state, read, next, write, move)`` in (state, symbol) order."""
        for q in self.working_states:
            for s in self.gamma:
                nxt, w, mv = self.transition(q, s)
                yield q, s, nxt, w, mv

    def has_stay_moves(self) -> bool:
        return any(mv == "S" for *_, mv in self.transitions())


def build_tm(n_states: int, gamma: Sequence[str], sigma: Sequence[str], table: dict) -> TuringMachine:
    """Build from ``{(state, read): (next, write, move)}`` using symbol tokens."""
    gamma = tuple(gamma)
    pos = {s: i for i, s in enumerate(gamma)}
    delta = []
    for q in range(n_states - 1):
        row = []
        for s in gamma:
            if (q, s) not in table:
                raise ValueError(f"missing transition for (q{q}, {s})")
            nxt, w, mv = table[q, s]
            row.append((nxt, pos[w], mv))
        delta.append(tuple(row))
    return TuringMachine(n_states, gamma, tuple(sigma), tuple(delta))


class MachineBuilder:
    """Assemble a machine from named states.

    The start state is numbered 0, the halt state last, and the remaining states
    follow in order of first mention.  Rows left undefined are filled by
    ``default(state_name, symbol)`` when given.
    """

    def __init__(self, gamma, sigma, start="start", halt="halt"):
        self.gamma = tuple(gamma)
        self.sigma = tuple(sigma)
        self.start = start
        self.halt = halt
        self._names = [start]
        self._table = {}

    def state(self, name):
        if name != self.halt and name not in self._names:
            self._names.append(name)
        return name

    def add(self, state, read, nxt, write, move):
        self.state(state)
        self.state(nxt)
        if state == self.halt:
            raise ValueError("the halt state carries no transitions")
        self._table[state, read] = (nxt, write, move)

    def build(self, default=None) -> tuple[TuringMachine, dict]:
        names = list(self._names) + [self.halt]
        index = {name: i for i, name in enumerate(names)}
        table = {}
        for name in names[:-1]:
            for s in self.gamma:
                if (name, s) in self._table:
                    nxt, w, mv = self._table[name, s]
                elif default is not None:
                    nxt, w, mv = default(name, s)
                else:
                    raise ValueError(f"missing transition for ({name}, {s})")
                table[index[name], s] = (index[nxt], w, mv)
        return build_tm(len(names), self.gamma, self.sigma, table), index


# ---------------------------------------------------------------------------
# simulation


@dataclass
class TapeConfiguration:
    tape: dict
    head: int
    state: int
    # extent of cells that have ever held a non-blank symbol
    lo: int = 0
    hi: int = -1

    @classmethod
    def initial(cls, x: str) -> "TapeConfiguration":
        tape = {i: s for i, s in enumerate(x)}
        return cls(tape, 0, 0, 0, len(x) - 1)

    def read(self) -> str:
        return self.tape.get(self.head, BLANK)

    def write(self, symbol: str) -> None:
        if symbol == BLANK:
            self.tape.pop(self.head, None)
        else:
            self.tape[self.head] = symbol
            if self.head < self.lo:
                self.lo = self.head
            if self.head > self.hi:
                self.hi = self.head

    def copy(self) -> "TapeConfiguration":
        return TapeConfiguration(dict(self.tape), self.head, self.state, self.lo, self.hi)


def step(tm: TuringMachine, cfg: TapeConfiguration) -> Optional[ActionTuple]:
    """Apply one transition in place; return ``None`` if ``cfg`` is halted."""
    if cfg.state == tm.halt:
        return None
    read = cfg.read()
    nxt, write, shift, mv = tm._rows[cfg.state][read]
    cfg.write(write)
    cfg.head += shift
    cfg.state = nxt
    return ActionTuple(read, write, mv)


def tape_output(tm: TuringMachine, tape: dict) -> Optional[str]:
    """The single contiguous problem-alphabet string on the tape, else None."""
    if not tape:
        return ""
    cells = sorted(tape)
    if cells[-1] - cells[0] + 1 != len(cells):
        return None
    out = [tape[c] for c in cells]
    sigma = set(tm.sigma)
    if any(s not in sigma for s in out):
        return None
    return "".join(out)


def _escapes(tm: TuringMachine, state: int, direction: int) -> bool:
    """True if, entering a fresh blank cell with only blanks beyond it in
    ``direction``, the machine provably never halts."""
    key = (state, direction)
    cache = tm._escape
    if key in cache:
        return cache[key]
    entered = set()
    q = state
    result = False
    while True:
        if q in entered:
            result = True
            break
        entered.add(q)
        symbol = BLANK
        in_cell = set()
        while True:
            if q == tm.halt:
                cache[key] = False
                return False
            if (q, symbol) in in_cell:
                cache[key] = True
                return True
            in_cell.add((q, symbol))
            nxt, w, shift, _ = tm._rows[q][symbol]
            q, symbol = nxt, w
            if shift == direction:
                break
            if shift != 0:
                cache[key] = False
                return False
        if q == tm.halt:
            break
    cache[key] = result
    return result


class Simulation:
    """A resumable run of ``tm`` on ``x`` from the standard initial configuration."""

    def __init__(self, tm: TuringMachine, x: str, record_trace: bool = False):
        self.tm = tm
        self.x = x
        self.cfg = TapeConfiguration.initial(x)
        self.steps = 0
        self.diverged = False
        self.trace = [] if record_trace else None

    @property
    def halted(self) -> bool:
        return self.cfg.state == self.tm.halt

    def advance(self, budget: int) -> bool:
        """Run until halted, diverged, or ``steps == budget``; return ``halted``."""
        tm, cfg = self.tm, self.cfg
        rows, halt = tm._rows, tm.halt
        tape = cfg.tape
        trace = self.trace
        steps = self.steps
        state, head = cfg.state, cfg.head
        while state != halt and steps < budget and not self.diverged:
            if head > cfg.hi and _escapes(tm, state, 1):
                self.diverged = True
                break
            if head < cfg.lo and _escapes(tm, state, -1):
                self.diverged = True
                break
            read = tape.get(head, BLANK)
            nxt, write, shift, mv = rows[state][read]
            if nxt == state and shift == 0 and write == read:
                self.diverged = True
                break
            if write == BLANK:
                tape.pop(head, None)
            else:
                tape[head] = write
                if head < cfg.lo:
                    cfg.lo = head
                if head > cfg.hi:
                    cfg.hi = head
            if trace is not None:
                trace.append(ActionTuple(read, write, mv))
            head += shift
            state = nxt
            steps += 1
        cfg.state, cfg.head = state, head
        self.steps = steps
        return state == halt

    def outcome(self) -> "RunOutcome":
        if self.halted:
            trace = tuple(self.trace) if self.trace is not None else None
            return RunOutcome(HALTED, tape_output(self.tm, self.cfg.tape), self.steps, trace)
        return RunOutcome(OUT_OF_BUDGET, diverged=self.diverged)


@dataclass(frozen=True)
class RunOutcome:
    tag: str
    output: Optional[str] = None
    steps: Optional[int] = None
    trace: Optional[tuple] = None
    # set when the simulator proved the run never halts
    diverged: bool = field(default=False, compare=False)

    @property
    def halted(self) -> bool:
        return self.tag == HALTED


def run_bounded(tm: TuringMachine, x: str, budget: int, trace: bool = False) -> RunOutcome:
    if budget < 0:
        raise ValueError("budget must be non-negative")
    sim = Simulation(tm, x, record_trace=trace)
    sim.advance(budget)
    return sim.outcome()


class BudgetExceeded(Exception):
    def __init__(self, x, budget):
        super().__init__(f"run on {x!r} did not halt within {budget} steps")
        self.x = x
        self.budget = budget


class TapeBehavior(NamedTuple):
    scanned: tuple  # T{x}
    actions: tuple  # T[x]


def tape_behavior(tm: TuringMachine, x: str, budget: int) -> TapeBehavior:
    out = run_bounded(tm, x, budget, trace=True)
    if not out.halted:
        raise BudgetExceeded(x, budget)
    return TapeBehavior(tuple(a.read for a in out.trace), out.trace)


# ---------------------------------------------------------------------------
# enumeration


class Enumeration:
    """Bijection between indices ``1, 2, ...`` and canonical machines over ``gamma``.

    Machines are grouped by ascending state count (from 2), and inside a group
    ordered in mixed radix over the (state, symbol) entries of the table, most
    significant entry first.  Entry digit ``((next * |gamma|) + write) * 3 + move``.
    """

    def __init__(self, gamma: Sequence[str], sigma: Sequence[str]):
        self.gamma = tuple(gamma)
        self.sigma = tuple(sigma)
        if self.gamma[0] != BLANK:
            raise ValueError("gamma must start with the blank symbol")

    def radix(self, n_states: int) -> int:
        return n_states * len(self.gamma) * 3

    def count(self, n_states: int) -> int:
        return self.radix(n_states) ** ((n_states - 1) * len(self.gamma))

    def group_start(self, n_states: int) -> int:
        return 1 + sum(self.count(n) for n in range(2, n_states))

    def __getitem__(self, index: int) -> TuringMachine:
        if index < 1:
            raise IndexError("enumeration indices start at 1")
        k = index - 1
        n = 2
        while k >= self.count(n):
            k -= self.count(n)
            n += 1
        base = self.radix(n)
        g = len(self.gamma)
        entries = (n - 1) * g
        digits = []
        for _ in range(entries):
            k, d = divmod(k, base)
            digits.append(d)
        digits.reverse()
        delta = []
        for q in range(n - 1):
            row = []
            for i in range(g):
                d = digits[q * g + i]
                rest, mv = divmod(d, 3)
                nxt, w = divmod(rest, g)
                row.append((nxt, w, MOVES[mv]))
            delta.append(tuple(row))
        return TuringMachine(n, self.gamma, self.sigma, tuple(delta))

    def index_of(self, tm: TuringMachine) -> int:
        if tm.gamma != self.gamma:
            raise ValueError("machine is over a different tape alphabet")
        n = tm.n_states
        base = self.radix(n)
        g = len(self.gamma)
        k = 0
        for row in tm.delta:
            for nxt, w, mv in row:
                k = k * base + (nxt * g + w) * 3 + MOVES.index(mv)
        return self.group_start(n) + k

    def __iter__(self) -> Iterator[TuringMachine]:
        i = 1
        while True:
            yield self[i]
            i += 1


# ---------------------------------------------------------------------------
# text format


class ParseError(ValueError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def serialize_tm(tm: TuringMachine) -> str:
    lines = [f"tm states={tm.n_states} gamma={','.join(tm.gamma)} sigma={','.join(tm.sigma)}"]
    for q, s, nxt, w, mv in tm.transitions():
        lines.append(f"q{q} {s} -> q{nxt} {w} {mv}")
    return "\n".join(lines) + "\n"


_HEADER = re.compile(r"^tm\s+states=(\S+)\s+gamma=(\S+)\s+sigma=(\S*)\s*$")
_LINE = re.compile(r"^q(\d+)\s+(\S+)\s+->\s+q(\d+)\s+(\S+)\s+(\S+)\s*$")


def parse_tm(text: str) -> TuringMachine:
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines())]
    body = [(no, ln) for no, ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise ParseError("empty machine description", 1)
    no, head = body[0]
    m = _HEADER.match(head.strip())
    if not m:
        raise ParseError("expected header 'tm states=<n> gamma=<symbols> sigma=<symbols>'", no)
    try:
        n = int(m.group(1))
    except ValueError:
        raise ParseError(f"state count {m.group(1)!r} is not an integer", no, head.index("states=") + 8)
    if n < 2:
        raise ParseError("a machine needs at least 2 states", no, head.index("states=") + 8)
    gamma = tuple(m.group(2).split(","))
    sigma = tuple(s for s in m.group(3).split(",") if s)
    if gamma[0] != BLANK:
        raise ParseError(f"gamma must start with the blank {BLANK!r}", no, head.index("gamma=") + 7)
    for s in sigma:
        if s not in gamma or s == BLANK or len(s) != 1:
            raise ParseError(f"bad problem symbol {s!r}", no, head.index("sigma=") + 7)
    table = {}
    for no, ln in body[1:]:
        m = _LINE.match(ln.strip())
        col = len(ln) - len(ln.lstrip()) + 1
        if not m:
            raise ParseError("expected 'q<i> <sym> -> q<j> <sym> <L|R|S>'", no, col)
        q, s, nxt, w, mv = int(m.group(1)), m.group(2), int(m.group(3)), m.group(4), m.group(5)
        if q == n - 1:
            raise ParseError(f"transition declared from the halt state q{q}", no, col)
        if q >= n or nxt >= n:
            raise ParseError(f"state index out of range (states={n})", no, col)
        if s not in gamma:
            raise ParseError(f"unknown tape symbol {s!r}", no, ln.index(s, col))
        if w not in gamma:
            raise ParseError(f"unknown tape symbol {w!r}", no, ln.rindex(w))
        if mv not in MOVES:
            raise ParseError(f"unknown move {mv!r}", no, ln.rindex(mv) + 1)
        if (q, s) in table:
            raise ParseError(f"duplicate transition for (q{q}, {s})", no, col)
        table[q, s] = (nxt, w, mv)
    last = lines[-1][0] if lines else 1
    for q in range(n - 1):
        for s in gamma:
            if (q, s) not in table:
                raise ParseError(f"missing transition for (q{q}, {s})", last)
    return build_tm(n, gamma, sigma, table)
