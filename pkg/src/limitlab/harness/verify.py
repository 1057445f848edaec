"""Checking a hypothesis against the ground truth on a source."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

from limitlab.machines import TuringMachine, run_bounded, serialize_tm
from limitlab.transducers import (
    PartialTransducer,
    Transducer,
    canonical,
    minimize,
    run,
    serialize_fst,
)

AGREE = "agree"
DISAGREE = "disagree"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: Optional[str] = None  # least disagreeing input
    inconclusive: tuple = field(default=())  # inputs where a budget ran out

    @property
    def agree(self) -> bool:
        return self.kind == AGREE

    def __str__(self):
        if self.kind == DISAGREE:
            return f"disagree({self.witness!r})"
        if self.kind == INCONCLUSIVE:
            return f"inconclusive({len(self.inconclusive)} inputs)"
        return "agree"


def _tm_value(tm: TuringMachine, x: str, budget: int):
    """('ok', output) | ('diverged', None) | ('budget', None)"""
    out = run_bounded(tm, x, budget)
    if out.halted:
        return "ok", out.output
    return ("diverged" if out.diverged else "budget"), None


def _fst_value(m: PartialTransducer, x):
    u = tuple(x)
    if not u:
        return "diverged", None  # transducers are silent on the empty string
    out = run(m, u)
    if out is None:
        return "diverged", None
    return "ok", out[-1]


def _value(h, x, budget):
    if isinstance(h, TuringMachine):
        return _tm_value(h, x, budget)
    return _fst_value(h, x)


def verify_hypothesis(h, truth, source, depth: int, budget: int) -> Verdict:
    """Compare ``h`` and ``truth`` on every source member of length <= depth.

    Inputs on which the truth provably runs forever lie outside its domain and
    are skipped.  A disagreement on any input decides the verdict; otherwise a
    budget running out on either side makes it inconclusive.
    """
    blocked = []
    for x in sorted(source.up_to(depth), key=lambda s: (len(s), s)):
        tk, tv = _value(truth, x, budget)
        if tk == "diverged":
            continue
        hk, hv = _value(h, x, budget)
        if tk == "budget" or hk == "budget":
            blocked.append(x)
            continue
        if hk == "diverged" or hv != tv:
            return Verdict(DISAGREE, x)
    if blocked:
        return Verdict(INCONCLUSIVE, inconclusive=tuple(blocked))
    return Verdict(AGREE)


def hypothesis_hash(h) -> str:
    """Stable short hash: serialized machine, or canonical minimal transducer."""
    if isinstance(h, TuringMachine):
        text = serialize_tm(h)
    elif isinstance(h, Transducer):
        text = serialize_fst(minimize(h)[0])
    elif isinstance(h, PartialTransducer):
        text = serialize_fst(canonical(h))
    else:
        raise TypeError(f"cannot hash {type(h).__name__}")
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
