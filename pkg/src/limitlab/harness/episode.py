"""Learning episodes: present examples in order, feed a learner, watch the hypothesis."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from limitlab.harness.verify import Verdict, hypothesis_hash, verify_hypothesis
from limitlab.learners.enumeration import (
    BOUNDS,
    CONSISTENT,
    OVERHEADS,
    EnumConfig,
    EnumerationLearner,
)
from limitlab.learners.merging import build_observation_tree, msm
from limitlab.learners.reduction import RationalLearner, action_alphabet, fst_to_tm, pto_reduce
from limitlab.machines import TuringMachine, run_bounded
from limitlab.observations import (
    PTO,
    Channel,
    Example,
    ExampleSet,
    InputSource,
    Ordering,
    make_example,
    next_input,
)
from limitlab.transducers import PartialTransducer, run

LEARNERS = ("enum", "rational", "msm")


class ConfigError(ValueError):
    pass


@dataclass
class EpisodeConfig:
    ground_truth: Union[TuringMachine, PartialTransducer]
    source: InputSource
    ordering: Ordering
    channel: Channel = field(default_factory=Channel)
    learner: str = "enum"
    mode: str = CONSISTENT
    bound: str = "linear"
    overhead: str = "identity"
    horizon: int = 100
    budget: int = 1000  # starting simulation budget for the ground truth
    verify_depth: int = 4
    verify_budget: int = 100_000
    seed: int = 0
    config_id: str = "episode"

    def validate(self) -> None:
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if self.budget < 1:
            raise ConfigError("budget must be at least 1")
        if self.learner not in LEARNERS:
            raise ConfigError(f"unknown learner {self.learner!r}; expected one of {', '.join(LEARNERS)}")
        if self.bound not in BOUNDS:
            raise ConfigError(f"unknown bound {self.bound!r}")
        if self.overhead not in OVERHEADS:
            raise ConfigError(f"unknown overhead {self.overhead!r}")
        if self.source.finite:
            longest = max((len(x) for x in self.source.members()), default=0)
            if self.verify_depth < longest:
                raise ConfigError(f"verify_depth {self.verify_depth} is below the longest "
                                  f"source input ({longest})")
        if isinstance(self.ground_truth, TuringMachine):
            if self.learner in ("rational", "msm") and self.channel.kind != PTO:
                raise ConfigError(f"learner {self.learner!r} needs the pto channel for a machine")
        elif self.learner == "enum":
            raise ConfigError("the enumeration learner needs a Turing machine ground truth")


@dataclass(frozen=True)
class StepRecord:
    t: int
    x: str
    hypothesis: Optional[str]  # hash; None while nothing has been observed
    consistent: Optional[bool]
    blocked: bool = False  # the ground truth did not halt within the budget


@dataclass
class EpisodeReport:
    config_id: str
    seed: int
    ordering: str
    channel: str
    steps: list
    converged_at: Optional[int]
    verdict: Optional[Verdict]
    samples: int
    mass: int
    wall_ms: float
    hypothesis: object = None
    final_hash: Optional[str] = None
    final_budget: int = 0

    @property
    def verified(self) -> bool:
        return self.verdict is not None and self.verdict.agree

    def row(self) -> dict:
        return {
            "config_id": self.config_id,
            "seed": self.seed,
            "ordering": self.ordering,
            "channel": self.channel,
            "converged_at": "" if self.converged_at is None else self.converged_at,
            "verified": str(self.verdict) if self.verdict is not None else "none",
            "samples": self.samples,
            "mass": self.mass,
            "wall_ms": f"{self.wall_ms:.1f}",
        }

    def dumps(self) -> str:
        """Everything but wall time, one line per step; identical across reruns."""
        lines = [f"config_id={self.config_id} seed={self.seed} ordering={self.ordering} "
                 f"channel={self.channel}"]
        for r in self.steps:
            lines.append(f"t={r.t} x={r.x!r} h={r.hypothesis} consistent={r.consistent}"
                         + (" blocked" if r.blocked else ""))
        lines.append(f"converged_at={self.converged_at} verified={self.verdict} "
                     f"samples={self.samples} mass={self.mass} hash={self.final_hash}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# learner adapters: each takes a new example and returns the current hypothesis


class _EnumAdapter:
    def __init__(self, cfg: EpisodeConfig):
        tm = cfg.ground_truth
        ec = EnumConfig(tm.gamma, tm.sigma, BOUNDS[cfg.bound], OVERHEADS[cfg.overhead], cfg.mode)
        self.learner = EnumerationLearner(ec)

    def feed(self, ex):
        return self.learner.feed(ex)


class _RationalAdapter:
    def __init__(self, cfg: EpisodeConfig):
        truth = cfg.ground_truth
        self.tm = truth if isinstance(truth, TuringMachine) else None
        if self.tm is not None:
            self.learner = RationalLearner(self.tm.gamma, action_alphabet(self.tm.gamma))
        else:
            self.learner = RationalLearner(truth.inputs, truth.outputs)

    def feed(self, ex):
        if self.tm is not None:
            (pair,) = pto_reduce([ex])
            return fst_to_tm(self.learner.feed(pair), self.tm.gamma, self.tm.sigma)
        return self.learner.feed(ex)


class _MSMAdapter:
    def __init__(self, cfg: EpisodeConfig):
        truth = cfg.ground_truth
        self.tm = truth if isinstance(truth, TuringMachine) else None
        self.pairs = []

    def feed(self, ex):
        if self.tm is not None:
            self.pairs.extend(pto_reduce([ex]))
            gamma = self.tm.gamma
            tree = build_observation_tree(self.pairs, gamma, action_alphabet(gamma), halting=True)
            return fst_to_tm(msm(tree), gamma, self.tm.sigma)
        self.pairs.append(ex)
        truth_inputs = sorted({a for u, _ in self.pairs for a in u}, key=repr)
        tree = build_observation_tree(self.pairs, truth_inputs)
        return msm(tree)


_ADAPTERS = {"enum": _EnumAdapter, "rational": _RationalAdapter, "msm": _MSMAdapter}


def _observe(cfg: EpisodeConfig, x: str, budget: int):
    truth = cfg.ground_truth
    if isinstance(truth, TuringMachine):
        return make_example(truth, x, cfg.channel, budget)
    u = tuple(x)
    if not u:
        return None  # transducers are silent on the empty input
    return (u, run(truth, u))


def _consistent(h, seen, budget) -> bool:
    for ex in seen:
        if isinstance(ex, Example):
            out = run_bounded(h, ex.x, budget)
            if not out.halted or out.output != ex.y:
                return False
        else:
            u, v = ex
            got = run(h, u)
            if got is None or got[-1] != v[-1]:
                return False
    return True


def _convergence(steps, must_see, seen_inputs) -> Optional[int]:
    if not steps or steps[-1].hypothesis is None:
        return None
    if not must_see <= seen_inputs:
        return None
    final = steps[-1].hypothesis
    t = steps[-1].t
    for r in reversed(steps):
        if r.hypothesis != final:
            break
        t = r.t
    return t


def run_episode(cfg: EpisodeConfig) -> EpisodeReport:
    """Run one episode to the horizon and verify the final hypothesis.

    Convergence is reported at the first step of the final run of unchanged
    hypotheses, and only once every served source input up to the verification
    depth has been presented; it is a within-horizon observation, not a proof.
    """
    cfg.validate()
    started = time.perf_counter()
    adapter = _ADAPTERS[cfg.learner](cfg)
    budget = cfg.budget
    seen = ExampleSet()
    pairs = {}
    steps = []
    h, h_hash, consistent = None, None, None
    checked = None
    for t in range(1, cfg.horizon + 1):
        x = next_input(cfg.ordering, t)
        ex = _observe(cfg, x, budget)
        if ex is None or (isinstance(cfg.ground_truth, TuringMachine) and not isinstance(ex, Example)):
            blocked = ex is not None
            if blocked:
                budget *= 2
            steps.append(StepRecord(t, x, h_hash, consistent, blocked))
            continue
        if isinstance(ex, Example):
            new = seen.add(ex)
        else:
            new = ex[0] not in pairs
            pairs[ex[0]] = ex
        if new or h is None:
            h = adapter.feed(ex)
            h_hash = hypothesis_hash(h)
        key = (h_hash, len(seen) + len(pairs))
        if key != checked:
            observed = list(seen) + list(pairs.values())
            consistent = _consistent(h, observed, cfg.verify_budget)
            checked = key
        steps.append(StepRecord(t, x, h_hash, consistent))

    served = set()
    for x in cfg.source.up_to(cfg.verify_depth):
        if isinstance(cfg.ground_truth, TuringMachine):
            out = run_bounded(cfg.ground_truth, x, budget)
            if out.halted:
                served.add(x)
        elif x:
            served.add(x)
    seen_inputs = {r.x for r in steps if r.hypothesis is not None and not r.blocked}
    converged = _convergence(steps, served, seen_inputs)
    verdict = None
    if h is not None:
        verdict = verify_hypothesis(h, cfg.ground_truth, cfg.source, cfg.verify_depth, cfg.verify_budget)
    examples = list(seen) if seen else []
    mass = sum(e.size() for e in examples) if examples else _pair_mass(pairs.values())
    wall = (time.perf_counter() - started) * 1000.0
    return EpisodeReport(cfg.config_id, cfg.seed, cfg.ordering.label(), cfg.channel.kind, steps,
                         converged, verdict, len(seen) + len(pairs), mass, wall, h, h_hash, budget)


def _pair_mass(pairs) -> int:
    # input-output pairs of a transducer truth: one byte per symbol on each side
    return sum(len(u) + len(v) for u, v in pairs)


def continue_episode(cfg: EpisodeConfig, factor: int = 2) -> EpisodeReport:
    """The same episode with the horizon multiplied by ``factor``."""
    return run_episode(replace(cfg, horizon=cfg.horizon * factor))
