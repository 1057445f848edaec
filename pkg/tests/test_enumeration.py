import itertools

import pytest

from limitlab.harness.verify import verify_hypothesis
from limitlab.learners.enumeration import (
    TOO_SLOW,
    WRONG_OUTPUT,
    POLY,
    EnumConfig,
    EnumerationLearner,
    EnumLearnerState,
    RunCache,
    enum_ioo_step,
    enum_step,
    enum_tbo_step,
)
from limitlab.machines import BLANK, Enumeration, run_bounded
from limitlab.observations import IOO, TBO, Channel, Example, ExplicitSource, LengthBounded, make_example

from conftest import machine

GAMMA, SIGMA = (BLANK, "a"), ("a",)


def identity_a():
    return machine(GAMMA, SIGMA, {("q0", "a"): ("q0", "a", "R"), ("q0", BLANK): ("halt", BLANK, "S")})


def feed_all(examples, config, cache=None):
    state = EnumLearnerState()
    hyps = []
    for ex in examples:
        state, h = enum_step(state, ex, config, cache)
        hyps.append((state.hypothesis, h))
        assert state.hypothesis not in state.discarded
    return state, hyps


def test_hypothesis_consistent_every_step():
    tm = identity_a()
    cfg = EnumConfig(GAMMA, SIGMA)
    exs = [make_example(tm, x, Channel(IOO), 100) for x in ["a", "aa", "aaa", ""]]
    state = EnumLearnerState()
    cache = RunCache(cfg.enumeration())
    for i, ex in enumerate(exs):
        state, h = enum_ioo_step(state, ex, cfg, cache)
        for prev in exs[: i + 1]:
            assert run_bounded(h, prev.x, 10_000).output == prev.y


def test_counter_never_decreases_and_wrong_output_is_permanent():
    tm = identity_a()
    cfg = EnumConfig(GAMMA, SIGMA)
    state = EnumLearnerState()
    cache = RunCache(cfg.enumeration())
    last_c = 0
    wrong = set()
    for x in ["aaa", "a", "", "aa", "aaaa"]:
        state, h = enum_step(state, make_example(tm, x, Channel(), 100), cfg, cache)
        assert state.C >= last_c
        last_c = state.C
        assert not (wrong & ({state.hypothesis} | {i for i, r in state.discarded.items() if r != WRONG_OUTPUT}))
        wrong |= {i for i, r in state.discarded.items() if r == WRONG_OUTPUT}


@pytest.mark.parametrize("order", list(itertools.permutations(["a", "aa", "aaa"])))
def test_identity_all_orderings(order):
    tm = identity_a()
    cfg = EnumConfig(GAMMA, SIGMA)
    learner = EnumerationLearner(cfg)
    for x in order:
        h = learner.feed(make_example(tm, x, Channel(), 100))
    assert verify_hypothesis(h, tm, ExplicitSource(order), 3, 1000).agree


def test_tbo_converges_and_stays():
    tm = identity_a()
    cfg = EnumConfig(GAMMA, SIGMA)
    learner = EnumerationLearner(cfg)
    src = LengthBounded("a", 6)
    members = list(src.members())
    hist = []
    for t in range(200):
        x = members[t % len(members)]
        learner.feed(make_example(tm, x, Channel(TBO), 100))
        hist.append(learner.index)
    final = hist[-1]
    first = hist.index(final)
    assert all(h == final for h in hist[first:])
    assert first <= len(members)
    assert verify_hypothesis(learner.cache.machine(final), tm, src, 6, 1000).agree


def test_slack_never_invalidates():
    from limitlab.learners.enumeration import _check

    tm = identity_a()
    cfg = EnumConfig(GAMMA, SIGMA)
    cache = RunCache(cfg.enumeration())
    tight = [make_example(tm, x, Channel(TBO), 100) for x in ["", "a", "aa", "aaa"]]
    loose = [Example(e.x, e.y, TBO, bound=e.bound + 10) for e in tight]
    for C in (3, 8, 20):
        for i in range(1, 150):
            if _check(cache, cfg, i, C, tight) is None:
                assert _check(cache, cfg, i, C, loose) is None


def test_small_bounds_raise_counter():
    cfg = EnumConfig(GAMMA, SIGMA)
    ex = Example("aaaa", "aaaa", TBO, bound=1)  # identity needs 5 steps
    state, h = enum_tbo_step(EnumLearnerState(), ex, cfg)
    out = run_bounded(h, "aaaa", state.C * ex.bound)
    assert out.halted and out.output == "aaaa"
    assert state.C > 1


def test_kind_checks():
    cfg = EnumConfig(GAMMA, SIGMA)
    with pytest.raises(ValueError):
        enum_ioo_step(EnumLearnerState(), Example("a", "a", TBO, bound=3), cfg)
    with pytest.raises(ValueError):
        enum_tbo_step(EnumLearnerState(), Example("a", "a"), cfg)


def test_checkpoint_round_trip_resumes_exactly():
    tm = identity_a()
    cfg = EnumConfig(GAMMA, SIGMA)
    exs = [make_example(tm, x, Channel(TBO, slack=2, seed=4), 100) for x in ["aa", "", "a", "aaa"]]
    state, _ = feed_all(exs[:2], cfg)
    text = state.dumps()
    restored = EnumLearnerState.loads(text)
    assert restored.dumps() == text
    s1, s2 = state, restored
    for ex in exs[2:]:
        s1, h1 = enum_step(s1, ex, cfg)
        s2, h2 = enum_step(s2, ex, cfg)
        assert s1.dumps() == s2.dumps() and h1 == h2


def test_poly_mode_respects_work_cap():
    cfg = EnumConfig(GAMMA, SIGMA, mode=POLY, work_cap=lambda size: 50)
    cache = RunCache(cfg.enumeration())
    state = EnumLearnerState()
    state, h = enum_step(state, make_example(identity_a(), "aaa", Channel(), 100), cfg, cache)
    assert state.hypothesis not in state.discarded
    # with a generous cap the poly learner matches the consistent one
    cfg2 = EnumConfig(GAMMA, SIGMA, mode=POLY, work_cap=lambda size: 10**9)
    s2, h2 = enum_step(EnumLearnerState(), make_example(identity_a(), "aaa", Channel(), 100), cfg2)
    s3, h3 = enum_step(EnumLearnerState(), make_example(identity_a(), "aaa", Channel(), 100), EnumConfig(GAMMA, SIGMA))
    assert s2.hypothesis == s3.hypothesis


def test_too_slow_candidates_are_rechecked():
    tm = identity_a()
    cfg = EnumConfig(GAMMA, SIGMA)
    state, _ = feed_all([make_example(tm, "aaaaaa", Channel(), 100)], cfg)
    assert all(r in (WRONG_OUTPUT, TOO_SLOW) for r in state.discarded.values())
    idx = Enumeration(GAMMA, SIGMA).index_of(tm)
    assert state.hypothesis <= idx
