import random

import pytest
from hypothesis import given, settings, strategies as st

from limitlab.machines import (
    BLANK,
    ActionTuple,
    BudgetExceeded,
    Enumeration,
    ParseError,
    TapeConfiguration,
    parse_tm,
    run_bounded,
    serialize_tm,
    step,
    tape_behavior,
)
from oracles import reference_run, replay, table_of

from conftest import machine


def test_step_advances_identity(identity_ab):
    cfg = TapeConfiguration.initial("ab")
    a = step(identity_ab, cfg)
    assert a == ActionTuple("a", "a", "R")
    assert cfg.head == 1


def test_step_at_halt_signals(identity_ab):
    cfg = TapeConfiguration.initial("ab")
    cfg.state = identity_ab.halt
    assert step(identity_ab, cfg) is None


def test_writer_on_blank_tape(writer):
    cfg = TapeConfiguration.initial("")
    assert step(writer, cfg) == ActionTuple(BLANK, "1", "S")
    assert cfg.tape == {0: "1"}


def test_identity_run(identity_ab):
    out = run_bounded(identity_ab, "ab", 10)
    assert out.halted and out.output == "ab" and out.steps == 3


def test_right_mover_out_of_budget():
    tm = machine((BLANK, "a"), ("a",), {("q0", BLANK): ("q0", BLANK, "R"),
                                        ("q0", "a"): ("q0", "a", "R")})
    out = run_bounded(tm, "a", 50)
    assert not out.halted
    assert out.diverged


def test_undefined_output_for_stray_symbol():
    tm = machine((BLANK, "a", "x"), ("a",), {("q0", BLANK): ("halt", "x", "S"),
                                             ("q0", "a"): ("halt", "a", "S"),
                                             ("q0", "x"): ("halt", "x", "S")})
    assert run_bounded(tm, "", 5).output is None
    assert run_bounded(tm, "a", 5).output == "a"


def test_gap_makes_output_undefined():
    # erase the middle cell of "aaa"
    tm = machine((BLANK, "a"), ("a",), {("q0", "a"): ("q1", "a", "R"),
                                        ("q0", BLANK): ("halt", BLANK, "S"),
                                        ("q1", "a"): ("halt", BLANK, "S"),
                                        ("q1", BLANK): ("halt", BLANK, "S")})
    assert run_bounded(tm, "aaa", 10).output is None
    assert run_bounded(tm, "aa", 10).output == "a"


def test_tape_behavior_identity(identity_ab):
    tb = tape_behavior(identity_ab, "a", 10)
    assert tb.scanned == ("a", BLANK)
    assert tb.actions == (("a", "a", "R"), (BLANK, BLANK, "S"))


def test_tape_behavior_writer(writer):
    tb = tape_behavior(writer, "", 10)
    assert tb.scanned == (BLANK,) and tb.actions == ((BLANK, "1", "S"),)


def test_tape_behavior_budget():
    tm = machine((BLANK, "a"), ("a",), {("q0", BLANK): ("q0", "a", "R"),
                                        ("q0", "a"): ("q0", "a", "R")})
    with pytest.raises(BudgetExceeded):
        tape_behavior(tm, "", 20)


def test_matches_reference_interpreter():
    en = Enumeration((BLANK, "0", "1"), ("0", "1"))
    rng = random.Random(7)
    lo = en.group_start(3)
    for _ in range(150):
        tm = en[rng.randrange(lo, lo + en.count(3))]
        table = table_of(tm)
        for n in range(0, 7):
            x = "".join(rng.choice("01") for _ in range(n))
            ref = reference_run(table, tm.halt, BLANK, set(tm.sigma), x, 200)
            out = run_bounded(tm, x, 200, trace=True)
            if ref[0] == "halted":
                assert out.halted
                assert (out.output, out.steps, out.trace) == ref[1:]
            else:
                assert not out.halted


def test_replay_reproduces_final_tape():
    en = Enumeration((BLANK, "0", "1"), ("0", "1"))
    rng = random.Random(3)
    checked = 0
    while checked < 50:
        tm = en[rng.randrange(1, en.group_start(4))]
        x = "".join(rng.choice("01") for _ in range(rng.randrange(5)))
        out = run_bounded(tm, x, 300, trace=True)
        if not out.halted:
            continue
        from limitlab.machines import Simulation

        sim = Simulation(tm, x)
        sim.advance(300)
        tape, head = replay(out.trace, x)
        assert tape == sim.cfg.tape and head == sim.cfg.head
        checked += 1


def test_budget_monotonicity():
    en = Enumeration((BLANK, "1"), ("1",))
    for i in range(1, 400, 7):
        tm = en[i]
        first = run_bounded(tm, "11", 40)
        if first.halted:
            for b in (first.steps, first.steps + 1, 1000):
                assert run_bounded(tm, "11", b) == first


def test_divergence_detection_is_sound():
    # whenever the simulator claims divergence, a long run must not halt
    en = Enumeration((BLANK, "0", "1"), ("0", "1"))
    rng = random.Random(11)
    lo = en.group_start(3)
    for _ in range(300):
        tm = en[rng.randrange(lo, lo + en.count(3))]
        x = "".join(rng.choice("01") for _ in range(rng.randrange(4)))
        out = run_bounded(tm, x, 30)
        if out.diverged:
            ref = reference_run(table_of(tm), tm.halt, BLANK, set(tm.sigma), x, 3000)
            assert ref[0] == "budget"


def test_enumeration_two_state_group_is_exact():
    en = Enumeration((BLANK, "1"), ("1",))
    assert en.count(2) == 144
    got = {serialize_tm(en[i]) for i in range(1, 145)}
    assert len(got) == 144
    # every 2-entry table with 12 choices per entry
    choices = [(n, w, m) for n in range(2) for w in (BLANK, "1") for m in "LRS"]
    want = set()
    for e0 in choices:
        for e1 in choices:
            want.add(serialize_tm(machine_from_rows(e0, e1)))
    assert got == want
    assert en[145].n_states == 3


def machine_from_rows(e0, e1):
    from limitlab.machines import build_tm

    return build_tm(2, (BLANK, "1"), ("1",), {(0, BLANK): e0, (0, "1"): e1})


def test_enumeration_injective_and_monotone():
    en = Enumeration((BLANK, "1"), ("1",))
    seen = set()
    last = 2
    for i in range(1, 10_001):
        tm = en[i]
        key = (tm.n_states, tm.delta)
        assert key not in seen
        seen.add(key)
        assert tm.n_states >= last
        last = tm.n_states
        if i % 97 == 0:
            assert en.index_of(tm) == i


def test_identity_index():
    en = Enumeration((BLANK, "1"), ("1",))
    tm = en[77]
    assert run_bounded(tm, "111", 10).output == "111"


def test_round_trip_prefix():
    en = Enumeration((BLANK, "0", "1"), ("0", "1"))
    for i in range(1, 501):
        tm = en[i * 13]
        assert parse_tm(serialize_tm(tm)) == tm


def test_parse_missing_row():
    text = "tm states=2 gamma=_,1 sigma=1\nq0 _ -> q1 1 S\n"
    with pytest.raises(ParseError, match=r"missing transition for \(q0, 1\)"):
        parse_tm(text)


def test_parse_rejects_halt_transition():
    text = ("tm states=2 gamma=_,1 sigma=1\nq0 _ -> q1 1 S\nq0 1 -> q1 1 S\n"
            "q1 _ -> q1 _ S\n")
    with pytest.raises(ParseError, match="halt"):
        parse_tm(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_tm("tm states=2 gamma=_,1 sigma=1\nq0 _ => q1 1 S\n")
    assert e.value.line == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20_000), st.text("01", max_size=5))
def test_step_is_deterministic(i, x):
    tm = Enumeration((BLANK, "0", "1"), ("0", "1"))[i]
    a = run_bounded(tm, x, 60, trace=True)
    b = run_bounded(tm, x, 60, trace=True)
    assert a == b
    if a.halted:
        assert len(a.trace) == a.steps <= 60
