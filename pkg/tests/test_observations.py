import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from limitlab.machines import BLANK, Enumeration, run_bounded
from limitlab.observations import (
    IOO,
    PTO,
    ROUND_ROBIN,
    SCRIPT,
    SHUFFLE,
    TBO,
    Channel,
    Example,
    ExampleSet,
    ExplicitSource,
    LengthBounded,
    NonHaltingWithinBudget,
    Ordering,
    PredicateSource,
    ScriptExhausted,
    example_set,
    make_example,
    mass,
    next_input,
)
from oracles import byte_count

from conftest import machine


def seven_step_machine():
    # walks right six cells, then halts: 7 steps on any input
    rows = {}
    for i in range(6):
        for s in (BLANK, "1"):
            rows[f"q{i}", s] = (f"q{i + 1}", s, "R")
    for s in (BLANK, "1"):
        rows["q6", s] = ("halt", s, "S")
    return machine((BLANK, "1"), ("1",), rows)


def test_ioo_example(identity_ab):
    ex = make_example(identity_ab, "ab", Channel(IOO), 10)
    assert (ex.x, ex.y, ex.alpha()) == ("ab", "ab", {"kind": "ioo"})


def test_tbo_ceiling():
    tm = seven_step_machine()
    ex = make_example(tm, "", Channel(TBO, scale=2), 100)
    assert ex.bound == 4 and 7 <= 2 * ex.bound


def test_pto_payload(identity_ab):
    ex = make_example(identity_ab, "a", Channel(PTO), 10)
    assert ex.trace == (("a", "a", "R"), (BLANK, BLANK, "S"))


def test_non_halting_signal():
    tm = machine((BLANK, "1"), ("1",), {("q0", BLANK): ("q0", "1", "R"), ("q0", "1"): ("q0", "1", "R")})
    assert make_example(tm, "1", Channel(), 30) == NonHaltingWithinBudget("1", 30)


def test_round_robin_length_bounded():
    o = Ordering(LengthBounded("a", 2), ROUND_ROBIN)
    assert [next_input(o, t) for t in range(1, 6)] == ["a", "aa", "a", "aa", "a"]


def test_shuffle_reproducible():
    src = LengthBounded("ab", 3)
    o1, o2 = Ordering(src, SHUFFLE, seed=5), Ordering(src, SHUFFLE, seed=5)
    assert [next_input(o1, t) for t in range(1, 40)] == [next_input(o2, t) for t in range(1, 40)]


def test_shuffle_cover_audit():
    src = ExplicitSource(["a", "b", "aa", "ab", "ba", "bb", "aaa", "bbb"])
    for seed in range(20):
        o = Ordering(src, SHUFFLE, seed=seed)
        assert {next_input(o, t) for t in range(1, 65)} == set(src.strings)


def test_script_modes():
    src = ExplicitSource(["a", "aa", "aaa"])
    o = Ordering(src, SCRIPT, script=(2, 0), then="cycle")
    assert [next_input(o, t) for t in range(1, 5)] == ["aaa", "a", "aaa", "a"]
    o = Ordering(src, SCRIPT, script=(2,), then=ROUND_ROBIN)
    assert [next_input(o, t) for t in range(1, 5)] == ["aaa", "a", "aa", "aaa"]
    o = Ordering(src, SCRIPT, script=(1,), then=None)
    assert next_input(o, 1) == "aa"
    with pytest.raises(ScriptExhausted):
        next_input(o, 2)


def test_infinite_source_dovetail_covers():
    src = PredicateSource("ab", lambda x: x.count("a") % 2 == 0)
    o = Ordering(src, ROUND_ROBIN)
    seen = {next_input(o, t) for t in range(1, 200)}
    assert set(src.up_to(3)) <= seen
    assert all(x in src for x in seen)


def test_mass_empty():
    assert mass(ExampleSet()) == 0


def test_mass_singleton_byte_count():
    ex = Example("a", "a")
    assert mass([ex]) == byte_count("a", "a", {"kind": "ioo"}) == len('{"x":"a","y":"a","alpha":{"kind":"ioo"}}')


def test_mass_additive(identity_ab):
    a = example_set(identity_ab, ["a", "ab"], Channel(PTO), 50)
    b = example_set(identity_ab, ["b", "bba"], Channel(PTO), 50)
    assert a.union(b).mass() == a.mass() + b.mass()


def test_record_stream_format():
    ex = Example("ab", None, TBO, bound=3)
    rec = json.loads(ex.to_json(t=4))
    assert list(rec) == ["t", "x", "y", "alpha"]
    assert rec == {"t": 4, "x": "ab", "y": None, "alpha": {"kind": "tbo", "bound": 3}}
    assert Example.from_record(rec) == ex


def test_example_set_conflict():
    es = ExampleSet([Example("a", "a")])
    assert not es.add(Example("a", "a"))
    with pytest.raises(ValueError):
        es.add(Example("a", ""))


@settings(max_examples=40, deadline=None)
@given(st.permutations(["", "0", "1", "01", "110", "0101"]), st.integers(1, 3000))
def test_reordering_invariance(order, i):
    tm = Enumeration((BLANK, "0", "1"), ("0", "1"))[i]
    a = example_set(tm, order, Channel(PTO), 100)
    b = example_set(tm, sorted(order), Channel(PTO), 100)
    assert a == b and a.mass() == b.mass()


def test_channel_refinement():
    en = Enumeration((BLANK, "0", "1"), ("0", "1"))
    rng = random.Random(0)
    for _ in range(200):
        tm = en[rng.randrange(1, en.group_start(4))]
        x = "".join(rng.choice("01") for _ in range(rng.randrange(5)))
        p = rng.randrange(1, 4)
        pto = make_example(tm, x, Channel(PTO), 200)
        tbo = make_example(tm, x, Channel(TBO, scale=p, slack=rng.randrange(3), seed=1), 200)
        if isinstance(pto, NonHaltingWithinBudget):
            assert isinstance(tbo, NonHaltingWithinBudget)
            continue
        steps = len(pto.trace)
        assert steps == run_bounded(tm, x, 200).steps
        assert steps <= p * tbo.bound
        assert pto.y == tbo.y == make_example(tm, x, Channel(IOO), 200).y
