import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sltlrm.reward_machine import (
    PotentialError,
    RewardMachine,
    RewardMachineError,
    StateCapExceeded,
    compute_potential,
    export,
    from_json,
    new_memory_rm,
    shaped_reward,
    to_dot,
    to_json,
)
from sltlrm.sltl import FALSE, TRUE, Eventually, Prop, Then, normalize, parse, progress
from sltlrm.sltl.sampling import random_eventuality

from .oracles import chain_potential
from .strategies import formulas

GOLDEN = Path(__file__).parent / "golden"
SIGMA = [[], ["c"], ["m"], ["o"]]
E, C, M, O = (frozenset(l) for l in SIGMA)
Fc, Fm, Fo = (Eventually(Prop(p)) for p in "cmo")
CO, MO = Then(Fc, Fo), Then(Fm, Fo)


@pytest.fixture
def co_rm():
    rm = new_memory_rm(SIGMA)
    rm.extend(CO)
    return rm


def test_new_memory_rm():
    rm = new_memory_rm(SIGMA)
    assert rm.states == [TRUE]
    assert rm.terminals == {TRUE}
    assert rm.initial is TRUE
    assert not rm.transitions


def test_empty_alphabet_rejected():
    with pytest.raises(ValueError):
        new_memory_rm([])


def test_extend_new_states(co_rm):
    assert set(co_rm.states) == {TRUE, CO, Fc, Fo}
    assert set(co_rm.extend(MO)) == {MO, Fm}
    assert co_rm.extend(CO) == []


def test_false_added_when_reachable():
    rm = new_memory_rm([[], ["c"], ["star"]])
    rm.extend(parse("!star U c"))
    assert FALSE in rm.states and rm.terminals == {TRUE, FALSE}


def test_rewards(co_rm):
    assert co_rm.reward(Fo, O) == 1
    assert co_rm.reward(TRUE, C) == 0
    assert co_rm.reward(Fo, C) == 0
    assert co_rm.reward(CO, C) == 0


def test_unknown_state_or_label(co_rm):
    with pytest.raises(KeyError):
        co_rm.reward(Fm, C)
    with pytest.raises(KeyError):
        co_rm.delta(Fo, frozenset({"z"}))


def test_state_cap():
    rm = new_memory_rm(SIGMA, state_cap=3)
    with pytest.raises(StateCapExceeded, match="F c ; F o"):
        rm.extend(parse("(F c ; F o) & F m"))
    assert isinstance(StateCapExceeded(Fc, 1), RewardMachineError)


def test_potential_chain(co_rm):
    pt = compute_potential(co_rm, 0.9)
    assert pt[Fo] == pytest.approx(chain_potential(1, 0.9), abs=1e-9)
    assert pt[CO] == pytest.approx(chain_potential(2, 0.9), abs=1e-9)
    assert pt[TRUE] == 0


def test_potential_of_failure_sink_is_zero():
    rm = new_memory_rm([[], ["c"], ["star"]])
    rm.extend(parse("(!star U c) & F star"))
    pt = compute_potential(rm, 0.9)
    assert pt[FALSE] == 0
    assert all(0 <= v <= 1 / (1 - 0.9) for v in pt.phi.values())


def test_potential_sink_state_without_reward():
    # "X false" can only become false; nothing rewarding is reachable
    rm = new_memory_rm(SIGMA)
    rm.extend(parse("X false | F c"))
    rm.extend(parse("F (c & X false)"))
    pt = compute_potential(rm, 0.9)
    assert pt[parse("F (c & X false)")] == 0


def test_potential_gamma_checks(co_rm):
    with pytest.raises(ValueError):
        compute_potential(co_rm, 0.0)
    with pytest.raises(PotentialError):
        compute_potential(co_rm, 1.0, max_iter=1)


def test_shaped_rewards(co_rm):
    pt = compute_potential(co_rm, 0.9)
    assert shaped_reward(co_rm, pt, CO, C) == pytest.approx(0.0, abs=1e-9)
    assert shaped_reward(co_rm, pt, Fo, O) == pytest.approx(0.0, abs=1e-9)
    assert shaped_reward(co_rm, pt, Fo, E) == pytest.approx(-0.1, abs=1e-9)


def _check_machine(rm):
    for u in rm.non_terminal_states():
        for label in rm.alphabet:
            v = rm.transitions[(u, label)]
            assert v in rm
            assert v == normalize(progress(u, label))
        if isinstance(u, Then):
            assert u.left in rm
    assert rm.terminals == set(rm.states) & {TRUE, FALSE}


@settings(max_examples=60)
@given(st.lists(st.integers(0, 10_000), min_size=1, max_size=3))
def test_extension_invariants(seeds):
    rm = new_memory_rm([[], ["p"], ["q"], ["r"]])
    for seed in seeds:
        before = dict(rm.transitions)
        old = rm.states
        f = random_eventuality(random.Random(seed), depth=3, props="pqr")
        new = rm.extend(f)
        assert rm.states[: len(old)] == old
        assert rm.states[len(old):] == new
        assert all(rm.transitions[k] == v for k, v in before.items())
        assert rm.extend(f) == []
        _check_machine(rm)


@settings(max_examples=40)
@given(formulas)
def test_extension_invariants_general(f):
    rm = new_memory_rm([[], ["p"], ["q"], ["p", "q"]])
    try:
        rm.extend(f)
    except StateCapExceeded:
        return
    _check_machine(rm)


def test_telescoping_on_random_walks():
    rng = random.Random(0)
    gamma = 0.9
    for _ in range(50):
        rm = new_memory_rm([[], ["p"], ["q"], ["r"]])
        f = random_eventuality(rng, depth=3, props="pqr")
        rm.extend(f)
        pt = compute_potential(rm, gamma)
        u, t, plain, shaped = f, 0, 0.0, 0.0
        while not rm.is_terminal(u) and t < 200:
            label = rng.choice(rm.alphabet)
            plain += gamma**t * rm.reward(u, label)
            shaped += gamma**t * shaped_reward(rm, pt, u, label)
            u = rm.delta(u, label)
            t += 1
        assert shaped == pytest.approx(plain + gamma**t * pt[u] - pt[f], abs=1e-9)


def test_dot_single_state():
    dot = to_dot(new_memory_rm(SIGMA))
    assert '[label="true"' in dot and "->" not in dot


def test_dot_golden(co_rm):
    assert to_dot(co_rm, CO) == (GOLDEN / "then_c_o.dot").read_text()
    co_rm.extend(MO)
    assert to_dot(co_rm, MO) == (GOLDEN / "then_c_o_then_m_o.dot").read_text()


def test_dot_highlight(co_rm):
    assert 'label="F c" color="red"' in to_dot(co_rm, highlight=[Fc])


def test_json_roundtrip_is_byte_identical(co_rm):
    co_rm.extend(MO)
    text = to_json(co_rm)
    again = from_json(text)
    assert to_json(again) == text
    assert again.transitions == co_rm.transitions
    assert export(co_rm, "json") == text
    with pytest.raises(ValueError):
        export(co_rm, "svg")


def test_from_dict_reconstructs_machine(co_rm):
    rm = RewardMachine.from_dict(co_rm.to_dict())
    assert rm.states == co_rm.states
    assert rm.reward(Fo, O) == 1
