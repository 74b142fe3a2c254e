import numpy as np
import pytest

from sltlrm.envs import (
    ACTIONS,
    Action,
    LabeledGridEnv,
    MapError,
    alphabet,
    bfs_distances,
    label,
    load_map,
    load_shipped,
    step,
)

from .oracles import grid_bfs

TINY = "g=g\nS.g\n"


def test_tiny_map():
    gm = load_map(TINY)
    assert (gm.width, gm.height) == (3, 1)
    assert gm.starts == ((0, 0),)
    assert label(gm, (2, 0)) == frozenset({"g"})
    assert label(gm, (1, 0)) == frozenset()


def test_office_propositions_and_alphabet():
    gm = load_shipped("officeworld")
    assert (gm.width, gm.height) == (12, 9)
    assert gm.propositions == {"c", "m", "o", "star", "A", "B", "C", "D"}
    sigma = alphabet(gm)
    assert len(sigma) == 9
    assert frozenset() in sigma
    assert frozenset({"star"}) in sigma


def test_minecraft_propositions():
    gm = load_shipped("minecraft")
    assert (gm.width, gm.height) == (21, 21)
    assert gm.propositions == set("abcdefgh")


def test_step_into_wall_and_off_grid():
    gm = load_map("g=g\nS#\n.g\n")
    assert step(gm, (0, 0), Action.RIGHT) == (0, 0)
    assert step(gm, (0, 0), Action.UP) == (0, 0)
    assert step(gm, (0, 0), Action.LEFT) == (0, 0)
    assert step(gm, (0, 0), Action.DOWN) == (0, 1)
    assert step(gm, (0, 1), Action.RIGHT) == (1, 1)


def test_up_decreases_y():
    gm = load_map("S\n.\n")
    assert step(gm, (0, 1), Action.UP) == (0, 0)


def test_comments_and_blank_lines():
    gm = load_map("// note\n\ng=g\n// grid\nS.g\n\n")
    assert gm.width == 3


@pytest.mark.parametrize("text,msg", [
    ("S..\n..\n", "ragged"),
    ("S.x\n", "unknown glyph"),
    ("g=g\n..g\n", "no start"),
    ("g=g\nS#g\n", "unreachable"),
    ("", "no grid"),
    ("#=wall\nS\n", "glyph"),
    ("g=true\nSg\n", "proposition"),
])
def test_map_errors(text, msg):
    with pytest.raises(MapError, match=msg):
        load_map(text)


def test_bfs_matches_oracle():
    gm = load_shipped("officeworld")
    start = gm.starts[0]
    assert bfs_distances(gm, start) == grid_bfs(gm.width, gm.height, gm.walls, start)


def test_env_tables_match_map():
    gm = load_shipped("officeworld")
    env = LabeledGridEnv(gm)
    assert env.n_states == gm.width * gm.height - len(gm.walls)
    assert env.n_actions == len(ACTIONS)
    for s, cell in enumerate(env.cells):
        assert env.label(s) == label(gm, cell)
        for a in ACTIONS:
            assert env.cells[env.step(s, a)] == step(gm, cell, a)


def test_alphabet_is_exactly_the_emitted_labels():
    for name in ("officeworld", "minecraft"):
        env = LabeledGridEnv.shipped(name)
        assert set(env.alphabet) == set(env.labels)


def test_reset():
    env = LabeledGridEnv.shipped("officeworld")
    rng = np.random.default_rng(0)
    assert env.reset() == env.start
    assert env.reset(rng) == env.start
    roaming = LabeledGridEnv(env.map, random_start=True)
    starts = {roaming.reset(rng) for _ in range(2000)}
    assert starts == set(range(env.n_states))


def test_slip_is_off_by_default_and_seeded_when_on():
    env = LabeledGridEnv.shipped("officeworld")
    rng = np.random.default_rng(1)
    assert all(env.step(env.start, 3, rng) == env.next_state[env.start, 3] for _ in range(50))
    slippy = LabeledGridEnv(env.map, slip=1.0)
    a = [slippy.step(slippy.start, 3, np.random.default_rng(5)) for _ in range(3)]
    assert len(set(a)) == 1
