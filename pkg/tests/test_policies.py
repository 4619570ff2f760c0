"""Built-in bot policies: definitions, legality, coverage."""

import random

import pytest

import techdebt_game as tg
from techdebt_game.model import PlayAction, Repay, StartTicket, Work
from techdebt_game.policies import (
    AlwaysIncur,
    Balanced,
    NeverIncur,
    UniformRandom,
    builtin_policies,
    get_policy,
)
from techdebt_game.experiment import play_game

from helpers import force_wip, place_ticket, new_state


def test_builtin_policy_names():
    names = {p.name for p in builtin_policies()}
    assert names == {"never-incur", "always-incur", "balanced", "uniform-random"}
    assert get_policy("balanced").name == "balanced"
    with pytest.raises(ValueError, match="unknown policy"):
        get_policy("yolo")


def blocked_board(pack):
    """Fully blocked in-progress ticket plus one repayable tile."""
    state = new_state(pack, seed=42)
    place_ticket(state, 0, "A", td={1, 2, 3})
    force_wip(state, 0, "A", blocked={4, 5, 6})
    return state


def test_always_incur_declares_every_blocked_digit(pack):
    state = blocked_board(pack)
    move = AlwaysIncur().decide(state, tg.legal_moves(state), random.Random(0))
    assert isinstance(move, Work)
    assert move.incur == (1, 2, 3, 4, 5, 6)


def test_never_incur_never_declares_and_repays_when_walled_in(pack):
    state = blocked_board(pack)
    move = NeverIncur().decide(state, tg.legal_moves(state), random.Random(0))
    assert isinstance(move, Repay)  # fully blocked with a tile available

    state = new_state(pack, seed=42)
    place_ticket(state, 0, "A", td={1, 2, 3})
    force_wip(state, 0, "A", blocked={4, 5})  # a six still works
    move = NeverIncur().decide(state, tg.legal_moves(state), random.Random(0))
    assert isinstance(move, Work) and move.incur == ()


def test_balanced_repays_once_a_module_blocks_three_digits(pack):
    state = new_state(pack, seed=42)
    place_ticket(state, 0, "B", td={1, 2, 6})
    force_wip(state, 0, "B", blocked={4})
    state.round = 30  # past the early-incur phase
    move = Balanced().decide(state, tg.legal_moves(state), random.Random(0))
    assert isinstance(move, Repay) and move.module_id == "B"

    state = new_state(pack, seed=42)
    place_ticket(state, 0, "B", td={1, 2})
    force_wip(state, 0, "B", blocked={4})
    state.round = 30
    move = Balanced().decide(state, tg.legal_moves(state), random.Random(0))
    assert isinstance(move, Work) and move.incur == ()


def test_balanced_incurs_in_the_early_game(pack):
    state = new_state(pack, seed=42)
    force_wip(state, 0, "A", blocked={2, 5})
    assert state.round == 0
    move = Balanced().decide(state, tg.legal_moves(state), random.Random(0))
    assert isinstance(move, Work) and move.incur == (2, 5)


def test_random_policy_covers_every_move_class(pack):
    """Across repeated decisions on a state offering all four move classes,
    each class gets picked."""
    seen = set()
    rng = random.Random(7)
    for trial in range(2000):
        state = new_state(pack, seed=42)
        place_ticket(state, 0, "A", td={3})
        force_wip(state, 0, "A")
        from techdebt_game.rules import draw_card
        from techdebt_game.model import CardKind
        draw_card(state, 0, CardKind.ACTION)
        move = UniformRandom().decide(state, tg.legal_moves(state), rng)
        seen.add(type(move).__name__)
        if len(seen) == 4:
            break
    assert seen == {"Work", "Repay", "PlayAction", "StartTicket"}


@pytest.mark.parametrize("policy_name",
                         ["never-incur", "always-incur", "balanced",
                          "uniform-random"])
def test_policies_never_submit_illegal_moves(pack, policy_name):
    """Full games against a random opponent; any rejection would raise."""
    for seed in range(4):
        state = play_game(pack, (get_policy(policy_name),
                                 get_policy("uniform-random")), 3000 + seed)
        assert state.finished


def test_policy_games_are_deterministic(pack):
    a = play_game(pack, (get_policy("balanced"), get_policy("always-incur")), 97)
    b = play_game(pack, (get_policy("balanced"), get_policy("always-incur")), 97)
    assert [e.to_dict() for e in a.log] == [e.to_dict() for e in b.log]
