"""Repayment thresholds, probabilities, and dice plumbing."""

import random
from collections import Counter

import pytest

import techdebt_game as tg
from techdebt_game.model import DiceRoll, Repay, TicketKind, WIP_INDEX, roll_dice
from techdebt_game.rules import REPAY_THRESHOLD

from helpers import force_wip, place_ticket, new_state
from oracles import all_rolls, repay_success_probability, repay_success_rolls


def test_enumeration_matches_frozen_fractions():
    assert len(repay_success_rolls("feature")) == 27
    assert len(repay_success_rolls("architecture")) == 20
    assert repay_success_probability("feature") == pytest.approx(27 / 36)
    assert repay_success_probability("architecture") == pytest.approx(20 / 36)


@pytest.mark.parametrize("kind,key", [
    (TicketKind.FEATURE, "feature"),
    (TicketKind.ARCHITECTURE, "architecture"),
])
def test_every_roll_matches_enumeration(pack, kind, key):
    success_rolls = repay_success_rolls(key)
    state = new_state(pack, seed=3)
    ticket = place_ticket(state, 0, "A", kind=kind)
    for roll in all_rolls():
        ticket.td = {4}
        state.log.clear()
        tg.apply_repay(state, Repay("A", 0, 4), DiceRoll(*roll))
        succeeded = 4 not in ticket.td
        assert succeeded == (roll in success_rolls), f"roll {roll}"
        kinds = [e.kind for e in state.log]
        assert kinds[0] == "dice_rolled"
        assert kinds[1] == ("td_repaid" if succeeded else "repayment_failed")


def test_spec_examples(pack):
    state = new_state(pack, seed=3)
    feature = place_ticket(state, 0, "A", td={2}, kind=TicketKind.FEATURE)
    tg.apply_repay(state, Repay("A", 0, 2), DiceRoll(1, 4))
    assert feature.td == set()  # a rolled four repays feature TD

    arch = place_ticket(state, 0, "B", td={6}, kind=TicketKind.ARCHITECTURE)
    tg.apply_repay(state, Repay("B", 0, 6), DiceRoll(4, 4))
    assert arch.td == {6}  # fours are not enough for architecture


def test_monte_carlo_probabilities_match_enumeration(pack):
    """Seeded Monte Carlo over 10^5 attempts per kind, tolerance 0.01."""
    rng = random.Random(20240817)
    n = 100_000
    for kind, expected in ((TicketKind.FEATURE, 27 / 36),
                           (TicketKind.ARCHITECTURE, 20 / 36)):
        threshold = REPAY_THRESHOLD[kind]
        hits = sum(1 for _ in range(n)
                   if max(roll_dice(rng)) >= threshold)
        assert hits / n == pytest.approx(expected, abs=0.01)


def test_repay_failure_tags_and_turn_semantics(pack):
    state = new_state(pack, seed=3)
    arch = place_ticket(state, 0, "A", td={3}, kind=TicketKind.ARCHITECTURE)
    tg.apply_repay(state, Repay("A", 0, 3), DiceRoll(2, 2))
    failed = [e for e in state.log if e.kind == "repayment_failed"][0]
    assert "Repayment/Difficult" in failed.aha
    assert "Repayment/Time-consuming" in failed.aha
    assert "Architecture/Hard-to-repay" in failed.aha
    assert arch.td == {3}

    state.log.clear()
    tg.apply_repay(state, Repay("A", 0, 3), DiceRoll(5, 1))
    repaid = [e for e in state.log if e.kind == "td_repaid"][0]
    assert "Repayment/Benefits" in repaid.aha
    assert arch.td == set()


def test_repay_on_in_progress_ticket(pack):
    state = new_state(pack, seed=3)
    wip = force_wip(state, 0, "A", td={5})
    tg.apply_repay(state, Repay("A", WIP_INDEX, 5), DiceRoll(6, 1))
    assert wip.td == set()


def test_repay_without_tile_is_an_engine_error(pack):
    state = new_state(pack, seed=3)
    place_ticket(state, 0, "A", td={2})
    with pytest.raises(tg.EngineError, match="nothing to repay"):
        tg.apply_repay(state, Repay("A", 0, 5), DiceRoll(6, 6))


def test_repaying_a_placed_tile_unblocks_successors(pack):
    state = new_state(pack, seed=3)
    place_ticket(state, 0, "A", td={3})
    force_wip(state, 0, "A")
    assert 3 in tg.effective_blocked(state.teams[0], "A")
    tg.apply_repay(state, Repay("A", 0, 3), DiceRoll(5, 5))
    assert 3 not in tg.effective_blocked(state.teams[0], "A")


def test_dice_fairness():
    """10^6 seeded rolls: face frequencies and doubles within 1/6 +- 0.003."""
    rng = random.Random(987654321)
    n = 1_000_000
    faces = Counter()
    doubles = 0
    for _ in range(n):
        roll = roll_dice(rng)
        faces[roll.first] += 1
        faces[roll.second] += 1
        if roll.is_double:
            doubles += 1
    for face in range(1, 7):
        assert faces[face] / (2 * n) == pytest.approx(1 / 6, abs=0.003)
    assert doubles / n == pytest.approx(1 / 6, abs=0.003)
