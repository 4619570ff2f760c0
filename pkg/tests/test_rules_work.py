"""Work resolution against the independent brute-force rule table."""

from itertools import combinations

import pytest

import techdebt_game as tg
from techdebt_game.model import DiceRoll, TicketKind, Work
from techdebt_game.rules import resolve_work

from helpers import force_wip, place_ticket, new_state
from oracles import all_rolls, work_oracle, progress_probability

ALL_DIGITS = (1, 2, 3, 4, 5, 6)


def subsets(items):
    for r in range(len(items) + 1):
        yield from combinations(items, r)


# Own-TD coverage set: empty, singletons at the edges and middle, pairs,
# everything. The rules consult own TD only through rolled-digit membership.
TD_COVER = [frozenset(), frozenset({1}), frozenset({3}), frozenset({6}),
            frozenset({1, 3}), frozenset({2, 5}), frozenset(ALL_DIGITS)]


def test_kernel_matches_oracle_exhaustively():
    """Every blocked set x every sorted incur subset x all 36 rolls, across
    the own-TD coverage set."""
    checked = 0
    for blocked_tuple in subsets(ALL_DIGITS):
        blocked = frozenset(blocked_tuple)
        for own_td in TD_COVER:
            for incur in subsets(blocked_tuple):
                for roll in all_rolls():
                    expected = work_oracle(blocked, own_td, incur, roll)
                    got = resolve_work(blocked, set(own_td), incur,
                                       DiceRoll(*roll), 99)
                    assert tuple(got) == expected, (
                        f"blocked={sorted(blocked)} td={sorted(own_td)} "
                        f"incur={incur} roll={roll}: {got} != {expected}")
                    checked += 1
    assert checked == 36 * len(TD_COVER) * 3 ** 6


def test_kernel_incur_order_expresses_preference():
    blocked = frozenset({2, 5})
    for first, second in (((2, 5), 2), ((5, 2), 5)):
        out = resolve_work(blocked, set(), first, DiceRoll(2, 5), 99)
        assert (out.tasks, out.td_digit, out.conscious) == (1, second, True)


def test_kernel_skips_incur_digits_already_tiled():
    blocked = frozenset({2, 5})
    out = resolve_work(blocked, {5}, (5, 2), DiceRoll(2, 5), 99)
    assert (out.tasks, out.td_digit, out.conscious) == (1, 2, True)
    out = resolve_work(blocked, {2, 5}, (5, 2), DiceRoll(2, 5), 99)
    assert (out.tasks, out.td_digit) == (0, None)


def test_fig2_board_only_a_six_progresses():
    """Predecessor tiles on 1..5: progress probability is exactly 11/36 and
    the only progressing rolls contain a six."""
    blocked = frozenset({1, 2, 3, 4, 5})
    assert progress_probability(blocked) == pytest.approx(11 / 36)
    wins = [roll for roll in all_rolls()
            if resolve_work(blocked, set(), (), DiceRoll(*roll), 99).tasks > 0]
    assert len(wins) == 11
    assert all(6 in roll for roll in wins)
    # the double six still forces a tile
    out = resolve_work(blocked, set(), (), DiceRoll(6, 6), 99)
    assert (out.tasks, out.td_digit) == (2, 6)


def test_apply_work_full_state_matches_oracle(pack):
    """Full apply_work (events, board mutation) against the oracle for every
    blocked set and representative move choices."""
    state = new_state(pack, seed=5)
    pred = place_ticket(state, 0, "A", td=())
    wip = force_wip(state, 0, "A", tasks_required=99)
    for blocked_tuple in subsets(ALL_DIGITS):
        pred.td = set(blocked_tuple)
        choices = [(), tuple(sorted(blocked_tuple))]
        if blocked_tuple:
            choices.append((min(blocked_tuple),))
        for incur in choices:
            for roll in all_rolls():
                wip.tasks_done = 0
                wip.td = set()
                state.log.clear()
                tg.apply_work(state, Work("A", incur), DiceRoll(*roll))
                tasks, td_digit, conscious = work_oracle(
                    frozenset(blocked_tuple), set(), incur, roll)
                assert wip.tasks_done == tasks
                assert wip.td == ({td_digit} if td_digit is not None else set())
                incurred = [e for e in state.log if e.kind == "td_incurred"]
                if td_digit is None:
                    assert not incurred
                else:
                    assert len(incurred) == 1
                    assert incurred[0].data["digit"] == td_digit
                    assert incurred[0].data["conscious"] is conscious


def test_apply_work_spec_examples(pack):
    state = new_state(pack, seed=5)
    # one unblocked digit in the roll: one task, no TD
    place_ticket(state, 0, "A", td={1, 2})
    place_ticket(state, 0, "A", td={3})
    place_ticket(state, 0, "A", td={4, 5})
    wip = force_wip(state, 0, "A")
    assert tg.effective_blocked(state.teams[0], "A") == frozenset({1, 2, 3, 4, 5})
    tg.apply_work(state, Work("A"), DiceRoll(4, 6))
    assert wip.tasks_done == 1 and wip.td == set()

    # unblocked double: TD placed and two tasks complete immediately
    state = new_state(pack, seed=5)
    wip = force_wip(state, 0, "B")
    tg.apply_work(state, Work("B"), DiceRoll(3, 3))
    assert wip.tasks_done == 2 and wip.td == {3}
    unconscious = [e for e in state.log if e.kind == "td_incurred"]
    assert unconscious[0].data["conscious"] is False
    assert "Incurrence/Unconscious" in unconscious[0].aha

    # fully blocked pair with a declared incur digit: TD on it, one task
    state = new_state(pack, seed=5)
    wip = force_wip(state, 0, "C", blocked={2, 5})
    tg.apply_work(state, Work("C", incur=(5,)), DiceRoll(2, 5))
    assert wip.tasks_done == 1 and wip.td == {5}
    conscious = [e for e in state.log if e.kind == "td_incurred"]
    assert conscious[0].data["conscious"] is True
    assert "Incurrence/Conscious" in conscious[0].aha


def test_apply_work_unrolled_incur_digit_is_inert(pack):
    """A pre-declared incur digit that was not rolled neither errors nor
    fires; the turn just makes no progress when everything is blocked."""
    state = new_state(pack, seed=5)
    wip = force_wip(state, 0, "A", blocked={1, 2, 3, 4, 5, 6} - {6})
    place_ticket(state, 0, "A", td={6})
    tg.apply_work(state, Work("A", incur=(4,)), DiceRoll(1, 2))
    assert wip.tasks_done == 0 and wip.td == set()
    assert state.log[-1].kind == "no_progress"


def test_apply_work_rejects_unblocked_incur(pack):
    state = new_state(pack, seed=5)
    force_wip(state, 0, "A", blocked={2})
    with pytest.raises(tg.EngineError, match="illegal incur"):
        tg.apply_work(state, Work("A", incur=(5,)), DiceRoll(2, 5))


def test_apply_work_requires_ticket_in_progress(pack):
    state = new_state(pack, seed=5)
    with pytest.raises(tg.EngineError, match="nothing to work on"):
        tg.apply_work(state, Work("A"), DiceRoll(1, 2))


def test_double_on_blocked_digit_places_tile_without_progress(pack):
    state = new_state(pack, seed=5)
    wip = force_wip(state, 0, "A", blocked={3})
    tg.apply_work(state, Work("A"), DiceRoll(3, 3))
    assert wip.tasks_done == 0 and wip.td == {3}
    # rolling the same double again: tile already there, digit blocked, nothing
    tg.apply_work(state, Work("A"), DiceRoll(3, 3))
    assert wip.tasks_done == 0 and wip.td == {3}


def test_double_on_existing_tile_completes_one_task(pack):
    state = new_state(pack, seed=5)
    wip = force_wip(state, 0, "A", td={4})
    tg.apply_work(state, Work("A"), DiceRoll(4, 4))
    assert wip.tasks_done == 1 and wip.td == {4}


def test_double_caps_at_remaining_tasks_and_completes_ticket(pack):
    state = new_state(pack, seed=5)
    tg.submit_move(state, 0, tg.StartTicket("A"))  # architecture, 3 tasks
    col = state.teams[1].module("A")  # team 1 is active after rotation
    tg.submit_move(state, 1, tg.StartTicket("A"))
    wip = state.teams[0].module("A").in_progress
    wip.tasks_done = wip.tasks_required - 1
    assert 3 not in tg.effective_blocked(state.teams[0], "A")
    tg.apply_work(state, Work("A"), DiceRoll(3, 3))
    placed = state.teams[0].module("A").placed
    assert len(placed) == 1 and placed[0].tasks_done == placed[0].tasks_required
    assert placed[0].td == {3}


def test_conscious_incur_on_predecessor_tile_tags_vicious_cycle(pack):
    state = new_state(pack, seed=5)
    place_ticket(state, 0, "A", td={2})
    force_wip(state, 0, "A", blocked={5})
    tg.apply_work(state, Work("A", incur=(2,)), DiceRoll(2, 5))
    event = [e for e in state.log if e.kind == "td_incurred"][0]
    assert "ViciousCycle/Inner" in event.aha

    # printed-only blockage carries no vicious-cycle tag
    state = new_state(pack, seed=5)
    force_wip(state, 0, "A", blocked={2, 5})
    tg.apply_work(state, Work("A", incur=(2,)), DiceRoll(2, 5))
    event = [e for e in state.log if e.kind == "td_incurred"][0]
    assert "ViciousCycle/Inner" not in event.aha


def test_td_on_architecture_ticket_tags_critical(pack):
    state = new_state(pack, seed=5)
    force_wip(state, 0, "A", kind=TicketKind.ARCHITECTURE)
    tg.apply_work(state, Work("A"), DiceRoll(5, 5))
    event = [e for e in state.log if e.kind == "td_incurred"][0]
    assert "Architecture/Critical" in event.aha
