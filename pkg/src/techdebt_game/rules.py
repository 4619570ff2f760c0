"""Pure game rules: legality, state transitions, scoring.

All functions mutate the passed :class:`~techdebt_game.model.GameState` in
place, append events to its log, and return it. No I/O, no wall clock; all
randomness comes from ``state.rng``.

Work resolution in one table (B = effective blocked set, T = the active
ticket's own TD digits):

* double on digit d:

  - d not in T: a TD tile is always placed on d (unconscious incurrence);
    two tasks complete only if d is not in B.
  - d in T: no new tile; one task completes only if d is not in B.

* non-double (d1, d2):

  - at least one rolled digit outside B: one task completes, never TD.
  - both rolled digits in B: if the move's incur declaration names a rolled
    digit that is not yet in T, a tile is placed there (conscious
    incurrence) and one task completes; otherwise the turn yields nothing.

A digit's own tile never blocks the ticket it sits on; blocking flows only
from the printed crosses, tiles on earlier tickets in the same module, and
temporary card blocks.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .model import (
    DIGITS,
    WIP_INDEX,
    Bindings,
    Card,
    CardKind,
    DiceRoll,
    Effect,
    EffectOp,
    EngineError,
    EV_CARD_DRAWN,
    EV_DECK_EMPTY,
    EV_DECK_RESHUFFLED,
    EV_DICE_ROLLED,
    EV_EFFECT_APPLIED,
    EV_GAME_ENDED,
    EV_NO_PROGRESS,
    EV_REPAYMENT_FAILED,
    EV_SCORE_TALLIED,
    EV_TASK_COMPLETED,
    EV_TD_INCURRED,
    EV_TD_REPAID,
    EV_TICKET_COMPLETED,
    EV_TICKET_STARTED,
    EV_TURN_SKIPPED,
    GameState,
    ModuleColumn,
    Move,
    MoveRejected,
    PlayAction,
    Repay,
    SELECTOR_ACTIVE,
    SELECTOR_CHOSEN,
    SELECTOR_FIRST_PLACED,
    SELECTOR_NEWEST_PLACED,
    SELECTOR_RANDOM,
    StartTicket,
    TARGET_OPPONENT,
    TeamState,
    Ticket,
    TicketKind,
    TicketRef,
    Work,
    check_digit,
    move_to_dict,
    roll_dice,
)

REPAY_THRESHOLD = {TicketKind.FEATURE: 4, TicketKind.ARCHITECTURE: 5}

END_ROUND_LIMIT = "round limit"
END_MODULES_COMPLETE = "modules complete"


def effective_blocked(team: TeamState, module_id: str,
                      ticket: Optional[Ticket] = None) -> frozenset[int]:
    """Digits that cannot complete a task on the module's current ticket.

    Union of the ticket's printed crosses, the TD tiles of every placed
    ticket in the same module, and the team's temporary card blocks. Other
    modules never contribute.
    """
    col = team.module(module_id)
    if ticket is None:
        ticket = col.in_progress
    if ticket is None:
        raise EngineError(f"module {module_id} has no ticket in progress")
    blocked = set(ticket.blocked)
    for placed in col.placed:
        blocked |= placed.td
    blocked.update(team.temp_blocked)
    return frozenset(blocked)


class WorkOutcome(NamedTuple):
    tasks: int
    td_digit: Optional[int]
    conscious: bool


def resolve_work(blocked: frozenset[int], own_td: set[int],
                 incur: tuple[int, ...], roll: DiceRoll,
                 tasks_remaining: int) -> WorkOutcome:
    """Classify one work roll. Pure kernel used by :func:`apply_work`."""
    d1, d2 = roll.first, roll.second
    if d1 == d2:
        new_tile = d1 not in own_td
        if d1 in blocked:
            tasks = 0
        elif new_tile:
            tasks = min(2, tasks_remaining)
        else:
            tasks = min(1, tasks_remaining)
        return WorkOutcome(tasks, d1 if new_tile else None, False)
    if d1 not in blocked or d2 not in blocked:
        return WorkOutcome(min(1, tasks_remaining), None, False)
    for d in incur:
        if d in (d1, d2) and d not in own_td:
            return WorkOutcome(min(1, tasks_remaining), d, True)
    return WorkOutcome(0, None, False)


# ---------------------------------------------------------------------------
# Move enumeration and validation

def legal_moves(state: GameState) -> list[Move]:
    """Every move the active team may take this turn.

    Work entries are canonical (empty incur declaration); any incur subset of
    the ticket's effective blocked set is a legal variant of the same move.
    PlayAction entries carry empty bindings for the same reason.
    """
    if state.finished:
        raise EngineError("game over")
    team = state.teams[state.active_team]
    moves: list[Move] = []
    for col in team.modules:
        if col.in_progress is not None:
            moves.append(Work(col.id))
    for ref in team.td_tiles():
        moves.append(Repay(ref.module_id, ref.ticket_index, ref.digit))
    for card in team.hand:
        moves.append(PlayAction(card.id))
    for col in team.modules:
        if col.can_start_ticket():
            moves.append(StartTicket(col.id))
    return moves


def check_move(state: GameState, move: Move) -> None:
    """Raise :class:`MoveRejected` unless ``move`` is legal for the active
    team right now. Never mutates state."""
    team = state.teams[state.active_team]
    if isinstance(move, Work):
        col = _find_module(team, move.module_id)
        if col.in_progress is None:
            raise MoveRejected("illegal_move",
                               f"module {move.module_id} has nothing to work on")
        blocked = effective_blocked(team, move.module_id)
        for d in move.incur:
            if not isinstance(d, int) or d not in DIGITS:
                raise MoveRejected("illegal_move", f"illegal incur: {d!r} is not a digit")
            if d not in blocked:
                raise MoveRejected("illegal_move",
                                   f"illegal incur: digit {d} is not effectively blocked")
        if len(set(move.incur)) != len(move.incur):
            raise MoveRejected("illegal_move", "illegal incur: repeated digit")
        return
    if isinstance(move, Repay):
        col = _find_module(team, move.module_id)
        ticket = col.ticket_at(move.ticket_index)
        if ticket is None:
            raise MoveRejected("illegal_move",
                               f"no ticket at {move.module_id}[{move.ticket_index}]")
        if move.digit not in DIGITS or move.digit not in ticket.td:
            raise MoveRejected("illegal_move", "nothing to repay at that digit")
        return
    if isinstance(move, PlayAction):
        card = team.card_in_hand(move.card_id)
        if card is None:
            raise MoveRejected("illegal_move", f"card {move.card_id} is not in hand")
        _check_bindings(team, card, move.bindings)
        return
    if isinstance(move, StartTicket):
        col = _find_module(team, move.module_id)
        if not col.can_start_ticket():
            raise MoveRejected("illegal_move",
                               f"module {move.module_id} cannot start a ticket now")
        return
    raise MoveRejected("malformed_move", f"unknown move {move!r}")


def _find_module(team: TeamState, module_id: str) -> ModuleColumn:
    for col in team.modules:
        if col.id == module_id:
            return col
    raise MoveRejected("illegal_move", f"unknown module {module_id!r}")


def _check_bindings(team: TeamState, card: Card, bindings: Bindings) -> None:
    for need in card.required_bindings():
        if need == "digit":
            if bindings.digit is None:
                raise MoveRejected("binding_required",
                                   f"binding required: digit for card {card.id}")
            if bindings.digit not in DIGITS:
                raise MoveRejected("illegal_move", f"bad digit binding {bindings.digit}")
        elif need == "target":
            target = bindings.target
            if target is None:
                raise MoveRejected("binding_required",
                                   f"binding required: target for card {card.id}")
            col = _find_module(team, target.module_id)
            ticket = col.ticket_at(target.ticket_index)
            if ticket is None:
                raise MoveRejected("illegal_move", "binding targets a missing ticket")
            if target.digit is None or target.digit not in ticket.td:
                raise MoveRejected("illegal_move", "binding targets no TD tile")


# ---------------------------------------------------------------------------
# Work / repay / start

def apply_work(state: GameState, move: Work, roll: DiceRoll) -> GameState:
    team = state.teams[state.active_team]
    col = team.module(move.module_id)
    ticket = col.in_progress
    if ticket is None:
        raise EngineError("nothing to work on")
    blocked = effective_blocked(team, move.module_id, ticket)
    for d in move.incur:
        check_digit(d)
        if d not in blocked:
            raise EngineError(f"illegal incur: digit {d} is not effectively blocked")

    state.emit(EV_DICE_ROLLED, team.index,
               {"first": roll.first, "second": roll.second, "for": "work",
                "module": col.id})
    outcome = resolve_work(blocked, ticket.td, move.incur, roll,
                           ticket.tasks_remaining)

    if outcome.td_digit is not None:
        ticket.td.add(outcome.td_digit)
        tags = ["Incurrence/Conscious" if outcome.conscious else "Incurrence/Unconscious"]
        if outcome.conscious and any(outcome.td_digit in p.td for p in col.placed):
            # TD forced this TD: the blocked digit came from an earlier tile.
            tags.append("ViciousCycle/Inner")
        if ticket.kind == TicketKind.ARCHITECTURE:
            tags.append("Architecture/Critical")
        state.emit(EV_TD_INCURRED, team.index,
                   {"module": col.id, "ticket": WIP_INDEX, "ticket_id": ticket.id,
                    "digit": outcome.td_digit, "conscious": outcome.conscious,
                    "via": "work"},
                   tuple(tags))
    if outcome.tasks > 0:
        ticket.tasks_done += outcome.tasks
        state.emit(EV_TASK_COMPLETED, team.index,
                   {"module": col.id, "ticket_id": ticket.id, "count": outcome.tasks,
                    "tasks_done": ticket.tasks_done,
                    "tasks_required": ticket.tasks_required, "via": "work"})
    elif outcome.td_digit is None:
        state.emit(EV_NO_PROGRESS, team.index, {"module": col.id})

    if ticket.is_complete:
        complete_ticket(state, team.index, col.id)
    return state


def apply_repay(state: GameState, move: Repay, roll: DiceRoll) -> GameState:
    team = state.teams[state.active_team]
    col = team.module(move.module_id)
    ticket = col.ticket_at(move.ticket_index)
    if ticket is None:
        raise EngineError(f"no ticket at {move.module_id}[{move.ticket_index}]")
    if move.digit not in ticket.td:
        raise EngineError("nothing to repay")
    state.emit(EV_DICE_ROLLED, team.index,
               {"first": roll.first, "second": roll.second, "for": "repayment",
                "module": col.id})
    _resolve_repayment(state, team, col.id, move.ticket_index, ticket, move.digit,
                       roll, via="repay")
    return state


def _resolve_repayment(state: GameState, team: TeamState, module_id: str,
                       ticket_index: int, ticket: Ticket, digit: int,
                       roll: DiceRoll, via: str) -> bool:
    """Apply a threshold check with both dice; either die qualifying succeeds."""
    threshold = REPAY_THRESHOLD[ticket.kind]
    success = max(roll.first, roll.second) >= threshold
    is_arch = ticket.kind == TicketKind.ARCHITECTURE
    data = {"module": module_id, "ticket": ticket_index, "ticket_id": ticket.id,
            "digit": digit, "via": via}
    if success:
        ticket.td.discard(digit)
        state.emit(EV_TD_REPAID, team.index, data, ("Repayment/Benefits",))
    else:
        tags = ["Repayment/Difficult", "Repayment/Time-consuming"]
        if is_arch:
            tags.append("Architecture/Hard-to-repay")
        state.emit(EV_REPAYMENT_FAILED, team.index, data, tuple(tags))
    return success


def apply_start_ticket(state: GameState, move: StartTicket) -> GameState:
    team = state.teams[state.active_team]
    col = team.module(move.module_id)
    if not col.can_start_ticket():
        raise EngineError(f"module {move.module_id} cannot start a ticket now")
    slot = col.slots[len(col.placed)]
    proto = state.ticket_protos[slot.ticket_id]
    col.in_progress = Ticket(
        id=proto.id, kind=proto.kind, tasks_required=proto.tasks_required,
        users=proto.users, blocked=proto.blocked, card_trigger=slot.trigger,
    )
    state.emit(EV_TICKET_STARTED, team.index,
               {"module": col.id, "ticket_id": proto.id,
                "slot": len(col.placed), "kind": proto.kind.value})
    return state


def complete_ticket(state: GameState, team_index: int, module_id: str) -> GameState:
    """Move a finished in-progress ticket onto its board row, award users,
    and fire the slot's card trigger. TD tiles stay on the ticket and keep
    blocking its successors."""
    team = state.teams[team_index]
    col = team.module(module_id)
    ticket = col.in_progress
    if ticket is None or not ticket.is_complete:
        raise EngineError(f"module {module_id} has no completed ticket to place")
    slot_index = len(col.placed)
    slot = col.slots[slot_index]
    col.in_progress = None
    col.placed.append(ticket)

    users_awarded = 0
    doubled = False
    if ticket.kind == TicketKind.FEATURE and ticket.users > 0:
        users_awarded = ticket.users
        if team.double_users_pending:
            users_awarded *= 2
            doubled = True
            team.double_users_pending = False
        team.users_banked += users_awarded
    state.emit(EV_TICKET_COMPLETED, team.index,
               {"module": col.id, "slot": slot_index, "ticket_id": ticket.id,
                "kind": ticket.kind.value, "users_awarded": users_awarded,
                "doubled": doubled})
    if slot.trigger is not None:
        draw_card(state, team_index, slot.trigger)
    return state


# ---------------------------------------------------------------------------
# Cards

def draw_card(state: GameState, team_index: int, kind: CardKind) -> Optional[Card]:
    """Draw from the top of a deck, reshuffling the discard pile in first.

    Event cards resolve immediately against the drawing team; action cards
    go to its hand. Both piles empty is a logged no-op.
    """
    team = state.teams[team_index]
    if kind == CardKind.EVENT:
        deck, discard = state.event_deck, state.event_discard
    else:
        deck, discard = state.action_deck, state.action_discard
    if not deck:
        if not discard:
            state.emit(EV_DECK_EMPTY, team.index, {"deck": kind.value})
            return None
        deck.extend(discard)
        discard.clear()
        state.rng.shuffle(deck)
        state.emit(EV_DECK_RESHUFFLED, team.index,
                   {"deck": kind.value, "size": len(deck)})
    card = deck.pop()
    state.emit(EV_CARD_DRAWN, team.index,
               {"card": card.id, "deck": kind.value, "title": card.title},
               card.aha_tags)
    if kind == CardKind.EVENT:
        apply_effect(state, card.effect, team_index, Bindings(),
                     source_card=card, auto_bind=True)
        discard.append(card)
    else:
        team.hand.append(card)
    return card


def apply_play_action(state: GameState, move: PlayAction) -> bool:
    """Play an action card from the active team's hand. Returns whether the
    card consumed the turn."""
    team = state.teams[state.active_team]
    card = team.card_in_hand(move.card_id)
    if card is None:
        raise EngineError(f"card {move.card_id} is not in hand")
    team.hand.remove(card)
    apply_effect(state, card.effect, team.index, move.bindings, source_card=card)
    state.action_discard.append(card)
    return card.consumes_turn


def apply_effect(state: GameState, effects: tuple[Effect, ...], acting_team: int,
                 bindings: Bindings, source_card: Optional[Card] = None,
                 auto_bind: bool = False) -> GameState:
    """Interpret a card's effect program in order.

    Unresolvable targets are logged no-ops. Player choices come from
    ``bindings``; with ``auto_bind`` missing choices are resolved from the
    game RNG instead (used for event cards, which allow no prompt).
    """
    for effect in effects:
        _apply_one_effect(state, effect, acting_team, bindings, source_card, auto_bind)
    return state


def _apply_one_effect(state: GameState, effect: Effect, acting_team: int,
                      bindings: Bindings, source_card: Optional[Card],
                      auto_bind: bool) -> None:
    team = state.teams[acting_team]
    card_id = source_card.id if source_card is not None else None
    op = effect.op

    def emit_outcome(outcome: dict) -> None:
        data = {"card": card_id, "op": op.value}
        data.update(outcome)
        state.emit(EV_EFFECT_APPLIED, acting_team, data)

    if op == EffectOp.ADD_TD_RANDOM_DIGIT:
        ref, ticket = _select_ticket(state, team, effect.selector or SELECTOR_RANDOM,
                                     bindings, auto_bind,
                                     eligible=lambda t: len(t.td) < 6)
        if ticket is None:
            emit_outcome({"applied": False, "detail": "no eligible ticket"})
            return
        digit = state.rng.choice(sorted(set(DIGITS) - ticket.td))
        _card_add_td(state, team, ref, ticket, digit)
        emit_outcome({"applied": True, "target": ref.to_dict(), "digit": digit})

    elif op == EffectOp.ADD_TD_CHOSEN_DIGIT:
        ref, ticket = _select_ticket(state, team, effect.selector or SELECTOR_ACTIVE,
                                     bindings, auto_bind,
                                     eligible=lambda t: len(t.td) < 6)
        if ticket is None:
            emit_outcome({"applied": False, "detail": "no eligible ticket"})
            return
        digit = bindings.digit
        if digit is None:
            if not auto_bind:
                raise EngineError("binding required: digit")
            digit = state.rng.choice(sorted(set(DIGITS) - ticket.td))
        if digit in ticket.td:
            emit_outcome({"applied": False, "detail": "digit already carries TD"})
            return
        _card_add_td(state, team, ref, ticket, digit)
        emit_outcome({"applied": True, "target": ref.to_dict(), "digit": digit})

    elif op == EffectOp.REMOVE_TD:
        ref, ticket = _select_ticket(state, team, effect.selector or SELECTOR_RANDOM,
                                     bindings, auto_bind,
                                     eligible=lambda t: bool(t.td))
        if ticket is None:
            emit_outcome({"applied": False, "detail": "no TD on board"})
            return
        if effect.selector == SELECTOR_CHOSEN and bindings.target is not None \
                and bindings.target.digit is not None:
            digit = bindings.target.digit
        else:
            digit = state.rng.choice(sorted(ticket.td))
        if digit not in ticket.td:
            emit_outcome({"applied": False, "detail": "no TD at digit"})
            return
        ticket.td.discard(digit)
        state.emit(EV_TD_REPAID, team.index,
                   {"module": ref.module_id, "ticket": ref.ticket_index,
                    "ticket_id": ticket.id, "digit": digit, "via": "card"},
                   ("Repayment/Benefits",))
        emit_outcome({"applied": True, "target": ref.to_dict(), "digit": digit})

    elif op == EffectOp.FREE_REPAYMENT_ATTEMPT:
        ref, ticket = _select_ticket(state, team, effect.selector or SELECTOR_CHOSEN,
                                     bindings, auto_bind,
                                     eligible=lambda t: bool(t.td))
        if ticket is None:
            emit_outcome({"applied": False, "detail": "no TD on board"})
            return
        if effect.selector in (None, SELECTOR_CHOSEN) and bindings.target is not None \
                and bindings.target.digit is not None and bindings.target.digit in ticket.td:
            digit = bindings.target.digit
        else:
            digit = state.rng.choice(sorted(ticket.td))
        roll = roll_dice(state.rng)
        state.emit(EV_DICE_ROLLED, team.index,
                   {"first": roll.first, "second": roll.second, "for": "repayment",
                    "module": ref.module_id})
        success = _resolve_repayment(state, team, ref.module_id, ref.ticket_index,
                                     ticket, digit, roll, via="card")
        emit_outcome({"applied": True, "target": ref.to_dict(), "digit": digit,
                      "success": success})

    elif op == EffectOp.SKIP_NEXT_TURN:
        target = state.opponent_of(acting_team) if effect.target_team == TARGET_OPPONENT \
            else team
        target.skip_turns_pending += 1
        emit_outcome({"applied": True, "team": target.index,
                      "pending": target.skip_turns_pending})

    elif op == EffectOp.COMPLETE_ONE_TASK:
        ref, ticket = _select_ticket(state, team, effect.selector or SELECTOR_ACTIVE,
                                     bindings, auto_bind,
                                     eligible=lambda t: not t.is_complete,
                                     in_progress_only=True)
        if ticket is None:
            emit_outcome({"applied": False, "detail": "no ticket in progress"})
            return
        ticket.tasks_done += 1
        state.emit(EV_TASK_COMPLETED, team.index,
                   {"module": ref.module_id, "ticket_id": ticket.id, "count": 1,
                    "tasks_done": ticket.tasks_done,
                    "tasks_required": ticket.tasks_required, "via": "card"})
        emit_outcome({"applied": True, "target": ref.to_dict()})
        if ticket.is_complete:
            complete_ticket(state, team.index, ref.module_id)

    elif op == EffectOp.BLOCK_DIGIT_FOR_ROUNDS:
        digit = check_digit(effect.digit)
        rounds = effect.rounds or 1
        team.temp_blocked[digit] = max(team.temp_blocked.get(digit, 0), rounds)
        emit_outcome({"applied": True, "digit": digit, "rounds": rounds})

    elif op == EffectOp.REVEAL_OPPONENT_TD:
        opponent = state.opponent_of(acting_team)
        tiles = [ref.to_dict() for ref in opponent.td_tiles()]
        emit_outcome({"applied": True, "opponent": opponent.index, "tiles": tiles})

    elif op == EffectOp.DOUBLE_NEXT_TICKET_USERS:
        team.double_users_pending = True
        emit_outcome({"applied": True})

    else:  # pragma: no cover - closed enum
        raise EngineError(f"unknown effect op {op!r}")


def _card_add_td(state: GameState, team: TeamState, ref: TicketRef,
                 ticket: Ticket, digit: int) -> None:
    ticket.td.add(digit)
    tags = []
    if ticket.kind == TicketKind.ARCHITECTURE:
        tags.append("Architecture/Critical")
    state.emit(EV_TD_INCURRED, team.index,
               {"module": ref.module_id, "ticket": ref.ticket_index,
                "ticket_id": ticket.id, "digit": digit, "conscious": False,
                "via": "card"},
               tuple(tags))


def _select_ticket(state: GameState, team: TeamState, selector: str,
                   bindings: Bindings, auto_bind: bool,
                   eligible, in_progress_only: bool = False):
    """Resolve a ticket selector to (ref, ticket); (None, None) when no
    eligible ticket exists."""
    if selector == SELECTOR_CHOSEN and bindings.target is not None:
        col = team.module(bindings.target.module_id)
        ticket = col.ticket_at(bindings.target.ticket_index)
        if ticket is not None and eligible(ticket):
            return bindings.target, ticket
        return None, None
    if selector == SELECTOR_CHOSEN and not auto_bind:
        raise EngineError("binding required: target")

    candidates: list[tuple[TicketRef, Ticket]] = []
    for col in team.modules:
        if col.in_progress is not None:
            candidates.append((TicketRef(col.id, WIP_INDEX), col.in_progress))
        if not in_progress_only:
            for idx, t in enumerate(col.placed):
                candidates.append((TicketRef(col.id, idx), t))
    candidates = [(ref, t) for ref, t in candidates if eligible(t)]
    if not candidates:
        return None, None

    if selector == SELECTOR_ACTIVE:
        for ref, t in candidates:
            if ref.ticket_index == WIP_INDEX:
                return ref, t
        return None, None
    if selector == SELECTOR_NEWEST_PLACED:
        placed = [(ref, t) for ref, t in candidates if ref.ticket_index != WIP_INDEX]
        if not placed:
            return None, None
        # newest = highest row in the last module touched; board order suffices
        return max(placed, key=lambda rt: (rt[0].module_id, rt[0].ticket_index))
    if selector == SELECTOR_FIRST_PLACED:
        placed = [(ref, t) for ref, t in candidates if ref.ticket_index != WIP_INDEX]
        if not placed:
            return None, None
        return min(placed, key=lambda rt: (rt[0].module_id, rt[0].ticket_index))
    # random / auto-bound chosen
    return candidates[state.rng.randrange(len(candidates))]


# ---------------------------------------------------------------------------
# Turn rotation and game end

def is_game_over(state: GameState) -> tuple[bool, Optional[str]]:
    for team in state.teams:
        if team.all_modules_complete():
            return True, END_MODULES_COMPLETE
    if state.round >= state.config.max_rounds:
        return True, END_ROUND_LIMIT
    return False, None


def compute_scores(state: GameState) -> dict[int, int]:
    penalty = state.config.td_penalty
    return {team.index: team.users_banked - penalty * team.td_count()
            for team in state.teams}


def final_score(state: GameState) -> dict[int, int]:
    if not state.finished:
        raise EngineError("game not finished")
    return compute_scores(state)


def finalize(state: GameState, reason: str) -> None:
    if state.finished:
        return
    scores = compute_scores(state)
    for team in state.teams:
        state.emit(EV_SCORE_TALLIED, team.index,
                   {"users": team.users_banked, "td_count": team.td_count(),
                    "penalty": state.config.td_penalty, "score": scores[team.index]})
    if scores[0] == scores[1]:
        winner = None
    else:
        winner = 0 if scores[0] > scores[1] else 1
    state.emit(EV_GAME_ENDED, None,
               {"reason": reason, "scores": {str(k): v for k, v in scores.items()},
                "winner": winner})
    state.phase = "finished"


def end_turn(state: GameState, consumed: bool) -> None:
    """Finish-move bookkeeping: end the game if a terminal condition holds,
    otherwise rotate the active team and burn any pending skipped turns."""
    over, reason = is_game_over(state)
    if over:
        finalize(state, reason or "")
        return
    if not consumed:
        return
    _consume_turn(state)
    while not state.finished:
        team = state.teams[state.active_team]
        if team.skip_turns_pending <= 0:
            break
        team.skip_turns_pending -= 1
        state.emit(EV_TURN_SKIPPED, team.index,
                   {"pending": team.skip_turns_pending})
        _consume_turn(state)


def _consume_turn(state: GameState) -> None:
    if state.active_team == 1:
        # both teams have moved: a round ends
        state.round += 1
        for team in state.teams:
            expired = [d for d, left in team.temp_blocked.items() if left <= 1]
            for d in expired:
                del team.temp_blocked[d]
            for d in team.temp_blocked:
                team.temp_blocked[d] -= 1
        over, reason = is_game_over(state)
        if over:
            finalize(state, reason or "")
            return
    state.active_team = 1 - state.active_team
