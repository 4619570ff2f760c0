"""Bot policies: decision functions from observable state to a legal move.

The game is perfect-information, so policies see the full state. Every
policy must pick from the provided legal move list (Work/PlayAction entries
may be returned with incur declarations or bindings filled in). ``bind``
supplies card choices when a policy plays a card that needs them.
"""

from __future__ import annotations

import random
from typing import Optional

from .model import (
    Bindings,
    Card,
    EffectOp,
    GameState,
    Move,
    PlayAction,
    Repay,
    SELECTOR_CHOSEN,
    StartTicket,
    TeamState,
    TicketKind,
    TicketRef,
    Work,
)
from .rules import effective_blocked


class Policy:
    name: str = "base"

    def decide(self, state: GameState, legal: list[Move], rng: random.Random) -> Move:
        raise NotImplementedError

    def bind(self, state: GameState, card: Card, rng: random.Random) -> Bindings:
        """Default card choices: a sensible target tile and digit."""
        team = state.teams[state.active_team]
        target = _best_repay_target(state, team) or _first_tile(team)
        return Bindings(digit=rng.randint(1, 6), target=target)

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        return f"<Policy {self.name}>"


def _work_moves(legal: list[Move]) -> list[Work]:
    return [m for m in legal if isinstance(m, Work)]


def _start_moves(legal: list[Move]) -> list[StartTicket]:
    return [m for m in legal if isinstance(m, StartTicket)]


def _repay_moves(legal: list[Move]) -> list[Repay]:
    return [m for m in legal if isinstance(m, Repay)]


def _preferred_work(state: GameState, team: TeamState,
                    legal: list[Move]) -> Optional[Work]:
    """Work the in-progress ticket closest to completion (module order ties)."""
    works = _work_moves(legal)
    if not works:
        return None
    return min(works,
               key=lambda m: (team.module(m.module_id).in_progress.tasks_remaining,
                              m.module_id))


def _first_tile(team: TeamState) -> Optional[TicketRef]:
    for ref in team.td_tiles():
        return ref
    return None


def _best_repay_target(state: GameState, team: TeamState) -> Optional[TicketRef]:
    """The tile whose removal helps most: prefer tiles blocking a module that
    is actively being worked, and feature tiles over architecture ones."""
    best = None
    best_key = None
    for ref in team.td_tiles():
        col = team.module(ref.module_id)
        ticket = col.ticket_at(ref.ticket_index)
        blocks_wip = (col.in_progress is not None and ref.ticket_index != -1)
        key = (
            0 if blocks_wip else 1,
            0 if ticket.kind == TicketKind.FEATURE else 1,
            ref.module_id,
            ref.ticket_index,
            ref.digit,
        )
        if best_key is None or key < best_key:
            best, best_key = ref, key
    return best


def _playable_card(state: GameState, team: TeamState, legal: list[Move],
                   wanted: tuple[EffectOp, ...]) -> Optional[PlayAction]:
    """A hand card whose primary effect is in ``wanted`` and is currently
    useful (its target exists)."""
    for move in legal:
        if not isinstance(move, PlayAction):
            continue
        card = team.card_in_hand(move.card_id)
        ops = {e.op for e in card.effect}
        if not ops & set(wanted):
            continue
        if ops & {EffectOp.REMOVE_TD, EffectOp.FREE_REPAYMENT_ATTEMPT} \
                and team.td_count() == 0:
            continue
        if EffectOp.COMPLETE_ONE_TASK in ops \
                and all(col.in_progress is None for col in team.modules):
            continue
        if EffectOp.DOUBLE_NEXT_TICKET_USERS in ops and team.double_users_pending:
            continue
        if EffectOp.REVEAL_OPPONENT_TD in ops \
                and state.opponent_of(team.index).td_count() == 0:
            continue
        return move
    return None


PROGRESS_OPS = (EffectOp.COMPLETE_ONE_TASK, EffectOp.DOUBLE_NEXT_TICKET_USERS)
REPAIR_OPS = (EffectOp.REMOVE_TD, EffectOp.FREE_REPAYMENT_ATTEMPT)


class AlwaysIncur(Policy):
    """Trades debt for speed at every opportunity and never repays."""

    name = "always-incur"

    def decide(self, state, legal, rng):
        team = state.teams[state.active_team]
        card = _playable_card(state, team, legal, PROGRESS_OPS)
        if card is not None:
            return card
        work = _preferred_work(state, team, legal)
        if work is not None:
            wip = team.module(work.module_id).in_progress
            blocked = effective_blocked(team, work.module_id)
            incur = tuple(d for d in sorted(blocked) if d not in wip.td)
            return Work(work.module_id, incur)
        starts = _start_moves(legal)
        if starts:
            return min(starts, key=lambda m: m.module_id)
        return legal[0]


class NeverIncur(Policy):
    """Declines every conscious incurrence; repays when completely walled in."""

    name = "never-incur"

    def decide(self, state, legal, rng):
        team = state.teams[state.active_team]
        card = _playable_card(state, team, legal, REPAIR_OPS + PROGRESS_OPS)
        if card is not None:
            return card
        work = _preferred_work(state, team, legal)
        if work is not None:
            blocked = effective_blocked(team, work.module_id)
            if len(blocked) == 6 and _repay_moves(legal):
                target = _best_repay_target(state, team)
                return Repay(target.module_id, target.ticket_index, target.digit)
            return Work(work.module_id)  # never an incur declaration
        starts = _start_moves(legal)
        if starts:
            return min(starts, key=lambda m: m.module_id)
        repays = _repay_moves(legal)
        if repays:
            target = _best_repay_target(state, team)
            return Repay(target.module_id, target.ticket_index, target.digit)
        return legal[0]

    def bind(self, state, card, rng):
        team = state.teams[state.active_team]
        return Bindings(digit=rng.randint(1, 6),
                        target=_best_repay_target(state, team))


BALANCED_EARLY_ROUNDS = 10
BALANCED_BLOCK_LIMIT = 3


class Balanced(Policy):
    """Incurs early for tempo, then repays whenever a module's accumulated
    tiles block three or more digits."""

    name = "balanced"

    def decide(self, state, legal, rng):
        team = state.teams[state.active_team]
        card = _playable_card(state, team, legal, REPAIR_OPS + PROGRESS_OPS)
        if card is not None:
            return card
        debtor = self._overloaded_module(team)
        if debtor is not None and _repay_moves(legal):
            target = self._module_tile(team, debtor)
            if target is not None:
                return Repay(target.module_id, target.ticket_index, target.digit)
        work = _preferred_work(state, team, legal)
        if work is not None:
            if state.round < BALANCED_EARLY_ROUNDS:
                wip = team.module(work.module_id).in_progress
                blocked = effective_blocked(team, work.module_id)
                incur = tuple(d for d in sorted(blocked) if d not in wip.td)
                return Work(work.module_id, incur)
            return Work(work.module_id)
        starts = _start_moves(legal)
        if starts:
            return min(starts, key=lambda m: m.module_id)
        return legal[0]

    def bind(self, state, card, rng):
        team = state.teams[state.active_team]
        return Bindings(digit=rng.randint(1, 6),
                        target=_best_repay_target(state, team))

    @staticmethod
    def _overloaded_module(team: TeamState) -> Optional[str]:
        for col in team.modules:
            blocked_by_td = set()
            for t in col.placed:
                blocked_by_td |= t.td
            if len(blocked_by_td) >= BALANCED_BLOCK_LIMIT:
                return col.id
        return None

    @staticmethod
    def _module_tile(team: TeamState, module_id: str) -> Optional[TicketRef]:
        tiles = [ref for ref in team.td_tiles()
                 if ref.module_id == module_id and ref.ticket_index != -1]
        if not tiles:
            return None
        col = team.module(module_id)
        tiles.sort(key=lambda r: (0 if col.ticket_at(r.ticket_index).kind
                                  == TicketKind.FEATURE else 1,
                                  r.ticket_index, r.digit))
        return tiles[0]


class UniformRandom(Policy):
    """Uniform over the legal move list; random incur subsets and bindings."""

    name = "uniform-random"

    def decide(self, state, legal, rng):
        team = state.teams[state.active_team]
        move = rng.choice(legal)
        if isinstance(move, Work):
            wip = team.module(move.module_id).in_progress
            blocked = effective_blocked(team, move.module_id)
            incur = tuple(d for d in sorted(blocked)
                          if d not in wip.td and rng.random() < 0.5)
            return Work(move.module_id, incur)
        if isinstance(move, PlayAction):
            card = team.card_in_hand(move.card_id)
            if card.required_bindings() and team.td_count() == 0 \
                    and {e.op for e in card.effect} & set(REPAIR_OPS):
                alternatives = [m for m in legal if not isinstance(m, PlayAction)]
                if alternatives:
                    return self.decide(state, alternatives, rng)
        return move

    def bind(self, state, card, rng):
        team = state.teams[state.active_team]
        tiles = list(team.td_tiles())
        target = rng.choice(tiles) if tiles else None
        return Bindings(digit=rng.randint(1, 6), target=target)


def builtin_policies() -> list[Policy]:
    return [NeverIncur(), AlwaysIncur(), Balanced(), UniformRandom()]


def get_policy(name: str) -> Policy:
    for policy in builtin_policies():
        if policy.name == name:
            return policy
    known = ", ".join(p.name for p in builtin_policies())
    raise ValueError(f"unknown policy {name!r} (known: {known})")
