"""Domain types for the TechDebt Game.

Everything here is plain data: tickets, boards, cards, moves, events and the
complete game state. The rules that manipulate these types live in
:mod:`techdebt_game.rules`; nothing in this module performs I/O.

Digits are plain ints 1..6. Digit sets are ``frozenset``/``set`` of ints.
A red TD tile on a ticket is one digit in that ticket's ``td`` set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, NamedTuple, Optional

DIGITS: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
MODULE_IDS: tuple[str, ...] = ("A", "B", "C")

# Index used in moves/bindings to address a module's in-progress ticket
# (placed tickets use their 0-based position in the placed row).
WIP_INDEX = -1


class EngineError(Exception):
    """A caller bug: an operation was invoked against state that forbids it."""


class MoveRejected(Exception):
    """A submitted move was refused; the game state is unchanged."""

    def __init__(self, code: str, reason: str):
        super().__init__(reason)
        self.code = code
        self.reason = reason


class TicketKind(str, Enum):
    ARCHITECTURE = "architecture"
    FEATURE = "feature"


class CardKind(str, Enum):
    EVENT = "event"
    ACTION = "action"


class DiceRoll(NamedTuple):
    first: int
    second: int

    @property
    def is_double(self) -> bool:
        return self.first == self.second

    @property
    def digits(self) -> tuple[int, int]:
        return (self.first, self.second)


def roll_dice(rng: random.Random) -> DiceRoll:
    return DiceRoll(rng.randint(1, 6), rng.randint(1, 6))


def check_digit(digit: Any) -> int:
    if not isinstance(digit, int) or isinstance(digit, bool) or not 1 <= digit <= 6:
        raise EngineError(f"digit must be an int in 1..6, got {digit!r}")
    return digit


@dataclass
class Ticket:
    """A unit of work on the board.

    ``blocked`` holds the digits printed as crossed out on the ticket;
    ``td`` holds the red TD tiles accrued during play. Architecture tickets
    carry no users.
    """

    id: str
    kind: TicketKind
    tasks_required: int
    users: int = 0
    blocked: frozenset[int] = frozenset()
    tasks_done: int = 0
    td: set[int] = field(default_factory=set)
    card_trigger: Optional[CardKind] = None

    @property
    def is_complete(self) -> bool:
        return self.tasks_done >= self.tasks_required

    @property
    def tasks_remaining(self) -> int:
        return self.tasks_required - self.tasks_done

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "tasks_required": self.tasks_required,
            "tasks_done": self.tasks_done,
            "users": self.users,
            "blocked": sorted(self.blocked),
            "td": sorted(self.td),
        }


@dataclass(frozen=True)
class SlotSpec:
    """One board position of a module: which ticket goes there and whether
    completing it triggers a card draw."""

    kind: TicketKind
    ticket_id: str
    trigger: Optional[CardKind] = None


@dataclass
class ModuleColumn:
    id: str
    slots: tuple[SlotSpec, ...]
    placed: list[Ticket] = field(default_factory=list)
    in_progress: Optional[Ticket] = None

    @property
    def is_complete(self) -> bool:
        return len(self.placed) == len(self.slots)

    @property
    def next_slot_index(self) -> int:
        return len(self.placed) + (1 if self.in_progress is not None else 0)

    def can_start_ticket(self) -> bool:
        return self.in_progress is None and len(self.placed) < len(self.slots)

    def ticket_at(self, index: int) -> Optional[Ticket]:
        """Ticket addressed by a move: 0.. for placed rows, WIP_INDEX for the
        in-progress ticket."""
        if index == WIP_INDEX:
            return self.in_progress
        if 0 <= index < len(self.placed):
            return self.placed[index]
        return None


class EffectOp(str, Enum):
    """Closed vocabulary of card effect primitives."""

    ADD_TD_RANDOM_DIGIT = "add_td_random_digit"
    ADD_TD_CHOSEN_DIGIT = "add_td_chosen_digit"
    REMOVE_TD = "remove_td"
    FREE_REPAYMENT_ATTEMPT = "free_repayment_attempt"
    SKIP_NEXT_TURN = "skip_next_turn"
    COMPLETE_ONE_TASK = "complete_one_task"
    BLOCK_DIGIT_FOR_ROUNDS = "block_digit_for_rounds"
    REVEAL_OPPONENT_TD = "reveal_opponent_td"
    DOUBLE_NEXT_TICKET_USERS = "double_next_ticket_users"


# Ticket selectors for effects that need a board target.
SELECTOR_ACTIVE = "active"          # first module (A..C) with an in-progress ticket
SELECTOR_NEWEST_PLACED = "newest_placed"
SELECTOR_FIRST_PLACED = "first_placed"  # earliest placed ticket (the architecture row)
SELECTOR_RANDOM = "random"          # uniform over eligible tickets, game RNG
SELECTOR_CHOSEN = "chosen"          # player binding required

SELECTORS: frozenset[str] = frozenset({
    SELECTOR_ACTIVE, SELECTOR_NEWEST_PLACED, SELECTOR_FIRST_PLACED,
    SELECTOR_RANDOM, SELECTOR_CHOSEN,
})

TARGET_SELF = "self"
TARGET_OPPONENT = "opponent"


@dataclass(frozen=True)
class Effect:
    op: EffectOp
    selector: Optional[str] = None
    digit: Optional[int] = None
    rounds: Optional[int] = None
    target_team: str = TARGET_SELF

    def needs_binding(self) -> Optional[str]:
        """Name of the player choice this primitive requires, or None."""
        if self.op == EffectOp.ADD_TD_CHOSEN_DIGIT:
            return "digit"
        if self.op in (EffectOp.REMOVE_TD, EffectOp.FREE_REPAYMENT_ATTEMPT) \
                and self.selector == SELECTOR_CHOSEN:
            return "target"
        return None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"op": self.op.value}
        if self.selector is not None:
            out["selector"] = self.selector
        if self.digit is not None:
            out["digit"] = self.digit
        if self.rounds is not None:
            out["rounds"] = self.rounds
        if self.target_team != TARGET_SELF:
            out["target_team"] = self.target_team
        return out


@dataclass(frozen=True)
class Card:
    id: str
    kind: CardKind
    title: str
    narrative: str
    effect: tuple[Effect, ...]
    aha_tags: tuple[str, ...]
    consumes_turn: bool = True

    def required_bindings(self) -> list[str]:
        """Distinct player choices needed to play this card."""
        needs = []
        for eff in self.effect:
            b = eff.needs_binding()
            if b is not None and b not in needs:
                needs.append(b)
        return needs

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "title": self.title,
            "narrative": self.narrative,
            "effect": [e.to_dict() for e in self.effect],
            "aha_tags": list(self.aha_tags),
            "consumes_turn": self.consumes_turn,
        }


# ---------------------------------------------------------------------------
# Moves

@dataclass(frozen=True)
class Work:
    """Roll both dice against a module's in-progress ticket.

    ``incur`` is a conditional pre-roll declaration: for each listed digit,
    "if this digit is rolled while every rolled digit is blocked, place TD on
    it and complete a task". Order expresses preference when both rolled
    digits are listed.
    """

    module_id: str
    incur: tuple[int, ...] = ()


@dataclass(frozen=True)
class Repay:
    """Dedicate the turn to one repayment attempt against one TD tile."""

    module_id: str
    ticket_index: int  # 0.. placed row, WIP_INDEX for in-progress
    digit: int


@dataclass(frozen=True)
class PlayAction:
    card_id: str
    bindings: "Bindings" = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.bindings is None:
            object.__setattr__(self, "bindings", Bindings())


@dataclass(frozen=True)
class StartTicket:
    module_id: str


Move = Work | Repay | PlayAction | StartTicket


@dataclass(frozen=True)
class TicketRef:
    """Addresses one ticket on the acting team's board."""

    module_id: str
    ticket_index: int
    digit: Optional[int] = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"module": self.module_id, "ticket": self.ticket_index}
        if self.digit is not None:
            out["digit"] = self.digit
        return out


@dataclass(frozen=True)
class Bindings:
    """Player choices supplied with a PlayAction move."""

    digit: Optional[int] = None
    target: Optional[TicketRef] = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.digit is not None:
            out["digit"] = self.digit
        if self.target is not None:
            out["target"] = self.target.to_dict()
        return out


def move_to_dict(move: Move) -> dict[str, Any]:
    if isinstance(move, Work):
        return {"type": "work", "module": move.module_id, "incur": list(move.incur)}
    if isinstance(move, Repay):
        return {"type": "repay", "module": move.module_id,
                "ticket": move.ticket_index, "digit": move.digit}
    if isinstance(move, PlayAction):
        return {"type": "play_action", "card": move.card_id,
                "bindings": move.bindings.to_dict()}
    if isinstance(move, StartTicket):
        return {"type": "start_ticket", "module": move.module_id}
    raise EngineError(f"unknown move {move!r}")


def move_from_dict(payload: dict[str, Any]) -> Move:
    if not isinstance(payload, dict):
        raise MoveRejected("malformed_move", "move body must be an object")
    kind = payload.get("type")
    try:
        if kind == "work":
            incur = payload.get("incur") or []
            return Work(str(payload["module"]), tuple(int(d) for d in incur))
        if kind == "repay":
            return Repay(str(payload["module"]), int(payload["ticket"]),
                         int(payload["digit"]))
        if kind == "play_action":
            raw = payload.get("bindings") or {}
            target = None
            if raw.get("target") is not None:
                t = raw["target"]
                target = TicketRef(str(t["module"]), int(t["ticket"]),
                                   int(t["digit"]) if t.get("digit") is not None else None)
            digit = int(raw["digit"]) if raw.get("digit") is not None else None
            return PlayAction(str(payload["card"]), Bindings(digit=digit, target=target))
        if kind == "start_ticket":
            return StartTicket(str(payload["module"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MoveRejected("malformed_move", f"bad move body: {exc}") from exc
    raise MoveRejected("malformed_move", f"unknown move type {kind!r}")


# ---------------------------------------------------------------------------
# Teams, events, state

@dataclass
class TeamState:
    index: int
    name: str
    modules: list[ModuleColumn]
    users_banked: int = 0
    hand: list[Card] = field(default_factory=list)
    skip_turns_pending: int = 0
    temp_blocked: dict[int, int] = field(default_factory=dict)  # digit -> rounds left
    double_users_pending: bool = False

    def module(self, module_id: str) -> ModuleColumn:
        for col in self.modules:
            if col.id == module_id:
                return col
        raise EngineError(f"unknown module {module_id!r}")

    def td_tiles(self) -> Iterator[TicketRef]:
        """Every TD tile on this team's board, board order."""
        for col in self.modules:
            for idx, ticket in enumerate(col.placed):
                for digit in sorted(ticket.td):
                    yield TicketRef(col.id, idx, digit)
            if col.in_progress is not None:
                for digit in sorted(col.in_progress.td):
                    yield TicketRef(col.id, WIP_INDEX, digit)

    def td_count(self) -> int:
        return sum(1 for _ in self.td_tiles())

    def all_modules_complete(self) -> bool:
        return all(col.is_complete for col in self.modules)

    def card_in_hand(self, card_id: str) -> Optional[Card]:
        for card in self.hand:
            if card.id == card_id:
                return card
        return None


# Event kinds. The log is the authoritative record of a game: replaying the
# moves in a log against the same seed regenerates it exactly.
EV_MOVE_ACCEPTED = "move_accepted"
EV_DICE_ROLLED = "dice_rolled"
EV_TASK_COMPLETED = "task_completed"
EV_TD_INCURRED = "td_incurred"
EV_TD_REPAID = "td_repaid"
EV_REPAYMENT_FAILED = "repayment_failed"
EV_TICKET_COMPLETED = "ticket_completed"
EV_TICKET_STARTED = "ticket_started"
EV_CARD_DRAWN = "card_drawn"
EV_EFFECT_APPLIED = "effect_applied"
EV_NO_PROGRESS = "no_progress"
EV_TURN_SKIPPED = "turn_skipped"
EV_DECK_RESHUFFLED = "deck_reshuffled"
EV_DECK_EMPTY = "deck_empty"
EV_SCORE_TALLIED = "score_tallied"
EV_GAME_ENDED = "game_ended"


@dataclass(frozen=True)
class GameEvent:
    seq: int
    round: int
    team: Optional[int]
    kind: str
    data: dict[str, Any]
    aha: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "round": self.round,
            "team": self.team,
            "kind": self.kind,
            "data": self.data,
            "aha": list(self.aha),
        }


@dataclass(frozen=True)
class SessionConfig:
    pack_name: str
    pack_version: str
    seed: int
    max_rounds: int
    td_penalty: int
    team_names: tuple[str, str] = ("Team 1", "Team 2")
    rosters: tuple[tuple[str, ...], tuple[str, ...]] = (("P1", "P2"), ("P3", "P4"))

    def to_dict(self) -> dict[str, Any]:
        return {
            "pack_name": self.pack_name,
            "pack_version": self.pack_version,
            "seed": self.seed,
            "max_rounds": self.max_rounds,
            "td_penalty": self.td_penalty,
            "team_names": list(self.team_names),
            "rosters": [list(r) for r in self.rosters],
        }

    @staticmethod
    def from_dict(payload: dict[str, Any]) -> "SessionConfig":
        return SessionConfig(
            pack_name=str(payload["pack_name"]),
            pack_version=str(payload["pack_version"]),
            seed=int(payload["seed"]),
            max_rounds=int(payload["max_rounds"]),
            td_penalty=int(payload["td_penalty"]),
            team_names=tuple(payload.get("team_names", ("Team 1", "Team 2"))),  # type: ignore[arg-type]
            rosters=tuple(tuple(r) for r in payload.get("rosters", (("P1", "P2"), ("P3", "P4")))),  # type: ignore[arg-type]
        )


PHASE_AWAITING_MOVE = "awaiting_move"
PHASE_FINISHED = "finished"


@dataclass
class GameState:
    """Complete, replayable state of one game.

    Mutated in place by the rules module; every mutation appends to ``log``.
    All randomness flows through ``rng``, which is seeded once at creation,
    so (seed, move sequence) fully determines the log.
    """

    config: SessionConfig
    teams: list[TeamState]
    event_deck: list[Card]
    action_deck: list[Card]
    ticket_protos: dict[str, Ticket] = field(default_factory=dict)
    event_discard: list[Card] = field(default_factory=list)
    action_discard: list[Card] = field(default_factory=list)
    active_team: int = 0
    round: int = 0
    rng: random.Random = field(default_factory=random.Random)
    phase: str = PHASE_AWAITING_MOVE
    log: list[GameEvent] = field(default_factory=list)
    _seq: int = 0

    @property
    def finished(self) -> bool:
        return self.phase == PHASE_FINISHED

    def team(self, index: int) -> TeamState:
        return self.teams[index]

    def opponent_of(self, index: int) -> TeamState:
        return self.teams[1 - index]

    def emit(self, kind: str, team: Optional[int], data: dict[str, Any],
             aha: tuple[str, ...] = ()) -> GameEvent:
        event = GameEvent(self._seq, self.round, team, kind, data, aha)
        self.log.append(event)
        self._seq += 1
        return event
