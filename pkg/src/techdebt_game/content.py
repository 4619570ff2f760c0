"""Data-driven game content: boards, ticket and card decks, validation.

A content pack is a YAML document (format documented in docs/pack-format.md,
version field ``pack_version``). Loading fully validates the pack; every
violation is reported with a path into the document.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from .aha import AHA_REGISTRY, MECHANIC_TAGS, validate_tags
from .model import (
    Card,
    CardKind,
    Effect,
    EffectOp,
    MODULE_IDS,
    SELECTORS,
    SlotSpec,
    TARGET_OPPONENT,
    TARGET_SELF,
    Ticket,
    TicketKind,
)

PACK_FORMAT_VERSION = 1

MAX_TASKS = 8
MAX_PRINTED_BLOCKED = 5
MAX_EFFECTS_PER_CARD = 3


@dataclass(frozen=True)
class PackError:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class PackValidationError(Exception):
    def __init__(self, errors: list[PackError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors[:5])
                         + (f" (+{len(errors) - 5} more)" if len(errors) > 5 else ""))


@dataclass(frozen=True)
class ContentPack:
    name: str
    version: str
    board: dict[str, tuple[SlotSpec, ...]]
    tickets: dict[str, Ticket]
    event_cards: tuple[Card, ...]
    action_cards: tuple[Card, ...]
    td_penalty: int
    max_rounds: int

    def card_by_id(self, card_id: str) -> Optional[Card]:
        for card in self.event_cards + self.action_cards:
            if card.id == card_id:
                return card
        return None

    def to_data(self) -> dict[str, Any]:
        """Canonical plain-data form; the inverse of loading."""
        return {
            "pack_version": PACK_FORMAT_VERSION,
            "name": self.name,
            "version": self.version,
            "defaults": {"td_penalty": self.td_penalty, "max_rounds": self.max_rounds},
            "board": {
                module: [
                    {"ticket": slot.ticket_id, "trigger": slot.trigger.value if slot.trigger else None}
                    for slot in slots
                ]
                for module, slots in self.board.items()
            },
            "tickets": [
                {"id": t.id, "kind": t.kind.value, "tasks": t.tasks_required,
                 "blocked": sorted(t.blocked), "users": t.users}
                for t in self.tickets.values()
            ],
            "event_cards": [_card_data(c) for c in self.event_cards],
            "action_cards": [_card_data(c) for c in self.action_cards],
        }


def _card_data(card: Card) -> dict[str, Any]:
    data: dict[str, Any] = {
        "id": card.id,
        "title": card.title,
        "narrative": card.narrative,
        "effect": [e.to_dict() for e in card.effect],
        "aha_tags": list(card.aha_tags),
    }
    if card.kind == CardKind.ACTION and not card.consumes_turn:
        data["consumes_turn"] = False
    return data


def serialize_pack(pack: ContentPack) -> str:
    return yaml.safe_dump(pack.to_data(), sort_keys=False, allow_unicode=True)


# ---------------------------------------------------------------------------
# Loading and validation

def load_pack(source: str | Path | dict) -> ContentPack:
    """Parse and validate a pack from YAML text, a file path, or parsed data.

    Raises :class:`PackValidationError` with per-path messages on any
    violation; a returned pack satisfies every content invariant.
    """
    if isinstance(source, dict):
        data = source
    else:
        text: str
        if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                        and source.endswith((".yaml", ".yml"))):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = str(source)
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise PackValidationError([PackError("/", f"parse failure: {exc}")]) from exc
    errors = validate_pack_data(data)
    if errors:
        raise PackValidationError(errors)
    return _build_pack(data)


def validate_pack_data(data: Any) -> list[PackError]:
    errors: list[PackError] = []
    err = lambda path, msg: errors.append(PackError(path, msg))

    if not isinstance(data, dict):
        return [PackError("/", "pack document must be a mapping")]

    if data.get("pack_version") != PACK_FORMAT_VERSION:
        err("pack_version", f"expected {PACK_FORMAT_VERSION}, got {data.get('pack_version')!r}")
    if not isinstance(data.get("name"), str) or not data.get("name"):
        err("name", "missing or empty pack name")
    if not isinstance(data.get("version"), str) or not data.get("version"):
        err("version", "missing or empty pack content version")

    defaults = data.get("defaults")
    if not isinstance(defaults, dict):
        err("defaults", "missing defaults mapping")
    else:
        penalty = defaults.get("td_penalty")
        if not _is_int(penalty) or penalty < 0:
            err("defaults.td_penalty", f"must be a non-negative integer, got {penalty!r}")
        rounds = defaults.get("max_rounds")
        if not _is_int(rounds) or rounds < 1:
            err("defaults.max_rounds", f"must be a positive integer, got {rounds!r}")

    tickets = data.get("tickets")
    ticket_kinds: dict[str, str] = {}
    if not isinstance(tickets, list) or not tickets:
        err("tickets", "missing ticket definitions")
    else:
        for i, t in enumerate(tickets):
            path = f"tickets[{i}]"
            if not isinstance(t, dict):
                err(path, "ticket must be a mapping")
                continue
            tid = t.get("id")
            if not isinstance(tid, str) or not tid:
                err(f"{path}.id", "missing ticket id")
                continue
            if tid in ticket_kinds:
                err(f"{path}.id", f"duplicate ticket id {tid!r}")
            kind = t.get("kind")
            if kind not in (TicketKind.ARCHITECTURE.value, TicketKind.FEATURE.value):
                err(f"{path}.kind", f"unknown ticket kind {kind!r}")
                kind = TicketKind.FEATURE.value
            ticket_kinds[tid] = kind
            tasks = t.get("tasks")
            if not _is_int(tasks) or not 1 <= tasks <= MAX_TASKS:
                err(f"{path}.tasks", f"tasks must be in 1..{MAX_TASKS}, got {tasks!r}")
            blocked = t.get("blocked", [])
            if not isinstance(blocked, list) or any(not _is_int(d) or not 1 <= d <= 6
                                                    for d in blocked):
                err(f"{path}.blocked", f"blocked must list digits 1..6, got {blocked!r}")
            elif len(set(blocked)) > MAX_PRINTED_BLOCKED:
                err(f"{path}.blocked",
                    "unworkable ticket: at most five printed digits may be blocked")
            users = t.get("users", 0)
            if not _is_int(users) or users < 0:
                err(f"{path}.users", f"users must be a non-negative integer, got {users!r}")
            elif kind == TicketKind.ARCHITECTURE.value and users != 0:
                err(f"{path}.users", "architecture tickets carry no users")

    board = data.get("board")
    if not isinstance(board, dict) or sorted(board) != sorted(MODULE_IDS):
        err("board", f"board must define exactly modules {list(MODULE_IDS)}")
    else:
        for module, slots in board.items():
            path = f"board.{module}"
            if not isinstance(slots, list) or not slots:
                err(path, "module needs at least one slot")
                continue
            for j, slot in enumerate(slots):
                spath = f"{path}[{j}]"
                if not isinstance(slot, dict):
                    err(spath, "slot must be a mapping")
                    continue
                tid = slot.get("ticket")
                if tid not in ticket_kinds:
                    err(f"{spath}.ticket", f"unknown ticket {tid!r}")
                else:
                    expected = (TicketKind.ARCHITECTURE.value if j == 0
                                else TicketKind.FEATURE.value)
                    if ticket_kinds[tid] != expected:
                        err(f"{spath}.ticket",
                            f"slot {j} expects a {expected} ticket, "
                            f"got {ticket_kinds[tid]}")
                trigger = slot.get("trigger")
                if trigger not in (None, CardKind.EVENT.value, CardKind.ACTION.value):
                    err(f"{spath}.trigger", f"unknown trigger {trigger!r}")

    seen_cards: set[str] = set()
    for deck_name, kind in (("event_cards", CardKind.EVENT),
                            ("action_cards", CardKind.ACTION)):
        cards = data.get(deck_name)
        if not isinstance(cards, list):
            err(deck_name, "missing card list")
            continue
        for i, c in enumerate(cards):
            _validate_card(c, f"{deck_name}[{i}]", kind, seen_cards, errors)

    return errors


def _validate_card(c: Any, path: str, kind: CardKind, seen: set[str],
                   errors: list[PackError]) -> None:
    err = lambda p, msg: errors.append(PackError(p, msg))
    if not isinstance(c, dict):
        err(path, "card must be a mapping")
        return
    cid = c.get("id")
    if not isinstance(cid, str) or not cid:
        err(f"{path}.id", "missing card id")
    elif cid in seen:
        err(f"{path}.id", f"duplicate card id {cid!r}")
    else:
        seen.add(cid)
    for field_name in ("title", "narrative"):
        if not isinstance(c.get(field_name), str) or not c.get(field_name):
            err(f"{path}.{field_name}", f"missing {field_name}")

    tags = c.get("aha_tags")
    unknown = validate_tags(tags if tags is not None else [])
    for tag in unknown:
        err(f"{path}.aha_tags", f"unknown aha variable {tag!r}")
    if kind == CardKind.EVENT and not tags:
        err(f"{path}.aha_tags", "event cards must carry at least one aha tag")

    effects = c.get("effect")
    if not isinstance(effects, list) or not 1 <= len(effects) <= MAX_EFFECTS_PER_CARD:
        err(f"{path}.effect", f"effect must list 1..{MAX_EFFECTS_PER_CARD} primitives")
        return
    for j, e in enumerate(effects):
        epath = f"{path}.effect[{j}]"
        if not isinstance(e, dict):
            err(epath, "effect must be a mapping")
            continue
        op = e.get("op")
        try:
            op_enum = EffectOp(op)
        except ValueError:
            err(f"{epath}.op", f"unknown effect op {op!r}")
            continue
        selector = e.get("selector")
        if selector is not None and selector not in SELECTORS:
            err(f"{epath}.selector", f"unknown selector {selector!r}")
        if op_enum == EffectOp.BLOCK_DIGIT_FOR_ROUNDS:
            if not _is_int(e.get("digit")) or not 1 <= e["digit"] <= 6:
                err(f"{epath}.digit", "block effect needs a digit 1..6")
            if not _is_int(e.get("rounds")) or e["rounds"] < 1:
                err(f"{epath}.rounds", "block effect needs rounds >= 1")
        target = e.get("target_team", TARGET_SELF)
        if target not in (TARGET_SELF, TARGET_OPPONENT):
            err(f"{epath}.target_team", f"unknown target team {target!r}")
        if kind == CardKind.EVENT:
            eff = _build_effect(e)
            if eff.needs_binding() is not None:
                err(epath, "event cards resolve immediately and cannot "
                           "require a player choice")


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _build_effect(e: dict) -> Effect:
    return Effect(
        op=EffectOp(e["op"]),
        selector=e.get("selector"),
        digit=e.get("digit"),
        rounds=e.get("rounds"),
        target_team=e.get("target_team", TARGET_SELF),
    )


def _build_card(c: dict, kind: CardKind) -> Card:
    return Card(
        id=c["id"],
        kind=kind,
        title=c["title"],
        narrative=c["narrative"],
        effect=tuple(_build_effect(e) for e in c["effect"]),
        aha_tags=tuple(c.get("aha_tags") or ()),
        consumes_turn=bool(c.get("consumes_turn", True)),
    )


def _build_pack(data: dict) -> ContentPack:
    tickets: dict[str, Ticket] = {}
    for t in data["tickets"]:
        tickets[t["id"]] = Ticket(
            id=t["id"],
            kind=TicketKind(t["kind"]),
            tasks_required=t["tasks"],
            users=t.get("users", 0),
            blocked=frozenset(t.get("blocked", [])),
        )
    board: dict[str, tuple[SlotSpec, ...]] = {}
    for module in MODULE_IDS:
        slots = []
        for slot in data["board"][module]:
            trigger = slot.get("trigger")
            slots.append(SlotSpec(
                kind=tickets[slot["ticket"]].kind,
                ticket_id=slot["ticket"],
                trigger=CardKind(trigger) if trigger else None,
            ))
        board[module] = tuple(slots)
    return ContentPack(
        name=data["name"],
        version=data["version"],
        board=board,
        tickets=tickets,
        event_cards=tuple(_build_card(c, CardKind.EVENT) for c in data["event_cards"]),
        action_cards=tuple(_build_card(c, CardKind.ACTION) for c in data["action_cards"]),
        td_penalty=data["defaults"]["td_penalty"],
        max_rounds=data["defaults"]["max_rounds"],
    )


# ---------------------------------------------------------------------------
# Coverage

def coverage_report(pack: ContentPack) -> dict[str, int]:
    """How many sources can surface each aha-moment with this pack.

    Mechanic-emitted rows count an intrinsic 1; every card adds 1 to each of
    its tags.
    """
    counts = {key: (1 if key in MECHANIC_TAGS else 0) for key in AHA_REGISTRY}
    for card in pack.event_cards + pack.action_cards:
        for tag in card.aha_tags:
            counts[tag] += 1
    return counts


def default_pack() -> ContentPack:
    """The shipped pack: 3 modules x (1 architecture + 3 feature slots),
    20 event cards, 12 action cards."""
    text = resources.files("techdebt_game").joinpath("packs/default.yaml") \
        .read_text(encoding="utf-8")
    return load_pack(text)
