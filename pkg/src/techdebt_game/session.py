"""Session engine: drives full games and makes them replayable.

A session is one serialized command stream: validate a move, apply it through
the rules, rotate the turn. The event log plus the header (pack, seed,
config) is a complete record; replaying the logged moves against the same
seed regenerates the log bit-for-bit. Replay files are line-delimited JSON
(docs/replay-format.md).
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from .content import ContentPack, default_pack
from .model import (
    EV_MOVE_ACCEPTED,
    GameEvent,
    GameState,
    ModuleColumn,
    Move,
    MoveRejected,
    PlayAction,
    Repay,
    SessionConfig,
    StartTicket,
    TeamState,
    Work,
    move_from_dict,
    move_to_dict,
    roll_dice,
)
from . import rules

REPLAY_SCHEMA = "td-replay/v1"


def make_config(pack: ContentPack, seed: int, max_rounds: Optional[int] = None,
                td_penalty: Optional[int] = None,
                team_names: tuple[str, str] = ("Team 1", "Team 2"),
                rosters: Optional[tuple[tuple[str, ...], tuple[str, ...]]] = None,
                ) -> SessionConfig:
    if rosters is None:
        rosters = (("P1", "P2"), ("P3", "P4"))
    if len(rosters) != 2 or len(team_names) != 2:
        raise ValueError("exactly two teams")
    for roster in rosters:
        if not 1 <= len(roster) <= 4:
            raise ValueError("each team seats 1..4 players")
    return SessionConfig(
        pack_name=pack.name,
        pack_version=pack.version,
        seed=int(seed),
        max_rounds=pack.max_rounds if max_rounds is None else int(max_rounds),
        td_penalty=pack.td_penalty if td_penalty is None else int(td_penalty),
        team_names=tuple(team_names),  # type: ignore[arg-type]
        rosters=tuple(tuple(r) for r in rosters),  # type: ignore[arg-type]
    )


def new_session(pack: ContentPack, config: SessionConfig) -> GameState:
    """Initial state: empty boards, seeded shuffled decks, first team active."""
    if (config.pack_name, config.pack_version) != (pack.name, pack.version):
        raise ValueError(
            f"config is for pack {config.pack_name}/{config.pack_version}, "
            f"got {pack.name}/{pack.version}")
    if len(config.rosters) != 2:
        raise ValueError("exactly two teams")
    if config.max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    rng = random.Random(config.seed)
    teams = []
    for index in range(2):
        modules = [ModuleColumn(id=module, slots=pack.board[module])
                   for module in sorted(pack.board)]
        teams.append(TeamState(index=index, name=config.team_names[index],
                               modules=modules))
    event_deck = list(pack.event_cards)
    action_deck = list(pack.action_cards)
    rng.shuffle(event_deck)
    rng.shuffle(action_deck)
    return GameState(
        config=config,
        teams=teams,
        event_deck=event_deck,
        action_deck=action_deck,
        ticket_protos=dict(pack.tickets),
        rng=rng,
    )


def submit_move(state: GameState, team_id: int, move: Move) -> GameState:
    """Validate and apply one move for ``team_id``.

    On success the state advances (log grows, turn rotates) and is returned.
    On any problem :class:`MoveRejected` is raised and the state is untouched:
    all validation happens before the first mutation.
    """
    if state.finished:
        raise MoveRejected("game_over", "game over")
    if team_id != state.active_team:
        raise MoveRejected("not_your_turn", "not your turn")
    rules.check_move(state, move)

    state.emit(EV_MOVE_ACCEPTED, team_id, {"move": move_to_dict(move)})
    consumed = True
    if isinstance(move, Work):
        rules.apply_work(state, move, roll_dice(state.rng))
    elif isinstance(move, Repay):
        rules.apply_repay(state, move, roll_dice(state.rng))
    elif isinstance(move, PlayAction):
        consumed = rules.apply_play_action(state, move)
    elif isinstance(move, StartTicket):
        rules.apply_start_ticket(state, move)
    else:  # pragma: no cover - closed union
        raise MoveRejected("malformed_move", f"unknown move {move!r}")
    rules.end_turn(state, consumed)
    return state


def aha_exposure(state: GameState) -> dict[str, int]:
    """Tag counts across the whole log: which insights this game surfaced."""
    counts: Counter[str] = Counter()
    for event in state.log:
        counts.update(event.aha)
    return dict(counts)


# ---------------------------------------------------------------------------
# Replay files

def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ReplayFile:
    config: SessionConfig
    events: tuple[dict, ...]

    def moves(self) -> list[tuple[int, Move]]:
        out = []
        for event in self.events:
            if event["kind"] == EV_MOVE_ACCEPTED:
                out.append((int(event["team"]), move_from_dict(event["data"]["move"])))
        return out


class ReplayDivergence(Exception):
    def __init__(self, index: int, detail: str = ""):
        self.index = index
        super().__init__(f"replay divergence at event {index}"
                         + (f": {detail}" if detail else ""))


def replay_to_lines(state: GameState) -> list[str]:
    header = {"schema": REPLAY_SCHEMA, "config": state.config.to_dict()}
    lines = [canonical_json(header)]
    lines.extend(canonical_json(e.to_dict()) for e in state.log)
    return lines


def write_replay(state: GameState, path: str | Path) -> None:
    Path(path).write_text("\n".join(replay_to_lines(state)) + "\n", encoding="utf-8")


def read_replay_lines(lines: Iterable[str]) -> ReplayFile:
    it = iter(lines)
    try:
        header = json.loads(next(it))
    except StopIteration:
        raise ValueError("empty replay") from None
    if header.get("schema") != REPLAY_SCHEMA:
        raise ValueError(f"unsupported replay schema {header.get('schema')!r}")
    config = SessionConfig.from_dict(header["config"])
    events = tuple(json.loads(line) for line in it if line.strip())
    return ReplayFile(config=config, events=events)


def read_replay(path: str | Path) -> ReplayFile:
    with open(path, encoding="utf-8") as fh:
        return read_replay_lines(fh)


PackLookup = Callable[[str, str], ContentPack]


def _default_pack_lookup(name: str, version: str) -> ContentPack:
    pack = default_pack()
    if (pack.name, pack.version) != (name, version):
        raise ValueError(f"no pack {name!r} version {version!r} available")
    return pack


def replay(replay_file: ReplayFile,
           pack_lookup: PackLookup = _default_pack_lookup) -> GameState:
    """Re-run a recorded game and verify it regenerates the same log.

    Returns the final state; raises :class:`ReplayDivergence` naming the
    first differing event index when the file does not match (corruption or
    version skew).
    """
    pack = pack_lookup(replay_file.config.pack_name, replay_file.config.pack_version)
    state = new_session(pack, replay_file.config)
    move_positions = [i for i, e in enumerate(replay_file.events)
                      if e.get("kind") == EV_MOVE_ACCEPTED]
    for pos, (team, move) in zip(move_positions, replay_file.moves()):
        try:
            submit_move(state, team, move)
        except MoveRejected as exc:
            raise ReplayDivergence(pos, f"recorded move rejected: {exc.reason}") from exc
    recorded = [canonical_json(e) for e in replay_file.events]
    regenerated = [canonical_json(e.to_dict()) for e in state.log]
    for i, (a, b) in enumerate(zip(recorded, regenerated)):
        if a != b:
            raise ReplayDivergence(i)
    if len(recorded) != len(regenerated):
        raise ReplayDivergence(min(len(recorded), len(regenerated)))
    return state


def verify_replay_equal(state: GameState, replay_file: ReplayFile) -> bool:
    """Bitwise comparison of a live log against a recorded file."""
    live = [canonical_json(e.to_dict()) for e in state.log]
    recorded = [canonical_json(e) for e in replay_file.events]
    return live == recorded
