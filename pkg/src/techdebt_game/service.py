"""Network-facing session host: lobby, moves, state streaming, persistence.

Wire protocol (documented field-by-field in docs/protocol.md, schema
``td-game/v1``): JSON request/response endpoints plus a server-push SSE
channel for ``stream``. The host is framework-thin: :class:`SessionHost`
holds all behaviour and the FastAPI app only translates HTTP.

Concurrency: one lock per session serializes submits (single-writer); every
accepted move is flushed to the session journal before the response is sent;
stream fan-out is read-only snapshots pushed through per-subscriber queues.
"""

from __future__ import annotations

import json
import os
import queue
import secrets
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Iterator, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from .content import ContentPack, default_pack, load_pack
from .model import GameState, MoveRejected, TicketKind, WIP_INDEX, move_from_dict
from .session import (
    canonical_json,
    make_config,
    new_session,
    replay_to_lines,
    submit_move,
)
from . import rules

WIRE_SCHEMA = "td-game/v1"

STATUS_LOBBY = "lobby"
STATUS_RUNNING = "running"
STATUS_FINISHED = "finished"

DEFAULT_TIMER_MINUTES = 60.0

ENV_PORT = "TDGAME_PORT"
ENV_STORAGE = "TDGAME_STORAGE"


def generate_token() -> str:
    return secrets.token_urlsafe(16)


class ServiceError(Exception):
    def __init__(self, status: int, code: str, reason: str):
        super().__init__(reason)
        self.status = status
        self.code = code
        self.reason = reason


@dataclass
class Seat:
    token: str
    team: int
    index: int
    name: str
    joined: bool = False


@dataclass
class _Subscriber:
    seat: Seat
    inbox: "queue.Queue[Optional[str]]"


class HostedSession:
    def __init__(self, session_id: str, pack: ContentPack, state: GameState,
                 seats: list[Seat], journal_path: Optional[Path],
                 deadline: Optional[float]):
        self.id = session_id
        self.pack = pack
        self.state = state
        self.seats = {seat.token: seat for seat in seats}
        self.journal_path = journal_path
        self.deadline = deadline
        self.lock = threading.RLock()
        self.seq = 0  # accepted move counter, also the push sequence number
        self.created_seq = 0
        self.finished_seq: Optional[int] = None
        self.subscribers: list[_Subscriber] = []
        self._journal_events_written = 0

    @property
    def status(self) -> str:
        if self.state.finished:
            return STATUS_FINISHED
        if all(seat.joined for seat in self.seats.values()):
            return STATUS_RUNNING
        return STATUS_LOBBY


class SessionHost:
    """All service behaviour, independent of HTTP."""

    def __init__(self, packs: Optional[dict[str, ContentPack]] = None,
                 storage_dir: Optional[str | Path] = None,
                 clock: Callable[[], float] = time.time):
        base = default_pack()
        self.packs: dict[str, ContentPack] = {base.name: base}
        if packs:
            self.packs.update(packs)
        self.storage_dir = Path(storage_dir) if storage_dir else None
        if self.storage_dir is not None:
            (self.storage_dir / "sessions").mkdir(parents=True, exist_ok=True)
            (self.storage_dir / "replays").mkdir(parents=True, exist_ok=True)
        self.clock = clock
        self.sessions: dict[str, HostedSession] = {}
        self._registry_lock = threading.Lock()

    # -- lifecycle ----------------------------------------------------------

    def create_session(self, payload: dict[str, Any]) -> dict[str, Any]:
        pack_name = payload.get("pack", "default")
        pack = self.packs.get(pack_name)
        if pack is None:
            raise ServiceError(400, "unknown_pack", f"unknown pack {pack_name!r}")
        seed = int(payload.get("seed", secrets.randbits(63)))
        team_names = tuple(payload.get("team_names", ("Team 1", "Team 2")))
        rosters = payload.get("players")
        if rosters is None:
            rosters = (("Player 1", "Player 2"), ("Player 3", "Player 4"))
        else:
            rosters = tuple(tuple(str(p) for p in roster) for roster in rosters)
        try:
            config = make_config(
                pack, seed=seed,
                max_rounds=payload.get("max_rounds"),
                td_penalty=payload.get("td_penalty"),
                team_names=team_names,  # type: ignore[arg-type]
                rosters=rosters,  # type: ignore[arg-type]
            )
            state = new_session(pack, config)
        except (ValueError, TypeError) as exc:
            raise ServiceError(400, "invalid_config", str(exc)) from exc

        session_id = secrets.token_urlsafe(8)
        seats = []
        for team, roster in enumerate(config.rosters):
            for index, name in enumerate(roster):
                seats.append(Seat(token=generate_token(), team=team,
                                  index=index, name=name))
        timer_minutes = payload.get("timer_minutes", DEFAULT_TIMER_MINUTES)
        deadline = (self.clock() + float(timer_minutes) * 60.0
                    if timer_minutes else None)

        journal_path = None
        if self.storage_dir is not None:
            journal_path = self.storage_dir / "sessions" / f"{session_id}.jsonl"
        session = HostedSession(session_id, pack, state, seats, journal_path,
                                deadline)
        if journal_path is not None:
            self._rewrite_journal(session)
        with self._registry_lock:
            self.sessions[session_id] = session
        tokens = [[seat.token for seat in seats if seat.team == team]
                  for team in (0, 1)]
        return {
            "schema": WIRE_SCHEMA,
            "session_id": session_id,
            "join_tokens": tokens,
            "config": config.to_dict(),
        }

    def _get(self, session_id: str) -> HostedSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "not_found", f"unknown session {session_id!r}")
        return session

    def _seat(self, session: HostedSession, token: str) -> Seat:
        seat = session.seats.get(token)
        if seat is None:
            raise ServiceError(403, "bad_token", "unknown join token")
        return seat

    def join(self, session_id: str, token: str) -> dict[str, Any]:
        session = self._get(session_id)
        with session.lock:
            seat = self._seat(session, token)
            seat.joined = True  # reconnecting with the same token is allowed
            return {"seat": {"team": seat.team, "index": seat.index,
                             "name": seat.name},
                    "view": self.client_view(session, seat)}

    # -- moves --------------------------------------------------------------

    def submit(self, session_id: str, token: str, move_payload: Any) -> dict[str, Any]:
        session = self._get(session_id)
        with session.lock:
            seat = self._seat(session, token)
            self._check_timer(session)
            if session.status == STATUS_LOBBY:
                raise ServiceError(409, "not_running", "session is still in the lobby")
            state = session.state
            if state.finished:
                raise ServiceError(409, "game_over", "game over")
            if seat.team != state.active_team:
                raise ServiceError(409, "not_your_seat",
                                   "not your seat's team turn")
            try:
                move = move_from_dict(move_payload)
                events_before = len(state.log)
                submit_move(state, seat.team, move)
            except MoveRejected as exc:
                raise ServiceError(409, exc.code, exc.reason) from exc
            session.seq += 1
            if state.finished:
                session.finished_seq = session.seq
            self._append_journal(session, events_before)
            self._push_views(session)
            return {"accepted": True, "view": self.client_view(session, seat)}

    def _check_timer(self, session: HostedSession) -> None:
        """Wall-clock expiry clamps the round limit to the next boundary, so
        the game ends deterministically and replays stay exact."""
        state = session.state
        if session.deadline is None or state.finished:
            return
        if self.clock() <= session.deadline:
            return
        clamped = min(state.config.max_rounds, state.round + 1)
        if clamped != state.config.max_rounds:
            state.config = replace(state.config, max_rounds=clamped)
            if session.journal_path is not None:
                self._rewrite_journal(session)
        session.deadline = None

    # -- views --------------------------------------------------------------

    def view_for_token(self, session_id: str, token: str) -> dict[str, Any]:
        session = self._get(session_id)
        with session.lock:
            seat = self._seat(session, token)
            return self.client_view(session, seat)

    def client_view(self, session: HostedSession, seat: Seat) -> dict[str, Any]:
        """Pure projection of (state, seat): identical for every seat except
        the affordances. Never contains tokens."""
        state = session.state
        view: dict[str, Any] = {
            "schema": WIRE_SCHEMA,
            "session": session.id,
            "seq": session.seq,
            "status": session.status,
            "seat": {"team": seat.team, "index": seat.index, "name": seat.name},
            "round": state.round,
            "max_rounds": state.config.max_rounds,
            "active_team": state.active_team,
            "phase": state.phase,
            "deadline_epoch": session.deadline,
            "teams": [self._team_view(state, team_index)
                      for team_index in (0, 1)],
            "last_events": self._last_move_events(state),
            "last_roll": self._last_roll(state),
            "your_moves": [],
            "result": None,
        }
        if state.finished:
            scores = rules.final_score(state)
            ended = next(e for e in reversed(state.log) if e.kind == "game_ended")
            view["result"] = {
                "scores": [scores[0], scores[1]],
                "winner": ended.data["winner"],
                "reason": ended.data["reason"],
            }
        elif session.status == STATUS_RUNNING and seat.team == state.active_team:
            view["your_moves"] = self._affordances(state, seat.team)
        return view

    @staticmethod
    def _last_move_events(state: GameState) -> list[dict[str, Any]]:
        """Events of the most recent accepted move (the narrative feed).
        Dice faces reach clients only through here; clients never roll."""
        start = 0
        for i in range(len(state.log) - 1, -1, -1):
            if state.log[i].kind == "move_accepted":
                start = i
                break
        else:
            return []
        return [e.to_dict() for e in state.log[start:]]

    @staticmethod
    def _last_roll(state: GameState) -> Optional[dict[str, Any]]:
        for event in reversed(state.log):
            if event.kind == "dice_rolled":
                return {"first": event.data["first"], "second": event.data["second"],
                        "for": event.data["for"], "team": event.team,
                        "module": event.data.get("module")}
        return None

    def _team_view(self, state: GameState, team_index: int) -> dict[str, Any]:
        team = state.teams[team_index]
        modules = []
        for col in team.modules:
            wip = None
            if col.in_progress is not None:
                wip = col.in_progress.to_dict()
                wip["effective_blocked"] = sorted(
                    rules.effective_blocked(team, col.id))
            modules.append({
                "id": col.id,
                "slots": [{"kind": slot.kind.value, "ticket_id": slot.ticket_id,
                           "trigger": slot.trigger.value if slot.trigger else None}
                          for slot in col.slots],
                "placed": [t.to_dict() for t in col.placed],
                "in_progress": wip,
            })
        return {
            "team": team.index,
            "name": team.name,
            "users_banked": team.users_banked,
            "skip_turns_pending": team.skip_turns_pending,
            "temp_blocked": {str(d): r for d, r in sorted(team.temp_blocked.items())},
            "double_users_pending": team.double_users_pending,
            "td_count": team.td_count(),
            "hand": [card.to_dict() for card in team.hand],
            "modules": modules,
        }

    def _affordances(self, state: GameState, team_index: int) -> list[dict[str, Any]]:
        team = state.teams[team_index]
        moves = []
        for move in rules.legal_moves(state):
            entry: dict[str, Any] = {}
            name = type(move).__name__
            if name == "Work":
                blocked = rules.effective_blocked(team, move.module_id)
                wip = team.module(move.module_id).in_progress
                entry = {"type": "work", "module": move.module_id,
                         "effective_blocked": sorted(blocked),
                         "incur_options": sorted(d for d in blocked
                                                 if d not in wip.td)}
            elif name == "Repay":
                ticket = team.module(move.module_id).ticket_at(move.ticket_index)
                entry = {"type": "repay", "module": move.module_id,
                         "ticket": move.ticket_index, "digit": move.digit,
                         "threshold": rules.REPAY_THRESHOLD[ticket.kind]}
            elif name == "PlayAction":
                card = team.card_in_hand(move.card_id)
                entry = {"type": "play_action", "card": move.card_id,
                         "required_bindings": card.required_bindings(),
                         "binding_targets": [ref.to_dict()
                                             for ref in team.td_tiles()],
                         "digit_choices": self._digit_choices(state, team)}
            elif name == "StartTicket":
                col = team.module(move.module_id)
                proto = state.ticket_protos[col.slots[len(col.placed)].ticket_id]
                entry = {"type": "start_ticket", "module": move.module_id,
                         "ticket": proto.to_dict()}
            moves.append(entry)
        return moves

    @staticmethod
    def _digit_choices(state: GameState, team) -> list[int]:
        for col in team.modules:
            if col.in_progress is not None:
                return sorted(set(range(1, 7)) - col.in_progress.td)
        return list(range(1, 7))

    # -- streaming ----------------------------------------------------------

    def subscribe(self, session_id: str, token: str) -> tuple[HostedSession, _Subscriber]:
        session = self._get(session_id)
        with session.lock:
            seat = self._seat(session, token)
            if not seat.joined:
                raise ServiceError(409, "not_joined", "join before streaming")
            sub = _Subscriber(seat=seat, inbox=queue.Queue())
            session.subscribers.append(sub)
            # initial snapshot so late subscribers resync immediately
            sub.inbox.put(self._sse_frame(session, sub.seat))
            if session.state.finished:
                sub.inbox.put(None)
            return session, sub

    def unsubscribe(self, session: HostedSession, sub: _Subscriber) -> None:
        with session.lock:
            if sub in session.subscribers:
                session.subscribers.remove(sub)

    def _sse_frame(self, session: HostedSession, seat: Seat) -> str:
        view = self.client_view(session, seat)
        return f"id: {session.seq}\nevent: view\ndata: {canonical_json(view)}\n\n"

    def _push_views(self, session: HostedSession) -> None:
        for sub in session.subscribers:
            sub.inbox.put(self._sse_frame(session, sub.seat))
            if session.state.finished:
                sub.inbox.put(None)  # terminal marker

    # -- persistence --------------------------------------------------------

    def _rewrite_journal(self, session: HostedSession) -> None:
        lines = replay_to_lines(session.state)
        session.journal_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        session._journal_events_written = len(session.state.log)

    def _append_journal(self, session: HostedSession, events_before: int) -> None:
        if session.journal_path is None:
            return
        new_events = session.state.log[session._journal_events_written:]
        if not new_events:
            return
        with open(session.journal_path, "a", encoding="utf-8") as fh:
            for event in new_events:
                fh.write(canonical_json(event.to_dict()) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        session._journal_events_written = len(session.state.log)

    def archive(self, session_id: str) -> dict[str, Any]:
        """Persist the finished game's replay; idempotent."""
        session = self._get(session_id)
        with session.lock:
            if not session.state.finished:
                raise ServiceError(409, "not_finished", "session is not finished")
            if self.storage_dir is None:
                raise ServiceError(409, "no_storage", "service has no storage directory")
            path = self.storage_dir / "replays" / f"{session_id}.replay.jsonl"
            content = "\n".join(replay_to_lines(session.state)) + "\n"
            path.write_text(content, encoding="utf-8")
            return {"session_id": session_id, "events": len(session.state.log),
                    "replay": f"/sessions/{session_id}/replay"}

    def replay_text(self, session_id: str) -> str:
        if self.storage_dir is not None:
            path = self.storage_dir / "replays" / f"{session_id}.replay.jsonl"
            if path.exists():
                return path.read_text(encoding="utf-8")
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "not_found", f"unknown session {session_id!r}")
        with session.lock:
            return "\n".join(replay_to_lines(session.state)) + "\n"


# ---------------------------------------------------------------------------
# HTTP wiring

def load_packs_dir(packs_dir: str | Path) -> dict[str, ContentPack]:
    packs = {}
    for path in sorted(Path(packs_dir).glob("*.yaml")):
        pack = load_pack(path)
        packs[pack.name] = pack
    return packs


def create_app(packs_dir: Optional[str | Path] = None,
               storage_dir: Optional[str | Path] = None,
               clock: Callable[[], float] = time.time,
               static_dir: Optional[str | Path] = None) -> FastAPI:
    packs = load_packs_dir(packs_dir) if packs_dir else None
    if storage_dir is None:
        storage_dir = os.environ.get(ENV_STORAGE)
    host = SessionHost(packs=packs, storage_dir=storage_dir, clock=clock)
    app = FastAPI(title="TechDebt Game service")
    app.state.host = host

    @app.exception_handler(ServiceError)
    async def handle_service_error(_request, exc: ServiceError):
        return JSONResponse(status_code=exc.status,
                            content={"error": {"code": exc.code,
                                               "reason": exc.reason}})

    @app.get("/packs")
    def list_packs():
        return {"packs": [{"name": p.name, "version": p.version}
                          for p in host.packs.values()]}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict):
        return host.create_session(payload or {})

    @app.post("/sessions/{session_id}/join")
    def join(session_id: str, payload: dict):
        return host.join(session_id, str(payload.get("token", "")))

    @app.post("/sessions/{session_id}/moves")
    def submit(session_id: str, payload: dict):
        return host.submit(session_id, str(payload.get("token", "")),
                           payload.get("move"))

    @app.get("/sessions/{session_id}/state")
    def view(session_id: str, token: str):
        return host.view_for_token(session_id, token)

    @app.get("/sessions/{session_id}/stream")
    def stream(session_id: str, token: str):
        session, sub = host.subscribe(session_id, token)

        def frames() -> Iterator[str]:
            try:
                while True:
                    try:
                        frame = sub.inbox.get(timeout=15.0)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    if frame is None:
                        yield "event: end\ndata: {}\n\n"
                        return
                    yield frame
            finally:
                host.unsubscribe(session, sub)

        return StreamingResponse(frames(), media_type="text/event-stream")

    @app.post("/sessions/{session_id}/archive")
    def archive(session_id: str):
        return host.archive(session_id)

    @app.get("/sessions/{session_id}/replay", response_class=PlainTextResponse)
    def replay_file(session_id: str):
        return host.replay_text(session_id)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(port: Optional[int] = None, packs_dir: Optional[str] = None,
          storage_dir: Optional[str] = None,
          static_dir: Optional[str] = None) -> None:  # pragma: no cover - CLI path
    import uvicorn

    if port is None:
        port = int(os.environ.get(ENV_PORT, "8000"))
    app = create_app(packs_dir=packs_dir, storage_dir=storage_dir,
                     static_dir=static_dir)
    uvicorn.run(app, host="0.0.0.0", port=port)
