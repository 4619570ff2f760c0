"""Shared test scaffolding: board surgery, a bare random game driver, and a
live HTTP server for streaming tests."""

import random
import socket
import threading
import time

import techdebt_game as tg
from techdebt_game.model import (
    Bindings,
    PlayAction,
    Ticket,
    TicketKind,
    Work,
)


def new_state(pack, seed=1, **overrides):
    return tg.new_session(pack, tg.make_config(pack, seed=seed, **overrides))


def force_wip(state, team_idx, module_id, *, blocked=(), td=(), tasks_required=40,
              tasks_done=0, kind=TicketKind.FEATURE, users=0, ticket_id=None):
    """Install an in-progress ticket directly, bypassing StartTicket."""
    ticket = Ticket(
        id=ticket_id or f"wip-{module_id}",
        kind=kind,
        tasks_required=tasks_required,
        users=users,
        blocked=frozenset(blocked),
        tasks_done=tasks_done,
        td=set(td),
    )
    state.teams[team_idx].module(module_id).in_progress = ticket
    return ticket


def place_ticket(state, team_idx, module_id, *, td=(), kind=TicketKind.FEATURE,
                 users=0, ticket_id=None):
    """Append a completed ticket to a module's placed row."""
    col = state.teams[team_idx].module(module_id)
    ticket = Ticket(
        id=ticket_id or f"placed-{module_id}-{len(col.placed)}",
        kind=kind,
        tasks_required=1,
        users=users,
        blocked=frozenset(),
        tasks_done=1,
        td=set(td),
    )
    col.placed.append(ticket)
    return ticket


def random_move(state, rng):
    """A uniformly random legal move with random incur/bindings filled in."""
    legal = tg.legal_moves(state)
    move = rng.choice(legal)
    if isinstance(move, Work):
        blocked = tg.effective_blocked(state.teams[state.active_team], move.module_id)
        incur = tuple(d for d in sorted(blocked) if rng.random() < 0.5)
        return Work(move.module_id, incur)
    if isinstance(move, PlayAction):
        card = state.teams[state.active_team].card_in_hand(move.card_id)
        if card.required_bindings():
            tiles = list(state.teams[state.active_team].td_tiles())
            if not tiles:
                others = [m for m in legal
                          if not isinstance(m, PlayAction)
                          or not state.teams[state.active_team]
                          .card_in_hand(m.card_id).required_bindings()]
                return random_move_from(state, rng, others)
            return PlayAction(move.card_id,
                              Bindings(digit=rng.randint(1, 6), target=rng.choice(tiles)))
    return move


def random_move_from(state, rng, moves):
    move = rng.choice(moves)
    if isinstance(move, Work):
        blocked = tg.effective_blocked(state.teams[state.active_team], move.module_id)
        incur = tuple(d for d in sorted(blocked) if rng.random() < 0.5)
        return Work(move.module_id, incur)
    return move


def play_random_game(pack, seed, **overrides):
    """Engine-level fuzz driver independent of the policies module."""
    state = new_state(pack, seed=seed, **overrides)
    rng = random.Random(seed ^ 0x5EED)
    while not state.finished:
        tg.submit_move(state, state.active_team, random_move(state, rng))
    return state


def start_live_server(app):
    """Run the app under uvicorn on an ephemeral port; returns (stop, base_url).

    The in-process test client buffers whole responses, so server-push
    streams need a real socket.
    """
    import uvicorn

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.01)

    def stop():
        server.should_exit = True
        thread.join(timeout=5)

    return stop, f"http://127.0.0.1:{port}"
