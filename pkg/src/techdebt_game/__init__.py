"""The TechDebt Game: rules engine, strategy simulator, and session service."""

from .aha import AHA_REGISTRY, MECHANIC_TAGS, AhaGroup, AhaMoment
from .content import (
    ContentPack,
    PackError,
    PackValidationError,
    coverage_report,
    default_pack,
    load_pack,
    serialize_pack,
)
from .model import (
    Bindings,
    Card,
    CardKind,
    DiceRoll,
    EngineError,
    GameEvent,
    GameState,
    Move,
    MoveRejected,
    PlayAction,
    Repay,
    SessionConfig,
    StartTicket,
    TeamState,
    Ticket,
    TicketKind,
    TicketRef,
    Work,
)
from .rules import (
    apply_repay,
    apply_start_ticket,
    apply_work,
    complete_ticket,
    draw_card,
    apply_effect,
    effective_blocked,
    final_score,
    is_game_over,
    legal_moves,
    resolve_work,
)
from .session import (
    ReplayDivergence,
    ReplayFile,
    aha_exposure,
    make_config,
    new_session,
    read_replay,
    replay,
    submit_move,
    write_replay,
)

__version__ = "0.1.0"
