"""Monte Carlo harness: run policy pairings, collect statistics, export.

Games are independent and fully determined by (pack, policies, seed), so an
experiment is reproducible from its inputs alone. Seats alternate between
games to cancel the first-mover advantage.
"""

from __future__ import annotations

import csv
import gzip
import io
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .content import ContentPack
from .model import GameState, PlayAction
from .policies import Policy
from .session import (
    ReplayFile,
    aha_exposure,
    canonical_json,
    make_config,
    new_session,
    read_replay_lines,
    replay_to_lines,
    submit_move,
)
from . import rules


def _policy_rng(seed: int, team: int) -> random.Random:
    return random.Random(seed * 4 + team + 0x9E3779B9)


def play_game(pack: ContentPack, policies: tuple[Policy, Policy], seed: int,
              max_rounds: Optional[int] = None,
              td_penalty: Optional[int] = None) -> GameState:
    """One full bot game: policies[i] plays team i. Never submits an illegal
    move; any rejection is a policy bug and propagates."""
    config = make_config(pack, seed=seed, max_rounds=max_rounds,
                         td_penalty=td_penalty,
                         team_names=(policies[0].name, policies[1].name))
    state = new_session(pack, config)
    rngs = (_policy_rng(seed, 0), _policy_rng(seed, 1))
    while not state.finished:
        team = state.active_team
        policy = policies[team]
        move = policy.decide(state, rules.legal_moves(state), rngs[team])
        if isinstance(move, PlayAction):
            card = state.teams[team].card_in_hand(move.card_id)
            if card is not None and card.required_bindings() \
                    and move.bindings.target is None and move.bindings.digit is None:
                move = PlayAction(move.card_id, policy.bind(state, card, rngs[team]))
        submit_move(state, team, move)
    return state


@dataclass(frozen=True)
class GameRecord:
    index: int
    seed: int
    team_policies: tuple[str, str]
    scores: tuple[int, int]
    unrepaid_td: tuple[int, int]
    first_ticket_round: tuple[int, int]
    winner: Optional[int]  # team index, None for draws
    rounds: int

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "seed": self.seed,
            "team_policies": list(self.team_policies),
            "scores": list(self.scores),
            "unrepaid_td": list(self.unrepaid_td),
            "first_ticket_round": list(self.first_ticket_round),
            "winner": self.winner,
            "rounds": self.rounds,
        }


def record_game(index: int, seed: int, state: GameState) -> GameRecord:
    scores = rules.final_score(state)
    firsts = {0: None, 1: None}
    for event in state.log:
        if event.kind == "ticket_completed" and firsts[event.team] is None:
            firsts[event.team] = event.round
    censor = state.config.max_rounds
    return GameRecord(
        index=index,
        seed=seed,
        team_policies=(state.teams[0].name, state.teams[1].name),
        scores=(scores[0], scores[1]),
        unrepaid_td=(state.teams[0].td_count(), state.teams[1].td_count()),
        first_ticket_round=tuple(censor if f is None else f
                                 for f in (firsts[0], firsts[1])),
        winner=None if scores[0] == scores[1] else (0 if scores[0] > scores[1] else 1),
        rounds=state.round,
    )


@dataclass(frozen=True)
class PolicyStats:
    games: int
    wins: int
    draws: int
    mean_score: float
    std_score: float
    mean_unrepaid_td: float
    mean_rounds_to_first_ticket: float

    @property
    def win_rate(self) -> float:
        return self.wins / self.games if self.games else 0.0

    def to_dict(self) -> dict:
        return {
            "games": self.games,
            "wins": self.wins,
            "draws": self.draws,
            "win_rate": self.win_rate,
            "mean_score": self.mean_score,
            "std_score": self.std_score,
            "mean_unrepaid_td": self.mean_unrepaid_td,
            "mean_rounds_to_first_ticket": self.mean_rounds_to_first_ticket,
        }


@dataclass
class ExperimentResult:
    policy_a: str
    policy_b: str
    n: int
    base_seed: int
    pack_name: str
    pack_version: str
    max_rounds: int
    td_penalty: int
    records: list[GameRecord]
    aha_histogram: dict[str, int]
    stats: dict[str, PolicyStats] = field(default_factory=dict)

    def samples(self, policy: str, metric: str) -> list[float]:
        """Per-game values of one metric for one policy, seat-independent."""
        out = []
        for rec in self.records:
            for team in (0, 1):
                if rec.team_policies[team] != policy:
                    continue
                if metric == "score":
                    out.append(rec.scores[team])
                elif metric == "unrepaid_td":
                    out.append(rec.unrepaid_td[team])
                elif metric == "first_ticket_round":
                    out.append(rec.first_ticket_round[team])
                else:
                    raise ValueError(f"unknown metric {metric!r}")
        return out

    def to_dict(self) -> dict:
        return {
            "policy_a": self.policy_a,
            "policy_b": self.policy_b,
            "n": self.n,
            "base_seed": self.base_seed,
            "pack_name": self.pack_name,
            "pack_version": self.pack_version,
            "max_rounds": self.max_rounds,
            "td_penalty": self.td_penalty,
            "stats": {name: s.to_dict() for name, s in self.stats.items()},
            "aha_histogram": dict(sorted(self.aha_histogram.items())),
            "games": [r.to_dict() for r in self.records],
        }


def _stats_for(result_records: list[GameRecord], policy: str) -> PolicyStats:
    scores, tds, firsts, wins, draws, games = [], [], [], 0, 0, 0
    for rec in result_records:
        for team in (0, 1):
            if rec.team_policies[team] != policy:
                continue
            games += 1
            scores.append(rec.scores[team])
            tds.append(rec.unrepaid_td[team])
            firsts.append(rec.first_ticket_round[team])
            if rec.winner == team:
                wins += 1
            elif rec.winner is None:
                draws += 1
    return PolicyStats(
        games=games,
        wins=wins,
        draws=draws,
        mean_score=float(np.mean(scores)),
        std_score=float(np.std(scores)),
        mean_unrepaid_td=float(np.mean(tds)),
        mean_rounds_to_first_ticket=float(np.mean(firsts)),
    )


def run_experiment(policy_a: Policy, policy_b: Policy, n: int, base_seed: int,
                   pack: ContentPack, max_rounds: Optional[int] = None,
                   td_penalty: Optional[int] = None,
                   out_dir: Optional[str | Path] = None) -> ExperimentResult:
    """n games with seeds base_seed..base_seed+n-1, seats alternating.

    With ``out_dir`` the result tables and a gzip bundle of every replay are
    written there; every statistic is recomputable from the bundle.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    records: list[GameRecord] = []
    histogram: Counter[str] = Counter()
    bundle = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        bundle = gzip.open(out_dir / "replays.jsonl.gz", "wt", encoding="utf-8")
    try:
        for i in range(n):
            seed = base_seed + i
            seats = (policy_a, policy_b) if i % 2 == 0 else (policy_b, policy_a)
            state = play_game(pack, seats, seed, max_rounds=max_rounds,
                              td_penalty=td_penalty)
            records.append(record_game(i, seed, state))
            histogram.update(aha_exposure(state))
            if bundle is not None:
                bundle.write("\n".join(replay_to_lines(state)) + "\n")
    finally:
        if bundle is not None:
            bundle.close()

    result = ExperimentResult(
        policy_a=policy_a.name,
        policy_b=policy_b.name,
        n=n,
        base_seed=base_seed,
        pack_name=pack.name,
        pack_version=pack.version,
        max_rounds=max_rounds if max_rounds is not None else pack.max_rounds,
        td_penalty=td_penalty if td_penalty is not None else pack.td_penalty,
        records=records,
        aha_histogram=dict(histogram),
    )
    names = {policy_a.name, policy_b.name}
    result.stats = {name: _stats_for(records, name) for name in sorted(names)}
    if out_dir is not None:
        (out_dir / "results.json").write_text(export_results(result, "json"),
                                              encoding="utf-8")
        (out_dir / "results.csv").write_text(export_results(result, "csv"),
                                             encoding="utf-8")
    return result


def read_replay_bundle(path: str | Path) -> list[ReplayFile]:
    """Split a gzip replay bundle back into individual replay files."""
    replays: list[ReplayFile] = []
    chunk: list[str] = []
    with gzip.open(path, "rt", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if '"schema"' in line and json.loads(line).get("schema"):
                if chunk:
                    replays.append(read_replay_lines(chunk))
                chunk = [line]
            else:
                chunk.append(line)
    if chunk:
        replays.append(read_replay_lines(chunk))
    return replays


# ---------------------------------------------------------------------------
# statistics

def bootstrap_mean_diff(xs, ys, n_resamples: int = 10_000, seed: int = 0,
                        confidence: float = 0.99) -> dict[str, float]:
    """Percentile bootstrap CI for mean(xs) - mean(ys). Distribution-free."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    rng = np.random.default_rng(seed)
    diffs = np.empty(n_resamples)
    chunk = max(1, min(500, n_resamples))
    pos = 0
    while pos < n_resamples:
        k = min(chunk, n_resamples - pos)
        xi = rng.integers(0, len(xs), size=(k, len(xs)))
        yi = rng.integers(0, len(ys), size=(k, len(ys)))
        diffs[pos:pos + k] = xs[xi].mean(axis=1) - ys[yi].mean(axis=1)
        pos += k
    alpha = (1.0 - confidence) / 2.0
    lo, hi = np.quantile(diffs, [alpha, 1.0 - alpha])
    return {"diff": float(xs.mean() - ys.mean()), "lo": float(lo), "hi": float(hi),
            "confidence": confidence}


# ---------------------------------------------------------------------------
# exports

CSV_COLUMNS = ["index", "seed", "policy_team0", "policy_team1", "score_team0",
               "score_team1", "td_team0", "td_team1", "first_ticket_team0",
               "first_ticket_team1", "winner", "rounds"]


def export_results(result: ExperimentResult, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_COLUMNS)
        for rec in result.records:
            writer.writerow([
                rec.index, rec.seed, rec.team_policies[0], rec.team_policies[1],
                rec.scores[0], rec.scores[1], rec.unrepaid_td[0], rec.unrepaid_td[1],
                rec.first_ticket_round[0], rec.first_ticket_round[1],
                "" if rec.winner is None else rec.winner, rec.rounds,
            ])
        return buf.getvalue()
    if fmt == "table":
        lines = [f"experiment: {result.policy_a} vs {result.policy_b}  "
                 f"n={result.n} base_seed={result.base_seed} "
                 f"pack={result.pack_name}/{result.pack_version}"]
        header = (f"{'policy':>14} {'games':>6} {'win%':>6} {'draws':>6} "
                  f"{'score':>8} {'±std':>7} {'td':>6} {'first':>6}")
        lines.append(header)
        for name, s in result.stats.items():
            lines.append(f"{name:>14} {s.games:>6} {100 * s.win_rate:>5.1f}% "
                         f"{s.draws:>6} {s.mean_score:>8.2f} {s.std_score:>7.2f} "
                         f"{s.mean_unrepaid_td:>6.2f} "
                         f"{s.mean_rounds_to_first_ticket:>6.2f}")
        lines.append(f"distinct aha tags observed: {len(result.aha_histogram)}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_results_json(text: str) -> dict:
    return json.loads(text)


def parse_results_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for raw in reader:
        rows.append({
            "index": int(raw["index"]),
            "seed": int(raw["seed"]),
            "team_policies": [raw["policy_team0"], raw["policy_team1"]],
            "scores": [int(raw["score_team0"]), int(raw["score_team1"])],
            "unrepaid_td": [int(raw["td_team0"]), int(raw["td_team1"])],
            "first_ticket_round": [int(raw["first_ticket_team0"]),
                                   int(raw["first_ticket_team1"])],
            "winner": None if raw["winner"] == "" else int(raw["winner"]),
            "rounds": int(raw["rounds"]),
        })
    return rows
