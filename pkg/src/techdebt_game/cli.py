"""Command line entry point: validate content, run simulations, replay games,
inspect coverage, serve sessions.

Every subcommand prints a human table by default; ``--format csv`` and
``--format json`` emit machine-parseable output on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .aha import AHA_REGISTRY
from .content import PackValidationError, coverage_report, default_pack, load_pack
from .experiment import bootstrap_mean_diff, export_results, run_experiment
from .policies import builtin_policies, get_policy
from .session import ReplayDivergence, aha_exposure, read_replay, replay
from . import rules

FORMATS = ("table", "csv", "json")


def _load_pack_arg(path: str | None):
    if path is None or path == "default":
        return default_pack()
    return load_pack(Path(path))


def cmd_validate(args) -> int:
    try:
        pack = _load_pack_arg(args.pack)
    except PackValidationError as exc:
        if args.format == "json":
            print(json.dumps({"ok": False,
                              "errors": [{"path": e.path, "message": e.message}
                                         for e in exc.errors]}, indent=2))
        else:
            for error in exc.errors:
                print(f"error: {error}", file=sys.stderr)
        return 1
    if args.format == "json":
        print(json.dumps({"ok": True, "name": pack.name, "version": pack.version,
                          "tickets": len(pack.tickets),
                          "event_cards": len(pack.event_cards),
                          "action_cards": len(pack.action_cards)}))
    else:
        print(f"ok: pack {pack.name} {pack.version} "
              f"({len(pack.tickets)} tickets, {len(pack.event_cards)} event cards, "
              f"{len(pack.action_cards)} action cards)")
    return 0


def cmd_coverage(args) -> int:
    try:
        pack = _load_pack_arg(args.pack)
    except PackValidationError as exc:
        for error in exc.errors:
            print(f"error: {error}", file=sys.stderr)
        return 1
    report = coverage_report(pack)
    rows = [(AHA_REGISTRY[key].group.value, AHA_REGISTRY[key].variable, count)
            for key, count in report.items()]
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    elif args.format == "csv":
        print("group,variable,count")
        for group, variable, count in rows:
            print(f"{group},{variable},{count}")
    else:
        width = max(len(f"{g}/{v}") for g, v, _ in rows)
        for group, variable, count in rows:
            print(f"{f'{group}/{variable}':<{width}}  {count}")
        uncovered = [f"{g}/{v}" for g, v, c in rows if c < 1]
        print(f"rows: {len(rows)}, uncovered: {len(uncovered)}")
    return 0 if all(c >= 1 for _, _, c in rows) else 1


def cmd_simulate(args) -> int:
    try:
        pack = _load_pack_arg(args.pack)
        policy_a = get_policy(args.policy_a)
        policy_b = get_policy(args.policy_b)
    except (PackValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    result = run_experiment(policy_a, policy_b, args.n, args.seed, pack,
                            max_rounds=args.max_rounds, out_dir=args.out)
    if args.format == "table":
        print(export_results(result, "table"), end="")
        diff = bootstrap_mean_diff(result.samples(policy_a.name, "score"),
                                   result.samples(policy_b.name, "score"),
                                   seed=args.seed)
        print(f"score diff ({policy_a.name} - {policy_b.name}): "
              f"{diff['diff']:+.2f}  99% CI [{diff['lo']:+.2f}, {diff['hi']:+.2f}]")
    else:
        print(export_results(result, args.format), end="")
    if args.out:
        print(f"results and replays written to {args.out}", file=sys.stderr)
    return 0


def cmd_replay(args) -> int:
    try:
        replay_file = read_replay(args.file)
        state = replay(replay_file)
    except FileNotFoundError:
        print(f"error: no such file {args.file}", file=sys.stderr)
        return 1
    except (ReplayDivergence, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    scores = rules.final_score(state) if state.finished else rules.compute_scores(state)
    summary = {
        "events": len(state.log),
        "rounds": state.round,
        "finished": state.finished,
        "scores": {str(k): v for k, v in scores.items()},
        "distinct_aha_tags": len(aha_exposure(state)),
    }
    if args.format == "json":
        print(json.dumps(summary, indent=2, sort_keys=True))
    elif args.format == "csv":
        print("events,rounds,finished,score_team0,score_team1,distinct_aha_tags")
        print(f"{summary['events']},{summary['rounds']},{summary['finished']},"
              f"{scores[0]},{scores[1]},{summary['distinct_aha_tags']}")
    else:
        print(f"replay verified: {summary['events']} events, "
              f"{summary['rounds']} rounds, finished={summary['finished']}")
        print(f"scores: team 0 = {scores[0]}, team 1 = {scores[1]}; "
              f"{summary['distinct_aha_tags']} distinct aha tags")
    return 0


def cmd_serve(args) -> int:  # pragma: no cover - blocks on the event loop
    from .service import serve

    serve(port=args.port, packs_dir=args.packs, storage_dir=args.storage,
          static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="techdebt-game",
        description="TechDebt Game: content validation, simulation, replay, "
                    "and a multiplayer session server.")
    sub = parser.add_subparsers(dest="command", required=True)

    policy_names = ", ".join(p.name for p in builtin_policies())

    p = sub.add_parser("validate", help="validate a content pack file")
    p.add_argument("pack", nargs="?", default=None,
                   help="pack file (default: the shipped pack)")
    p.add_argument("--format", choices=FORMATS, default="table")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("coverage", help="aha-moment coverage of a pack")
    p.add_argument("pack", nargs="?", default=None)
    p.add_argument("--format", choices=FORMATS, default="table")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("simulate", help="run a Monte Carlo policy experiment")
    p.add_argument("policy_a", help=f"one of: {policy_names}")
    p.add_argument("policy_b")
    p.add_argument("--n", type=int, default=1000, help="number of games")
    p.add_argument("--seed", type=int, default=1, help="base seed")
    p.add_argument("--pack", default=None, help="pack file")
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--out", default=None,
                   help="directory for results.{json,csv} and replays.jsonl.gz")
    p.add_argument("--format", choices=FORMATS, default="table")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="verify and summarize a replay file")
    p.add_argument("file")
    p.add_argument("--format", choices=FORMATS, default="table")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="serve multiplayer sessions over HTTP")
    p.add_argument("--port", type=int, default=None,
                   help="port (default: $TDGAME_PORT or 8000)")
    p.add_argument("--packs", default=None, help="directory of extra pack files")
    p.add_argument("--storage", default=None,
                   help="journal/replay directory (default: $TDGAME_STORAGE)")
    p.add_argument("--static", default=None,
                   help="directory with the built browser UI")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
