"""Command line entry point: repl, serve, ingest, tick and report."""

from __future__ import annotations

import argparse
import sys
from datetime import datetime
from pathlib import Path

from .artifacts import (
    parse_build_jsonl,
    parse_commit_jsonl,
    parse_issue_jsonl,
    serialize_build_jsonl,
    serialize_commit_jsonl,
    serialize_issue_jsonl,
)
from .config import load_config
from .gateway import BotService, serve_console
from .httpd import serve_http
from .model import UTC, parse_timestamp


def _timestamp(text: str) -> datetime:
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retrobot",
        description="Retrospective bot: track action items with measurements over project artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=Path("retrobot.json"), help="config file")

    repl = sub.add_parser("repl", help="interactive console chat")
    add_common(repl)
    repl.add_argument("--now", type=_timestamp, help="virtual clock start (ISO-8601)")

    serve = sub.add_parser("serve", help="run the HTTP API")
    add_common(serve)
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--static", type=Path, help="directory with the dashboard build")

    ingest = sub.add_parser("ingest", help="validate artifact exports and install them")
    add_common(ingest)
    ingest.add_argument("--commits", type=Path)
    ingest.add_argument("--issues", type=Path)
    ingest.add_argument("--builds", type=Path)

    tick = sub.add_parser("tick", help="sample every due action item once")
    add_common(tick)
    tick.add_argument("--now", type=_timestamp)

    report = sub.add_parser("report", help="print the trend report")
    add_common(report)
    report.add_argument("--now", type=_timestamp)
    report.add_argument("--out", type=Path, help="also write report.csv and charts here")

    return parser


def _run_ingest(args, config) -> int:
    jobs = {
        "commits": (args.commits, parse_commit_jsonl, serialize_commit_jsonl),
        "issues": (args.issues, parse_issue_jsonl, serialize_issue_jsonl),
        "builds": (args.builds, parse_build_jsonl, serialize_build_jsonl),
    }
    if all(source is None for source, _, _ in jobs.values()):
        print("nothing to ingest: pass at least one of --commits/--issues/--builds", file=sys.stderr)
        return 2
    for kind, (source, parse, serialize) in jobs.items():
        if source is None:
            continue
        with open(source, encoding="utf-8") as handle:
            records = parse(handle)
        target = config.artifact_paths[kind]
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(serialize(records), encoding="utf-8")
        print(f"{kind}: {len(records)} record(s) -> {target}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    try:
        config = load_config(args.config)
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"bad config {args.config}: {exc}", file=sys.stderr)
        return 2

    if args.command == "serve":
        print(f"serving on {args.host}:{args.port}", file=sys.stderr)
        serve_http(config, port=args.port, host=args.host, static_dir=args.static)
        return 0

    if args.command == "ingest":
        return _run_ingest(args, config)

    service = BotService(config)

    if args.command == "repl":
        return serve_console(service, start_now=args.now)

    now = args.now if args.now is not None else datetime.now(UTC)

    if args.command == "tick":
        try:
            samples = service.tick(now)
        except OSError as exc:
            print(f"journal write failed: {exc}", file=sys.stderr)
            return 2
        print(f"tick: {len(samples)} sample(s)")
        for sample in samples:
            state = f"{sample.value:g}" if sample.ok else f"error: {sample.error}"
            print(f"  #{sample.item_id} {state}")
        return 0

    if args.command == "report":
        print(service.report_text(now))
        if args.out is not None:
            from .figures import write_report_files

            written = write_report_files(service.store, service.artifacts, service.team, now, args.out)
            for path in written:
                print(f"wrote {path}", file=sys.stderr)
        return 0

    raise AssertionError(args.command)


if __name__ == "__main__":
    raise SystemExit(main())
