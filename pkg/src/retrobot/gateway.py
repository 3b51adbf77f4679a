"""Chat-facing surface: message dispatch, report rendering, reminders, console REPL.

Every inbound message runs the same loop: parse, act on the store, render the
reply back into the channel the message came from. Text without the command
prefix is ignored so the bot can share a channel with humans.
"""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass
from datetime import datetime

from .artifacts import ArtifactStore
from .commands import (
    Close,
    Help,
    ListItems,
    NotACommand,
    ParseError,
    Report,
    Status,
    Track,
    parse_command,
    render_help,
    render_metric,
)
from .config import BotConfig, load_artifacts
from .metrics import CommandMetric, describe_value, set_max_parallel_commands
from .model import (
    UTC,
    BeforeProjectStart,
    Sample,
    TeamConfig,
    TimeSeries,
    TrendReport,
    format_duration,
    format_timestamp,
    iteration_for,
    parse_timestamp,
)
from .tracker import ActionItem, AlreadyClosed, SampleStore, UnknownItem

MAX_MESSAGE_LEN = 4000

SPARK_BLOCKS = "▁▂▃▄▅▆▇█"
ARROWS = {"up": "↑", "down": "↓", "flat": "→"}


@dataclass(frozen=True)
class InboundMessage:
    channel: str
    author: str
    text: str
    at: datetime

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("inbound message text must be non-empty")


@dataclass(frozen=True)
class OutboundMessage:
    channel: str
    text: str

    def __post_init__(self) -> None:
        if len(self.text) > MAX_MESSAGE_LEN:
            raise ValueError("outbound message exceeds the 4000 character cap")


def _split_text(text: str) -> list[str]:
    """Split reply text into chunks within the message cap, at line boundaries."""
    if len(text) <= MAX_MESSAGE_LEN:
        return [text]
    chunks: list[str] = []
    current = ""

    def flush() -> None:
        nonlocal current
        if current:
            chunks.append(current)
            current = ""

    for line in text.split("\n"):
        if len(line) > MAX_MESSAGE_LEN:
            flush()
            while len(line) > MAX_MESSAGE_LEN:
                chunks.append(line[:MAX_MESSAGE_LEN])
                line = line[MAX_MESSAGE_LEN:]
        candidate = line if not current else f"{current}\n{line}"
        if len(candidate) > MAX_MESSAGE_LEN:
            flush()
            current = line
        else:
            current = candidate
    flush()
    return chunks


def outbound(channel: str, text: str) -> list[OutboundMessage]:
    return [OutboundMessage(channel=channel, text=chunk) for chunk in _split_text(text)]


def sparkline(values: list[float]) -> str:
    """Map values onto the 8-step block ramp; equal values sit mid-ramp."""
    if not values:
        return ""
    lo, hi = min(values), max(values)
    if hi == lo:
        return SPARK_BLOCKS[3] * len(values)

    def index(v: float) -> int:
        x = 7.0 * (v - lo) / (hi - lo)
        return int(math.floor(x + 0.5))  # round half away from zero; x is never negative

    return "".join(SPARK_BLOCKS[index(v)] for v in values)


def _num(value: float) -> str:
    return f"{value:g}"


def _report_line(report: TrendReport, item: ActionItem, series: TimeSeries) -> str:
    if not report.has_data:
        return f"#{report.item_id} {item.description}: (no data yet)"
    values = [
        s.value
        for s in series.samples
        if s.ok and report.baseline.taken_at <= s.taken_at <= report.latest.taken_at
    ]
    return (
        f"#{report.item_id} {item.description}: "
        f"{_num(report.baseline.value)} → {_num(report.latest.value)} "
        f"(Δ{report.delta:+g} {ARROWS[report.direction]}) {sparkline(values)}"
    )


def render_report(reports: list[TrendReport], store: SampleStore) -> str:
    """One line per item with baseline, latest, delta, arrow and sparkline."""
    if not reports:
        return "No open action items."
    items = store.items
    return "\n".join(
        _report_line(report, items[report.item_id], store.series(report.item_id))
        for report in reports
    )


def _render_list(store: SampleStore) -> str:
    items = sorted(store.items.values(), key=lambda item: item.id)
    if not items:
        return "No action items."
    return "\n".join(
        f'#{item.id} [{item.status}] "{item.description}" '
        f"via {render_metric(item.metric)} every {format_duration(item.cadence)}"
        for item in items
    )


def _dispatch(
    cmd,
    msg: InboundMessage,
    store: SampleStore,
    artifact_store: ArtifactStore,
    config: TeamConfig,
) -> str:
    if isinstance(cmd, Track):
        if isinstance(cmd.metric, CommandMetric) and not config.allow_command_metrics:
            return "Command metrics are disabled; action item not registered."
        item = store.register(
            cmd.description, cmd.metric, msg.author, msg.at, artifact_store, config, cmd.cadence
        )
        baseline = store.series(item.id).samples[0]
        if baseline.ok:
            phrase = describe_value(item.metric, baseline.value)
            return f'Tracking #{item.id} "{item.description}" — baseline: {phrase}'
        return f'Tracking #{item.id} "{item.description}" — baseline failed: {baseline.error}'

    if isinstance(cmd, Status) and cmd.item_id is not None:
        item = store.items.get(cmd.item_id)
        if item is None:
            return f"No action item #{cmd.item_id}"
        if not item.is_open:
            return f"#{item.id} {item.description}: closed at {format_timestamp(item.closed_at)}"
        report = next(
            r for r in store.retrospective_report(config, msg.at) if r.item_id == item.id
        )
        return _report_line(report, item, store.series(item.id))

    if isinstance(cmd, (Status, Report)):
        return render_report(store.retrospective_report(config, msg.at), store)

    if isinstance(cmd, ListItems):
        return _render_list(store)

    if isinstance(cmd, Close):
        try:
            item = store.close(cmd.item_id, msg.at, by=msg.author)
        except UnknownItem:
            return f"No action item #{cmd.item_id}"
        except AlreadyClosed:
            return f"#{cmd.item_id} is already closed"
        return f'Closed #{item.id} "{item.description}"'

    if isinstance(cmd, Help):
        return render_help()

    raise TypeError(f"unhandled command {cmd!r}")


def handle_message(
    msg: InboundMessage,
    store: SampleStore,
    artifact_store: ArtifactStore,
    config: TeamConfig,
) -> list[OutboundMessage]:
    """Run the full loop for one message; errors become reply text, never raise."""
    outcome = parse_command(msg.text)
    if isinstance(outcome, NotACommand):
        return []
    if isinstance(outcome, ParseError):
        return outbound(
            msg.channel,
            f"Parse error at offset {outcome.position}: expected {outcome.expected}",
        )
    try:
        text = _dispatch(outcome, msg, store, artifact_store, config)
    except Exception as exc:  # noqa: BLE001 - the adapter must always get a reply
        text = f"Error: {exc}"
    return outbound(msg.channel, text)


def reminder_due(
    config: TeamConfig,
    last_reminded: datetime | None,
    now: datetime,
    *,
    report_text: str = "",
    channel: str = "console",
) -> OutboundMessage | None:
    """Emit one reminder per iteration, inside the lead window before its end."""
    try:
        iteration = iteration_for(config, now)
    except BeforeProjectStart:
        return None
    if not (iteration.ends_at - config.reminder_lead <= now < iteration.ends_at):
        return None
    if last_reminded is not None:
        try:
            if iteration_for(config, last_reminded).index == iteration.index:
                return None
        except BeforeProjectStart:
            pass
    text = (
        f"Reminder: iteration {iteration.index} ends at "
        f"{format_timestamp(iteration.ends_at)}. Time to review action items."
    )
    if report_text:
        budget = MAX_MESSAGE_LEN - len(text) - 1
        if len(report_text) > budget:
            report_text = report_text[: budget - 1] + "…"
        text = f"{text}\n{report_text}"
    return OutboundMessage(channel=channel, text=text)


class BotService:
    """Single-writer facade over the store for the console and HTTP adapters.

    All mutations run under one lock and the journal is flushed after each, so
    adapters may call in from any thread.
    """

    def __init__(self, config: BotConfig, *, allow_commands_default: bool = True):
        self.config = config
        self.team = config.resolve_team(allow_commands_default)
        set_max_parallel_commands(self.team.max_parallel_commands)
        self.store = SampleStore.load(config.journal_path)
        self.artifacts = load_artifacts(config.artifact_paths)
        self.default_author = config.default_author
        self._lock = threading.RLock()
        self._last_reminded: datetime | None = None

    def handle(self, msg: InboundMessage) -> list[OutboundMessage]:
        with self._lock:
            replies = handle_message(msg, self.store, self.artifacts, self.team)
            self.store.persist(self.config.journal_path)
            return replies

    def tick(self, now: datetime) -> list[Sample]:
        with self._lock:
            samples = self.store.tick(self.artifacts, self.team, now)
            self.store.persist(self.config.journal_path)
            return samples

    def report(self, now: datetime) -> list[TrendReport]:
        with self._lock:
            return self.store.retrospective_report(self.team, now)

    def report_text(self, now: datetime) -> str:
        with self._lock:
            return render_report(self.store.retrospective_report(self.team, now), self.store)

    def actions(self) -> list[ActionItem]:
        with self._lock:
            return sorted(self.store.items.values(), key=lambda item: item.id)

    def samples(self, item_id: int) -> TimeSeries:
        with self._lock:
            return self.store.series(item_id)

    def reminder(self, now: datetime, channel: str = "console") -> OutboundMessage | None:
        with self._lock:
            message = reminder_due(
                self.team,
                self._last_reminded,
                now,
                report_text=self.report_text(now),
                channel=channel,
            )
            if message is not None:
                self._last_reminded = now
            return message


def _format_sample(sample: Sample) -> str:
    return _num(sample.value) if sample.ok else f"error: {sample.error}"


def serve_console(
    service: BotService,
    *,
    input_stream=None,
    output_stream=None,
    start_now: datetime | None = None,
) -> int:
    """Read chat lines until end-of-input; print every reply.

    Besides ``!retro`` commands the REPL accepts ``tick``, ``report`` and
    ``remind`` utility lines, each with an optional ``--now <iso8601>`` that
    also moves the session clock for subsequent chat lines.
    """
    fin = input_stream if input_stream is not None else sys.stdin
    fout = output_stream if output_stream is not None else sys.stdout
    interactive = getattr(fin, "isatty", lambda: False)()
    clock = start_now

    def emit(text: str) -> None:
        fout.write(text + "\n")
        fout.flush()

    try:
        while True:
            if interactive:
                fout.write("> ")
                fout.flush()
            raw = fin.readline()
            if raw == "":
                break
            line = raw.strip()
            if not line:
                continue
            first = line.split()[0].lower()
            if first in ("tick", "report", "remind"):
                tokens = line.split()
                override = None
                if "--now" in tokens:
                    at = tokens.index("--now")
                    try:
                        override = parse_timestamp(tokens[at + 1])
                    except (IndexError, ValueError):
                        emit("error: --now needs an ISO-8601 timestamp")
                        continue
                    clock = override
                now = override or clock or datetime.now(UTC)
                if first == "tick":
                    samples = service.tick(now)
                    emit(f"tick: {len(samples)} sample(s)")
                    for sample in samples:
                        emit(f"  #{sample.item_id} {_format_sample(sample)}")
                elif first == "report":
                    emit(service.report_text(now))
                else:
                    message = service.reminder(now)
                    emit(message.text if message else "no reminder due")
                continue
            msg = InboundMessage(
                channel="console",
                author=service.default_author,
                text=line,
                at=clock or datetime.now(UTC),
            )
            for reply in service.handle(msg):
                emit(reply.text)
    except OSError as exc:
        print(f"journal write failed: {exc}", file=sys.stderr)
        return 2
    return 0
