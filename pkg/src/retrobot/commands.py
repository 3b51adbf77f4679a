"""Chat command grammar: parsing and canonical rendering.

    command := "!retro" (track | status | list | close | report | help)
    track   := "track" QUOTED "using" metric ("every" DURATION)?
    metric  := "builtin:" IDENT (IDENT "=" VALUE)* | "cmd:" QUOTED
    status  := "status" ("#" INT)?
    close   := "close" "#" INT
    list    := "list" ; report := "report" ; help := "help"

Keywords are case-insensitive; quoted payloads keep their case. Quoted strings
use double quotes with ``\\"`` and ``\\\\`` escapes. Durations are ``<n>d|h|m``.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from datetime import timedelta

from .metrics import BUILTIN_METRICS, BuiltinMetric, CommandMetric, MetricSpec
from .model import format_duration

PREFIX = "!retro"


@dataclass(frozen=True)
class Track:
    description: str
    metric: MetricSpec
    cadence: timedelta | None = None
    raw_text: str = field(default="", compare=False, repr=False)


@dataclass(frozen=True)
class Status:
    item_id: int | None = None
    raw_text: str = field(default="", compare=False, repr=False)


@dataclass(frozen=True)
class ListItems:
    raw_text: str = field(default="", compare=False, repr=False)


@dataclass(frozen=True)
class Close:
    item_id: int
    raw_text: str = field(default="", compare=False, repr=False)


@dataclass(frozen=True)
class Report:
    raw_text: str = field(default="", compare=False, repr=False)


@dataclass(frozen=True)
class Help:
    raw_text: str = field(default="", compare=False, repr=False)


Command = Track | Status | ListItems | Close | Report | Help


@dataclass(frozen=True)
class NotACommand:
    """The text lacks the bot prefix and is silently ignored."""

    raw_text: str = field(default="", compare=False, repr=False)


@dataclass(frozen=True)
class ParseError:
    """Where parsing stopped and what would have been accepted there."""

    position: int
    expected: str
    raw_text: str = field(default="", compare=False, repr=False)


ParseOutcome = Command | NotACommand | ParseError


class _Fail(Exception):
    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PARAM_KEY_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)=")
_DURATION_TOKEN_RE = re.compile(r"(\d+)([dhm])", re.IGNORECASE)
_ITEM_REF_RE = re.compile(r"#(\d+)")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, position: int, expected: str) -> None:
        raise _Fail(position, expected)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def read_word(self) -> tuple[str, int]:
        start = self.pos
        while self.pos < len(self.text) and not self.text[self.pos].isspace():
            self.pos += 1
        return self.text[start : self.pos], start

    def read_quoted(self) -> tuple[str, int]:
        start = self.pos
        self.pos += 1  # opening quote, caller checked
        out: list[str] = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] in '\\"':
                out.append(self.text[self.pos + 1])
                self.pos += 2
            elif ch == '"':
                self.pos += 1
                return "".join(out), start
            else:
                out.append(ch)
                self.pos += 1
        self.fail(start, "a closing '\"'")

    def expect_end(self) -> None:
        self.skip_ws()
        if not self.at_end():
            self.fail(self.pos, "end of command")

    def expect_keyword(self, keyword: str) -> None:
        self.skip_ws()
        if self.at_end():
            self.fail(self.pos, f"'{keyword}'")
        word, start = self.read_word()
        if word.lower() != keyword:
            self.fail(start, f"'{keyword}'")

    def parse(self) -> Command:
        self.skip_ws()
        word, start = self.read_word()
        if word.lower() != PREFIX:
            self.fail(start, f"'{PREFIX}' followed by a subcommand")
        self.skip_ws()
        if self.at_end():
            self.fail(self.pos, "a subcommand (track, status, list, close, report or help)")
        word, start = self.read_word()
        sub = word.lower()
        if sub == "track":
            return self.parse_track()
        if sub == "status":
            item_id = self.parse_item_ref(required=False)
            self.expect_end()
            return Status(item_id=item_id)
        if sub == "close":
            item_id = self.parse_item_ref(required=True)
            self.expect_end()
            return Close(item_id=item_id)
        if sub == "list":
            self.expect_end()
            return ListItems()
        if sub == "report":
            self.expect_end()
            return Report()
        if sub == "help":
            self.expect_end()
            return Help()
        self.fail(start, "one of track, status, list, close, report, help")

    def parse_track(self) -> Track:
        self.skip_ws()
        if self.at_end() or self.text[self.pos] != '"':
            self.fail(self.pos, "quoted description")
        description, dstart = self.read_quoted()
        if not description.strip():
            self.fail(dstart, "a non-empty description")
        self.expect_keyword("using")
        metric = self.parse_metric()
        self.skip_ws()
        cadence = None
        if not self.at_end():
            word, start = self.read_word()
            if word.lower() != "every":
                self.fail(start, "'every' or end of command")
            cadence = self.parse_duration()
        self.expect_end()
        return Track(description=description, metric=metric, cadence=cadence)

    def parse_metric(self) -> MetricSpec:
        self.skip_ws()
        mstart = self.pos
        if self.text[self.pos : self.pos + 8].lower() == "builtin:":
            self.pos += 8
            match = _IDENT_RE.match(self.text, self.pos)
            if match is None:
                self.fail(self.pos, "a builtin metric name")
            name = match.group().lower()
            name_start = self.pos
            self.pos = match.end()
            if name not in BUILTIN_METRICS:
                self.fail(
                    name_start,
                    "a known builtin metric (one of " + ", ".join(sorted(BUILTIN_METRICS)) + ")",
                )
            params = self.parse_params(name)
            if name == "commits_matching" and "pattern" not in params:
                self.fail(mstart, "param pattern=<regex> for commits_matching")
            try:
                return BuiltinMetric(name=name, params=params)
            except ValueError as exc:
                self.fail(mstart, str(exc))
        if self.text[self.pos : self.pos + 4].lower() == "cmd:":
            self.pos += 4
            if self.at_end() or self.text[self.pos] != '"':
                self.fail(self.pos, "a quoted command line")
            command_line, qstart = self.read_quoted()
            if not command_line.strip():
                self.fail(qstart, "a non-empty command line")
            return CommandMetric(command_line=command_line)
        self.fail(mstart, "a metric (builtin:<name> or cmd:\"...\")")

    def parse_params(self, metric_name: str) -> dict[str, str]:
        params: dict[str, str] = {}
        while True:
            save = self.pos
            self.skip_ws()
            match = _PARAM_KEY_RE.match(self.text, self.pos)
            if match is None:
                self.pos = save
                return params
            key = match.group(1).lower()
            key_start = self.pos
            self.pos = match.end()
            if self.pos < len(self.text) and self.text[self.pos] == '"':
                value, _ = self.read_quoted()
            else:
                value, vstart = self.read_word()
                if not value:
                    self.fail(vstart, "a param value")
            if key == "window":
                if value not in ("all", "iteration"):
                    self.fail(key_start, "window=all or window=iteration")
            elif not (metric_name == "commits_matching" and key == "pattern"):
                self.fail(key_start, f"a param supported by {metric_name}")
            params[key] = value

    def parse_duration(self) -> timedelta:
        self.skip_ws()
        if self.at_end():
            self.fail(self.pos, "a duration like 3d, 12h or 30m")
        word, start = self.read_word()
        match = _DURATION_TOKEN_RE.fullmatch(word)
        if match is None:
            self.fail(start, "a duration like 3d, 12h or 30m")
        count = int(match.group(1))
        if count == 0:
            self.fail(start, "a duration of at least 1")
        unit = match.group(2).lower()
        return timedelta(**{{"d": "days", "h": "hours", "m": "minutes"}[unit]: count})

    def parse_item_ref(self, required: bool) -> int | None:
        self.skip_ws()
        expected = "'#<id>'" if required else "'#<id>' or end of command"
        if self.at_end():
            if required:
                self.fail(self.pos, expected)
            return None
        word, start = self.read_word()
        match = _ITEM_REF_RE.fullmatch(word)
        if match is None:
            self.fail(start, expected)
        item_id = int(match.group(1))
        if item_id < 1:
            self.fail(start, "an item id of 1 or more")
        return item_id


def parse_command(text: str) -> ParseOutcome:
    """Parse chat text; never raises, whatever the input."""
    if not text.lstrip().lower().startswith(PREFIX):
        return NotACommand(raw_text=text)
    parser = _Parser(text)
    try:
        command = parser.parse()
    except _Fail as fail:
        return ParseError(position=fail.position, expected=fail.expected, raw_text=text)
    return dataclasses.replace(command, raw_text=text)


def _quote(payload: str) -> str:
    return '"' + payload.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _bare_param_ok(value: str) -> bool:
    return bool(value) and not value[0] == '"' and not any(ch.isspace() for ch in value)


def render_metric(spec: MetricSpec) -> str:
    if isinstance(spec, CommandMetric):
        return f"cmd:{_quote(spec.command_line)}"
    parts = [f"builtin:{spec.name}"]
    for key in sorted(spec.params):
        value = spec.params[key]
        parts.append(f"{key}={value if _bare_param_ok(value) else _quote(value)}")
    return " ".join(parts)


def _render_cadence(cadence: timedelta) -> str:
    text = format_duration(cadence)
    if text.endswith("s"):
        raise ValueError("cadence must be a whole number of minutes")
    return text


def render_command(cmd: Command) -> str:
    """Emit canonical grammar text; parse(render(cmd)) equals cmd."""
    if isinstance(cmd, Track):
        line = f"{PREFIX} track {_quote(cmd.description)} using {render_metric(cmd.metric)}"
        if cmd.cadence is not None:
            line += f" every {_render_cadence(cmd.cadence)}"
        return line
    if isinstance(cmd, Status):
        return f"{PREFIX} status #{cmd.item_id}" if cmd.item_id is not None else f"{PREFIX} status"
    if isinstance(cmd, ListItems):
        return f"{PREFIX} list"
    if isinstance(cmd, Close):
        return f"{PREFIX} close #{cmd.item_id}"
    if isinstance(cmd, Report):
        return f"{PREFIX} report"
    if isinstance(cmd, Help):
        return f"{PREFIX} help"
    raise TypeError(f"not a command: {cmd!r}")


HELP_LINES = (
    f'{PREFIX} track "what to improve" using builtin:unique_contributors every 1d',
    f"{PREFIX} status #1",
    f"{PREFIX} list",
    f"{PREFIX} close #1",
    f"{PREFIX} report",
    f"{PREFIX} help",
)


def render_help() -> str:
    """One example line per command form; every line parses."""
    return "\n".join(HELP_LINES)
