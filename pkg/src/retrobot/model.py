"""Core value types: team configuration, iteration arithmetic, trend math."""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

UTC = timezone.utc

# A change counts as flat when |delta| <= max(FLAT_ABS, FLAT_REL * |baseline|).
FLAT_ABS = 1e-9
FLAT_REL = 0.01

DIRECTION_UP = "up"
DIRECTION_DOWN = "down"
DIRECTION_FLAT = "flat"


class BeforeProjectStart(ValueError):
    """Timestamp precedes the first configured iteration."""


class EmptySeries(ValueError):
    """A trend was requested for a series without any successful sample."""


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp; must carry an offset, normalized to UTC."""
    raw = text.strip()
    if raw.endswith("Z") or raw.endswith("z"):
        raw = raw[:-1] + "+00:00"
    parsed = datetime.fromisoformat(raw)
    if parsed.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return parsed.astimezone(UTC)


def format_timestamp(at: datetime) -> str:
    return at.astimezone(UTC).isoformat().replace("+00:00", "Z")


_DURATION_RE = re.compile(r"^(\d+)\s*([dhms])$", re.IGNORECASE)
_DURATION_SECONDS = {"d": 86400, "h": 3600, "m": 60, "s": 1}


def parse_duration(text: str) -> timedelta:
    """Parse a duration like ``14d``, ``2h``, ``30m`` or ``10s``."""
    match = _DURATION_RE.match(text.strip())
    if match is None:
        raise ValueError(f"bad duration {text!r}, expected <n>d|h|m|s")
    count, unit = int(match.group(1)), match.group(2).lower()
    return timedelta(seconds=count * _DURATION_SECONDS[unit])


def format_duration(value: timedelta) -> str:
    """Render a whole-second duration using the largest exact unit."""
    seconds = value.total_seconds()
    if seconds <= 0 or not seconds.is_integer():
        raise ValueError(f"duration {value!r} is not a positive whole number of seconds")
    seconds = int(seconds)
    for unit in "dhms":
        size = _DURATION_SECONDS[unit]
        if seconds % size == 0:
            return f"{seconds // size}{unit}"
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class TeamConfig:
    """Per-team settings shared by every operation."""

    team_name: str
    iteration_start: datetime
    iteration_length: timedelta = timedelta(days=14)
    reminder_lead: timedelta = timedelta(days=1)
    default_cadence: timedelta = timedelta(days=1)
    command_timeout: timedelta = timedelta(seconds=10)
    workdir: Path = Path(".")
    allow_command_metrics: bool = True
    max_parallel_commands: int = 2

    def __post_init__(self) -> None:
        if self.iteration_start.tzinfo is None:
            raise ValueError("iteration_start must be timezone-aware")
        object.__setattr__(self, "iteration_start", self.iteration_start.astimezone(UTC))
        if self.iteration_length < timedelta(days=1):
            raise ValueError("iteration_length must be at least one day")
        if self.iteration_length % timedelta(days=1) != timedelta(0):
            raise ValueError("iteration_length must be a whole number of days")
        if self.reminder_lead >= self.iteration_length:
            raise ValueError("reminder_lead must be shorter than the iteration")
        if self.command_timeout <= timedelta(0):
            raise ValueError("command_timeout must be positive")
        if self.max_parallel_commands < 1:
            raise ValueError("max_parallel_commands must be at least 1")


@dataclass(frozen=True)
class Iteration:
    index: int
    starts_at: datetime
    ends_at: datetime  # exclusive

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("iteration index must be non-negative")
        if self.ends_at <= self.starts_at:
            raise ValueError("iteration must end after it starts")

    @property
    def length(self) -> timedelta:
        return self.ends_at - self.starts_at


@dataclass(frozen=True)
class Sample:
    """One measurement of one action item: a value or an error, never both."""

    item_id: int
    taken_at: datetime
    value: float | None = None
    error: str | None = None

    def __post_init__(self) -> None:
        if self.item_id < 1:
            raise ValueError("item_id must be positive")
        if (self.value is None) == (self.error is None):
            raise ValueError("a sample carries exactly one of value or error")

    @property
    def ok(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class TimeSeries:
    """Append-only sample history of one action item, ordered by taken_at."""

    item_id: int
    samples: tuple[Sample, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        last: datetime | None = None
        for sample in self.samples:
            if sample.item_id != self.item_id:
                raise ValueError("sample belongs to a different item")
            if last is not None and sample.taken_at <= last:
                raise ValueError("samples must be strictly increasing in taken_at")
            last = sample.taken_at

    def successes(self) -> tuple[Sample, ...]:
        return tuple(s for s in self.samples if s.ok)


@dataclass(frozen=True)
class TrendReport:
    """Baseline-to-latest movement of one item's measurement.

    A report without any successful sample has baseline, latest, delta and
    direction set to None and sample_count 0.
    """

    item_id: int
    baseline: Sample | None
    latest: Sample | None
    delta: float | None
    direction: str | None
    sample_count: int

    def __post_init__(self) -> None:
        populated = [self.baseline, self.latest, self.delta, self.direction]
        if any(f is None for f in populated) != all(f is None for f in populated):
            raise ValueError("trend fields must all be set or all be None")
        if self.direction not in (None, DIRECTION_UP, DIRECTION_DOWN, DIRECTION_FLAT):
            raise ValueError(f"bad direction {self.direction!r}")
        if self.sample_count < 0:
            raise ValueError("sample_count must be non-negative")

    @property
    def has_data(self) -> bool:
        return self.baseline is not None


def iteration_for(config: TeamConfig, t: datetime) -> Iteration:
    """Return the iteration containing ``t``; iterations tile time gaplessly."""
    if t < config.iteration_start:
        raise BeforeProjectStart(
            f"{format_timestamp(t)} precedes project start "
            f"{format_timestamp(config.iteration_start)}"
        )
    index = (t - config.iteration_start) // config.iteration_length
    starts_at = config.iteration_start + index * config.iteration_length
    return Iteration(index=index, starts_at=starts_at, ends_at=starts_at + config.iteration_length)


def flat_threshold(baseline_value: float) -> float:
    return max(FLAT_ABS, FLAT_REL * abs(baseline_value))


def compute_trend(series: TimeSeries, window_start: datetime | None = None) -> TrendReport:
    """Compare the latest successful sample against a baseline.

    The baseline is the first successful sample at/after ``window_start``;
    when there is none (or no window was given), the overall first successful
    sample is used. Failed samples never influence the trend.
    """
    successes = series.successes()
    if not successes:
        raise EmptySeries(f"item {series.item_id} has no successful sample")
    baseline = None
    if window_start is not None:
        baseline = next((s for s in successes if s.taken_at >= window_start), None)
    if baseline is None:
        baseline = successes[0]
    latest = successes[-1]
    delta = latest.value - baseline.value
    if abs(delta) <= flat_threshold(baseline.value):
        direction = DIRECTION_FLAT
    else:
        direction = DIRECTION_UP if delta > 0 else DIRECTION_DOWN
    count = sum(1 for s in successes if baseline.taken_at <= s.taken_at <= latest.taken_at)
    return TrendReport(
        item_id=series.item_id,
        baseline=baseline,
        latest=latest,
        delta=delta,
        direction=direction,
        sample_count=count,
    )
