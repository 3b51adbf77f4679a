"""Measurement evaluation: built-in metrics over artifacts plus shell-command metrics."""

from __future__ import annotations

import math
import re
import subprocess
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path

from .artifacts import ArtifactStore, CommitRecord
from .model import UTC, Iteration, TeamConfig, iteration_for

BUILTIN_METRICS = frozenset(
    {
        "unique_contributors",
        "commit_count",
        "untested_complexity_commits",
        "velocity",
        "defect_count",
        "stories_completed",
        "commits_matching",
        "burndown_remaining",
    }
)

# Params accepted by every builtin, on top of metric-specific ones.
_COMMON_PARAMS = {"window"}
_METRIC_PARAMS = {"commits_matching": {"pattern"}}
_REQUIRED_PARAMS = {"commits_matching": {"pattern"}}

DEFAULT_MAX_PARALLEL_COMMANDS = 2

_command_slots = threading.BoundedSemaphore(DEFAULT_MAX_PARALLEL_COMMANDS)


def set_max_parallel_commands(limit: int) -> None:
    """Cap how many command metrics may run subprocesses at the same time."""
    global _command_slots
    if limit < 1:
        raise ValueError("limit must be at least 1")
    _command_slots = threading.BoundedSemaphore(limit)


class MetricEvalError(RuntimeError):
    """A measurement could not be taken; recorded as an error-sample upstream."""


class PatternError(MetricEvalError):
    pass


class ExecTimeout(MetricEvalError):
    def __init__(self, seconds: float):
        super().__init__(f"command exceeded {seconds:g}s timeout")
        self.seconds = seconds


class NonZeroExit(MetricEvalError):
    def __init__(self, code: int, stderr: str = ""):
        tail = f": {stderr.strip()[-200:]}" if stderr.strip() else ""
        super().__init__(f"command exited with status {code}{tail}")
        self.code = code


class OutputNotNumeric(MetricEvalError):
    def __init__(self, line: str):
        shown = line if line else "<empty output>"
        super().__init__(f"command output is not a number: {shown!r}")
        self.line = line


class CommandMetricsDisabled(MetricEvalError):
    def __init__(self):
        super().__init__("command metrics are disabled by configuration")


@dataclass(frozen=True)
class BuiltinMetric:
    """A named measurement over the artifact store, e.g. unique_contributors."""

    name: str
    params: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in BUILTIN_METRICS:
            raise ValueError(
                f"unknown builtin metric {self.name!r}, expected one of "
                + ", ".join(sorted(BUILTIN_METRICS))
            )
        allowed = _COMMON_PARAMS | _METRIC_PARAMS.get(self.name, set())
        for key in self.params:
            if key not in allowed:
                raise ValueError(f"metric {self.name} does not take param {key!r}")
        for key in _REQUIRED_PARAMS.get(self.name, set()):
            if key not in self.params:
                raise ValueError(f"metric {self.name} requires param {key!r}")
        if self.params.get("window") not in (None, "all", "iteration"):
            raise ValueError("param 'window' must be 'all' or 'iteration'")


@dataclass(frozen=True)
class CommandMetric:
    """An arbitrary shell command whose last output line is the measurement."""

    command_line: str

    def __post_init__(self) -> None:
        if not self.command_line.strip():
            raise ValueError("command line must be non-empty")


MetricSpec = BuiltinMetric | CommandMetric


@dataclass(frozen=True)
class MetricValue:
    value: float
    evaluated_at: datetime
    detail: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError("metric value must be finite")


def metric_to_json(spec: MetricSpec) -> dict:
    if isinstance(spec, BuiltinMetric):
        return {"kind": "builtin", "name": spec.name, "params": dict(spec.params)}
    return {"kind": "cmd", "command_line": spec.command_line}


def metric_from_json(obj: dict) -> MetricSpec:
    kind = obj.get("kind")
    if kind == "builtin":
        params = obj.get("params") or {}
        if not isinstance(params, dict):
            raise ValueError("metric params must be an object")
        return BuiltinMetric(name=obj["name"], params={str(k): str(v) for k, v in params.items()})
    if kind == "cmd":
        return CommandMetric(command_line=obj["command_line"])
    raise ValueError(f"unknown metric kind {kind!r}")


def unique_contributors(commits) -> int:
    """Count distinct author emails, case-folded."""
    return len({c.author_email.casefold() for c in commits})


def commit_count(commits) -> int:
    return len(commits)


_BRANCH_WORD = re.compile(r"\b(?:if|else|for|while|case|when|catch|except)\b")
_BRANCH_SUBSTRINGS = ("&&", "||", "?")


def _has_branch_token(line: str) -> bool:
    return bool(_BRANCH_WORD.search(line)) or any(s in line for s in _BRANCH_SUBSTRINGS)


def complexity_delta(commit: CommitRecord) -> int:
    """Net branchiness a commit adds, summed over its non-test changes.

    With patch text: added minus removed lines containing a branch token.
    Without patch text: added minus removed line counts.
    """
    total = 0
    for change in commit.changes:
        if change.is_test:
            continue
        if change.patch is not None:
            for line in change.patch.splitlines():
                if line.startswith("+++") or line.startswith("---"):
                    continue
                if line.startswith("+") and _has_branch_token(line[1:]):
                    total += 1
                elif line.startswith("-") and _has_branch_token(line[1:]):
                    total -= 1
        else:
            total += (change.added or 0) - (change.removed or 0)
    return total


def untested_complexity_commits(commits) -> int:
    """Commits that raise complexity without touching any test file."""
    return sum(
        1 for c in commits if complexity_delta(c) > 0 and not any(ch.is_test for ch in c.changes)
    )


def velocity(issues, window: tuple[datetime, datetime]) -> float:
    """Story points of issues completed within [from, to); absent points count 0."""
    from_, to = window
    return float(
        sum(
            i.story_points or 0.0
            for i in issues
            if i.status == "done" and i.closed_at is not None and from_ <= i.closed_at < to
        )
    )


def defect_count(issues, at: datetime) -> int:
    """Bugs open at ``at``: created on or before, not closed until strictly after."""
    return sum(
        1
        for i in issues
        if i.kind == "bug" and i.created_at <= at and (i.closed_at is None or i.closed_at > at)
    )


def stories_completed(issues, window: tuple[datetime, datetime]) -> int:
    from_, to = window
    return sum(
        1
        for i in issues
        if i.kind == "story"
        and i.status == "done"
        and i.closed_at is not None
        and from_ <= i.closed_at < to
    )


def burndown_remaining(issues, iteration: Iteration) -> list[float]:
    """Story points still open at the end of each day of the iteration."""
    days = int(iteration.length // timedelta(days=1))
    if iteration.length % timedelta(days=1) != timedelta(0):
        days += 1
    remaining = []
    for day in range(1, days + 1):
        day_end = iteration.starts_at + timedelta(days=day)
        remaining.append(
            float(
                sum(
                    i.story_points or 0.0
                    for i in issues
                    if i.created_at < day_end
                    and not (i.closed_at is not None and i.closed_at < day_end)
                )
            )
        )
    return remaining


def commits_matching(commits, pattern: str) -> int:
    """Commits whose message matches the case-insensitive regex ``pattern``."""
    try:
        rx = re.compile(pattern, re.IGNORECASE)
    except re.error as exc:
        raise PatternError(f"bad pattern {pattern!r}: {exc}") from exc
    return sum(1 for c in commits if rx.search(c.message))


def run_command_metric(
    command_line: str,
    workdir: Path,
    timeout: timedelta,
    at: datetime | None = None,
) -> MetricValue:
    """Run a shell command and read its last non-empty stdout line as a number.

    The full captured output (truncated to 1 KiB) lands in the detail field.
    """
    limit = timeout.total_seconds()
    with _command_slots:
        try:
            proc = subprocess.run(
                command_line,
                shell=True,
                cwd=workdir,
                capture_output=True,
                text=True,
                timeout=limit,
            )
        except subprocess.TimeoutExpired as exc:
            raise ExecTimeout(limit) from exc
    if proc.returncode != 0:
        raise NonZeroExit(proc.returncode, proc.stderr)
    lines = [line.strip() for line in proc.stdout.splitlines() if line.strip()]
    if not lines:
        raise OutputNotNumeric("")
    try:
        value = float(lines[-1])
    except ValueError as exc:
        raise OutputNotNumeric(lines[-1]) from exc
    if not math.isfinite(value):
        raise OutputNotNumeric(lines[-1])
    return MetricValue(
        value=value,
        evaluated_at=at if at is not None else datetime.now(UTC),
        detail=proc.stdout[:1024],
    )


def describe_value(spec: MetricSpec, value: float) -> str:
    """Human phrase for a measured value, e.g. ``3 contributors``."""
    if isinstance(spec, CommandMetric):
        return f"{value:g}"
    whole = f"{value:g}"
    phrases = {
        "unique_contributors": f"{whole} contributors",
        "commit_count": f"{whole} commits",
        "untested_complexity_commits": f"{whole} complexity-raising commits without tests",
        "velocity": f"{whole} story points completed",
        "defect_count": f"{whole} open defects",
        "stories_completed": f"{whole} stories completed",
        "burndown_remaining": f"{whole} story points remaining",
    }
    if spec.name == "commits_matching":
        return f"{whole} commits with messages matching {spec.params['pattern']!r}"
    return phrases[spec.name]


def eval_metric(
    spec: MetricSpec,
    store: ArtifactStore,
    window: tuple[datetime, datetime],
    config: TeamConfig,
) -> MetricValue:
    """Evaluate a metric over the half-open window [from, to).

    Commit metrics see only commits inside the window. Issue metrics receive the
    full issue list because they reach before the window by definition (open
    defects, burndown) or filter on completion time themselves.
    """
    from_, to = window
    if isinstance(spec, CommandMetric):
        if not config.allow_command_metrics:
            raise CommandMetricsDisabled()
        return run_command_metric(spec.command_line, config.workdir, config.command_timeout, at=to)

    commits = [c for c in store.commits if from_ <= c.authored_at < to]
    name = spec.name
    if name == "unique_contributors":
        value = float(unique_contributors(commits))
    elif name == "commit_count":
        value = float(commit_count(commits))
    elif name == "untested_complexity_commits":
        value = float(untested_complexity_commits(commits))
    elif name == "commits_matching":
        value = float(commits_matching(commits, spec.params["pattern"]))
    elif name == "velocity":
        value = velocity(store.issues, window)
    elif name == "defect_count":
        value = float(defect_count(store.issues, to))
    elif name == "stories_completed":
        value = float(stories_completed(store.issues, window))
    elif name == "burndown_remaining":
        anchor = from_ if from_ >= config.iteration_start else to
        series = burndown_remaining(store.issues, iteration_for(config, anchor))
        value = series[-1]
    else:  # unreachable: BuiltinMetric validates its name
        raise AssertionError(name)
    return MetricValue(value=value, evaluated_at=to, detail=describe_value(spec, value))
