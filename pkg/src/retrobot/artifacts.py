"""Ingestion of project artifacts (commits, issues, CI builds) into queryable records.

The interchange format is JSON lines, one record per line; a parser for the
output of ``git log --pretty=format:@%H|%ae|%aI|%s --numstat`` covers direct
exports from a repository.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable

from .model import format_timestamp, parse_timestamp

ISSUE_KINDS = ("story", "bug", "task")
ISSUE_STATUSES = ("open", "done")
BUILD_STATUSES = ("passed", "failed")

_TEST_SEGMENTS = {"test", "tests", "spec"}


class FormatError(ValueError):
    """A malformed input line; ingestion aborts rather than skip silently."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class InvalidWindow(ValueError):
    pass


@dataclass(frozen=True)
class FileChange:
    path: str
    added: int | None = None
    removed: int | None = None
    patch: str | None = None

    def __post_init__(self) -> None:
        if not self.path:
            raise ValueError("file change needs a path")
        for n in (self.added, self.removed):
            if n is not None and n < 0:
                raise ValueError("line counts must be non-negative")

    @property
    def is_test(self) -> bool:
        """Heuristic: test/tests/spec path segments, or a test-marked filename."""
        parts = self.path.split("/")
        name = parts[-1]
        stem = name.rsplit(".", 1)[0]
        return (
            any(seg in _TEST_SEGMENTS for seg in parts)
            or "_test." in name
            or ".test." in name
            or stem.endswith("Test")
        )


@dataclass(frozen=True)
class CommitRecord:
    hash: str
    author_email: str
    authored_at: datetime
    message: str
    changes: tuple[FileChange, ...] = ()

    def __post_init__(self) -> None:
        if not self.hash:
            raise ValueError("commit hash must be non-empty")
        object.__setattr__(self, "changes", tuple(self.changes))


@dataclass(frozen=True)
class IssueRecord:
    id: str
    kind: str
    story_points: float | None
    status: str
    created_at: datetime
    closed_at: datetime | None = None

    def __post_init__(self) -> None:
        if self.kind not in ISSUE_KINDS:
            raise ValueError(f"issue kind must be one of {ISSUE_KINDS}, got {self.kind!r}")
        if self.status not in ISSUE_STATUSES:
            raise ValueError(f"issue status must be one of {ISSUE_STATUSES}, got {self.status!r}")
        if self.story_points is not None and self.story_points < 0:
            raise ValueError("story_points must be non-negative")
        if self.status == "done" and self.closed_at is None:
            raise ValueError(f"done issue {self.id!r} lacks closed_at")
        if self.closed_at is not None and self.closed_at < self.created_at:
            raise ValueError(f"issue {self.id!r} closed before it was created")


@dataclass(frozen=True)
class BuildRecord:
    id: str
    finished_at: datetime
    status: str

    def __post_init__(self) -> None:
        if self.status not in BUILD_STATUSES:
            raise ValueError(f"build status must be one of {BUILD_STATUSES}, got {self.status!r}")


@dataclass(frozen=True)
class ArtifactStore:
    """Immutable snapshot of all ingested artifacts, each list time-sorted."""

    commits: tuple[CommitRecord, ...] = ()
    issues: tuple[IssueRecord, ...] = ()
    builds: tuple[BuildRecord, ...] = ()

    def __post_init__(self) -> None:
        commits = tuple(sorted(self.commits, key=lambda c: c.authored_at))
        issues = tuple(sorted(self.issues, key=lambda i: i.created_at))
        builds = tuple(sorted(self.builds, key=lambda b: b.finished_at))
        hashes = [c.hash for c in commits]
        if len(set(hashes)) != len(hashes):
            raise ValueError("duplicate commit hash in store")
        build_ids = [b.id for b in builds]
        if len(set(build_ids)) != len(build_ids):
            raise ValueError("duplicate build id in store")
        object.__setattr__(self, "commits", commits)
        object.__setattr__(self, "issues", issues)
        object.__setattr__(self, "builds", builds)


def window(store: ArtifactStore, from_: datetime, to: datetime) -> ArtifactStore:
    """Filter a store to the half-open interval [from_, to)."""
    if from_ > to:
        raise InvalidWindow(f"window start {from_} is after end {to}")

    def inside(t: datetime) -> bool:
        return from_ <= t < to

    return ArtifactStore(
        commits=tuple(c for c in store.commits if inside(c.authored_at)),
        issues=tuple(
            i
            for i in store.issues
            if inside(i.created_at) or (i.closed_at is not None and inside(i.closed_at))
        ),
        builds=tuple(b for b in store.builds if inside(b.finished_at)),
    )


def _iter_lines(stream: Iterable[str] | str) -> Iterable[str]:
    if isinstance(stream, str):
        return stream.splitlines()
    return (line.rstrip("\n").rstrip("\r") for line in stream)


def _require(obj: dict, key: str, lineno: int):
    if key not in obj:
        raise FormatError(lineno, f"missing field {key!r}")
    return obj[key]


def _as_text(value, key: str, lineno: int) -> str:
    if not isinstance(value, str):
        raise FormatError(lineno, f"field {key!r} must be text")
    return value


def _as_time(value, key: str, lineno: int) -> datetime:
    try:
        return parse_timestamp(_as_text(value, key, lineno))
    except ValueError as exc:
        raise FormatError(lineno, f"field {key!r}: {exc}") from exc


def _as_count(value, key: str, lineno: int) -> int | None:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(lineno, f"field {key!r} must be an integer or null")
    return value


def _parse_jsonl(stream, build_record) -> list:
    records = []
    for lineno, line in enumerate(_iter_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(lineno, f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise FormatError(lineno, "record must be a JSON object")
        try:
            records.append(build_record(obj, lineno))
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from exc
    return records


def _commit_from_json(obj: dict, lineno: int) -> CommitRecord:
    changes = []
    raw_changes = obj.get("changes", [])
    if not isinstance(raw_changes, list):
        raise FormatError(lineno, "field 'changes' must be a list")
    for raw in raw_changes:
        if not isinstance(raw, dict):
            raise FormatError(lineno, "each change must be a JSON object")
        patch = raw.get("patch")
        if patch is not None and not isinstance(patch, str):
            raise FormatError(lineno, "field 'patch' must be text")
        changes.append(
            FileChange(
                path=_as_text(_require(raw, "path", lineno), "path", lineno),
                added=_as_count(raw.get("added"), "added", lineno),
                removed=_as_count(raw.get("removed"), "removed", lineno),
                patch=patch,
            )
        )
    return CommitRecord(
        hash=_as_text(_require(obj, "hash", lineno), "hash", lineno),
        author_email=_as_text(_require(obj, "author_email", lineno), "author_email", lineno),
        authored_at=_as_time(_require(obj, "authored_at", lineno), "authored_at", lineno),
        message=_as_text(_require(obj, "message", lineno), "message", lineno),
        changes=tuple(changes),
    )


def _issue_from_json(obj: dict, lineno: int) -> IssueRecord:
    points = obj.get("story_points")
    if points is not None and (isinstance(points, bool) or not isinstance(points, (int, float))):
        raise FormatError(lineno, "field 'story_points' must be a number or null")
    closed_raw = obj.get("closed_at")
    return IssueRecord(
        id=_as_text(_require(obj, "id", lineno), "id", lineno),
        kind=_as_text(_require(obj, "kind", lineno), "kind", lineno),
        story_points=None if points is None else float(points),
        status=_as_text(_require(obj, "status", lineno), "status", lineno),
        created_at=_as_time(_require(obj, "created_at", lineno), "created_at", lineno),
        closed_at=None if closed_raw is None else _as_time(closed_raw, "closed_at", lineno),
    )


def _build_from_json(obj: dict, lineno: int) -> BuildRecord:
    return BuildRecord(
        id=_as_text(_require(obj, "id", lineno), "id", lineno),
        finished_at=_as_time(_require(obj, "finished_at", lineno), "finished_at", lineno),
        status=_as_text(_require(obj, "status", lineno), "status", lineno),
    )


def parse_commit_jsonl(stream: Iterable[str] | str) -> list[CommitRecord]:
    """Parse commit records, one JSON object per line; unknown fields are ignored."""
    return _parse_jsonl(stream, _commit_from_json)


def parse_issue_jsonl(stream: Iterable[str] | str) -> list[IssueRecord]:
    return _parse_jsonl(stream, _issue_from_json)


def parse_build_jsonl(stream: Iterable[str] | str) -> list[BuildRecord]:
    return _parse_jsonl(stream, _build_from_json)


def parse_git_numstat(text: str) -> list[CommitRecord]:
    """Parse ``git log --pretty=format:@%H|%ae|%aI|%s --numstat`` output.

    Header lines start with ``@`` and carry four ``|``-separated fields; the
    numstat lines that follow attach to the most recent header. Binary files
    show ``-`` counts and map to absent added/removed.
    """
    records: list[CommitRecord] = []
    header: tuple[str, str, datetime, str] | None = None
    changes: list[FileChange] = []

    def flush() -> None:
        nonlocal header, changes
        if header is not None:
            records.append(
                CommitRecord(
                    hash=header[0],
                    author_email=header[1],
                    authored_at=header[2],
                    message=header[3],
                    changes=tuple(changes),
                )
            )
        header, changes = None, []

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("@"):
            flush()
            parts = line[1:].split("|", 3)
            if len(parts) != 4:
                raise FormatError(lineno, "commit header needs 4 '|'-separated fields")
            try:
                authored_at = parse_timestamp(parts[2])
            except ValueError as exc:
                raise FormatError(lineno, f"bad author date: {exc}") from exc
            header = (parts[0], parts[1], authored_at, parts[3])
        else:
            if header is None:
                raise FormatError(lineno, "file-stat line before any commit header")
            cols = line.split("\t", 2)
            if len(cols) != 3:
                raise FormatError(lineno, "expected added<TAB>removed<TAB>path")

            def count(cell: str) -> int | None:
                if cell == "-":
                    return None
                try:
                    return int(cell)
                except ValueError as exc:
                    raise FormatError(lineno, f"bad line count {cell!r}") from exc

            try:
                changes.append(FileChange(path=cols[2], added=count(cols[0]), removed=count(cols[1])))
            except ValueError as exc:
                raise FormatError(lineno, str(exc)) from exc
    flush()
    return records


def serialize_commit_jsonl(records: Iterable[CommitRecord]) -> str:
    lines = []
    for record in records:
        changes = []
        for change in record.changes:
            obj = {"path": change.path, "added": change.added, "removed": change.removed}
            if change.patch is not None:
                obj["patch"] = change.patch
            changes.append(obj)
        lines.append(
            json.dumps(
                {
                    "hash": record.hash,
                    "author_email": record.author_email,
                    "authored_at": format_timestamp(record.authored_at),
                    "message": record.message,
                    "changes": changes,
                },
                ensure_ascii=False,
            )
        )
    return "".join(line + "\n" for line in lines)


def serialize_issue_jsonl(records: Iterable[IssueRecord]) -> str:
    lines = []
    for record in records:
        lines.append(
            json.dumps(
                {
                    "id": record.id,
                    "kind": record.kind,
                    "story_points": record.story_points,
                    "status": record.status,
                    "created_at": format_timestamp(record.created_at),
                    "closed_at": None
                    if record.closed_at is None
                    else format_timestamp(record.closed_at),
                },
                ensure_ascii=False,
            )
        )
    return "".join(line + "\n" for line in lines)


def serialize_build_jsonl(records: Iterable[BuildRecord]) -> str:
    lines = []
    for record in records:
        lines.append(
            json.dumps(
                {
                    "id": record.id,
                    "finished_at": format_timestamp(record.finished_at),
                    "status": record.status,
                },
                ensure_ascii=False,
            )
        )
    return "".join(line + "\n" for line in lines)
