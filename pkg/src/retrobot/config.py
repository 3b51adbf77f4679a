"""JSON config file: team settings plus journal and artifact file locations."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

from .artifacts import ArtifactStore, parse_build_jsonl, parse_commit_jsonl, parse_issue_jsonl
from .model import TeamConfig, parse_duration, parse_timestamp

ARTIFACT_KINDS = ("commits", "issues", "builds")

_KNOWN_KEYS = {
    "team_name",
    "iteration_start",
    "iteration_length",
    "reminder_lead",
    "default_cadence",
    "command_timeout",
    "workdir",
    "allow_command_metrics",
    "max_parallel_commands",
    "journal_path",
    "artifact_paths",
    "default_author",
}


@dataclass(frozen=True)
class BotConfig:
    """A TeamConfig plus where the journal and artifact exports live on disk."""

    team: TeamConfig
    journal_path: Path
    artifact_paths: dict[str, Path]
    default_author: str = "team"
    allow_command_metrics: bool | None = None  # None: each adapter applies its default

    def resolve_team(self, default_allow_commands: bool) -> TeamConfig:
        allow = (
            self.allow_command_metrics
            if self.allow_command_metrics is not None
            else default_allow_commands
        )
        return replace(self.team, allow_command_metrics=allow)


def load_config(path: Path | str) -> BotConfig:
    """Read and validate the JSON config; relative paths resolve next to the file."""
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        raw = json.load(handle)
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    unknown = sorted(set(raw) - _KNOWN_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")

    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    def duration(key: str, default: str):
        return parse_duration(str(raw.get(key, default)))

    if "team_name" not in raw or "iteration_start" not in raw:
        raise ValueError("config requires team_name and iteration_start")

    allow = raw.get("allow_command_metrics")
    if allow is not None and not isinstance(allow, bool):
        raise ValueError("allow_command_metrics must be a boolean")

    team = TeamConfig(
        team_name=str(raw["team_name"]),
        iteration_start=parse_timestamp(str(raw["iteration_start"])),
        iteration_length=duration("iteration_length", "14d"),
        reminder_lead=duration("reminder_lead", "1d"),
        default_cadence=duration("default_cadence", "1d"),
        command_timeout=duration("command_timeout", "10s"),
        workdir=resolve(str(raw.get("workdir", "."))),
        allow_command_metrics=True if allow is None else allow,
        max_parallel_commands=int(raw.get("max_parallel_commands", 2)),
    )

    raw_paths = raw.get("artifact_paths", {})
    if not isinstance(raw_paths, dict):
        raise ValueError("artifact_paths must be an object")
    bad_kinds = sorted(set(raw_paths) - set(ARTIFACT_KINDS))
    if bad_kinds:
        raise ValueError(f"artifact_paths keys must be in {ARTIFACT_KINDS}, got {bad_kinds}")
    artifact_paths = {
        kind: resolve(str(raw_paths.get(kind, f"{kind}.jsonl"))) for kind in ARTIFACT_KINDS
    }

    return BotConfig(
        team=team,
        journal_path=resolve(str(raw.get("journal_path", "retro-journal.jsonl"))),
        artifact_paths=artifact_paths,
        default_author=str(raw.get("default_author", "team")),
        allow_command_metrics=allow,
    )


def load_artifacts(paths: Mapping[str, Path]) -> ArtifactStore:
    """Parse whichever artifact exports exist; missing files mean empty lists."""
    parsers = {
        "commits": parse_commit_jsonl,
        "issues": parse_issue_jsonl,
        "builds": parse_build_jsonl,
    }
    loaded: dict[str, list] = {kind: [] for kind in ARTIFACT_KINDS}
    for kind in ARTIFACT_KINDS:
        target = paths.get(kind)
        if target is not None and Path(target).exists():
            with open(target, encoding="utf-8") as handle:
                loaded[kind] = parsers[kind](handle)
    return ArtifactStore(
        commits=tuple(loaded["commits"]),
        issues=tuple(loaded["issues"]),
        builds=tuple(loaded["builds"]),
    )
