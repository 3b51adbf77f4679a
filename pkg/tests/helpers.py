"""Shared fixture builders for the test suite."""

from __future__ import annotations

import random
from datetime import datetime, timedelta

from retrobot.artifacts import (
    ArtifactStore,
    BuildRecord,
    CommitRecord,
    FileChange,
    IssueRecord,
)
from retrobot.model import TeamConfig, parse_timestamp

START = parse_timestamp("2019-01-07T00:00:00Z")


def ts(text: str) -> datetime:
    return parse_timestamp(text)


def team_config(**overrides) -> TeamConfig:
    settings = {"team_name": "platform", "iteration_start": START}
    settings.update(overrides)
    return TeamConfig(**settings)


def commit(
    sha: str,
    email: str,
    at: str | datetime,
    message: str = "work",
    changes: tuple[FileChange, ...] = (),
) -> CommitRecord:
    return CommitRecord(
        hash=sha,
        author_email=email,
        authored_at=ts(at) if isinstance(at, str) else at,
        message=message,
        changes=changes,
    )


def issue(
    ident: str,
    kind: str = "story",
    points: float | None = None,
    status: str = "open",
    created: str | datetime = "2019-01-07T09:00:00Z",
    closed: str | datetime | None = None,
) -> IssueRecord:
    return IssueRecord(
        id=ident,
        kind=kind,
        story_points=points,
        status=status,
        created_at=ts(created) if isinstance(created, str) else created,
        closed_at=ts(closed) if isinstance(closed, str) else closed,
    )


def build(ident: str, at: str, status: str = "passed") -> BuildRecord:
    return BuildRecord(id=ident, finished_at=ts(at), status=status)


def fig4_commits() -> tuple[CommitRecord, ...]:
    """Three distinct authors in iteration 1, five in iteration 2."""
    return (
        commit("c1", "a@example.com", "2019-01-08T10:00:00Z", "start work"),
        commit("c2", "b@example.com", "2019-01-09T10:00:00Z", "more work"),
        commit("c3", "c@example.com", "2019-01-10T10:00:00Z", "fix build"),
        commit("c4", "a@example.com", "2019-01-22T10:00:00Z", "resume"),
        commit("c5", "b@example.com", "2019-01-23T10:00:00Z", "tune config"),
        commit("c6", "c@example.com", "2019-01-24T10:00:00Z", "cleanup"),
        commit("c7", "d@example.com", "2019-01-25T10:00:00Z", "join in"),
        commit("c8", "e@example.com", "2019-01-26T10:00:00Z", "pitch in"),
    )


def fig4_store() -> ArtifactStore:
    return ArtifactStore(commits=fig4_commits())


_WORDS = ("refactor", "fix", "feature", "docs", "cleanup", "merge", "wip", "hotfix")
_EMAILS = ("Ann@x.io", "ann@x.io", "bob@x.io", "CARA@y.io", "dee@y.io", "eli@z.io")
_PATHS = (
    "src/main.py",
    "src/util.py",
    "tests/test_main.py",
    "lib/spec/helper.rb",
    "app/FooTest.java",
    "docs/readme.md",
    "core/engine.c",
)
_PATCHES = (
    "+if x:\n+    y()\n-old()\n",
    "+plain line\n+another || one\n",
    "-while running:\n+done\n",
    "+x = a ? b : c\n",
    "+no tokens here\n-none removed\n",
)


def random_commits(rng: random.Random, limit: int = 50) -> list[CommitRecord]:
    count = rng.randint(0, limit)
    commits = []
    for n in range(count):
        at = START + timedelta(hours=rng.randint(0, 24 * 60), minutes=rng.randint(0, 59))
        changes = []
        for _ in range(rng.randint(0, 4)):
            with_patch = rng.random() < 0.5
            changes.append(
                FileChange(
                    path=rng.choice(_PATHS),
                    added=rng.randint(0, 30) if rng.random() < 0.9 else None,
                    removed=rng.randint(0, 30) if rng.random() < 0.9 else None,
                    patch=rng.choice(_PATCHES) if with_patch else None,
                )
            )
        commits.append(
            commit(
                f"sha{n}",
                rng.choice(_EMAILS),
                at,
                message=" ".join(rng.choice(_WORDS) for _ in range(rng.randint(1, 4))),
                changes=tuple(changes),
            )
        )
    return commits


def random_issues(rng: random.Random, limit: int = 20) -> list[IssueRecord]:
    issues = []
    for n in range(rng.randint(0, limit)):
        created = START + timedelta(hours=rng.randint(0, 24 * 50))
        done = rng.random() < 0.6
        closed = created + timedelta(hours=rng.randint(1, 24 * 20)) if done else None
        issues.append(
            IssueRecord(
                id=f"T-{n}",
                kind=rng.choice(("story", "bug", "task")),
                story_points=rng.choice((None, 1.0, 2.0, 3.0, 5.0, 8.0, 0.5)),
                status="done" if done else "open",
                created_at=created,
                closed_at=closed,
            )
        )
    return issues


def run_random_journal_scenario(rng: random.Random, journal_path):
    """Drive a store through random register/close/tick ops, persisting as it goes.

    Returns (original, reloaded) stores for replay-identity comparison. Uses a
    team with command metrics disabled so CommandMetric items produce
    deterministic error-samples without spawning subprocesses.
    """
    from retrobot.metrics import BuiltinMetric, CommandMetric
    from retrobot.tracker import SampleStore

    team = team_config(allow_command_metrics=False)
    artifacts = fig4_store()
    store = SampleStore()
    now = START + timedelta(minutes=rng.randint(1, 500))
    metric_pool = [
        BuiltinMetric("commit_count"),
        BuiltinMetric("unique_contributors"),
        BuiltinMetric("commit_count", {"window": "all"}),
        BuiltinMetric("commits_matching", {"pattern": "fix"}),
        BuiltinMetric("velocity"),
        CommandMetric("echo 1"),
    ]
    authors = ("ann", "bob", "cara")
    for _ in range(rng.randint(1, 8)):
        now += timedelta(minutes=rng.randint(1, 3000))
        open_ids = [i for i, item in store.items.items() if item.is_open]
        roll = rng.random()
        if roll < 0.45 or not store.items:
            store.register(
                f"item number {len(store.items) + 1}",
                rng.choice(metric_pool),
                rng.choice(authors),
                now,
                artifacts,
                team,
                cadence=timedelta(minutes=rng.choice((1, 30, 1440))),
            )
        elif roll < 0.6 and open_ids:
            store.close(rng.choice(open_ids), now, by=rng.choice(authors))
        else:
            store.tick(artifacts, team, now)
        if rng.random() < 0.3:
            store.persist(journal_path)
    store.persist(journal_path)
    return store, SampleStore.load(journal_path)


def stores_equal(a, b) -> bool:
    if a.items != b.items:
        return False
    return all(a.series(item_id) == b.series(item_id) for item_id in a.items)
