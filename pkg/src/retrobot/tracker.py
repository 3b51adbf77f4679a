"""Action-item registry, sampling scheduler and journaled sample store.

State persists as an append-only JSON-lines journal (``retro-journal.jsonl``)
of three event kinds, each with an ``at`` timestamp:

    {"ev": "registered", "at": ..., "id": 1, "description": ..., "metric": {...},
     "cadence": "1d", "by": "alice"}
    {"ev": "sampled", "at": ..., "id": 1, "value": 3.0}      (or "error": "...")
    {"ev": "closed", "at": ..., "id": 1, "by": "bob"}

Replaying the journal reconstructs items and series exactly; a malformed or
invariant-breaking line aborts the load with its line number.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from pathlib import Path

from .artifacts import ArtifactStore
from .metrics import BuiltinMetric, MetricSpec, eval_metric, metric_from_json, metric_to_json
from .model import (
    BeforeProjectStart,
    EmptySeries,
    Sample,
    TeamConfig,
    TimeSeries,
    TrendReport,
    compute_trend,
    format_duration,
    format_timestamp,
    iteration_for,
    parse_duration,
    parse_timestamp,
)

ITEM_OPEN = "open"
ITEM_CLOSED = "closed"

MIN_CADENCE = timedelta(minutes=1)


class UnknownItem(LookupError):
    def __init__(self, item_id: int):
        super().__init__(f"no action item #{item_id}")
        self.item_id = item_id


class AlreadyClosed(ValueError):
    def __init__(self, item_id: int):
        super().__init__(f"action item #{item_id} is already closed")
        self.item_id = item_id


class JournalCorrupt(ValueError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"journal line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


@dataclass(frozen=True)
class ActionItem:
    """A retrospective outcome tracked by a measurement at a cadence."""

    id: int
    description: str
    metric: MetricSpec
    cadence: timedelta
    created_at: datetime
    created_by: str
    status: str = ITEM_OPEN
    closed_at: datetime | None = None

    def __post_init__(self) -> None:
        if self.id < 1:
            raise ValueError("item id must be positive")
        if not self.description.strip():
            raise ValueError("description must be non-empty")
        if self.cadence < MIN_CADENCE:
            raise ValueError("cadence must be at least one minute")
        if not self.cadence.total_seconds().is_integer():
            raise ValueError("cadence must be a whole number of seconds")
        if self.status not in (ITEM_OPEN, ITEM_CLOSED):
            raise ValueError(f"bad status {self.status!r}")
        if (self.status == ITEM_CLOSED) != (self.closed_at is not None):
            raise ValueError("closed items carry closed_at, open items do not")

    @property
    def is_open(self) -> bool:
        return self.status == ITEM_OPEN


class SampleStore:
    """Items plus their append-only sample series, backed by the journal.

    Not thread-safe by itself; the owning service serializes all mutations
    (single-writer). Reads hand out immutable snapshots.
    """

    def __init__(self) -> None:
        self._items: dict[int, ActionItem] = {}
        self._series: dict[int, list[Sample]] = {}
        self._pending: list[dict] = []

    @property
    def items(self) -> dict[int, ActionItem]:
        return dict(self._items)

    @property
    def pending_events(self) -> int:
        return len(self._pending)

    def series(self, item_id: int) -> TimeSeries:
        if item_id not in self._items:
            raise UnknownItem(item_id)
        return TimeSeries(item_id=item_id, samples=tuple(self._series[item_id]))

    def register(
        self,
        description: str,
        metric: MetricSpec,
        created_by: str,
        now: datetime,
        artifact_store: ArtifactStore,
        config: TeamConfig,
        cadence: timedelta | None = None,
    ) -> ActionItem:
        """Create the next item and take its baseline sample immediately.

        A failing metric yields an error baseline instead of raising, so the
        item is registered either way.
        """
        item = ActionItem(
            id=len(self._items) + 1,
            description=description,
            metric=metric,
            cadence=cadence if cadence is not None else config.default_cadence,
            created_at=now,
            created_by=created_by,
        )
        self._items[item.id] = item
        self._series[item.id] = []
        self._pending.append(
            {
                "ev": "registered",
                "at": format_timestamp(now),
                "id": item.id,
                "description": item.description,
                "metric": metric_to_json(metric),
                "cadence": format_duration(item.cadence),
                "by": created_by,
            }
        )
        self._append_sample(self._evaluate(item, artifact_store, config, now))
        return item

    def close(self, item_id: int, now: datetime, by: str = "") -> ActionItem:
        item = self._items.get(item_id)
        if item is None:
            raise UnknownItem(item_id)
        if not item.is_open:
            raise AlreadyClosed(item_id)
        closed = replace(item, status=ITEM_CLOSED, closed_at=now)
        self._items[item_id] = closed
        self._pending.append(
            {"ev": "closed", "at": format_timestamp(now), "id": item_id, "by": by}
        )
        return closed

    def tick(self, artifact_store: ArtifactStore, config: TeamConfig, now: datetime) -> list[Sample]:
        """Sample every open item whose cadence has elapsed since its last sample.

        Failures are isolated: a failing metric appends an error-sample and the
        remaining items still get sampled.
        """
        appended: list[Sample] = []
        for item_id in sorted(self._items):
            item = self._items[item_id]
            if not item.is_open:
                continue
            series = self._series[item_id]
            if series and now - series[-1].taken_at < item.cadence:
                continue
            sample = self._evaluate(item, artifact_store, config, now)
            self._append_sample(sample)
            appended.append(sample)
        return appended

    def retrospective_report(self, config: TeamConfig, now: datetime) -> list[TrendReport]:
        """One trend per open item; items without data get an empty marker report."""
        try:
            window_start = iteration_for(config, now).starts_at
        except BeforeProjectStart:
            window_start = None
        reports: list[TrendReport] = []
        for item_id in sorted(self._items):
            if not self._items[item_id].is_open:
                continue
            try:
                reports.append(compute_trend(self.series(item_id), window_start))
            except EmptySeries:
                reports.append(
                    TrendReport(
                        item_id=item_id,
                        baseline=None,
                        latest=None,
                        delta=None,
                        direction=None,
                        sample_count=0,
                    )
                )
        return reports

    def persist(self, sink: Path | str) -> None:
        """Append unflushed journal events to ``sink``, fsync, then forget them."""
        if not self._pending:
            return
        path = Path(sink)
        with open(path, "a", encoding="utf-8") as handle:
            for event in self._pending:
                handle.write(json.dumps(event, ensure_ascii=False) + "\n")
            handle.flush()
            os.fsync(handle.fileno())
        self._pending.clear()

    @classmethod
    def load(cls, source: Path | str) -> SampleStore:
        """Rebuild a store by replaying the journal; a missing file is an empty store."""
        store = cls()
        path = Path(source)
        if not path.exists():
            return store
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n").rstrip("\r")
                try:
                    store._replay(line, lineno)
                except JournalCorrupt:
                    raise
                except (ValueError, KeyError, TypeError) as exc:
                    raise JournalCorrupt(lineno, str(exc)) from exc
        return store

    # internals

    def _replay(self, line: str, lineno: int) -> None:
        if not line.strip():
            raise JournalCorrupt(lineno, "blank line")
        try:
            event = json.loads(line)
        except json.JSONDecodeError as exc:
            raise JournalCorrupt(lineno, f"invalid JSON: {exc}") from exc
        if not isinstance(event, dict):
            raise JournalCorrupt(lineno, "event must be a JSON object")
        kind = event.get("ev")
        at = parse_timestamp(event["at"])
        if kind == "registered":
            item = ActionItem(
                id=event["id"],
                description=event["description"],
                metric=metric_from_json(event["metric"]),
                cadence=parse_duration(event["cadence"]),
                created_at=at,
                created_by=event.get("by", ""),
            )
            if item.id != len(self._items) + 1:
                raise JournalCorrupt(lineno, f"item id {item.id} out of sequence")
            self._items[item.id] = item
            self._series[item.id] = []
        elif kind == "sampled":
            item = self._items.get(event["id"])
            if item is None:
                raise JournalCorrupt(lineno, f"sample for unknown item #{event['id']}")
            if not item.is_open:
                raise JournalCorrupt(lineno, f"sample for closed item #{item.id}")
            series = self._series[item.id]
            if series and at <= series[-1].taken_at:
                raise JournalCorrupt(lineno, f"sample timestamps not increasing for #{item.id}")
            if "value" in event:
                series.append(Sample(item_id=item.id, taken_at=at, value=float(event["value"])))
            elif "error" in event:
                series.append(Sample(item_id=item.id, taken_at=at, error=str(event["error"])))
            else:
                raise JournalCorrupt(lineno, "sampled event needs value or error")
        elif kind == "closed":
            item = self._items.get(event["id"])
            if item is None:
                raise JournalCorrupt(lineno, f"close for unknown item #{event['id']}")
            if not item.is_open:
                raise JournalCorrupt(lineno, f"item #{item.id} closed twice")
            self._items[item.id] = replace(item, status=ITEM_CLOSED, closed_at=at)
        else:
            raise JournalCorrupt(lineno, f"unknown event kind {kind!r}")

    def _sample_window(
        self, item: ActionItem, config: TeamConfig, now: datetime
    ) -> tuple[datetime, datetime]:
        # window=all samples cumulatively from the item's creation instead of
        # from the current iteration start.
        if isinstance(item.metric, BuiltinMetric) and item.metric.params.get("window") == "all":
            return item.created_at, now
        return iteration_for(config, now).starts_at, now

    def _evaluate(
        self, item: ActionItem, artifact_store: ArtifactStore, config: TeamConfig, now: datetime
    ) -> Sample:
        try:
            window = self._sample_window(item, config, now)
            measured = eval_metric(item.metric, artifact_store, window, config)
            return Sample(item_id=item.id, taken_at=now, value=measured.value)
        except Exception as exc:  # failure isolation: any error becomes an error-sample
            return Sample(item_id=item.id, taken_at=now, error=str(exc) or type(exc).__name__)

    def _append_sample(self, sample: Sample) -> None:
        self._series[sample.item_id].append(sample)
        event: dict = {
            "ev": "sampled",
            "at": format_timestamp(sample.taken_at),
            "id": sample.item_id,
        }
        if sample.ok:
            event["value"] = sample.value
        else:
            event["error"] = sample.error
        self._pending.append(event)
