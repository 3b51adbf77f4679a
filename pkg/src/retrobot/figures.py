"""File export for the report path: a delimited summary plus rendered charts."""

from __future__ import annotations

import csv
from datetime import datetime
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.dates as mdates
import matplotlib.pyplot as plt

from .artifacts import ArtifactStore
from .commands import render_metric
from .metrics import burndown_remaining
from .model import BeforeProjectStart, TeamConfig, format_timestamp, iteration_for
from .tracker import SampleStore


def write_report_files(
    store: SampleStore,
    artifacts: ArtifactStore,
    config: TeamConfig,
    now: datetime,
    out_dir: Path,
) -> list[Path]:
    """Write report.csv plus one trend chart per item and a burndown chart.

    Returns the paths written. Items without successful samples appear in the
    CSV with empty value columns and get no chart.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    reports = store.retrospective_report(config, now)
    items = store.items

    csv_path = out_dir / "report.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "item_id",
                "description",
                "metric",
                "baseline",
                "baseline_at",
                "latest",
                "latest_at",
                "delta",
                "direction",
                "sample_count",
            ]
        )
        for report in reports:
            item = items[report.item_id]
            if report.has_data:
                writer.writerow(
                    [
                        item.id,
                        item.description,
                        render_metric(item.metric),
                        report.baseline.value,
                        format_timestamp(report.baseline.taken_at),
                        report.latest.value,
                        format_timestamp(report.latest.taken_at),
                        report.delta,
                        report.direction,
                        report.sample_count,
                    ]
                )
            else:
                writer.writerow(
                    [item.id, item.description, render_metric(item.metric)] + [""] * 6 + [0]
                )
    written.append(csv_path)

    for report in reports:
        if not report.has_data:
            continue
        item = items[report.item_id]
        successes = [s for s in store.series(item.id).samples if s.ok]
        fig, ax = plt.subplots(figsize=(7, 3.2))
        ax.plot(
            [s.taken_at for s in successes],
            [s.value for s in successes],
            marker="o",
            linewidth=1.5,
        )
        ax.set_title(f"#{item.id} {item.description}")
        ax.set_ylabel("value")
        ax.grid(True, alpha=0.3)
        ax.xaxis.set_major_formatter(mdates.DateFormatter("%Y-%m-%d"))
        fig.autofmt_xdate()
        fig.tight_layout()
        path = out_dir / f"trend_{item.id}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)

    if artifacts.issues:
        try:
            iteration = iteration_for(config, now)
        except BeforeProjectStart:
            iteration = None
        if iteration is not None:
            remaining = burndown_remaining(artifacts.issues, iteration)
            fig, ax = plt.subplots(figsize=(7, 3.2))
            ax.step(range(1, len(remaining) + 1), remaining, where="post", linewidth=1.5)
            ax.set_title(f"Burndown, iteration {iteration.index}")
            ax.set_xlabel("iteration day")
            ax.set_ylabel("story points remaining")
            ax.set_ylim(bottom=0)
            ax.grid(True, alpha=0.3)
            fig.tight_layout()
            path = out_dir / "burndown.png"
            fig.savefig(path, dpi=110)
            plt.close(fig)
            written.append(path)

    return written
