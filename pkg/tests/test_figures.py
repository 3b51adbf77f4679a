from __future__ import annotations

import csv
from datetime import timedelta

from helpers import team_config, ts
from retrobot.artifacts import ArtifactStore
from retrobot.figures import write_report_files
from retrobot.metrics import BuiltinMetric, CommandMetric
from retrobot.tracker import SampleStore

T0 = ts("2019-01-12T00:00:00Z")


def test_csv_marks_items_without_data(tmp_path, fig4):
    team = team_config(allow_command_metrics=False)
    store = SampleStore()
    store.register("counts", BuiltinMetric("commit_count"), "dana", T0, fig4, team)
    store.register("never works", CommandMetric("echo 1"), "dana",
                   T0 + timedelta(minutes=1), fig4, team)
    written = write_report_files(store, fig4, team, T0, tmp_path / "out")
    names = {p.name for p in written}
    assert "report.csv" in names
    assert "trend_1.png" in names
    assert "trend_2.png" not in names

    with open(tmp_path / "out" / "report.csv", newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert rows[1]["baseline"] == ""
    assert rows[1]["sample_count"] == "0"


def test_empty_store_still_writes_csv(tmp_path, team):
    written = write_report_files(SampleStore(), ArtifactStore(), team, T0, tmp_path / "out")
    assert [p.name for p in written] == ["report.csv"]
