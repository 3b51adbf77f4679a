from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one line per acceptance criterion after the run."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None) if module else None
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)

from helpers import fig4_commits, fig4_store, team_config
from retrobot.artifacts import serialize_commit_jsonl
from retrobot.config import BotConfig, load_config


@pytest.fixture
def team(tmp_path):
    return team_config(workdir=tmp_path)


@pytest.fixture
def fig4():
    return fig4_store()


@pytest.fixture
def bot_env(tmp_path) -> BotConfig:
    """A config file plus the fig4 commit export, rooted in a temp directory."""
    (tmp_path / "commits.jsonl").write_text(
        serialize_commit_jsonl(fig4_commits()), encoding="utf-8"
    )
    config_path = tmp_path / "retrobot.json"
    config_path.write_text(
        json.dumps(
            {
                "team_name": "platform",
                "iteration_start": "2019-01-07T00:00:00Z",
                "iteration_length": "14d",
                "journal_path": "retro-journal.jsonl",
                "artifact_paths": {"commits": "commits.jsonl"},
                "workdir": ".",
                "default_author": "dana",
            }
        ),
        encoding="utf-8",
    )
    return load_config(config_path)


@pytest.fixture
def bot_config_path(bot_env, tmp_path) -> Path:
    return tmp_path / "retrobot.json"
