from __future__ import annotations

import io
import random
import string
from datetime import timedelta
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from helpers import START, team_config, ts
from retrobot.gateway import (
    BotService,
    InboundMessage,
    OutboundMessage,
    _split_text,
    handle_message,
    outbound,
    reminder_due,
    render_report,
    serve_console,
    sparkline,
)
from retrobot.metrics import BuiltinMetric, CommandMetric
from retrobot.model import iteration_for
from retrobot.tracker import SampleStore

FIXTURES = Path(__file__).parent / "fixtures"
T0 = ts("2019-01-12T00:00:00Z")


def msg(text, at=T0, channel="general", author="dana"):
    return InboundMessage(channel=channel, author=author, text=text, at=at)


class TestSparkline:
    def test_three_values(self):
        assert sparkline([1, 2, 3]) == "▁▅█"

    def test_all_equal(self):
        assert sparkline([5, 5]) == "▄▄"

    def test_empty(self):
        assert sparkline([]) == ""

    @given(st.lists(st.floats(min_value=-1e9, max_value=1e9, allow_nan=False), max_size=40))
    def test_length_matches(self, values):
        assert len(sparkline(values)) == len(values)

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
                    min_size=1, max_size=20))
    def test_monotone_input_gives_non_decreasing_glyphs(self, values):
        ordered = sorted(values)
        glyphs = sparkline(ordered)
        assert list(glyphs) == sorted(glyphs, key="▁▂▃▄▅▆▇█".index)


class TestHandleMessage:
    def test_fig4_track_reply(self, fig4, team):
        store = SampleStore()
        replies = handle_message(
            msg('!retro track "Everyone checks in code" using builtin:unique_contributors every 1d'),
            store, fig4, team,
        )
        assert [r.text for r in replies] == [
            'Tracking #1 "Everyone checks in code" — baseline: 3 contributors'
        ]
        assert replies[0].channel == "general"

    def test_help(self, fig4, team):
        [reply] = handle_message(msg("!retro help"), SampleStore(), fig4, team)
        assert len(reply.text.splitlines()) == 6
        assert "track" in reply.text

    def test_close_unknown_item(self, fig4, team):
        [reply] = handle_message(msg("!retro close #99"), SampleStore(), fig4, team)
        assert reply.text == "No action item #99"

    def test_not_a_command_is_silent(self, fig4, team):
        assert handle_message(msg("good morning team"), SampleStore(), fig4, team) == []

    def test_parse_error_reported_with_offset(self, fig4, team):
        [reply] = handle_message(msg("!retro track missing quotes"), SampleStore(), fig4, team)
        assert reply.text == "Parse error at offset 13: expected quoted description"

    def test_list_and_close_flow(self, fig4, team):
        store = SampleStore()
        handle_message(msg('!retro track "a" using builtin:commit_count'), store, fig4, team)
        [listing] = handle_message(msg("!retro list"), store, fig4, team)
        assert listing.text == '#1 [open] "a" via builtin:commit_count every 1d'
        [closed] = handle_message(msg("!retro close #1"), store, fig4, team)
        assert closed.text == 'Closed #1 "a"'
        [again] = handle_message(msg("!retro close #1"), store, fig4, team)
        assert again.text == "#1 is already closed"

    def test_empty_list(self, fig4, team):
        [reply] = handle_message(msg("!retro list"), SampleStore(), fig4, team)
        assert reply.text == "No action items."

    def test_report_without_items(self, fig4, team):
        [reply] = handle_message(msg("!retro report"), SampleStore(), fig4, team)
        assert reply.text == "No open action items."

    def test_status_of_unknown_item(self, fig4, team):
        [reply] = handle_message(msg("!retro status #5"), SampleStore(), fig4, team)
        assert reply.text == "No action item #5"

    def test_status_of_closed_item(self, fig4, team):
        store = SampleStore()
        handle_message(msg('!retro track "a" using builtin:commit_count'), store, fig4, team)
        handle_message(msg("!retro close #1", at=T0 + timedelta(hours=1)), store, fig4, team)
        [reply] = handle_message(msg("!retro status #1"), store, fig4, team)
        assert reply.text == "#1 a: closed at 2019-01-12T01:00:00Z"

    def test_command_metric_rejected_when_disabled(self, fig4):
        team = team_config(allow_command_metrics=False)
        store = SampleStore()
        [reply] = handle_message(
            msg('!retro track "x" using cmd:"echo 1"'), store, fig4, team
        )
        assert reply.text == "Command metrics are disabled; action item not registered."
        assert store.items == {}

    def test_baseline_failure_still_registers(self, fig4, team, tmp_path):
        team = team_config(workdir=tmp_path)
        store = SampleStore()
        [reply] = handle_message(msg('!retro track "x" using cmd:"exit 9"'), store, fig4, team)
        assert reply.text.startswith('Tracking #1 "x" — baseline failed:')
        assert 1 in store.items

    def test_totality_over_random_text(self, fig4, team):
        rng = random.Random(5)
        store = SampleStore()
        alphabet = string.printable
        for _ in range(300):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 50)))
            replies = handle_message(msg(text), store, fig4, team)
            if text.lstrip().lower().startswith("!retro"):
                assert len(replies) >= 1
            else:
                assert replies == []
            for reply in replies:
                assert reply.channel == "general"
                assert len(reply.text) <= 4000


class TestRenderReport:
    def test_line_format(self, fig4, team):
        store = SampleStore()
        store.register("Everyone checks in code", BuiltinMetric("unique_contributors"),
                       "dana", T0, fig4, team)
        store.tick(fig4, team, ts("2019-01-28T00:00:00Z"))
        text = render_report(store.retrospective_report(team, ts("2019-02-04T00:00:00Z")), store)
        assert "3 → 5 (Δ+2 ↑)" in text
        assert text.startswith("#1 Everyone checks in code: ")

    def test_down_arrow_for_falling_series(self, team):
        from helpers import issue
        from retrobot.artifacts import ArtifactStore

        bugs = ArtifactStore(
            issues=(
                issue("B-1", kind="bug", created="2019-01-08T00:00:00Z"),
                issue("B-2", kind="bug", created="2019-01-08T00:00:00Z"),
                issue("B-3", kind="bug", status="done", created="2019-01-08T00:00:00Z",
                      closed="2019-01-13T00:00:00Z"),
            )
        )
        store = SampleStore()
        store.register("defects", BuiltinMetric("defect_count"), "dana", T0, bugs, team)
        store.tick(bugs, team, ts("2019-01-14T00:00:00Z"))
        text = render_report(store.retrospective_report(team, ts("2019-01-14T00:00:00Z")), store)
        assert "3 → 2 (Δ-1 ↓)" in text

    def test_no_data_marker(self, fig4):
        team = team_config(allow_command_metrics=False)
        store = SampleStore()
        store.register("x", CommandMetric("echo 1"), "dana", T0, fig4, team)
        text = render_report(store.retrospective_report(team, T0), store)
        assert text == "#1 x: (no data yet)"

    def test_empty(self):
        assert render_report([], SampleStore()) == "No open action items."


class TestSplitText:
    def test_short_text_unsplit(self):
        assert _split_text("hello") == ["hello"]

    def test_splits_on_line_boundaries(self):
        lines = [f"line {i} " + "x" * 90 for i in range(60)]
        chunks = _split_text("\n".join(lines))
        assert all(len(c) <= 4000 for c in chunks)
        assert "\n".join(chunks) == "\n".join(lines)

    def test_oversized_single_line_hard_split(self):
        text = "y" * 9500
        chunks = _split_text(text)
        assert [len(c) for c in chunks] == [4000, 4000, 1500]
        assert "".join(chunks) == text

    def test_outbound_enforces_cap(self):
        with pytest.raises(ValueError):
            OutboundMessage(channel="c", text="z" * 4001)
        assert len(outbound("c", "z" * 8100)) == 3


class TestReminder:
    def test_due_inside_lead_window(self, team):
        now = iteration_for(team, START).ends_at - timedelta(hours=1)
        message = reminder_due(team, None, now, report_text="data here")
        assert message is not None
        assert "data here" in message.text

    def test_not_due_mid_iteration(self, team):
        assert reminder_due(team, None, START + timedelta(days=3)) is None

    def test_already_sent_this_iteration(self, team):
        first = iteration_for(team, START).ends_at - timedelta(hours=20)
        again = first + timedelta(hours=2)
        assert reminder_due(team, None, first) is not None
        assert reminder_due(team, first, again) is None

    def test_exactly_one_per_iteration_over_sweep(self, team):
        last = None
        emitted = []
        t = START
        horizon = START + 3 * team.iteration_length
        while t < horizon:
            message = reminder_due(team, last, t)
            if message is not None:
                emitted.append(t)
                last = t
            t += timedelta(hours=1)
        assert len(emitted) == 3
        indices = []
        for at in emitted:
            iteration = iteration_for(team, at)
            assert iteration.ends_at - team.reminder_lead <= at < iteration.ends_at
            indices.append(iteration.index)
        assert indices == [0, 1, 2]

    def test_long_report_truncated_to_cap(self, team):
        now = iteration_for(team, START).ends_at - timedelta(hours=1)
        message = reminder_due(team, None, now, report_text="x" * 9000)
        assert message is not None
        assert len(message.text) <= 4000


class TestServeConsole:
    def test_golden_transcript(self, bot_env):
        service = BotService(bot_env)
        fin = io.StringIO((FIXTURES / "console_session.txt").read_text())
        fout = io.StringIO()
        code = serve_console(
            service, input_stream=fin, output_stream=fout,
            start_now=ts("2019-01-12T00:00:00Z"),
        )
        assert code == 0
        assert fout.getvalue() == (FIXTURES / "console_session.golden").read_text()

    def test_end_of_input_exits_cleanly(self, bot_env):
        service = BotService(bot_env)
        code = serve_console(service, input_stream=io.StringIO(""), output_stream=io.StringIO())
        assert code == 0

    def test_journal_failure_exits_nonzero(self, bot_env, tmp_path, capsys):
        service = BotService(bot_env)
        blocked = tmp_path / "blocked"
        blocked.mkdir()
        service.config = type(bot_env)(
            team=bot_env.team,
            journal_path=blocked,
            artifact_paths=bot_env.artifact_paths,
            default_author=bot_env.default_author,
        )
        fin = io.StringIO('!retro track "x" using builtin:commit_count\n')
        code = serve_console(service, input_stream=fin, output_stream=io.StringIO(),
                             start_now=T0)
        assert code == 2
