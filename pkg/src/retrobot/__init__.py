"""Retrospective chatbot: track action items with measurements over project artifacts."""

from .artifacts import (
    ArtifactStore,
    BuildRecord,
    CommitRecord,
    FileChange,
    FormatError,
    InvalidWindow,
    IssueRecord,
    parse_build_jsonl,
    parse_commit_jsonl,
    parse_git_numstat,
    parse_issue_jsonl,
    window,
)
from .commands import (
    Close,
    Command,
    Help,
    ListItems,
    NotACommand,
    ParseError,
    ParseOutcome,
    Report,
    Status,
    Track,
    parse_command,
    render_command,
    render_help,
)
from .config import BotConfig, load_config
from .gateway import (
    BotService,
    InboundMessage,
    OutboundMessage,
    handle_message,
    reminder_due,
    render_report,
    serve_console,
    sparkline,
)
from .metrics import (
    BUILTIN_METRICS,
    BuiltinMetric,
    CommandMetric,
    CommandMetricsDisabled,
    ExecTimeout,
    MetricEvalError,
    MetricSpec,
    MetricValue,
    NonZeroExit,
    OutputNotNumeric,
    PatternError,
    eval_metric,
    run_command_metric,
)
from .model import (
    BeforeProjectStart,
    EmptySeries,
    Iteration,
    Sample,
    TeamConfig,
    TimeSeries,
    TrendReport,
    compute_trend,
    iteration_for,
)
from .tracker import ActionItem, AlreadyClosed, JournalCorrupt, SampleStore, UnknownItem

__version__ = "0.1.0"
