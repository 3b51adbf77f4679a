"""HTTP adapter: the chat loop and tracker state over a small JSON API.

    POST /api/messages   {channel, author, text, at?}  -> {"replies": [...]}
    GET  /api/actions                                   -> [action...]
    GET  /api/actions/{id}/samples                      -> [sample...]
    GET  /api/report?now=<iso8601>                      -> [trend...]
    POST /api/tick       {now?}                         -> [sample...]

Bodies and responses are JSON; timestamps are ISO-8601 UTC. Replies carry the
same text the console adapter prints. When a static directory is configured,
anything outside /api is served from it (the dashboard build).
"""

from __future__ import annotations

import json
import mimetypes
import re
from datetime import datetime
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from .config import BotConfig
from .gateway import BotService, InboundMessage
from .metrics import metric_to_json
from .model import UTC, Sample, TrendReport, format_duration, format_timestamp, parse_timestamp
from .tracker import ActionItem, UnknownItem

_SAMPLES_ROUTE = re.compile(r"^/api/actions/(\d+)/samples$")


def action_to_json(item: ActionItem) -> dict:
    return {
        "id": item.id,
        "description": item.description,
        "metric": metric_to_json(item.metric),
        "cadence": format_duration(item.cadence),
        "created_at": format_timestamp(item.created_at),
        "created_by": item.created_by,
        "status": item.status,
        "closed_at": None if item.closed_at is None else format_timestamp(item.closed_at),
    }


def sample_to_json(sample: Sample) -> dict:
    return {
        "item_id": sample.item_id,
        "taken_at": format_timestamp(sample.taken_at),
        "value": sample.value,
        "error": sample.error,
    }


def trend_to_json(report: TrendReport) -> dict:
    return {
        "item_id": report.item_id,
        "baseline": None if report.baseline is None else sample_to_json(report.baseline),
        "latest": None if report.latest is None else sample_to_json(report.latest),
        "delta": report.delta,
        "direction": report.direction,
        "sample_count": report.sample_count,
    }


class _ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


class BotRequestHandler(BaseHTTPRequestHandler):
    server_version = "retrobot/0.1"
    protocol_version = "HTTP/1.1"

    def log_message(self, format: str, *args) -> None:  # keep the console quiet
        pass

    @property
    def service(self) -> BotService:
        return self.server.service  # type: ignore[attr-defined]

    @property
    def static_dir(self) -> Path | None:
        return self.server.static_dir  # type: ignore[attr-defined]

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        url = urlsplit(self.path)
        try:
            if url.path == "/api/actions":
                self._send_json(200, [action_to_json(a) for a in self.service.actions()])
                return
            match = _SAMPLES_ROUTE.match(url.path)
            if match:
                try:
                    series = self.service.samples(int(match.group(1)))
                except UnknownItem as exc:
                    raise _ApiError(404, str(exc)) from exc
                self._send_json(200, [sample_to_json(s) for s in series.samples])
                return
            if url.path == "/api/report":
                now = self._query_now(url.query)
                self._send_json(200, [trend_to_json(r) for r in self.service.report(now)])
                return
            if url.path.startswith("/api/"):
                raise _ApiError(404, f"no such endpoint: {url.path}")
            self._serve_static(url.path)
        except _ApiError as exc:
            self._send_json(exc.status, {"error": exc.message})

    def do_POST(self) -> None:
        url = urlsplit(self.path)
        try:
            if url.path == "/api/messages":
                self._post_message()
            elif url.path == "/api/tick":
                self._post_tick()
            else:
                raise _ApiError(404, f"no such endpoint: {url.path}")
        except _ApiError as exc:
            self._send_json(exc.status, {"error": exc.message})

    # endpoint bodies

    def _post_message(self) -> None:
        body = self._read_json()
        channel = self._field(body, "channel")
        author = self._field(body, "author")
        text = self._field(body, "text")
        if not text:
            raise _ApiError(400, "field 'text' must be non-empty")
        at = self._optional_time(body, "at")
        msg = InboundMessage(channel=channel, author=author, text=text, at=at)
        replies = self._guard_journal(lambda: self.service.handle(msg))
        self._send_json(
            200, {"replies": [{"channel": r.channel, "text": r.text} for r in replies]}
        )

    def _post_tick(self) -> None:
        body = self._read_json(optional=True)
        now = self._optional_time(body, "now")
        samples = self._guard_journal(lambda: self.service.tick(now))
        self._send_json(200, [sample_to_json(s) for s in samples])

    # helpers

    def _guard_journal(self, action):
        try:
            return action()
        except OSError as exc:
            raise _ApiError(503, f"journal unwritable: {exc}") from exc

    def _field(self, body: dict, name: str) -> str:
        value = body.get(name)
        if not isinstance(value, str):
            raise _ApiError(400, f"field {name!r} must be a string")
        return value

    def _optional_time(self, body: dict, name: str) -> datetime:
        raw = body.get(name)
        if raw is None:
            return datetime.now(UTC)
        if not isinstance(raw, str):
            raise _ApiError(400, f"field {name!r} must be an ISO-8601 string")
        try:
            return parse_timestamp(raw)
        except ValueError as exc:
            raise _ApiError(400, f"field {name!r}: {exc}") from exc

    def _query_now(self, query: str) -> datetime:
        values = parse_qs(query).get("now")
        if not values:
            return datetime.now(UTC)
        try:
            return parse_timestamp(values[0])
        except ValueError as exc:
            raise _ApiError(400, f"query param 'now': {exc}") from exc

    def _read_json(self, optional: bool = False) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            if optional:
                return {}
            raise _ApiError(400, "request body required")
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise _ApiError(400, f"malformed JSON body: {exc}") from exc
        if not isinstance(body, dict):
            raise _ApiError(400, "request body must be a JSON object")
        return body

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _serve_static(self, url_path: str) -> None:
        root = self.static_dir
        if root is None:
            raise _ApiError(404, "no static content configured")
        relative = url_path.lstrip("/") or "index.html"
        target = (root / relative).resolve()
        if not target.is_relative_to(root.resolve()) or not target.is_file():
            raise _ApiError(404, f"not found: {url_path}")
        content = target.read_bytes()
        mime = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self.send_response(200)
        self._cors()
        self.send_header("Content-Type", mime)
        self.send_header("Content-Length", str(len(content)))
        self.end_headers()
        self.wfile.write(content)


class BotHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], service: BotService, static_dir: Path | None):
        super().__init__(address, BotRequestHandler)
        self.service = service
        self.static_dir = static_dir


def make_server(
    service: BotService,
    host: str = "127.0.0.1",
    port: int = 8765,
    static_dir: Path | None = None,
) -> BotHTTPServer:
    return BotHTTPServer((host, port), service, static_dir)


def serve_http(
    config: BotConfig,
    port: int,
    host: str = "0.0.0.0",
    static_dir: Path | None = None,
) -> None:
    """Serve the API until interrupted. Command metrics default off over HTTP."""
    service = BotService(config, allow_commands_default=False)
    server = make_server(service, host=host, port=port, static_dir=static_dir)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
