"""HTTP facade over the pipeline plus static hosting of the UI bundle.

Endpoints: GET /search, GET /categories, GET and POST /profile,
POST /visit, GET /health; anything else is served from the configured UI
directory. Bodies are JSON with a stable field order. Requests run on a
thread pool; profile writes are serialized by the store, searches read
immutable snapshots.
"""
from __future__ import annotations

import json
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .classify import CategoryAssignment
from .config import PipelineConfig
from .personalize import ProfileError, init_profile, record_visit
from .pipeline import BadRequestError, NoBackendsError, Pipeline

_VISIT_CACHE_LIMIT = 10000

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class ServiceState:
    """Pipeline plus the cache of recently served results, which lets
    /visit resolve a result reference back to its category assignment."""

    def __init__(self, pipeline: Pipeline):
        self.pipeline = pipeline
        self.visit_cache: dict[str, CategoryAssignment] = {}
        self._cache_lock = threading.Lock()

    def remember(self, assignments: dict[str, CategoryAssignment]) -> None:
        with self._cache_lock:
            self.visit_cache.update(assignments)
            while len(self.visit_cache) > _VISIT_CACHE_LIMIT:
                self.visit_cache.pop(next(iter(self.visit_cache)))

    def lookup(self, url: str) -> CategoryAssignment | None:
        with self._cache_lock:
            return self.visit_cache.get(url)


def _taxonomy_tree(taxonomy) -> dict:
    def node(path: str) -> dict:
        cat = taxonomy.get(path)
        return {
            "path": path,
            "title": cat.title,
            "children": [node(child) for child in sorted(taxonomy.children[path])],
        }

    return node(taxonomy.root)


class _Handler(BaseHTTPRequestHandler):
    server_version = "isf/0.1"
    state: ServiceState  # set by make_server

    # --- plumbing -----------------------------------------------------------

    def log_message(self, fmt, *args):
        pass

    def _send(self, status: int, body: str | bytes, content_type="application/json") -> None:
        data = body.encode("utf-8") if isinstance(body, str) else body
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        if data:
            self.wfile.write(data)

    def _send_json(self, status: int, payload: dict) -> None:
        self._send(status, json.dumps(payload, ensure_ascii=False))

    def _error(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    def _read_json_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        return json.loads(raw.decode("utf-8"))

    # --- routing -------------------------------------------------------------

    def do_GET(self):
        parts = urlsplit(self.path)
        params = {k: v[0] for k, v in parse_qs(parts.query).items()}
        route = parts.path
        if route == "/health":
            self._send(200, "ok", content_type="text/plain; charset=utf-8")
        elif route == "/search":
            self._handle_search(params)
        elif route == "/categories":
            self._send(200, json.dumps(_taxonomy_tree(self.state.pipeline.taxonomy),
                                       ensure_ascii=False))
        elif route == "/profile":
            self._handle_profile_get(params)
        else:
            self._handle_static(route)

    def do_POST(self):
        route = urlsplit(self.path).path
        try:
            body = self._read_json_body()
        except (ValueError, UnicodeDecodeError):
            self._error(400, "request body must be JSON")
            return
        if route == "/visit":
            self._handle_visit(body)
        elif route == "/profile":
            self._handle_profile_post(body)
        else:
            self._error(404, "no such endpoint")

    # --- endpoints -----------------------------------------------------------

    def _handle_search(self, params: dict[str, str]) -> None:
        query = params.get("q", "").strip()
        if not query:
            self._error(400, "missing query parameter q")
            return
        k = None
        if "k" in params:
            try:
                k = int(params["k"])
            except ValueError:
                self._error(400, "k must be an integer")
                return
            if k < 1:
                self._error(400, "k must be >= 1")
                return
        cats = [c for c in params.get("cats", "").split(",") if c]
        sources = [s for s in params.get("sources", "").split(",") if s] or None
        try:
            result = self.state.pipeline.run(
                query,
                user_id=params.get("user") or None,
                selected_categories=cats,
                topic=params.get("topic") or None,
                k=k,
                sources=sources,
                token=params.get("token") or None,
            )
        except BadRequestError as exc:
            self._error(400, str(exc))
            return
        except NoBackendsError:
            self._error(503, "no backends available")
            return
        self.state.remember(result.assignments)
        self._send(200, result.response.to_json())

    def _handle_profile_get(self, params: dict[str, str]) -> None:
        user = params.get("user", "").strip()
        if not user:
            self._error(400, "missing query parameter user")
            return
        profile = self.state.pipeline.profiles.load(user)
        self._send(200, profile.to_json())

    def _handle_profile_post(self, body: dict) -> None:
        user = str(body.get("user", "")).strip()
        if not user:
            self._error(400, "missing field user")
            return
        topics = body.get("topics", {})
        if not isinstance(topics, dict):
            self._error(400, "field topics must be an object")
            return
        try:
            pairs = [(path, int(weight)) for path, weight in topics.items()]
            profile = init_profile(user, pairs, self.state.pipeline.taxonomy)
        except (ProfileError, ValueError) as exc:
            self._error(400, str(exc))
            return
        self.state.pipeline.profiles.save(profile)
        self._send(200, profile.to_json())

    def _handle_visit(self, body: dict) -> None:
        user = str(body.get("user", "")).strip()
        url = str(body.get("url", "")).strip()
        if not user or not url:
            self._error(400, "fields user and url are required")
            return
        assignment = self.state.lookup(url)
        if assignment is None:
            self._error(404, f"unknown result reference: {url}")
            return
        taxonomy = self.state.pipeline.taxonomy
        changed: list[str] = []
        self.state.pipeline.profiles.update(
            user, lambda profile: changed.extend(record_visit(profile, assignment, taxonomy))
        )
        if not changed:
            self._send_json(200, {"noop": True})
            return
        self._send(204, b"")

    def _handle_static(self, route: str) -> None:
        ui_dir = self.state.pipeline.config.ui_dir
        if ui_dir is None:
            self._error(404, "no such endpoint")
            return
        rel = route.lstrip("/") or "index.html"
        base = os.path.realpath(ui_dir)
        full = os.path.realpath(os.path.join(base, rel))
        if not full.startswith(base + os.sep) and full != base:
            self._error(404, "no such file")
            return
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            self._error(404, "no such file")
            return
        ext = os.path.splitext(full)[1].lower()
        with open(full, "rb") as fh:
            self._send(200, fh.read(), content_type=_CONTENT_TYPES.get(ext, "application/octet-stream"))


def make_server(pipeline: Pipeline, host: str | None = None, port: int | None = None) -> ThreadingHTTPServer:
    """Bind the service; port 0 picks a free port (server.server_address
    has the real one)."""
    state = ServiceState(pipeline)
    handler = type("Handler", (_Handler,), {"state": state})
    server = ThreadingHTTPServer(
        (host or pipeline.config.host, pipeline.config.port if port is None else port),
        handler,
    )
    server.state = state  # type: ignore[attr-defined]
    return server


def serve(config: PipelineConfig) -> None:
    """Build the pipeline from config and serve until interrupted."""
    pipeline = Pipeline.from_config(config)
    server = make_server(pipeline)
    host, port = server.server_address[:2]
    print(f"isf service listening on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
