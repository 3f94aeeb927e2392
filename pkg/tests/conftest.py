import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest


class LocalSite:
    """Tiny in-process HTTP server backing crawler and service tests.

    pages maps a path ("/p0") to an HTML or text body; requests are logged
    with timestamps so politeness can be asserted.
    """

    def __init__(self, pages: dict[str, str], robots: str | None = None):
        self.pages = dict(pages)
        self.robots = robots
        self.request_log: list[tuple[float, str]] = []
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    def start(self) -> "LocalSite":
        site = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):
                pass

            def do_GET(self):
                site.request_log.append((time.monotonic(), self.path))
                if self.path == "/robots.txt":
                    if site.robots is None:
                        self.send_error(404)
                        return
                    body = site.robots.encode("utf-8")
                    self.send_response(200)
                    self.send_header("Content-Type", "text/plain")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
                body = site.pages.get(self.path)
                if body is None:
                    self.send_error(404)
                    return
                data = body.encode("utf-8")
                ctype = "text/plain" if self.path.endswith(".txt") else "text/html"
                self.send_response(200)
                self.send_header("Content-Type", f"{ctype}; charset=utf-8")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    @property
    def port(self) -> int:
        assert self._server is not None
        return self._server.server_address[1]

    def url(self, path: str, host: str = "localhost") -> str:
        return f"http://{host}:{self.port}{path}"

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


@pytest.fixture
def local_site():
    sites = []

    def factory(pages, robots=None) -> LocalSite:
        site = LocalSite(pages, robots=robots).start()
        sites.append(site)
        return site

    yield factory
    for site in sites:
        site.stop()


def page(title: str, links: list[str] = (), text: str = "") -> str:
    anchors = "".join(f'<a href="{href}">link</a> ' for href in links)
    return (
        f"<html><head><title>{title}</title>"
        f"<script>var ignored = 1;</script></head>"
        f"<body><p>{text}</p>{anchors}</body></html>"
    )
