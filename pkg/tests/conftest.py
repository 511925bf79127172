"""Shared fixtures: tiny corpora and a scriptable local HTTP stub server."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from urllib.parse import parse_qs

import pytest

from corpus_scope.core import Corpus


@pytest.fixture
def tiny_train() -> Corpus:
    return Corpus.from_texts("train", "train", [
        "the battery life is great",
        "I love this phone",
        "sound quality is poor",
        "works fine for the price",
    ])


@pytest.fixture
def tiny_generated() -> Corpus:
    return Corpus.from_texts("generated", "generated", [
        "this phone is amazing",
        "the battery life is great",
        "battery lasts long",
    ])


class StubServer:
    """Local HTTP server whose behavior is a plain callable.

    The handler receives (method, path, body bytes, headers) and returns
    (status, json-serializable body). Requests are recorded for assertions.
    """

    def __init__(self, handler):
        self.handler = handler
        self.requests: list[dict] = []
        stub = self

        class _Handler(BaseHTTPRequestHandler):
            def _serve(self, method):
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                stub.requests.append({
                    "method": method,
                    "path": self.path,
                    "body": body,
                    "headers": dict(self.headers),
                })
                status, payload = stub.handler(method, self.path, body, self.headers)
                data = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_GET(self):
                self._serve("GET")

            def do_POST(self):
                self._serve("POST")

            def log_message(self, *args):
                pass

        self._server = HTTPServer(("127.0.0.1", 0), _Handler)
        self.url = f"http://127.0.0.1:{self._server.server_port}"
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def close(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def stub_server_factory():
    servers = []

    def factory(handler) -> StubServer:
        server = StubServer(handler)
        servers.append(server)
        return server

    yield factory
    for server in servers:
        server.close()


def form_field(body: bytes, name: str) -> str:
    values = parse_qs(body.decode("utf-8"))
    return values[name][0]
