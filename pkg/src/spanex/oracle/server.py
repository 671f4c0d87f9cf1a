"""Reference oracle server for both transports.

``python -m spanex.oracle.server --port 8414`` serves the mock oracle over
HTTP; ``--stdio`` speaks newline-delimited JSON on stdin/stdout instead
(the transport the ``jsonl:`` client spec spawns).
"""
from __future__ import annotations

import argparse
import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import IO

from .mock import MockOracle
from .protocol import (
    ENCODE_PATH,
    META_PATH,
    PREDICT_PATH,
    PROTOCOL_VERSION,
    Oracle,
    dispatch,
    error_response,
)

_OP_BY_PATH = {PREDICT_PATH: "predict", ENCODE_PATH: "encode"}


def _status_for(response: dict) -> int:
    if "error" not in response:
        return 200
    return 500 if response["error"]["type"] == "internal" else 400


def make_http_server(oracle: Oracle, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def _send(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self) -> None:
            if self.path != META_PATH:
                self._send(404, error_response("bad-request", f"unknown path {self.path}"))
                return
            response = dispatch(oracle, "meta", {"version": PROTOCOL_VERSION})
            self._send(_status_for(response), response)

        def do_POST(self) -> None:
            op = _OP_BY_PATH.get(self.path)
            if op is None:
                self._send(404, error_response("bad-request", f"unknown path {self.path}"))
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                request = json.loads(self.rfile.read(length) or b"{}")
            except (ValueError, json.JSONDecodeError):
                self._send(400, error_response("bad-request", "request body is not valid JSON"))
                return
            response = dispatch(oracle, op, request)
            self._send(_status_for(response), response)

        def log_message(self, *args) -> None:  # quiet by default
            pass

    return ThreadingHTTPServer((host, port), Handler)


def start_http_thread(oracle: Oracle, host: str = "127.0.0.1", port: int = 0) -> tuple[ThreadingHTTPServer, str]:
    """Serve in a daemon thread; returns (server, base_url). Caller shuts down."""
    server = make_http_server(oracle, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, f"http://{server.server_address[0]}:{server.server_address[1]}"


def serve_jsonl(oracle: Oracle, in_stream: IO[str], out_stream: IO[str]) -> None:
    """One JSON request per line in, one JSON response per line out."""
    for line in in_stream:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            response = error_response("bad-request", "line is not valid JSON")
            response["id"] = None
        else:
            op = request.get("op")
            response = dispatch(oracle, op if isinstance(op, str) else "?", request)
            response["id"] = request.get("id")
        out_stream.write(json.dumps(response) + "\n")
        out_stream.flush()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Serve the mock oracle.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8414)
    parser.add_argument("--stdio", action="store_true", help="serve JSONL on stdin/stdout instead of HTTP")
    args = parser.parse_args(argv)
    oracle = MockOracle()
    if args.stdio:
        serve_jsonl(oracle, sys.stdin, sys.stdout)
        return 0
    server = make_http_server(oracle, args.host, args.port)
    print(f"serving mock oracle on http://{args.host}:{server.server_address[1]}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main())
