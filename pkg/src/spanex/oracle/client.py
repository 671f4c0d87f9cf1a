"""Oracle clients: HTTP, spawned stdio-JSONL subprocess, and spec strings.

An oracle spec string picks the transport:

* ``mock`` — the in-process keyword mock,
* ``http://host:port`` / ``https://...`` — the HTTP transport,
* ``jsonl:<command>`` — spawn ``<command>`` (shell syntax) and speak
  newline-delimited JSON over its stdin/stdout.

``resolve_oracle(None)`` falls back to the ``SPANEX_ORACLE_URL`` environment
variable.
"""
from __future__ import annotations

import json
import os
import shlex
import subprocess
import threading

import requests

from .mock import MockOracle
from .protocol import (
    ENCODE_PATH,
    META_PATH,
    PREDICT_PATH,
    PROTOCOL_VERSION,
    EncodeResult,
    MalformedResponseError,
    Oracle,
    OracleError,
    OracleMeta,
    PredictResult,
    TransportError,
    build_encode_request,
    build_predict_request,
    parse_encode_response,
    parse_meta_response,
    parse_predict_response,
)

ORACLE_URL_ENV = "SPANEX_ORACLE_URL"


class HttpOracle(Oracle):
    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def _request(self, method: str, path: str, body: dict | None) -> dict:
        url = self.base_url + path
        try:
            if method == "GET":
                resp = requests.get(url, timeout=self.timeout)
            else:
                resp = requests.post(url, json=body, timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"oracle at {self.base_url} unreachable: {exc}") from exc
        try:
            return resp.json()
        except ValueError as exc:
            raise MalformedResponseError(
                f"non-JSON response (HTTP {resp.status_code}) from {url}"
            ) from exc

    def predict(self, part1_tokens: list[str], part2_tokens: list[str]) -> PredictResult:
        body = build_predict_request(part1_tokens, part2_tokens)
        return parse_predict_response(self._request("POST", PREDICT_PATH, body))

    def encode(self, part1_tokens: list[str], part2_tokens: list[str]) -> EncodeResult:
        body = build_encode_request(part1_tokens, part2_tokens)
        return parse_encode_response(self._request("POST", ENCODE_PATH, body))

    def meta(self) -> OracleMeta:
        return parse_meta_response(self._request("GET", META_PATH, None))


class JsonlOracle(Oracle):
    """Speaks the protocol to a spawned subprocess, one JSON object per line."""

    def __init__(self, command: str):
        self.command = command
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise TransportError(f"cannot spawn oracle {command!r}: {exc}") from exc
        self._lock = threading.Lock()
        self._next_id = 0

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def __enter__(self) -> "JsonlOracle":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _roundtrip(self, op: str, fields: dict) -> dict:
        with self._lock:
            self._next_id += 1
            req_id = self._next_id
            request = {"version": PROTOCOL_VERSION, "id": req_id, "op": op, **fields}
            if self._proc.poll() is not None:
                raise TransportError(f"oracle process exited with code {self._proc.returncode}")
            assert self._proc.stdin is not None and self._proc.stdout is not None
            try:
                self._proc.stdin.write(json.dumps(request) + "\n")
                self._proc.stdin.flush()
                line = self._proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise TransportError(f"oracle process pipe broke: {exc}") from exc
            if not line:
                raise TransportError("oracle process closed its stdout")
            try:
                response = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedResponseError(f"non-JSON line from oracle: {line!r}") from exc
            if response.get("id") != req_id:
                raise MalformedResponseError(
                    f"response id {response.get('id')!r} does not match request id {req_id!r}"
                )
            return response

    def predict(self, part1_tokens: list[str], part2_tokens: list[str]) -> PredictResult:
        fields = build_predict_request(part1_tokens, part2_tokens)
        return parse_predict_response(self._roundtrip("predict", fields))

    def encode(self, part1_tokens: list[str], part2_tokens: list[str]) -> EncodeResult:
        fields = build_encode_request(part1_tokens, part2_tokens)
        return parse_encode_response(self._roundtrip("encode", fields))

    def meta(self) -> OracleMeta:
        return parse_meta_response(self._roundtrip("meta", {}))


def resolve_oracle(spec: str | None) -> Oracle:
    """Build an oracle from a spec string or ``SPANEX_ORACLE_URL``."""
    if spec is None:
        spec = os.environ.get(ORACLE_URL_ENV)
    if not spec:
        raise OracleError(
            f"no oracle configured: pass --oracle or set {ORACLE_URL_ENV} "
            "(e.g. 'mock', 'http://localhost:8414', 'jsonl:python -m spanex.oracle.server --stdio')"
        )
    if spec == "mock":
        return MockOracle()
    if spec.startswith(("http://", "https://")):
        return HttpOracle(spec)
    if spec.startswith("jsonl:"):
        return JsonlOracle(spec[len("jsonl:") :])
    raise OracleError(f"unrecognized oracle spec {spec!r}")
