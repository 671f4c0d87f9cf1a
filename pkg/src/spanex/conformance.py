"""Protocol conformance: run the shipped request suite against any backend.

The suite is transport-agnostic — a backend is just a ``respond(op, request)``
callable.  Checks are shape and invariant checks only (schema validity,
row-stochastic attention, geometry consistency, deterministic repeats), never
value comparisons: the same suite must pass for the built-in mock and for any
real checkpoint behind the protocol.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .oracle.protocol import (
    PROTOCOL_VERSION,
    MalformedResponseError,
    OracleError,
    validate_message,
)
from .types import SpanexError

ROW_SUM_TOL = 1e-4

Responder = Callable[[str, dict], dict]


class ConformanceError(SpanexError):
    pass


@dataclass(frozen=True)
class ConformanceRequest:
    id: str
    op: str
    request: dict
    note: str = ""


@dataclass(frozen=True)
class RequestResult:
    id: str
    op: str
    issues: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.issues


@dataclass
class ConformanceReport:
    results: list[RequestResult] = field(default_factory=list)
    repeats_checked: int = 0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failed(self) -> list[RequestResult]:
        return [r for r in self.results if not r.ok]

    def lines(self) -> list[str]:
        out = [
            f"{r.id} {r.op:8s} {'ok' if r.ok else 'FAIL: ' + '; '.join(r.issues)}"
            for r in self.results
        ]
        out.append(
            f"{len(self.results) - len(self.failed)}/{len(self.results)} passed, "
            f"{self.repeats_checked} repeat(s) checked"
        )
        return out


def load_requests(path: str | Path) -> list[ConformanceRequest]:
    obj = json.loads(Path(path).read_text())
    if not isinstance(obj, dict) or "requests" not in obj:
        raise ConformanceError(f"{path}: expected an object with a 'requests' list")
    out = []
    for row in obj["requests"]:
        try:
            out.append(
                ConformanceRequest(
                    id=row["id"], op=row["op"], request=row["request"], note=row.get("note", "")
                )
            )
        except (KeyError, TypeError) as exc:
            raise ConformanceError(f"{path}: malformed request row: {exc}") from exc
    return out


def _check_probabilities(obj: dict, n_labels: int | None, issues: list[str]) -> None:
    probs = obj.get("probabilities", [])
    if n_labels is not None and len(probs) != n_labels:
        issues.append(f"{len(probs)} probabilities for {n_labels} labels")
    if probs:
        total = float(sum(probs))
        if abs(total - 1.0) > ROW_SUM_TOL:
            issues.append(f"probabilities sum to {total:.6f}")
        predicted = obj.get("predicted")
        if isinstance(predicted, int) and 0 <= predicted < len(probs):
            if probs[predicted] < max(probs) - 1e-12:
                issues.append("predicted class is not an argmax of the probabilities")


def _check_encode_geometry(req: dict, obj: dict, meta: dict | None, issues: list[str]) -> None:
    attention = np.asarray(obj.get("attention", []), dtype=float)
    n_tokens = len(req.get("part1_tokens", [])) + len(req.get("part2_tokens", []))
    if attention.ndim != 3 or attention.shape[1] != attention.shape[2]:
        issues.append(f"attention shape {attention.shape} is not (heads, T, T)")
        return
    if attention.shape[1] != n_tokens:
        issues.append(f"attention covers {attention.shape[1]} tokens, request has {n_tokens}")
    row_sums = attention.sum(axis=2)
    worst = float(np.abs(row_sums - 1.0).max()) if row_sums.size else 0.0
    if worst > ROW_SUM_TOL:
        issues.append(f"attention rows off stochastic by {worst:.2e}")
    if obj.get("boundary") != len(req.get("part1_tokens", [])):
        issues.append(f"boundary {obj.get('boundary')} != |part1| {len(req['part1_tokens'])}")
    if meta is not None:
        if attention.shape[0] != meta["head_count"]:
            issues.append(
                f"{attention.shape[0]} attention heads, meta promises {meta['head_count']}"
            )
        if len(obj.get("cls", [])) != meta["hidden_size"]:
            issues.append(f"CLS length {len(obj.get('cls', []))} != hidden {meta['hidden_size']}")


def _check_meta(obj: dict, issues: list[str]) -> None:
    # The architecture identity n = a * l: the hidden size must factor into
    # head_count whole per-head segments.
    if obj["head_count"] < 1 or obj["hidden_size"] % obj["head_count"] != 0:
        issues.append(
            f"hidden {obj['hidden_size']} is not head_count {obj['head_count']}"
            " times a whole head size"
        )
    classifier = np.asarray(obj.get("classifier", []), dtype=float)
    if classifier.shape != (obj["hidden_size"], len(obj["labels"])):
        issues.append(f"classifier shape {classifier.shape} does not match meta geometry")


def check_response(
    request: ConformanceRequest, response: dict, meta: dict | None = None
) -> list[str]:
    """Shape/invariant issues with one response; empty list means conformant."""
    issues: list[str] = []
    if not isinstance(response, dict):
        return [f"response is {type(response).__name__}, not an object"]
    if "error" in response:
        return [f"error response: {response.get('error')}"]
    try:
        validate_message(response, f"{request.op}_response")
    except (MalformedResponseError, OracleError) as exc:
        return [str(exc)]
    if response.get("version") != PROTOCOL_VERSION:
        issues.append(f"version {response.get('version')!r} != {PROTOCOL_VERSION!r}")
    n_labels = meta["n_labels"] if meta else None
    if request.op == "meta":
        _check_meta(response, issues)
    elif request.op == "predict":
        _check_probabilities(response, n_labels, issues)
    elif request.op == "encode":
        _check_probabilities(response, n_labels, issues)
        _check_encode_geometry(request.request, response, meta, issues)
    else:
        issues.append(f"unknown op {request.op!r}")
    return issues


def run_conformance(respond: Responder, requests: Sequence[ConformanceRequest]) -> ConformanceReport:
    """Run the suite; repeated (op, request) pairs must answer byte-identically."""
    meta: dict | None = None
    probe = respond("meta", {"version": PROTOCOL_VERSION})
    if isinstance(probe, dict) and "error" not in probe:
        try:
            validate_message(probe, "meta_response")
            meta = {
                "n_labels": len(probe["labels"]),
                "head_count": probe["head_count"],
                "hidden_size": probe["hidden_size"],
            }
        except MalformedResponseError:
            meta = None  # every per-request check still reports the schema break

    report = ConformanceReport()
    seen: dict[str, str] = {}
    for request in requests:
        response = respond(request.op, request.request)
        issues = check_response(request, response, meta)
        fingerprint = request.op + json.dumps(request.request, sort_keys=True)
        serialized = json.dumps(response, sort_keys=True)
        if fingerprint in seen:
            report.repeats_checked += 1
            if serialized != seen[fingerprint]:
                issues.append("repeat of an earlier request got a different response")
        else:
            seen[fingerprint] = serialized
        report.results.append(RequestResult(id=request.id, op=request.op, issues=tuple(issues)))
    return report


def http_responder(base_url: str, timeout: float = 30.0) -> Responder:
    """A responder speaking the HTTP transport (GET meta, POST the rest)."""
    import requests as _requests

    base = base_url.rstrip("/")

    def respond(op: str, request: dict) -> dict:
        if op == "meta":
            resp = _requests.get(f"{base}/v1/meta", timeout=timeout)
        else:
            resp = _requests.post(f"{base}/v1/{op}", json=request, timeout=timeout)
        return resp.json()

    return respond
