"""Model-oracle wire protocol: message shapes, parsing, dispatch.

The toolkit never loads a model in-process.  Everything it needs from one —
class probabilities, per-head attention over word tokens, the pooled CLS
vector, classifier weights — crosses a small JSON protocol with two
transports: HTTP (``POST /v1/predict``, ``POST /v1/encode``, ``GET /v1/meta``)
and newline-delimited JSON over stdio for spawned subprocess oracles.

Contract highlights (enforced here and in the conformance suite):

* every message carries ``"version"``; a mismatch fails fast,
* attention is word-level and row-stochastic per head (tolerance 1e-4),
* the hidden size n is divisible by the head count a; heads are numbered
  1..a in user-facing fields,
* responses to identical requests are identical (oracles are pure).
"""
from __future__ import annotations

import abc
import json
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from ..types import SpanexError

PROTOCOL_VERSION = "1"

PREDICT_PATH = "/v1/predict"
ENCODE_PATH = "/v1/encode"
META_PATH = "/v1/meta"


class OracleError(SpanexError):
    """Base class for oracle/protocol failures."""


class TransportError(OracleError):
    """The oracle could not be reached (connection, timeout, dead process)."""


class VersionMismatchError(OracleError):
    def __init__(self, got: object):
        super().__init__(
            f"oracle speaks protocol version {got!r}, this client speaks {PROTOCOL_VERSION!r}"
        )


class MalformedResponseError(OracleError):
    """The oracle answered with JSON that violates the protocol schema."""


class RemoteOracleError(OracleError):
    """The oracle answered with an error payload."""

    def __init__(self, error_type: str, message: str):
        self.error_type = error_type
        super().__init__(f"{error_type}: {message}")


@dataclass(frozen=True)
class PredictResult:
    probabilities: tuple[float, ...]
    predicted: int  # 0-based class index

    @property
    def confidence(self) -> float:
        return self.probabilities[self.predicted]


@dataclass(frozen=True)
class EncodeResult:
    attention: np.ndarray  # (head_count, T, T), rows stochastic
    cls: np.ndarray  # (hidden_size,)
    probabilities: tuple[float, ...]
    predicted: int
    boundary: int  # number of part-1 tokens; global indices >= boundary are part 2

    @property
    def head_count(self) -> int:
        return int(self.attention.shape[0])

    @property
    def length(self) -> int:
        return int(self.attention.shape[1])

    def head(self, head: int) -> np.ndarray:
        """Attention matrix of 1-based head ``head``."""
        if not 1 <= head <= self.head_count:
            raise OracleError(f"head {head} out of range 1..{self.head_count}")
        return self.attention[head - 1]


@dataclass(frozen=True)
class OracleMeta:
    model: str
    labels: tuple[str, ...]
    head_count: int
    hidden_size: int
    classifier: np.ndarray  # (hidden_size, len(labels))

    def __post_init__(self) -> None:
        if self.head_count < 1:
            raise OracleError("head_count must be >= 1")
        if self.hidden_size % self.head_count != 0:
            raise OracleError(
                f"hidden size {self.hidden_size} not divisible by head count {self.head_count}"
            )

    @property
    def head_size(self) -> int:
        return self.hidden_size // self.head_count


class Oracle(abc.ABC):
    """What the toolkit requires of a model backend."""

    @abc.abstractmethod
    def predict(self, part1_tokens: list[str], part2_tokens: list[str]) -> PredictResult: ...

    @abc.abstractmethod
    def encode(self, part1_tokens: list[str], part2_tokens: list[str]) -> EncodeResult: ...

    @abc.abstractmethod
    def meta(self) -> OracleMeta: ...


# --- wire helpers -----------------------------------------------------------

def _schema() -> dict:
    text = resources.files("spanex").joinpath("schemas/oracle_protocol.schema.json").read_text()
    return json.loads(text)


_SCHEMA = _schema()
_VALIDATORS = {
    name: jsonschema.Draft202012Validator({"$ref": f"#/$defs/{name}", "$defs": _SCHEMA["$defs"]})
    for name in _SCHEMA["$defs"]
}


def validate_message(obj: object, kind: str) -> None:
    """Validate a wire message against one of the schema's $defs entries."""
    try:
        validator = _VALIDATORS[kind]
    except KeyError:
        raise OracleError(f"unknown message kind {kind!r}") from None
    errors = list(validator.iter_errors(obj))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        pointer = "/" + "/".join(str(p) for p in best.absolute_path)
        raise MalformedResponseError(f"{kind} message invalid at {pointer}: {best.message}")


def _check_version(obj: dict) -> None:
    if obj.get("version") != PROTOCOL_VERSION:
        raise VersionMismatchError(obj.get("version"))


def _raise_if_error(obj: dict) -> None:
    if isinstance(obj, dict) and "error" in obj:
        validate_message(obj, "error_response")
        err = obj["error"]
        raise RemoteOracleError(err["type"], err["message"])


def build_predict_request(part1_tokens: list[str], part2_tokens: list[str]) -> dict:
    return {
        "version": PROTOCOL_VERSION,
        "part1_tokens": list(part1_tokens),
        "part2_tokens": list(part2_tokens),
    }


build_encode_request = build_predict_request


def parse_predict_response(obj: dict) -> PredictResult:
    _raise_if_error(obj)
    _check_version(obj)
    validate_message(obj, "predict_response")
    return PredictResult(
        probabilities=tuple(float(p) for p in obj["probabilities"]),
        predicted=int(obj["predicted"]),
    )


def parse_encode_response(obj: dict) -> EncodeResult:
    _raise_if_error(obj)
    _check_version(obj)
    validate_message(obj, "encode_response")
    attention = np.asarray(obj["attention"], dtype=float)
    cls = np.asarray(obj["cls"], dtype=float)
    if attention.ndim != 3 or attention.shape[1] != attention.shape[2]:
        raise MalformedResponseError(f"attention must be (heads, T, T), got shape {attention.shape}")
    boundary = int(obj["boundary"])
    if not 0 < boundary < attention.shape[1]:
        raise MalformedResponseError(
            f"boundary {boundary} outside token range 1..{attention.shape[1] - 1}"
        )
    return EncodeResult(
        attention=attention,
        cls=cls,
        probabilities=tuple(float(p) for p in obj["probabilities"]),
        predicted=int(obj["predicted"]),
        boundary=boundary,
    )


def parse_meta_response(obj: dict) -> OracleMeta:
    _raise_if_error(obj)
    _check_version(obj)
    validate_message(obj, "meta_response")
    classifier = np.asarray(obj["classifier"], dtype=float)
    meta = OracleMeta(
        model=obj["model"],
        labels=tuple(obj["labels"]),
        head_count=int(obj["head_count"]),
        hidden_size=int(obj["hidden_size"]),
        classifier=classifier,
    )
    if classifier.shape != (meta.hidden_size, len(meta.labels)):
        raise MalformedResponseError(
            f"classifier shape {classifier.shape} != ({meta.hidden_size}, {len(meta.labels)})"
        )
    return meta


def predict_response_to_dict(result: PredictResult) -> dict:
    return {
        "version": PROTOCOL_VERSION,
        "probabilities": list(result.probabilities),
        "predicted": result.predicted,
    }


def encode_response_to_dict(result: EncodeResult) -> dict:
    return {
        "version": PROTOCOL_VERSION,
        "attention": result.attention.tolist(),
        "cls": result.cls.tolist(),
        "probabilities": list(result.probabilities),
        "predicted": result.predicted,
        "boundary": result.boundary,
    }


def meta_response_to_dict(meta: OracleMeta) -> dict:
    return {
        "version": PROTOCOL_VERSION,
        "model": meta.model,
        "labels": list(meta.labels),
        "head_count": meta.head_count,
        "hidden_size": meta.hidden_size,
        "classifier": meta.classifier.tolist(),
    }


def error_response(error_type: str, message: str) -> dict:
    return {
        "version": PROTOCOL_VERSION,
        "error": {"type": error_type, "message": message},
    }


def dispatch(oracle: Oracle, op: str, request: dict) -> dict:
    """Serve one request dict against a local oracle; never raises."""
    try:
        if request.get("version") != PROTOCOL_VERSION:
            return error_response(
                "version-mismatch",
                f"server speaks {PROTOCOL_VERSION!r}, request carries {request.get('version')!r}",
            )
        if op == "meta":
            return meta_response_to_dict(oracle.meta())
        if op in ("predict", "encode"):
            try:
                validate_message(request, "pair_request")
            except MalformedResponseError as exc:
                return error_response("bad-request", str(exc))
            p1 = request["part1_tokens"]
            p2 = request["part2_tokens"]
            if op == "predict":
                return predict_response_to_dict(oracle.predict(p1, p2))
            return encode_response_to_dict(oracle.encode(p1, p2))
        return error_response("bad-request", f"unknown operation {op!r}")
    except OracleError as exc:
        return error_response("bad-request", str(exc))
    except Exception as exc:  # pragma: no cover - defensive
        return error_response("internal", f"{type(exc).__name__}: {exc}")
