from .client import HttpOracle, JsonlOracle, ORACLE_URL_ENV, resolve_oracle
from .mock import DEFAULT_KEYWORDS, MockOracle, MockOracleConfig, mock_oracle
from .protocol import (
    EncodeResult,
    MalformedResponseError,
    Oracle,
    OracleError,
    OracleMeta,
    PredictResult,
    PROTOCOL_VERSION,
    RemoteOracleError,
    TransportError,
    VersionMismatchError,
    dispatch,
)
from .server import make_http_server, serve_jsonl, start_http_thread

__all__ = [
    "DEFAULT_KEYWORDS",
    "EncodeResult",
    "HttpOracle",
    "JsonlOracle",
    "MalformedResponseError",
    "MockOracle",
    "MockOracleConfig",
    "ORACLE_URL_ENV",
    "Oracle",
    "OracleError",
    "OracleMeta",
    "PROTOCOL_VERSION",
    "PredictResult",
    "RemoteOracleError",
    "TransportError",
    "VersionMismatchError",
    "dispatch",
    "make_http_server",
    "mock_oracle",
    "resolve_oracle",
    "serve_jsonl",
    "start_http_thread",
]
