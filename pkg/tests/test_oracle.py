"""Mock oracle construction, wire protocol, HTTP/JSONL transports."""
import io
import json

import numpy as np
import pytest

from spanex.oracle import HttpOracle, MockOracle, MockOracleConfig, mock_oracle, resolve_oracle
from spanex.oracle.protocol import (
    MalformedResponseError,
    OracleError,
    PROTOCOL_VERSION,
    RemoteOracleError,
    VersionMismatchError,
    build_predict_request,
    dispatch,
    encode_response_to_dict,
    parse_encode_response,
    parse_predict_response,
    validate_message,
)
from spanex.oracle.server import serve_jsonl, start_http_thread


# --- probability rule ------------------------------------------------------


def test_strict_winner_gets_090():
    res = mock_oracle().predict(["they", "agree"], ["all", "agree"])
    assert res.predicted == 0
    assert res.probabilities == (0.9, 0.05, 0.05)
    assert res.confidence == 0.9


def test_tie_and_no_keyword_go_uniform():
    o = mock_oracle()
    tie = o.predict(["agree"], ["never"])  # one E keyword, one C keyword
    assert tie.predicted == 0
    assert tie.probabilities == (1 / 3, 1 / 3, 1 / 3)
    none = o.predict(["plain"], ["words"])
    assert none.probabilities == (1 / 3, 1 / 3, 1 / 3)


def test_keyword_matching_is_case_insensitive():
    res = mock_oracle().predict(["NEVER"], ["ever"])
    assert res.predicted == 2


# --- encode ----------------------------------------------------------------


def test_attention_shapes_and_row_stochasticity():
    enc = mock_oracle().encode(["kids", "match"], ["children", "match"])
    a = enc.attention
    assert a.shape == (4, 4, 4)
    assert np.allclose(a.sum(axis=2), 1.0)
    assert enc.boundary == 2
    assert enc.head_count == 4
    assert enc.length == 4


def test_signal_head_favors_keyword_pairs():
    # T=4, K=2 keywords ("match" twice): keyword rows put 2/(T+K) on
    # keywords and 1/(T+K) elsewhere; non-keyword rows are uniform.
    enc = mock_oracle().encode(["kids", "match"], ["children", "match"])
    h2 = enc.head(2)
    assert h2[1, 3] == pytest.approx(2 / 6)
    assert h2[1, 2] == pytest.approx(1 / 6)
    assert np.allclose(h2[0], 0.25)
    # Other heads stay uniform.
    assert np.allclose(enc.head(1), 0.25)
    assert np.allclose(enc.head(4), 0.25)


def test_cls_segments():
    cfg = MockOracleConfig()
    enc = mock_oracle().encode(["agree", "agree"], ["maybe"])
    seg = enc.cls.reshape(cfg.head_count, cfg.head_size)
    # Head 2 segment: 1 + (counts E=2, N=1, C=0, pad 1) = [3, 2, 1, 2].
    assert seg[1].tolist() == [3.0, 2.0, 1.0, 2.0]
    for h in (0, 2, 3):
        assert seg[h].tolist() == [0.3, -0.3, 0.3, -0.3]
    # Keyword-free input flips the signal segment negative.
    enc0 = mock_oracle().encode(["plain"], ["words"])
    seg0 = enc0.cls.reshape(cfg.head_count, cfg.head_size)
    assert (seg0[1] == -0.2).all()


def test_encode_is_deterministic():
    o = mock_oracle()
    a = o.encode(["kids", "match"], ["children", "match"])
    b = o.encode(["kids", "match"], ["children", "match"])
    assert np.array_equal(a.attention, b.attention)
    assert np.array_equal(a.cls, b.cls)
    assert a.probabilities == b.probabilities


def test_meta_shape():
    meta = mock_oracle().meta()
    assert meta.model == "mock-kw-v1"
    assert meta.labels == ("Entailment", "Neutral", "Contradiction")
    assert meta.head_count == 4
    assert meta.hidden_size == 16
    assert meta.head_size == 4
    assert meta.classifier.shape == (16, 3)
    assert (meta.classifier == 0.25).all()


def test_input_validation():
    o = mock_oracle()
    with pytest.raises(OracleError):
        o.predict([], ["x"])
    with pytest.raises(OracleError):
        o.predict(["x"], [""])
    with pytest.raises(OracleError):
        o.encode(["x"], [3])  # type: ignore[list-item]


def test_config_validation():
    with pytest.raises(OracleError):
        MockOracleConfig(signal_head=9)
    with pytest.raises(OracleError):
        MockOracleConfig(labels=("A", "B"), keywords={"A": frozenset({"x"})})


# --- wire protocol ---------------------------------------------------------


def test_validate_message_accepts_real_messages(oracle):
    req = build_predict_request(["a"], ["b"])
    validate_message(req, "pair_request")
    enc = oracle.encode(["kids", "match"], ["children", "match"])
    validate_message(encode_response_to_dict(enc), "encode_response")


def test_validate_message_rejects_wrong_shapes():
    with pytest.raises(MalformedResponseError):
        validate_message({"version": PROTOCOL_VERSION, "part1_tokens": "abc"}, "pair_request")
    with pytest.raises(MalformedResponseError):
        validate_message({"nonsense": True}, "predict_response")
    with pytest.raises(OracleError):
        validate_message({}, "no_such_kind")


def test_parse_rejects_version_mismatch():
    with pytest.raises(VersionMismatchError):
        parse_predict_response({"version": "2", "probabilities": [1.0], "predicted": 0})


def test_parse_surfaces_remote_errors():
    with pytest.raises(RemoteOracleError) as err:
        parse_predict_response(
            {"version": PROTOCOL_VERSION, "error": {"type": "bad-request", "message": "nope"}}
        )
    assert err.value.error_type == "bad-request"


def test_parse_encode_validates_geometry(oracle):
    good = encode_response_to_dict(oracle.encode(["a", "agree"], ["b"]))
    bad = dict(good, boundary=5)
    with pytest.raises(MalformedResponseError):
        parse_encode_response(bad)


def test_dispatch_routes_and_never_raises(oracle):
    meta = dispatch(oracle, "meta", {"version": PROTOCOL_VERSION})
    assert meta["model"] == "mock-kw-v1"
    pred = dispatch(oracle, "predict", build_predict_request(["agree"], ["agree"]))
    assert pred["predicted"] == 0
    bad_version = dispatch(oracle, "predict", {"version": "0"})
    assert bad_version["error"]["type"] == "version-mismatch"
    unknown = dispatch(oracle, "teleport", {"version": PROTOCOL_VERSION})
    assert unknown["error"]["type"] == "bad-request"
    empty = dispatch(oracle, "predict", build_predict_request([], ["x"]))
    assert "error" in empty


# --- transports ------------------------------------------------------------


def test_http_round_trip():
    server, url = start_http_thread(MockOracle())
    try:
        remote = HttpOracle(url)
        local = mock_oracle()
        assert remote.meta().model == local.meta().model
        r, l = (
            remote.predict(["kids", "agree"], ["children", "agree"]),
            local.predict(["kids", "agree"], ["children", "agree"]),
        )
        assert r.probabilities == l.probabilities and r.predicted == l.predicted
        re_, le = (
            remote.encode(["kids", "agree"], ["children", "agree"]),
            local.encode(["kids", "agree"], ["children", "agree"]),
        )
        assert np.allclose(re_.attention, le.attention)
        assert np.allclose(re_.cls, le.cls)
        assert re_.boundary == le.boundary
        with pytest.raises(RemoteOracleError):
            remote.predict([], ["x"])
    finally:
        server.shutdown()


def test_jsonl_round_trip():
    lines = [
        json.dumps({"id": 1, "op": "meta", "version": PROTOCOL_VERSION}),
        json.dumps(
            {
                "id": 2,
                "op": "predict",
                "version": PROTOCOL_VERSION,
                "part1_tokens": ["never"],
                "part2_tokens": ["ever"],
            }
        ),
        "not json at all",
    ]
    out = io.StringIO()
    serve_jsonl(mock_oracle(), io.StringIO("\n".join(lines) + "\n"), out)
    responses = [json.loads(l) for l in out.getvalue().splitlines()]
    assert responses[0]["id"] == 1 and responses[0]["model"] == "mock-kw-v1"
    assert responses[1]["id"] == 2 and responses[1]["predicted"] == 2
    assert responses[2]["id"] is None and responses[2]["error"]["type"] == "bad-request"


def test_resolve_oracle(monkeypatch):
    assert isinstance(resolve_oracle("mock"), MockOracle)
    assert isinstance(resolve_oracle("http://localhost:1"), HttpOracle)
    monkeypatch.delenv("SPANEX_ORACLE_URL", raising=False)
    with pytest.raises(OracleError):
        resolve_oracle(None)
    monkeypatch.setenv("SPANEX_ORACLE_URL", "mock")
    assert isinstance(resolve_oracle(None), MockOracle)
    with pytest.raises(OracleError):
        resolve_oracle("carrier-pigeon:coop")
