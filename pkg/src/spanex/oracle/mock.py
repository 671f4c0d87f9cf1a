"""Deterministic keyword-counting mock oracle.

A stand-in model for tests, demos and golden pipelines: it scores the three
classes by counting per-class keywords in the token pair, and its head 2
(1-based) is the planted "interaction head" whose attention boosts every
keyword-to-keyword link.  All outputs are pure functions of the input tokens —
no RNG, no hashing of interpreter state — so repeated runs are byte-identical.

Construction details (relied on by tests):

* probabilities: strict keyword-count winner gets 0.9, the rest split 0.1;
  ties and keyword-free inputs give the uniform distribution,
* attention head 2: ``raw[i][j] = 1 + [i and j are both keywords]``, rows
  normalized; other heads are uniform ``1/T``.  With fewer keywords than half
  the tokens, the strongest cross-part edge is a keyword pair,
* CLS segment of head 2: per-class keyword counts plus a constant, all
  positive when any keyword is present, all negative otherwise; other head
  segments alternate +/-0.3,
* classifier weights are uniformly 0.25, so the sign-weighted head score is
  +-head_size * 0.25 for head 2 and exactly 0 elsewhere: classifier-weight
  head selection lands on head 2 whenever a keyword occurs (head 1 on the
  lowest-index tie otherwise).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .protocol import EncodeResult, Oracle, OracleError, OracleMeta, PredictResult

DEFAULT_LABELS = ("Entailment", "Neutral", "Contradiction")

DEFAULT_KEYWORDS: dict[str, frozenset[str]] = {
    "Entailment": frozenset({"same", "match", "agree"}),
    "Neutral": frozenset({"maybe", "extra", "unknown"}),
    "Contradiction": frozenset({"opposite", "never", "wrong"}),
}


@dataclass(frozen=True)
class MockOracleConfig:
    labels: tuple[str, ...] = DEFAULT_LABELS
    keywords: dict[str, frozenset[str]] = field(default_factory=lambda: dict(DEFAULT_KEYWORDS))
    head_count: int = 4
    head_size: int = 4
    signal_head: int = 2  # 1-based

    def __post_init__(self) -> None:
        if not 1 <= self.signal_head <= self.head_count:
            raise OracleError(f"signal head {self.signal_head} outside 1..{self.head_count}")
        missing = [lab for lab in self.labels if lab not in self.keywords]
        if missing:
            raise OracleError(f"no keywords configured for labels {missing}")

    @property
    def hidden_size(self) -> int:
        return self.head_count * self.head_size


class MockOracle(Oracle):
    def __init__(self, config: MockOracleConfig | None = None):
        self.config = config or MockOracleConfig()
        self._all_keywords = frozenset().union(*self.config.keywords.values())

    # -- helpers -------------------------------------------------------------

    def _check(self, part1_tokens: list[str], part2_tokens: list[str]) -> list[str]:
        if not part1_tokens or not part2_tokens:
            raise OracleError("both token lists must be non-empty")
        for tok in list(part1_tokens) + list(part2_tokens):
            if not isinstance(tok, str) or not tok:
                raise OracleError(f"tokens must be non-empty strings, got {tok!r}")
        return [t.lower() for t in part1_tokens] + [t.lower() for t in part2_tokens]

    def _class_counts(self, lowered: list[str]) -> np.ndarray:
        return np.array(
            [sum(t in self.config.keywords[lab] for t in lowered) for lab in self.config.labels],
            dtype=float,
        )

    def _probabilities(self, lowered: list[str]) -> tuple[tuple[float, ...], int]:
        counts = self._class_counts(lowered)
        m = len(self.config.labels)
        top = counts.max()
        if top > 0 and (counts == top).sum() == 1:
            winner = int(counts.argmax())
            probs = [0.1 / (m - 1)] * m
            probs[winner] = 0.9
        else:
            winner = 0
            probs = [1.0 / m] * m
        return tuple(probs), winner

    # -- oracle interface ----------------------------------------------------

    def predict(self, part1_tokens: list[str], part2_tokens: list[str]) -> PredictResult:
        lowered = self._check(part1_tokens, part2_tokens)
        probs, winner = self._probabilities(lowered)
        return PredictResult(probabilities=probs, predicted=winner)

    def encode(self, part1_tokens: list[str], part2_tokens: list[str]) -> EncodeResult:
        lowered = self._check(part1_tokens, part2_tokens)
        cfg = self.config
        t = len(lowered)
        kw = np.array([tok in self._all_keywords for tok in lowered], dtype=float)

        attention = np.full((cfg.head_count, t, t), 1.0 / t)
        raw = 1.0 + np.outer(kw, kw)
        attention[cfg.signal_head - 1] = raw / raw.sum(axis=1, keepdims=True)

        counts = self._class_counts(lowered)
        segments = np.empty((cfg.head_count, cfg.head_size))
        alternating = np.array([0.3 * (-1) ** i for i in range(cfg.head_size)])
        for h in range(cfg.head_count):
            segments[h] = alternating
        if kw.any():
            signal = 1.0 + np.concatenate([counts, np.ones(max(0, cfg.head_size - len(counts)))])
            segments[cfg.signal_head - 1] = signal[: cfg.head_size]
        else:
            segments[cfg.signal_head - 1] = -0.2

        probs, winner = self._probabilities(lowered)
        return EncodeResult(
            attention=attention,
            cls=segments.reshape(-1),
            probabilities=probs,
            predicted=winner,
            boundary=len(part1_tokens),
        )

    def meta(self) -> OracleMeta:
        cfg = self.config
        return OracleMeta(
            model="mock-kw-v1",
            labels=cfg.labels,
            head_count=cfg.head_count,
            hidden_size=cfg.hidden_size,
            classifier=np.full((cfg.hidden_size, len(cfg.labels)), 0.25),
        )


def mock_oracle(config: MockOracleConfig | None = None) -> MockOracle:
    """Factory: a deterministic in-process oracle (no network, no model files)."""
    return MockOracle(config or MockOracleConfig())
