"""Choosing the attention head that carries the classification signal.

Two methods, both returning 1-based head indices:

* classifier-weight: split the CLS vector c and the classifier column w for
  the predicted class into per-head segments of size l = n // a; head j
  scores sum_i sign(c[j,i]) * w[j,i].  Per instance, no training.
* scalar-mix: freeze the encoder, learn softmax-normalized mixing weights
  [lambda_1..lambda_a] over the per-head CLS segments together with a small
  linear classifier W' (l x m) by full-batch gradient descent; the model-level
  head is argmax(lambda).

Ties break toward the lowest head index in both methods.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .oracle.protocol import Oracle
from .types import Dataset, SpanexError


class ConfigurationError(SpanexError):
    pass


class DivergenceError(SpanexError):
    pass


def split_heads(vector: np.ndarray, head_count: int) -> np.ndarray:
    """Reshape a flat (n,) vector into per-head segments (a, n // a)."""
    vector = np.asarray(vector, dtype=float)
    n = vector.size
    if head_count < 1 or n % head_count != 0:
        raise ConfigurationError(
            f"hidden size {n} is not divisible by head count {head_count}"
        )
    return vector.reshape(head_count, n // head_count)


def classifier_weight_scores(
    cls: np.ndarray, classifier: np.ndarray, head_count: int, predicted: int
) -> np.ndarray:
    """Per-head sign-weighted contribution scores for the predicted class."""
    classifier = np.asarray(classifier, dtype=float)
    cls = np.asarray(cls, dtype=float)
    if classifier.ndim != 2 or classifier.shape[0] != cls.size:
        raise ConfigurationError(
            f"classifier shape {classifier.shape} does not match CLS size {cls.size}"
        )
    if not 0 <= predicted < classifier.shape[1]:
        raise ConfigurationError(f"predicted class {predicted} outside classifier columns")
    c = split_heads(cls, head_count)
    w = split_heads(classifier[:, predicted], head_count)
    return (np.sign(c) * w).sum(axis=1)


def classifier_weight_head(
    cls: np.ndarray, classifier: np.ndarray, head_count: int, predicted: int
) -> int:
    """1-based index of the highest-scoring head (lowest index wins ties)."""
    scores = classifier_weight_scores(cls, classifier, head_count, predicted)
    return int(np.argmax(scores)) + 1


@dataclass(frozen=True)
class ScalarMixHyper:
    learning_rate: float = 0.1
    epochs: int = 200
    seed: int = 0  # recorded for provenance; training itself is deterministic


@dataclass(frozen=True)
class ScalarMixModel:
    lambdas: np.ndarray  # raw, shape (a,)
    mix_classifier: np.ndarray  # W', shape (l, m)
    final_loss: float

    @property
    def mix_weights(self) -> np.ndarray:
        """softmax(lambdas): the actual mixing coefficients."""
        z = self.lambdas - self.lambdas.max()
        e = np.exp(z)
        return e / e.sum()

    @property
    def head(self) -> int:
        """1-based model-level head (lowest index wins ties)."""
        return int(np.argmax(self.lambdas)) + 1


def _softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def scalar_mix_train(
    segments: np.ndarray, gold: np.ndarray, n_classes: int, hyper: ScalarMixHyper = ScalarMixHyper()
) -> ScalarMixModel:
    """Fit the scalar mix by plain full-batch gradient descent.

    ``segments``: (N, a, l) per-head CLS segments; ``gold``: (N,) class
    indices.  lambda starts uniform (zeros pre-softmax) and W' at zero;
    training is deterministic.  A non-finite loss aborts with a hint that the
    learning rate is too high.
    """
    segments = np.asarray(segments, dtype=float)
    gold = np.asarray(gold, dtype=int)
    if segments.ndim != 3:
        raise ConfigurationError(f"segments must be (N, heads, l), got shape {segments.shape}")
    n, a, l = segments.shape
    if gold.shape != (n,):
        raise ConfigurationError(f"gold labels shape {gold.shape} does not match N={n}")
    if n == 0:
        raise ConfigurationError("cannot fit a scalar mix on an empty batch")
    if gold.min() < 0 or gold.max() >= n_classes:
        raise ConfigurationError("gold label outside class range")

    lam = np.zeros(a)
    w = np.zeros((l, n_classes))
    onehot = np.eye(n_classes)[gold]
    loss = float("nan")
    # Overflow surfaces through the explicit finiteness check below, so the
    # raw numpy warnings on the way there are just noise.
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(hyper.epochs):
            s = _softmax(lam)
            mixed = np.einsum("h,nhl->nl", s, segments)
            logits = mixed @ w
            probs = _softmax(logits, axis=1)
            loss = float(-np.log(np.clip(probs[np.arange(n), gold], 1e-12, None)).mean())
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"scalar-mix loss became non-finite; lower learning_rate={hyper.learning_rate}"
                )
            grad_logits = (probs - onehot) / n
            grad_w = mixed.T @ grad_logits
            grad_mixed = grad_logits @ w.T
            grad_s = np.einsum("nhl,nl->h", segments, grad_mixed)
            grad_lam = s * (grad_s - float(s @ grad_s))
            w = w - hyper.learning_rate * grad_w
            lam = lam - hyper.learning_rate * grad_lam
    return ScalarMixModel(lambdas=lam, mix_classifier=w, final_loss=loss)


def encode_segments(oracle: Oracle, dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Encode every instance: per-head CLS segments plus gold class indices."""
    meta = oracle.meta()
    label_index = {lab: i for i, lab in enumerate(meta.labels)}
    seg_rows, gold = [], []
    for inst in dataset:
        if inst.label.value not in label_index:
            raise ConfigurationError(
                f"instance {inst.id}: label {inst.label.value!r} unknown to the oracle "
                f"(labels: {list(meta.labels)})"
            )
        enc = oracle.encode(list(inst.part1_tokens), list(inst.part2_tokens))
        seg_rows.append(split_heads(enc.cls, meta.head_count))
        gold.append(label_index[inst.label.value])
    return np.stack(seg_rows), np.array(gold, dtype=int)


def scalar_mix_head(
    oracle: Oracle, dataset: Dataset, hyper: ScalarMixHyper = ScalarMixHyper()
) -> ScalarMixModel:
    """Encode the dataset and fit the mix in one go."""
    segments, gold = encode_segments(oracle, dataset)
    return scalar_mix_train(segments, gold, n_classes=len(oracle.meta().labels), hyper=hyper)


def save_scalar_mix(model: ScalarMixModel, hyper: ScalarMixHyper, path: str | Path) -> None:
    payload = {
        "lambdas": model.lambdas.tolist(),
        "mix_classifier": model.mix_classifier.tolist(),
        "final_loss": model.final_loss,
        "hyper": {"learning_rate": hyper.learning_rate, "epochs": hyper.epochs},
        "seed": hyper.seed,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_scalar_mix(path: str | Path) -> tuple[ScalarMixModel, ScalarMixHyper]:
    try:
        obj = json.loads(Path(path).read_text())
        model = ScalarMixModel(
            lambdas=np.asarray(obj["lambdas"], dtype=float),
            mix_classifier=np.asarray(obj["mix_classifier"], dtype=float),
            final_loss=float(obj["final_loss"]),
        )
        hyper = ScalarMixHyper(
            learning_rate=float(obj["hyper"]["learning_rate"]),
            epochs=int(obj["hyper"]["epochs"]),
            seed=int(obj["seed"]),
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"malformed scalar-mix model file {path}: {exc}") from exc
    return model, hyper


METHOD_CLASSIFIER_WEIGHT = "classifier-weight"
METHOD_SCALAR_MIX = "scalar-mix"


def select_head(
    oracle: Oracle,
    instance,
    method: str = METHOD_CLASSIFIER_WEIGHT,
    scalar_mix: ScalarMixModel | None = None,
) -> int:
    """1-based interaction head for one instance.

    classifier-weight scores the instance's own CLS vector; scalar-mix is a
    model-level choice and needs a trained :class:`ScalarMixModel`.
    """
    if method == METHOD_SCALAR_MIX:
        if scalar_mix is None:
            raise ConfigurationError("scalar-mix selection needs a trained ScalarMixModel")
        return scalar_mix.head
    if method != METHOD_CLASSIFIER_WEIGHT:
        raise ConfigurationError(f"unknown head-selection method {method!r}")
    meta = oracle.meta()
    enc = oracle.encode(list(instance.part1_tokens), list(instance.part2_tokens))
    return classifier_weight_head(enc.cls, meta.classifier, meta.head_count, enc.predicted)
