"""Bag-of-tokens softmax classifier trained under the reference protocol:
batch 64, Adam (beta1 0.9, beta2 0.999, eps 1e-8), periodic evaluation
with checkpointing, final model = checkpoint with the highest micro-F1.

The default learning rate (2e-5) mirrors the protocol for encoder-sized
models and is far too timid for a linear model; the CLI's desk profile
raises it to 1e-2. Both land in the run manifest.

Training is bit-deterministic: zero initialization, seeded epoch
shuffles via the frozen PRNG, sequential gradient accumulation.
"""

from __future__ import annotations

import json
import math
import os
import struct
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .corpus_ingest import Report
from .determinism import derive_seed, deterministic_shuffle
from .evaluation import MetricsReport, classwise_report, metrics_to_dict
from .labels import NUM_CLASSES
from .tokenizer import (
    DEFAULT_MAX_SEQUENCE_LENGTH,
    EncodedText,
    Vocabulary,
    encode,
)

FeatureVector = dict[int, float]

# Ids 0-4 are [PAD] [UNK] [CLS] [SEP] [MASK]; they carry no term signal.
_NUM_SPECIALS = 5

DESK_LEARNING_RATE = 1e-2

CHECKPOINT_MAGIC = b"DFCK"
CHECKPOINT_VERSION = 1


class NonFiniteGradientError(RuntimeError):
    """Raised when a gradient goes NaN/inf; training aborts loudly."""


@dataclass
class TrainConfig:
    batch_size: int = 64
    learning_rate: float = 2e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    epochs: int = 5
    eval_every_steps: int = 5000
    seed: int = 0
    tfidf: bool = False
    class_weights: bool = False
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        for name in ("beta1", "beta2"):
            if not 0 <= getattr(self, name) < 1:
                raise ValueError(f"{name} must be in [0, 1)")
        if self.epochs < 1 or self.eval_every_steps < 1:
            raise ValueError("epochs and eval_every_steps must be >= 1")


def desk_config(**overrides) -> TrainConfig:
    """Desk-scale profile: reference protocol with a linear-model LR."""
    return replace(TrainConfig(learning_rate=DESK_LEARNING_RATE), **overrides)


@dataclass
class ModelParams:
    weights: np.ndarray  # (classes, vocab)
    bias: np.ndarray  # (classes,)

    @classmethod
    def zeros(cls, vocab_size: int, num_classes: int = NUM_CLASSES) -> "ModelParams":
        return cls(
            weights=np.zeros((num_classes, vocab_size)),
            bias=np.zeros(num_classes),
        )

    def copy(self) -> "ModelParams":
        return ModelParams(weights=self.weights.copy(), bias=self.bias.copy())


@dataclass
class AdamState:
    m_weights: np.ndarray
    v_weights: np.ndarray
    m_bias: np.ndarray
    v_bias: np.ndarray
    step: int = 0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        return cls(
            m_weights=np.zeros_like(params.weights),
            v_weights=np.zeros_like(params.weights),
            m_bias=np.zeros_like(params.bias),
            v_bias=np.zeros_like(params.bias),
        )


@dataclass
class Checkpoint:
    params: ModelParams
    step: int
    test_metrics: MetricsReport


@dataclass
class HistoryEntry:
    step: int
    loss: float
    f1: float
    precision: float
    recall: float


def featurize(encoded: EncodedText) -> FeatureVector:
    """Term frequencies over the encoded ids, specials excluded."""
    counts: FeatureVector = {}
    for token_id in encoded.ids:
        if token_id >= _NUM_SPECIALS:
            counts[token_id] = counts.get(token_id, 0) + 1
    return counts


def _logits(params: ModelParams, features: FeatureVector) -> np.ndarray:
    logits = params.bias.astype(float).copy()
    if features:
        ids = np.fromiter(features.keys(), dtype=np.int64, count=len(features))
        if ids.max() >= params.weights.shape[1]:
            raise ValueError(
                f"feature id {ids.max()} out of range for vocab size "
                f"{params.weights.shape[1]}"
            )
        values = np.fromiter(features.values(), dtype=np.float64, count=len(features))
        logits += params.weights[:, ids] @ values
    return logits


def forward(params: ModelParams, features: FeatureVector) -> np.ndarray:
    """Class probabilities softmax(Wx + b), max-subtracted for stability."""
    z = _logits(params, features)
    z -= z.max()
    expz = np.exp(z)
    return expz / expz.sum()


def loss_and_grad(
    params: ModelParams,
    batch: Sequence[tuple[FeatureVector, int]],
    class_weights: np.ndarray | None = None,
) -> tuple[float, ModelParams]:
    """Mean cross-entropy over the batch and its analytic gradient.

    With ``class_weights`` the mean is weighted by each example's class
    weight (weighted-mean normalization, so duplicating the batch is
    still a no-op).
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    grad_w = np.zeros_like(params.weights)
    grad_b = np.zeros_like(params.bias)
    total = 0.0
    norm = 0.0
    for features, label in batch:
        weight = float(class_weights[label]) if class_weights is not None else 1.0
        z = _logits(params, features)
        z -= z.max()
        expz = np.exp(z)
        sum_exp = expz.sum()
        total += weight * (math.log(sum_exp) - z[label])
        g = (expz / sum_exp) * weight
        g[label] -= weight
        grad_b += g
        if features:
            ids = np.fromiter(features.keys(), dtype=np.int64, count=len(features))
            values = np.fromiter(
                features.values(), dtype=np.float64, count=len(features)
            )
            grad_w[:, ids] += np.outer(g, values)
        norm += weight
    grad_w /= norm
    grad_b /= norm
    return total / norm, ModelParams(weights=grad_w, bias=grad_b)


def adam_step(
    params: ModelParams,
    grads: ModelParams,
    state: AdamState,
    config: TrainConfig,
) -> tuple[ModelParams, AdamState]:
    """One bias-corrected Adam update; rejects non-finite gradients."""
    if not (np.all(np.isfinite(grads.weights)) and np.all(np.isfinite(grads.bias))):
        raise NonFiniteGradientError(
            f"non-finite gradient at optimizer step {state.step + 1}"
        )
    t = state.step + 1
    b1, b2 = config.beta1, config.beta2
    new_state = AdamState(
        m_weights=b1 * state.m_weights + (1 - b1) * grads.weights,
        v_weights=b2 * state.v_weights + (1 - b2) * grads.weights**2,
        m_bias=b1 * state.m_bias + (1 - b1) * grads.bias,
        v_bias=b2 * state.v_bias + (1 - b2) * grads.bias**2,
        step=t,
    )
    corr1 = 1 - b1**t
    corr2 = 1 - b2**t
    lr = config.learning_rate
    eps = config.epsilon
    new_params = ModelParams(
        weights=params.weights
        - lr * (new_state.m_weights / corr1) / (np.sqrt(new_state.v_weights / corr2) + eps),
        bias=params.bias
        - lr * (new_state.m_bias / corr1) / (np.sqrt(new_state.v_bias / corr2) + eps),
    )
    return new_params, new_state


def _document_frequencies(examples: Sequence[tuple[FeatureVector, int]], vocab_size: int) -> np.ndarray:
    df = np.zeros(vocab_size)
    for features, _ in examples:
        for token_id in features:
            df[token_id] += 1
    return df


def idf_vector(examples: Sequence[tuple[FeatureVector, int]], vocab_size: int) -> np.ndarray:
    """Smoothed idf: ln((1 + N) / (1 + df)) + 1."""
    df = _document_frequencies(examples, vocab_size)
    return np.log((1 + len(examples)) / (1 + df)) + 1


def apply_idf(features: FeatureVector, idf: np.ndarray) -> FeatureVector:
    return {token_id: value * idf[token_id] for token_id, value in features.items()}


def featurize_reports(
    reports: Iterable[Report],
    vocab: Vocabulary,
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH,
) -> list[tuple[FeatureVector, int]]:
    return [
        (featurize(encode(r.text, vocab, max_sequence_length)), r.label)
        for r in reports
    ]


def _balanced_class_weights(labels: Sequence[int]) -> np.ndarray:
    counts = np.bincount(labels, minlength=NUM_CLASSES)
    observed = int((counts > 0).sum())
    weights = np.zeros(NUM_CLASSES)
    nonzero = counts > 0
    weights[nonzero] = len(labels) / (observed * counts[nonzero])
    return weights


def train(
    train_set: Sequence[Report],
    test_set: Sequence[Report],
    vocab: Vocabulary,
    config: TrainConfig,
) -> tuple[Checkpoint, list[HistoryEntry]]:
    """Epoch/batch loop with periodic test-set evaluation.

    Evaluates every ``eval_every_steps`` optimizer steps and at the final
    step; returns the checkpoint with the highest micro-F1 (earliest step
    on ties) plus the full evaluation history.
    """
    train_set = list(train_set)
    test_set = list(test_set)
    if not train_set:
        raise ValueError("train set must be non-empty")
    if not test_set:
        raise ValueError("test set must be non-empty (needed for checkpoint selection)")

    train_examples = featurize_reports(train_set, vocab, config.max_sequence_length)
    test_examples = featurize_reports(test_set, vocab, config.max_sequence_length)
    idf = None
    if config.tfidf:
        idf = idf_vector(train_examples, vocab.size)
        train_examples = [(apply_idf(f, idf), y) for f, y in train_examples]
        test_examples = [(apply_idf(f, idf), y) for f, y in test_examples]
    class_weights = None
    if config.class_weights:
        class_weights = _balanced_class_weights([y for _, y in train_examples])

    params = ModelParams.zeros(vocab.size)
    state = AdamState.zeros_like(params)

    n = len(train_examples)
    batches_per_epoch = math.ceil(n / config.batch_size)
    total_steps = config.epochs * batches_per_epoch
    golds = [y for _, y in test_examples]

    best: Checkpoint | None = None
    history: list[HistoryEntry] = []
    step = 0
    loss_sum = 0.0
    loss_batches = 0

    def evaluate_now() -> None:
        nonlocal best, loss_sum, loss_batches
        preds = [
            int(np.argmax(forward(params, features))) for features, _ in test_examples
        ]
        report = classwise_report(preds, golds)
        mean_loss = loss_sum / loss_batches if loss_batches else float("nan")
        history.append(
            HistoryEntry(
                step=step,
                loss=mean_loss,
                f1=report.micro.f1,
                precision=report.micro.precision,
                recall=report.micro.recall,
            )
        )
        loss_sum = 0.0
        loss_batches = 0
        if best is None or report.micro.f1 > best.test_metrics.micro.f1:
            best = Checkpoint(params=params.copy(), step=step, test_metrics=report)

    for epoch in range(config.epochs):
        order = list(range(n))
        deterministic_shuffle(order, derive_seed(config.seed, "epoch", epoch))
        for start in range(0, n, config.batch_size):
            batch = [train_examples[i] for i in order[start : start + config.batch_size]]
            loss, grads = loss_and_grad(params, batch, class_weights)
            params, state = adam_step(params, grads, state, config)
            step += 1
            loss_sum += loss
            loss_batches += 1
            if step % config.eval_every_steps == 0 and step != total_steps:
                evaluate_now()

    assert step == total_steps
    evaluate_now()
    assert best is not None
    return best, history


def predict(
    params: ModelParams,
    vocab: Vocabulary,
    text: str,
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH,
    idf: np.ndarray | None = None,
) -> tuple[int, np.ndarray]:
    """(argmax class id, probability vector) for one narrative."""
    features = featurize(encode(text, vocab, max_sequence_length))
    if idf is not None:
        features = apply_idf(features, idf)
    probs = forward(params, features)
    return int(np.argmax(probs)), probs


# ---------------------------------------------------------------------------
# Checkpoint container: magic, version, JSON header, raw little-endian f8
# arrays in header order. Optimizer state rides along so runs can resume.
# ---------------------------------------------------------------------------


@dataclass
class LoadedCheckpoint:
    params: ModelParams
    step: int
    config: dict
    metrics: dict
    optimizer: AdamState | None = None
    idf: np.ndarray | None = None


def save_checkpoint(
    path: str | os.PathLike,
    checkpoint: Checkpoint,
    config: TrainConfig,
    optimizer: AdamState | None = None,
    idf: np.ndarray | None = None,
) -> None:
    arrays: list[tuple[str, np.ndarray]] = [
        ("weights", checkpoint.params.weights),
        ("bias", checkpoint.params.bias),
    ]
    if optimizer is not None:
        arrays += [
            ("adam_m_weights", optimizer.m_weights),
            ("adam_v_weights", optimizer.v_weights),
            ("adam_m_bias", optimizer.m_bias),
            ("adam_v_bias", optimizer.v_bias),
        ]
    if idf is not None:
        arrays.append(("idf", idf))
    header = {
        "format_version": CHECKPOINT_VERSION,
        "step": checkpoint.step,
        "optimizer_step": optimizer.step if optimizer is not None else None,
        "num_classes": int(checkpoint.params.weights.shape[0]),
        "vocab_size": int(checkpoint.params.weights.shape[1]),
        "config": asdict(config),
        "metrics": metrics_to_dict(checkpoint.test_metrics),
        "arrays": [
            {"name": name, "shape": list(arr.shape), "dtype": "<f8"}
            for name, arr in arrays
        ],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(CHECKPOINT_MAGIC)
        handle.write(struct.pack("<IQ", CHECKPOINT_VERSION, len(header_bytes)))
        handle.write(header_bytes)
        for _, arr in arrays:
            handle.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path: str | os.PathLike) -> LoadedCheckpoint:
    with open(path, "rb") as handle:
        magic = handle.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file (bad magic {magic!r})")
        version, header_len = struct.unpack("<IQ", handle.read(12))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        header = json.loads(handle.read(header_len).decode("utf-8"))
        loaded: dict[str, np.ndarray] = {}
        for spec in header["arrays"]:
            count = int(np.prod(spec["shape"])) if spec["shape"] else 1
            data = handle.read(count * 8)
            if len(data) != count * 8:
                raise ValueError(f"{path}: truncated array {spec['name']!r}")
            loaded[spec["name"]] = np.frombuffer(data, dtype="<f8").reshape(
                spec["shape"]
            ).copy()
    params = ModelParams(weights=loaded["weights"], bias=loaded["bias"])
    optimizer = None
    if "adam_m_weights" in loaded:
        optimizer = AdamState(
            m_weights=loaded["adam_m_weights"],
            v_weights=loaded["adam_v_weights"],
            m_bias=loaded["adam_m_bias"],
            v_bias=loaded["adam_v_bias"],
            step=header.get("optimizer_step") or 0,
        )
    return LoadedCheckpoint(
        params=params,
        step=header["step"],
        config=header["config"],
        metrics=header["metrics"],
        optimizer=optimizer,
        idf=loaded.get("idf"),
    )
