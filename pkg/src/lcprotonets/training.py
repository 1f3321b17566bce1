"""Episodic training of a linear embedding adapter.

The backbone that produced the input embeddings stays frozen; only a
single linear map (weight + bias) is learned, mirroring a last-layer
fine-tuning regime. The loss is binary cross-entropy between the expanded
multi-hot targets over LC-classes and sigmoid(-distance), and its gradient
is taken analytically through both the query embeddings and the prototype
means, which also depend on the adapter.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from .episodes import Episode, EpisodeSpec, LabelSplit, sample_episode
from .errors import InsufficientLabelsError, NonFiniteError
from .items import EmbeddedItem, stack_embeddings
from .labels import LabelVocabulary, expand_multi_hot, lc_classes
from .metrics import PredictionBatch, macro_f1
from .prototypes import (
    LCPrototypeStore,
    build_store,
    class_memberships,
    classify_batch,
    distance_matrix,
)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


@dataclass
class AdapterState:
    """Linear adapter parameters plus Adam moment buffers."""

    weight: np.ndarray
    bias: np.ndarray
    m_weight: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    v_weight: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    m_bias: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    v_bias: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    step: int = 0

    def __post_init__(self):
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weight.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("adapter needs a 2-D weight and a 1-D bias")
        if self.bias.shape[0] != self.weight.shape[1]:
            raise ValueError(
                f"bias length {self.bias.shape[0]} does not match weight "
                f"output dimension {self.weight.shape[1]}"
            )
        if not (np.all(np.isfinite(self.weight)) and np.all(np.isfinite(self.bias))):
            raise NonFiniteError("adapter parameters must be finite")
        if self.m_weight is None:
            self.m_weight = np.zeros_like(self.weight)
            self.v_weight = np.zeros_like(self.weight)
            self.m_bias = np.zeros_like(self.bias)
            self.v_bias = np.zeros_like(self.bias)

    @classmethod
    def identity(cls, dimension: int) -> "AdapterState":
        """Square adapter that reproduces the frozen pipeline exactly."""
        return cls(np.eye(dimension), np.zeros(dimension))

    @classmethod
    def random(cls, d_in: int, d_out: int, rng: np.random.Generator) -> "AdapterState":
        scale = 1.0 / math.sqrt(d_in)
        return cls(rng.normal(0.0, scale, size=(d_in, d_out)), np.zeros(d_out))

    @property
    def d_in(self) -> int:
        return self.weight.shape[0]

    @property
    def d_out(self) -> int:
        return self.weight.shape[1]

    def apply(self, embeddings: np.ndarray) -> np.ndarray:
        X = np.asarray(embeddings, dtype=np.float64)
        if X.shape[-1] != self.d_in:
            raise ValueError(
                f"adapter expects dimension {self.d_in}, got {X.shape[-1]}"
            )
        return X @ self.weight + self.bias

    def snapshot(self) -> "AdapterState":
        return AdapterState(
            weight=self.weight.copy(), bias=self.bias.copy(),
            m_weight=self.m_weight.copy(), v_weight=self.v_weight.copy(),
            m_bias=self.m_bias.copy(), v_bias=self.v_bias.copy(),
            step=self.step,
        )


def adam_step(state: AdapterState, grad_w: np.ndarray, grad_b: np.ndarray,
              learning_rate: float) -> None:
    """One in-place Adam update with bias-corrected moments."""
    state.step += 1
    t = state.step
    state.m_weight = ADAM_BETA1 * state.m_weight + (1 - ADAM_BETA1) * grad_w
    state.v_weight = ADAM_BETA2 * state.v_weight + (1 - ADAM_BETA2) * grad_w ** 2
    state.m_bias = ADAM_BETA1 * state.m_bias + (1 - ADAM_BETA1) * grad_b
    state.v_bias = ADAM_BETA2 * state.v_bias + (1 - ADAM_BETA2) * grad_b ** 2
    c1 = 1 - ADAM_BETA1 ** t
    c2 = 1 - ADAM_BETA2 ** t
    state.weight = state.weight - learning_rate * (state.m_weight / c1) / (
        np.sqrt(state.v_weight / c2) + ADAM_EPSILON)
    state.bias = state.bias - learning_rate * (state.m_bias / c1) / (
        np.sqrt(state.v_bias / c2) + ADAM_EPSILON)


def binary_cross_entropy_matrix(logits: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Elementwise BCE from logits, never materializing the sigmoid.

    max(t,0) - t*z + log(1+exp(-|t|)) equals -z*log(sigma(t)) -
    (1-z)*log(1-sigma(t)) but stays finite for any t.
    """
    t = logits
    return np.maximum(t, 0.0) - t * targets + np.log1p(np.exp(-np.abs(t)))


def episode_loss(query_items: Sequence[EmbeddedItem],
                 store: LCPrototypeStore) -> float:
    """Mean BCE between expanded multi-hot targets and sigmoid(-distance)."""
    if not query_items:
        raise ValueError("episode_loss requires at least one query item")
    Q = stack_embeddings(query_items)
    distances = distance_matrix(Q, store)
    targets = np.stack([
        expand_multi_hot(it.labels, store.classes).astype(np.float64)
        for it in query_items
    ])
    loss = float(binary_cross_entropy_matrix(-distances, targets).mean())
    if not math.isfinite(loss):
        raise NonFiniteError("episode loss is not finite")
    return loss


def loss_gradient(adapter: AdapterState, episode: Episode
                  ) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss and its exact gradient w.r.t. the adapter weight and bias.

    The adapter shapes both sides of every distance: query embeddings
    directly, prototypes through the support means. Both paths are
    differentiated; d(1-cos(u,v))/du = cos*u/|u|^2 - v/(|u||v|), and the
    prototype gradient spreads uniformly over the class members.
    """
    Xs = stack_embeddings(episode.support)
    Xq = stack_embeddings(episode.query)
    Es = adapter.apply(Xs)
    Eq = adapter.apply(Xq)

    support_labels = [it.labels for it in episode.support]
    classes = lc_classes(support_labels)
    memberships = class_memberships(classes, support_labels)
    P = np.stack([Es[list(m)].mean(axis=0) for m in memberships])
    Z = np.stack([
        expand_multi_hot(it.labels, classes).astype(np.float64)
        for it in episode.query
    ])

    qn = np.linalg.norm(Eq, axis=1)
    pn = np.linalg.norm(P, axis=1)
    if np.any(qn == 0.0) or np.any(pn == 0.0):
        raise NonFiniteError("adapter collapsed an embedding to zero norm")
    # Raw cosine (no clipping): keeps the gradient exact everywhere.
    inv = 1.0 / np.outer(qn, pn)
    C = (Eq @ P.T) * inv
    D = 1.0 - C
    loss = float(binary_cross_entropy_matrix(-D, Z).mean())

    n_q, n_classes = D.shape
    # dLoss/dD, including the 1/(n_q*|L|) of the mean reduction.
    Gd = (Z - expit(-D)) / (n_q * n_classes)
    A = Gd * C
    GdInv = Gd * inv
    GEq = Eq * (A.sum(axis=1) / qn ** 2)[:, None] - GdInv @ P
    GP = P * (A.sum(axis=0) / pn ** 2)[:, None] - GdInv.T @ Eq
    GEs = np.zeros_like(Es)
    for j, members in enumerate(memberships):
        GEs[list(members)] += GP[j] / len(members)

    grad_w = Xq.T @ GEq + Xs.T @ GEs
    grad_b = GEq.sum(axis=0) + GEs.sum(axis=0)
    if not (math.isfinite(loss) and np.all(np.isfinite(grad_w))
            and np.all(np.isfinite(grad_b))):
        raise NonFiniteError("loss gradient is not finite")
    return loss, grad_w, grad_b


@dataclass(frozen=True)
class TrainConfig:
    """Episodic training schedule and optimization knobs."""

    spec: EpisodeSpec = EpisodeSpec(n_way=10, k_shot=3, n_query=3)
    episodes_per_epoch: int = 50
    learning_rate: float = 1e-3
    patience: int = 10
    max_epochs: int = 200
    validation_episodes: int = 20
    seed: int = 0

    def __post_init__(self):
        if min(self.episodes_per_epoch, self.patience, self.max_epochs,
               self.validation_episodes) < 1:
            raise ValueError("all training counts must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")


@dataclass(frozen=True)
class TrainResult:
    """Best-validation adapter with the full per-epoch log.

    ``log`` rows are (epoch, mean_loss, val_macro_f1), epoch starting at 1.
    """

    adapter: AdapterState
    log: tuple[tuple[int, float, float], ...]
    best_epoch: int
    best_val_macro_f1: float
    initial_val_macro_f1: float


class EarlyStopper:
    """Tracks the best score/snapshot; signals stop after `patience` stale epochs."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best_score = -math.inf
        self.best_snapshot = None
        self.best_index = -1
        self.stale = 0

    def update(self, score: float, snapshot, index: int) -> bool:
        if score > self.best_score:
            self.best_score = score
            self.best_snapshot = snapshot
            self.best_index = index
            self.stale = 0
        else:
            self.stale += 1
        return self.stale >= self.patience


def validation_episodes(dataset: Sequence[EmbeddedItem], split: LabelSplit,
                        vocabulary: LabelVocabulary,
                        config: TrainConfig) -> list[Episode]:
    """The fixed validation tasks used for early stopping.

    Sampled once from the holdout labels with seeds derived from the train
    seed; every epoch scores the same episodes so the curve is comparable.
    """
    if len(split.validation_holdout) < 2:
        raise InsufficientLabelsError(
            "validation holdout must contain at least 2 labels"
        )
    _, val_seed, _ = np.random.SeedSequence(config.seed).spawn(3)
    rng = np.random.default_rng(val_seed)
    val_spec = dataclasses.replace(
        config.spec, n_way=min(config.spec.n_way, len(split.validation_holdout)))
    pool = list(split.validation_holdout)
    return [
        sample_episode(dataset, pool, vocabulary,
                       dataclasses.replace(val_spec, seed=_draw_seed(rng)))
        for _ in range(config.validation_episodes)
    ]


def validation_macro_f1(adapter: AdapterState, episodes: Sequence[Episode]) -> float:
    """Mean per-episode macro-F1 of LC-prototype inference under the adapter."""
    scores = []
    for ep in episodes:
        adapted_support = [
            it.with_embedding(adapter.apply(it.embedding)) for it in ep.support
        ]
        store = build_store(adapted_support)
        queries = adapter.apply(stack_embeddings(ep.query))
        predicted = classify_batch(queries, store)
        batch = PredictionBatch(
            pairs=tuple((it.labels, pred) for it, pred in zip(ep.query, predicted)),
            active=ep.active_labels,
        )
        scores.append(macro_f1(batch))
    return float(np.mean(scores))


def _draw_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2 ** 63))


def train_adapter(dataset: Sequence[EmbeddedItem], split: LabelSplit,
                  vocabulary: LabelVocabulary, config: TrainConfig,
                  initial: AdapterState | None = None,
                  progress: Callable[[int, float, float], None] | None = None
                  ) -> TrainResult:
    """Train the adapter episodically with early stopping on validation macro-F1.

    Deterministic per (dataset, split, config): episode seeds, the optimizer
    trajectory, and the log depend only on those. Returns the snapshot with
    the best validation score, which is the initial adapter if no epoch
    improves on it.
    """
    # Seed slots: 0 = episode sampling, 1 = validation episodes, 2 = reserved
    # for random initialization so adding it later cannot shift the others.
    train_seq = np.random.SeedSequence(config.seed).spawn(3)[0]
    if not dataset:
        raise ValueError("train_adapter requires a non-empty dataset")
    dimension = dataset[0].dimension
    if initial is None:
        adapter = AdapterState.identity(dimension)
    else:
        adapter = initial.snapshot()
    if adapter.d_in != dimension:
        raise ValueError(
            f"adapter input dimension {adapter.d_in} does not match the "
            f"dataset dimension {dimension}"
        )

    val_eps = validation_episodes(dataset, split, vocabulary, config)
    initial_val = validation_macro_f1(adapter, val_eps)
    stopper = EarlyStopper(config.patience)
    stopper.update(initial_val, adapter.snapshot(), 0)

    rng_train = np.random.default_rng(train_seq)
    base_pool = list(split.base)
    log: list[tuple[int, float, float]] = []
    for epoch in range(1, config.max_epochs + 1):
        losses = []
        for _ in range(config.episodes_per_epoch):
            ep = sample_episode(
                dataset, base_pool, vocabulary,
                dataclasses.replace(config.spec, seed=_draw_seed(rng_train)))
            loss, grad_w, grad_b = loss_gradient(adapter, ep)
            adam_step(adapter, grad_w, grad_b, config.learning_rate)
            losses.append(loss)
        mean_loss = float(np.mean(losses))
        if not math.isfinite(mean_loss):
            raise NonFiniteError(f"epoch {epoch} produced a non-finite mean loss")
        val_score = validation_macro_f1(adapter, val_eps)
        log.append((epoch, mean_loss, val_score))
        if progress is not None:
            progress(epoch, mean_loss, val_score)
        if stopper.update(val_score, adapter.snapshot(), epoch):
            break

    return TrainResult(
        adapter=stopper.best_snapshot,
        log=tuple(log),
        best_epoch=stopper.best_index,
        best_val_macro_f1=stopper.best_score,
        initial_val_macro_f1=initial_val,
    )
