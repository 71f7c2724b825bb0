"""Posterior summaries, feature screening, and evaluation metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .softmax import _log_normaliser


@dataclass(frozen=True)
class WeightSummary:
    """Entry-wise sample mean and standard deviation of the weight posterior.

    The standard deviation uses the population convention (divide by the
    number of retained samples, no Bessel correction).
    """

    mean: np.ndarray
    std: np.ndarray


def summarize_weights(samples) -> WeightSummary:
    if len(samples) == 0:
        raise ValueError("need at least one weight sample")
    stack = np.stack([np.asarray(w, dtype=np.float64) for w in samples])
    return WeightSummary(mean=stack.mean(axis=0), std=stack.std(axis=0, ddof=0))


@dataclass(frozen=True)
class ReducedFeatureSet:
    """Outcome of the posterior significance screen on features.

    kept: retained feature indices, ascending.
    cutoff: score of the weakest retained feature (the largest interval
        cutoff at which exactly the requested number of features survive).
    scores: per-feature cutoff scores, one per original feature.
    """

    kept: np.ndarray
    cutoff: float
    scores: np.ndarray


def feature_scores(summary: WeightSummary, multiplier: float) -> np.ndarray:
    """Per-feature screening score.

    For feature d, each block's credible interval (mu - k sigma, mu + k sigma)
    collapses to the point 0 if it straddles zero; the score is the largest
    over blocks of the interval's distance bound min(|low|, |high|).  A
    feature survives a cutoff c exactly when its score is >= c.
    """
    if multiplier <= 0:
        raise ValueError("interval multiplier must be positive")
    low = summary.mean - multiplier * summary.std
    high = summary.mean + multiplier * summary.std
    straddles = (low <= 0.0) & (high >= 0.0)
    low = np.where(straddles, 0.0, low)
    high = np.where(straddles, 0.0, high)
    return np.minimum(np.abs(low), np.abs(high)).max(axis=0)


def reduce_dimension(summary: WeightSummary, multiplier: float, target_dim: int) -> ReducedFeatureSet:
    """Keep the target_dim features with the largest screening scores.

    Sorting is stable with ascending-index tie-break; the reported cutoff is
    the score of the last feature kept.
    """
    scores = feature_scores(summary, multiplier)
    num_features = scores.shape[0]
    if not 0 < target_dim <= num_features:
        raise ValueError(f"target dimension {target_dim} outside [1, {num_features}]")
    ranked = np.argsort(-scores, kind="stable")[:target_dim]
    cutoff = float(scores[ranked[-1]])
    return ReducedFeatureSet(kept=np.sort(ranked), cutoff=cutoff, scores=scores)


def mean_description_length(s_values, num_vertices: int, num_edges: int,
                            num_blocks: int = None) -> float:
    """Average retained description length per entity (vertices plus edges).

    This gauges how well the block model fits the graph, so when num_blocks
    is given the partition-encoding constant N log B (which is independent
    of the partition and cancels everywhere in sampling) is subtracted from
    each retained value before averaging; published per-entity figures
    follow that convention.
    """
    s_values = np.asarray(s_values, dtype=np.float64)
    if s_values.size == 0:
        raise ValueError("empty description-length trace")
    total = float(s_values.mean())
    if num_blocks is not None:
        total -= num_vertices * np.log(num_blocks)
    return total / (num_vertices + num_edges)


def _losses_per_sample(weight_samples, responsibilities, features):
    """Per-sample mean soft cross-entropy over the given vertices."""
    feats = np.asarray(features, dtype=np.float64)
    targets = np.asarray(responsibilities, dtype=np.float64)
    out = np.empty(len(weight_samples))
    for idx, w in enumerate(weight_samples):
        logits = feats @ np.asarray(w, dtype=np.float64).T
        per_vertex = _log_normaliser(logits) - (targets * logits).sum(axis=1)
        out[idx] = per_vertex.mean()
    return out


def cross_entropy_loss(weight_samples, responsibilities, features, vertex_set) -> float:
    """Mean over retained weight samples of the per-vertex soft cross-entropy.

    responsibilities and features cover all vertices; vertex_set selects the
    rows to score (training or test side of the split).
    """
    vertex_set = np.asarray(vertex_set)
    if vertex_set.size == 0:
        raise ValueError("empty vertex set")
    if len(weight_samples) == 0:
        raise ValueError("need at least one weight sample")
    feats = np.asarray(features)[vertex_set]
    targ = np.asarray(responsibilities)[vertex_set]
    return float(_losses_per_sample(weight_samples, targ, feats).mean())


def block_accuracy(weight_samples, responsibilities, features, vertex_set) -> np.ndarray:
    """Agreement rate between classifier argmax and posterior argmax, per block.

    Returns one value per block: the fraction, over that block's vertices and
    all retained samples, of classifier predictions matching the posterior
    assignment.  Blocks with no vertices in the set get NaN (undefined rather
    than zero, so averages are not dragged down).
    """
    vertex_set = np.asarray(vertex_set)
    targ = np.asarray(responsibilities)[vertex_set]
    feats = np.asarray(features, dtype=np.float64)[vertex_set]
    num_blocks = targ.shape[1]
    assigned = targ.argmax(axis=1)

    agree = np.zeros(len(vertex_set), dtype=np.int64)
    for w in weight_samples:
        logits = feats @ np.asarray(w, dtype=np.float64).T
        agree += logits.argmax(axis=1) == assigned

    out = np.full(num_blocks, np.nan)
    for j in range(num_blocks):
        members = assigned == j
        if members.any():
            out[j] = agree[members].sum() / (members.sum() * len(weight_samples))
    return out


@dataclass
class EvaluationReport:
    """Metrics of one experiment repetition."""

    mean_dl: float
    loss_train: float
    loss_test: float
    accuracy_train: list
    accuracy_test: list
    acceptance_ratio: float
    mean_objective: float
    cutoff: float = None
    kept_features: list = None
    reduced_loss_train: float = None
    reduced_loss_test: float = None
    reduced_acceptance_ratio: float = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def clean(x):
            if isinstance(x, float) and np.isnan(x):
                return None
            return x

        out = {
            "mean_description_length": self.mean_dl,
            "loss_train": self.loss_train,
            "loss_test": self.loss_test,
            "accuracy_train": [clean(float(a)) for a in self.accuracy_train],
            "accuracy_test": [clean(float(a)) for a in self.accuracy_test],
            "acceptance_ratio": self.acceptance_ratio,
            "mean_objective": self.mean_objective,
        }
        if self.kept_features is not None:
            out["cutoff"] = self.cutoff
            out["kept_features"] = list(self.kept_features)
            out["reduced_loss_train"] = self.reduced_loss_train
            out["reduced_loss_test"] = self.reduced_loss_test
            out["reduced_acceptance_ratio"] = self.reduced_acceptance_ratio
        out.update(self.extras)
        return out
