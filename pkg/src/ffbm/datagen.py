"""Synthetic instance generator for ground-truth recovery experiments.

Features are drawn (or supplied), block memberships follow the softmax
generator under planted weights, and the graph is drawn from a canonical
Poisson block model with planted affinities.  A separate exact sampler
places edges uniformly over the configurations compatible with explicit
(b, e, k) constraints, for likelihood-normalisation checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import network_from_edges
from .softmax import class_probabilities


@dataclass
class GeneratorSpec:
    """Planted-model description.

    weights: planted B x D softmax weights.
    affinity: symmetric B x B expected edge propensity between blocks.
    feature_probs: per-column Bernoulli rates used when features is None.
    features: explicit binary feature matrix, overrides feature_probs.
    propensities: per-vertex positive degree multipliers, default all 1.
    """

    num_vertices: int
    weights: np.ndarray
    affinity: np.ndarray
    feature_probs: np.ndarray = None
    features: np.ndarray = None
    propensities: np.ndarray = None
    seed: int = 0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.affinity = np.asarray(self.affinity, dtype=np.float64)
        if self.weights.ndim != 2:
            raise ValueError("weights must be a B x D matrix")
        b = self.weights.shape[0]
        if self.affinity.shape != (b, b):
            raise ValueError("affinity must be square with one row per block")
        if self.features is None and self.feature_probs is None:
            raise ValueError("provide either features or feature_probs")


def sample_memberships(features: np.ndarray, weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw block labels independently per vertex from the softmax generator."""
    probs = class_probabilities(weights, features)
    thresholds = probs.cumsum(axis=1)
    u = rng.random((probs.shape[0], 1))
    return (thresholds > u).argmax(axis=1)


def sample_poisson_graph(memberships, affinity, propensities, rng: np.random.Generator):
    """Multigraph edges with Poisson multiplicities.

    The mean multiplicity between distinct i < j is
    propensity_i * propensity_j * affinity[b_i, b_j]; self-loops use half
    that mean.  Returns (u, v, multiplicity) triples for nonzero draws.
    """
    memberships = np.asarray(memberships)
    affinity = np.asarray(affinity, dtype=np.float64)
    if not np.allclose(affinity, affinity.T):
        raise ValueError("affinity matrix must be symmetric")
    if (affinity < 0).any():
        raise ValueError("affinity entries must be nonnegative")
    n = len(memberships)
    if propensities is None:
        propensities = np.ones(n)
    propensities = np.asarray(propensities, dtype=np.float64)
    if (propensities <= 0).any():
        raise ValueError("degree propensities must be positive")

    iu, ju = np.triu_indices(n)
    means = propensities[iu] * propensities[ju] * affinity[memberships[iu], memberships[ju]]
    means[iu == ju] *= 0.5
    counts = rng.poisson(means)
    nz = counts.nonzero()[0]
    return [(int(iu[k]), int(ju[k]), int(counts[k])) for k in nz]


def sample_microcanonical_graph(memberships, edge_counts, degrees, rng: np.random.Generator):
    """Uniform half-edge pairing subject to exact (b, e, k) constraints.

    Each vertex contributes its degree in stubs to its block; within every
    unordered block pair the reserved stubs are matched uniformly at random.
    The returned multigraph reproduces the edge-count matrix exactly.
    """
    memberships = np.asarray(memberships)
    degrees = np.asarray(degrees)
    e = np.asarray(edge_counts)
    num_blocks = e.shape[0]
    if e.shape != (num_blocks, num_blocks) or not np.array_equal(e, e.T):
        raise ValueError("edge-count matrix must be square and symmetric")
    if (np.diag(e) % 2).any():
        raise ValueError("diagonal edge counts must be even (they count half-edges twice)")
    if memberships.max(initial=-1) >= num_blocks or memberships.min(initial=0) < 0:
        raise ValueError("membership label outside the edge-count matrix")

    for r in range(num_blocks):
        stub_total = int(degrees[memberships == r].sum())
        if stub_total != int(e[r].sum()):
            raise ValueError(
                f"block {r} has {stub_total} half-edges from degrees but {int(e[r].sum())} from edge counts"
            )

    # Shuffled stub lists per block, consumed in fixed partner segments:
    # ascending partner blocks first, own-block stubs last.
    stubs, cursors = [], []
    for r in range(num_blocks):
        members = np.nonzero(memberships == r)[0]
        lst = np.repeat(members, degrees[members])
        rng.shuffle(lst)
        stubs.append(lst)
        cursors.append(0)

    def take(r, count):
        lo = cursors[r]
        cursors[r] = lo + count
        return stubs[r][lo:cursors[r]]

    multiplicity = {}

    def add_edge(u, v):
        key = (u, v) if u <= v else (v, u)
        multiplicity[key] = multiplicity.get(key, 0) + 1

    for r in range(num_blocks):
        for s in range(r + 1, num_blocks):
            left = take(r, int(e[r][s]))
            right = take(s, int(e[r][s]))
            for u, v in zip(left, right):
                add_edge(int(u), int(v))
    for r in range(num_blocks):
        own = take(r, int(e[r][r]))
        for idx in range(0, len(own), 2):
            add_edge(int(own[idx]), int(own[idx + 1]))

    return [(u, v, m) for (u, v), m in sorted(multiplicity.items())]


def generate(spec: GeneratorSpec):
    """Draw a full synthetic instance.

    Returns the labelled network and a ground-truth dict holding the planted
    memberships, weights and affinity matrix.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.num_vertices
    if spec.features is not None:
        feats = np.asarray(spec.features)
        if feats.shape[0] != n:
            raise ValueError("explicit feature matrix has the wrong number of rows")
    else:
        probs = np.asarray(spec.feature_probs, dtype=np.float64)
        feats = (rng.random((n, probs.shape[0])) < probs).astype(np.int8)
    if feats.shape[1] != spec.weights.shape[1]:
        raise ValueError("feature count must match the planted weight columns")

    memberships = sample_memberships(feats, spec.weights, rng)
    edges = sample_poisson_graph(memberships, spec.affinity, spec.propensities, rng)
    names = tuple(f"f{d}" for d in range(feats.shape[1]))
    net = network_from_edges(n, edges, feats, names)
    truth = {
        "memberships": memberships,
        "weights": spec.weights,
        "affinity": spec.affinity,
    }
    return net, truth
