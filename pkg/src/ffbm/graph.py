"""Labelled-network data model: undirected multigraph plus binary vertex features."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LabelledNetwork:
    """Undirected multigraph with a binary feature matrix.

    Edges are stored as canonical (u, v, multiplicity) triples with u <= v;
    self-loops are allowed and contribute 2 to their vertex's degree.  The
    adjacency convention follows the half-edge count: ``adjacency[i]`` lists
    (j, a_ij) pairs where a_ij is the edge multiplicity for j != i and twice
    the loop multiplicity for j == i, so that degree(i) = sum_j a_ij.

    Instances are immutable after construction and safe to share between
    concurrently running samplers.
    """

    num_vertices: int
    edges: tuple  # ((u, v, mult), ...) with u <= v
    features: np.ndarray  # N x D, entries in {0, 1}
    feature_names: tuple

    # Derived, filled in __post_init__.
    degrees: np.ndarray = field(default=None, repr=False)
    adjacency: tuple = field(default=None, repr=False)
    num_edges: int = field(default=0)

    def __post_init__(self):
        n = self.num_vertices
        if n < 0:
            raise ValueError("num_vertices must be nonnegative")
        feats = np.asarray(self.features)
        if feats.ndim != 2 or feats.shape[0] != n:
            raise ValueError(f"feature matrix must have {n} rows, got shape {feats.shape}")
        if feats.size and not np.isin(feats, (0, 1)).all():
            raise ValueError("feature matrix entries must be 0 or 1")
        if len(self.feature_names) != feats.shape[1]:
            raise ValueError("feature_names length must match feature columns")

        merged = {}
        total = 0
        for u, v, m in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) endpoint outside [0, {n})")
            if m <= 0:
                raise ValueError(f"edge multiplicity must be positive, got {m}")
            key = (u, v) if u <= v else (v, u)
            merged[key] = merged.get(key, 0) + m
            total += m

        adj = [[] for _ in range(n)]
        deg = np.zeros(n, dtype=np.int64)
        for (u, v), m in sorted(merged.items()):
            if u == v:
                adj[u].append((u, 2 * m))
                deg[u] += 2 * m
            else:
                adj[u].append((v, m))
                adj[v].append((u, m))
                deg[u] += m
                deg[v] += m

        object.__setattr__(self, "edges", tuple((u, v, m) for (u, v), m in sorted(merged.items())))
        object.__setattr__(self, "features", feats.astype(np.int8))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "num_edges", total)
        object.__setattr__(self, "degrees", deg)
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    def loop_weight(self, i: int) -> int:
        """A_ii: twice the self-loop multiplicity at vertex i."""
        for j, a in self.adjacency[i]:
            if j == i:
                return a
        return 0


def network_from_edges(num_vertices, edges, features=None, feature_names=None) -> LabelledNetwork:
    """Build a LabelledNetwork; features default to an empty N x 0 matrix."""
    if features is None:
        features = np.zeros((num_vertices, 0), dtype=np.int8)
        feature_names = ()
    elif feature_names is None:
        feature_names = tuple(f"f{d}" for d in range(np.asarray(features).shape[1]))
    edges = tuple(e if len(e) == 3 else (e[0], e[1], 1) for e in edges)
    return LabelledNetwork(num_vertices, edges, features, feature_names)


def degrees(net: LabelledNetwork) -> np.ndarray:
    """Degree sequence; a self-loop adds 2 to its vertex's degree."""
    return net.degrees.copy()


@dataclass(frozen=True)
class VertexSplit:
    """Random train/test partition of the vertex set."""

    train: np.ndarray
    test: np.ndarray
    fraction: float

    def __post_init__(self):
        overlap = set(self.train.tolist()) & set(self.test.tolist())
        if overlap:
            raise ValueError(f"train/test sets overlap: {sorted(overlap)[:5]}")


def split_vertices(num_vertices: int, fraction: float, seed) -> VertexSplit:
    """Uniform split with round-half-up train size round(fraction * N).

    Deterministic given the seed; train and test indices are returned sorted.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"train fraction must be in (0, 1), got {fraction}")
    if num_vertices < 2:
        raise ValueError("need at least 2 vertices to split")
    n_train = int(np.floor(fraction * num_vertices + 0.5))
    n_train = min(max(n_train, 1), num_vertices - 1)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(num_vertices)
    train = np.sort(perm[:n_train])
    test = np.sort(perm[n_train:])
    return VertexSplit(train=train, test=test, fraction=fraction)
