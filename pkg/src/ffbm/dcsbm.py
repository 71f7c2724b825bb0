"""Microcanonical degree-corrected SBM: likelihood, priors, description length.

The joint density of a multigraph A under a fixed partition b factorises as
p(A | k, e, b) * p(e | b) * p(k | e, b) * p(b | X), where the likelihood is a
ratio of half-edge pairing counts and the priors follow the standard
microcanonical construction.  The description length S(b) is the negative
log of this joint, in nats.  Everything supports O(degree) incremental
updates under single-vertex moves, which is the performance core of the
partition sampler.

Conventions: the edge-count matrix e is symmetric with e[r][r] twice the
number of intra-block edges, so the half-edge count of block r is
e_r = sum_s e[r][s] and the (2m)!! terms apply verbatim.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import LabelledNetwork
from .softmax import log_partition_given_features
from .tables import (
    log_count_partitions,
    log_double_factorial_even,
    log_factorial,
    log_multiset,
)

INFINITE_DELTA = math.inf


class BlockState:
    """Partition of a network with the sufficient statistics kept in sync.

    Attributes:
        b: list of block labels in [0, B).
        B: fixed number of blocks.
        e: B x B symmetric edge-count matrix (diagonal doubled).
        e_row: half-edge count per block, e_row[r] = sum_s e[r][s].
        n: vertices per block.
        eta: per block, a dict degree -> number of vertices with that degree.
    """

    __slots__ = ("net", "b", "B", "e", "e_row", "n", "eta")

    def __init__(self, net: LabelledNetwork, b, B: int):
        labels = [int(x) for x in b]
        if len(labels) != net.num_vertices:
            raise ValueError("partition length must equal the number of vertices")
        if any(x < 0 or x >= B for x in labels):
            bad = next(x for x in labels if x < 0 or x >= B)
            raise ValueError(f"block label {bad} outside [0, {B})")
        self.net = net
        self.b = labels
        self.B = B
        e = [[0] * B for _ in range(B)]
        n = [0] * B
        eta = [{} for _ in range(B)]
        deg = net.degrees
        for i, r in enumerate(labels):
            n[r] += 1
            k = int(deg[i])
            eta[r][k] = eta[r].get(k, 0) + 1
        for u, v, m in net.edges:
            r, s = labels[u], labels[v]
            if u == v:
                e[r][r] += 2 * m
            elif r == s:
                e[r][r] += 2 * m
            else:
                e[r][s] += m
                e[s][r] += m
        self.e = e
        self.e_row = [sum(row) for row in e]
        self.n = n
        self.eta = eta

    def copy(self) -> "BlockState":
        dup = object.__new__(BlockState)
        dup.net = self.net
        dup.b = list(self.b)
        dup.B = self.B
        dup.e = [row[:] for row in self.e]
        dup.e_row = list(self.e_row)
        dup.n = list(self.n)
        dup.eta = [dict(d) for d in self.eta]
        return dup

    def partition(self) -> np.ndarray:
        return np.array(self.b, dtype=np.int64)


def build_block_state(net: LabelledNetwork, b, B: int) -> BlockState:
    """Assemble a BlockState from a raw partition, validating labels."""
    return BlockState(net, b, B)


def log_stub_pairings(state: BlockState) -> float:
    """Log count of half-edge pairings compatible with the block edge counts.

    This is prod_r e_r! / (prod_{r<s} e_rs! prod_r e_rr!!) in log form.
    """
    e, e_row, B = state.e, state.e_row, state.B
    total = 0.0
    for r in range(B):
        total += log_factorial(e_row[r])
        total -= log_double_factorial_even(e[r][r])
        for s in range(r + 1, B):
            total -= log_factorial(e[r][s])
    return total


def log_graph_multiplicity(net: LabelledNetwork) -> float:
    """Log count of half-edge pairings that produce exactly this multigraph.

    prod_i k_i! / (prod_{i<j} A_ij! prod_i A_ii!!) in log form; for a simple
    graph the denominator is 1.
    """
    total = 0.0
    for k in net.degrees:
        total += log_factorial(int(k))
    for u, v, m in net.edges:
        if u == v:
            total -= log_double_factorial_even(2 * m)
        else:
            total -= log_factorial(m)
    return total


def log_likelihood(net: LabelledNetwork, state: BlockState) -> float:
    """log p(A | k, e, b); the state's statistics guarantee the constraints hold."""
    return log_graph_multiplicity(net) - log_stub_pairings(state)


def log_prior_edge_matrix(num_blocks: int, num_edges: int) -> float:
    """log p(e | b): uniform over histograms of E edges in B(B+1)/2 block-pair bins."""
    bins = num_blocks * (num_blocks + 1) // 2
    return -log_multiset(bins, num_edges)


def log_prior_degrees(state: BlockState) -> float:
    """log p(k | e, b) = sum_r log[ prod_j eta_j^r! / (n_r! q(e_r, n_r)) ]."""
    total = 0.0
    for r in range(state.B):
        for cnt in state.eta[r].values():
            total += log_factorial(cnt)
        total -= log_factorial(state.n[r])
        total -= log_count_partitions(state.e_row[r], state.n[r])
    return total


def description_length(net: LabelledNetwork, state: BlockState) -> float:
    """S(b): negative log joint of (A, e, k, b) given X, in nats."""
    value = -log_likelihood(net, state)
    value -= log_prior_edge_matrix(state.B, net.num_edges)
    value -= log_prior_degrees(state)
    value -= log_partition_given_features(net.num_vertices, state.B)
    return value


def _neighbor_block_weights(state: BlockState, i: int):
    """Half-edge weight of vertex i towards each block, and the loop weight A_ii."""
    w = {}
    loops = 0
    b = state.b
    for j, a in state.net.adjacency[i]:
        if j == i:
            loops = a
        t = b[j]
        w[t] = w.get(t, 0) + a
    return w, loops


def _pair_deltas(r: int, s: int, w, loops):
    """Changes to the upper-triangle entries of e when a vertex moves r -> s.

    Keys are (min(t,u), max(t,u)); diagonal entries carry the doubled count.
    """
    m_r = w.get(r, 0) - loops
    m_s = w.get(s, 0)
    deltas = {}

    def bump(t, u, d):
        key = (t, u) if t <= u else (u, t)
        deltas[key] = deltas.get(key, 0) + d

    bump(r, r, -2 * m_r - loops)
    bump(s, s, 2 * m_s + loops)
    bump(r, s, m_r - m_s)
    for t, wt in w.items():
        if t == r or t == s:
            continue
        bump(r, t, -wt)
        bump(s, t, wt)
    return deltas


def _delta_from_stats(state: BlockState, i: int, r: int, s: int, pair_deltas) -> float:
    """S(b with b_i <- s) - S(b), given precomputed edge-count changes."""
    e, e_row, n, eta = state.e, state.e_row, state.n, state.eta
    ki = int(state.net.degrees[i])

    delta = 0.0
    # Pairing count: row factorials for the two affected blocks...
    delta += log_factorial(e_row[r] - ki) - log_factorial(e_row[r])
    delta += log_factorial(e_row[s] + ki) - log_factorial(e_row[s])
    # ...minus the changed pair terms.
    for (t, u), d in pair_deltas.items():
        if d == 0:
            continue
        old = e[t][u]
        new = old + d
        if t == u:
            delta -= log_double_factorial_even(new) - log_double_factorial_even(old)
        else:
            delta -= log_factorial(new) - log_factorial(old)

    # Degree prior: -log p(k | e, b) contributes n_r!, q(e_r, n_r) and the
    # degree histogram factorials of the two affected blocks.
    delta += math.log(n[s] + 1) - math.log(n[r])
    delta += log_count_partitions(e_row[r] - ki, n[r] - 1) - log_count_partitions(e_row[r], n[r])
    delta += log_count_partitions(e_row[s] + ki, n[s] + 1) - log_count_partitions(e_row[s], n[s])
    delta += math.log(eta[r][ki]) - math.log(eta[s].get(ki, 0) + 1)
    return delta


def delta_description_length(state: BlockState, i: int, target: int) -> float:
    """Incremental S(b with b_i <- target) - S(b).

    Touches only statistics incident to the source and target blocks; a move
    that would empty its source block is infinitely penalised (the sampler
    keeps B fixed).
    """
    r = state.b[i]
    if target == r:
        return 0.0
    if not 0 <= target < state.B:
        raise ValueError(f"target block {target} outside [0, {state.B})")
    if state.n[r] == 1:
        return INFINITE_DELTA
    w, loops = _neighbor_block_weights(state, i)
    return _delta_from_stats(state, i, r, target, _pair_deltas(r, target, w, loops))


def apply_move(state: BlockState, i: int, target: int) -> None:
    """Move vertex i to the target block, updating all statistics in place."""
    r = state.b[i]
    if target == r:
        return
    w, loops = _neighbor_block_weights(state, i)
    _apply_from_stats(state, i, r, target, _pair_deltas(r, target, w, loops))


def _apply_from_stats(state: BlockState, i: int, r: int, s: int, pair_deltas) -> None:
    e, e_row, n, eta = state.e, state.e_row, state.n, state.eta
    ki = int(state.net.degrees[i])
    for (t, u), d in pair_deltas.items():
        if d == 0:
            continue
        e[t][u] += d
        if t != u:
            e[u][t] += d
    e_row[r] -= ki
    e_row[s] += ki
    n[r] -= 1
    n[s] += 1
    cnt = eta[r][ki]
    if cnt == 1:
        del eta[r][ki]
    else:
        eta[r][ki] = cnt - 1
    eta[s][ki] = eta[s].get(ki, 0) + 1
    state.b[i] = s
