"""Metropolis-Hastings sampler over partitions, targeting exp(-S(b)).

One iteration is a sweep of N single-vertex moves.  The proposal picks a
vertex uniformly, then a random neighbour j, and proposes a target block s
with probability (e_{t s} + eps) / (e_t + eps B) where t is j's block; the
Hastings correction for this proposal is computed exactly.  Moves that
would empty a block are rejected so the block count stays fixed.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dcsbm import (
    BlockState,
    _apply_from_stats,
    _delta_from_stats,
    _neighbor_block_weights,
    _pair_deltas,
    apply_move,
    build_block_state,
    description_length,
)
from .graph import LabelledNetwork
from .sampling import retained_indices


@dataclass
class BlockChainConfig:
    """Hyperparameters of the partition sampler."""

    iterations: int = 1000
    burn_in: float = 0.2
    thinning: int = 5
    smoothing: float = 1.0
    init_restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.smoothing <= 0:
            raise ValueError("proposal smoothing must be positive")
        if self.init_restarts < 1:
            raise ValueError("need at least one greedy restart")
        # Raises if the retained set would be empty or parameters are bad.
        retained_indices(self.iterations, self.burn_in, self.thinning)


@dataclass
class BlockChainResult:
    samples: list  # retained partitions, np.ndarray each
    retained: list  # their iteration indices
    s_trace: np.ndarray  # S(b) after each iteration, incl. the initial state
    reference: np.ndarray  # greedy MDL initial partition (alignment reference)
    final_state: BlockState


class _Workspace:
    """Static per-network lookup tables for the hot loop."""

    __slots__ = ("num_vertices", "k", "nbrs", "cums")

    def __init__(self, net: LabelledNetwork):
        self.num_vertices = net.num_vertices
        self.k = [int(x) for x in net.degrees]
        self.nbrs = []
        self.cums = []
        for i in range(net.num_vertices):
            js, acc, run = [], [], 0
            for j, a in net.adjacency[i]:
                js.append(j)
                run += a
                acc.append(run)
            self.nbrs.append(js)
            self.cums.append(acc)


def _proposal_probs(state, i, r, s, w, loops, ki, eps, pair_deltas):
    """Forward and reverse proposal probabilities of the move b_i: r -> s.

    Both include the 1/N vertex factor and the 1/k_i neighbour average so the
    values are genuine transition probabilities.
    """
    e, e_row, B = state.e, state.e_row, state.B
    eps_b = eps * B
    scale = 1.0 / (state.net.num_vertices * ki)

    forward = 0.0
    for t, wt in w.items():
        forward += wt * (e[t][s] + eps) / (e_row[t] + eps_b)
    forward *= scale

    if s == r:
        return forward, forward

    # Post-move neighbour weights: only the self-loop mass changes block.
    w_post = w
    if loops:
        w_post = dict(w)
        w_post[r] = w_post.get(r, 0) - loops
        if w_post[r] == 0:
            del w_post[r]
        w_post[s] = w_post.get(s, 0) + loops

    reverse = 0.0
    for t, wt in w_post.items():
        key = (t, r) if t <= r else (r, t)
        e_tr = e[min(t, r)][max(t, r)] + pair_deltas.get(key, 0)
        row = e_row[t]
        if t == r:
            row -= ki
        elif t == s:
            row += ki
        reverse += wt * (e_tr + eps) / (row + eps_b)
    reverse *= scale
    return forward, reverse


def propose_move(state: BlockState, rng: random.Random, smoothing: float = 1.0):
    """Draw a single-vertex move proposal.

    Returns (vertex, target, log_forward, log_reverse) where the log values
    are the exact proposal probabilities of the move and of its reversal.
    """
    net = state.net
    n_vert, B = net.num_vertices, state.B
    i = rng.randrange(n_vert)
    r = state.b[i]
    ki = int(net.degrees[i])
    if ki == 0:
        s = rng.randrange(B)
        log_q = -math.log(n_vert * B)
        return i, s, log_q, log_q

    x = rng.randrange(ki)
    acc = 0
    for j, a in net.adjacency[i]:
        acc += a
        if x < acc:
            break
    t = state.b[j]

    eps = smoothing
    u = rng.random() * (state.e_row[t] + eps * B)
    run = 0.0
    s = B - 1
    for cand in range(B):
        run += state.e[t][cand] + eps
        if u < run:
            s = cand
            break

    w, loops = _neighbor_block_weights(state, i)
    pair_deltas = _pair_deltas(r, s, w, loops) if s != r else {}
    forward, reverse = _proposal_probs(state, i, r, s, w, loops, ki, eps, pair_deltas)
    return i, s, math.log(forward), math.log(reverse)


def mh_step(state: BlockState, cfg: BlockChainConfig, rng: random.Random) -> bool:
    """One Metropolis-Hastings step; mutates the state on acceptance."""
    accepted, _ = _mh_step_impl(state, rng, cfg.smoothing, _Workspace(state.net))
    return accepted


def _mh_step_impl(state, rng, eps, ws):
    """Fused propose / delta / accept step.  Returns (accepted, delta_S)."""
    b = state.b
    B = state.B
    i = rng.randrange(ws.num_vertices)
    r = b[i]
    ki = ws.k[i]

    if ki == 0:
        # Isolated vertex: uniform proposal, symmetric by construction.
        s = rng.randrange(B)
        if s == r:
            return True, 0.0
        log_ratio = 0.0
        pair_deltas = _pair_deltas(r, s, {}, 0)
    else:
        x = rng.randrange(ki)
        nbr = ws.nbrs[i]
        t = b[nbr[bisect_right(ws.cums[i], x)]]
        e_t = state.e[t]
        u = rng.random() * (state.e_row[t] + eps * B)
        run = 0.0
        s = B - 1
        for cand in range(B):
            run += e_t[cand] + eps
            if u < run:
                s = cand
                break
        if s == r:
            return True, 0.0
        if state.n[r] == 1:
            return False, 0.0  # would empty the source block
        w, loops = _neighbor_block_weights(state, i)
        pair_deltas = _pair_deltas(r, s, w, loops)
        forward, reverse = _proposal_probs(state, i, r, s, w, loops, ki, eps, pair_deltas)
        log_ratio = math.log(reverse) - math.log(forward)

    if state.n[r] == 1:
        return False, 0.0  # would empty the source block
    delta = _delta_from_stats(state, i, r, s, pair_deltas)
    log_alpha = -delta + log_ratio
    if log_alpha >= 0.0 or rng.random() < math.exp(log_alpha):
        _apply_from_stats(state, i, r, s, pair_deltas)
        return True, delta
    return False, 0.0


def mdl_partition(net: LabelledNetwork, num_blocks: int, rng: random.Random,
                  restarts: int = 8) -> BlockState:
    """Greedy minimum-description-length partition with a fixed block count.

    Each restart begins at a uniformly random labelling (patched so no block
    starts empty) and repeats zero-temperature sweeps: vertices in random
    order, each moved to its best block if that strictly lowers S, until a
    full sweep makes no improvement.  The best of the restarts is returned;
    a single greedy pass gets trapped in shallow local minima too often
    (e.g. mixed splits of two disjoint cliques).
    """
    n_vert = net.num_vertices
    if num_blocks < 1:
        raise ValueError("need at least one block")
    if num_blocks > n_vert:
        raise ValueError(f"cannot fill {num_blocks} blocks with {n_vert} vertices")
    if restarts < 1:
        raise ValueError("need at least one restart")
    if num_blocks == 1:
        return build_block_state(net, [0] * n_vert, 1)

    best_state, best_s = None, math.inf
    for _ in range(restarts):
        state = _greedy_descent(net, num_blocks, rng)
        s_val = description_length(net, state)
        if s_val < best_s:
            best_state, best_s = state, s_val
    return best_state


def _greedy_descent(net: LabelledNetwork, num_blocks: int, rng: random.Random) -> BlockState:
    n_vert = net.num_vertices
    labels = [rng.randrange(num_blocks) for _ in range(n_vert)]
    counts = [0] * num_blocks
    for x in labels:
        counts[x] += 1
    for blk in range(num_blocks):
        while counts[blk] == 0:
            donor = rng.randrange(n_vert)
            if counts[labels[donor]] > 1:
                counts[labels[donor]] -= 1
                labels[donor] = blk
                counts[blk] += 1

    state = build_block_state(net, labels, num_blocks)
    order = list(range(n_vert))
    improved = True
    while improved:
        improved = False
        rng.shuffle(order)
        for i in order:
            r = state.b[i]
            if state.n[r] == 1:
                continue
            w, loops = _neighbor_block_weights(state, i)
            best_target, best_delta = r, 0.0
            for s in range(num_blocks):
                if s == r:
                    continue
                delta = _delta_from_stats(state, i, r, s, _pair_deltas(r, s, w, loops))
                if delta < best_delta:
                    best_target, best_delta = s, delta
            if best_target != r:
                apply_move(state, i, best_target)
                improved = True
    return state


def run_block_chain(net: LabelledNetwork, num_blocks: int, cfg: BlockChainConfig) -> BlockChainResult:
    """Run the partition sampler and return retained samples plus the S trace."""
    rng = random.Random(cfg.seed)
    state = mdl_partition(net, num_blocks, rng, restarts=cfg.init_restarts)
    reference = state.partition()

    ws = _Workspace(net)
    eps = cfg.smoothing
    keep = retained_indices(cfg.iterations, cfg.burn_in, cfg.thinning)
    keep_set = frozenset(keep)

    s_now = description_length(net, state)
    trace = np.empty(cfg.iterations + 1)
    trace[0] = s_now
    samples = []
    if 0 in keep_set:
        samples.append(state.partition())

    n_vert = max(net.num_vertices, 1)
    step = _mh_step_impl
    for it in range(1, cfg.iterations + 1):
        for _ in range(n_vert):
            accepted, delta = step(state, rng, eps, ws)
            if accepted:
                s_now += delta
        trace[it] = s_now
        if it in keep_set:
            samples.append(state.partition())

    if not math.isfinite(s_now):
        raise ArithmeticError("description length became non-finite during sampling")
    return BlockChainResult(samples=samples, retained=keep, s_trace=trace,
                            reference=reference, final_state=state)


def align_labels(sample: np.ndarray, reference: np.ndarray, num_blocks: int) -> np.ndarray:
    """Relabel a partition to best overlap the reference partition.

    Solves the optimal assignment on the B x B contingency table.  Overlap
    ties are broken towards keeping labels fixed (which makes alignment
    idempotent), then by the assignment solver's deterministic scan order.
    """
    sample = np.asarray(sample)
    reference = np.asarray(reference)
    if sample.shape != reference.shape:
        raise ValueError("sample and reference partitions differ in length")
    overlap = np.zeros((num_blocks, num_blocks), dtype=np.int64)
    np.add.at(overlap, (sample, reference), 1)
    # Lexicographic objective: overlap first, fixed labels second.
    score = overlap * (num_blocks + 1) + np.eye(num_blocks, dtype=np.int64)
    rows, cols = linear_sum_assignment(-score)
    perm = np.empty(num_blocks, dtype=np.int64)
    perm[rows] = cols
    return perm[sample]


def estimate_responsibilities(samples, reference: np.ndarray, num_blocks: int) -> np.ndarray:
    """Posterior block-membership probabilities from aligned partition samples.

    Each sample is aligned to the reference partition before averaging the
    one-hot memberships, so label switching across samples cannot wash the
    estimate out towards uniform.
    """
    if len(samples) == 0:
        raise ValueError("need at least one retained sample")
    n_vert = len(reference)
    counts = np.zeros((n_vert, num_blocks), dtype=np.int64)
    rows = np.arange(n_vert)
    for sample in samples:
        counts[rows, align_labels(sample, reference, num_blocks)] += 1
    return counts / len(samples)
