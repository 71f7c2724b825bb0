"""Metropolis-adjusted Langevin sampler for the feature-weight posterior.

Proposals drift down the objective gradient with injected Gaussian noise,
theta' = theta - h grad U(theta) + sqrt(2h) xi, and every proposal passes
through the exact Metropolis-Hastings correction (no unadjusted Langevin
shortcut).  The step size follows a polynomially decaying schedule
h_t = (250 s / n) (offset + t)^(-decay), which keeps late-chain acceptance
high while early steps move fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sampling import retained_indices
from .softmax import ObjectiveContext, objective, objective_and_gradient, objective_gradient


@dataclass
class WeightChainConfig:
    """Hyperparameters of the weight sampler."""

    iterations: int = 10000
    burn_in: float = 0.4
    thinning: int = 10
    sigma: float = 1.0
    step_scale: float = 0.05
    schedule_offset: float = 1000.0
    schedule_decay: float = 0.8
    seed: object = 0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("prior standard deviation must be positive")
        if self.step_scale <= 0:
            raise ValueError("step-size scaling must be positive")
        if not 0.5 < self.schedule_decay <= 1.0:
            raise ValueError("schedule decay must lie in (1/2, 1]")
        retained_indices(self.iterations, self.burn_in, self.thinning)


@dataclass
class WeightChainResult:
    samples: list  # retained B x D weight matrices
    retained: list
    u_trace: np.ndarray  # objective after each iteration, incl. the initial draw
    acceptance_ratio: float
    mean_objective: float = field(default=math.nan)  # mean U over iterations 1..T
    accepted: np.ndarray = field(default=None, repr=False)  # per-iteration flags


def step_size(t: int, cfg: WeightChainConfig, num_points: int) -> float:
    """Annealed step size at iteration t for a context of num_points vertices."""
    if num_points < 1:
        raise ValueError("context must contain at least one vertex")
    alpha = 250.0 * cfg.step_scale / num_points
    return alpha * (cfg.schedule_offset + t) ** (-cfg.schedule_decay)


def proposal_log_density(frm: np.ndarray, to: np.ndarray, grad_frm: np.ndarray, step: float) -> float:
    """log q(frm -> to) up to the additive constant shared by both directions."""
    if step <= 0:
        raise ValueError("step size must be positive")
    drift = to - frm + step * grad_frm
    return -float((drift * drift).sum()) / (4.0 * step)


def accept_log_prob(current: np.ndarray, proposal: np.ndarray, ctx: ObjectiveContext, step: float) -> float:
    """log of the Metropolis-Hastings acceptance probability of the proposal."""
    u_cur = objective(current, ctx)
    u_prop = objective(proposal, ctx)
    log_fwd = proposal_log_density(current, proposal, objective_gradient(current, ctx), step)
    log_rev = proposal_log_density(proposal, current, objective_gradient(proposal, ctx), step)
    return min(0.0, u_cur - u_prop + log_rev - log_fwd)


def run_weight_chain(ctx: ObjectiveContext, cfg: WeightChainConfig) -> WeightChainResult:
    """Sample the weight posterior; the initial state is a prior draw."""
    rng = np.random.default_rng(cfg.seed)
    shape = (ctx.num_blocks, ctx.num_features)
    weights = rng.normal(0.0, cfg.sigma, shape)
    value, grad = objective_and_gradient(weights, ctx)

    keep = retained_indices(cfg.iterations, cfg.burn_in, cfg.thinning)
    keep_set = frozenset(keep)
    trace = np.empty(cfg.iterations + 1)
    trace[0] = value
    samples = []
    if 0 in keep_set:
        samples.append(weights.copy())

    accepted = np.zeros(cfg.iterations, dtype=bool)
    n_ctx = ctx.size
    for t in range(cfg.iterations):
        h = step_size(t, cfg, n_ctx)
        noise = rng.standard_normal(shape)
        proposal = weights - h * grad + math.sqrt(2.0 * h) * noise
        prop_value, prop_grad = objective_and_gradient(proposal, ctx)
        # Forward density shortcut: the drift residual is exactly the noise.
        log_fwd = -float((noise * noise).sum()) / 2.0
        log_rev = proposal_log_density(proposal, weights, prop_grad, h)
        log_alpha = value - prop_value + log_rev - log_fwd
        if log_alpha >= 0.0 or rng.random() < math.exp(log_alpha):
            weights, value, grad = proposal, prop_value, prop_grad
            accepted[t] = True
        trace[t + 1] = value
        if t + 1 in keep_set:
            samples.append(weights.copy())

    if not np.isfinite(trace).all():
        raise ArithmeticError("objective became non-finite during weight sampling")
    return WeightChainResult(
        samples=samples,
        retained=keep,
        u_trace=trace,
        acceptance_ratio=float(accepted.sum()) / cfg.iterations,
        mean_objective=float(trace[1:].mean()),
        accepted=accepted,
    )
