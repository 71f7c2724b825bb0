"""End-to-end experiment orchestration: chains, metrics, repetitions."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import (
    EvaluationReport,
    block_accuracy,
    cross_entropy_loss,
    mean_description_length,
    reduce_dimension,
    summarize_weights,
)
from .block_chain import BlockChainConfig, estimate_responsibilities, run_block_chain
from .config import RunConfig
from .dataio import DataFormatError, load_network, load_polbooks
from .graph import LabelledNetwork, split_vertices
from .mala import WeightChainConfig, run_weight_chain
from .sampling import stream_seed_int, stream_seed_sequence
from .softmax import ObjectiveContext


@dataclass
class RepetitionArtifacts:
    """Chain-level outputs of one repetition, for serialisation."""

    block_result: object
    responsibilities: np.ndarray
    split: object
    weight_result: object
    reduction: object = None
    reduced_weight_result: object = None


def load_config_network(cfg: RunConfig) -> LabelledNetwork:
    """Resolve the dataset paths of a config; defaults to the bundled network."""
    if cfg.edges is None and cfg.features is None and cfg.categorical_features is None:
        return load_polbooks()
    if cfg.edges is None:
        raise DataFormatError("feature files were given without an edge list")
    return load_network(cfg.edges, cfg.features, cfg.categorical_features)


def run_repetition(net: LabelledNetwork, cfg: RunConfig, repetition: int):
    """One full pipeline pass: partitions, responsibilities, weights, metrics."""
    if net.num_features == 0:
        raise DataFormatError("the weight sampler needs a feature matrix")

    block_cfg = BlockChainConfig(
        iterations=cfg.block_iters,
        burn_in=cfg.block_burn_in,
        thinning=cfg.block_thinning,
        smoothing=cfg.proposal_smoothing,
        init_restarts=cfg.init_restarts,
        seed=stream_seed_int(cfg.seed, "block-chain", repetition),
    )
    block_res = run_block_chain(net, cfg.num_blocks, block_cfg)
    responsibilities = estimate_responsibilities(
        block_res.samples, block_res.reference, cfg.num_blocks)

    split = split_vertices(net.num_vertices, cfg.train_fraction,
                           stream_seed_sequence(cfg.seed, "split", repetition))
    features = net.features.astype(np.float64)
    ctx = ObjectiveContext(features[split.train], responsibilities[split.train], cfg.sigma)
    weight_cfg = WeightChainConfig(
        iterations=cfg.theta_iters,
        burn_in=cfg.theta_burn_in,
        thinning=cfg.theta_thinning,
        sigma=cfg.sigma,
        step_scale=cfg.step_scale,
        seed=stream_seed_sequence(cfg.seed, "weight-chain", repetition),
    )
    weight_res = run_weight_chain(ctx, weight_cfg)

    retained_s = block_res.s_trace[block_res.retained]
    report = EvaluationReport(
        mean_dl=mean_description_length(retained_s, net.num_vertices, net.num_edges,
                                        cfg.num_blocks),
        loss_train=cross_entropy_loss(weight_res.samples, responsibilities, features, split.train),
        loss_test=cross_entropy_loss(weight_res.samples, responsibilities, features, split.test),
        accuracy_train=block_accuracy(weight_res.samples, responsibilities, features, split.train).tolist(),
        accuracy_test=block_accuracy(weight_res.samples, responsibilities, features, split.test).tolist(),
        acceptance_ratio=weight_res.acceptance_ratio,
        mean_objective=weight_res.mean_objective,
    )
    artifacts = RepetitionArtifacts(
        block_result=block_res,
        responsibilities=responsibilities,
        split=split,
        weight_result=weight_res,
    )

    if cfg.reduce_dim is not None:
        summary = summarize_weights(weight_res.samples)
        reduction = reduce_dimension(summary, cfg.reduce_multiplier, cfg.reduce_dim)
        reduced_features = features[:, reduction.kept]
        reduced_ctx = ObjectiveContext(
            reduced_features[split.train], responsibilities[split.train], cfg.sigma)
        reduced_cfg = WeightChainConfig(
            iterations=cfg.reduced_theta_iters,
            burn_in=cfg.reduced_theta_burn_in,
            thinning=cfg.reduced_theta_thinning,
            sigma=cfg.sigma,
            step_scale=cfg.reduced_step_scale,
            seed=stream_seed_sequence(cfg.seed, "reduced-weight-chain", repetition),
        )
        reduced_res = run_weight_chain(reduced_ctx, reduced_cfg)
        report.cutoff = reduction.cutoff
        report.kept_features = [int(d) for d in reduction.kept]
        report.reduced_loss_train = cross_entropy_loss(
            reduced_res.samples, responsibilities, reduced_features, split.train)
        report.reduced_loss_test = cross_entropy_loss(
            reduced_res.samples, responsibilities, reduced_features, split.test)
        report.reduced_acceptance_ratio = reduced_res.acceptance_ratio
        artifacts.reduction = reduction
        artifacts.reduced_weight_result = reduced_res

    return report, artifacts


def _repetition_task(args):
    net, cfg, repetition, keep_artifacts = args
    report, artifacts = run_repetition(net, cfg, repetition)
    return report, (artifacts if keep_artifacts else None)


def run_experiment(net: LabelledNetwork, cfg: RunConfig, jobs: int = 1, keep_artifacts: bool = False):
    """All repetitions, optionally in parallel processes; order is by index."""
    tasks = [(net, cfg, rep, keep_artifacts) for rep in range(cfg.repetitions)]
    if jobs > 1 and cfg.repetitions > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_repetition_task, tasks))
    else:
        results = [_repetition_task(t) for t in tasks]
    reports = [r for r, _ in results]
    artifacts = [a for _, a in results] if keep_artifacts else None
    return reports, artifacts


_LIST_METRICS = ("accuracy_train", "accuracy_test")
_SKIP_METRICS = ("kept_features",)


def aggregate_reports(reports) -> dict:
    """Mean and population std of every numeric metric across repetitions.

    Per-block accuracy lists are aggregated elementwise ignoring undefined
    (empty-block) entries; all-undefined entries aggregate to null.
    """
    dicts = [r.to_dict() for r in reports]
    mean, std = {}, {}
    for key in dicts[0]:
        if key in _SKIP_METRICS:
            continue
        values = [d.get(key) for d in dicts]
        if key in _LIST_METRICS:
            arr = np.array([[np.nan if v is None else v for v in row] for row in values], dtype=float)
            with np.errstate(invalid="ignore"):
                m = np.nanmean(arr, axis=0)
                s = np.nanstd(arr, axis=0)
            mean[key] = [None if np.isnan(x) else float(x) for x in m]
            std[key] = [None if np.isnan(x) else float(x) for x in s]
        else:
            numeric = np.array([v for v in values if v is not None], dtype=float)
            if numeric.size == 0:
                mean[key] = None
                std[key] = None
            else:
                mean[key] = float(numeric.mean())
                std[key] = float(numeric.std(ddof=0))
    return {"mean": mean, "std": std}


def experiment_payload(net: LabelledNetwork, cfg: RunConfig, reports) -> dict:
    """JSON-ready experiment summary mirroring the per-dataset results table."""
    payload = {
        "dataset": {
            "num_vertices": net.num_vertices,
            "num_edges": net.num_edges,
            "num_features": net.num_features,
            "feature_names": list(net.feature_names),
        },
        "config": cfg.to_dict(),
        "per_repetition": [r.to_dict() for r in reports],
    }
    payload.update(aggregate_reports(reports))
    return payload
