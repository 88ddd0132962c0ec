"""Experiment harness: sweep corruption levels, run the three estimators on
shared data, and write CSV/JSON results.

Determinism: every trial derives its world and node data from
(master_seed, trial) substreams only, so all corruption levels of a trial
share the clean nodes' data and two runs with the same master seed produce
byte-identical CSV output. Wall-clock timing is therefore recorded only when
explicitly enabled; the canonical artifact keeps the column at zero.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import __version__
from .filtering import ProxyMode, RemovalMode
from .linalg import OrthonormalFrame, subspace_dist, procrustes_factor
from .pipeline import (
    PipelineConfig,
    aligned_ground_truth,
    covariance_diagnostic,
    naive_estimate,
    procrustes_only_estimate,
    robust_estimate,
)
from .alignment import procrustes_fixing
from .reference import robust_reference
from .linalg import pairwise_subspace_distances
from .seeding import substream_seed
from .synthetic import (
    AdversaryKind,
    CorruptionSpec,
    SpectrumModel,
    WorldInstance,
    apply_corruption,
    build_world,
    clean_responses,
)

WORLD_STREAM = 10
RESPONSE_STREAM = 11
FILTER_STREAM = 12

CSV_HEADER = (
    "alpha,trial,method,dist,raw_err,removed_count,realized_kappa,seed,wall_time_ms"
)

DEFAULT_ALPHA_GRID = tuple(round(0.05 * i, 2) for i in range(10))


class OmegaRule(Enum):
    SQRT_INV_MN = "sqrt-inv-mn"
    FIXED = "fixed"


class Method(Enum):
    ROBUST = "Robust"
    PROCRUSTES = "Procrustes"
    NAIVE = "Naive"


@dataclass(frozen=True)
class ExperimentConfig:
    d: int = 60
    r: int = 5
    r_star_ratio: float = 2.0
    delta: float = 0.25
    m: int = 150
    n_per_r: int = 50
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    trials: int = 10
    failure_prob: float = 0.01
    omega_rule: OmegaRule = OmegaRule.SQRT_INV_MN
    omega_value: float | None = None
    removal_mode: RemovalMode = RemovalMode.DETERMINISTIC_MAX
    proxy_mode: ProxyMode = ProxyMode.SIMPLIFIED
    master_seed: int = 0
    record_wall_time: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if any(not 0 <= a < 0.5 for a in self.alpha_grid):
            raise ValueError(f"every alpha must be in [0, 0.5): {self.alpha_grid}")
        if self.omega_rule is OmegaRule.FIXED and not self.omega_value:
            raise ValueError("omega_rule 'fixed' requires omega_value > 0")

    @property
    def n(self) -> int:
        return self.n_per_r * self.r

    @property
    def r_star(self) -> float:
        return self.r_star_ratio * self.r

    def spectrum_model(self) -> SpectrumModel:
        return SpectrumModel(d=self.d, r=self.r, r_star=self.r_star, delta=self.delta)

    def omega(self) -> float:
        if self.omega_rule is OmegaRule.FIXED:
            return float(self.omega_value)
        return math.sqrt(1.0 / (self.m * self.n))

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "r": self.r,
            "r_star_ratio": self.r_star_ratio,
            "delta": self.delta,
            "m": self.m,
            "n_per_r": self.n_per_r,
            "alpha_grid": list(self.alpha_grid),
            "trials": self.trials,
            "failure_prob": self.failure_prob,
            "omega_rule": self.omega_rule.value,
            "omega_value": self.omega_value,
            "removal_mode": self.removal_mode.value,
            "proxy_mode": self.proxy_mode.value,
            "master_seed": self.master_seed,
            "record_wall_time": self.record_wall_time,
            "workers": self.workers,
        }


@dataclass(frozen=True)
class TrialRecord:
    alpha: float
    trial_index: int
    method: Method
    dist: float
    raw_err: float
    removed_count: int
    realized_kappa: float
    seed: int
    wall_time_ms: float

    def sort_key(self):
        return (self.alpha, self.trial_index, self.method.value)


def _raw_alignment_error(raw_mean: np.ndarray, v_true: OrthonormalFrame) -> float:
    """Spectral norm of raw mean minus the optimally rotated ground truth."""
    z = procrustes_factor(v_true.data, raw_mean)
    return float(np.linalg.svd(raw_mean - v_true.data @ z, compute_uv=False)[0])


def _estimate_once(method, responses, config, trial, alpha_index, distances):
    if method is Method.ROBUST:
        report = robust_estimate(
            responses,
            PipelineConfig(
                alpha=config.alpha_grid[alpha_index],
                omega=config.omega(),
                failure_prob=config.failure_prob,
                removal_mode=config.removal_mode,
                proxy_mode=config.proxy_mode,
                rng_seed=substream_seed(config.master_seed, FILTER_STREAM, trial, alpha_index),
            ),
            distances,
        )
    elif method is Method.PROCRUSTES:
        report = procrustes_only_estimate(responses, distances)
    else:
        report = naive_estimate(responses)
    return report


def run_trial(config: ExperimentConfig, trial: int) -> list[TrialRecord]:
    """All records for one trial: every corruption level times three methods."""
    model = config.spectrum_model()
    world = build_world(model, substream_seed(config.master_seed, WORLD_STREAM, trial))
    response_seed = substream_seed(config.master_seed, RESPONSE_STREAM, trial)
    clean = clean_responses(world, config.m, config.n, response_seed)
    records = []
    for alpha_index, alpha in enumerate(config.alpha_grid):
        spec = CorruptionSpec(alpha=alpha, strategy=AdversaryKind.COLLUSION_NEAR_ORTHOGONAL)
        responses, _good = apply_corruption(world, clean, spec, response_seed)
        distances = pairwise_subspace_distances(responses)
        for method in Method:
            start = time.perf_counter()
            try:
                report = _estimate_once(
                    method, responses, config, trial, alpha_index, distances
                )
                dist = subspace_dist(report.orthonormalized, world.v_true)
                raw_err = _raw_alignment_error(report.raw_mean, world.v_true)
                removed = (
                    len(report.filter_outcome.removed) if report.filter_outcome else 0
                )
            except Exception:
                dist, raw_err, removed = math.nan, math.nan, -1
            elapsed_ms = (time.perf_counter() - start) * 1e3
            records.append(
                TrialRecord(
                    alpha=alpha,
                    trial_index=trial,
                    method=method,
                    dist=dist,
                    raw_err=raw_err,
                    removed_count=removed,
                    realized_kappa=world.kappa,
                    seed=response_seed,
                    wall_time_ms=elapsed_ms if config.record_wall_time else 0.0,
                )
            )
    return records


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """Run every trial and return records sorted by (alpha, trial, method)."""
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(run_trial, [config] * config.trials, range(config.trials)))
        records = [rec for chunk in chunks for rec in chunk]
    else:
        records = [rec for t in range(config.trials) for rec in run_trial(config, t)]
    return sorted(records, key=TrialRecord.sort_key)


def eq15_diagnostics(config: ExperimentConfig) -> list[tuple[float, int, float, float]]:
    """Replay each trial's alignment and evaluate the covariance bound.

    Returns (alpha, trial, lhs, rhs) per trial and corruption level, with
    the ground truth aligned to the realized reference frame. Only the
    reference/alignment stages are recomputed; seeds match run_experiment,
    so the inspected data is identical to the main run's.
    """
    out = []
    model = config.spectrum_model()
    for trial in range(config.trials):
        world = build_world(model, substream_seed(config.master_seed, WORLD_STREAM, trial))
        response_seed = substream_seed(config.master_seed, RESPONSE_STREAM, trial)
        clean = clean_responses(world, config.m, config.n, response_seed)
        for alpha in config.alpha_grid:
            spec = CorruptionSpec(alpha=alpha)
            responses, good = apply_corruption(world, clean, spec, response_seed)
            reference = robust_reference(responses)
            aligned = procrustes_fixing(responses, reference.frame)
            truth = aligned_ground_truth(world.v_true, reference.frame)
            lhs, rhs = covariance_diagnostic(responses, aligned, truth, good)
            out.append((alpha, trial, lhs, rhs))
    return out


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_csv(records: list[TrialRecord], path) -> None:
    """Write records with a fixed header, 17 significant digits, LF endings."""
    if not records:
        raise ValueError("refusing to write an empty record list")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for rec in records:
                fh.write(
                    ",".join(
                        [
                            _fmt(rec.alpha),
                            str(rec.trial_index),
                            rec.method.value,
                            _fmt(rec.dist),
                            _fmt(rec.raw_err),
                            str(rec.removed_count),
                            _fmt(rec.realized_kappa),
                            str(rec.seed),
                            _fmt(rec.wall_time_ms),
                        ]
                    )
                    + "\n"
                )
    except OSError as exc:
        raise OSError(f"failed to write results CSV to {path}: {exc}") from exc


def read_csv(path) -> list[TrialRecord]:
    """Parse a results CSV back into records (round-trip of write_csv)."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != CSV_HEADER.split(","):
                raise ValueError(f"unexpected CSV header in {path}: {reader.fieldnames}")
            return [
                TrialRecord(
                    alpha=float(row["alpha"]),
                    trial_index=int(row["trial"]),
                    method=Method(row["method"]),
                    dist=float(row["dist"]),
                    raw_err=float(row["raw_err"]),
                    removed_count=int(row["removed_count"]),
                    realized_kappa=float(row["realized_kappa"]),
                    seed=int(row["seed"]),
                    wall_time_ms=float(row["wall_time_ms"]),
                )
                for row in reader
            ]
    except OSError as exc:
        raise OSError(f"failed to read results CSV from {path}: {exc}") from exc


def summarize(records: list[TrialRecord]) -> list[dict]:
    """Mean and sample standard deviation of dist per (alpha, method)."""
    cells: dict[tuple[float, str], list[float]] = {}
    for rec in records:
        cells.setdefault((rec.alpha, rec.method.value), []).append(rec.dist)
    out = []
    for (alpha, method), dists in sorted(cells.items()):
        arr = np.array(dists)
        std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        out.append(
            {
                "alpha": alpha,
                "method": method,
                "mean_dist": float(arr.mean()),
                "std_dist": std,
                "n_trials": len(arr),
            }
        )
    return out


def write_summary_json(records: list[TrialRecord], path, config: ExperimentConfig) -> None:
    payload = {
        "library_version": __version__,
        "config": config.to_dict(),
        "omega": config.omega(),
        "cells": summarize(records),
    }
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed to write summary JSON to {path}: {exc}") from exc
