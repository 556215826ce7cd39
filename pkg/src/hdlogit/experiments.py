"""Experiment orchestration: replication runs, training/test/aMSE sweeps,
space-filling designs, and the CSV record format.

Every replicate is an independent task keyed by (point_id, replicate), so
sweeps parallelize over a thread pool without changing results; output
ordering is fixed by task order, not scheduling.  numpy's BLAS releases the
GIL during the heavy solves, which is where the time goes.
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import expit
from scipy.stats import qmc

from .analysis import (
    DEFAULT_RESCALE_COEFFICIENTS,
    RescaleCoefficients,
    aggregate_bias,
    aggregate_mse,
    shrinkage_factor,
)
from .errors import DegenerateDesign, HdlogitError
from .glm import FitResult, GlmControl, LogisticData, fit_ml, fit_mjpl
from .numerics import simple_linreg
from .phase import mle_existence_threshold
from .separation import detect_separation
from .simulate import GeneratedSample, SimConfig, generate_dataset, make_signal, rng_from

__all__ = [
    "TEST_GRID_POINTS",
    "ReplicationRecord",
    "PointSummary",
    "AmseCell",
    "TrainingResult",
    "run_replication",
    "run_training_experiment",
    "run_test_experiment",
    "run_amse_experiment",
    "space_filling_design",
    "nonexistence_design",
    "RECORD_FIELDS",
    "write_records_csv",
    "write_training_summary_csv",
    "read_training_summary_csv",
    "write_amse_csv",
]

# The 30 (kappa, gamma) evaluation points used by the test sweeps.
TEST_GRID_POINTS: tuple[tuple[float, float], ...] = (
    (0.01, 1.0), (0.01, 8.0), (0.01, 15.0),
    (0.05, 4.5), (0.05, 11.5), (0.05, 18.5),
    (0.15, 1.0), (0.15, 8.0), (0.15, 15.0),
    (0.22, 8.0), (0.22, 15.0),
    (0.25, 4.5), (0.25, 11.5), (0.25, 18.5),
    (0.30, 8.0), (0.30, 15.0),
    (0.35, 1.0), (0.35, 4.5), (0.35, 11.5), (0.35, 18.5),
    (0.40, 8.0), (0.40, 15.0),
    (0.45, 4.5), (0.45, 11.5), (0.45, 18.5),
    (0.50, 8.0), (0.50, 15.0),
    (0.55, 4.5), (0.55, 11.5), (0.55, 18.5),
)


@dataclass
class ReplicationRecord:
    """Per-sample outcome; the first 18 fields form the CSV schema."""

    point_id: int
    kappa: float
    gamma: float
    rho2: float
    psi: float
    n: int
    p: int
    config: str
    seed: int
    replicate: int
    exists: bool | None
    separated: bool | None
    delta0: float
    delta1: float
    agg_bias: float
    agg_mse: float
    iterations: int
    seconds: float
    # Extras outside the CSV schema.
    ml_delta0: float = math.nan
    ml_delta1: float = math.nan
    error: str = ""


RECORD_FIELDS = tuple(f.name for f in fields(ReplicationRecord))[:18]


@dataclass
class PointSummary:
    point_id: int
    kappa: float
    gamma: float
    rho2: float
    beta0: float
    gamma0: float
    exists: bool
    h_value: float
    n_reps: int
    mean_delta0: float
    mean_delta1: float
    sd_delta1: float


@dataclass
class TrainingResult:
    summaries: list[PointSummary]
    records: list[ReplicationRecord]


@dataclass
class AmseCell:
    kappa: float
    gamma: float
    n: int
    p: int
    reps: int
    exists: bool
    q: float
    mean_amse: float
    se_amse: float
    mean_bias: float


@lru_cache(maxsize=4096)
def _cached_threshold(beta0: float, gamma0: float, quad_nodes: int) -> float:
    return mle_existence_threshold(beta0, gamma0, quad_nodes)


def run_replication(
    cfg: SimConfig,
    fitter: Callable[[LogisticData, GeneratedSample], FitResult] | None = None,
    control: GlmControl | None = None,
    exists: bool | None = None,
    check_separation: bool | None = None,
    fit_ml_too: bool = False,
    quad_nodes: int = 60,
) -> ReplicationRecord:
    """Simulate one dataset, fit it, and regress estimates on the truth.

    ``fitter`` defaults to the penalized fit; stub fitters receive both the
    dataset and the generating sample, which keeps the record arithmetic
    testable without real fits.  ``exists`` may be passed in (sweeps compute
    it once per design point); otherwise it comes from the analytic
    threshold for normal covariates and from a separation check for
    Bernoulli covariates.  Fit errors land in ``record.error`` rather than
    propagating.
    """
    sample = generate_dataset(cfg)

    if check_separation is None:
        check_separation = cfg.covariate_family == "bernoulli"
    separated = detect_separation(sample.data).separated if check_separation else None

    if exists is None:
        if cfg.covariate_family == "bernoulli":
            exists = not separated
        else:
            exists = cfg.kappa < _cached_threshold(cfg.beta0, cfg.gamma0, quad_nodes)

    record = ReplicationRecord(
        point_id=cfg.point_id,
        kappa=cfg.kappa,
        gamma=cfg.gamma,
        rho2=cfg.rho2,
        psi=cfg.psi,
        n=cfg.n,
        p=cfg.p,
        config=cfg.signal_config,
        seed=cfg.seed,
        replicate=cfg.replicate,
        exists=exists,
        separated=separated,
        delta0=math.nan,
        delta1=math.nan,
        agg_bias=math.nan,
        agg_mse=math.nan,
        iterations=0,
        seconds=0.0,
    )

    try:
        if fitter is None:
            fit = fit_mjpl(sample.data, control)
        else:
            fit = fitter(sample.data, sample)
    except HdlogitError as exc:
        record.error = str(exc)
        return record

    slopes = fit.theta[1:] if sample.data.has_intercept else fit.theta
    record.iterations = fit.iterations
    record.seconds = fit.elapsed
    record.agg_bias = aggregate_bias(slopes, sample.beta_true)
    record.agg_mse = aggregate_mse(slopes, sample.beta_true)
    try:
        record.delta0, record.delta1 = simple_linreg(sample.beta_true, slopes)
    except DegenerateDesign:
        pass  # constant truth: keep aggregates, leave the regression blank

    if fit_ml_too and exists:
        try:
            ml = fit_ml(sample.data, control, start=fit.theta.copy())
            if ml.converged:
                ml_slopes = ml.theta[1:] if sample.data.has_intercept else ml.theta
                record.ml_delta0, record.ml_delta1 = simple_linreg(
                    sample.beta_true, ml_slopes
                )
        except (HdlogitError, DegenerateDesign):
            pass
    return record


def _run_tasks(
    tasks: Sequence[SimConfig],
    workers: int,
    runner: Callable[[SimConfig], ReplicationRecord],
) -> list[ReplicationRecord]:
    if workers <= 1:
        return [runner(cfg) for cfg in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(runner, tasks))


def run_training_experiment(
    design_points: Sequence[tuple[float, float, float]],
    n: int,
    reps: int,
    seed: int,
    control: GlmControl | None = None,
    workers: int = 1,
    quad_nodes: int = 60,
    fit_ml_too: bool = False,
) -> TrainingResult:
    """Sweep (kappa, gamma, rho2) design points with ``reps`` replicates each.

    Covariates are independent standard normal (psi = 0), the signal template
    is the 1..10 training grid, and every record carries the analytic
    existence flag of its design point.  Summaries average the per-sample
    regression coefficients across replicates.
    """
    if not design_points:
        raise ValueError("design must contain at least one point")
    point_exists: list[bool] = []
    h_values: list[float] = []
    tasks: list[SimConfig] = []
    for point_id, (kappa, gamma, rho2) in enumerate(design_points):
        beta0 = gamma * math.sqrt(rho2)
        gamma0 = gamma * math.sqrt(1.0 - rho2)
        h = _cached_threshold(beta0, gamma0, quad_nodes)
        h_values.append(h)
        point_exists.append(kappa < h)
        for rep in range(reps):
            tasks.append(
                SimConfig(
                    n=n,
                    kappa=kappa,
                    gamma=gamma,
                    rho2=rho2,
                    psi=0.0,
                    signal_config="train-grid",
                    seed=seed,
                    replicate=rep,
                    point_id=point_id,
                )
            )

    def runner(cfg: SimConfig) -> ReplicationRecord:
        return run_replication(
            cfg,
            control=control,
            exists=point_exists[cfg.point_id],
            fit_ml_too=fit_ml_too,
        )

    records = _run_tasks(tasks, workers, runner)

    summaries = []
    for point_id, (kappa, gamma, rho2) in enumerate(design_points):
        deltas0 = [r.delta0 for r in records if r.point_id == point_id]
        deltas1 = [r.delta1 for r in records if r.point_id == point_id]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN slices
            mean_d0 = float(np.nanmean(deltas0))
            mean_d1 = float(np.nanmean(deltas1))
            sd_d1 = float(np.nanstd(deltas1, ddof=1)) if len(deltas1) > 1 else 0.0
        summaries.append(
            PointSummary(
                point_id=point_id,
                kappa=kappa,
                gamma=gamma,
                rho2=rho2,
                beta0=gamma * math.sqrt(rho2),
                gamma0=gamma * math.sqrt(1.0 - rho2),
                exists=point_exists[point_id],
                h_value=h_values[point_id],
                n_reps=len(deltas1),
                mean_delta0=mean_d0,
                mean_delta1=mean_d1,
                sd_delta1=sd_d1,
            )
        )
    return TrainingResult(summaries=summaries, records=records)


def run_test_experiment(
    n_values: Sequence[int],
    psi_values: Sequence[float],
    rho2_values: Sequence[float],
    configs: Sequence[str],
    seed: int,
    points: Sequence[tuple[float, float]] = TEST_GRID_POINTS,
    control: GlmControl | None = None,
    workers: int = 1,
    quad_nodes: int = 60,
) -> list[ReplicationRecord]:
    """One sample per grid point for every (n, psi, rho2, config) combination.

    The replicate index encodes the combination, so streams stay distinct
    across cells under a single experiment seed.
    """
    combos = [
        (n, psi, rho2, config)
        for n in n_values
        for psi in psi_values
        for rho2 in rho2_values
        for config in configs
    ]
    tasks = []
    flags = {}
    for combo_id, (n, psi, rho2, config) in enumerate(combos):
        for point_id, (kappa, gamma) in enumerate(points):
            cfg = SimConfig(
                n=n,
                kappa=kappa,
                gamma=gamma,
                rho2=rho2,
                psi=psi,
                signal_config=config,
                seed=seed,
                replicate=combo_id,
                point_id=point_id,
            )
            flags[(combo_id, point_id)] = cfg.kappa < _cached_threshold(
                cfg.beta0, cfg.gamma0, quad_nodes
            )
            tasks.append(cfg)

    def runner(cfg: SimConfig) -> ReplicationRecord:
        return run_replication(
            cfg, control=control, exists=flags[(cfg.replicate, cfg.point_id)]
        )

    return _run_tasks(tasks, workers, runner)


def run_amse_experiment(
    kappa_grid: Sequence[float],
    gamma_grid: Sequence[float],
    n: int,
    reps: int,
    seed: int,
    coefficients: RescaleCoefficients = DEFAULT_RESCALE_COEFFICIENTS,
    control: GlmControl | None = None,
    workers: int = 1,
    quad_nodes: int = 60,
) -> list[AmseCell]:
    """Aggregate MSE of the rescaled penalized estimator, no-intercept setup.

    Covariate entries are i.i.d. normal with variance 1/p and the signal is
    the symmetric template scaled so that ||beta||^2 / p = gamma^2 (hence
    gamma0 = gamma and beta0 = 0).  Each cell reports the mean and standard
    error over ``reps`` independent datasets of
    mean_j (theta_j / q - beta_j)^2.
    """
    cells = []
    cell_points = [(k, g) for k in kappa_grid for g in gamma_grid]

    def run_cell(args: tuple[int, float, float]) -> AmseCell:
        point_id, kappa, gamma = args
        p = max(1, math.ceil(n * kappa))
        exists = kappa < _cached_threshold(0.0, gamma, quad_nodes)
        q = shrinkage_factor(kappa, gamma, gamma, coefficients, mle_exists=exists)
        template = make_signal("s1", p)
        beta = template * (gamma * math.sqrt(p) / float(np.linalg.norm(template)))
        amses = np.empty(reps)
        biases = np.empty(reps)
        for rep in range(reps):
            rng = rng_from(seed, point_id, rep)
            x = rng.standard_normal((n, p)) / math.sqrt(p)
            y = (rng.random(n) < expit(x @ beta)).astype(float)
            data = LogisticData(y=y, x=x, has_intercept=False)
            fit = fit_mjpl(data, control)
            rescaled = fit.theta / q
            amses[rep] = aggregate_mse(rescaled, beta)
            biases[rep] = aggregate_bias(rescaled, beta)
        se = float(np.std(amses, ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
        return AmseCell(
            kappa=kappa,
            gamma=gamma,
            n=n,
            p=p,
            reps=reps,
            exists=exists,
            q=q,
            mean_amse=float(np.mean(amses)),
            se_amse=se,
            mean_bias=float(np.mean(biases)),
        )

    jobs = [(i, k, g) for i, (k, g) in enumerate(cell_points)]
    if workers <= 1:
        cells = [run_cell(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(run_cell, jobs))
    return cells


def space_filling_design(
    count: int,
    seed: int,
    box: Sequence[tuple[float, float]] = ((0.0, 0.6), (0.0, 20.0), (0.0, 1.0)),
) -> np.ndarray:
    """Scrambled Sobol points over the (kappa, gamma, rho2) box."""
    sampler = qmc.Sobol(d=len(box), scramble=True, seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # non power-of-two draw
        unit = sampler.random(count)
    lo = [b[0] for b in box]
    hi = [b[1] for b in box]
    return qmc.scale(unit, lo, hi)


def nonexistence_design(
    count: int,
    seed: int,
    rho2_max: float = 0.7,
    margin: float = 0.0,
    kappa_min: float = 0.0,
    gamma_min: float = 0.0,
    quad_nodes: int = 60,
) -> np.ndarray:
    """First ``count`` space-filling points inside the non-existence region.

    Filters the Sobol stream to points with rho2 <= rho2_max and
    kappa >= threshold + margin; the optional floors keep desk-scale runs
    away from degenerate corners (tiny p or vanishing signal).
    """
    sampler = qmc.Sobol(d=3, scramble=True, seed=seed)
    selected: list[np.ndarray] = []
    for _ in range(200):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            batch = qmc.scale(sampler.random(64), [0.0, 0.0, 0.0], [0.6, 20.0, 1.0])
        for kappa, gamma, rho2 in batch:
            if rho2 > rho2_max or kappa < kappa_min or gamma <= gamma_min:
                continue
            beta0 = gamma * math.sqrt(rho2)
            gamma0 = gamma * math.sqrt(1.0 - rho2)
            if kappa < _cached_threshold(beta0, gamma0, quad_nodes) + margin:
                continue
            selected.append(np.array([kappa, gamma, rho2]))
            if len(selected) == count:
                return np.vstack(selected)
    raise RuntimeError("could not find enough qualifying design points")


# ---------------------------------------------------------------------------
# CSV serialization.  Reruns with the same seed must be byte identical, so
# wall-clock timing is written only on request.
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def write_records_csv(records: Iterable[ReplicationRecord], path, timing: bool = False) -> None:
    """Write replication records under the fixed 18-column schema.

    ``timing=False`` blanks the ``seconds`` column so reruns with the same
    seed produce byte-identical files.
    """
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RECORD_FIELDS)
        for record in records:
            row = [getattr(record, name) for name in RECORD_FIELDS]
            if not timing:
                row[RECORD_FIELDS.index("seconds")] = None
            writer.writerow([_fmt(v) for v in row])


SUMMARY_FIELDS = (
    "point_id", "kappa", "gamma", "rho2", "beta0", "gamma0",
    "exists", "h_value", "n_reps", "mean_delta0", "mean_delta1", "sd_delta1",
)


def write_training_summary_csv(summaries: Iterable[PointSummary], path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SUMMARY_FIELDS)
        for s in summaries:
            writer.writerow([_fmt(getattr(s, name)) for name in SUMMARY_FIELDS])


def read_training_summary_csv(path) -> list[PointSummary]:
    summaries = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        missing = set(SUMMARY_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"summary file missing columns: {sorted(missing)}")
        for row in reader:
            summaries.append(
                PointSummary(
                    point_id=int(row["point_id"]),
                    kappa=float(row["kappa"]),
                    gamma=float(row["gamma"]),
                    rho2=float(row["rho2"]),
                    beta0=float(row["beta0"]),
                    gamma0=float(row["gamma0"]),
                    exists=row["exists"] == "true",
                    h_value=float(row["h_value"]),
                    n_reps=int(row["n_reps"]),
                    mean_delta0=float(row["mean_delta0"]) if row["mean_delta0"] else math.nan,
                    mean_delta1=float(row["mean_delta1"]) if row["mean_delta1"] else math.nan,
                    sd_delta1=float(row["sd_delta1"]) if row["sd_delta1"] else math.nan,
                )
            )
    return summaries


AMSE_FIELDS = (
    "kappa", "gamma", "n", "p", "reps", "exists", "q",
    "mean_amse", "se_amse", "mean_bias",
)


def write_amse_csv(cells: Iterable[AmseCell], path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(AMSE_FIELDS)
        for cell in cells:
            writer.writerow([_fmt(getattr(cell, name)) for name in AMSE_FIELDS])
