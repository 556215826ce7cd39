"""Command-line front end.

Subcommands: fit, simulate, train, test, amse, phase, separation, rescale,
fit-b.  Data goes to files or standard output; progress and summaries go to
standard error, so outputs stay pipeable.  Every file-writing command also
writes ``<out>.manifest.json`` recording the resolved parameters, seed, and
constants, and reruns with the same spec and seed are byte-identical
(timing columns are blank unless ``--timing`` is given).

Exit codes: 0 success, 1 usage or I/O error, 2 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .analysis import (
    DEFAULT_RESCALE_COEFFICIENTS,
    RescaleCoefficients,
    bootstrap_bca,
    fit_power_law,
    shrinkage_factor,
)
from .errors import HdlogitError
from .experiments import (
    TEST_GRID_POINTS,
    read_training_summary_csv,
    run_amse_experiment,
    run_test_experiment,
    run_training_experiment,
    space_filling_design,
    write_amse_csv,
    write_records_csv,
    write_training_summary_csv,
)
from .glm import CONVERGED, GlmControl, LogisticData, fit_ml, fit_mjpl
from .phase import ANALYTIC, MONTE_CARLO, PhasePoint, mle_exists_asymptotically
from .separation import detect_separation
from .simulate import SIGNAL_CONFIGS, SimConfig, generate_dataset


class UsageError(Exception):
    """Bad arguments, unreadable files, malformed specs."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise UsageError(message)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    return repr(float(x))


def read_dataset_csv(path: str, has_intercept: bool = True) -> LogisticData:
    """Read a dataset CSV with header y,x1,...,xp (p may be zero)."""
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise UsageError(f"cannot open {path}: {exc}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise UsageError(f"{path}: empty file") from None
        expected = ["y"] + [f"x{j}" for j in range(1, len(header))]
        if header != expected:
            raise UsageError(
                f"{path}: header must be y,x1,...,xp; got {','.join(header)}"
            )
        p = len(header) - 1
        ys, rows = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != p + 1:
                raise UsageError(
                    f"{path}: line {line_no}: expected {p + 1} fields, got {len(row)}"
                )
            try:
                ys.append(float(row[0]))
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise UsageError(f"{path}: line {line_no}: {exc}") from None
    if not ys:
        raise UsageError(f"{path}: no data rows")
    x = np.asarray(rows, dtype=float).reshape(len(ys), p)
    try:
        return LogisticData(y=np.asarray(ys), x=x, has_intercept=has_intercept)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def write_dataset_csv(data: LogisticData, path: str) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["y"] + [f"x{j}" for j in range(1, data.p + 1)])
        for i in range(data.n):
            writer.writerow([_fmt_float(data.y[i])] + [_fmt_float(v) for v in data.x[i]])


def _coef_terms(n_coefs: int, has_intercept: bool) -> list[str]:
    slopes = [f"x{j}" for j in range(1, n_coefs + 1 - int(has_intercept))]
    return (["intercept"] if has_intercept else []) + slopes


def write_coef_csv(terms: list[str], values, out) -> None:
    writer = csv.writer(out) if hasattr(out, "write") else None
    if writer is None:
        with open(out, "w", newline="") as handle:
            _write_coef_rows(csv.writer(handle), terms, values)
    else:
        _write_coef_rows(writer, terms, values)


def _write_coef_rows(writer, terms, values) -> None:
    writer.writerow(["term", "estimate"])
    for term, value in zip(terms, values):
        writer.writerow([term, _fmt_float(value)])


def read_coef_csv(path: str) -> tuple[list[str], np.ndarray]:
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise UsageError(f"cannot open {path}: {exc}") from None
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["term", "estimate"]:
            raise UsageError(f"{path}: expected header term,estimate")
        terms, values = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise UsageError(f"{path}: line {line_no}: expected 2 fields")
            try:
                values.append(float(row[1]))
            except ValueError as exc:
                raise UsageError(f"{path}: line {line_no}: {exc}") from None
            terms.append(row[0])
    return terms, np.asarray(values)


def write_manifest(out_path: str, payload: dict) -> None:
    payload = dict(payload)
    payload["version"] = __version__
    with open(str(out_path) + ".manifest.json", "w") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


# ---------------------------------------------------------------------------
# Experiment specs (JSON)
# ---------------------------------------------------------------------------

_SPEC_SCHEMAS = {
    "train": {
        "points": int, "design": str, "n": int, "reps": int, "seed": int,
        "workers": int, "tol": float, "max_iter": int, "timing": bool,
    },
    "test": {
        "n": list, "psi": list, "rho2": list, "config": list, "seed": int,
        "workers": int, "tol": float, "max_iter": int, "timing": bool,
    },
    "amse": {
        "kappa_grid": list, "gamma_grid": list, "n": int, "reps": int,
        "seed": int, "workers": int, "tol": float, "max_iter": int,
        "b0": float, "b1": float, "b2": float, "b3": float,
    },
}


def load_spec(path: str, command: str) -> dict:
    schema = _SPEC_SCHEMAS[command]
    try:
        with open(path) as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise UsageError(f"cannot open {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise UsageError(f"{path}: spec must be a JSON object")
    problems = []
    for key, value in payload.items():
        if key not in schema:
            problems.append(f"unknown field {key!r}")
            continue
        expected = schema[key]
        if expected is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            continue
        if expected is int and isinstance(value, bool):
            problems.append(f"field {key!r}: expected {expected.__name__}, got bool")
            continue
        if not isinstance(value, expected):
            problems.append(
                f"field {key!r}: expected {expected.__name__}, got {type(value).__name__}"
            )
    if problems:
        raise UsageError(f"{path}: " + "; ".join(problems))
    return payload


def _resolve(flag_value, spec: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in spec:
        return spec[key]
    return default


def _control(args, spec: dict | None = None) -> GlmControl:
    spec = spec or {}
    tol = _resolve(getattr(args, "tol", None), spec, "tol", 1e-3)
    max_iter = _resolve(getattr(args, "max_iter", None), spec, "max_iter", 300)
    return GlmControl(tol=tol, max_iter=max_iter)


def _coefficients(args, spec: dict | None = None) -> RescaleCoefficients:
    spec = spec or {}
    d = DEFAULT_RESCALE_COEFFICIENTS
    return RescaleCoefficients(
        b0=_resolve(getattr(args, "b0", None), spec, "b0", d.b0),
        b1=_resolve(getattr(args, "b1", None), spec, "b1", d.b1),
        b2=_resolve(getattr(args, "b2", None), spec, "b2", d.b2),
        b3=_resolve(getattr(args, "b3", None), spec, "b3", d.b3),
        phi=d.phi,
    )


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_fit(args) -> int:
    data = read_dataset_csv(args.data, has_intercept=not args.no_intercept)
    control = _control(args)
    if args.method == "mjpl":
        fit = fit_mjpl(data, control)
    else:
        fit = fit_ml(data, control)
    terms = _coef_terms(fit.theta.size, data.has_intercept)
    if args.out:
        write_coef_csv(terms, fit.theta, args.out)
        write_manifest(args.out, {
            "command": "fit", "method": args.method, "data": args.data,
            "tol": control.tol, "max_iter": control.max_iter,
            "status": fit.status, "iterations": fit.iterations,
        })
    else:
        write_coef_csv(terms, fit.theta, sys.stdout)
    print(
        f"method={args.method} status={fit.status} converged={str(fit.converged).lower()} "
        f"iterations={fit.iterations} score_norm={fit.score_norm:.3e}",
        file=sys.stderr,
    )
    return 0 if fit.status == CONVERGED else 2


def cmd_simulate(args) -> int:
    cfg = SimConfig(
        n=args.n, kappa=args.kappa, gamma=args.gamma, rho2=args.rho2,
        psi=args.psi, signal_config=args.config,
        covariate_family=args.family, bernoulli_p=args.bernoulli_p,
        seed=args.seed if args.seed is not None else 0,
        replicate=args.replicate, point_id=args.point_id,
    )
    sample = generate_dataset(cfg)
    write_dataset_csv(sample.data, args.out)
    if args.truth:
        terms = ["intercept"] + [f"x{j}" for j in range(1, cfg.p + 1)]
        write_coef_csv(terms, [sample.beta0_true, *sample.beta_true], args.truth)
    write_manifest(args.out, {"command": "simulate", **asdict(cfg)})
    print(f"wrote n={cfg.n} p={cfg.p} dataset to {args.out}", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    spec = load_spec(args.spec, "train") if args.spec else {}
    n = _resolve(args.n, spec, "n", 500)
    reps = _resolve(args.reps, spec, "reps", 10)
    seed = _resolve(args.seed, spec, "seed", 0)
    workers = _resolve(args.workers, spec, "workers", 1)
    timing = args.timing or spec.get("timing", False)
    control = _control(args, spec)
    if args.design or "design" in spec:
        path = args.design or spec["design"]
        design = _read_design_csv(path)
    else:
        count = _resolve(args.points, spec, "points", 100)
        design = [tuple(row) for row in space_filling_design(count, seed)]
    result = run_training_experiment(
        design, n=n, reps=reps, seed=seed, control=control, workers=workers
    )
    write_training_summary_csv(result.summaries, args.out)
    if args.records:
        write_records_csv(result.records, args.records, timing=timing)
    write_manifest(args.out, {
        "command": "train", "n": n, "reps": reps, "seed": seed,
        "points": len(design), "tol": control.tol, "max_iter": control.max_iter,
    })
    print(f"train: {len(design)} points x {reps} reps at n={n} -> {args.out}",
          file=sys.stderr)
    return 0


def _read_design_csv(path: str) -> list[tuple[float, float, float]]:
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise UsageError(f"cannot open {path}: {exc}") from None
    with handle:
        reader = csv.DictReader(handle)
        needed = {"kappa", "gamma", "rho2"}
        if not needed.issubset(reader.fieldnames or ()):
            raise UsageError(f"{path}: design needs columns kappa,gamma,rho2")
        out = []
        for line_no, row in enumerate(reader, start=2):
            try:
                out.append((float(row["kappa"]), float(row["gamma"]), float(row["rho2"])))
            except ValueError as exc:
                raise UsageError(f"{path}: line {line_no}: {exc}") from None
    if not out:
        raise UsageError(f"{path}: no design points")
    return out


def cmd_test(args) -> int:
    spec = load_spec(args.spec, "test") if args.spec else {}
    n_values = args.n if args.n is not None else spec.get("n", [1000])
    psi_values = args.psi if args.psi is not None else spec.get("psi", [0.0])
    rho2_values = args.rho2 if args.rho2 is not None else spec.get("rho2", [0.0])
    configs = args.config if args.config is not None else spec.get("config", ["s1"])
    for config in configs:
        if config not in SIGNAL_CONFIGS:
            raise UsageError(f"unknown config {config!r}")
    seed = _resolve(args.seed, spec, "seed", 0)
    workers = _resolve(args.workers, spec, "workers", 1)
    timing = args.timing or spec.get("timing", False)
    control = _control(args, spec)
    records = run_test_experiment(
        n_values, psi_values, rho2_values, configs, seed=seed,
        control=control, workers=workers,
    )
    write_records_csv(records, args.out, timing=timing)
    write_manifest(args.out, {
        "command": "test", "n": list(n_values), "psi": list(psi_values),
        "rho2": list(rho2_values), "config": list(configs), "seed": seed,
        "points": len(TEST_GRID_POINTS), "tol": control.tol,
        "max_iter": control.max_iter,
    })
    print(f"test: {len(records)} records -> {args.out}", file=sys.stderr)
    return 0


def cmd_amse(args) -> int:
    spec = load_spec(args.spec, "amse") if args.spec else {}
    kappa_grid = args.kappa_grid if args.kappa_grid is not None else spec.get(
        "kappa_grid", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    gamma_grid = args.gamma_grid if args.gamma_grid is not None else spec.get(
        "gamma_grid", [1.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0])
    n = _resolve(args.n, spec, "n", 1000)
    reps = _resolve(args.reps, spec, "reps", 10)
    seed = _resolve(args.seed, spec, "seed", 0)
    workers = _resolve(args.workers, spec, "workers", 1)
    coefficients = _coefficients(args, spec)
    control = _control(args, spec)
    cells = run_amse_experiment(
        kappa_grid, gamma_grid, n=n, reps=reps, seed=seed,
        coefficients=coefficients, control=control, workers=workers,
    )
    write_amse_csv(cells, args.out)
    write_manifest(args.out, {
        "command": "amse", "n": n, "reps": reps, "seed": seed,
        "kappa_grid": list(kappa_grid), "gamma_grid": list(gamma_grid),
        "b": asdict(coefficients), "tol": control.tol,
    })
    print(f"amse: {len(cells)} cells -> {args.out}", file=sys.stderr)
    return 0


def _phase_point(args) -> PhasePoint:
    by_gamma = args.gamma is not None or args.rho2 is not None
    by_parts = args.beta0 is not None or args.gamma0 is not None
    if by_gamma and by_parts:
        raise UsageError("give either --gamma/--rho2 or --beta0/--gamma0, not both")
    if by_gamma:
        if args.gamma is None or args.rho2 is None:
            raise UsageError("--gamma and --rho2 must be given together")
        return PhasePoint.from_gamma_rho2(args.kappa, args.gamma, args.rho2)
    if args.beta0 is None or args.gamma0 is None:
        raise UsageError("need --beta0/--gamma0 or --gamma/--rho2")
    return PhasePoint(kappa=args.kappa, beta0=args.beta0, gamma0=args.gamma0)


def cmd_phase(args) -> int:
    point = _phase_point(args)
    verdict = mle_exists_asymptotically(
        point, method=args.method, quad_nodes=args.nodes,
        mc_n=args.mc_n, mc_reps=args.mc_reps,
        mc_seed=args.seed if args.seed is not None else 0,
    )
    print(
        f"kappa={_fmt_float(point.kappa)} beta0={_fmt_float(point.beta0)} "
        f"gamma0={_fmt_float(point.gamma0)} h={verdict.h_value:.6f} "
        f"exists={str(verdict.exists_asymptotically).lower()} method={verdict.method}"
    )
    return 0


def cmd_separation(args) -> int:
    data = read_dataset_csv(args.data, has_intercept=not args.no_intercept)
    verdict = detect_separation(data, tol=args.tol)
    print(f"separated={str(verdict.separated).lower()} optimum={verdict.optimum:.6e}")
    if verdict.separated and args.out:
        terms = _coef_terms(verdict.certificate.size, data.has_intercept)
        write_coef_csv(terms, verdict.certificate, args.out)
    return 0


def cmd_rescale(args) -> int:
    terms, values = read_coef_csv(args.coef)
    point = _phase_point(args)
    coefficients = _coefficients(args)
    if args.exists == "auto":
        exists = mle_exists_asymptotically(point, method=ANALYTIC).exists_asymptotically
    else:
        exists = args.exists == "yes"
    q = shrinkage_factor(
        point.kappa, point.gamma, point.gamma0, coefficients, mle_exists=exists
    )
    rescaled = [
        v if term == "intercept" else v / q for term, v in zip(terms, values)
    ]
    if args.out:
        write_coef_csv(terms, rescaled, args.out)
        write_manifest(args.out, {
            "command": "rescale", "coef": args.coef, "q": q, "exists": exists,
            "kappa": point.kappa, "gamma": point.gamma, "gamma0": point.gamma0,
            "b": asdict(coefficients),
        })
    else:
        write_coef_csv(terms, rescaled, sys.stdout)
    print(
        f"q={_fmt_float(q)} exists={str(exists).lower()} "
        f"b1={coefficients.b1} b2={coefficients.b2} b3={coefficients.b3}",
        file=sys.stderr,
    )
    return 0


def cmd_fit_b(args) -> int:
    summaries = read_training_summary_csv(args.summary)
    kappa = np.array([s.kappa for s in summaries])
    gamma = np.array([s.gamma for s in summaries])
    gamma0 = np.array([s.gamma0 for s in summaries])
    delta1 = np.array([s.mean_delta1 for s in summaries])
    exists = np.array([s.exists for s in summaries])
    rho2 = np.array([s.rho2 for s in summaries])

    fit = fit_power_law(
        kappa, gamma, gamma0, delta1,
        exists=exists, rho2=rho2, cutoff=args.cutoff, method=args.method,
    )

    mask = ~exists & (rho2 <= args.cutoff) & np.isfinite(delta1)
    cases = np.column_stack([kappa, gamma, gamma0, delta1])[mask]

    def statistic(rows: np.ndarray) -> np.ndarray:
        refit = fit_power_law(
            rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3], method=args.method
        )
        c = refit.coefficients
        return np.array([c.b0, c.b1, c.b2, c.b3])

    seed = args.seed if args.seed is not None else 0
    intervals = bootstrap_bca(
        cases, statistic, n_resamples=args.resamples, level=args.level, seed=seed
    )

    c = fit.coefficients
    rows = list(zip(("b0", "b1", "b2", "b3"), (c.b0, c.b1, c.b2, c.b3), intervals))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["coefficient", "estimate", "lower", "upper", "level"])
        for name, estimate, interval in rows:
            writer.writerow([
                name, _fmt_float(estimate), _fmt_float(interval.lower),
                _fmt_float(interval.upper), _fmt_float(interval.level),
            ])
        writer.writerow(["phi", _fmt_float(c.phi), "", "", ""])
    finally:
        if args.out:
            out.close()
    if args.out:
        write_manifest(args.out, {
            "command": "fit-b", "summary": args.summary, "cutoff": args.cutoff,
            "method": args.method, "resamples": args.resamples,
            "level": args.level, "seed": seed,
            "n_points": fit.n_points,
            "deviance_explained": fit.deviance_explained,
        })
    print(
        f"fit-b: {fit.n_points} points, method={fit.method}, "
        f"deviance_explained={fit.deviance_explained:.4f}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="hdlogit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hdlogit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_control(p):
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-iter", dest="max_iter", type=int, default=None)

    def add_b(p):
        for name in ("b0", "b1", "b2", "b3"):
            p.add_argument(f"--{name}", type=float, default=None)

    p = sub.add_parser("fit", help="fit one dataset file")
    p.add_argument("--data", required=True)
    p.add_argument("--method", choices=("mjpl", "ml"), default="mjpl")
    p.add_argument("--out", default=None)
    p.add_argument("--no-intercept", action="store_true")
    add_control(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="generate one dataset file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--rho2", type=float, default=0.0)
    p.add_argument("--psi", type=float, default=0.0)
    p.add_argument("--config", choices=SIGNAL_CONFIGS, default="train-grid")
    p.add_argument("--family", choices=("normal-ar1", "bernoulli"), default="normal-ar1")
    p.add_argument("--bernoulli-p", dest="bernoulli_p", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("--point-id", dest="point_id", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="training sweep over a space-filling design")
    p.add_argument("--spec", default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--design", default=None, help="CSV with kappa,gamma,rho2 columns")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--records", default=None)
    p.add_argument("--timing", action="store_true")
    add_control(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("test", help="one sample per grid point per combination")
    p.add_argument("--spec", default=None)
    p.add_argument("--n", type=_ints, default=None)
    p.add_argument("--psi", type=_floats, default=None)
    p.add_argument("--rho2", type=_floats, default=None)
    p.add_argument("--config", type=lambda s: s.split(","), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--timing", action="store_true")
    add_control(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("amse", help="aggregate MSE of the rescaled estimator")
    p.add_argument("--spec", default=None)
    p.add_argument("--kappa-grid", dest="kappa_grid", type=_floats, default=None)
    p.add_argument("--gamma-grid", dest="gamma_grid", type=_floats, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    add_b(p)
    add_control(p)
    p.set_defaults(func=cmd_amse)

    p = sub.add_parser("phase", help="asymptotic existence classification")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--beta0", type=float, default=None)
    p.add_argument("--gamma0", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--rho2", type=float, default=None)
    p.add_argument("--method", choices=(ANALYTIC, MONTE_CARLO), default=ANALYTIC)
    p.add_argument("--nodes", type=int, default=60)
    p.add_argument("--mc-n", dest="mc_n", type=int, default=2000)
    p.add_argument("--mc-reps", dest="mc_reps", type=int, default=32)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("separation", help="detect complete/quasi-complete separation")
    p.add_argument("--data", required=True)
    p.add_argument("--no-intercept", action="store_true")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--out", default=None, help="write the certificate here")
    p.set_defaults(func=cmd_separation)

    p = sub.add_parser("rescale", help="divide fitted slopes by the shrinkage factor")
    p.add_argument("--coef", required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--beta0", type=float, default=None)
    p.add_argument("--gamma0", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--rho2", type=float, default=None)
    p.add_argument("--exists", choices=("auto", "yes", "no"), default="auto")
    p.add_argument("--out", default=None)
    add_b(p)
    p.set_defaults(func=cmd_rescale)

    p = sub.add_parser("fit-b", help="power-law fit with BCa intervals")
    p.add_argument("--summary", required=True)
    p.add_argument("--cutoff", type=float, default=0.7)
    p.add_argument("--method", choices=("gamma", "ols"), default="gamma")
    p.add_argument("--resamples", type=int, default=9999)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit_b)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except HdlogitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
