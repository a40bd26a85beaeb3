"""Command-line driver for the experiment suite.

Each run reads an experiment description file (see :mod:`sqglab.config`),
executes the requested study, and writes three byte-stable artifacts into
the output directory — ``series.csv``, ``summary.json``, ``checks.json`` —
plus a human-oriented ``run.log`` sidecar that carries the wall-clock
information deliberately kept out of the comparable artifacts.

Exit codes: 0 when every check passed, 1 for configuration problems
(unreadable file, bad grammar, invalid values, bad flags), 2 for numerical
failures (instability, non-convergence, or any failed check).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
import warnings
from datetime import datetime, timezone

import numpy as np
import scipy

from .config import EXPERIMENT_KINDS, Experiment, load_config_file
from .critical import (
    L43_FROZEN_CONSTANT,
    h_minus_half_distance,
    interpolation_upgrade,
    l43_interpolation_check,
    pairwise_bound_check,
    sweep_with_runs,
)
from .dynamics import SimulationState, integrate
from .errors import (
    BlowUpError,
    ConfigError,
    ConvergenceError,
    SingularOperatorError,
    SqgError,
    ZeroModeError,
)
from .estimates import (
    CutoffSpec,
    InequalityRecord,
    cordoba_pointwise_check,
    damped_energy_monitor,
    linf_monitor,
    max_principle_monitor,
    positivity_integral_check,
    sobolev_bound_monitor,
    tail_mass,
)
from .operators import (
    balakrishnan_neg_power,
    diagonal_operator,
    dirichlet_laplacian_1d,
    identity_minus_negpower_decay,
    inv_I_plus_Apow,
    lemma62_convergence,
    moment_inequality_check,
    random_spd,
    resolvent_apply,
    scalar_operator,
)
from .series import DiagnosticsSeries, emit_csv, emit_json, write_table
from .spectral import lq_norm, sobolev_norm, to_physical

__all__ = ["main"]

_NUMERICAL_ERRORS = (
    BlowUpError,
    ConvergenceError,
    SingularOperatorError,
    ZeroModeError,
    ArithmeticError,
    FloatingPointError,
)


class _Parser(argparse.ArgumentParser):
    """Argument parser whose failures map to the config-error exit code."""

    def error(self, message):  # noqa: A003 - argparse API
        raise ConfigError(message, source="<command line>", line=0)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="sqglab",
        description="Spectral studies of dissipative surface-transport dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="EXPERIMENT")
    help_by_kind = {
        "simulate": "time-step one configuration and record norm diagnostics",
        "sweep-alpha": "march the dissipation order toward 1/2 and compare runs",
        "operator-tests": "validate the fractional-operator quadratures",
        "estimates-report": "run a simulation and evaluate the full estimate battery",
        "dirichlet-sweep": "alpha sweep on the square with homogeneous boundary data",
    }
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=help_by_kind[kind])
        p.add_argument("--config", required=True, help="experiment description file")
        p.add_argument("--out", default=None, help="output directory for artifacts")
        p.add_argument(
            "--seed", type=int, default=None, help="override the [init] seed"
        )
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker threads for sweep runs (default: one per run)",
        )
        p.add_argument(
            "--strict",
            action="store_true",
            help="escalate warnings (CFL, smallness) to errors",
        )
    return parser


def _resolve_out_dir(cli_out: str | None, experiment: Experiment) -> str:
    if cli_out:
        return cli_out
    env_out = os.environ.get("SQGLAB_OUT")
    if env_out:
        return env_out
    if experiment.out_dir:
        return experiment.out_dir
    return "sqglab-out"


def _write_checks(out_dir: str, records: list) -> int:
    payload = {
        "checks": [r.as_dict() for r in records],
        "n_checks": len(records),
        "n_failed": sum(not r.passed for r in records),
        "all_passed": all(r.passed for r in records),
    }
    emit_json(payload, os.path.join(out_dir, "checks.json"))
    return payload["n_failed"]


def _write_log(out_dir: str, started: str, t0: float, status: str) -> None:
    lines = [
        f"started {started}",
        f"finished {datetime.now(timezone.utc).isoformat()}",
        f"elapsed_seconds {time.monotonic() - t0:.3f}",
        f"numpy {np.__version__}",
        f"scipy {scipy.__version__}",
        f"status {status}",
    ]
    with open(os.path.join(out_dir, "run.log"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _domain_meta(experiment: Experiment, seed: int | None) -> dict:
    domain = experiment.domain
    meta = {
        "kind": experiment.kind,
        "basis": domain.basis.value,
        "n": domain.n,
        "box": domain.box,
        "kappa": experiment.kappa,
        "lambda": experiment.lam,
        "scheme": experiment.scheme.value,
        "t_end": experiment.t_end,
        "sample_every": experiment.sample_every,
        "init": experiment.init_kind,
    }
    if experiment.params is not None:
        meta["alpha"] = experiment.params.alpha
    if experiment.init_kind == "random":
        meta["seed"] = experiment.init_seed if seed is None else int(seed)
    return meta


def _run_fixed_alpha(
    experiment: Experiment, seed: int | None, out_dir: str, full_battery: bool
) -> int:
    """Shared driver for ``simulate`` and ``estimates-report``."""
    theta0 = experiment.initial_field(seed)
    params = experiment.params
    stepper = experiment.stepper_for(theta0)

    monitors = {
        "l2": lambda t, th: sobolev_norm(th, 0.0),
        "linf": lambda t, th: lq_norm(th, math.inf),
    }
    finite_lq = [q for q in experiment.monitor_lq if math.isfinite(q)]
    for q in finite_lq:
        monitors[f"lq{q:g}"] = lambda t, th, q=q: lq_norm(th, q)
    for s in experiment.monitor_sobolev:
        monitors[f"h{s:g}"] = lambda t, th, s=s: sobolev_norm(th, s)

    result = integrate(
        SimulationState(t=0.0, theta=theta0),
        params,
        stepper,
        monitors=monitors,
        keep_states=True,
    )
    series = result.series
    series.meta.update(_domain_meta(experiment, seed))
    series.meta["dt"] = stepper.dt
    states = result.states

    records: list[InequalityRecord] = []
    for q in finite_lq:
        recs = max_principle_monitor(states, q, forcing=params.forcing)
        series.add_column(f"slack_lq{q:g}", [r.slack for r in recs])
        records.extend(recs)
    linf_recs = linf_monitor(states, forcing=params.forcing)
    series.add_column("slack_linf", [r.slack for r in linf_recs])
    records.extend(linf_recs)
    if experiment.monitor_damped_energy:
        damped = damped_energy_monitor(states, params.lam)
        series.add_column("slack_damped", [r.slack for r in damped])
        records.extend(damped)

    if full_battery:
        for state in states:
            slack = cordoba_pointwise_check(state.theta, params.alpha)
            records.append(
                InequalityRecord(
                    name="cordoba-min-slack", t=state.t, lhs=0.0, rhs=slack
                )
            )
            for q in finite_lq:
                value = positivity_integral_check(state.theta, q, params.alpha)
                records.append(
                    InequalityRecord(
                        name=f"positivity-q{q:g}", t=state.t, lhs=0.0, rhs=value
                    )
                )
        if len(states) >= 3:
            for s in experiment.monitor_sobolev:
                if s >= params.alpha:
                    records.extend(sobolev_bound_monitor(states, s, params))
        if experiment.monitor_tail_cutoff is not None:
            cutoff = CutoffSpec(k=experiment.monitor_tail_cutoff)
            masses = [tail_mass(to_physical(s.theta), cutoff) for s in states]
            series.add_column("tail_mass", masses)
            records.append(
                InequalityRecord(
                    name="tail-mass-decrease",
                    t=states[-1].t,
                    lhs=masses[-1],
                    rhs=masses[0],
                )
            )

    emit_csv(series, os.path.join(out_dir, "series.csv"))
    final = states[-1]
    summary = dict(series.meta)
    summary.update(
        {
            "n_samples": len(series),
            "n_steps": stepper.n_steps,
            "final_t": float(final.t),
            "final_l2": sobolev_norm(final.theta, 0.0),
            "final_linf": lq_norm(final.theta, math.inf),
        }
    )
    emit_json(summary, os.path.join(out_dir, "summary.json"))
    return _write_checks(out_dir, records)


def _run_sweep_kind(
    experiment: Experiment, seed: int | None, out_dir: str, threads: int | None
) -> int:
    theta0 = experiment.initial_field(seed)
    config = experiment.sweep_config(theta0)
    report, runs = sweep_with_runs(config, max_workers=threads)

    rows = []
    times = report.times
    m = len(config.alphas)
    for i in range(m):
        for j in range(i + 1, m):
            for k, t in enumerate(times):
                rows.append(
                    (
                        float(config.alphas[i]),
                        float(config.alphas[j]),
                        float(t),
                        h_minus_half_distance(
                            runs[i].states[k].theta, runs[j].states[k].theta
                        ),
                    )
                )
    meta = _domain_meta(experiment, seed)
    meta["dt"] = config.shared_dt()
    meta["alphas"] = ",".join(f"{a:g}" for a in config.alphas)
    write_table(
        os.path.join(out_dir, "series.csv"),
        ("alpha_i", "alpha_j", "t", "h_minus_half"),
        rows,
        meta=meta,
    )

    records: list[InequalityRecord] = [
        InequalityRecord(
            name="smallness-coefficient",
            t=0.0,
            lhs=report.smallness_coeff,
            rhs=0.0,
            tol=0.0,
        )
    ]
    c2 = -report.smallness_coeff if report.smallness_coeff < 0 else 1.0
    records.extend(pairwise_bound_check(report, c2=c2, c3_guess=experiment.sweep_c3))
    for i in range(m - 1):
        lhs, rhs = interpolation_upgrade(
            runs[i].states[-1].theta,
            runs[i + 1].states[-1].theta,
            experiment.sweep_epsilon,
        )
        records.append(
            InequalityRecord(
                name=f"interp-upgrade-{config.alphas[i]:g}-{config.alphas[i + 1]:g}",
                t=float(times[-1]),
                lhs=lhs,
                rhs=rhs,
            )
        )
    records.append(
        l43_interpolation_check(
            runs[0].states[-1].theta,
            runs[-1].states[-1].theta,
            constant=L43_FROZEN_CONSTANT,
        )
    )

    summary = dict(meta)
    summary["report"] = report.as_dict()
    emit_json(summary, os.path.join(out_dir, "summary.json"))
    return _write_checks(out_dir, records)


def _run_operator_tests(experiment: Experiment, out_dir: str) -> int:
    records: list[InequalityRecord] = []

    def error_record(name: str, err: float, bound: float) -> InequalityRecord:
        return InequalityRecord(name=name, t=0.0, lhs=float(err), rhs=bound, tol=0.0)

    value = balakrishnan_neg_power(scalar_operator(4.0), 0.5, np.ones(1))[0]
    records.append(error_record("scalar-neg-half-power", abs(value - 0.5), 1e-10))
    value = inv_I_plus_Apow(scalar_operator(1.0), 0.5, np.ones(1))[0]
    records.append(error_record("scalar-inv-i-plus-root", abs(value - 0.5), 1e-10))

    got = resolvent_apply(diagonal_operator([1.0, 3.0]), 1.0, np.ones(2))
    err = float(np.max(np.abs(got - np.array([0.5, 0.25]))))
    records.append(error_record("diagonal-resolvent", err, 1e-12))

    rng = np.random.default_rng(experiment.operator_seed)
    cases = (
        ("laplacian1d", dirichlet_laplacian_1d(experiment.operator_laplacian_n)),
        ("randomspd", random_spd(experiment.operator_size, seed=experiment.operator_seed)),
    )
    for label, A in cases:
        phi = rng.standard_normal(A.size)
        for alpha in (0.25, 0.5, 0.75):
            got = balakrishnan_neg_power(A, alpha, phi)
            want = A.apply_power(-alpha, phi)
            rel = float(
                np.linalg.norm(got - want) / max(np.linalg.norm(want), 1e-300)
            )
            records.append(error_record(f"negpower-{label}-a{alpha:g}", rel, 1e-6))
            got = inv_I_plus_Apow(A, alpha, phi)
            want = A.apply_function(lambda mu, a=alpha: 1.0 / (1.0 + mu**a), phi)
            rel = float(
                np.linalg.norm(got - want) / max(np.linalg.norm(want), 1e-300)
            )
            records.append(error_record(f"inv-i-plus-apow-{label}-a{alpha:g}", rel, 1e-6))

    lap = cases[0][1]
    psi = rng.standard_normal(lap.size)
    phi = lap.apply(psi / np.linalg.norm(psi))
    ladder = lemma62_convergence(lap, phi)
    for (a_prev, e_prev), (a_next, e_next) in zip(ladder, ladder[1:]):
        records.append(
            InequalityRecord(
                name=f"lemma-limit-monotone-a{a_next:g}",
                t=0.0,
                lhs=e_next,
                rhs=e_prev,
                tol=0.0,
            )
        )
    records.append(
        InequalityRecord(
            name="lemma-limit-ratio",
            t=0.0,
            lhs=5.0 * ladder[-1][1],
            rhs=ladder[0][1],
            tol=0.0,
        )
    )

    spd = cases[1][1]
    phi = rng.standard_normal(spd.size)
    decay = identity_minus_negpower_decay(spd, phi)
    for (b_prev, v_prev), (b_next, v_next) in zip(decay, decay[1:]):
        records.append(
            InequalityRecord(
                name=f"identity-decay-monotone-b{b_next:g}",
                t=0.0,
                lhs=v_next,
                rhs=v_prev,
                tol=0.0,
            )
        )
    records.append(
        error_record(
            "identity-decay-final", decay[-1][1], 1e-3 * float(np.linalg.norm(phi))
        )
    )

    failures = 0
    for _ in range(experiment.operator_trials):
        size = int(rng.integers(2, 12))
        A = random_spd(size, seed=int(rng.integers(0, 2**31)))
        vec = rng.standard_normal(size)
        beta = 0.5 + 0.5 * (1.0 - rng.random())
        _, _, ok = moment_inequality_check(A, vec, beta)
        failures += 0 if ok else 1
    records.append(
        InequalityRecord(
            name="moment-inequality-trials",
            t=0.0,
            lhs=float(failures),
            rhs=0.0,
            tol=0.0,
        )
    )

    series = DiagnosticsSeries(
        meta={
            "kind": experiment.kind,
            "size": experiment.operator_size,
            "seed": experiment.operator_seed,
            "trials": experiment.operator_trials,
            "laplacian_n": experiment.operator_laplacian_n,
        }
    )
    emit_csv(series, os.path.join(out_dir, "series.csv"))
    summary = dict(series.meta)
    summary["lemma_limit_errors"] = [[float(a), float(e)] for a, e in ladder]
    summary["identity_decay"] = [[float(b), float(v)] for b, v in decay]
    emit_json(summary, os.path.join(out_dir, "summary.json"))
    return _write_checks(out_dir, records)


def main(argv=None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except ConfigError as err:
        print(err, file=sys.stderr)
        return 1

    if args.threads is not None and args.threads < 1:
        print(
            ConfigError("--threads must be at least 1", source="<command line>", line=0),
            file=sys.stderr,
        )
        return 1

    try:
        experiment = load_config_file(args.config)
        if experiment.kind != args.command:
            raise ConfigError(
                f"config file describes kind {experiment.kind!r} but the "
                f"command line asked for {args.command!r}",
                source=str(args.config),
                line=1,
            )
    except ConfigError as err:
        print(err, file=sys.stderr)
        return 1
    except OSError as err:
        print(f"config error: cannot read {args.config}: {err}", file=sys.stderr)
        return 1

    out_dir = _resolve_out_dir(args.out, experiment)
    os.makedirs(out_dir, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.monotonic()

    try:
        with warnings.catch_warnings():
            if args.strict:
                warnings.simplefilter("error")
            if experiment.kind == "operator-tests":
                n_failed = _run_operator_tests(experiment, out_dir)
            elif experiment.kind in ("sweep-alpha", "dirichlet-sweep"):
                n_failed = _run_sweep_kind(experiment, args.seed, out_dir, args.threads)
            else:
                n_failed = _run_fixed_alpha(
                    experiment,
                    args.seed,
                    out_dir,
                    full_battery=experiment.kind == "estimates-report",
                )
    except _NUMERICAL_ERRORS as err:
        _write_log(out_dir, started, t0, f"numerical failure: {err}")
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    except Warning as err:
        # Only reachable under --strict, which escalates run-quality
        # warnings (CFL, smallness) into failures.
        _write_log(out_dir, started, t0, f"numerical failure: {err}")
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    except SqgError as err:
        # Remaining package errors at run time indicate an unusable setup.
        _write_log(out_dir, started, t0, f"config error: {err}")
        print(err, file=sys.stderr)
        return 1

    status = "ok" if n_failed == 0 else f"{n_failed} checks failed"
    _write_log(out_dir, started, t0, status)
    print(f"{experiment.kind}: artifacts in {out_dir} ({status})")
    return 0 if n_failed == 0 else 2


if __name__ == "__main__":
    sys.exit(main())
