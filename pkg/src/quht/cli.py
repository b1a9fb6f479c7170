"""Command-line front door: threshold queries, experiment runs, metric reports.

Exit codes: 0 success, 2 usage or config error, 3 I/O error, 1 failed
verification (inequality violations).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import __version__
from .experiments import (
    ExperimentPlan,
    pinsker_ratio,
    pinsker_sharpness_scan,
    quantum_inequality_suite,
    resolve_threads,
    run_experiment,
)
from .hypotest import type2_envelope_one_sample, type2_envelope_two_sample
from .operators import (
    fidelity,
    helstrom_bound,
    relative_entropy,
    sandwiched_renyi_half,
    trace_distance,
    trace_norm,
)
from .states import state_from_json
from .tomography import (
    SCHEME_ENTANGLED,
    SCHEME_INDEP_TWO_DESIGN,
    SCHEME_PAULI_QUBIT,
    SCHEME_PAULI_STRING,
    bound_entangled,
    bound_indep_two_design,
    bound_pauli_qubit,
    bound_pauli_string,
    threshold_one_sample,
    threshold_two_sample,
)

_ENVELOPE_SEPARATIONS = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quht",
        description="Universal hypothesis testing for quantum states: "
        "calibrated thresholds, Monte Carlo experiments, and state metrics.",
    )
    parser.add_argument("--version", action="version", version=f"quht {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_thr = sub.add_parser("threshold", help="solve the acceptance radius for a scheme")
    p_thr.add_argument("--scheme", required=True,
                       choices=[SCHEME_PAULI_QUBIT, SCHEME_PAULI_STRING,
                                SCHEME_INDEP_TWO_DESIGN, SCHEME_ENTANGLED])
    p_thr.add_argument("--m", required=True, type=int, help="copies of the tested state")
    p_thr.add_argument("--n", type=int, help="copies of the second sample (two-sample mode)")
    p_thr.add_argument("--alpha", required=True, type=float, help="type I error level in (0,1)")
    p_thr.add_argument("--b", type=int, default=1, help="qubit count for pauli-string")
    p_thr.add_argument("--d", type=int, help="dimension for indep-two-design / entangled")
    p_thr.add_argument("--r", type=int, help="rank bound (defaults to d: weakened form)")
    p_thr.set_defaults(func=cmd_threshold)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo experiment from a JSON config")
    p_sim.add_argument("config", help="path to the experiment config")
    p_sim.add_argument("--output", help="output stem (overrides the config's 'output')")
    p_sim.add_argument("--threads", type=int, help="worker cap (default: QUHT_THREADS or all cores)")
    p_sim.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p_sim.set_defaults(func=cmd_simulate)

    p_bounds = sub.add_parser("bounds", help="print distinguishability metrics for two states")
    p_bounds.add_argument("rho_file", help="JSON file with the first state")
    p_bounds.add_argument("sigma_file", help="JSON file with the second state")
    p_bounds.add_argument("--m", type=int, default=1, help="copies for the symmetric error floor")
    p_bounds.set_defaults(func=cmd_bounds)

    p_ineq = sub.add_parser("inequality-suite",
                            help="verify trace-distance/fidelity/entropy inequalities on random pairs")
    p_ineq.add_argument("--seed", type=int, default=1)
    p_ineq.add_argument("--pairs", type=int, default=1000)
    p_ineq.add_argument("--d", type=int, default=2)
    p_ineq.set_defaults(func=cmd_inequality_suite)

    p_scan = sub.add_parser("pinsker-scan",
                            help="exhibit classical distributions nearly saturating Pinsker's constant")
    p_scan.add_argument("--epsilon", type=float, required=True)
    p_scan.set_defaults(func=cmd_pinsker_scan)
    return parser


def _bound_from_args(args) -> object:
    if args.scheme == SCHEME_PAULI_QUBIT:
        return bound_pauli_qubit()
    if args.scheme == SCHEME_PAULI_STRING:
        return bound_pauli_string(args.b)
    if args.d is None:
        raise ValueError(f"scheme {args.scheme} requires --d")
    r = args.r if args.r is not None else args.d
    if args.scheme == SCHEME_INDEP_TWO_DESIGN:
        return bound_indep_two_design(args.d, r)
    return bound_entangled(args.d, r)


def cmd_threshold(args) -> int:
    bound = _bound_from_args(args)
    if args.n is None:
        c = threshold_one_sample(bound, args.m, args.alpha)
        print(f"c_m = {_fmt(c)}  (one-sample, m={args.m}, alpha={args.alpha:g})")
    else:
        c = threshold_two_sample(bound, args.m, args.n, args.alpha)
        k = min(args.m, args.n)
        print(f"c_k = {_fmt(c)}  (two-sample, m={args.m}, n={args.n}, k={k}, alpha={args.alpha:g})")
    print(f"scheme = {bound.label}")
    print(f"C = {_fmt(bound.rate)}")
    if bound.prefactor_power == 0.0:
        print(f"g(m) = {_fmt(bound.prefactor_base)} (constant)")
    else:
        print(f"g(m) = {_fmt(bound.prefactor_base)} * (m+1)^{bound.prefactor_power:g}")
    print("type II envelope by separation:")
    for s in _ENVELOPE_SEPARATIONS:
        if args.n is None:
            env = type2_envelope_one_sample(bound, args.m, args.alpha, s)
        else:
            env = type2_envelope_two_sample(bound, args.m, args.n, args.alpha, s)
        print(f"  ||rho - sigma||_1 = {s:>5.2f}  ->  beta <= {env:.6g}")
    return 0


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _plan_from_config(cfg: dict) -> ExperimentPlan:
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    required = ["kind", "scheme", "nominal", "m_grid", "trials", "alpha", "seed"]
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ValueError(f"config is missing required fields: {', '.join(missing)}")
    known = set(required) | {
        "true_state", "n_grid", "b", "rank", "synthetic", "output", "max_draws",
    }
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ValueError(f"config has unknown fields: {', '.join(unknown)}")
    kwargs = dict(
        kind=cfg["kind"],
        scheme=cfg["scheme"],
        nominal=state_from_json(cfg["nominal"]),
        m_grid=tuple(cfg["m_grid"]),
        trials=int(cfg["trials"]),
        alpha=float(cfg["alpha"]),
        master_seed=int(cfg["seed"]),
        qubit_count=int(cfg.get("b", 1)),
        synthetic=bool(cfg.get("synthetic", False)),
    )
    if "true_state" in cfg:
        kwargs["true_state"] = state_from_json(cfg["true_state"])
    if "n_grid" in cfg:
        kwargs["n_grid"] = tuple(cfg["n_grid"])
    if "rank" in cfg:
        kwargs["rank"] = int(cfg["rank"])
    if "max_draws" in cfg:
        kwargs["max_draws"] = int(cfg["max_draws"])
    return ExperimentPlan(**kwargs)


def _write_atomic(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".quht-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        # mkstemp creates 0600 files; restore the umask-derived mode
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def cmd_simulate(args) -> int:
    cfg = _load_json(args.config)
    plan = _plan_from_config(cfg)
    stem = args.output or cfg.get("output")
    if not stem:
        raise ValueError("no output stem: pass --output or set 'output' in the config")
    result = run_experiment(plan, threads=resolve_threads(args.threads))
    csv_path = stem + ".csv"
    json_path = stem + ".json"
    _write_atomic(csv_path, result.csv_text())
    _write_atomic(json_path, json.dumps(result.to_json(), indent=2) + "\n")
    written = [csv_path, json_path]
    if not args.no_figures:
        from .plots import render_result

        png_path = stem + ".png"
        render_result(result, png_path)
        written.append(png_path)
    rates = ", ".join(f"m={row.m}: {row.rate:.6g}" for row in result.rows)
    print(f"{plan.kind}/{plan.scheme} {result.mode} run, {plan.trials} trials -> {rates}")
    print("wrote " + " ".join(written))
    return 0


def cmd_bounds(args) -> int:
    rho = state_from_json(_load_json(args.rho_file))
    sigma = state_from_json(_load_json(args.sigma_file))
    t = trace_distance(rho, sigma)
    f = fidelity(rho, sigma)
    d_rel = relative_entropy(rho, sigma)
    l1 = trace_norm(rho.matrix - sigma.matrix)
    print(f"trace_distance = {_fmt(t)}")
    print(f"fidelity = {_fmt(f)}")
    print(f"relative_entropy = {_fmt(d_rel)}")
    print(f"renyi_half = {_fmt(sandwiched_renyi_half(rho, sigma))}")
    print(f"helstrom(m={args.m}) = {_fmt(helstrom_bound(rho, sigma, args.m))}")
    slack = d_rel - 0.5 * l1 * l1
    print(f"pinsker_slack = {_fmt(slack)}")
    return 0


def cmd_inequality_suite(args) -> int:
    report = quantum_inequality_suite(args.seed, args.pairs, args.d)
    print(f"d={report.dim} pairs={report.pairs}")
    print(f"min_fvdg_slack = {_fmt(report.min_fvdg_slack)}")
    print(f"min_pinsker_slack = {_fmt(report.min_pinsker_slack)}")
    if not report.passed:
        print(f"FAIL: {len(report.violations)} violation(s)")
        print(json.dumps(report.to_json(), indent=2))
        return 1
    print("PASS: no violations")
    return 0


def cmd_pinsker_scan(args) -> int:
    p, q = pinsker_sharpness_scan(args.epsilon)
    ratio = pinsker_ratio(p, q)
    print(f"P = ({_fmt(p[0])}, {_fmt(p[1])})")
    print(f"Q = ({_fmt(q[0])}, {_fmt(q[1])})")
    print(f"ratio = {_fmt(ratio)} <= 0.5 + {args.epsilon:g}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
