"""Command-line entry point.

Subcommands:
  min-time   duration-rescaling iteration (writes history.csv per outer step)
  sweep      box-constrained duration sweep with random restarts
  cmax-scan  unconstrained peak-amplitude scan over durations
  optimize   single fixed-duration penalized solve
  check      fast invariant self-test suite

Every run writes history.csv, summary.json and pulse.json into --out.
Frequencies in configs and flags are plain frequencies in GHz; they are
converted to angular rad/ns internally. Floats are printed with 17
significant digits so CSV round-trips are lossless.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import controls as ctl
from . import model
from . import objective as obj
from . import propagator as prop
from . import sweep as swp
from . import timescale as ts
from .cases import CASE_NAMES, CaseNotFoundError, TestCase, builtin_case
from .optimizer import OptimizerOptions, lbfgs_minimize

TWO_PI = 2.0 * np.pi


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _system_from_config(section: dict) -> model.QuditSystem:
    try:
        levels = tuple(int(d) for d in section["levels"])
        freqs = tuple(TWO_PI * float(f) for f in section["freq_ghz"])
        kerr = tuple(TWO_PI * float(k) for k in section["kerr_ghz"])
        rot = TWO_PI * float(section["rot_freq_ghz"])
    except KeyError as exc:
        raise ConfigError(f"system: missing key {exc}") from None
    couplings = {}
    for key, val in section.get("couplings_ghz", {}).items():
        try:
            p, q = (int(i) for i in key.split("-"))
        except ValueError:
            raise ConfigError(f"system.couplings_ghz: bad pair key {key!r}") from None
        couplings[(p - 1, q - 1)] = TWO_PI * float(val)
    try:
        return model.QuditSystem(levels=levels, freqs=freqs, kerr=kerr,
                                 rot_freq=rot, couplings=couplings)
    except ValueError as exc:
        raise ConfigError(f"system: {exc}") from None


def _gate_from_config(section: dict) -> obj.TargetGate:
    try:
        rows = section["matrix"]
    except KeyError:
        raise ConfigError("gate: missing key 'matrix'") from None
    m = np.array([[complex(c[0], c[1]) for c in row] for row in rows])
    try:
        return obj.TargetGate(m, section.get("name", "custom"))
    except ValueError as exc:
        raise ConfigError(f"gate: {exc}") from None


def load_config(path) -> dict:
    """Read a JSON run configuration file."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be an object")
    return cfg


def _parse_durations(spec_str: str) -> list[float]:
    parts = spec_str.split(":")
    if len(parts) != 3:
        raise ConfigError("--durations expects start:stop:step in ns")
    start, stop, step = (float(x) for x in parts)
    if step <= 0 or stop < start:
        raise ConfigError("--durations needs step > 0 and stop >= start")
    out = []
    t = start
    while t <= stop + 1e-9:
        out.append(round(t, 9))
        t += step
    return out


def resolve_run(args) -> dict:
    """Merge config file and CLI flags into one fully resolved run description."""
    cfg = load_config(args.config) if args.config else {}

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return cfg.get(key, default)

    case_name = pick(args.case, "case", None)
    if case_name is not None:
        try:
            case = builtin_case(case_name)
        except CaseNotFoundError as exc:
            raise ConfigError(str(exc)) from None
        knot = float(pick(None, "knot_spacing_ns", case.knot_spacing))
        system, target = case.system, case.target
        sweep_range = case.sweep_durations
    else:
        if "system" not in cfg or "gate" not in cfg:
            raise ConfigError("config needs 'system' and 'gate' (or use --case)")
        system = _system_from_config(cfg["system"])
        target = _gate_from_config(cfg["gate"])
        if target.dim != system.dim:
            raise ConfigError("gate: dimension does not match the system")
        if "knot_spacing_ns" not in cfg:
            raise ConfigError("config: missing key 'knot_spacing_ns'")
        knot = float(cfg["knot_spacing_ns"])
        case_name = target.name
        sweep_range = (10.0, 60.0)
        case = TestCase(name=case_name, system=system, target=target,
                        knot_spacing=knot, sweep_durations=sweep_range)
    if knot <= 0:
        raise ConfigError("knot_spacing_ns must be positive")

    wcfg = cfg.get("weights", {})
    weights = obj.Weights(
        gamma=float(pick(args.gamma, None, wcfg.get("gamma", 0.2))),
        gamma1=float(pick(args.gamma1, None, wcfg.get("gamma1", 1e-3))),
        gamma2=float(pick(args.gamma2, None, wcfg.get("gamma2", 1e-3))),
    )
    t0 = pick(getattr(args, "t0", None), "t0_ns", None)
    bmax_ghz = float(pick(args.bmax_ghz, "bmax_ghz", 0.040))
    delta_b_ghz = float(pick(args.delta_b_ghz, "delta_b_ghz", 0.005))
    if t0 is not None and float(t0) <= 0:
        raise ConfigError("t0_ns must be positive")
    if not 0 < delta_b_ghz < bmax_ghz:
        raise ConfigError("need 0 < delta_b_ghz < bmax_ghz")

    durations = None
    if getattr(args, "durations", None) is not None:
        durations = _parse_durations(args.durations)
    elif "durations_ns" in cfg:
        durations = [float(t) for t in cfg["durations_ns"]]

    resolved = {
        "case": case_name,
        "knot_spacing_ns": knot,
        "weights": {"gamma": weights.gamma, "gamma1": weights.gamma1,
                    "gamma2": weights.gamma2},
        "bmax_ghz": bmax_ghz,
        "delta_b_ghz": delta_b_ghz,
        "t0_ns": None if t0 is None else float(t0),
        "grad_tol": float(pick(args.grad_tol, "grad_tol", 1e-5)),
        "max_iters": int(pick(None, "max_iters", 500)),
        "seed": int(pick(args.seed, "seed", 0)),
        "restarts": int(pick(getattr(args, "restarts", None), "restarts", 10)),
        "workers": int(pick(getattr(args, "workers", None), "workers", 1)),
        "durations_ns": durations,
        "infidelity_target": float(cfg.get("infidelity_target", 1e-4)),
    }
    if "system" in cfg:
        resolved["system"] = cfg["system"]
        resolved["gate"] = cfg["gate"]
    return {"resolved": resolved, "case_obj": case, "weights": weights}


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _write_outputs(outdir: Path, resolved: dict, header, rows,
                   result: dict, splines=None):
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(outdir / "history.csv", header, rows)
    summary = {"version": __version__, "config": resolved, "result": result}
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2))
    pulse = []
    if splines is not None:
        for sp in splines:
            pulse.append({
                "alpha_real_rad_per_ns": list(sp.alpha_real),
                "alpha_imag_rad_per_ns": list(sp.alpha_imag),
                "duration_ns": sp.duration,
                "num_basis": sp.num_basis,
            })
    (outdir / "pulse.json").write_text(json.dumps(pulse, indent=2))


def _cmd_min_time(args) -> int:
    run = resolve_run(args)
    resolved = run["resolved"]
    case = run["case_obj"]
    if resolved["t0_ns"] is None:
        raise ConfigError("min-time requires --t0 (or t0_ns in the config)")
    opts = ts.TimeScaleOptions(
        t0=resolved["t0_ns"], b_max=TWO_PI * resolved["bmax_ghz"],
        delta_b=TWO_PI * resolved["delta_b_ghz"], seed=resolved["seed"])
    opt_options = OptimizerOptions(grad_tol=resolved["grad_tol"],
                                   max_iters=resolved["max_iters"])
    records, status = ts.minimize_gate_duration(
        case.system, case.target, resolved["knot_spacing_ns"], opts,
        weights=run["weights"], opt_options=opt_options)
    header = ["k", "T_ns", "cmax_ghz", "s", "infidelity", "energy",
              "inner_iters", "status"]
    rows = [[r.k, _fmt(r.duration), _fmt(r.c_max / TWO_PI), _fmt(r.s),
             _fmt(r.breakdown.infidelity), _fmt(r.breakdown.energy),
             r.inner_iterations, "in-band" if r.in_band else "rescaled"]
            for r in records]
    final = records[-1]
    counts = [final.coefficients.size // (2 * case.system.num_qudits)] \
        * case.system.num_qudits
    splines = ctl.splines_from_vector(final.coefficients, final.duration, counts)
    result = {
        "status": status,
        "final_duration_ns": final.duration,
        "final_cmax_ghz": final.c_max / TWO_PI,
        "final_infidelity": final.breakdown.infidelity,
        "outer_iterations": len(records),
    }
    _write_outputs(Path(args.out), resolved, header, rows, result, splines)
    print(f"min-time {resolved['case']}: {status}, "
          f"T* = {final.duration:.3f} ns, "
          f"cmax = {final.c_max / TWO_PI * 1e3:.2f} MHz, "
          f"infidelity = {final.breakdown.infidelity:.3e}")
    return 0 if status == "converged" else 1


def _default_durations(case, count=6):
    lo, hi = case.sweep_durations
    return list(np.linspace(lo, hi, count))


def _cmd_sweep(args) -> int:
    run = resolve_run(args)
    resolved = run["resolved"]
    case = run["case_obj"]
    durations = resolved["durations_ns"] or _default_durations(case)
    bound = TWO_PI * resolved["bmax_ghz"]
    opt_options = OptimizerOptions(grad_tol=resolved["grad_tol"],
                                   max_iters=resolved["max_iters"])
    rows, summary = swp.sweep_constrained(
        case, durations, resolved["restarts"], bound, resolved["seed"],
        weights=run["weights"], opt_options=opt_options,
        workers=resolved["workers"])
    header = ["T_ns", "restart", "infidelity", "cmax_ghz", "iterations",
              "termination", "feasible"]
    out_rows = [[_fmt(r.duration), r.restart, _fmt(r.infidelity),
                 _fmt(r.c_max / TWO_PI), r.iterations, r.reason,
                 int(r.feasible)] for r in rows]
    result = {"per_duration": {str(k): v for k, v in summary.items()}}
    _write_outputs(Path(args.out), resolved, header, out_rows, result)
    print(f"sweep {resolved['case']}: {len(rows)} runs over "
          f"{len(durations)} durations")
    return 0


def _cmd_cmax_scan(args) -> int:
    run = resolve_run(args)
    resolved = run["resolved"]
    case = run["case_obj"]
    durations = resolved["durations_ns"] or _default_durations(case)
    opt_options = OptimizerOptions(grad_tol=resolved["grad_tol"],
                                   max_iters=resolved["max_iters"])
    rows = swp.sweep_unconstrained_cmax(
        case, durations, infidelity_target=resolved["infidelity_target"],
        seed=resolved["seed"], bound=TWO_PI * resolved["bmax_ghz"],
        weights=run["weights"], opt_options=opt_options,
        workers=resolved["workers"])
    header = ["T_ns", "cmax_ghz", "infidelity", "iterations", "target_reached"]
    out_rows = [[_fmt(r.duration), _fmt(r.c_max / TWO_PI), _fmt(r.infidelity),
                 r.iterations, int(r.target_reached)] for r in rows]
    logt = np.log([r.duration for r in rows])
    logc = np.log([r.c_max for r in rows])
    slope = float(np.polyfit(logt, logc, 1)[0]) if len(rows) > 1 else float("nan")
    result = {"loglog_slope": slope}
    _write_outputs(Path(args.out), resolved, header, out_rows, result)
    print(f"cmax-scan {resolved['case']}: {len(rows)} durations, "
          f"log-log slope {slope:.3f}")
    return 0


def _cmd_optimize(args) -> int:
    run = resolve_run(args)
    resolved = run["resolved"]
    case = run["case_obj"]
    if resolved["t0_ns"] is None:
        raise ConfigError("optimize requires --t0 (or t0_ns in the config)")
    T = resolved["t0_ns"]
    nb = ctl.num_basis_for(T, resolved["knot_spacing_ns"])
    counts = [nb] * case.system.num_qudits
    bound = TWO_PI * resolved["bmax_ghz"]
    x0 = ts.initial_guess(2 * nb * case.system.num_qudits, bound,
                          resolved["seed"])
    splines = ctl.splines_from_vector(x0, T, counts)
    steps = ts.inner_step_count(case.system, splines, T, bound)
    fun = obj.make_objective(case.system, case.target, T, counts,
                             run["weights"], steps)
    opt_options = OptimizerOptions(grad_tol=resolved["grad_tol"],
                                   max_iters=resolved["max_iters"])
    result = lbfgs_minimize(fun, x0, opt_options)
    splines = ctl.splines_from_vector(result.x, T, counts)
    bd = obj.evaluate(case.system, splines, case.target, T, run["weights"],
                      steps=steps)
    header = ["iter", "objective", "grad_norm", "step_length"]
    rows = [[h.iteration, _fmt(h.value), _fmt(h.grad_norm), _fmt(h.step_length)]
            for h in result.history]
    out = {
        "termination": result.reason,
        "iterations": result.iterations,
        "infidelity": bd.infidelity,
        "energy": bd.energy,
        "tikhonov": bd.tikhonov,
        "population": bd.population,
        "total": bd.total,
        "cmax_ghz": ts.pulse_max_amplitude(splines) / TWO_PI,
    }
    _write_outputs(Path(args.out), resolved, header, rows, out, splines)
    print(f"optimize {resolved['case']} at T = {T} ns: {result.reason}, "
          f"infidelity = {bd.infidelity:.3e}")
    return 0


def _cmd_check(args) -> int:
    failures = []

    def check(name, ok):
        print(f"{'PASS' if ok else 'FAIL'}: {name}")
        if not ok:
            failures.append(name)

    sysq = builtin_case("QFT4").system
    h = model.system_hamiltonian(sysq)
    check("system Hamiltonian Hermitian",
          float(np.max(np.abs(h - h.conj().T))) <= 1e-12)

    taus = np.array([-0.5, -1.0 / 6.0, 1.0 / 6.0, 0.5])
    eps = 1e-9
    dplus = (ctl.eval_wavelet(taus + eps) - ctl.eval_wavelet(taus)) / eps
    dminus = (ctl.eval_wavelet(taus) - ctl.eval_wavelet(taus - eps)) / eps
    check("wavelet continuously differentiable",
          bool(np.all(np.abs(dplus - dminus) < 1e-6)))

    rng = np.random.default_rng(0)
    sp = ctl.ControlSpline(rng.normal(size=12) * 0.1, rng.normal(size=12) * 0.1, 8.0)
    t = np.linspace(0, 8.0, 10001)
    vals = np.abs(np.atleast_1d(ctl.eval_control(sp, t))) ** 2
    quad = float(np.trapezoid(vals, t) / 8.0)
    check("energy norm matches quadrature",
          abs(ctl.energy_norm(sp) - quad) <= 1e-6 * quad)

    res = prop.propagate(sysq, [sp], 8.0)
    uu = res.U_final.conj().T @ res.U_final
    check("propagation unitary",
          float(np.max(np.abs(uu - np.eye(4)))) <= 1e-9)

    case = builtin_case("SWAP02")
    nb = 8
    T = 6.0
    x = rng.uniform(-0.2, 0.2, 2 * nb)
    steps = 600
    fun = obj.make_objective(case.system, case.target, T, [nb],
                             obj.Weights(), steps)
    f0, g = fun(x)
    hstep = 1e-6
    idx = [0, nb - 1, nb, 2 * nb - 1]
    ok = True
    for i in idx:
        e = np.zeros_like(x)
        e[i] = hstep
        fd = (fun(x + e)[0] - fun(x - e)[0]) / (2 * hstep)
        if abs(fd - g[i]) > 1e-5 * max(abs(fd), 1e-9) + 1e-9:
            ok = False
    check("adjoint gradient matches finite differences", ok)

    if failures:
        print(f"{len(failures)} check(s) failed")
        return 1
    print("all checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minpulse",
        description="Amplitude-bounded minimal-duration gate pulse synthesis")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_t0=False, with_sweep=False):
        p.add_argument("--case", choices=CASE_NAMES, default=None)
        p.add_argument("--config", default=None)
        p.add_argument("--bmax-ghz", dest="bmax_ghz", type=float, default=None)
        p.add_argument("--delta-b-ghz", dest="delta_b_ghz", type=float,
                       default=None)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--gamma1", type=float, default=None)
        p.add_argument("--gamma2", type=float, default=None)
        p.add_argument("--grad-tol", dest="grad_tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default="run_out")
        if with_t0:
            p.add_argument("--t0", type=float, default=None,
                           help="gate duration in ns")
        if with_sweep:
            p.add_argument("--durations", default=None,
                           help="start:stop:step in ns")
            p.add_argument("--restarts", type=int, default=None)
            p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("min-time", help="duration-rescaling iteration")
    add_common(p, with_t0=True)
    p.set_defaults(func=_cmd_min_time)

    p = sub.add_parser("sweep", help="constrained duration sweep")
    add_common(p, with_sweep=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("cmax-scan", help="unconstrained amplitude scan")
    add_common(p, with_sweep=True)
    p.set_defaults(func=_cmd_cmax_scan)

    p = sub.add_parser("optimize", help="single fixed-duration solve")
    add_common(p, with_t0=True)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("check", help="invariant self-test suite")
    p.set_defaults(func=_cmd_check)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
