"""Brute-force baselines over fixed gate durations.

sweep_constrained reproduces the box-constrained duration sweep with random
restarts; sweep_unconstrained_cmax records the peak amplitude of penalized
unconstrained optima as a function of duration.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import controls as ctl
from .cases import TestCase
from .objective import Weights, evaluate, make_objective
from .optimizer import OptimizerOptions, lbfgs_minimize, projected_lbfgs_minimize
from .timescale import initial_guess, inner_step_count, pulse_max_amplitude


@dataclass
class SweepRow:
    duration: float
    restart: int
    infidelity: float
    c_max: float
    iterations: int
    reason: str
    feasible: bool
    target_reached: bool = True


def _restart_seed(seed, duration_index: int, restart: int):
    # Stable per-(duration, restart) stream: adding durations or restarts
    # never perturbs existing rows.
    return np.random.SeedSequence([int(seed), duration_index, restart])


def _run_constrained(args):
    case, duration, dur_index, restart, bound, seed, weights, opt = args
    nb = ctl.num_basis_for(duration, case.knot_spacing)
    counts = [nb] * case.system.num_qudits
    n = 2 * nb * case.system.num_qudits
    x0 = initial_guess(n, bound, _restart_seed(seed, dur_index, restart))
    splines = ctl.splines_from_vector(x0, duration, counts)
    steps = inner_step_count(case.system, splines, duration, bound)
    fun = make_objective(case.system, case.target, duration, counts, weights, steps)
    lo = np.full(n, -bound)
    hi = np.full(n, bound)
    opts = OptimizerOptions(
        memory=opt.memory, grad_tol=opt.grad_tol, max_iters=opt.max_iters,
        sufficient_decrease=opt.sufficient_decrease, curvature=opt.curvature,
        box_bounds=(lo, hi), max_line_search=opt.max_line_search)
    result = projected_lbfgs_minimize(fun, x0, opts)
    final = ctl.splines_from_vector(result.x, duration, counts)
    bd = evaluate(case.system, final, case.target, duration, weights, steps=steps)
    return SweepRow(
        duration=duration, restart=restart,
        infidelity=bd.infidelity,
        c_max=pulse_max_amplitude(final),
        iterations=result.iterations, reason=result.reason,
        feasible=bool(np.all(result.x >= lo) and np.all(result.x <= hi)))


def sweep_constrained(case: TestCase, durations, restarts: int, bound: float,
                      seed, weights: Weights = Weights(),
                      opt_options: OptimizerOptions | None = None,
                      workers: int = 1):
    """Box-constrained optimizations over a duration grid with random restarts.

    Returns (rows, summary) where rows is ordered by (duration, restart) and
    summary maps each duration to min/median/max final infidelity.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if opt_options is None:
        opt_options = OptimizerOptions()
    jobs = [(case, float(t), i, r, bound, seed, weights, opt_options)
            for i, t in enumerate(durations) for r in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_constrained, jobs))
    else:
        rows = [_run_constrained(job) for job in jobs]
    summary = {}
    for i, t in enumerate(durations):
        infids = sorted(r.infidelity for r in rows[i * restarts:(i + 1) * restarts])
        summary[float(t)] = {
            "min_infidelity": infids[0],
            "median_infidelity": float(np.median(infids)),
            "max_infidelity": infids[-1],
        }
    return rows, summary


def _run_unconstrained(args):
    case, duration, dur_index, target_infid, bound, seed, weights, opt = args
    nb = ctl.num_basis_for(duration, case.knot_spacing)
    counts = [nb] * case.system.num_qudits
    n = 2 * nb * case.system.num_qudits
    # Start from a deliberately weak pulse so the optimizer approaches the
    # infidelity target from below in amplitude: the recorded c_max then
    # tracks the smallest drive the duration admits rather than the
    # initial-guess scale.
    x0 = initial_guess(n, 0.1 * bound, _restart_seed(seed, dur_index, 0))
    splines = ctl.splines_from_vector(x0, duration, counts)
    steps = inner_step_count(case.system, splines, duration, bound)
    fun = make_objective(case.system, case.target, duration, counts, weights, steps)

    def stop_on_target(state):
        bd = fun.last_breakdown
        return bd is not None and bd.infidelity < target_infid

    opts = OptimizerOptions(
        memory=opt.memory, grad_tol=opt.grad_tol, max_iters=opt.max_iters,
        sufficient_decrease=opt.sufficient_decrease, curvature=opt.curvature,
        max_line_search=opt.max_line_search, callback=stop_on_target)
    result = lbfgs_minimize(fun, x0, opts)
    final = ctl.splines_from_vector(result.x, duration, counts)
    bd = evaluate(case.system, final, case.target, duration, weights, steps=steps)
    return SweepRow(
        duration=duration, restart=0, infidelity=bd.infidelity,
        c_max=pulse_max_amplitude(final), iterations=result.iterations,
        reason=result.reason, feasible=True,
        target_reached=bool(bd.infidelity < target_infid))


def sweep_unconstrained_cmax(case: TestCase, durations,
                             infidelity_target: float = 1e-4,
                             seed=0, bound: float = 2.0 * np.pi * 0.040,
                             weights: Weights = Weights(),
                             opt_options: OptimizerOptions | None = None,
                             workers: int = 1):
    """Peak unconstrained-optimum amplitude per duration.

    Each duration is optimized until the infidelity drops below
    infidelity_target or the optimizer terminates on its own; rows whose
    target was not reached are flagged but retained. `bound` only sets the
    initial-guess scale.
    """
    if opt_options is None:
        opt_options = OptimizerOptions()
    jobs = [(case, float(t), i, infidelity_target, bound, seed, weights,
             opt_options) for i, t in enumerate(durations)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_unconstrained, jobs))
    else:
        rows = [_run_unconstrained(job) for job in jobs]
    return rows
