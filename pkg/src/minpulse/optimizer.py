"""Quasi-Newton minimization: L-BFGS with a strong-Wolfe line search, plus a
projected variant for box constraints."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class OptimizerOptions:
    memory: int = 10
    grad_tol: float = 1e-5
    max_iters: int = 500
    sufficient_decrease: float = 1e-4   # Wolfe c1
    curvature: float = 0.9              # Wolfe c2
    box_bounds: tuple[np.ndarray, np.ndarray] | None = None
    max_line_search: int = 30
    # callable(OptimizeResult-in-progress) -> bool; returning True stops early
    callback: "object" = None

    def __post_init__(self):
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not 0 < self.sufficient_decrease < self.curvature < 1:
            raise ValueError("need 0 < sufficient_decrease < curvature < 1")


@dataclass
class HistoryRow:
    iteration: int
    value: float
    grad_norm: float
    step_length: float


@dataclass
class OptimizeResult:
    x: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    reason: str  # gradient-tol | max-iters | line-search-failure | callback
    history: list[HistoryRow] = field(default_factory=list)


def _two_loop(grad, s_list, y_list, rho_list):
    q = grad.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
        a = rho * (s @ q)
        q -= a * y
        alphas.append(a)
    if s_list:
        gamma = (s_list[-1] @ y_list[-1]) / (y_list[-1] @ y_list[-1])
        q *= gamma
    for (s, y, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
        b = rho * (y @ q)
        q += s * (a - b)
    return -q


def _strong_wolfe(fun, x, f0, g0, direction, c1, c2, max_iter,
                  alpha_max: float = np.inf):
    """Strong-Wolfe search along `direction`; returns (alpha, f, g) or None.

    When alpha_max is finite (a box bound is hit at that step length), a step
    landing exactly on alpha_max is accepted on sufficient decrease alone.
    """
    d_dot_g0 = float(g0 @ direction)
    if d_dot_g0 >= 0 or alpha_max <= 0:
        return None

    def phi(alpha):
        f, g = fun(x + alpha * direction)
        return f, g, float(g @ direction)

    def zoom(lo, f_lo, dg_lo, hi, f_hi):
        for _ in range(max_iter):
            alpha = 0.5 * (lo + hi)
            f, g, dg = phi(alpha)
            if f > f0 + c1 * alpha * d_dot_g0 or f >= f_lo:
                hi, f_hi = alpha, f
            else:
                if abs(dg) <= -c2 * d_dot_g0:
                    return alpha, f, g
                if dg * (hi - lo) >= 0:
                    hi, f_hi = lo, f_lo
                lo, f_lo, dg_lo = alpha, f, dg
            if abs(hi - lo) < 1e-16:
                break
        return None

    alpha_prev, f_prev, dg_prev = 0.0, f0, d_dot_g0
    alpha = min(1.0, alpha_max)
    for i in range(max_iter):
        f, g, dg = phi(alpha)
        if f > f0 + c1 * alpha * d_dot_g0 or (i > 0 and f >= f_prev):
            return zoom(alpha_prev, f_prev, dg_prev, alpha, f)
        if abs(dg) <= -c2 * d_dot_g0:
            return alpha, f, g
        if dg >= 0:
            return zoom(alpha, f, dg, alpha_prev, f_prev)
        if alpha >= alpha_max:
            # Sufficient decrease holds and the bound stops the search here.
            return alpha, f, g
        alpha_prev, f_prev, dg_prev = alpha, f, dg
        alpha = min(2.0 * alpha, alpha_max)
    return None


def lbfgs_minimize(fun, x0, opts: OptimizerOptions) -> OptimizeResult:
    """Unconstrained L-BFGS with two-loop recursion and strong-Wolfe steps.

    fun(x) must return (value, gradient). Accepted iterates are monotone
    non-increasing in the objective.
    """
    x = np.asarray(x0, dtype=float).copy()
    f, g = fun(x)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise ValueError("objective is not finite at the starting point")
    s_list, y_list, rho_list = [], [], []
    history = [HistoryRow(0, f, float(np.linalg.norm(g)), 0.0)]
    result = OptimizeResult(x, f, history[0].grad_norm, 0, "max-iters", history)

    for it in range(1, opts.max_iters + 1):
        gnorm = float(np.linalg.norm(g))
        if gnorm < opts.grad_tol:
            result.reason = "gradient-tol"
            break
        direction = _two_loop(g, s_list, y_list, rho_list)
        ls = _strong_wolfe(fun, x, f, g, direction, opts.sufficient_decrease,
                           opts.curvature, opts.max_line_search)
        if ls is None:
            # Retry from a steepest-descent direction before giving up.
            s_list, y_list, rho_list = [], [], []
            ls = _strong_wolfe(fun, x, f, g, -g, opts.sufficient_decrease,
                               opts.curvature, opts.max_line_search)
        if ls is None:
            result.reason = "line-search-failure"
            break
        alpha, f_new, g_new = ls
        step = alpha * direction
        y = g_new - g
        if step @ y > 1e-14 * float(np.linalg.norm(step)) * float(np.linalg.norm(y)):
            s_list.append(step)
            y_list.append(y)
            rho_list.append(1.0 / (step @ y))
            if len(s_list) > opts.memory:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)
        x = x + alpha * direction
        f, g = f_new, g_new
        gnorm = float(np.linalg.norm(g))
        history.append(HistoryRow(it, f, gnorm, float(alpha)))
        result.x, result.value, result.grad_norm, result.iterations = x, f, gnorm, it
        if opts.callback is not None and opts.callback(result):
            result.reason = "callback"
            break
    else:
        if float(np.linalg.norm(g)) < opts.grad_tol:
            result.reason = "gradient-tol"
    if result.reason == "gradient-tol" or (result.reason == "max-iters"
                                           and result.grad_norm < opts.grad_tol):
        result.reason = "gradient-tol"
    result.x, result.value, result.grad_norm = x, f, float(np.linalg.norm(g))
    return result


def projected_gradient_norm(x, g, lo, hi) -> float:
    return float(np.linalg.norm(x - np.clip(x - g, lo, hi)))


def _armijo_arc(fun, x, f0, g0, direction, lo, hi, c1, max_iter):
    """Backtracking Armijo search along the projection arc
    x(a) = clip(x + a * direction); returns (x_new, f, g, step) or None.

    The sufficient-decrease reference is g0 . (x(a) - x), the first-order
    model of the *projected* step (Bertsekas), so steps that land on bounds
    are judged against what they can actually achieve inside the box.
    """
    alpha = 1.0
    for _ in range(max_iter):
        x_new = np.clip(x + alpha * direction, lo, hi)
        step = x_new - x
        decrease = float(g0 @ step)
        if decrease >= 0.0 or not np.any(step):
            return None
        f, g = fun(x_new)
        if f <= f0 + c1 * decrease:
            return x_new, f, g, step
        alpha *= 0.5
    return None


def projected_lbfgs_minimize(fun, x0, opts: OptimizerOptions) -> OptimizeResult:
    """Box-constrained L-BFGS: active-set restricted quasi-Newton directions,
    strong-Wolfe steps while the iterate moves freely inside the box, and
    backtracking Armijo steps along the projection arc once bounds bind.

    The Wolfe curvature condition is often unattainable on the piecewise
    smooth projection arc, so its failure falls back to Armijo instead of
    aborting. Stops when the projected-gradient norm falls below grad_tol.
    Curvature pairs with non-positive y^T s after projection are discarded.
    """
    if opts.box_bounds is None:
        raise ValueError("projected variant requires box_bounds")
    lo, hi = (np.asarray(b, dtype=float) for b in opts.box_bounds)
    if np.any(lo > hi):
        raise ValueError("empty box: lower bound exceeds upper bound")
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    f, g = fun(x)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise ValueError("objective is not finite at the starting point")
    s_list, y_list, rho_list = [], [], []
    pg = projected_gradient_norm(x, g, lo, hi)
    history = [HistoryRow(0, f, pg, 0.0)]
    result = OptimizeResult(x, f, pg, 0, "max-iters", history)

    for it in range(1, opts.max_iters + 1):
        pg = projected_gradient_norm(x, g, lo, hi)
        if pg < opts.grad_tol:
            result.reason = "gradient-tol"
            break
        # Coordinates pinned at a bound with the gradient pushing outward
        # stay fixed this iteration.
        fixed = ((x <= lo) & (g > 0)) | ((x >= hi) & (g < 0))
        gm = np.where(fixed, 0.0, g)
        direction = _two_loop(gm, s_list, y_list, rho_list)
        direction[fixed] = 0.0
        if direction @ g >= 0:
            direction = -gm
        def try_direction(d):
            # First bound crossing along d caps the smooth Wolfe search.
            with np.errstate(divide="ignore", invalid="ignore"):
                to_hi = np.where(d > 0, (hi - x) / d, np.inf)
                to_lo = np.where(d < 0, (lo - x) / d, np.inf)
            alpha_max = float(min(np.min(to_hi), np.min(to_lo)))
            ws = _strong_wolfe(fun, x, f, g, d, opts.sufficient_decrease,
                               opts.curvature, opts.max_line_search,
                               alpha_max=alpha_max)
            if ws is not None:
                alpha, f_new, g_new = ws
                x_new = np.clip(x + alpha * d, lo, hi)
                return x_new, f_new, g_new, x_new - x
            return _armijo_arc(fun, x, f, g, d, lo, hi,
                               opts.sufficient_decrease, opts.max_line_search)

        ls = try_direction(direction)
        if ls is None and s_list:
            s_list, y_list, rho_list = [], [], []
            ls = try_direction(-gm)
        if ls is None:
            result.reason = "line-search-failure"
            break
        x_new, f_new, g_new, step = ls
        alpha = float(np.linalg.norm(step))
        y = g_new - g
        if step @ y > 1e-14 * float(np.linalg.norm(step)) * float(np.linalg.norm(y)):
            s_list.append(step)
            y_list.append(y)
            rho_list.append(1.0 / (step @ y))
            if len(s_list) > opts.memory:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)
        x, f, g = x_new, f_new, g_new
        pg = projected_gradient_norm(x, g, lo, hi)
        history.append(HistoryRow(it, f, pg, float(alpha)))
        result.x, result.value, result.grad_norm, result.iterations = x, f, pg, it
        if opts.callback is not None and opts.callback(result):
            result.reason = "callback"
            break
    else:
        if projected_gradient_norm(x, g, lo, hi) < opts.grad_tol:
            result.reason = "gradient-tol"
    result.x, result.value = x, f
    result.grad_norm = projected_gradient_norm(x, g, lo, hi)
    return result
