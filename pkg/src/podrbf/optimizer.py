"""Box-constrained NLP solver for the discretized control problems.

Equality constraints are handled by a safeguarded augmented-Lagrangian
outer loop; each inner subproblem is solved by the derivative-free
Nelder-Mead simplex with box projection. Multipliers are updated only when
the constraint violation dropped by a factor of four, otherwise the
penalty weight is raised — the classical safeguard against multiplier
runaway on problems whose constraints cannot be met exactly.

The same solver runs against the original ODE model and the surrogate;
only the criterion callbacks differ.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize as sp_minimize

from .errors import NonFiniteObjective
from .integrator import (DEFAULT_ATOL, DEFAULT_RTOL, TimeGrid, Trajectory,
                         control_trajectory, default_grid, evaluate_functionals,
                         integrate)
from .problem import MAXIMIZE, Box, ProblemDef
from .surrogate import Surrogate

DEFAULT_MAX_EVALS = 20000
DEFAULT_CONSTRAINT_TOL = 5e-3
DEFAULT_STEP_TOL = 1e-6
DEFAULT_PENALTY0 = 10.0
DEFAULT_PENALTY_MULT = 5.0
DEFAULT_MAX_OUTER = 8
INNER_BUDGET_PER_DIM = 400


@dataclass
class NlpSpec:
    """One nonlinear program: objective, equality constraints, box, start."""

    objective: Callable
    box: Box
    x0: np.ndarray
    eq_constraints: Optional[Callable] = None   # b -> vector of psi_j(b)
    max_evals: int = DEFAULT_MAX_EVALS
    constraint_tol: float = DEFAULT_CONSTRAINT_TOL
    step_tol: float = DEFAULT_STEP_TOL
    penalty0: float = DEFAULT_PENALTY0
    penalty_mult: float = DEFAULT_PENALTY_MULT
    max_outer: int = DEFAULT_MAX_OUTER


@dataclass(frozen=True)
class OptResult:
    b_star: np.ndarray
    f_star: float
    constraint_violation: float
    evals: int
    converged: bool
    wall_time: float
    outer_iterations: int = 1
    outer_violations: tuple = ()    # max |psi_j| after each outer iteration

    def to_dict(self) -> dict:
        return {"b_star": [float(v) for v in self.b_star],
                "f_star": float(self.f_star),
                "constraint_violation": float(self.constraint_violation),
                "evals": int(self.evals), "converged": bool(self.converged),
                "wall_time": float(self.wall_time),
                "outer_iterations": int(self.outer_iterations),
                "outer_violations": [float(v) for v in self.outer_violations]}


def _checked(fn: Callable) -> Callable:
    def wrapped(x):
        v = fn(x)
        if not np.isfinite(v):
            raise NonFiniteObjective(f"objective returned {v} at b={x}")
        return v
    return wrapped


def minimize(spec: NlpSpec) -> OptResult:
    """Minimize spec.objective over the box subject to eq_constraints = 0.

    Runs out of budget -> returns best-so-far with converged=False. With
    constraints, convergence additionally requires max |psi_j| <= tol.
    """
    t_start = time.perf_counter()
    lo, hi = spec.box.lower, spec.box.upper
    bounds = list(zip(lo, hi))
    x = spec.box.clip(spec.x0)
    n = x.size
    f = _checked(spec.objective)

    if spec.eq_constraints is None:
        r = sp_minimize(f, x, method="Nelder-Mead", bounds=bounds,
                        options={"xatol": spec.step_tol, "fatol": spec.step_tol,
                                 "maxfev": spec.max_evals})
        b = spec.box.clip(r.x)
        return OptResult(b, float(r.fun), 0.0, int(r.nfev), bool(r.success),
                         time.perf_counter() - t_start)

    cons = spec.eq_constraints
    m = np.atleast_1d(np.asarray(cons(x), float)).size
    if m == 0:
        r = sp_minimize(f, x, method="Nelder-Mead", bounds=bounds,
                        options={"xatol": spec.step_tol, "fatol": spec.step_tol,
                                 "maxfev": spec.max_evals})
        b = spec.box.clip(r.x)
        return OptResult(b, float(r.fun), 0.0, int(r.nfev), bool(r.success),
                         time.perf_counter() - t_start)
    lam = np.zeros(m)
    rho = spec.penalty0
    prev_viol = np.inf
    nfev = 0
    outer_done = 0
    converged = False
    viols = []
    best = None     # (feasible, viol, f, x) lexicographic preference

    for _ in range(spec.max_outer):
        budget = min(spec.max_evals - nfev, INNER_BUDGET_PER_DIM * n)
        if budget <= 0:
            break
        lam_c, rho_c = lam.copy(), rho

        def lagrangian(b):
            c = np.atleast_1d(np.asarray(cons(b), float))
            return f(b) + lam_c @ c + rho_c * float(c @ c)

        r = sp_minimize(lagrangian, x, method="Nelder-Mead", bounds=bounds,
                        options={"xatol": spec.step_tol,
                                 "fatol": spec.step_tol * max(1.0, rho),
                                 "maxfev": budget})
        nfev += int(r.nfev)
        outer_done += 1
        x = spec.box.clip(r.x)
        c = np.atleast_1d(np.asarray(cons(x), float))
        viol = float(np.abs(c).max())
        viols.append(viol)
        fx = f(x)
        # feasible iterates compete on objective, infeasible ones on violation
        cand = ((viol > spec.constraint_tol,
                 fx if viol <= spec.constraint_tol else viol), viol, fx, x.copy())
        if best is None or cand[0] < best[0]:
            best = cand
        if viol <= spec.constraint_tol:
            converged = True
            break
        if viol <= 0.25 * prev_viol:
            lam = lam + 2.0 * rho * c
            prev_viol = viol
        else:
            rho *= spec.penalty_mult

    _, viol, fx, bx = best
    return OptResult(bx, float(fx), viol, nfev, converged,
                     time.perf_counter() - t_start, outer_done, tuple(viols))


# -- criterion evaluation paths ------------------------------------------------

def criterion_original(p: ProblemDef, b: np.ndarray, grid: TimeGrid | None = None,
                       rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL):
    """(psi0, psis) from one full ODE solve at b."""
    traj = integrate(p, b, grid, rtol, atol)
    return evaluate_functionals(p, traj)


def criterion_surrogate(surr: Surrogate, p: ProblemDef, b: np.ndarray):
    """(psi0_hat, psis_hat) from a surrogate prediction at b.

    The trajectory comes from predict + unstack; the functional evaluation
    afterwards is the identical code path criterion_original uses, so any
    difference stems from yhat vs y alone.
    """
    states = surr.predict_states(b)
    controls = control_trajectory(p.control, b, surr.grid.times)
    traj = Trajectory(surr.grid, states, controls)
    return evaluate_functionals(p, traj)


class _CachedCriterion:
    """Share one model evaluation between objective and constraint callbacks.

    The optimizer asks for psi0(b) and psis(b) at the same b in sequence;
    caching the last evaluation halves the ODE-solve count.
    """

    def __init__(self, fn: Callable):
        self._fn = fn
        self._key = None
        self._val = None

    def _eval(self, b: np.ndarray):
        key = np.asarray(b, float).tobytes()
        if key != self._key:
            self._val = self._fn(b)
            self._key = key
        return self._val

    def psi0(self, b) -> float:
        return float(self._eval(b)[0])

    def psis(self, b) -> np.ndarray:
        return np.asarray(self._eval(b)[1], float)


@dataclass
class OptimizerOptions:
    """Solver knobs shared by the CLI config and the refinement loop."""

    max_evals: int = DEFAULT_MAX_EVALS
    constraint_tol: float = DEFAULT_CONSTRAINT_TOL
    step_tol: float = DEFAULT_STEP_TOL
    penalty0: float = DEFAULT_PENALTY0
    penalty_mult: float = DEFAULT_PENALTY_MULT
    max_outer: int = DEFAULT_MAX_OUTER


def solve_problem(p: ProblemDef, surr: Surrogate | None = None,
                  x0: np.ndarray | None = None, box: Box | None = None,
                  grid: TimeGrid | None = None, rtol: float = DEFAULT_RTOL,
                  atol: float = DEFAULT_ATOL,
                  options: OptimizerOptions | None = None) -> OptResult:
    """Optimize the problem criterion over a box (default: the problem box).

    surr=None runs against the original model (one ODE solve per point);
    otherwise every evaluation is a surrogate prediction. Maximization
    problems are negated internally; f_star is reported in the problem's
    own sense.
    """
    options = options or OptimizerOptions()
    box = box or p.box
    if grid is None:
        grid = default_grid(p)
    if surr is None:
        cached = _CachedCriterion(lambda b: criterion_original(p, b, grid, rtol, atol))
    else:
        cached = _CachedCriterion(lambda b: criterion_surrogate(surr, p, b))
    sign = -1.0 if p.sense == MAXIMIZE else 1.0
    spec = NlpSpec(objective=lambda b: sign * cached.psi0(b), box=box,
                   x0=box.midpoint if x0 is None else np.asarray(x0, float),
                   eq_constraints=cached.psis if p.eq_constraints else None,
                   max_evals=options.max_evals,
                   constraint_tol=options.constraint_tol,
                   step_tol=options.step_tol, penalty0=options.penalty0,
                   penalty_mult=options.penalty_mult, max_outer=options.max_outer)
    r = minimize(spec)
    return OptResult(r.b_star, sign * r.f_star, r.constraint_violation, r.evals,
                     r.converged, r.wall_time, r.outer_iterations,
                     r.outer_violations)
