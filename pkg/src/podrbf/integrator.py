"""Full-order model evaluation: adaptive ODE integration on a fixed output
grid, trapezoidal quadrature, and functional evaluation along trajectories.

The integrator is an embedded Runge-Kutta 4(5) scheme with dense output
(scipy's RK45). Both built-in benchmark systems are nonstiff at their
stated parameters; StepSizeUnderflow is surfaced so a stiff fallback could
be slotted in later without changing callers.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (DimensionMismatch, NonFiniteState, OutsideBoxWarning,
                     StepSizeUnderflow)
from .problem import (IntegralFunctional, ProblemDef, TerminalFunctional,
                      control_eval, control_trajectory)

DEFAULT_N_T = 100
DEFAULT_RTOL = 1e-6
DEFAULT_ATOL = 1e-8


@dataclass(frozen=True)
class TimeGrid:
    """n_t equally spaced output times with times[0] = t0, times[-1] = T."""

    t0: float
    T: float
    n_t: int

    def __post_init__(self):
        if self.n_t < 2:
            raise DimensionMismatch("time grid needs at least 2 points")
        if self.T <= self.t0:
            raise DimensionMismatch("time grid needs T > t0")

    @cached_property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.T, self.n_t)

    @property
    def h(self) -> float:
        return (self.T - self.t0) / (self.n_t - 1)


def default_grid(p: ProblemDef, n_t: int = DEFAULT_N_T) -> TimeGrid:
    return TimeGrid(p.t_span[0], p.t_span[1], n_t)


@dataclass(frozen=True)
class Trajectory:
    """States and controls sampled on the output grid."""

    grid: TimeGrid
    states: np.ndarray      # (n_t, n_y)
    controls: np.ndarray    # (n_t, n_u)


def integrate(p: ProblemDef, b: np.ndarray, grid: TimeGrid | None = None,
              rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> Trajectory:
    """Solve the state ODEs for parameter vector b on the output grid.

    Local error is controlled to rtol*|y| + atol by adaptive stepping;
    output values come from the solver's dense interpolant. Points slightly
    outside the box only warn: the refinement loop legitimately probes
    domain edges.
    """
    b = np.asarray(b, float)
    if not p.box.contains(b, atol=1e-12):
        warnings.warn(f"parameter {b} lies outside the problem box", OutsideBoxWarning,
                      stacklevel=2)
    if grid is None:
        grid = default_grid(p)
    t0, T = p.t_span
    cp = p.control

    def fun(t, y):
        # clamp guards fp spill just past T inside the final RK stage
        u = control_eval(cp, b, min(max(t, t0), T))
        dy = np.asarray(p.rhs(t, y, u), float)
        if not np.all(np.isfinite(dy)):
            raise NonFiniteState(f"rhs returned non-finite values at t={t}")
        return dy

    sol = solve_ivp(fun, (t0, T), p.y0, method="RK45", t_eval=grid.times,
                    rtol=rtol, atol=atol, dense_output=False)
    if not sol.success:
        raise StepSizeUnderflow(f"integration failed: {sol.message}")
    states = sol.y.T
    if not np.all(np.isfinite(states)):
        raise NonFiniteState("integration produced non-finite states")
    controls = control_trajectory(cp, b, grid.times)
    return Trajectory(grid, states, controls)


def quadrature(values: np.ndarray, grid: TimeGrid) -> float:
    """Trapezoidal rule on the uniform grid; exact for affine integrands."""
    values = np.asarray(values, float)
    if values.shape[0] != grid.n_t:
        raise DimensionMismatch(
            f"got {values.shape[0]} values for a {grid.n_t}-point grid")
    return float(np.trapezoid(values, dx=grid.h))


def evaluate_functionals(p: ProblemDef, traj: Trajectory):
    """Criterion and constraint values along one trajectory.

    This is the single functional-evaluation code path: the original model
    and the surrogate both call it, differing only in where ``traj`` came
    from. Returns (psi0, psis) in the problem's own sense (no negation).
    """
    t, y, grid = traj.grid.times, traj.states, traj.grid
    u = traj.controls
    psi0 = quadrature(p.criterion.integrand(t, y, u), grid)
    psis = np.empty(len(p.eq_constraints))
    for j, c in enumerate(p.eq_constraints):
        if isinstance(c, IntegralFunctional):
            psis[j] = quadrature(c.integrand(t, y, u), grid)
        elif isinstance(c, TerminalFunctional):
            psis[j] = float(c.terminal(y[-1]))
        else:  # pragma: no cover - rejected by problem.validate
            raise DimensionMismatch(f"unsupported constraint type {type(c).__name__}")
    return psi0, psis


def trajectory_to_csv(traj: Trajectory) -> str:
    """Columns: time, states, controls."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n_y, n_u = traj.states.shape[1], traj.controls.shape[1]
    w.writerow(["t"] + [f"y{i + 1}" for i in range(n_y)]
               + [f"u{i + 1}" for i in range(n_u)])
    for i, t in enumerate(traj.grid.times):
        w.writerow([repr(float(t))]
                   + [repr(float(v)) for v in traj.states[i]]
                   + [repr(float(v)) for v in traj.controls[i]])
    return buf.getvalue()
