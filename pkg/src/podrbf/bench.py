"""Built-in benchmark problems.

Two fully parameterized presets:

* ``science-policy`` — a two-state staffing model. The control u splits a
  production rate between keeping scientists in research (y1) and moving
  them into a second pool (y2); both pools decay at a fixed exit rate. The
  goal is to maximize the integrated headcount subject to hitting terminal
  targets for both pools.

* ``population-dynamics`` — a prey-predator system with an Ivlev-type
  interaction F(y1) = 1 - exp(-p5*y1) and two controls entering the
  coupling terms. The goal is to keep y1 near a desired level while an
  integral penalty forces y2 to stay below a cap; the penalty integrand
  (|y2 - cap| + y2 - cap)^2 vanishes exactly where the cap holds, turning
  the path inequality into one equality constraint.

The population model's rate constants pin everything except the initial
state, which defaults to [y1d, y2plus] = [5, 6] and is configurable.
Absolute criterion values therefore serve as reference output, not as
targets.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError
from .problem import (MAXIMIZE, MINIMIZE, PIECEWISE_LINEAR, Box, ControlParam,
                      IntegralFunctional, ProblemDef, TerminalFunctional, validate)

SCIENCE_POLICY = "science-policy"
POPULATION_DYNAMICS = "population-dynamics"
PRESETS = (SCIENCE_POLICY, POPULATION_DYNAMICS)


@dataclass(frozen=True)
class SciencePolicyParams:
    """Rates, horizon, terminal targets, and control box of the staffing model."""

    g: float = 0.14        # scientists produced per scientist per year
    delta: float = 0.02    # exit rate
    y10: float = 100.0
    y20: float = 80.0
    T: float = 15.0
    y1T: float = 200.0
    y2T: float = 240.0
    u_lo: float = 0.1
    u_hi: float = 0.6
    u0: float = 0.5        # nominal constant control, used as optimizer start


@dataclass(frozen=True)
class PopulationDynamicsParams:
    """Coefficients, horizon, control boxes, and targets of the prey-predator model."""

    p: tuple = (0.734, 0.175, -0.500, -0.246, 0.635)
    t_span: tuple = (0.0, 10.0)
    u1_bounds: tuple = (-0.5500, -0.300)
    u2_bounds: tuple = (-1.0370, -0.7870)
    y1d: float = 5.0
    y2plus: float = 6.0
    y0: tuple = (5.0, 6.0)

    def __post_init__(self):
        if len(self.p) != 5:
            raise ConfigurationError(f"p must have 5 entries, got {len(self.p)}")
        for name in ("u1_bounds", "u2_bounds"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigurationError(f"{name} out of order: {lo} > {hi}")


def science_policy(params: SciencePolicyParams | None = None) -> ProblemDef:
    """Maximize the integral of 0.5*(y1 + y2) with terminal pool targets."""
    q = params or SciencePolicyParams()
    g, delta = q.g, q.delta

    def rhs(t, y, u):
        return [u[0] * g * y[0] - delta * y[0],
                (1.0 - u[0]) * g * y[0] - delta * y[1]]

    criterion = IntegralFunctional(
        "integrated-headcount", lambda t, y, u: 0.5 * (y[:, 0] + y[:, 1]))
    constraints = (
        TerminalFunctional("y1-terminal-gap", lambda yT, target=q.y1T: yT[0] - target),
        TerminalFunctional("y2-terminal-gap", lambda yT, target=q.y2T: yT[1] - target),
    )
    control = ControlParam(PIECEWISE_LINEAR, (2,), (0.0, q.T))
    box = Box([q.u_lo, q.u_lo], [q.u_hi, q.u_hi])
    return validate(ProblemDef(SCIENCE_POLICY, 2, 1, rhs, [q.y10, q.y20],
                               (0.0, q.T), control, criterion, constraints,
                               box, MAXIMIZE))


def population_dynamics(params: PopulationDynamicsParams | None = None) -> ProblemDef:
    """Minimize the squared distance of y1 from y1d subject to the y2 cap."""
    q = params or PopulationDynamicsParams()
    p1, p2, p3, p4, p5 = q.p
    cap = q.y2plus

    def rhs(t, y, u):
        F = 1.0 - np.exp(-p5 * y[0])
        coupling = y[0] * F * y[1]
        return [p1 * y[0] + p2 * y[1]**2 + u[0] * coupling,
                p3 * y[1] + p4 * y[1]**2 + u[0] * u[1] * coupling]

    criterion = IntegralFunctional(
        "y1-tracking", lambda t, y, u, d=q.y1d: (y[:, 0] - d)**2)

    def cap_integrand(t, y, u):
        excess = y[:, 1] - cap
        return (np.abs(excess) + excess)**2

    constraints = (IntegralFunctional("y2-cap-penalty", cap_integrand),)
    control = ControlParam(PIECEWISE_LINEAR, (2, 2), q.t_span)
    box = Box([q.u1_bounds[0]] * 2 + [q.u2_bounds[0]] * 2,
              [q.u1_bounds[1]] * 2 + [q.u2_bounds[1]] * 2)
    return validate(ProblemDef(POPULATION_DYNAMICS, 2, 2, rhs, q.y0, q.t_span,
                               control, criterion, constraints, box, MINIMIZE))


def _resolve_params(preset: str, overrides: dict | None):
    overrides = dict(overrides or {})
    if preset == SCIENCE_POLICY:
        base: object = SciencePolicyParams()
    elif preset == POPULATION_DYNAMICS:
        base = PopulationDynamicsParams()
    else:
        raise ConfigurationError(f"unknown preset {preset!r}; choose from {PRESETS}")
    unknown = set(overrides) - set(base.__dataclass_fields__)
    if unknown:
        raise ConfigurationError(
            f"unknown parameter overrides for {preset}: {sorted(unknown)}")
    for key in ("p", "t_span", "u1_bounds", "u2_bounds", "y0"):
        if key in overrides and isinstance(overrides[key], list):
            overrides[key] = tuple(overrides[key])
    return replace(base, **overrides)


def make_problem(preset: str, overrides: dict | None = None) -> ProblemDef:
    """Build a preset problem, optionally overriding parameter fields."""
    params = _resolve_params(preset, overrides)
    builder = science_policy if preset == SCIENCE_POLICY else population_dynamics
    return builder(params)


def nominal_start(preset: str, overrides: dict | None = None) -> np.ndarray:
    """The preset's reference starting point b0.

    The staffing model starts from the constant nominal control u0 at every
    node; the prey-predator model starts from the box midpoint.
    """
    params = _resolve_params(preset, overrides)
    if preset == SCIENCE_POLICY:
        return np.full(2, params.u0)
    return make_problem(preset, overrides).box.midpoint
