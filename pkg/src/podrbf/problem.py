"""Parametric ODE optimal-control problem definitions.

A problem bundles state dynamics ``y' = rhs(t, y, u)``, a finite control
parameterization mapping an optimization vector b to control trajectories
u(t, b), a criterion functional, equality-constraint functionals, and the
box the optimizer searches. Instances are immutable and safe to share
across threads as long as ``rhs`` is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, InvalidProblem, TimeOutOfRange

PIECEWISE_LINEAR = "piecewise-linear"
PIECEWISE_CONSTANT = "piecewise-constant"

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


@dataclass(frozen=True)
class Box:
    """Axis-aligned parameter domain ``lower <= b <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", np.atleast_1d(np.asarray(self.lower, float)))
        object.__setattr__(self, "upper", np.atleast_1d(np.asarray(self.upper, float)))
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise InvalidProblem("box lower/upper must be 1-D vectors of equal length")
        if np.any(self.lower > self.upper):
            j = int(np.argmax(self.lower > self.upper))
            raise InvalidProblem(f"box lower[{j}] > upper[{j}]")

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.widths))

    def contains(self, b: np.ndarray, atol: float = 0.0) -> bool:
        b = np.asarray(b, float)
        return bool(np.all(b >= self.lower - atol) and np.all(b <= self.upper + atol))

    def clip(self, b: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(b, float), self.lower, self.upper)


@dataclass(frozen=True)
class ControlParam:
    """Finite parameterization of the control functions u_i(t, b).

    Each control u_i owns ``nodes_per_control[i]`` consecutive entries of b.
    Node times are uniform over ``t_span``. Piecewise-linear interpolates
    between adjacent nodes; piecewise-constant holds the value of the
    interval containing t (right-open intervals, last interval closed).
    """

    kind: str
    nodes_per_control: tuple
    t_span: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes_per_control", tuple(int(n) for n in self.nodes_per_control))
        object.__setattr__(self, "t_span", (float(self.t_span[0]), float(self.t_span[1])))
        if self.kind not in (PIECEWISE_LINEAR, PIECEWISE_CONSTANT):
            raise InvalidProblem(f"unknown control kind {self.kind!r}")
        if any(n < 1 for n in self.nodes_per_control):
            raise InvalidProblem("every control needs at least one node")
        if self.t_span[1] <= self.t_span[0]:
            raise InvalidProblem("control t_span must have T > t0")

    @property
    def n_u(self) -> int:
        return len(self.nodes_per_control)

    @property
    def dim(self) -> int:
        return int(sum(self.nodes_per_control))

    def node_times(self, i: int) -> np.ndarray:
        """Uniform node grid of control i. A single node sits at t0."""
        n = self.nodes_per_control[i]
        t0, T = self.t_span
        if n == 1:
            return np.array([t0])
        return np.linspace(t0, T, n)

    def split(self, b: np.ndarray) -> list:
        """Per-control node-value blocks of b."""
        b = np.asarray(b, float)
        if b.size != self.dim:
            raise DimensionMismatch(
                f"parameter vector has length {b.size}, control needs {self.dim}")
        out, start = [], 0
        for n in self.nodes_per_control:
            out.append(b[start:start + n])
            start += n
        return out


def control_eval(cp: ControlParam, b: np.ndarray, t: float) -> np.ndarray:
    """Evaluate u(t, b) -> vector of length n_u at a single time t."""
    t0, T = cp.t_span
    if t < t0 or t > T:
        raise TimeOutOfRange(f"t={t} outside [{t0}, {T}]")
    blocks = cp.split(b)
    u = np.empty(cp.n_u)
    for i, vals in enumerate(blocks):
        n = vals.size
        if n == 1:
            u[i] = vals[0]
        elif cp.kind == PIECEWISE_LINEAR:
            u[i] = np.interp(t, cp.node_times(i), vals)
        else:
            # n nodes index n right-open intervals of equal width
            h = (T - t0) / n
            j = min(int((t - t0) / h), n - 1)
            u[i] = vals[j]
    return u


def control_trajectory(cp: ControlParam, b: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Evaluate u(t, b) on a whole grid -> (len(times), n_u) matrix."""
    times = np.asarray(times, float)
    t0, T = cp.t_span
    if times.min() < t0 or times.max() > T:
        raise TimeOutOfRange(f"grid spills outside [{t0}, {T}]")
    blocks = cp.split(b)
    U = np.empty((times.size, cp.n_u))
    for i, vals in enumerate(blocks):
        n = vals.size
        if n == 1:
            U[:, i] = vals[0]
        elif cp.kind == PIECEWISE_LINEAR:
            U[:, i] = np.interp(times, cp.node_times(i), vals)
        else:
            h = (T - t0) / n
            idx = np.minimum(((times - t0) / h).astype(int), n - 1)
            U[:, i] = vals[idx]
    return U


@dataclass(frozen=True)
class IntegralFunctional:
    """psi = integral over [t0, T] of integrand(t, y, u) dt.

    ``integrand`` must be vectorized: given t (n_t,), y (n_t, n_y),
    u (n_t, n_u) it returns a length-n_t array.
    """

    name: str
    integrand: Callable


@dataclass(frozen=True)
class TerminalFunctional:
    """psi = terminal(y(T)), a function of the final state only."""

    name: str
    terminal: Callable


Functional = Union[IntegralFunctional, TerminalFunctional]


@dataclass(frozen=True)
class ProblemDef:
    """A validated parametric optimal-control problem.

    ``rhs(t, y, u)`` must be pure: identical inputs always produce
    identical outputs. Snapshot building integrates samples concurrently
    and relies on this.
    """

    name: str
    n_y: int
    n_u: int
    rhs: Callable
    y0: np.ndarray
    t_span: tuple
    control: ControlParam
    criterion: IntegralFunctional
    eq_constraints: tuple
    box: Box
    sense: str = MINIMIZE

    def __post_init__(self):
        object.__setattr__(self, "y0", np.atleast_1d(np.asarray(self.y0, float)))
        object.__setattr__(self, "t_span", (float(self.t_span[0]), float(self.t_span[1])))
        object.__setattr__(self, "eq_constraints", tuple(self.eq_constraints))

    def control_at(self, b: np.ndarray, t: float) -> np.ndarray:
        return control_eval(self.control, b, t)


def validate(p: ProblemDef) -> ProblemDef:
    """Check every ProblemDef invariant; raise InvalidProblem naming the
    first violated one, return the definition unchanged otherwise."""
    if p.n_y < 1:
        raise InvalidProblem("n_y must be >= 1")
    if p.y0.size != p.n_y:
        raise InvalidProblem(f"y0 has length {p.y0.size}, expected n_y={p.n_y}")
    if not np.all(np.isfinite(p.y0)):
        raise InvalidProblem("y0 has non-finite entries")
    if p.t_span[1] <= p.t_span[0]:
        raise InvalidProblem("t_span must have T > t0")
    if p.control.t_span != p.t_span:
        raise InvalidProblem("control t_span differs from problem t_span")
    if p.control.n_u != p.n_u:
        raise InvalidProblem(
            f"control parameterizes {p.control.n_u} controls, problem declares {p.n_u}")
    if p.box.dim != p.control.dim:
        raise InvalidProblem(
            f"box dimension {p.box.dim} != total control nodes {p.control.dim}")
    if p.sense not in (MINIMIZE, MAXIMIZE):
        raise InvalidProblem(f"unknown sense {p.sense!r}")
    if not isinstance(p.criterion, IntegralFunctional):
        raise InvalidProblem("criterion must be an IntegralFunctional")
    for c in p.eq_constraints:
        if not isinstance(c, (IntegralFunctional, TerminalFunctional)):
            raise InvalidProblem(f"unsupported constraint type {type(c).__name__}")
    return p
