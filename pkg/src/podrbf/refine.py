"""Iterative domain shrinking around the incumbent optimum.

Each iteration trains a fresh surrogate on a slightly widened copy of the
current optimization bounds, optimizes on the surrogate, then checks how
well surrogate and original criteria agree at the optimizer's answer. If
the relative gap is above tolerance, the bounds shrink geometrically
around the incumbent and the loop repeats. Training boxes are widened
before clipping so corner regions stay sampled whenever the global box
allows it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .integrator import DEFAULT_ATOL, DEFAULT_N_T, DEFAULT_RTOL, TimeGrid
from .optimizer import (OptimizerOptions, OptResult, criterion_original,
                        criterion_surrogate, solve_problem)
from .problem import MAXIMIZE, Box, ProblemDef
from .sampling import sample
from .snapshot import build_snapshots
from .surrogate import DEFAULT_EPS_POD, train

EPS_FLOOR = 1e-30   # relative-gap denominator guard


@dataclass
class RefineConfig:
    """Knobs of the shrink loop; defaults follow the recorded design choices."""

    strategy: str = "SLHS"
    n_s: int = 40
    kernel: str = "cubic-spline"
    eps_pod: float = DEFAULT_EPS_POD
    width0: Optional[np.ndarray] = None     # None: full box widths
    shrink: float = 0.5
    widen: float = 1.1
    tol: float = 0.01
    max_iters: int = 10
    seed: int = 1                           # iteration i samples with seed + i
    b0: Optional[np.ndarray] = None         # None: box midpoint
    n_t: int = DEFAULT_N_T
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    jobs: Optional[int] = 1
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    compare_original: bool = False          # also run the original-model NLP

    def validate(self) -> "RefineConfig":
        if not 0.0 < self.shrink < 1.0:
            raise ConfigurationError(f"shrink must be in (0, 1), got {self.shrink}")
        if self.tol <= 0.0:
            raise ConfigurationError(f"tol must be positive, got {self.tol}")
        if self.widen < 1.0:
            raise ConfigurationError(f"widen must be >= 1, got {self.widen}")
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be >= 1")
        return self


@dataclass(frozen=True)
class RefineIteration:
    index: int
    bounds: Box                 # optimization bounds this iteration
    training_bounds: Box
    opt: OptResult
    psi0: float                 # original model at b_hat
    psi0_hat: float             # surrogate at b_hat
    psis: np.ndarray
    psis_hat: np.ndarray
    eps: float
    k: int

    def to_dict(self) -> dict:
        return {"index": self.index,
                "bounds_lower": [float(v) for v in self.bounds.lower],
                "bounds_upper": [float(v) for v in self.bounds.upper],
                "training_lower": [float(v) for v in self.training_bounds.lower],
                "training_upper": [float(v) for v in self.training_bounds.upper],
                "opt": self.opt.to_dict(),
                "psi0": float(self.psi0), "psi0_hat": float(self.psi0_hat),
                "psis": [float(v) for v in self.psis],
                "psis_hat": [float(v) for v in self.psis_hat],
                "eps": float(self.eps), "k": int(self.k)}


@dataclass(frozen=True)
class RefineResult:
    iterations: tuple
    b_star: np.ndarray          # best-so-far incumbent by original criterion
    best_index: int
    converged: bool
    construction_time: float
    surrogate_opt_time: float
    original_opt: Optional[OptResult] = None

    def to_dict(self) -> dict:
        d = {"iterations": [it.to_dict() for it in self.iterations],
             "b_star": [float(v) for v in self.b_star],
             "best_index": int(self.best_index),
             "converged": bool(self.converged),
             "construction_time": float(self.construction_time),
             "surrogate_opt_time": float(self.surrogate_opt_time)}
        if self.original_opt is not None:
            d["original_opt"] = self.original_opt.to_dict()
        return d


def refine_optimize(p: ProblemDef, cfg: RefineConfig) -> RefineResult:
    """Run the shrink loop until the surrogate-vs-original relative gap at
    the incumbent drops to cfg.tol or max_iters is exhausted.

    Iteration bounds are centered at the incumbent and clipped to the
    problem's global box; the returned b_star is the iterate with the best
    original-model criterion seen (not necessarily the last one).
    """
    cfg.validate()
    box = p.box
    grid = TimeGrid(p.t_span[0], p.t_span[1], cfg.n_t)
    width = box.widths.copy() if cfg.width0 is None else np.asarray(cfg.width0, float)
    if width.shape != box.widths.shape or np.any(width <= 0):
        raise ConfigurationError("width0 must be positive and match the box dimension")
    center = box.clip(box.midpoint if cfg.b0 is None else np.asarray(cfg.b0, float))

    t_build = 0.0
    t_opt = 0.0
    iterations = []
    converged = False
    for i in range(cfg.max_iters):
        opt_box = Box(box.clip(center - width / 2), box.clip(center + width / 2))
        train_box = Box(box.clip(center - width * cfg.widen / 2),
                        box.clip(center + width * cfg.widen / 2))
        t0 = time.perf_counter()
        samples = sample(cfg.strategy, cfg.n_s, train_box, cfg.seed + i)
        snap = build_snapshots(p, samples, grid, cfg.rtol, cfg.atol, jobs=cfg.jobs)
        surr = train(snap, cfg.eps_pod, cfg.kernel)
        t_build += time.perf_counter() - t0

        t0 = time.perf_counter()
        opt = solve_problem(p, surr, x0=center, box=opt_box, grid=grid,
                            options=cfg.optimizer)
        t_opt += time.perf_counter() - t0

        b_hat = opt.b_star
        psi0_hat, psis_hat = criterion_surrogate(surr, p, b_hat)
        psi0, psis = criterion_original(p, b_hat, grid, cfg.rtol, cfg.atol)
        eps = abs(psi0 - psi0_hat) / max(abs(psi0), EPS_FLOOR)
        iterations.append(RefineIteration(i, opt_box, train_box, opt, psi0,
                                          psi0_hat, psis, psis_hat, eps, surr.k))
        if eps <= cfg.tol:
            converged = True
            break
        center = box.clip(b_hat)
        width = width * cfg.shrink

    sign = -1.0 if p.sense == MAXIMIZE else 1.0
    best_index = int(np.argmin([sign * it.psi0 for it in iterations]))
    b_star = iterations[best_index].opt.b_star

    original_opt = None
    if cfg.compare_original:
        original_opt = solve_problem(p, None, x0=cfg.b0, grid=grid,
                                     rtol=cfg.rtol, atol=cfg.atol,
                                     options=cfg.optimizer)
    return RefineResult(tuple(iterations), b_star, best_index, converged,
                        t_build, t_opt, original_opt)
