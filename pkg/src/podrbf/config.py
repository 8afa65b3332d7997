"""Run configuration: one YAML (or JSON) file drives every CLI stage.

The file is validated against the shipped run_config schema before use, so
unknown keys and out-of-range values are rejected with the offending path
named. All defaults live here in DEFAULTS and mirror the recorded design
choices of the individual modules.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

import jsonschema
import numpy as np
import yaml

from .errors import ConfigurationError
from .optimizer import OptimizerOptions
from .rbf import normalize_kernel
from .refine import RefineConfig
from .reporting import load_schema

DEFAULTS = {
    "problem": {"preset": None, "params": {}},
    "sampling": {"strategy": "SLHS", "n_s": 40, "seed": 1},
    "surrogate": {"eps_pod": 0.01, "kernel": "cubic"},
    "integrator": {"n_t": 100, "rtol": 1e-6, "atol": 1e-8},
    "optimizer": {"max_evals": 20000, "constraint_tol": 5e-3, "step_tol": 1e-6,
                  "penalty0": 10.0, "penalty_mult": 5.0, "max_outer": 8,
                  "run_original": True, "x0": None},
    "refine": {"width0": None, "shrink": 0.5, "widen": 1.1, "tol": 0.01,
               "max_iters": 10},
    "evaluate": {"n_g": 10, "sweep": None},
    "output": "out",
}


@dataclass
class RunConfig:
    """Fully resolved configuration with defaults applied."""

    preset: str
    params: dict = field(default_factory=dict)
    strategy: str = "SLHS"
    n_s: int = 40
    seed: int = 1
    eps_pod: float = 0.01
    kernel: str = "cubic-spline"
    n_t: int = 100
    rtol: float = 1e-6
    atol: float = 1e-8
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    run_original: bool = True
    x0: Optional[list] = None
    refine_width0: Optional[list] = None
    refine_shrink: float = 0.5
    refine_widen: float = 1.1
    refine_tol: float = 0.01
    refine_max_iters: int = 10
    n_g: int = 10
    sweep: Optional[dict] = None
    output: str = "out"

    def refine_config(self, b0: np.ndarray, jobs: Optional[int] = 1,
                      compare_original: Optional[bool] = None) -> RefineConfig:
        return RefineConfig(
            strategy=self.strategy, n_s=self.n_s, kernel=self.kernel,
            eps_pod=self.eps_pod,
            width0=None if self.refine_width0 is None else np.asarray(self.refine_width0, float),
            shrink=self.refine_shrink, widen=self.refine_widen,
            tol=self.refine_tol, max_iters=self.refine_max_iters,
            seed=self.seed, b0=np.asarray(b0, float), n_t=self.n_t,
            rtol=self.rtol, atol=self.atol, jobs=jobs, optimizer=self.optimizer,
            compare_original=self.run_original if compare_original is None
            else compare_original)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def from_dict(raw: dict) -> RunConfig:
    """Validate a raw mapping and resolve it against the defaults."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a mapping")
    try:
        jsonschema.validate(raw, load_schema("run_config"))
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigurationError(f"config invalid at {path}: {e.message}") from e
    d = _merge(DEFAULTS, raw)
    if d["problem"]["preset"] is None:
        raise ConfigurationError("config must name a problem preset")
    opt = d["optimizer"]
    return RunConfig(
        preset=d["problem"]["preset"],
        params=d["problem"].get("params", {}),
        strategy=d["sampling"]["strategy"],
        n_s=int(d["sampling"]["n_s"]),
        seed=int(d["sampling"]["seed"]),
        eps_pod=float(d["surrogate"]["eps_pod"]),
        kernel=normalize_kernel(d["surrogate"]["kernel"]),
        n_t=int(d["integrator"]["n_t"]),
        rtol=float(d["integrator"]["rtol"]),
        atol=float(d["integrator"]["atol"]),
        optimizer=OptimizerOptions(
            max_evals=int(opt["max_evals"]),
            constraint_tol=float(opt["constraint_tol"]),
            step_tol=float(opt["step_tol"]),
            penalty0=float(opt["penalty0"]),
            penalty_mult=float(opt["penalty_mult"]),
            max_outer=int(opt["max_outer"])),
        run_original=bool(opt["run_original"]),
        x0=opt["x0"],
        refine_width0=d["refine"]["width0"],
        refine_shrink=float(d["refine"]["shrink"]),
        refine_widen=float(d["refine"]["widen"]),
        refine_tol=float(d["refine"]["tol"]),
        refine_max_iters=int(d["refine"]["max_iters"]),
        n_g=int(d["evaluate"]["n_g"]),
        sweep=d["evaluate"]["sweep"],
        output=str(d["output"]),
    )


def load_config(path) -> RunConfig:
    try:
        with open(path) as f:
            raw = yaml.safe_load(f)
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"config {path} is not valid YAML: {e}") from e
    if raw is None:
        raise ConfigurationError(f"config {path} is empty")
    return from_dict(raw)
