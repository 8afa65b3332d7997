"""Command-line pipeline driver.

Stages: sample, snapshot, train, evaluate, optimize, refine, or pipeline
(all of them in order). Every stage is driven by one config file and
writes its artifacts into the output directory. Exit codes: 0 success,
1 configuration error, 2 numerical failure; the failing stage is named
on stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .bench import make_problem, nominal_start
from .config import RunConfig, load_config
from .errors import ConfigurationError, NumericalError
from .integrator import TimeGrid, integrate
from .optimizer import criterion_original, criterion_surrogate, solve_problem
from .problem import control_trajectory
from .refine import refine_optimize
from .reporting import (control_plot, energy_plot, spectrum_csv,
                        trajectory_plot, write_json, write_rows_csv)
from .sampling import sample, save_csv
from .snapshot import build_snapshots, save_binary, save_csv as save_snap_csv
from .surrogate import evaluate_design, error_report, load as load_surrogate, \
    save as save_surrogate, train

COMMANDS = ("sample", "snapshot", "train", "evaluate", "optimize", "refine",
            "pipeline")


class Runner:
    """Executes stages against one resolved config, caching intermediates."""

    def __init__(self, cfg: RunConfig, out: Path, jobs: int | None,
                 deterministic: bool):
        self.cfg = cfg
        self.out = out
        self.jobs = jobs
        self.deterministic = deterministic
        self.stage = "setup"
        self.problem = make_problem(cfg.preset, cfg.params)
        self.grid = TimeGrid(self.problem.t_span[0], self.problem.t_span[1], cfg.n_t)
        self.b0 = (np.asarray(cfg.x0, float) if cfg.x0 is not None
                   else nominal_start(cfg.preset, cfg.params))
        self._samples = None
        self._snap = None
        self._surr = None
        self._construction_time = 0.0

    # -- cached intermediates ------------------------------------------------

    def samples(self):
        if self._samples is None:
            self._samples = sample(self.cfg.strategy, self.cfg.n_s,
                                   self.problem.box, self.cfg.seed)
        return self._samples

    def snapshots(self):
        if self._snap is None:
            t0 = time.perf_counter()
            self._snap = build_snapshots(self.problem, self.samples(), self.grid,
                                         self.cfg.rtol, self.cfg.atol, jobs=self.jobs)
            self._construction_time += time.perf_counter() - t0
        return self._snap

    def surrogate(self, allow_load: bool = False):
        if self._surr is None:
            if allow_load:
                cached = self._load_compatible()
                if cached is not None:
                    self._surr = cached
                    return self._surr
            t0 = time.perf_counter()
            self._surr = train(self.snapshots(), self.cfg.eps_pod, self.cfg.kernel)
            self._construction_time += time.perf_counter() - t0
        return self._surr

    def _load_compatible(self):
        path = self.out / "surrogate.bin"
        if not path.exists():
            return None
        try:
            surr = load_surrogate(path)
        except Exception:
            return None
        p = self.problem
        ok = (surr.coeffs.kind == self.cfg.kernel
              and surr.eps_pod == self.cfg.eps_pod
              and surr.grid.n_t == self.cfg.n_t
              and surr.coeffs.centers.shape == (self.cfg.n_s, p.box.dim)
              and np.array_equal(surr.box.lower, p.box.lower)
              and np.array_equal(surr.box.upper, p.box.upper))
        return surr if ok else None

    # -- stages ----------------------------------------------------------------

    def run_sample(self):
        self.stage = "sample"
        save_csv(self.samples(), self.out / "samples.csv")

    def run_snapshot(self):
        self.run_sample()
        self.stage = "snapshot"
        snap = self.snapshots()
        save_binary(snap, self.out / "snapshots.bin")
        save_snap_csv(snap, self.out / "snapshots.csv")

    def run_train(self):
        self.run_snapshot()
        self.stage = "train"
        surr = self.surrogate()
        save_surrogate(surr, self.out / "surrogate.bin")
        spectrum_csv(self.out / "spectrum.csv", surr.sigma, surr.energy)
        energy_plot(surr.sigma, surr.energy, surr.k, surr.eps_pod,
                    self.out / "energy.svg")

    def run_evaluate(self):
        self.stage = "evaluate"
        cfg = self.cfg
        if cfg.sweep is not None:
            self._run_sweep()
            return
        t0 = time.perf_counter()
        ev = evaluate_design(self.problem, cfg.strategy, cfg.n_s, cfg.kernel,
                             cfg.seed, cfg.n_g, cfg.eps_pod, self.grid,
                             cfg.rtol, cfg.atol, jobs=self.jobs)
        elapsed = time.perf_counter() - t0
        report = {"problem": cfg.preset, "strategy": cfg.strategy,
                  "kernel": cfg.kernel, "n_s": cfg.n_s, "n_g": cfg.n_g,
                  "seed": cfg.seed, "eps_pod": cfg.eps_pod,
                  "k": ev.surrogate.k, "metrics": ev.report.to_dict(),
                  "timing": {"construction": self._construction_time,
                             "evaluation": elapsed}}
        write_json(report, self.out / "error_report.json", "error_report",
                   self.deterministic)
        worst = ev.report.worst_point
        n_y = self.problem.n_y
        trajectory_plot(self.grid.times,
                        ev.Y_test[:, worst].reshape(-1, n_y),
                        ev.Yhat_test[:, worst].reshape(-1, n_y),
                        self.out / "trajectory.svg",
                        title=f"worst test point ({worst})")

    def _run_sweep(self):
        cfg = self.cfg
        sweep = cfg.sweep
        strategies = sweep.get("strategies", [cfg.strategy])
        kernels = sweep.get("kernels", [cfg.kernel])
        sizes = sweep.get("n_s", [cfg.n_s])
        rows = []
        for strat, kern, n_s in product(strategies, kernels, sizes):
            ev = evaluate_design(self.problem, strat, int(n_s), kern, cfg.seed,
                                 cfg.n_g, cfg.eps_pod, self.grid, cfg.rtol,
                                 cfg.atol, jobs=self.jobs)
            r = ev.report
            rows.append([strat, ev.surrogate.coeffs.kind, int(n_s), cfg.n_g,
                         cfg.seed, cfg.eps_pod, ev.surrogate.k,
                         r.r2, r.mae, r.mxae, r.rmae])
        write_rows_csv(self.out / "sweep.csv",
                       ["strategy", "kernel", "n_s", "n_g", "seed", "eps_pod",
                        "k", "r2", "mae", "mxae", "rmae"], rows)

    def run_optimize(self):
        self.stage = "optimize"
        cfg = self.cfg
        surr = self.surrogate(allow_load=True)
        report = {"problem": cfg.preset, "b0": [float(v) for v in self.b0],
                  "construction_time": self._construction_time}

        r_surr = solve_problem(self.problem, surr, x0=self.b0, grid=self.grid,
                               options=cfg.optimizer)
        psi0_hat, psis_hat = criterion_surrogate(surr, self.problem, r_surr.b_star)
        psi0, psis = criterion_original(self.problem, r_surr.b_star, self.grid,
                                        cfg.rtol, cfg.atol)
        report["surrogate"] = {"result": r_surr.to_dict(),
                               "psi0": float(psi0),
                               "psis": [float(v) for v in psis],
                               "psi0_hat": float(psi0_hat),
                               "psis_hat": [float(v) for v in psis_hat]}
        controls = {"b0": control_trajectory(self.problem.control, self.b0,
                                             self.grid.times),
                    "surrogate optimum": control_trajectory(
                        self.problem.control, r_surr.b_star, self.grid.times)}
        if cfg.run_original:
            r_orig = solve_problem(self.problem, None, x0=self.b0, grid=self.grid,
                                   rtol=cfg.rtol, atol=cfg.atol,
                                   options=cfg.optimizer)
            psi0_o, psis_o = criterion_original(self.problem, r_orig.b_star,
                                                self.grid, cfg.rtol, cfg.atol)
            report["original"] = {"result": r_orig.to_dict(),
                                  "psi0": float(psi0_o),
                                  "psis": [float(v) for v in psis_o]}
            controls["model optimum"] = control_trajectory(
                self.problem.control, r_orig.b_star, self.grid.times)
        write_json(report, self.out / "optresult.json", "opt_result",
                   self.deterministic)
        control_plot(self.grid.times, controls, self.out / "controls.svg")

    def run_refine(self):
        self.stage = "refine"
        cfg = self.cfg
        rc = cfg.refine_config(self.b0, jobs=self.jobs)
        res = refine_optimize(self.problem, rc)
        trace = {"problem": cfg.preset, **res.to_dict()}
        write_json(trace, self.out / "refine_trace.json", "refine_trace",
                   self.deterministic)
        controls = {"b0": control_trajectory(self.problem.control, self.b0,
                                             self.grid.times),
                    "refined optimum": control_trajectory(
                        self.problem.control, res.b_star, self.grid.times)}
        if res.original_opt is not None:
            controls["model optimum"] = control_trajectory(
                self.problem.control, res.original_opt.b_star, self.grid.times)
        control_plot(self.grid.times, controls, self.out / "refine_controls.svg")
        traj = integrate(self.problem, res.b_star, self.grid, cfg.rtol, cfg.atol)
        trajectory_plot(self.grid.times, traj.states,
                        self._surrogate_states(res, rc),
                        self.out / "refine_trajectory.svg",
                        title="refined optimum: model vs surrogate")

    def _surrogate_states(self, res, rc):
        # rebuild the best iteration's surrogate view at b_star for the plot
        it = res.iterations[res.best_index]
        samples = sample(rc.strategy, rc.n_s, it.training_bounds, rc.seed + it.index)
        snap = build_snapshots(self.problem, samples, self.grid, rc.rtol, rc.atol,
                               jobs=self.jobs)
        surr = train(snap, rc.eps_pod, rc.kernel)
        return surr.predict_states(res.b_star)

    def run_pipeline(self):
        self.run_train()
        self.run_evaluate()
        self.run_optimize()
        self.run_refine()

    def run(self, command: str):
        {"sample": self.run_sample, "snapshot": self.run_snapshot,
         "train": self.run_train, "evaluate": self.run_evaluate,
         "optimize": self.run_optimize, "refine": self.run_refine,
         "pipeline": self.run_pipeline}[command]()


def parse_args(argv=None):
    ap = argparse.ArgumentParser(
        prog="podrbf",
        description="POD-RBF trajectory surrogates for parametric ODE "
                    "optimal-control problems")
    ap.add_argument("command", choices=COMMANDS, help="pipeline stage to run")
    ap.add_argument("--config", required=True, help="YAML/JSON run configuration")
    ap.add_argument("--out", default=None, help="output directory (overrides config)")
    ap.add_argument("--jobs", type=int, default=1,
                    help="worker threads for snapshot building")
    ap.add_argument("--deterministic", action="store_true",
                    help="omit wall-time fields so reruns are byte-identical")
    ap.add_argument("--seed", type=int, default=None, help="override sampling seed")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    stage = "setup"
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.output = args.out
        out = Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        runner = Runner(cfg, out, jobs=args.jobs, deterministic=args.deterministic)
        try:
            runner.run(args.command)
        finally:
            stage = runner.stage
        return 0
    except ConfigurationError as e:
        print(f"config error in stage {stage}: {e}", file=sys.stderr)
        return 1
    except NumericalError as e:
        print(f"numerical failure in stage {stage}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
