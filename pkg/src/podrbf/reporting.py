"""Report and figure emission for the CLI pipeline.

All JSON reports are validated against schemas shipped with the package
before they touch disk, and are serialized with sorted keys so reruns with
identical configs are byte-identical. Wall-time fields are stripped when
the caller asks for deterministic output. Figures are standalone SVG files
rendered with the Agg backend (no display required).
"""

from __future__ import annotations

import csv
import io
import json
from importlib import resources

import jsonschema
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

import numpy as np  # noqa: E402

from .errors import ConfigurationError  # noqa: E402

# keys holding seconds; removed from reports under --deterministic
TIMING_KEYS = frozenset({"wall_time", "construction_time", "surrogate_opt_time",
                         "evaluation_time", "timing"})

plt.rcParams["svg.hashsalt"] = "podrbf"


def load_schema(name: str) -> dict:
    ref = resources.files("podrbf.schemas").joinpath(f"{name}.schema.json")
    with ref.open() as f:
        return json.load(f)


def strip_timing(obj):
    """Recursively drop wall-time fields; used by --deterministic."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def write_json(obj: dict, path, schema_name: str, deterministic: bool = False) -> None:
    """Validate against the named schema, then write canonical JSON."""
    if deterministic:
        obj = strip_timing(obj)
    try:
        jsonschema.validate(obj, load_schema(schema_name))
    except jsonschema.ValidationError as e:
        raise ConfigurationError(
            f"report does not match schema {schema_name}: {e.message}") from e
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def write_rows_csv(path, header: list, rows: list) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                    for v in row])
    with open(path, "w") as f:
        f.write(buf.getvalue())


def spectrum_csv(path, sigma: np.ndarray, energy: np.ndarray) -> None:
    rows = [[i + 1, float(s), float(e)]
            for i, (s, e) in enumerate(zip(sigma, energy))]
    write_rows_csv(path, ["index", "sigma", "cumulative_energy"], rows)


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def energy_plot(sigma: np.ndarray, energy: np.ndarray, k: int, eps_pod: float,
                path) -> None:
    """Singular-value decay and cumulative energy with the selection cut."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    idx = np.arange(1, len(sigma) + 1)
    positive = sigma > 0
    ax1.semilogy(idx[positive], sigma[positive], "o-", ms=3)
    ax1.set_xlabel("index")
    ax1.set_ylabel("singular value")
    ax1.set_title("spectrum")
    ax2.plot(idx, energy, "o-", ms=3)
    ax2.axhline(1.0 - eps_pod**2, ls="--", c="gray",
                label=f"threshold 1 - {eps_pod}^2")
    ax2.axvline(k, ls=":", c="tab:red", label=f"k = {k}")
    ax2.set_xlabel("index")
    ax2.set_ylabel("cumulative energy")
    ax2.set_title("energy")
    ax2.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def trajectory_plot(times: np.ndarray, states_true: np.ndarray,
                    states_hat: np.ndarray, path, title: str = "") -> None:
    """Overlay of integrated (solid) and predicted (dashed) states."""
    n_y = states_true.shape[1]
    fig, axes = plt.subplots(1, n_y, figsize=(4.5 * n_y, 3.5), squeeze=False)
    for j in range(n_y):
        ax = axes[0, j]
        ax.plot(times, states_true[:, j], "-", label="model")
        ax.plot(times, states_hat[:, j], "--", label="surrogate")
        ax.set_xlabel("t")
        ax.set_ylabel(f"y{j + 1}")
        ax.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)


def control_plot(times: np.ndarray, labeled_controls: dict, path) -> None:
    """Control trajectories u_i(t) for several parameter vectors.

    labeled_controls maps a legend label to an (n_t, n_u) matrix.
    """
    n_u = next(iter(labeled_controls.values())).shape[1]
    fig, axes = plt.subplots(1, n_u, figsize=(4.5 * n_u, 3.5), squeeze=False)
    for i in range(n_u):
        ax = axes[0, i]
        for label, U in labeled_controls.items():
            ax.plot(times, U[:, i], label=label)
        ax.set_xlabel("t")
        ax.set_ylabel(f"u{i + 1}")
        ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
