"""Space-filling designs over a box domain.

Three strategies: plain random sampling (RS), Latin hypercube sampling
(LHS), and symmetric Latin hypercube sampling (SLHS). All draw from
``numpy.random.default_rng(seed)`` (PCG64); the generator choice and call
sequence are a repo contract — changing either invalidates golden tests.

LHS places exactly one point in each of n_s equal-width strata per
dimension, uniformly jittered within its stratum. SLHS additionally makes
the design closed under reflection through the box center: it stratifies
floor(n_s/2) points over randomly chosen half-strata and mirrors them in
unit coordinates (1 - x); an odd n_s adds the box midpoint, which is its
own mirror.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .problem import Box

RS = "RS"
LHS = "LHS"
SLHS = "SLHS"
STRATEGIES = (RS, LHS, SLHS)


@dataclass(frozen=True)
class SampleSet:
    """n_s parameter vectors plus the recipe that produced them."""

    points: np.ndarray          # (n_s, n)
    strategy: str
    seed: int
    box: Box

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_2d(np.asarray(self.points, float)))

    @property
    def n_s(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _from_unit(u: np.ndarray, box: Box) -> np.ndarray:
    return box.lower + u * (box.upper - box.lower)


def random_sample(n_s: int, box: Box, seed: int) -> SampleSet:
    """n_s points i.i.d. uniform on the box."""
    if n_s < 1:
        raise ConfigurationError("n_s must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random((n_s, box.dim))
    return SampleSet(_from_unit(u, box), RS, seed, box)


def _lhs_unit(n_s: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-cube LHS: independent stratum permutation + jitter per dimension."""
    u = np.empty((n_s, dim))
    for j in range(dim):
        perm = rng.permutation(n_s)
        jitter = rng.random(n_s)
        u[:, j] = (perm + jitter) / n_s
    return u


def lhs_sample(n_s: int, box: Box, seed: int) -> SampleSet:
    """Latin hypercube design: one point per stratum per dimension."""
    if n_s < 1:
        raise ConfigurationError("n_s must be >= 1")
    rng = np.random.default_rng(seed)
    return SampleSet(_from_unit(_lhs_unit(n_s, box.dim, rng), box), LHS, seed, box)


def slhs_sample(n_s: int, box: Box, seed: int) -> SampleSet:
    """Symmetric Latin hypercube design: stratified and mirror-closed."""
    if n_s < 1:
        raise ConfigurationError("n_s must be >= 1")
    rng = np.random.default_rng(seed)
    n_half = n_s // 2
    u = np.empty((n_s, box.dim))
    for j in range(box.dim):
        # pick one stratum from each symmetric pair {p, n_s-1-p}, jitter it;
        # the mirrored half fills the opposite strata exactly
        pairs = rng.permutation(n_half)
        flips = rng.integers(0, 2, n_half)
        strata = np.where(flips == 0, pairs, n_s - 1 - pairs)
        jitter = rng.random(n_half)
        u[:n_half, j] = (strata + jitter) / n_s
    u[n_half:2 * n_half] = 1.0 - u[:n_half]
    if n_s % 2 == 1:
        u[-1] = 0.5
    return SampleSet(_from_unit(u, box), SLHS, seed, box)


_SAMPLERS = {RS: random_sample, LHS: lhs_sample, SLHS: slhs_sample}


def sample(strategy: str, n_s: int, box: Box, seed: int) -> SampleSet:
    """Dispatch on strategy name."""
    try:
        fn = _SAMPLERS[strategy]
    except KeyError:
        raise ConfigurationError(
            f"unknown sampling strategy {strategy!r}; choose from {STRATEGIES}") from None
    return fn(n_s, box, seed)


# -- CSV round trip ---------------------------------------------------------

def to_csv(s: SampleSet) -> str:
    """One row per point; provenance in comment lines above the header."""
    buf = io.StringIO()
    buf.write(f"# strategy: {s.strategy}\n")
    buf.write(f"# seed: {s.seed}\n")
    buf.write("# box_lower: " + ",".join(repr(float(v)) for v in s.box.lower) + "\n")
    buf.write("# box_upper: " + ",".join(repr(float(v)) for v in s.box.upper) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"b{j + 1}" for j in range(s.dim)])
    for row in s.points:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def from_csv(text: str) -> SampleSet:
    meta = {}
    rows = []
    header_seen = False
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            meta[key.strip()] = val.strip()
        elif line.strip():
            if not header_seen:
                header_seen = True
                continue
            rows.append([float(v) for v in line.split(",")])
    try:
        box = Box(np.array([float(v) for v in meta["box_lower"].split(",")]),
                  np.array([float(v) for v in meta["box_upper"].split(",")]))
        return SampleSet(np.array(rows), meta["strategy"], int(meta["seed"]), box)
    except KeyError as e:
        raise ConfigurationError(f"sample CSV missing metadata line {e}") from None


def save_csv(s: SampleSet, path) -> None:
    with open(path, "w") as f:
        f.write(to_csv(s))


def load_csv(path) -> SampleSet:
    with open(path) as f:
        return from_csv(f.read())
