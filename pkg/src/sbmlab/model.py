"""SBM parameter objects and the overlapping-community reduction.

A model is the n-independent triple (k, p, Q) plus a degree regime: the
edge probability between communities i and j is Q[i,j]/n in the constant
regime and ln(n)*Q[i,j]/n in the logarithmic regime.
"""

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import yaml

from .errors import BadPrior, DuplicateRows, NonSymmetric, TooManyProfiles

PRIOR_TOL = 1e-12
ROW_TOL = 1e-12


class Regime(str, Enum):
    CONSTANT = "constant"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class ModelParams:
    """Validated SBM specification; immutable after construction."""

    k: int
    p: np.ndarray
    Q: np.ndarray
    regime: Regime
    duplicate_rows_waived: bool = False

    @property
    def P(self):
        return np.diag(self.p)

    @property
    def PQ(self):
        return np.diag(self.p) @ self.Q

    def edge_probability(self, n):
        """Per-pair connection probabilities at graph size n (k x k matrix)."""
        if self.regime is Regime.LOGARITHMIC:
            return np.log(n) * self.Q / n
        return self.Q / n

    def scaled(self, factor, regime=None):
        """Params with the kernel multiplied by a scalar (distinct rows survive)."""
        return ModelParams(
            k=self.k,
            p=self.p,
            Q=factor * self.Q,
            regime=self.regime if regime is None else Regime(regime),
            duplicate_rows_waived=self.duplicate_rows_waived,
        )


def build_params(k, p, Q, regime, allow_duplicate_rows=False):
    """Validate and freeze an SBM specification.

    Raises BadPrior, NonSymmetric or DuplicateRows when the invariants are
    violated.  Duplicate rows may be waived for kernels coming from the
    overlapping-community reduction, where they are legitimate.
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    Q = np.asarray(Q, dtype=float)
    k = int(k)
    if p.shape != (k,) or Q.shape != (k, k):
        raise BadPrior(f"inconsistent dimensions: k={k}, p{p.shape}, Q{Q.shape}")
    if np.any(p <= 0) or abs(p.sum() - 1.0) > PRIOR_TOL:
        raise BadPrior("p must be a strictly positive vector summing to 1")
    if not np.array_equal(Q, Q.T):
        raise NonSymmetric("Q must be exactly symmetric")
    if np.any(Q < 0):
        raise NonSymmetric("Q entries must be nonnegative")
    waived = False
    for i in range(k):
        for j in range(i + 1, k):
            if np.all(np.abs(Q[i] - Q[j]) <= ROW_TOL):
                if allow_duplicate_rows:
                    waived = True
                    warnings.warn(
                        f"rows {i} and {j} of Q coincide; communities are "
                        "statistically indistinguishable",
                        stacklevel=2,
                    )
                else:
                    raise DuplicateRows(f"rows {i} and {j} of Q are equal")
    p = p.copy()
    Q = Q.copy()
    p.flags.writeable = False
    Q.flags.writeable = False
    return ModelParams(k=k, p=p, Q=Q, regime=Regime(regime), duplicate_rows_waived=waived)


@dataclass(frozen=True)
class OverlapModel:
    """Overlapping-community model on binary profiles of length t_profiles.

    prior maps each profile in {0,1}^t to its probability; kernel is a
    symmetric function of two profiles giving the connection intensity.
    """

    t_profiles: int
    prior: dict = field(repr=False)
    kernel: object = field(repr=False)

    def __post_init__(self):
        total = sum(self.prior.values())
        if abs(total - 1.0) > PRIOR_TOL:
            raise BadPrior(f"profile prior sums to {total}")


def profile_of(i, t):
    """Binary profile of community index i (0-based), bit j = (i >> j) & 1."""
    return tuple((i >> j) & 1 for j in range(t))


def osbm_to_sbm(model, regime=Regime.CONSTANT):
    """Reduce an overlapping-community model to a plain SBM with 2^t communities.

    Community i carries the binary profile of i; the prior and kernel are
    read off pointwise.  Duplicate kernel rows are waived (with a warning)
    since overlap models can produce them legitimately.
    """
    t = model.t_profiles
    if t > 16:
        raise TooManyProfiles(f"t={t} gives 2^t communities; limit is 16")
    k = 2**t
    profiles = [profile_of(i, t) for i in range(k)]
    p = np.array([model.prior.get(x, 0.0) for x in profiles])
    if np.any(p <= 0):
        raise BadPrior("every profile needs strictly positive prior mass")
    Q = np.empty((k, k))
    for i, x in enumerate(profiles):
        for j, y in enumerate(profiles):
            Q[i, j] = model.kernel(x, y)
    return build_params(k, p, Q, regime, allow_duplicate_rows=True)


def save_params(params, path, seed=0):
    doc = {
        "k": params.k,
        "p": [float(v) for v in params.p],
        "Q": [[float(v) for v in row] for row in params.Q],
        "regime": params.regime.value,
        "seed": int(seed),
    }
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


def load_params(path):
    """Read a params document; returns (ModelParams, seed)."""
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    params = build_params(doc["k"], doc["p"], doc["Q"], doc["regime"])
    return params, int(doc.get("seed", 0))
