"""Eigenstructure of PQ: distinct eigenvalues, eigenspace projectors, SNR.

PQ = diag(p) Q is similar to the symmetric matrix S = sqrt(P) Q sqrt(P)
via conjugation by sqrt(P), so its spectrum is real and the decomposition
can be done with a symmetric eigensolver; eigenvectors of PQ are obtained
as v = sqrt(P) u.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, NumericalFailure

GROUP_TOL = 1e-9  # relative to |lambda_1|, for merging split multiplicities


@dataclass(frozen=True)
class SpectralSummary:
    distinct: np.ndarray  # distinct eigenvalues sorted by |.| descending
    multiplicities: tuple
    h: int
    eta: int
    projectors: tuple  # k x k projector per distinct eigenvalue
    lambda_max: float
    lambda_min_nonzero: float
    rho: float


def eigen_summary(params):
    """Distinct eigenvalues of PQ with eigenspace projectors and the SNR rho."""
    p = params.p
    Q = params.Q
    sqrt_p = np.sqrt(p)
    S = sqrt_p[:, None] * Q * sqrt_p[None, :]
    try:
        vals, vecs = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc

    order = np.argsort(-np.abs(vals))
    vals = vals[order]
    vecs = vecs[:, order]
    scale = max(abs(vals[0]), 1e-300)
    tol = GROUP_TOL * scale

    # group numerically equal eigenvalues into distinct values
    groups = []
    for idx, lam in enumerate(vals):
        if groups and abs(lam - groups[-1][0][-1]) <= tol:
            groups[-1][0].append(lam)
            groups[-1][1].append(idx)
        else:
            groups.append(([lam], [idx]))

    distinct = np.array([float(np.mean(g[0])) for g in groups])
    mult = tuple(len(g[1]) for g in groups)
    h = len(groups)

    inv_sqrt_p = 1.0 / sqrt_p
    projectors = []
    for _, idxs in groups:
        # re-orthonormalize the grouped eigenvectors of S, then conjugate:
        # P_W = sqrt(P) (U U^T) sqrt(P)^{-1}
        U, _ = np.linalg.qr(vecs[:, idxs])
        PU = U @ U.T
        proj = sqrt_p[:, None] * PU * inv_sqrt_p[None, :]
        projectors.append(proj)

    if abs(distinct[0]) <= tol:
        raise DegenerateSpectrum("all eigenvalues of PQ are zero")
    eta = h - 1 if abs(distinct[-1]) <= tol else h
    lam1 = float(distinct[0])
    lam_eta = float(distinct[eta - 1])
    return SpectralSummary(
        distinct=distinct,
        multiplicities=mult,
        h=h,
        eta=eta,
        projectors=tuple(projectors),
        lambda_max=lam1,
        lambda_min_nonzero=lam_eta,
        rho=lam_eta**2 / lam1,
    )


def snr(params):
    """rho = |lambda_eta|^2 / lambda_1; requires lambda_1 > 0."""
    summary = eigen_summary(params)
    if summary.lambda_max <= 0:
        raise DegenerateSpectrum(f"lambda_1 = {summary.lambda_max} is not positive")
    return summary.rho


@dataclass(frozen=True)
class Theorem1Report:
    rho_gt_4: bool
    pow7_lt_pow8: bool
    four_cube_lt_fourth: bool
    feasible_x_interval: tuple  # (lo, hi) or () when empty
    separation_floor: float  # the projector quantity M


def _separation_floor(params, summary):
    """M = min over community pairs and separating eigenspaces of the
    projected squared distance P_W(e_i - e_j) . P^{-1} P_W(e_i - e_j)."""
    k = params.k
    inv_p = 1.0 / params.p
    scale = abs(summary.lambda_max)
    best = np.inf
    for i in range(k):
        for j in range(i + 1, k):
            e = np.zeros(k)
            e[i], e[j] = 1.0, -1.0
            for proj in summary.projectors:
                w = proj @ e
                if np.max(np.abs(w)) <= 1e-9 * max(scale, 1.0):
                    continue  # this eigenspace does not separate i and j
                best = min(best, float(w @ (inv_p * w)))
    return best


def theorem1_conditions(params):
    """Evaluate the spectral applicability conditions and the feasible x range.

    The x upper bound is min(lambda_1 k / (|lambda'| min p),
    -(min p)^{-1/2} + sqrt(1/min p + M/13)) with M the separating-projector
    floor; the interval is empty when the bound is nonpositive.
    """
    summary = eigen_summary(params)
    lam = summary.lambda_max
    lamp = summary.lambda_min_nonzero
    min_p = float(np.min(params.p))
    rho_gt_4 = summary.rho > 4.0
    pow7_lt_pow8 = lam**7 < lamp**8
    four_cube_lt_fourth = 4.0 * lam**3 < lamp**4

    M = _separation_floor(params, summary)
    ub1 = lam * params.k / (abs(lamp) * min_p)
    ub2 = -(min_p**-0.5) + np.sqrt(1.0 / min_p + M / 13.0)
    upper = min(ub1, ub2)
    interval = (0.0, float(upper)) if upper > 0 else ()
    return Theorem1Report(
        rho_gt_4=rho_gt_4,
        pow7_lt_pow8=pow7_lt_pow8,
        four_cube_lt_fourth=four_cube_lt_fourth,
        feasible_x_interval=interval,
        separation_floor=M,
    )
