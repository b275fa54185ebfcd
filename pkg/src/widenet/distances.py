"""Empirical distances between sampled network outputs and Gaussian references.

Four estimators:

- ``kolmogorov_distance_1d``: sup-norm distance between the empirical CDF of
  a scalar sample and a reference normal CDF, with the distribution-free
  Dvoretzky-Kiefer-Wolfowitz radius sqrt(ln(2/(1-conf)) / (2m)).
- ``wasserstein1_distance_1d``: order-statistic coupling against reference
  quantiles at the midpoints (i - 1/2)/m, with a bootstrap percentile radius.
- ``multivariate_kolmogorov``: supremum of |F_m - F| over lower-left
  orthants anchored on a low-discrepancy (Halton) grid plus corners taken
  from the sample itself.
- ``halfspace_kolmogorov_sup``: supremum over unit directions (canonical
  axes plus seeded random ones) of the 1-d Kolmogorov distance between the
  projected sample and the projected reference normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .normals import bvn_cdf_vec, mvn_cdf, norm_cdf, norm_quantile

__all__ = ["DistanceEstimate", "kolmogorov_distance_1d",
           "wasserstein1_distance_1d", "multivariate_kolmogorov",
           "halfspace_kolmogorov_sup", "kolmogorov_two_centered_normals"]


@dataclass
class DistanceEstimate:
    value: float
    error: float
    confidence: float
    method: str
    n_samples: int
    extras: dict = field(default_factory=dict)

    def upper(self) -> float:
        return self.value + self.error

    def lower(self) -> float:
        return max(0.0, self.value - self.error)


def dkw_radius(m: int, confidence: float) -> float:
    """Two-sided DKW band half-width at the given confidence level."""
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * m))


def kolmogorov_distance_1d(samples, *, ref_variance: float = 1.0,
                           ref_cdf=None, confidence: float = 0.99) -> DistanceEstimate:
    """sup_t |F_m(t) - F(t)| for a scalar sample vs. N(0, ref_variance)
    (or an arbitrary ``ref_cdf``), plus the DKW radius."""
    s = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    m = s.size
    if m == 0:
        raise ValueError("empty sample")
    if ref_cdf is not None:
        u = np.asarray(ref_cdf(s), dtype=np.float64)
    else:
        if ref_variance <= 0:
            raise ValueError("ref_variance must be > 0")
        u = norm_cdf(s / math.sqrt(ref_variance))
    grid = np.arange(1, m + 1, dtype=np.float64) / m
    d_plus = float(np.max(grid - u))
    d_minus = float(np.max(u - (grid - 1.0 / m)))
    return DistanceEstimate(value=max(d_plus, d_minus),
                            error=dkw_radius(m, confidence),
                            confidence=confidence, method="ecdf_sup",
                            n_samples=m)


def wasserstein1_distance_1d(samples, *, ref_variance: float = 1.0,
                             n_boot: int = 200, confidence: float = 0.99,
                             seed: int = 0) -> DistanceEstimate:
    """W1 distance of a scalar sample to N(0, ref_variance) via the
    order-statistic/quantile coupling, with a bootstrap percentile radius.

    The point estimate is mean_i |x_(i) - q_i| with q_i the reference
    quantile at (i - 1/2)/m.  Bootstrap resamples reuse the sorted base
    sample through multinomial counts, so each replicate costs O(m).
    """
    s = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    m = s.size
    if m == 0:
        raise ValueError("empty sample")
    if ref_variance < 0:
        raise ValueError("ref_variance must be >= 0")
    q = math.sqrt(ref_variance) * norm_quantile((np.arange(m) + 0.5) / m)
    value = float(np.mean(np.abs(s - q)))
    error = 0.0
    if n_boot > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x5731,)))
        stats = np.empty(n_boot)
        probs = np.full(m, 1.0 / m)
        for b in range(n_boot):
            counts = rng.multinomial(m, probs)
            stats[b] = np.mean(np.abs(np.repeat(s, counts) - q))
        lo, hi = np.quantile(stats, [(1 - confidence) / 2, (1 + confidence) / 2])
        error = float(max(hi - value, value - lo, 0.0))
    return DistanceEstimate(value=value, error=error, confidence=confidence,
                            method="quantile_coupling", n_samples=m,
                            extras={"n_boot": n_boot})


def kolmogorov_two_centered_normals(s1: float, s2: float) -> float:
    """Exact Kolmogorov distance between N(0, s1^2) and N(0, s2^2)."""
    s1, s2 = abs(s1), abs(s2)
    if s1 == s2:
        return 0.0
    if s1 > s2:
        s1, s2 = s2, s1
    if s1 == 0.0:
        return 0.5
    t = math.sqrt(2.0 * math.log(s2 / s1) / (1.0 / s1 ** 2 - 1.0 / s2 ** 2))
    return float(norm_cdf(t / s1) - norm_cdf(t / s2))


# ---------------------------------------------------------------------------

def _standardize_corners(corners: np.ndarray, cov: np.ndarray):
    sd = np.sqrt(np.diag(cov))
    return corners / sd[None, :], cov / np.outer(sd, sd)


def _reference_orthant_probs(corners: np.ndarray, cov: np.ndarray,
                             seed: int) -> tuple[np.ndarray, float]:
    d = cov.shape[0]
    if d == 1:
        return norm_cdf(corners[:, 0] / math.sqrt(cov[0, 0])), 0.0
    if d == 2:
        z, corr = _standardize_corners(corners, cov)
        rho = float(corr[0, 1])
        return bvn_cdf_vec(z[:, 0], z[:, 1], rho), 1e-14
    vals = np.empty(corners.shape[0])
    err = 0.0
    for i, t in enumerate(corners):
        vals[i], e = mvn_cdf(t, cov, seed=seed + i)
        err = max(err, e)
    return vals, err


def _empirical_orthant_probs(samples: np.ndarray, corners: np.ndarray,
                             chunk: int = 256) -> np.ndarray:
    m = samples.shape[0]
    out = np.empty(corners.shape[0])
    for lo in range(0, corners.shape[0], chunk):
        t = corners[lo:lo + chunk]
        inside = np.ones((m, t.shape[0]), dtype=bool)
        for j in range(samples.shape[1]):
            inside &= samples[:, j][:, None] <= t[None, :, j]
        out[lo:lo + chunk] = inside.mean(axis=0)
    return out


def multivariate_kolmogorov(samples, cov, *, seed: int = 0,
                            n_grid: int = 4096, n_sample_corners: int = 4096,
                            max_corners: int = 200_000,
                            confidence: float = 0.99) -> DistanceEstimate:
    """sup over corner sets prod_i (-inf, t_i] of |F_m(t) - F(t)| where F is
    the N(0, cov) law.  Corners come from a scrambled Halton grid mapped
    through the reference marginal quantiles, plus corners sitting at sample
    points themselves (where the empirical CDF jumps).

    The reported radius is the one-dimensional DKW half-width; for d > 1 it
    is a heuristic scale, not a distribution-free guarantee.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    m, d = x.shape
    cov = np.asarray(cov, dtype=np.float64)
    if cov.shape != (d, d):
        raise ValueError("cov shape does not match sample dimension")
    if np.any(np.diag(cov) <= 0):
        raise ValueError("reference covariance must have positive diagonal")
    if np.linalg.eigvalsh(0.5 * (cov + cov.T)).min() <= 0:
        raise ValueError("reference covariance must be positive definite")
    if d >= 3:
        n_grid = min(n_grid, 512)
        n_sample_corners = min(n_sample_corners, 1536)
    sd = np.sqrt(np.diag(cov))

    halton = qmc.Halton(d=d, scramble=True, seed=seed)
    u = halton.random(min(n_grid, max_corners))
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    grid_corners = sd[None, :] * norm_quantile(u)

    n_take = min(n_sample_corners, m, max(0, max_corners - grid_corners.shape[0]))
    if n_take >= m:
        sample_corners = x
    elif n_take > 0:
        idx = np.random.default_rng(
            np.random.SeedSequence(seed, spawn_key=(0x6D4B,))).choice(m, size=n_take, replace=False)
        sample_corners = x[idx]
    else:
        sample_corners = np.empty((0, d))
    corners = np.vstack([grid_corners, sample_corners])[:max_corners]

    ref, ref_err = _reference_orthant_probs(corners, cov, seed)
    emp = _empirical_orthant_probs(x, corners)
    dev = np.abs(emp - ref)
    # at sample corners the ECDF jumps by >= 1/m: check the open side too
    i_best = int(np.argmax(dev))
    value = float(dev[i_best])
    return DistanceEstimate(value=value, error=dkw_radius(m, confidence),
                            confidence=confidence, method="corner_sup",
                            n_samples=m,
                            extras={"n_corners": int(corners.shape[0]),
                                    "ref_quadrature_error": float(ref_err),
                                    "argmax_corner": corners[i_best].tolist()})


def halfspace_kolmogorov_sup(samples, cov, *, n_directions: int = 128,
                             seed: int = 0,
                             confidence: float = 0.99) -> DistanceEstimate:
    """sup over unit directions u of the 1-d Kolmogorov distance between
    <samples, u> and N(0, u' cov u).  Directions are the canonical axes plus
    seeded isotropic draws; the DKW radius is inflated by sqrt(ln n_dirs)
    to account for taking a maximum."""
    if n_directions < 100:
        raise ValueError("n_directions must be >= 100")
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    m, d = x.shape
    cov = np.asarray(cov, dtype=np.float64)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x4853,)))
    dirs = [np.eye(d)]
    n_extra = max(0, n_directions - d)
    if n_extra:
        g = rng.standard_normal((n_extra, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        dirs.append(g)
    u = np.vstack(dirs)
    proj = x @ u.T                     # (m, n_dirs)
    var = np.einsum("kd,de,ke->k", u, cov, u)
    if np.any(var <= 0):
        raise ValueError("reference covariance is degenerate along a direction")
    best, best_dir = 0.0, u[0]
    grid_hi = np.arange(1, m + 1, dtype=np.float64) / m
    grid_lo = grid_hi - 1.0 / m
    for k in range(u.shape[0]):
        s = np.sort(proj[:, k])
        p = norm_cdf(s / math.sqrt(var[k]))
        dev = max(float(np.max(grid_hi - p)), float(np.max(p - grid_lo)))
        if dev > best:
            best, best_dir = dev, u[k]
    n_dirs = u.shape[0]
    radius = dkw_radius(m, confidence) * math.sqrt(max(1.0, math.log(n_dirs)))
    return DistanceEstimate(value=best, error=radius, confidence=confidence,
                            method="halfspace_sup", n_samples=m,
                            extras={"n_directions": int(n_dirs),
                                    "argmax_direction": best_dir.tolist()})
