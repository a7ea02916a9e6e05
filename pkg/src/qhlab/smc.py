"""Sequential Monte Carlo representation of a posterior over model parameters."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-9
DEGENERATE_JITTER = 1e-8


class ParticleCloud:
    """Weighted particles ``{(x_i, w_i)}`` with weights summing to one.

    Instances are immutable: every update returns a new cloud.

    Parameters
    ----------
    locations : array_like, shape (M, dim)
    weights : array_like, shape (M,), optional
        Defaults to uniform. Must already sum to one.
    """

    __slots__ = ("locations", "weights")

    def __init__(self, locations, weights=None):
        x = np.array(locations, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] < 2:
            raise ValueError("a cloud needs at least two particles, shape (M, dim)")
        M = x.shape[0]
        w = np.full(M, 1.0 / M) if weights is None else np.array(weights, dtype=float)
        if w.shape != (M,):
            raise ValueError(f"weights shape {w.shape} does not match {M} particles")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "locations", x)
        object.__setattr__(self, "weights", w)

    def __setattr__(self, name, value):
        raise AttributeError("ParticleCloud is immutable")

    @classmethod
    def from_prior(cls, low, high, n_particles: int, dim: int, rng: np.random.Generator) -> ParticleCloud:
        """Uniform draws from the box ``[low, high]^dim`` with equal weights."""
        low = np.broadcast_to(np.asarray(low, dtype=float), (dim,))
        high = np.broadcast_to(np.asarray(high, dtype=float), (dim,))
        return cls(rng.uniform(low, high, size=(n_particles, dim)))

    def __len__(self) -> int:
        return self.locations.shape[0]

    @property
    def dim(self) -> int:
        return self.locations.shape[1]

    def covariance(self) -> np.ndarray:
        mu = self.weights @ self.locations
        dev = self.locations - mu
        return (dev * self.weights[:, None]).T @ dev

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["particle", "weight"] + [f"x_{j}" for j in range(self.dim)])
            for i, (wi, xi) in enumerate(zip(self.weights, self.locations)):
                w.writerow([i, repr(float(wi))] + [repr(float(v)) for v in xi])

    @classmethod
    def from_csv(cls, path) -> ParticleCloud:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 2:], data[:, 1])


def bayes_update(cloud: ParticleCloud, likelihoods) -> ParticleCloud:
    """Reweight by ``w_i p_i / sum_m w_m p_m``."""
    p = np.asarray(likelihoods, dtype=float)
    if p.shape != cloud.weights.shape:
        raise ValueError(f"expected {len(cloud)} likelihoods, got shape {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("likelihoods must be finite and non-negative")
    w = cloud.weights * p
    Z = w.sum()
    if not Z > 0:
        raise ValueError("every particle has zero posterior weight; check the likelihood model")
    return ParticleCloud(cloud.locations, w / Z)


def effective_sample_size(cloud: ParticleCloud) -> float:
    return float(1.0 / np.sum(cloud.weights**2))


def mean_estimate(cloud: ParticleCloud) -> np.ndarray:
    return cloud.weights @ cloud.locations


def quadratic_loss(estimate, x_true) -> float:
    e = np.asarray(estimate, dtype=float)
    x = np.asarray(x_true, dtype=float)
    if e.shape != x.shape:
        raise ValueError(f"dimension mismatch: {e.shape} vs {x.shape}")
    return float(np.sum((e - x) ** 2))


def _sqrtm_psd(cov: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(cov)
    return evecs * np.sqrt(np.clip(evals, 0.0, None))


def liu_west_resample(
    cloud: ParticleCloud,
    a: float,
    rng: np.random.Generator,
    bounds: tuple | None = None,
    max_redraws: int = 100,
) -> ParticleCloud:
    """Liu-West kernel resampling.

    Each new particle picks an ancestor ``x_i`` with probability ``w_i`` and
    is drawn from ``N(a x_i + (1 - a) mu, (1 - a^2) Sigma)``, where ``mu`` and
    ``Sigma`` are the cloud mean and covariance. The mixture keeps the first
    two moments of the posterior. Output weights are uniform.

    Parameters
    ----------
    bounds : (low, high), optional
        Box constraint. Draws landing outside are redrawn from the same
        kernel up to ``max_redraws`` times, then clipped.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError(f"Liu-West parameter must lie in (0, 1], got {a!r}")
    M, dim = cloud.locations.shape
    mu = mean_estimate(cloud)
    cov = cloud.covariance()
    ancestors = rng.choice(M, size=M, p=cloud.weights)
    centers = a * cloud.locations[ancestors] + (1.0 - a) * mu

    # spread at roundoff level of the locations counts as collapsed
    scale = max(1.0, float(np.max(np.abs(cloud.locations))))
    if not np.all(np.isfinite(cov)) or np.trace(cov) <= (1e-12 * scale) ** 2:
        logger.warning("degenerate particle covariance; jittering ancestors by %g", DEGENERATE_JITTER)
        centers = cloud.locations[ancestors]
        root = DEGENERATE_JITTER * np.eye(dim)
    else:
        root = np.sqrt(1.0 - a * a) * _sqrtm_psd(cov)

    def draw(c):
        return c + rng.standard_normal(c.shape) @ root.T

    new = draw(centers)
    if bounds is not None:
        low = np.broadcast_to(np.asarray(bounds[0], dtype=float), (dim,))
        high = np.broadcast_to(np.asarray(bounds[1], dtype=float), (dim,))
        for _ in range(max_redraws):
            bad = np.any((new < low) | (new > high), axis=1)
            if not bad.any():
                break
            new[bad] = draw(centers[bad])
        new = np.clip(new, low, high)
    return ParticleCloud(new)
