"""Distinguishing discrete distributions from samples.

Covers the optimal single-sample success probability (set by the total
variation distance), majority-vote amplification, and the random-dice
problem where one hypothesis is itself a draw from a Dirichlet prior.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

PROB_TOL = 1e-9
LIKELIHOOD_FLOOR = 1e-12


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability vector with optional labels for each outcome."""

    probs: np.ndarray
    labels: Sequence | None = None

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a non-empty vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != p.size:
                raise ValueError("labels and probabilities differ in length")
            object.__setattr__(self, "labels", labels)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return self.probs.size

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Indices of ``size`` i.i.d. draws (inverse CDF)."""
        cdf = np.cumsum(self.probs)
        cdf /= cdf[-1]
        idx = np.searchsorted(cdf, rng.random(size), side="right")
        return np.minimum(idx, self.probs.size - 1)

    def as_dict(self) -> dict:
        labels = self.labels if self.labels is not None else range(len(self))
        return dict(zip(labels, self.probs.tolist()))


def _probs(d) -> np.ndarray:
    return d.probs if isinstance(d, DiscreteDistribution) else np.asarray(d, dtype=float)


def total_variation(p, q) -> float:
    p, q = _probs(p), _probs(q)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return 0.5 * float(np.sum(np.abs(p - q)))


def distinguish_probability(p, q) -> float:
    """Best achievable probability of naming the source of one sample.

    Equals ``(1 + TV(p, q)) / 2`` for equally likely hypotheses.
    """
    return 0.5 * (1.0 + total_variation(p, q))


def repetitions_for_confidence(p_dist: float, failure: float) -> int:
    """Number of independent single-shot decisions whose majority errs w.p. <= ``failure``.

    Hoeffding bound for a vote with per-shot bias ``b = p_dist - 1/2``:
    ``ceil(ln(1/failure) / (2 b^2))``.
    """
    if not p_dist > 0.5 or p_dist > 1.0:
        raise ValueError(f"p_dist must lie in (1/2, 1], got {p_dist!r}")
    if not 0.0 < failure < 0.5:
        raise ValueError(f"failure must lie in (0, 1/2), got {failure!r}")
    bias = p_dist - 0.5
    return math.ceil(math.log(1.0 / failure) / (2.0 * bias * bias))


def dirichlet_concentration(D: int, variance: float) -> float:
    """Symmetric Dirichlet concentration giving per-entry variance ``variance``."""
    if D < 2:
        raise ValueError("need at least two outcomes")
    vmax = (1.0 / D) * (1.0 - 1.0 / D)
    if not 0.0 < variance < vmax:
        raise ValueError(f"variance must lie in (0, {vmax!r}) for D={D}, got {variance!r}")
    return (vmax / variance - 1.0) / D


def random_dice_distribution(D: int, variance: float, rng: np.random.Generator) -> DiscreteDistribution:
    """A random ``D``-sided die with mean ``1/D`` and per-face variance ``variance``."""
    alpha = dirichlet_concentration(D, variance)
    # gamma sampling directly; rng.dirichlet loses precision for tiny alpha
    g = rng.standard_gamma(alpha, size=D)
    if g.sum() == 0:
        g[rng.integers(D)] = 1.0
    return DiscreteDistribution(g / g.sum())


def _floored_log(p: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(p, LIKELIHOOD_FLOOR))


def empirical_distinguish(p, q, truth: str, samples: int, rng: np.random.Generator) -> str:
    """Draw ``samples`` outcomes from the ``truth`` distribution and guess its label.

    Returns ``"p"`` or ``"q"`` by the larger summed log-likelihood; ties go to
    ``"p"``. Probabilities are floored at 1e-12 so a support mismatch cannot
    produce ``-inf``.
    """
    p, q = _probs(p), _probs(q)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    if truth not in ("p", "q"):
        raise ValueError("truth must be 'p' or 'q'")
    source = DiscreteDistribution(p if truth == "p" else q)
    x = source.sample(samples, rng)
    llr = np.sum(_floored_log(p)[x] - _floored_log(q)[x])
    return "p" if llr >= 0 else "q"


def single_sample_accuracy(p, q, trials: int, rng: np.random.Generator) -> float:
    """Empirical success rate of the likelihood rule on one sample, truth a fair coin."""
    p, q = _probs(p), _probs(q)
    truth_is_p = rng.random(trials) < 0.5
    xp = DiscreteDistribution(p).sample(trials, rng)
    xq = DiscreteDistribution(q).sample(trials, rng)
    x = np.where(truth_is_p, xp, xq)
    says_p = _floored_log(p)[x] >= _floored_log(q)[x]
    return float(np.mean(says_p == truth_is_p))


def majority_vote_distinguish(p, q, truth: str, repetitions: int, rng: np.random.Generator) -> str:
    """Repeat the single-sample decision ``repetitions`` times and take the majority.

    A tied vote goes to ``"p"``.
    """
    p, q = _probs(p), _probs(q)
    source = DiscreteDistribution(p if truth == "p" else q)
    x = source.sample(repetitions, rng)
    votes_p = int(np.count_nonzero(_floored_log(p)[x] >= _floored_log(q)[x]))
    return "p" if 2 * votes_p >= repetitions else "q"


def dice_log_likelihood_ratio(counts: np.ndarray, alpha: float) -> np.ndarray:
    """Log Bayes factor of random-die (Dirichlet-multinomial) vs fair die.

    ``counts`` has shape ``(..., D)``; returns one ratio per leading index.
    """
    counts = np.asarray(counts, dtype=float)
    D = counts.shape[-1]
    B = counts.sum(axis=-1)
    log_dm = (
        gammaln(D * alpha)
        - gammaln(D * alpha + B)
        + np.sum(gammaln(alpha + counts) - gammaln(alpha), axis=-1)
    )
    return log_dm + B * math.log(D)


def read_distribution_csv(path) -> DiscreteDistribution:
    """Read a ``label,probability`` CSV with a header row."""
    labels, probs = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "probability" not in reader.fieldnames:
            raise ValueError(f"{path}: expected a 'probability' column")
        key = "label" if "label" in reader.fieldnames else reader.fieldnames[0]
        for row in reader:
            labels.append(row[key])
            probs.append(float(row["probability"]))
    return DiscreteDistribution(np.array(probs), labels=labels)


def write_distribution_csv(dist: DiscreteDistribution, path, label_header: str = "label", fmt=str) -> None:
    labels = dist.labels if dist.labels is not None else range(len(dist))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([label_header, "probability"])
        for lab, pr in zip(labels, dist.probs):
            w.writerow([fmt(lab), repr(float(pr))])


def align(p: DiscreteDistribution, q: DiscreteDistribution) -> tuple[np.ndarray, np.ndarray, list]:
    """Put two labelled distributions on a common support (missing labels get 0)."""
    if p.labels is None or q.labels is None:
        if len(p) != len(q):
            raise ValueError("unlabelled distributions must have equal length")
        return p.probs, q.probs, list(range(len(p)))
    support = list(dict.fromkeys(list(p.labels) + list(q.labels)))
    pd, qd = p.as_dict(), q.as_dict()
    return (
        np.array([pd.get(s, 0.0) for s in support]),
        np.array([qd.get(s, 0.0) for s in support]),
        support,
    )
