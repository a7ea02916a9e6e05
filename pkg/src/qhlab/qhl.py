"""Hamiltonian learning by inversion experiments against an untrusted system.

Each iteration draws two hypotheses from the current posterior, picks an
evolution time from how far apart they are, runs the unknown dynamics
followed by the inverse of one hypothesis, and records whether the initial
state survived. Likelihoods of that datum under every particle are
estimated with a noisy, median-boosted estimator that stands in for
amplitude estimation on a quantum simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import smc
from .ising import CouplingGraph, ising_diagonal, ising_energies, model_norm_diff, uniform_superposition
from .smc import ParticleCloud
from .statevector import as_state, survival_probability

# amplitude estimation succeeds at least this often
AE_SUCCESS_PROB = 0.81
MAX_GUESS_DRAWS = 10
NORM_FLOOR = 1e-12

# spawn-key tags for the per-run random streams
_GUESS, _LIKELIHOOD, _RESAMPLE = 0, 1, 2


class DegeneratePosterior(RuntimeError):
    """The posterior no longer yields two distinguishable hypotheses."""


class UntrustedSystem:
    """Black-box Ising dynamics ``E(t) = exp(-i H(x_true) t)``.

    The protocol only calls :meth:`run`. :meth:`loss` is a referee channel
    used to score estimates for the audit trail; it never feeds back into
    the inference.
    """

    def __init__(self, x_true, graph: CouplingGraph, rng: np.random.Generator):
        x = np.asarray(x_true, dtype=float)
        if x.shape != (graph.dim,):
            raise ValueError(f"x_true must have {graph.dim} couplings")
        self._x_true = x.copy()
        self._H = ising_diagonal(x, graph)
        self.graph = graph
        self.rng = rng

    def run(self, x_minus, t: float, v0) -> int:
        """Evolve ``v0`` for ``t``, invert ``H(x_minus)``, measure survival (1) or not (0)."""
        if not t > 0:
            raise ValueError(f"evolution time must be positive, got {t!r}")
        p = survival_probability(ising_diagonal(x_minus, self.graph), self._H, t, v0)
        return int(self.rng.random() < p)

    def loss(self, estimate) -> float:
        return smc.quadratic_loss(estimate, self._x_true)


def run_untrusted(system: UntrustedSystem, x_minus, t: float, v0, rng=None) -> int:
    """Single inversion experiment; ``rng`` overrides the system's own stream."""
    if rng is not None:
        saved, system.rng = system.rng, rng
        try:
            return system.run(x_minus, t, v0)
        finally:
            system.rng = saved
    return system.run(x_minus, t, v0)


@dataclass(frozen=True)
class EstimatorConfig:
    """Noisy likelihood estimator: ``2k - 1`` votes, each within ``epsilon`` w.p. ``success_prob``."""

    epsilon: float = 0.05
    k: int = 5
    success_prob: float = AE_SUCCESS_PROB

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not 0.0 <= self.success_prob <= 1.0:
            raise ValueError(f"success_prob must lie in [0, 1], got {self.success_prob!r}")

    @property
    def votes(self) -> int:
        return 2 * self.k - 1


def survival_probabilities(X, x_minus, t: float, graph: CouplingGraph, v0=None) -> np.ndarray:
    """Survival probability for every hypothesis row of ``X`` as the simulated truth.

    Vectorized form of ``survival_probability(H(x_minus), H(X[j]), t, v0)``,
    using that all models are diagonal.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    v0 = uniform_superposition(graph.n_qubits) if v0 is None else as_state(v0)
    weights = np.abs(v0) ** 2
    dE = ising_energies(x_minus, graph)[:, None] - ising_energies(X, graph)
    amp = weights @ np.exp(1j * t * dE)
    return np.clip(np.abs(amp) ** 2, 0.0, 1.0)


def vote_noise(n_particles: int, cfg: EstimatorConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws of shape ``(n_particles, 2k - 1, 3)`` feeding the estimator.

    Row ``j`` is particle ``j``'s private stream: any split of the particle
    set into chunks that share this block reproduces the serial result.
    """
    return rng.random((n_particles, cfg.votes, 3))


def _vote(p_datum: np.ndarray, cfg: EstimatorConfig, noise: np.ndarray) -> np.ndarray:
    """Median of ``2k-1`` noisy estimates for each entry of ``p_datum``."""
    u = cfg.epsilon * (2.0 * noise[..., 0] - 1.0)
    fail = noise[..., 1] >= cfg.success_prob
    est = np.where(fail, noise[..., 2], np.clip(p_datum[:, None] + u, 0.0, 1.0))
    return np.median(est, axis=-1)


def noisy_likelihoods(
    X, x_minus, t: float, datum: int, cfg: EstimatorConfig, rng: np.random.Generator | None,
    graph: CouplingGraph, v0=None, noise: np.ndarray | None = None,
) -> np.ndarray:
    """Median-voted likelihood estimates of ``datum`` for every row of ``X``.

    Each estimate is ``clip(p + u, 0, 1)`` with ``u ~ U[-epsilon, epsilon]``
    when the emulated amplitude estimation succeeds, and ``U[0, 1]``
    otherwise; ``p`` is the exact likelihood. Pass ``noise`` (rows of a
    :func:`vote_noise` block) instead of ``rng`` to evaluate a chunk.
    """
    p = survival_probabilities(X, x_minus, t, graph, v0)
    p_datum = p if datum == 1 else 1.0 - p
    if noise is None:
        noise = vote_noise(p_datum.size, cfg, rng)
    if noise.shape != (p_datum.size, cfg.votes, 3):
        raise ValueError(f"noise block has shape {noise.shape}, expected {(p_datum.size, cfg.votes, 3)}")
    return _vote(p_datum, cfg, noise)


def noisy_likelihood(
    x_j, x_minus, t: float, datum: int, cfg: EstimatorConfig, rng: np.random.Generator,
    graph: CouplingGraph, v0=None,
) -> float:
    return float(noisy_likelihoods(np.atleast_2d(x_j), x_minus, t, datum, cfg, rng, graph, v0)[0])


def guess_experiment(
    cloud: ParticleCloud, graph: CouplingGraph, rng: np.random.Generator, norm: str = "spectral",
):
    """Draw ``(x_minus, x_prime)`` from the posterior and set ``t = 1/||H(x_-) - H(x')||``."""
    for _ in range(MAX_GUESS_DRAWS):
        i, j = rng.choice(len(cloud), size=2, p=cloud.weights)
        x_minus, x_prime = cloud.locations[i], cloud.locations[j]
        gap = model_norm_diff(x_minus, x_prime, graph, norm)
        if gap >= NORM_FLOOR:
            return x_minus.copy(), x_prime.copy(), 1.0 / gap
    raise DegeneratePosterior(
        f"degenerate posterior: {MAX_GUESS_DRAWS} draws gave indistinguishable models"
    )


@dataclass(frozen=True)
class QHLConfig:
    graph: CouplingGraph
    n_exp: int = 200
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    resample_threshold: float = 0.5
    liu_west_a: float = 0.98
    likelihood_floor: float = 1e-10
    bounds: tuple | None = None
    norm: str = "spectral"

    def __post_init__(self):
        if self.n_exp < 1:
            raise ValueError("n_exp must be at least 1")
        if not 0.0 < self.resample_threshold < 1.0:
            raise ValueError("resample_threshold must lie in (0, 1)")


@dataclass(frozen=True)
class ExperimentRecord:
    iteration: int
    x_minus: np.ndarray
    x_prime: np.ndarray
    t: float
    datum: int
    loss: float
    ess: float
    resampled: bool
    estimate: np.ndarray


class QHLResult(NamedTuple):
    estimate: np.ndarray
    records: list
    converged_early: bool = False


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream labelled ``key`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def qhl_run(config: QHLConfig, system: UntrustedSystem, prior: ParticleCloud, seed: int) -> QHLResult:
    """Run the learning loop for ``config.n_exp`` iterations.

    Deterministic given ``(config, prior, seed)`` and the state of
    ``system.rng``. A degenerate posterior ends the run early; the records
    gathered so far are returned.
    """
    graph = config.graph
    if prior.dim != graph.dim:
        raise ValueError(f"prior has dimension {prior.dim}, model has {graph.dim}")
    v0 = uniform_superposition(graph.n_qubits)
    guess_rng = stream(seed, _GUESS)
    resample_rng = stream(seed, _RESAMPLE)
    cloud = prior
    records = []
    converged = False
    for it in range(1, config.n_exp + 1):
        try:
            x_minus, x_prime, t = guess_experiment(cloud, graph, guess_rng, config.norm)
        except DegeneratePosterior:
            converged = True
            break
        datum = system.run(x_minus, t, v0)
        lik = noisy_likelihoods(
            cloud.locations, x_minus, t, datum, config.estimator,
            stream(seed, _LIKELIHOOD, it), graph, v0,
        )
        cloud = smc.bayes_update(cloud, np.maximum(lik, config.likelihood_floor))
        ess = smc.effective_sample_size(cloud)
        resampled = ess < config.resample_threshold * len(cloud)
        if resampled:
            cloud = smc.liu_west_resample(cloud, config.liu_west_a, resample_rng, config.bounds)
        est = smc.mean_estimate(cloud)
        records.append(ExperimentRecord(
            it, x_minus, x_prime, t, datum, system.loss(est), ess, bool(resampled), est,
        ))
    return QHLResult(smc.mean_estimate(cloud), records, converged)


def distinguish_by_inversion(
    U_a, U_b, black_box: Callable[[np.ndarray], np.ndarray], v0, shots: int,
    rng: np.random.Generator,
) -> str:
    """Decide whether ``black_box`` applies ``U_a`` or ``U_b``.

    Each shot sends ``v0`` through the box, applies ``U_a^dagger`` and checks
    whether ``v0`` came back. Under ``U_a`` it always does, so any failure
    means ``"b"``. ``U_b`` is not needed by the rule; it is accepted so the
    call states both hypotheses.
    """
    U_a = np.asarray(U_a, dtype=complex)
    v0 = as_state(v0)
    if U_a.shape != (v0.size, v0.size) or np.shape(U_b) != U_a.shape:
        raise ValueError("unitaries and reference state disagree in dimension")
    out = U_a.conj().T @ np.asarray(black_box(v0), dtype=complex)
    p_survive = min(abs(np.vdot(v0, out)) ** 2, 1.0)
    survived = rng.random(shots) < p_survive
    return "a" if survived.all() else "b"


def log_star(N: float) -> int:
    """Iterated base-2 logarithm: applications of ``log2`` until the value is <= 1."""
    if N <= 0:
        raise ValueError("log* needs a positive argument")
    count = 0
    x = N
    while x > 1:
        x = math.log2(x)
        count += 1
    return count


def cost_model(N, d, Lambda, t, epsilon, M_models) -> float:
    """Order-of-magnitude query cost ``M log*(N) d^3 (Lambda t) / epsilon``.

    Sub-leading exponents are dropped, so this is an estimate, not a bound.
    """
    for name, val in [("N", N), ("d", d), ("Lambda", Lambda), ("t", t), ("epsilon", epsilon), ("M_models", M_models)]:
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val!r}")
    return float(M_models) * log_star(N) * float(d) ** 3 * (float(Lambda) * float(t)) / float(epsilon)
