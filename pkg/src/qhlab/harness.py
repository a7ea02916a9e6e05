"""Seeded experiment drivers that write CSV and JSON results.

Every random draw in a run descends from ``RunConfig.seed`` through
``numpy.random.SeedSequence`` spawn keys, so a config reproduces its output
files byte for byte.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import distance
from .ising import CouplingGraph
from .qhl import EstimatorConfig, QHLConfig, UntrustedSystem, qhl_run
from .smc import ParticleCloud, mean_estimate, quadratic_loss

logger = logging.getLogger(__name__)

MAX_QUBITS_QHL = 9
RELIABLE_R2 = 0.7


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Settings for a batch of seeded learning runs.

    ``graph`` is ``"complete"``, ``"line"`` or an explicit edge list.
    ``x_true`` is a coupling vector or ``"random-in-prior"`` (one draw per
    run). ``prior_low``/``prior_high`` are scalars or per-coupling lists.
    """

    n_qubits: int = 3
    graph: str | list = "complete"
    x_true: str | list = "random-in-prior"
    prior_low: float | list = -1.0
    prior_high: float | list = 1.0
    particles: int = 2000
    epsilon: float = 0.05
    k: int = 5
    n_exp: int = 200
    resample_threshold: float = 0.5
    liu_west_a: float = 0.98
    seed: int = 0
    runs: int = 20
    success_prob: float = 0.81
    norm: str = "spectral"

    def __post_init__(self):
        try:
            self.coupling_graph()
            self.estimator()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.n_qubits > MAX_QUBITS_QHL:
            raise ConfigError(f"n_qubits is capped at {MAX_QUBITS_QHL}, got {self.n_qubits}")
        low, high = self.bounds()
        if np.any(low >= high):
            raise ConfigError("prior_low must be below prior_high for every coupling")
        if self.particles < 2:
            raise ConfigError("particles must be at least 2")
        if self.n_exp < 1:
            raise ConfigError("n_exp must be at least 1")
        if not 0.0 < self.resample_threshold < 1.0:
            raise ConfigError("resample_threshold must lie in (0, 1)")
        if not 0.0 < self.liu_west_a <= 1.0:
            raise ConfigError("liu_west_a must lie in (0, 1]")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if self.norm not in ("spectral", "frobenius"):
            raise ConfigError(f"norm must be 'spectral' or 'frobenius', got {self.norm!r}")
        if isinstance(self.x_true, str):
            if self.x_true != "random-in-prior":
                raise ConfigError(f"x_true must be a list or 'random-in-prior', got {self.x_true!r}")
        elif len(self.x_true) != self.coupling_graph().dim:
            raise ConfigError(
                f"x_true has {len(self.x_true)} entries, graph has {self.coupling_graph().dim} couplings"
            )

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> RunConfig:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)

    def coupling_graph(self) -> CouplingGraph:
        if self.graph == "complete":
            return CouplingGraph.complete(self.n_qubits)
        if self.graph == "line":
            return CouplingGraph.line(self.n_qubits)
        if isinstance(self.graph, str):
            raise ValueError(f"graph must be 'complete', 'line' or an edge list, got {self.graph!r}")
        return CouplingGraph(self.n_qubits, tuple(tuple(e) for e in self.graph), "custom")

    def estimator(self) -> EstimatorConfig:
        return EstimatorConfig(self.epsilon, self.k, self.success_prob)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        dim = self.coupling_graph().dim
        try:
            low = np.broadcast_to(np.asarray(self.prior_low, dtype=float), (dim,))
            high = np.broadcast_to(np.asarray(self.prior_high, dtype=float), (dim,))
        except ValueError:
            raise ConfigError(f"prior bounds must be scalars or lists of {dim} values") from None
        return low, high

    def qhl_config(self) -> QHLConfig:
        return QHLConfig(
            graph=self.coupling_graph(),
            n_exp=self.n_exp,
            estimator=self.estimator(),
            resample_threshold=self.resample_threshold,
            liu_west_a=self.liu_west_a,
            bounds=self.bounds(),
            norm=self.norm,
        )


def run_seed(seed: int, run_id: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(run_id,)).generate_state(1)[0])


@dataclass
class RunTrace:
    """One replicate: per-iteration rows plus the loss at iteration 0 (the prior)."""

    run_id: int
    x_true: np.ndarray
    rows: list = field(default_factory=list)

    @property
    def losses(self) -> np.ndarray:
        return np.array([r["loss"] for r in self.rows])


def run_replicate(config: RunConfig, run_id: int) -> RunTrace:
    graph = config.coupling_graph()
    low, high = config.bounds()
    rs = run_seed(config.seed, run_id)
    truth_rng, prior_rng, system_rng = (
        np.random.default_rng(np.random.SeedSequence(rs, spawn_key=(10 + i,))) for i in range(3)
    )
    if isinstance(config.x_true, str):
        x_true = truth_rng.uniform(low, high)
    else:
        x_true = np.asarray(config.x_true, dtype=float)
    prior = ParticleCloud.from_prior(low, high, config.particles, graph.dim, prior_rng)
    system = UntrustedSystem(x_true, graph, system_rng)
    result = qhl_run(config.qhl_config(), system, prior, rs)

    trace = RunTrace(run_id, x_true)
    est0 = mean_estimate(prior)
    trace.rows.append(dict(
        run_id=run_id, iteration=0, t=None, datum=None,
        loss=quadratic_loss(est0, x_true), ess=float(len(prior)), resampled=False, estimate=est0,
    ))
    for rec in result.records:
        trace.rows.append(dict(
            run_id=run_id, iteration=rec.iteration, t=rec.t, datum=rec.datum,
            loss=rec.loss, ess=rec.ess, resampled=rec.resampled, estimate=rec.estimate,
        ))
    return trace


def _run_replicate_args(args):
    return run_replicate(*args)


def run_replicates(config: RunConfig, workers: int = 1) -> list[RunTrace]:
    """All replicates of ``config``, ordered by run id whatever ``workers`` is."""
    jobs = [(config, r) for r in range(config.runs)]
    if workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_run_replicate_args, jobs))
    else:
        traces = [run_replicate(*job) for job in jobs]
    return sorted(traces, key=lambda tr: tr.run_id)


def loss_matrix(traces: Sequence[RunTrace], n_exp: int) -> np.ndarray:
    """Losses of shape ``(runs, n_exp + 1)``.

    A run that stopped early on a collapsed posterior keeps its last loss for
    the remaining iterations.
    """
    out = np.empty((len(traces), n_exp + 1))
    for i, tr in enumerate(traces):
        l = tr.losses
        out[i, : l.size] = l
        out[i, l.size :] = l[-1]
    return out


def summarize(traces: Sequence[RunTrace], n_exp: int) -> list[dict]:
    """Median and interquartile range of the loss at every iteration."""
    L = loss_matrix(traces, n_exp)
    q25, med, q75 = np.percentile(L, [25, 50, 75], axis=0)
    return [
        dict(iteration=i, median_loss=float(med[i]), q25_loss=float(q25[i]),
             q75_loss=float(q75[i]), runs=len(traces))
        for i in range(n_exp + 1)
    ]


def fit_decay(median_losses) -> tuple[float, float]:
    """Fit ``loss ~ exp(-gamma * iteration)`` by least squares on ``log(loss)``.

    The iteration index is the position in ``median_losses``. Non-positive
    entries are dropped with a warning. Returns ``(gamma, r_squared)``;
    ``r_squared`` is 1 for an exactly flat sequence.
    """
    y = np.asarray(median_losses, dtype=float)
    it = np.arange(y.size)
    keep = np.isfinite(y) & (y > 0)
    if not keep.all():
        logger.warning("fit_decay: dropping %d non-positive losses", int((~keep).sum()))
    if keep.sum() < 10:
        raise ValueError(f"need at least 10 positive losses to fit, got {int(keep.sum())}")
    x, ly = it[keep], np.log(y[keep])
    slope, intercept = np.polyfit(x, ly, 1)
    resid = ly - (slope * x + intercept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 if ss_tot == 0 else 1.0 - np.sum(resid**2) / ss_tot
    return float(-slope), float(r2)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def record_columns(dim: int) -> list[str]:
    return ["run_id", "iteration", "t", "datum", "loss", "ess", "resampled"] + [
        f"estimate_{j}" for j in range(dim)
    ]


def write_records_csv(traces: Sequence[RunTrace], dim: int, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(record_columns(dim))
        for tr in traces:
            for r in tr.rows:
                w.writerow(
                    [_fmt(r[c]) for c in ("run_id", "iteration", "t", "datum", "loss", "ess", "resampled")]
                    + [_fmt(v) for v in r["estimate"]]
                )


SUMMARY_COLUMNS = ["iteration", "median_loss", "q25_loss", "q75_loss", "runs"]


def write_summary_csv(summary: Sequence[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in summary:
            w.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])


@dataclass
class ExperimentResult:
    config: RunConfig
    traces: list
    summary: list
    gamma: float | None
    r_squared: float | None

    @property
    def median_losses(self) -> np.ndarray:
        return np.array([r["median_loss"] for r in self.summary])

    def summary_json(self) -> dict:
        med = self.median_losses
        return {
            "config": self.config.to_dict(),
            "dim": self.config.coupling_graph().dim,
            "runs": len(self.traces),
            "initial_median_loss": float(med[0]),
            "final_median_loss": float(med[-1]),
            "gamma": self.gamma,
            "r_squared": self.r_squared,
            "gamma_note": "least-squares decay rate of the median loss; an empirical estimate",
        }


def run_qhl_experiment(config: RunConfig, out_dir=None, workers: int = 1) -> ExperimentResult:
    """Run all replicates, summarize, and optionally write ``records.csv``,
    ``summary.csv`` and ``summary.json`` under ``out_dir``."""
    traces = run_replicates(config, workers)
    summary = summarize(traces, config.n_exp)
    med = [r["median_loss"] for r in summary]
    try:
        gamma, r2 = fit_decay(med)
    except ValueError:
        gamma, r2 = None, None
    result = ExperimentResult(config, traces, summary, gamma, r2)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_records_csv(traces, config.coupling_graph().dim, out / "records.csv")
        write_summary_csv(summary, out / "summary.csv")
        with open(out / "summary.json", "w") as fh:
            json.dump(result.summary_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return result


@dataclass
class SweepRow:
    n_qubits: int
    graph: str
    dim: int
    gamma: float | None
    r_squared: float | None
    runs: int

    @property
    def reliable(self) -> bool:
        return self.r_squared is not None and self.r_squared >= RELIABLE_R2


@dataclass
class SweepResult:
    rows: list

    def ratio_tests(self) -> list[dict]:
        """Compare ``gamma(a)/gamma(b)`` with ``dim(b)/dim(a)`` for consecutive rows."""
        out = []
        for a, b in zip(self.rows, self.rows[1:]):
            ok = a.reliable and b.reliable and a.gamma and b.gamma
            gr = a.gamma / b.gamma if ok else None
            dr = b.dim / a.dim
            out.append(dict(
                n_a=a.n_qubits, n_b=b.n_qubits, gamma_ratio=gr, dim_ratio=dr,
                fold_error=(max(gr / dr, dr / gr) if gr and gr > 0 else None),
            ))
        return out

    def write_csv(self, path) -> None:
        cols = ["n_qubits", "graph", "dim", "gamma", "r_squared", "reliable", "runs"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in self.rows:
                gamma = r.gamma if r.reliable else None
                w.writerow([r.n_qubits, r.graph, r.dim, _fmt(gamma), _fmt(r.r_squared), int(r.reliable), r.runs])


def sweep_gamma(base: RunConfig, qubits: Sequence[int], workers: int = 1) -> SweepResult:
    """Fit the loss decay rate for each qubit count, everything else from ``base``.

    ``gamma`` is only trusted (``reliable``) when the fit has R^2 >= 0.7.
    """
    qubits = list(dict.fromkeys(int(q) for q in qubits))
    if len(qubits) < 2:
        raise ConfigError("a sweep needs at least two distinct qubit counts")
    if not isinstance(base.x_true, str):
        raise ConfigError("sweeps need x_true = 'random-in-prior'")
    rows = []
    for n in qubits:
        cfg = base.replace(n_qubits=n)
        res = run_qhl_experiment(cfg, workers=workers)
        rows.append(SweepRow(n, str(cfg.coupling_graph().kind), cfg.coupling_graph().dim,
                             res.gamma, res.r_squared, cfg.runs))
    return SweepResult(rows)


def experiments_to_threshold(median_losses, target: float) -> int | None:
    """First iteration whose median loss is at or below ``target``; None if never."""
    hits = np.flatnonzero(np.asarray(median_losses) <= target)
    return int(hits[0]) if hits.size else None


def experiment_count_scaling(base: RunConfig, target_loss: float, qubits: Sequence[int],
                             workers: int = 1) -> list[dict]:
    rows = []
    for n in qubits:
        cfg = base.replace(n_qubits=int(n))
        med = run_qhl_experiment(cfg, workers=workers).median_losses
        hit = experiments_to_threshold(med, target_loss)
        rows.append(dict(n_qubits=int(n), dim=cfg.coupling_graph().dim, target=target_loss,
                         experiments=hit, censored=hit is None, initial_loss=float(med[0])))
    return rows


def default_dice_variance(D: int) -> float:
    """Variance ``1/D^2``: the 10,000-sided die with variance 1e-8 follows this rule.

    Capped at half the largest feasible variance ``(1/D)(1 - 1/D)``, which
    only binds for ``D <= 3``.
    """
    return min(1.0 / D**2, 0.5 * (1.0 / D) * (1.0 - 1.0 / D))


def dice_accuracy(D: int, variance: float, samples: int, trials: int, rng: np.random.Generator,
                  alternative: Callable | None = None) -> float:
    """Success rate of the Bayes-optimal fair-vs-random-die test on ``samples`` rolls.

    Each trial flips a fair coin for the truth. A random die is redrawn every
    trial, from ``alternative(D, rng)`` when given, else from the Dirichlet
    prior with the requested variance. The test always assumes the Dirichlet
    prior.
    """
    alpha = distance.dirichlet_concentration(D, variance)
    is_dice = rng.random(trials) < 0.5
    pvals = np.full((trials, D), 1.0 / D)
    for i in np.flatnonzero(is_dice):
        if alternative is None:
            pvals[i] = distance.random_dice_distribution(D, variance, rng).probs
        else:
            pvals[i] = alternative(D, rng).probs
    counts = rng.multinomial(samples, pvals)
    says_dice = distance.dice_log_likelihood_ratio(counts, alpha) > 0
    return float(np.mean(says_dice == is_dice))


def dice_experiment(D_values: Sequence[int], variance=None, budget: int = 10**4, trials: int = 400,
                    seed: int = 0, target: float = 2 / 3, alternative: Callable | None = None) -> list[dict]:
    """Smallest number of rolls reaching ``target`` accuracy, per die size.

    ``variance`` is a number, a callable ``D -> variance``, or None for
    ``1/D^2``. Accuracy at each trial count is estimated with a random stream
    fixed by ``(seed, D, samples)``, and the search is a bisection over
    ``[1, budget]``. Entries whose accuracy at ``budget`` misses the target
    are censored.
    """
    rows = []
    for D in D_values:
        D = int(D)
        v = default_dice_variance(D) if variance is None else (variance(D) if callable(variance) else float(variance))

        def acc(B):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(D, B)))
            return dice_accuracy(D, v, B, trials, rng, alternative)

        top = acc(budget)
        if top < target:
            rows.append(dict(D=D, variance=v, samples=None, accuracy=top, censored=True))
            continue
        lo, hi, best = 1, budget, top
        while lo < hi:
            mid = (lo + hi) // 2
            a = acc(mid)
            if a >= target:
                hi, best = mid, a
            else:
                lo = mid + 1
        rows.append(dict(D=D, variance=v, samples=hi, accuracy=best, censored=False))
    return rows


def write_rows_csv(rows: Sequence[dict], columns: Sequence[str], path_or_file) -> None:
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) if not isinstance(r[c], str) else r[c] for c in columns])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
