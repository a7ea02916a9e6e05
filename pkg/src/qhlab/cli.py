"""Command line entry point.

Exit codes: 0 success, 1 configuration or usage error, 2 runtime error,
3 a ``--check`` threshold was not met.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import boson, distance, harness
from .harness import ConfigError, RunConfig

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_THRESHOLD = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _out(path):
    return open(path, "w", newline="") if path and path != "-" else sys.stdout


def cmd_qhl_run(args) -> int:
    cfg = RunConfig.from_json(args.config)
    res = harness.run_qhl_experiment(cfg, args.out, workers=args.workers)
    med = res.median_losses
    print(f"runs={len(res.traces)} dim={cfg.coupling_graph().dim} "
          f"initial_median_loss={med[0]:.6g} final_median_loss={med[-1]:.6g} "
          f"gamma={res.gamma} r_squared={res.r_squared}")
    if args.check:
        ok = (res.gamma is not None and res.gamma > 0 and res.r_squared >= 0.9
              and med[-1] <= 1e-3 * med[0])
        if not ok:
            print("check failed: need gamma > 0, R^2 >= 0.9, final <= 1e-3 * initial", file=sys.stderr)
            return EXIT_THRESHOLD
    return EXIT_OK


def cmd_qhl_sweep(args) -> int:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    if args.graph:
        cfg = cfg.replace(graph=args.graph)
    sweep = harness.sweep_gamma(cfg, args.qubits, workers=args.workers)
    if args.out:
        sweep.write_csv(args.out)
    for r in sweep.rows:
        flag = "" if r.reliable else "  (unreliable fit)"
        print(f"n={r.n_qubits} dim={r.dim} gamma={r.gamma} r_squared={r.r_squared}{flag}")
    failed = False
    for t in sweep.ratio_tests():
        print(f"gamma({t['n_a']})/gamma({t['n_b']}) = {t['gamma_ratio']} vs dim ratio {t['dim_ratio']:.4g}")
        failed |= t["fold_error"] is None or t["fold_error"] > 2.0
    if args.check and failed:
        print("check failed: gamma ratio not within a factor of 2 of the dim ratio", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


def _interferometer(args) -> boson.Interferometer:
    if args.matrix:
        return boson.Interferometer(boson.read_matrix_json(args.matrix))
    if args.modes is None or args.photons is None:
        raise ConfigError("give --matrix or both --modes and --photons")
    rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(0,)))
    return boson.haar_random_interferometer(args.modes, args.photons, rng)


def cmd_boson_dist(args) -> int:
    dist = boson.full_distribution(_interferometer(args))
    fh = _out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["outcome", "probability"])
        for S, p in zip(dist.labels, dist.probs):
            w.writerow([boson.format_outcome(S), repr(float(p))])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_boson_sample(args) -> int:
    A = _interferometer(args)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(1,)))
    samples = boson.sample_outcome(A, args.shots, rng)
    fh = _out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["shot", "outcome"])
        for i, S in enumerate(samples):
            w.writerow([i, boson.format_outcome(S)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_perm(args) -> int:
    M = boson.read_matrix_json(args.matrix)
    f = boson.permanent_ryser if args.method == "ryser" else boson.permanent_minors
    try:
        val = f(M)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(f"{val.real!r} {val.imag!r}")
    return EXIT_OK


def cmd_dist_compare(args) -> int:
    try:
        p = distance.read_distribution_csv(args.p)
        q = distance.read_distribution_csv(args.q)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    pp, qq, _ = distance.align(p, q)
    print(f"total_variation={distance.total_variation(pp, qq)!r}")
    print(f"p_dist={distance.distinguish_probability(pp, qq)!r}")
    return EXIT_OK


def cmd_dist_dice(args) -> int:
    rows = harness.dice_experiment(
        args.sides, variance=args.variance, budget=args.samples, trials=args.trials, seed=args.seed,
    )
    fh = _out(args.out)
    try:
        harness.write_rows_csv(rows, ["D", "variance", "samples", "accuracy", "censored"], fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qhlab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    qhl = sub.add_parser("qhl", help="Hamiltonian learning experiments")
    qsub = qhl.add_subparsers(dest="action", required=True, parser_class=_Parser)
    run = qsub.add_parser("run", help="seeded replicate runs from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--check", action="store_true", help="exit 3 unless the loss decays as expected")
    run.set_defaults(func=cmd_qhl_run)
    sw = qsub.add_parser("sweep", help="fit the decay rate across qubit counts")
    sw.add_argument("--qubits", type=_int_list, required=True)
    sw.add_argument("--config")
    sw.add_argument("--graph", choices=["complete", "line"])
    sw.add_argument("--out", help="CSV table path")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--check", action="store_true", help="exit 3 unless gamma tracks 1/dim within 2x")
    sw.set_defaults(func=cmd_qhl_sweep)

    bos = sub.add_parser("boson", help="boson sampling distributions")
    bsub = bos.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in [("dist", cmd_boson_dist), ("sample", cmd_boson_sample)]:
        b = bsub.add_parser(name)
        b.add_argument("--modes", type=int)
        b.add_argument("--photons", type=int)
        b.add_argument("--matrix", help="JSON transition matrix instead of a Haar draw")
        b.add_argument("--seed", type=int, default=0)
        b.add_argument("--out", help="CSV path (default stdout)")
        if name == "sample":
            b.add_argument("--shots", type=int, required=True)
        b.set_defaults(func=func)

    perm = sub.add_parser("perm", help="permanent of a JSON matrix")
    perm.add_argument("--matrix", required=True)
    perm.add_argument("--method", choices=["ryser", "minors"], default="ryser")
    perm.set_defaults(func=cmd_perm)

    dist = sub.add_parser("dist", help="distribution distinguishing")
    dsub = dist.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cmp_ = dsub.add_parser("compare", help="variational distance of two label,probability CSVs")
    cmp_.add_argument("p")
    cmp_.add_argument("q")
    cmp_.set_defaults(func=cmd_dist_compare)
    dice = dsub.add_parser("dice", help="rolls needed to tell a random die from a fair one")
    dice.add_argument("--sides", type=_int_list, required=True)
    dice.add_argument("--variance", type=float, help="per-face variance (default 1/D^2)")
    dice.add_argument("--samples", type=int, default=10000, help="roll budget")
    dice.add_argument("--trials", type=int, default=400)
    dice.add_argument("--seed", type=int, default=0)
    dice.add_argument("--out", help="CSV path (default stdout)")
    dice.set_defaults(func=cmd_dist_dice)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
