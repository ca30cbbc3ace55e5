"""``tssort`` command line.

Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence
under ``--strict``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

from . import datasets, harness
from .baselines import OrderStrategy, binarize, sortnregress_ts
from .dynotears import DynoConfig
from .dynotears import fit as dyno_fit
from .errors import NotConverged, TsSortError
from .graphs import GraphGenConfig, summary_of
from .metrics import EVAL_MODES, evaluate
from .sortability import MODES, criterion, sortability_score
from .svar import SimConfig, standardize

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TSSORT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"TSSORT_SEED must be an integer, got {env!r}") from None


def _announce(command, **conf):
    print(json.dumps({"command": command, **conf}, sort_keys=True, default=str), file=sys.stderr)


def _jobs(args) -> int:
    return args.jobs if args.jobs is not None else (os.cpu_count() or 1)


def cmd_generate(args):
    seed = _seed(args)
    gen = GraphGenConfig(d=args.d, d_c=args.dc, d_l=args.dl, tau_max=args.tau_max, delta=args.delta)
    sim = SimConfig(n=args.n, burn_in=args.burn_in)
    _announce("generate", seed=seed, graph=asdict(gen), sim=asdict(sim))
    rng = harness.trial_rng(seed, 0)
    g, panel, rejected = harness.draw_stable(gen, sim, rng, args.max_tries)
    if args.standardize:
        panel = standardize(panel)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    datasets.write_panel_csv(panel, out / "panel.csv")
    datasets.write_ts_graph_json(g, out / "truth.json")
    datasets.write_summary_csv(summary_of(g), out / "summary.csv")
    print(json.dumps({"out": str(out), "rejected_draws": rejected, "T": panel.T, "d": panel.d}))
    return EXIT_OK


def cmd_sortability(args):
    _announce("sortability", data=args.data, truth=args.truth, criterion=args.criterion, mode=args.mode, tau_max=args.tau_max)
    panel = datasets.load_panel_csv(args.data)
    ts, summary = datasets.load_truth(args.truth)
    tau = args.tau_max if args.tau_max is not None else (ts.tau_max if ts is not None else 0)
    if args.lags is not None and ts is not None:
        summary = summary_of(ts, args.lags)
    cri = criterion(panel, "variance" if args.criterion == "var" else args.criterion, tau)
    rep = sortability_score(cri, summary, args.mode)
    print(json.dumps(rep.to_dict()))
    return EXIT_OK


def cmd_fit(args):
    seed = _seed(args)
    _announce("fit", data=args.data, method=args.method, tau_max=args.tau_max, seed=seed,
              lambda1=args.lambda1, lambda2=args.lambda2, threshold=args.threshold)
    panel = datasets.load_panel_csv(args.data)
    if args.standardize:
        panel = standardize(panel)
    meta = None
    status = EXIT_OK
    if args.method == "dynotears":
        cfg = DynoConfig(lambda1=args.lambda1, lambda2=args.lambda2, threshold=args.threshold, max_outer=args.max_outer)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NotConverged)
            res = dyno_fit(panel, args.tau_max, cfg)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        est = res.estimate
        meta = res.meta()
        if not res.converged and args.strict:
            status = EXIT_NOT_CONVERGED
    else:
        kind = {"varsortnregress": "variance", "r2sortnregress": "r2", "randomregress": "random",
                "varsortnregress_rev": "variance_reversed"}[args.method]
        est = sortnregress_ts(panel, args.tau_max, OrderStrategy(kind, seed))
    text = datasets.graph_to_json(est.stack(), method=args.method, meta=meta)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


def cmd_evaluate(args):
    _announce("evaluate", est=args.est, truth=args.truth, mode=args.mode, threshold=args.threshold)
    est_g = datasets.load_ts_graph_json(args.est)
    est = binarize(est_g, args.threshold)
    ts, summary = datasets.load_truth(args.truth)
    truth = ts.pattern() if ts is not None else summary.adj
    modes = EVAL_MODES if args.mode == "all" else (args.mode,)
    reports = {m: evaluate(est, truth, m).to_dict() for m in modes}
    print(json.dumps(reports if args.mode == "all" else reports[args.mode]))
    return EXIT_OK


def _bins(spec: str):
    edges = [float(x) for x in spec.split(",")]
    return tuple(zip(edges[:-1], edges[1:]))


def cmd_bench_binned(args):
    seed = _seed(args)
    cfg = harness.BinnedBenchConfig(
        d=args.d, bins=_bins(args.bins), m=args.m, criterion="variance" if args.criterion == "var" else args.criterion,
        methods=tuple(args.methods.split(",")), n=args.n, max_attempts=args.max_attempts, base_seed=seed,
        d_c=args.dc, d_l=args.dl, delta=args.delta, tau_max=args.tau_max, threshold=args.threshold,
        dyno=DynoConfig(lambda1=args.lambda1, lambda2=args.lambda2, threshold=args.threshold),
    )
    _announce("bench-binned", seed=seed, jobs=_jobs(args), config=asdict(cfg))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = harness.binned_benchmark(cfg, jobs=_jobs(args))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    harness.write_bench(res, args.out)
    print(json.dumps({"out": args.out, "counts": res.counts(), "attempts": res.attempts}))
    return EXIT_OK


def cmd_bench_grid(args):
    seed = _seed(args)
    cfg = harness.GridConfig(d=args.d, degrees=tuple(float(x) for x in args.degrees.split(",")), trials=args.trials,
                             n=args.n, base_seed=seed, delta=args.delta, tau_max=args.tau_max)
    _announce("bench-grid", seed=seed, jobs=_jobs(args), config=asdict(cfg))
    grid = harness.degree_grid_study(cfg, jobs=_jobs(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "grid.csv").write_text(harness.grid_to_csv(cfg, grid), encoding="utf-8")
    print(json.dumps({"out": str(out)}))
    return EXIT_OK


def cmd_bench_scaling(args):
    seed = _seed(args)
    cfg = harness.ScalingConfig(d_list=tuple(int(x) for x in args.d_list.split(",")), graphs_per_d=args.graphs,
                                n=args.n, base_seed=seed, d_c=args.dc, d_l=args.dl, delta=args.delta,
                                tau_max=args.tau_max, max_tries=args.max_tries)
    _announce("bench-scaling", seed=seed, jobs=_jobs(args), config=asdict(cfg))
    rows = harness.node_scaling_study(cfg, jobs=_jobs(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cols = ["d", "scope", "criterion", "mean", "std", "count", "rejected"]
    lines = [",".join(cols)] + [",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols) for r in rows]
    (out / "scaling.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(json.dumps({"out": str(out)}))
    return EXIT_OK


def _gen_flags(p, dc=4.0, dl=1.0):
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--dc", type=float, default=dc, help="expected contemporaneous degree")
    p.add_argument("--dl", type=float, default=dl, help="expected per-lag degree")
    p.add_argument("--tau-max", type=int, default=3)
    p.add_argument("--delta", type=float, default=1.1, help="lag weight decay, > 1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tssort", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="simulate one stationary SVAR dataset")
    _gen_flags(p)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-tries", type=int, default=100_000)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sortability", help="score a panel against a ground truth")
    p.add_argument("--data", required=True)
    p.add_argument("--truth", required=True, help="ts-graph JSON or summary CSV")
    p.add_argument("--criterion", choices=("var", "variance", "r2"), default="var")
    p.add_argument("--mode", choices=MODES, default="admissible")
    p.add_argument("--tau-max", type=int, help="lag depth for R^2 (default: truth's tau_max)")
    p.add_argument("--lags", type=int, nargs="+", help="restrict the truth to these lag slices")
    p.set_defaults(func=cmd_sortability)

    p = sub.add_parser("fit", help="estimate a ts-graph from a panel")
    p.add_argument("--data", required=True)
    p.add_argument("--method", default="dynotears",
                   choices=("dynotears", "varsortnregress", "r2sortnregress", "randomregress", "varsortnregress_rev"))
    p.add_argument("--tau-max", type=int, default=3)
    p.add_argument("--lambda1", type=float, default=0.05)
    p.add_argument("--lambda2", type=float, default=0.05)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--max-outer", type=int, default=100)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--strict", action="store_true", help="exit 3 if acyclicity was not reached")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evaluate", help="F1 of an estimate against a truth")
    p.add_argument("--est", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--mode", choices=EVAL_MODES + ("all",), default="overall")
    p.add_argument("--threshold", type=float, default=0.1)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench-binned", help="method F1 across sortability bins")
    _gen_flags(p)
    p.add_argument("--m", type=int, default=30)
    p.add_argument("--bins", default="0,0.2,0.4,0.6,0.8,1")
    p.add_argument("--criterion", choices=("var", "variance", "r2"), default="var")
    p.add_argument("--methods", default="dynotears,dynotears_std,varsortnregress,r2sortnregress,randomregress")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--max-attempts", type=int)
    p.add_argument("--lambda1", type=float, default=0.05)
    p.add_argument("--lambda2", type=float, default=0.05)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench_binned)

    p = sub.add_parser("bench-grid", help="sortability over a (d_c, d_l) grid")
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--degrees", default=",".join(str(x) for x in harness.DEFAULT_DEGREES))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--tau-max", type=int, default=3)
    p.add_argument("--delta", type=float, default=1.1)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench_grid)

    p = sub.add_parser("bench-scaling", help="sortability statistics versus node count")
    _gen_flags(p)
    p.add_argument("--d-list", default="10")
    p.add_argument("--graphs", type=int, default=500)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--max-tries", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench_scaling)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", None) is not None and args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TsSortError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
