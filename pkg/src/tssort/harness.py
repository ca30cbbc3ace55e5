"""Experiment drivers: node-scaling table, degree grid, sortability-binned
method benchmark.

Every random draw is keyed: trial ``k`` of an experiment gets its own
generator from ``SeedSequence([base_seed, *key])``, so results do not depend
on how work is split across processes.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import warnings
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import OrderStrategy, binarize, sortnregress_ts
from .dynotears import DynoConfig
from .dynotears import fit as dyno_fit
from .errors import BinUnderfilled, InvalidConfig, NoAdmissiblePairs, NotConverged, TsSortError, Unstable
from .graphs import GraphGenConfig, WeightedTsGraph, generate_er_tsgraph, summary_of
from .metrics import evaluate
from .sortability import marginal_variance, r2_scores, sortability_score
from .svar import Panel, SimConfig, is_stable, simulate, standardize

log = logging.getLogger(__name__)

DEFAULT_BINS = ((0.0, 0.2), (0.2, 0.4), (0.4, 0.6), (0.6, 0.8), (0.8, 1.0))
DEFAULT_DEGREES = (0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0)


def trial_rng(base_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(base_seed), *map(int, key)]))


def _pmap(fn, items, jobs=1):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def draw_stable(gen: GraphGenConfig, sim: SimConfig, rng, max_tries: int = 10_000):
    """Resample graphs until one is stationary, then simulate it.

    Returns ``(graph, panel, n_rejected)``.
    """
    for tries in range(max_tries):
        g = generate_er_tsgraph(gen, rng)
        if is_stable(g):
            return g, simulate(g, sim, rng), tries
    raise Unstable(f"no stationary graph in {max_tries} draws for {gen}")


def _score_or_nan(cri, g) -> float:
    try:
        return sortability_score(cri, g, "admissible").score
    except NoAdmissiblePairs:
        return float("nan")


SCOPES = ("contemp", "lagged", "overall")


def scoped_summaries(g: WeightedTsGraph) -> dict:
    lags = range(1, g.tau_max + 1)
    return {
        "contemp": summary_of(g, [0]),
        "lagged": summary_of(g, lags),
        "overall": summary_of(g),
    }


def measure_scopes(g: WeightedTsGraph, p: Panel) -> dict:
    """Var- and R^2-sortability on the contemporaneous, lagged and full
    summary graphs. Undefined scores (no admissible pairs) are NaN."""
    var = marginal_variance(p)
    r2 = r2_scores(p, g.tau_max)
    out = {}
    for scope, sg in scoped_summaries(g).items():
        out[(scope, "variance")] = _score_or_nan(var, sg)
        out[(scope, "r2")] = _score_or_nan(r2, sg)
    return out


# -- node scaling ----------------------------------------------------------


@dataclass(frozen=True)
class ScalingConfig:
    d_list: tuple[int, ...] = (10,)
    graphs_per_d: int = 100
    n: int = 500
    base_seed: int = 0
    d_c: float = 4.0
    d_l: float = 1.0
    delta: float = 1.1
    tau_max: int = 3
    burn_in: int = 1000
    max_tries: int = 100_000


def _scaling_trial(args):
    cfg, d, k = args
    rng = trial_rng(cfg.base_seed, d, k)
    gen = GraphGenConfig(d=d, d_c=cfg.d_c, d_l=cfg.d_l, tau_max=cfg.tau_max, delta=cfg.delta)
    g, p, rejected = draw_stable(gen, SimConfig(n=cfg.n, burn_in=cfg.burn_in), rng, cfg.max_tries)
    return measure_scopes(g, p), rejected


def _summarise(values):
    v = np.array(values, dtype=float)
    v = v[~np.isnan(v)]
    if v.size == 0:
        return float("nan"), float("nan"), 0
    return float(v.mean()), float(v.std()), int(v.size)


def node_scaling_study(cfg: ScalingConfig, jobs: int = 1) -> list[dict]:
    """One row per (d, scope, criterion) with mean/std over graphs.

    ``count`` is the number of graphs whose score was defined, ``rejected``
    the number of non-stationary draws that were resampled.
    """
    rows = []
    for d in cfg.d_list:
        if d < 2:
            raise InvalidConfig(f"d must be >= 2, got {d}")
        results = _pmap(_scaling_trial, [(cfg, d, k) for k in range(cfg.graphs_per_d)], jobs)
        rejected = sum(r for _, r in results)
        for scope in SCOPES:
            for crit in ("variance", "r2"):
                mean, std, count = _summarise([m[(scope, crit)] for m, _ in results])
                rows.append(
                    dict(d=d, scope=scope, criterion=crit, mean=mean, std=std, count=count, rejected=rejected)
                )
    return rows


# -- degree grid -----------------------------------------------------------


@dataclass(frozen=True)
class GridConfig:
    d: int = 10
    degrees: tuple[float, ...] = DEFAULT_DEGREES
    trials: int = 20
    n: int = 500
    base_seed: int = 0
    delta: float = 1.1
    tau_max: int = 3
    burn_in: int = 1000
    max_tries: int = 2000

    def __post_init__(self):
        if not self.degrees or any(x < 0 for x in self.degrees):
            raise InvalidConfig("degrees must be a non-empty list of non-negative values")


def _grid_trial(args):
    cfg, ic, il, k = args
    dc, dl = cfg.degrees[ic], cfg.degrees[il]
    try:
        gen = GraphGenConfig(d=cfg.d, d_c=dc, d_l=dl, tau_max=cfg.tau_max, delta=cfg.delta)
    except InvalidConfig:
        return None
    rng = trial_rng(cfg.base_seed, ic, il, k)
    try:
        g, p, _ = draw_stable(gen, SimConfig(n=cfg.n, burn_in=cfg.burn_in), rng, cfg.max_tries)
    except Unstable:
        return None
    m = measure_scopes(g, p)
    return m[("overall", "variance")], m[("overall", "r2")]


def degree_grid_study(cfg: GridConfig, jobs: int = 1) -> dict:
    """Mean overall sortability per (d_c, d_l) cell.

    Returns ``{"variance": M, "r2": M, "count": C}`` with rows indexed by
    d_c and columns by d_l; cells without a single defined score are NaN.
    """
    nd = len(cfg.degrees)
    tasks = [(cfg, ic, il, k) for ic in range(nd) for il in range(nd) for k in range(cfg.trials)]
    results = _pmap(_grid_trial, tasks, jobs)
    acc = {"variance": [[[] for _ in range(nd)] for _ in range(nd)], "r2": [[[] for _ in range(nd)] for _ in range(nd)]}
    for (_, ic, il, _), res in zip(tasks, results):
        if res is None:
            continue
        for crit, val in zip(("variance", "r2"), res):
            if not np.isnan(val):
                acc[crit][ic][il].append(val)
    out = {}
    for crit in ("variance", "r2"):
        out[crit] = np.array([[np.mean(c) if c else np.nan for c in row] for row in acc[crit]])
    out["count"] = np.array([[len(c) for c in row] for row in acc["variance"]])
    return out


def grid_to_csv(cfg: GridConfig, grid: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["criterion", "d_c", "d_l", "mean", "count"])
    for crit in ("variance", "r2"):
        for ic, dc in enumerate(cfg.degrees):
            for il, dl in enumerate(cfg.degrees):
                val = grid[crit][ic, il]
                w.writerow([crit, repr(dc), repr(dl), "" if np.isnan(val) else repr(float(val)), int(grid["count"][ic, il])])
    return buf.getvalue()


# -- binned benchmark ------------------------------------------------------


@dataclass
class BenchDataset:
    graph: WeightedTsGraph
    panel: Panel

    @property
    def tau_max(self) -> int:
        return self.graph.tau_max


METHODS = {}


def register_method(name):
    """Add ``fn(dataset, cfg, rng) -> bool stack`` to the method registry."""

    def deco(fn):
        METHODS[name] = fn
        return fn

    return deco


def _sortnregress(kind):
    def run(ds, cfg, rng):
        seed = int(rng.integers(2**63))
        est = sortnregress_ts(ds.panel, ds.tau_max, OrderStrategy(kind, seed))
        return binarize(est, cfg.threshold)

    return run


register_method("varsortnregress")(_sortnregress("variance"))
register_method("r2sortnregress")(_sortnregress("r2"))
register_method("randomregress")(_sortnregress("random"))
register_method("varsortnregress_rev")(_sortnregress("variance_reversed"))


@register_method("dynotears")
def _dynotears(ds, cfg, rng):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotConverged)
        res = dyno_fit(ds.panel, ds.tau_max, cfg.dyno)
    return binarize(res.estimate, 0.0)


@register_method("dynotears_std")
def _dynotears_std(ds, cfg, rng):
    return _dynotears(BenchDataset(ds.graph, standardize(ds.panel)), cfg, rng)


@register_method("oracle")
def _oracle(ds, cfg, rng):
    return ds.graph.pattern()


@dataclass(frozen=True)
class BinnedBenchConfig:
    d: int = 10
    bins: tuple[tuple[float, float], ...] = DEFAULT_BINS
    m: int = 30
    criterion: str = "variance"
    methods: tuple[str, ...] = ("dynotears", "dynotears_std", "varsortnregress", "r2sortnregress", "randomregress")
    n: int = 500
    max_attempts: int | None = None
    base_seed: int = 0
    d_c: float = 4.0
    d_l: float = 1.0
    delta: float = 1.1
    tau_max: int = 3
    burn_in: int = 1000
    threshold: float = 0.1
    dyno: DynoConfig = field(default_factory=DynoConfig)

    def __post_init__(self):
        if self.m < 1:
            raise InvalidConfig("m must be >= 1")
        if not self.methods:
            raise InvalidConfig("methods must be non-empty")
        unknown = [mth for mth in self.methods if mth not in METHODS]
        if unknown:
            raise InvalidConfig(f"unknown methods {unknown}; known: {sorted(METHODS)}")
        if self.criterion not in ("variance", "r2"):
            raise InvalidConfig(f"criterion must be 'variance' or 'r2', got {self.criterion!r}")
        edges = sorted(self.bins)
        if edges[0][0] != 0.0 or edges[-1][1] != 1.0:
            raise InvalidConfig("bins must cover [0, 1]")
        for (lo, hi), (lo2, _) in zip(edges, edges[1:] + [(1.0, None)]):
            if not lo < hi or hi != lo2:
                raise InvalidConfig(f"bins must be contiguous and non-overlapping: {self.bins}")

    @property
    def attempt_cap(self) -> int:
        per_bin = self.max_attempts if self.max_attempts is not None else 200 * self.m
        return per_bin * len(self.bins)

    def gen_config(self) -> GraphGenConfig:
        return GraphGenConfig(d=self.d, d_c=self.d_c, d_l=self.d_l, tau_max=self.tau_max, delta=self.delta)


def bin_index(bins, score: float) -> int:
    for b, (lo, hi) in enumerate(bins):
        if lo <= score < hi or (hi == 1.0 and score == 1.0):
            return b
    raise ValueError(f"score {score} outside bins")


def _bench_dataset(cfg: BinnedBenchConfig, k: int):
    """Draw ``k`` of the benchmark stream, or None if non-stationary."""
    rng = trial_rng(cfg.base_seed, k)
    g = generate_er_tsgraph(cfg.gen_config(), rng)
    if not is_stable(g):
        return None
    return BenchDataset(g, simulate(g, SimConfig(n=cfg.n, burn_in=cfg.burn_in), rng))


def _bench_measure(args):
    cfg, k = args
    try:
        ds = _bench_dataset(cfg, k)
    except TsSortError:
        return None
    if ds is None:
        return None
    if cfg.criterion == "variance":
        cri = marginal_variance(ds.panel)
    else:
        cri = r2_scores(ds.panel, ds.tau_max)
    try:
        return sortability_score(cri, summary_of(ds.graph), "admissible").score
    except NoAdmissiblePairs:
        return None


def _bench_run(args):
    cfg, k, method = args
    ds = _bench_dataset(cfg, k)
    rng = trial_rng(cfg.base_seed, k, zlib.crc32(method.encode()))
    est = METHODS[method](ds, cfg, rng)
    truth = ds.graph.pattern()
    return {mode: evaluate(est, truth, mode) for mode in ("overall", "contemp", "lagged")}


@dataclass
class BenchResult:
    config: BinnedBenchConfig
    accepted: list  # (k, bin, score)
    attempts: int
    rows: list = field(default_factory=list)

    def counts(self) -> list[int]:
        c = [0] * len(self.config.bins)
        for _, b, _ in self.accepted:
            c[b] += 1
        return c

    def mean_f1(self, method: str, b: int, mode: str = "overall") -> float:
        vals = [r["f1"] for r in self.rows if r["method"] == method and r["bin"] == b and r["mode"] == mode]
        return float(np.mean(vals)) if vals else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["bin", "bin_lo", "bin_hi", "trial", "sortability", "method", "mode", "tp", "fp", "fn", "f1"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
        return buf.getvalue()

    def summary(self) -> dict:
        cfg = self.config
        per_bin = []
        for b, (lo, hi) in enumerate(cfg.bins):
            entry = {"bin": b, "lo": lo, "hi": hi, "count": self.counts()[b], "mean_f1": {}}
            for mth in cfg.methods:
                entry["mean_f1"][mth] = {
                    mode: _json_float(self.mean_f1(mth, b, mode)) for mode in ("overall", "contemp", "lagged")
                }
            per_bin.append(entry)
        conf = asdict(cfg)
        return {
            "config": conf,
            "attempts": self.attempts,
            "attempt_cap": cfg.attempt_cap,
            "underfilled": [b for b, c in enumerate(self.counts()) if c < cfg.m],
            "bins": per_bin,
        }


def _json_float(x):
    return None if np.isnan(x) else x


def binned_benchmark(cfg: BinnedBenchConfig, jobs: int = 1) -> BenchResult:
    """Rejection-sample datasets into sortability bins, then score methods.

    Draws are scanned in index order; a draw is accepted if its bin still
    has room. Scanning stops when every bin holds ``m`` draws or the attempt
    cap is reached.
    """
    nb = len(cfg.bins)
    counts = [0] * nb
    accepted = []
    k = 0
    chunk = max(64, 16 * jobs)
    cap = cfg.attempt_cap
    while k < cap and min(counts) < cfg.m:
        ks = range(k, min(k + chunk, cap))
        scores = _pmap(_bench_measure, [(cfg, kk) for kk in ks], jobs)
        for kk, s in zip(ks, scores):
            k = kk + 1
            if s is None:
                continue
            b = bin_index(cfg.bins, s)
            if counts[b] < cfg.m:
                counts[b] += 1
                accepted.append((kk, b, s))
                if min(counts) >= cfg.m:
                    break
    for b, c in enumerate(counts):
        if c < cfg.m:
            warnings.warn(f"bin {cfg.bins[b]} holds {c}/{cfg.m} datasets after {k} attempts", BinUnderfilled)

    accepted.sort()
    tasks = [(cfg, kk, mth) for kk, _, _ in accepted for mth in cfg.methods]
    evals = _pmap(_bench_run, tasks, jobs)
    info = {kk: (b, s) for kk, b, s in accepted}
    rows = []
    for (_, kk, mth), ev in zip(tasks, evals):
        b, s = info[kk]
        lo, hi = cfg.bins[b]
        for mode, rep in ev.items():
            rows.append(
                dict(bin=b, bin_lo=lo, bin_hi=hi, trial=kk, sortability=s, method=mth, mode=mode,
                     tp=rep.tp, fp=rep.fp, fn=rep.fn, f1=rep.f1)
            )
    return BenchResult(cfg, accepted, k, rows)


def write_bench(result: BenchResult, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(result.to_csv(), encoding="utf-8")
    (out / "summary.json").write_text(json.dumps(result.summary(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
