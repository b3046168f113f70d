"""
Monte-Carlo harness for complete concentration of measure.

A functional Y = int g(x(t)) dt is discretized on the grid t_k = k/n, so a
path becomes a point (x_1, .., x_n).  For every n in the grid the harness
draws points uniformly from the discretized domain, evaluates Y, and reports
the mean, the variance and the standard error.  The variance should fall to
zero as n grows; the fitted log-log slope summarizes how fast.

Reproducibility: the samples for a given n are split into fixed-size chunks
and chunk c draws from ``PCG64(SeedSequence(seed, spawn_key=(n, c)))``.  The
output depends on (seed, chunk_size) and on nothing else, in particular not
on the number of worker threads.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .ball_geometry import FIRST_QUADRANT, FULL, PBall, sample_uniform_pball
from .distributions import PNormOrder
from .meanvalue import cube_mean, cube_path_mean, exchange, mean_general

CUBE = "cube"
CUBE_DERIVATIVE = "cube-derivative"
BALL_REGIONS = (FULL, FIRST_QUADRANT)
CUBE_REGIONS = (CUBE, CUBE_DERIVATIVE)

SLOPE_THRESHOLD = -0.8
CSV_HEADER = ("n", "mean", "variance", "stderr")

# spawn-key slot reserved for the tuple subsample of multi-index functionals
_TUPLE_STREAM = 2**32 - 1


def chunk_rng(seed: int, n: int, chunk: int) -> np.random.Generator:
    """The random stream owned by chunk ``chunk`` of the run at dimension ``n``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(n, chunk))))


@dataclass
class ExperimentConfig:
    g: list
    order: PNormOrder | None = None
    R: float = 1.0
    region: str = FULL
    a: float = 0.0
    b: float = 1.0
    h: object = None
    n_grid: tuple = (16, 64, 256, 1024)
    samples_per_n: int = 20000
    seed: int = 0
    chunk_size: int = 1000
    max_tuples: int = 10000
    apply_to: str = "derivative"
    workers: int = 1

    def __post_init__(self):
        gs = self.g if isinstance(self.g, (list, tuple)) else [self.g]
        if not gs:
            raise ValueError("need at least one integrand")
        self.g = [x if isinstance(x, dsl.FunctionalSpec) else dsl.functional(x) for x in gs]
        if isinstance(self.h, str):
            self.h = dsl.parse(self.h)
        if self.h is not None:
            ar = dsl.arity_check(self.h)
            if ar.m and ar.role != "h":
                raise ValueError("h must be written in y-variables")
            if ar.m != len(self.g):
                raise ValueError(f"h has arity {ar.m} but {len(self.g)} integrands were given")
        if self.order is not None:
            self.order = PNormOrder.coerce(self.order)
        if self.region in BALL_REGIONS:
            if self.order is None:
                raise ValueError("ball experiments need an order p")
            # validates parity against region
            PBall(1, self.order, self.R, self.region)
        elif self.region in CUBE_REGIONS:
            if not self.a < self.b:
                raise ValueError("cube bounds need a < b")
        else:
            raise ValueError(f"unknown region {self.region!r}")
        if self.apply_to not in ("derivative", "path"):
            raise ValueError("apply_to must be 'derivative' or 'path'")
        self.n_grid = tuple(int(n) for n in self.n_grid)
        if any(n < 1 for n in self.n_grid) or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing positive integers")
        if self.samples_per_n < 100:
            raise ValueError("samples_per_n must be at least 100")
        if self.chunk_size < 1 or self.max_tuples < 1 or self.workers < 1:
            raise ValueError("chunk_size, max_tuples and workers must be positive")

    def to_dict(self) -> dict:
        d = {
            "g": [str(s) for s in self.g],
            "intervals": [[list(iv) for iv in s.intervals] for s in self.g],
            "h": None if self.h is None else dsl.to_text(self.h),
            "region": self.region,
            "n_grid": list(self.n_grid),
            "samples_per_n": self.samples_per_n,
            "seed": self.seed,
            "chunk_size": self.chunk_size,
            "max_tuples": self.max_tuples,
        }
        if self.region in BALL_REGIONS:
            d.update(p=self.order.p, p0=self.order.p0, q0=self.order.q0, R=self.R)
        else:
            d.update(a=self.a, b=self.b)
            if self.region == CUBE_DERIVATIVE:
                d["apply_to"] = self.apply_to
        return d


@dataclass(frozen=True)
class Row:
    n: int
    mean: float
    variance: float
    stderr: float


@dataclass
class ExperimentReport:
    """Per-n statistics of the tracked quantity.

    The tracked quantity is h(Y_1, .., Y_k) when an outer function is given and
    Y_1 otherwise; ``components`` holds the rows of every Y_j.
    """

    config: ExperimentConfig
    rows: list
    analytic_mean: float | None
    components: list = field(default_factory=list)
    component_means: list = field(default_factory=list)
    slope: float | None = None
    degenerate: bool = False
    exchange: dict | None = None

    @property
    def slope_pass(self) -> bool:
        return self.degenerate or (self.slope is not None and self.slope <= SLOPE_THRESHOLD)

    def row(self, n: int) -> Row:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.n, repr(r.mean), repr(r.variance), repr(r.stderr)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "rows": [r.__dict__ for r in self.rows],
            "analytic_mean": self.analytic_mean,
            "components": [
                {"g": str(s), "analytic_mean": m, "rows": [r.__dict__ for r in rows]}
                for s, m, rows in zip(self.config.g, self.component_means, self.components)
            ],
            "variance_slope": None if self.degenerate else self.slope,
            "degenerate": self.degenerate,
            "slope_threshold": SLOPE_THRESHOLD,
            "slope_pass": self.slope_pass,
            "exchange": self.exchange,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        last = self.rows[-1]
        slope = "-inf (zero variance)" if self.degenerate else f"{self.slope:.4f}"
        verdict = "PASS" if self.slope_pass else "FAIL"
        target = "n/a" if self.analytic_mean is None else f"{self.analytic_mean:.10g}"
        return (f"n={last.n} mean={last.mean:.10g} stderr={last.stderr:.3g} analytic={target} "
                f"variance_slope={slope} [{verdict} slope <= {SLOPE_THRESHOLD}]")


def _tuple_index(cfg, n, m):
    """Index arrays selecting the m-tuples of grid positions that enter the sum."""
    if n**m <= cfg.max_tuples:
        grids = np.meshgrid(*[np.arange(n)] * m, indexing="ij")
        return [gr.ravel() for gr in grids]
    rng = chunk_rng(cfg.seed, n, _TUPLE_STREAM)
    return list(rng.integers(0, n, size=(m, cfg.max_tuples)))


def _functional_values(spec, pts, n, tuples):
    """Discretized Y for each row of ``pts`` (shape (samples, n))."""
    t = np.arange(1, n + 1) / n
    if spec.m == 1:
        env = {"x1": pts, "t1": t[None, :]}
        a, b = spec.intervals[0]
        mask = ((t >= a) & (t <= b)).astype(float)[None, :]
        vals = np.broadcast_to(dsl.evaluate(spec.integrand, env), pts.shape)
        return np.sum(vals * mask, axis=1) / n
    idx = tuples[spec.m]
    env = {}
    mask = np.ones(idx[0].shape)
    for j in range(spec.m):
        env[f"x{j + 1}"] = pts[:, idx[j]]
        tj = t[idx[j]]
        env[f"t{j + 1}"] = tj[None, :]
        a, b = spec.intervals[j]
        mask = mask * ((tj >= a) & (tj <= b))
    vals = np.broadcast_to(dsl.evaluate(spec.integrand, env), (pts.shape[0], idx[0].size))
    return np.sum(vals * mask[None, :], axis=1) / idx[0].size


def _draw(cfg, n, rng, size):
    if cfg.region in BALL_REGIONS:
        radius = cfg.R * n ** (1.0 / cfg.order.p)
        return sample_uniform_pball(PBall(n, cfg.order, radius, cfg.region), rng, size)
    u = rng.uniform(cfg.a, cfg.b, size=(size, n))
    if cfg.region == CUBE_DERIVATIVE and cfg.apply_to == "path":
        # path value at the cell midpoints t = (k - 1/2)/n, with x(0) = 0
        return (np.cumsum(u, axis=1) - 0.5 * u) / n
    return u


def _chunk(cfg, n, c, size, tuples):
    rng = chunk_rng(cfg.seed, n, c)
    pts = _draw(cfg, n, rng, size)
    try:
        ys = [_functional_values(s, pts, n, tuples) for s in cfg.g]
    except dsl.EvalError as exc:
        raise dsl.EvalError(f"at n={n}, samples {c * cfg.chunk_size}..{c * cfg.chunk_size + size - 1}: {exc}") from exc
    return np.stack(ys)


def _stats(n, values):
    N = values.size
    mean = math.fsum(values) / N
    var = math.fsum((values - mean) ** 2) / (N - 1)
    return Row(n, mean, var, math.sqrt(var / N))


def sample_functionals(cfg: ExperimentConfig, n: int) -> np.ndarray:
    """Samples of (Y_1, .., Y_k) at dimension n, shape (k, samples_per_n)."""
    tuples = {s.m: _tuple_index(cfg, n, s.m) for s in cfg.g if s.m > 1}
    sizes = []
    left = cfg.samples_per_n
    while left > 0:
        sizes.append(min(cfg.chunk_size, left))
        left -= sizes[-1]
    jobs = [(c, size) for c, size in enumerate(sizes)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(lambda j: _chunk(cfg, n, j[0], j[1], tuples), jobs))
    else:
        parts = [_chunk(cfg, n, c, size, tuples) for c, size in jobs]
    return np.concatenate(parts, axis=1)


def _analytic(cfg):
    means = []
    for s in cfg.g:
        if cfg.region in BALL_REGIONS:
            means.append(mean_general(s, cfg.order, cfg.R, cfg.region).value)
        elif s.m == 1 and not s.uses_t:
            if cfg.region == CUBE_DERIVATIVE and cfg.apply_to == "path":
                val = cube_path_mean(s.integrand, cfg.a, cfg.b).value
            else:
                mode = "derivative" if cfg.region == CUBE_DERIVATIVE else "value"
                val = cube_mean(s.integrand, cfg.a, cfg.b, mode).value
            means.append(val * s.interval_measure())
        else:
            means.append(None)
    return means


def _run(cfg):
    components = [[] for _ in cfg.g]
    rows = []
    last_h = None
    for n in cfg.n_grid:
        ys = sample_functionals(cfg, n)
        for j in range(len(cfg.g)):
            components[j].append(_stats(n, ys[j]))
        if cfg.h is not None:
            env = {f"y{j + 1}": ys[j] for j in range(len(cfg.g))}
            hv = np.broadcast_to(dsl.evaluate(cfg.h, env), ys[0].shape)
            rows.append(_stats(n, np.asarray(hv, dtype=float)))
            last_h = rows[-1]
        else:
            rows.append(components[0][-1])

    comp_means = _analytic(cfg)
    if cfg.h is None:
        target = comp_means[0]
    elif all(m is not None for m in comp_means):
        target = exchange(cfg.h, comp_means)
    else:
        target = None
    report = ExperimentReport(cfg, rows, target, components, comp_means)
    report.slope, report.degenerate = _fit_slope(rows)
    if last_h is not None and target is not None:
        dev = abs(last_h.mean - target)
        report.exchange = {
            "n": last_h.n,
            "empirical": last_h.mean,
            "stderr": last_h.stderr,
            "predicted": target,
            "deviation": dev,
            "within_4_stderr": bool(dev <= 4 * last_h.stderr),
        }
    return report


def _fit_slope(rows):
    var = np.array([r.variance for r in rows])
    ns = np.array([r.n for r in rows], dtype=float)
    pos = var > 0
    if not np.any(pos):
        return -math.inf, True
    if pos.sum() < 3:
        return None, False
    slope = np.polyfit(np.log(ns[pos]), np.log(var[pos]), 1)[0]
    return float(slope), False


def variance_slope(report: ExperimentReport) -> float:
    """Least-squares slope of log variance against log n.

    Returns -inf when every variance is exactly zero (a constant functional).
    """
    var = [r.variance for r in report.rows]
    if all(v == 0 for v in var):
        return -math.inf
    if sum(v > 0 for v in var) < 3:
        raise ValueError("need at least three n-rows with positive variance")
    return _fit_slope(report.rows)[0]


def run_ball_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Concentration run on the discretized ball {sum |x_k|^p <= n R^p} (or its first quadrant)."""
    if cfg.region not in BALL_REGIONS:
        raise ValueError("run_ball_experiment needs region 'full' or 'first-quadrant'")
    return _run(cfg)


def run_cube_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Concentration run on the cube domains of the introductory examples.

    ``cube``: coordinates i.i.d. uniform on [a, b].  ``cube-derivative``:
    coordinates are derivative samples u_k; with ``apply_to="derivative"`` the
    integrand sees u_k (arc length), with ``apply_to="path"`` it sees the
    path x(t) = int_0^t u (area).
    """
    if cfg.region not in CUBE_REGIONS:
        raise ValueError("run_cube_experiment needs region 'cube' or 'cube-derivative'")
    return _run(cfg)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.region in BALL_REGIONS:
        return run_ball_experiment(cfg)
    return run_cube_experiment(cfg)


def coordinate_correlation(g, order, R=1.0, region=FULL, n=1024, samples=20000, seed=0, i=0, j=1):
    """Sample correlation of g(x_i) and g(x_j) for uniform points of the n-dimensional ball."""
    order = PNormOrder.coerce(order)
    expr = dsl.parse(g) if isinstance(g, str) else g
    ball = PBall(n, order, R * n ** (1.0 / order.p), region)
    pts = sample_uniform_pball(ball, chunk_rng(seed, n, 0), samples)
    gi = np.broadcast_to(dsl.evaluate(expr, {"x1": pts[:, i]}), (samples,))
    gj = np.broadcast_to(dsl.evaluate(expr, {"x1": pts[:, j]}), (samples,))
    return float(np.corrcoef(gi, gj)[0, 1])
