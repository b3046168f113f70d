"""
Exact mean-values of integral functionals on infinite-dimensional p-balls.

For Y = int_{I_1} ... int_{I_m} g(x(t_1), .., x(t_m), t_1, .., t_m) dt the
mean over the ball of radius R is

    EY = int_{I} E[g(R X_1, .., R X_m, t)] dt,   X_i i.i.d. coordinate law at R = 1,

with the high-order normal law on full balls and the high-order exponent law
on first quadrants.  Low arities are integrated by a tensor quadrature in the
probability variable u = F(x); higher arities fall back to Monte Carlo.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import dsl
from .ball_geometry import FIRST_QUADRANT, FULL
from .distributions import GenExponent, GenNormal, PNormOrder

TENSOR = "tensor-quadrature"
MONTE_CARLO = "importance-MC"

# (grading levels, GL nodes per panel) for the coarse rule; the fine rule doubles the nodes
_RULE_SIZE = {1: (48, 16), 2: (40, 8), 3: (24, 4)}
_T_NODES = 8
_MC_SAMPLES = 1_000_000
_CHUNK = 2_000_000


@dataclass(frozen=True)
class MeanValueResult:
    value: float
    method: str
    error_estimate: float
    evaluations: int
    stderr: float | None = None

    def __float__(self):
        return self.value


@functools.lru_cache(maxsize=None)
def _legendre(k):
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (x + 1.0), 0.5 * w


def _graded_panels(levels, k):
    """Gauss-Legendre nodes/weights on (0, 1/2], panels halving toward 0."""
    edges = np.concatenate([[0.0], 0.5 ** np.arange(levels, 0, -1)])
    x, w = _legendre(k)
    lo, hi = edges[:-1, None], edges[1:, None]
    return (lo + (hi - lo) * x).ravel(), ((hi - lo) * w).ravel()


@functools.lru_cache(maxsize=64)
def coordinate_rule(law, levels: int, k: int):
    """Nodes and weights integrating against ``law`` (so weights sum to 1).

    The probability variable u = F(x) is integrated by composite Gauss-Legendre
    on panels refined geometrically toward both tails, where x(u) has its
    logarithmic singularities.
    """
    v, w = _graded_panels(levels, k)
    upper = np.asarray(law.tail_quantile(v))
    if isinstance(law, GenNormal):
        nodes = np.concatenate([-upper[::-1], upper])
        weights = np.concatenate([w[::-1], w])
    else:
        lower = np.asarray(law.quantile(v))
        nodes = np.concatenate([lower, upper[::-1]])
        weights = np.concatenate([w, w[::-1]])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _t_rule(intervals, k):
    x, w = _legendre(k)
    return [(a + (b - a) * x, (b - a) * w) for a, b in intervals]


def _law_for(order: PNormOrder, region: str):
    if region == FULL:
        if not order.full_line:
            raise ValueError("full-ball mean-values need an even-rational order")
        return GenNormal(order, 1.0)
    if region == FIRST_QUADRANT:
        return GenExponent(order, 1.0)
    raise ValueError(f"unknown region {region!r}")


def _tensor_sum(spec: dsl.FunctionalSpec, R, nodes, weights, t_rules):
    """Weighted sum of g over the tensor grid of x-nodes (and t-nodes, if used)."""
    m = spec.m
    axes = []  # (name, values, weights) per tensor axis
    for i in range(1, m + 1):
        axes.append((f"x{i}", R * nodes, weights))
    if spec.uses_t:
        for i, (tn, tw) in enumerate(t_rules, start=1):
            axes.append((f"t{i}", tn, tw))
    else:
        scale = spec.interval_measure()

    # chunk over the first axis so the grid never materializes beyond _CHUNK points
    inner = int(np.prod([len(a[1]) for a in axes[1:]], dtype=np.int64))
    step = max(1, _CHUNK // max(inner, 1))
    first_name, first_vals, first_w = axes[0]
    ndim = len(axes)
    partials = []
    count = 0
    for s in range(0, len(first_vals), step):
        env = {}
        wgrid = None
        for d, (name, vals, ws) in enumerate(axes):
            if d == 0:
                vals, ws = first_vals[s:s + step], first_w[s:s + step]
            shape = [1] * ndim
            shape[d] = len(vals)
            env[name] = vals.reshape(shape)
            wgrid = ws.reshape(shape) if wgrid is None else wgrid * ws.reshape(shape)
        vals = dsl.evaluate(spec.integrand, env)
        vals = np.broadcast_to(vals, wgrid.shape)
        if not np.all(np.isfinite(vals)):
            raise dsl.EvalError("integrand is not finite on the quadrature grid", spec.integrand)
        partials.append(float(np.sum(vals * wgrid)))
        count += wgrid.size
    total = math.fsum(partials)
    if not spec.uses_t:
        total *= scale
    return total, count


def _quadrature(spec, law, R):
    m = spec.m
    levels, k = _RULE_SIZE[m]
    results = []
    evals = 0
    for kk, tk in ((k, _T_NODES), (2 * k, 2 * _T_NODES)):
        nodes, weights = coordinate_rule(law, levels, kk)
        t_rules = _t_rule(spec.intervals, tk) if spec.uses_t else None
        val, cnt = _tensor_sum(spec, R, nodes, weights, t_rules)
        results.append(val)
        evals += cnt
    coarse, fine = results
    err = abs(fine - coarse) + 1e-15 * abs(fine)
    return MeanValueResult(fine, TENSOR, err, evals)


def _monte_carlo(spec, law, R, samples, seed):
    rng = np.random.default_rng(seed)
    chunk = 100_000
    sums, sqs = [], []
    done = 0
    while done < samples:
        c = min(chunk, samples - done)
        env = {f"x{i}": R * law.sample(rng, c) for i in range(1, spec.m + 1)}
        if spec.uses_t:
            for i, (a, b) in enumerate(spec.intervals, start=1):
                env[f"t{i}"] = rng.uniform(a, b, c)
        vals = np.broadcast_to(dsl.evaluate(spec.integrand, env), (c,)) * spec.interval_measure()
        sums.append(float(np.sum(vals)))
        sqs.append(float(np.sum(vals * vals)))
        done += c
    mean = math.fsum(sums) / samples
    var = max(math.fsum(sqs) / samples - mean * mean, 0.0) * samples / (samples - 1)
    se = math.sqrt(var / samples)
    return MeanValueResult(mean, MONTE_CARLO, 4.0 * se, samples, stderr=se)


def mean_general(g, order, R: float = 1.0, region: str | None = None, *, method: str = "auto",
                 samples: int = _MC_SAMPLES, seed: int = 0) -> MeanValueResult:
    """Mean-value of the integral functional ``g`` on the ball of radius ``R``.

    ``g`` is a :class:`~pball.dsl.FunctionalSpec` (or integrand text with the
    default [0, 1] intervals).  ``region`` defaults to the full ball for
    even-rational orders and the first quadrant otherwise.  ``method`` is
    "auto" (tensor quadrature up to three x-axes, Monte Carlo beyond),
    "quadrature" or "mc".
    """
    spec = g if isinstance(g, dsl.FunctionalSpec) else dsl.functional(g)
    order = PNormOrder.coerce(order)
    if not R > 0:
        raise ValueError("radius must be positive")
    if region is None:
        region = FULL if order.full_line else FIRST_QUADRANT
    law = _law_for(order, region)
    if method == "auto":
        method = "quadrature" if spec.m <= 3 else "mc"
    if method == "quadrature":
        if spec.m > 3:
            raise ValueError("tensor quadrature is limited to arity 3")
        return _quadrature(spec, law, R)
    if method == "mc":
        return _monte_carlo(spec, law, R, samples, seed)
    raise ValueError(f"unknown method {method!r}")


def _t_free(g):
    spec = g if isinstance(g, dsl.FunctionalSpec) else dsl.functional(g)
    if spec.uses_t:
        raise ValueError("integrand depends on t; use mean_general")
    return spec


def mean_even(g, order, R: float = 1.0, **kw) -> MeanValueResult:
    """Mean-value on the full ball (even-rational order, high-order normal coordinates)."""
    return mean_general(_t_free(g), order, R, FULL, **kw)


def mean_odd(g, order, R: float = 1.0, **kw) -> MeanValueResult:
    """Mean-value on the first quadrant (high-order exponent coordinates)."""
    return mean_general(_t_free(g), order, R, FIRST_QUADRANT, **kw)


def exchange(h, means) -> float:
    """h(EY_1, .., EY_m): the mean of h(Y_1, .., Y_m) under complete concentration."""
    expr = dsl.parse(h) if isinstance(h, str) else h
    ar = dsl.arity_check(expr)
    if ar.m and ar.role != "h":
        raise dsl.DSLError("outer functions are written in y-variables")
    if ar.m != len(means):
        raise ValueError(f"h has arity {ar.m} but {len(means)} means were given")
    env = {f"y{i}": float(v) for i, v in enumerate(means, start=1)}
    return float(dsl.evaluate(expr, env))


def _scalar_fn(expr, name="x1"):
    def f(u):
        return float(dsl.evaluate(expr, {name: u}))
    return f


def cube_mean(g, a: float, b: float, mode: str = "value") -> MeanValueResult:
    """Limit mean of int_0^1 g(.) dt on a cube-type domain.

    mode "value": M = {a <= x(t) <= b}, g applied to x(t).
    mode "derivative": M = {a <= x'(t) <= b}, g applied to x'(t) (e.g. arc
    length with g = sqrt(1 + x1^2)).  Both reduce to (1/(b-a)) int_a^b g(u) du.
    """
    if mode not in ("value", "derivative"):
        raise ValueError(f"unknown mode {mode!r}")
    if not a < b:
        raise ValueError("need a < b")
    expr = dsl.parse(g) if isinstance(g, str) else g
    ar = dsl.arity_check(expr)
    if ar.m > 1 or ar.uses_t or ar.role == "h":
        raise dsl.DSLError("cube mean-values take an integrand in x1 only")
    val, err, info = integrate.quad(_scalar_fn(expr), a, b, epsabs=1e-14, epsrel=1e-13,
                                    limit=200, full_output=True)
    return MeanValueResult(val / (b - a), TENSOR, err / (b - a), int(info["neval"]))


def cube_path_mean(g, a: float, b: float) -> MeanValueResult:
    """Limit mean of int_0^1 g(x(t)) dt on M = {a <= x'(t) <= b, x(0) = 0}.

    The path x(t) = int_0^t x'(s) ds concentrates on t (a + b)/2, so the
    mean is int_0^1 g(t (a + b)/2) dt.  With g = x1 and [a, b] = [0, 1] this
    is the mean area 1/4.
    """
    if not a < b:
        raise ValueError("need a < b")
    expr = dsl.parse(g) if isinstance(g, str) else g
    slope = 0.5 * (a + b)
    f = _scalar_fn(expr)
    val, err, info = integrate.quad(lambda t: f(slope * t), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13,
                                    limit=200, full_output=True)
    return MeanValueResult(val, TENSOR, err, int(info["neval"]))
