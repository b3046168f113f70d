"""
Finite-dimensional p-balls: Dirichlet integrals, volumes, shell ratios and
exact uniform sampling.

Volumes are carried in log space; Gamma(1 + n/p) overflows a double well
before the dimensions used in the concentration experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import PNormOrder, gamma_variates
from .specfun import log_gamma

FULL = "full"
FIRST_QUADRANT = "first-quadrant"


@dataclass(frozen=True)
class PBall:
    """The ball {sum |x_k|^p <= R^p} in R^n, or its nonnegative orthant."""

    n: int
    order: PNormOrder
    R: float = 1.0
    region: str = FULL

    def __post_init__(self):
        object.__setattr__(self, "order", PNormOrder.coerce(self.order))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("dimension n must be a positive integer")
        if self.order.p < 1:
            raise ValueError("p-balls need p >= 1")
        if not self.R > 0:
            raise ValueError("radius must be positive")
        if self.region not in (FULL, FIRST_QUADRANT):
            raise ValueError(f"unknown region {self.region!r}")
        if self.region == FULL and not self.order.full_line:
            raise ValueError("the full ball needs an even-rational order (use p0/q0 with p0 even)")

    def contains(self, x) -> np.ndarray:
        """Membership test for points stacked along the last axis."""
        x = np.asarray(x, dtype=float)
        inside = np.sum(np.abs(x) ** self.order.p, axis=-1) <= self.R**self.order.p * (1 + 1e-12)
        if self.region == FIRST_QUADRANT:
            inside &= np.all(x >= 0, axis=-1)
        return inside


def log_dirichlet_integral(exponents) -> float:
    exps = np.asarray(exponents, dtype=float).ravel()
    if exps.size == 0:
        raise ValueError("need at least one exponent")
    if np.any(~(exps > 0)):
        raise ValueError("exponents must be positive")
    half = exps / 2.0
    return float(-exps.size * math.log(2.0) + np.sum(log_gamma(half)) - log_gamma(1.0 + half.sum()))


def dirichlet_integral(exponents) -> float:
    """Integral of prod x_i^(p_i - 1) over the positive part of the unit Euclidean ball.

    Equals 2^-n prod Gamma(p_i/2) / Gamma(1 + sum p_i / 2).
    """
    return math.exp(log_dirichlet_integral(exponents))


def log_pball_volume(b: PBall) -> float:
    p, n = b.order.p, b.n
    logv = n * log_gamma(1.0 + 1.0 / p) - log_gamma(1.0 + n / p) + n * math.log(b.R)
    if b.region == FULL:
        logv += n * math.log(2.0)
    return logv


def pball_volume(b: PBall) -> float:
    """Lebesgue volume of the ball (or of its first quadrant)."""
    return math.exp(log_pball_volume(b))


def shell_ratio(n: int, r: float, R: float) -> float:
    """V(ball of radius r) / V(ball of radius R) = (r/R)^n, for any p."""
    if not (0 < r and 0 < R):
        raise ValueError("radii must be positive")
    if r > R:
        raise ValueError("inner radius exceeds outer radius")
    return math.exp(n * (math.log(r) - math.log(R)))


def sample_uniform_pball(b: PBall, rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniform points in ``b``.

    Draw g_1..g_n i.i.d. with density prop. to exp(-|t|^p / p) (signed on the
    full ball, nonnegative in the first quadrant); g / ||g||_p is then
    distributed by the cone measure of the unit sphere, and the radius
    R U^(1/n) restores uniformity in volume.
    """
    count = 1 if size is None else int(size)
    p, n = b.order.p, b.n
    # |g|^p / p ~ Gamma(1/p), so the magnitudes come straight from gamma variates
    gam = gamma_variates(rng, 1.0 / p, count * n).reshape(count, n)
    g = (p * gam) ** (1.0 / p)
    if b.region == FULL:
        g = np.where(rng.random((count, n)) < 0.5, -g, g)
    # ||g||_p^p = p * sum(gam)
    norm = (p * gam.sum(axis=1)) ** (1.0 / p)
    radius = b.R * rng.random(count) ** (1.0 / n)
    x = g * (radius / norm)[:, None]
    return x[0] if size is None else x


def sample_rejection_pball(b: PBall, rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform points by rejection from the bounding box; exponential in n, small n only."""
    out = []
    lo = -b.R if b.region == FULL else 0.0
    have = 0
    while have < size:
        pts = rng.uniform(lo, b.R, size=(max(2 * (size - have), 64), b.n))
        pts = pts[b.contains(pts)]
        out.append(pts)
        have += len(pts)
    return np.concatenate(out)[:size]

