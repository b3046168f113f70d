"""
Coordinate laws of p-norm balls.

Uniform measure on the discretized ball {sum |x_k|^p <= n R^p} gives each
coordinate the exact marginal :class:`FiniteCoordDensity`; as n grows this
tends to the high-order normal law (full ball, even-rational p) or to the
high-order exponent law (first quadrant, any other p)::

    rho(x) = exp(-|x|^p / (p R^p)) / (c R Gamma(1/p) p^(1/p - 1))

with c = 2 on the full line and c = 1 on the half line.  The map
Z = X^p / (p beta) (at R = 1) turns either law into Gamma(1/p, beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .specfun import (
    inv_reg_lower_gamma,
    inv_reg_upper_gamma,
    log_gamma,
    reg_lower_gamma,
    reg_upper_gamma,
)

EVEN_RATIONAL = "even-rational"
ODD_RATIONAL = "odd-rational"
GENERAL_REAL = "general-real"


@dataclass(frozen=True)
class PNormOrder:
    """The exponent p, with its parity class when given as a ratio p0/q0.

    A bare real ``PNormOrder(2.0)`` is classified general-real: parity is only
    trusted when the caller supplies the integers through :meth:`ratio`.
    """

    p: float
    p0: int | None = None
    q0: int | None = None

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValueError(f"order p must be a positive finite number, got {self.p!r}")
        if (self.p0 is None) != (self.q0 is None):
            raise ValueError("p0 and q0 must be given together")
        if self.p0 is not None:
            if math.gcd(self.p0, self.q0) != 1 or self.q0 <= 0:
                raise ValueError("p0/q0 must be a reduced ratio with q0 > 0")
            if abs(self.p - self.p0 / self.q0) > 1e-15 * self.p:
                raise ValueError("p does not equal p0/q0")

    @classmethod
    def ratio(cls, p0: int, q0: int = 1) -> PNormOrder:
        frac = Fraction(int(p0), int(q0))
        if frac <= 0:
            raise ValueError("order p0/q0 must be positive")
        return cls(frac.numerator / frac.denominator, frac.numerator, frac.denominator)

    @classmethod
    def coerce(cls, order) -> PNormOrder:
        if isinstance(order, PNormOrder):
            return order
        return cls(float(order))

    @property
    def classification(self) -> str:
        if self.p0 is None:
            return GENERAL_REAL
        return EVEN_RATIONAL if self.p0 % 2 == 0 else ODD_RATIONAL

    @property
    def full_line(self) -> bool:
        """True when the coordinate law lives on the whole real line."""
        return self.classification == EVEN_RATIONAL

    def __str__(self):
        if self.p0 is None:
            return repr(self.p)
        return f"{self.p0}/{self.q0}" if self.q0 != 1 else str(self.p0)


class _PowerLaw:
    """Shared machinery of the full-line and half-line power laws."""

    _sides = 1

    order: PNormOrder
    R: float

    def _validate(self):
        object.__setattr__(self, "order", PNormOrder.coerce(self.order))
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError(f"scale R must be positive, got {self.R!r}")

    @property
    def p(self) -> float:
        return self.order.p

    @property
    def _shape(self) -> float:
        return 1.0 / self.p

    def log_norm(self) -> float:
        """Log of the normalizing constant c R Gamma(1/p) p^(1/p - 1)."""
        p = self.p
        return math.log(self._sides * self.R) + log_gamma(1.0 / p) + (1.0 / p - 1.0) * math.log(p)

    def _gamma_arg(self, absx):
        return (absx / self.R) ** self.p / self.p

    def moment(self, k: int) -> float:
        """E[X^k]; odd moments of the symmetric law vanish."""
        if k < 0 or int(k) != k:
            raise ValueError("moment order must be a nonnegative integer")
        if self._sides == 2 and k % 2 == 1:
            return 0.0
        p = self.p
        return math.exp(
            k * math.log(self.R) + (k / p) * math.log(p) + log_gamma((k + 1) / p) - log_gamma(1 / p)
        )

    def abs_moment(self, k: float) -> float:
        """E|X|^k for real k > -1."""
        p = self.p
        return math.exp(
            k * math.log(self.R) + (k / p) * math.log(p) + log_gamma((k + 1) / p) - log_gamma(1 / p)
        )

    def mean(self) -> float:
        return self.moment(1)

    def var(self) -> float:
        return self.moment(2) - self.moment(1) ** 2

    def _magnitude(self, g):
        return self.R * (self.p * g) ** (1.0 / self.p)

    def sample(self, rng: np.random.Generator, size=None):
        """Draw via X = R (p G)^(1/p) with G ~ Gamma(1/p, 1)."""
        n = 1 if size is None else size
        g = gamma_variates(rng, self._shape, n)
        x = self._magnitude(g)
        if self._sides == 2:
            x = np.where(rng.random(np.shape(x)) < 0.5, -x, x)
        return float(x[0]) if size is None else x

    def to_gamma(self, x, beta: float = 1.0):
        """The variable Z = (|x|/R)^p / (p beta), distributed Gamma(1/p, beta)."""
        return self._gamma_arg(np.abs(np.asarray(x, dtype=float))) / beta

    def gamma_law(self, beta: float = 1.0) -> GammaDist:
        return GammaDist(1.0 / self.p, beta)


@dataclass(frozen=True)
class GenNormal(_PowerLaw):
    """High-order normal law on the full line, density prop. to exp(-|x|^p / (p R^p)).

    Any p > 0 is accepted; the ball geometry only produces it for
    even-rational orders.
    """

    order: PNormOrder
    R: float = 1.0

    _sides = 2

    def __post_init__(self):
        self._validate()

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        res = np.exp(-self._gamma_arg(np.abs(x)) - self.log_norm())
        return float(res) if res.ndim == 0 else res

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        res = -self._gamma_arg(np.abs(x)) - self.log_norm()
        return float(res) if res.ndim == 0 else res

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        a = self._shape
        y = self._gamma_arg(np.abs(x))
        # the tail is taken from Q so that F(-x) keeps relative accuracy
        tail = 0.5 * np.asarray(reg_upper_gamma(a, y))
        res = np.where(x < 0, tail, 1.0 - tail)
        return float(res) if res.ndim == 0 else res

    def sf(self, x):
        return self.cdf(-np.asarray(x, dtype=float))

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        if np.any(~((q > 0) & (q < 1))):
            raise ValueError("quantile level must lie in (0, 1)")
        v = np.minimum(q, 1.0 - q)
        mag = self._magnitude(inv_reg_upper_gamma(self._shape, 2.0 * v))
        res = np.where(q < 0.5, -mag, np.where(q > 0.5, mag, 0.0))
        return float(res) if res.ndim == 0 else res

    def tail_quantile(self, v):
        """x > 0 with P(X > x) = v, accurate for tiny v."""
        v = np.asarray(v, dtype=float)
        res = self._magnitude(inv_reg_upper_gamma(self._shape, 2.0 * v))
        return float(res) if np.ndim(res) == 0 else res

    @property
    def support(self):
        return (-math.inf, math.inf)


@dataclass(frozen=True)
class GenExponent(_PowerLaw):
    """High-order exponent law on [0, inf), density prop. to exp(-x^p / (p R^p))."""

    order: PNormOrder
    R: float = 1.0

    def __post_init__(self):
        self._validate()

    @classmethod
    def from_rate(cls, order, lam: float) -> GenExponent:
        """Parametrize by the rate in exp(-lam x^p), i.e. R = (p lam)^(-1/p)."""
        order = PNormOrder.coerce(order)
        if not lam > 0:
            raise ValueError("rate must be positive")
        return cls(order, (order.p * lam) ** (-1.0 / order.p))

    @property
    def rate(self) -> float:
        return 1.0 / (self.p * self.R**self.p)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("high-order exponent density is defined for x >= 0")
        res = np.exp(-self._gamma_arg(x) - self.log_norm())
        return float(res) if res.ndim == 0 else res

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("high-order exponent density is defined for x >= 0")
        res = -self._gamma_arg(x) - self.log_norm()
        return float(res) if res.ndim == 0 else res

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        res = np.asarray(reg_lower_gamma(self._shape, self._gamma_arg(np.maximum(x, 0.0))))
        return float(res) if res.ndim == 0 else res

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        res = np.asarray(reg_upper_gamma(self._shape, self._gamma_arg(np.maximum(x, 0.0))))
        return float(res) if res.ndim == 0 else res

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        if np.any(~((q > 0) & (q < 1))):
            raise ValueError("quantile level must lie in (0, 1)")
        res = self._magnitude(inv_reg_lower_gamma(self._shape, q))
        return float(res) if np.ndim(res) == 0 else res

    def tail_quantile(self, v):
        """x with P(X > x) = v, accurate for tiny v."""
        v = np.asarray(v, dtype=float)
        res = self._magnitude(inv_reg_upper_gamma(self._shape, v))
        return float(res) if np.ndim(res) == 0 else res

    @property
    def support(self):
        return (0.0, math.inf)


@dataclass(frozen=True)
class GammaDist:
    """Gamma law with shape ``alpha`` and rate ``beta``."""

    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("Gamma parameters must be positive")

    def logpdf(self, z):
        z = np.asarray(z, dtype=float)
        a, b = self.alpha, self.beta
        with np.errstate(divide="ignore"):
            res = a * math.log(b) - log_gamma(a) + (a - 1) * np.log(z) - b * z
        res = np.where(z < 0, -np.inf, res)
        return float(res) if res.ndim == 0 else res

    def pdf(self, z):
        res = np.exp(self.logpdf(z))
        return float(res) if np.ndim(res) == 0 else res

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        res = np.asarray(reg_lower_gamma(self.alpha, self.beta * np.maximum(z, 0.0)))
        return float(res) if res.ndim == 0 else res

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        if np.any(~((q > 0) & (q < 1))):
            raise ValueError("quantile level must lie in (0, 1)")
        res = np.asarray(inv_reg_lower_gamma(self.alpha, q)) / self.beta
        return float(res) if res.ndim == 0 else res

    def sample(self, rng: np.random.Generator, size=None):
        n = 1 if size is None else size
        z = gamma_variates(rng, self.alpha, n) / self.beta
        return float(z[0]) if size is None else z

    def mean(self) -> float:
        return self.alpha / self.beta

    def var(self) -> float:
        return self.alpha / self.beta**2

    def moment(self, k: int) -> float:
        return math.exp(log_gamma(self.alpha + k) - log_gamma(self.alpha) - k * math.log(self.beta))


@dataclass(frozen=True)
class FiniteCoordDensity:
    """Exact law of x_1 for a uniform point of the discretized ball.

    The ball is {sum |x_k|^p <= n R^p} in dimension n (restricted to x >= 0
    unless the order is even-rational); the slice volume at x_1 = x is
    proportional to (n R^p - |x|^p)^((n-1)/p).
    """

    order: PNormOrder
    R: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "order", PNormOrder.coerce(self.order))
        if not self.R > 0:
            raise ValueError("scale R must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("dimension n must be a positive integer")

    @property
    def full_line(self) -> bool:
        return self.order.full_line

    @property
    def radius(self) -> float:
        """Half-width of the support, (n R^p)^(1/p)."""
        return self.n ** (1.0 / self.order.p) * self.R

    def log_const(self) -> float:
        p, n = self.order.p, self.n
        c = math.log(p) + log_gamma(1 + n / p) - log_gamma(1 / p) - log_gamma(1 + (n - 1) / p)
        if self.full_line:
            c -= math.log(2.0)
        return c

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        p, n = self.order.p, self.n
        cap = n * self.R**p
        ax = np.abs(x)
        inside = ax**p < cap
        if not self.full_line:
            inside &= x >= 0
        # C_n cap^(-n/p) (cap - |x|^p)^((n-1)/p), written as cap^(-1/p) (1 - |x|^p/cap)^((n-1)/p)
        frac = np.where(inside, 1.0 - ax**p / cap, 1.0)
        with np.errstate(divide="ignore"):
            logv = self.log_const() - math.log(cap) / p + (n - 1) / p * np.log(frac)
        res = np.where(inside, np.exp(logv), 0.0)
        return float(res) if res.ndim == 0 else res


def coordinate_law(order, R: float = 1.0):
    """Limit coordinate law for the ball of this order: full line iff even-rational."""
    order = PNormOrder.coerce(order)
    return GenNormal(order, R) if order.full_line else GenExponent(order, R)


def gamma_variates(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    """Gamma(shape, 1) variates from the caller's stream."""
    if not shape > 0:
        raise ValueError("gamma shape must be positive")
    return rng.standard_gamma(shape, size)


# Function-style entry points mirroring the method API.

def gn_pdf(d: GenNormal, x):
    return d.pdf(x)


def ge_pdf(d: GenExponent, x):
    return d.pdf(x)


def dist_cdf(d, x):
    return d.cdf(x)


def dist_quantile(d, q):
    return d.quantile(q)


def dist_sample(d, rng, size=None):
    return d.sample(rng, size)


def dist_moment(d, k: int) -> float:
    return d.moment(k)


def gamma_from_order(d, beta: float = 1.0) -> GammaDist:
    """Gamma(1/p, beta): the law of (|X|/R)^p / (p beta)."""
    return d.gamma_law(beta)


def finite_coord_pdf(f: FiniteCoordDensity, x):
    return f.pdf(x)
