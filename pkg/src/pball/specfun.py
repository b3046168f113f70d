"""
Log-gamma and the regularized incomplete gamma functions.

Every density, cdf and volume formula in the package is evaluated through
these kernels.  All functions accept scalars or numpy arrays and broadcast
their arguments; scalar input gives a Python float back.
"""

import math

import numpy as np

__all__ = [
    "log_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "inv_reg_lower_gamma",
    "inv_reg_upper_gamma",
]

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

_EPS = np.finfo(float).eps
_TINY = 1e-300
_MAX_ITER = 5000


def _out(value, scalar):
    return float(value) if scalar else value


def _lanczos_log_gamma(x):
    # valid for x >= 0.5
    z = x - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma(x):
    """Natural log of the gamma function for x > 0."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("log_gamma requires x > 0")
    small = x < 0.5
    # ln G(x) = ln G(x + 1) - ln x keeps the Lanczos sum in its accurate range
    shifted = np.where(small, x + 1.0, x)
    res = _lanczos_log_gamma(shifted)
    res = np.where(small, res - np.log(x), res)
    return _out(res, scalar)


def _log_prefactor(a, x):
    # ln(x^a e^-x / Gamma(a))
    with np.errstate(divide="ignore"):
        return a * np.log(x) - x - log_gamma(a)


def _series(a, x):
    """P(a, x) by the power series; meant for x < a + 1."""
    ap = a.copy()
    term = 1.0 / a
    total = term.copy()
    for _ in range(_MAX_ITER):
        ap += 1.0
        term = term * x / ap
        total += term
        if np.all(np.abs(term) <= np.abs(total) * _EPS):
            break
    else:
        raise ArithmeticError("incomplete gamma series did not converge")
    return total * np.exp(_log_prefactor(a, x))


def _continued_fraction(a, x):
    """Q(a, x) by modified Lentz evaluation; meant for x >= a + 1."""
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = np.where(done, 1.0, d * c)
        h = h * delta
        done |= np.abs(delta - 1.0) <= 2 * _EPS
        if np.all(done):
            break
    else:
        raise ArithmeticError("incomplete gamma continued fraction did not converge")
    return np.exp(_log_prefactor(a, x)) * h


def _check_args(a, x):
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    if np.any(~(a > 0)):
        raise ValueError("incomplete gamma requires a > 0")
    if np.any(~(x >= 0)):
        raise ValueError("incomplete gamma requires x >= 0")
    return a.astype(float), x.astype(float)


def _pq(a, x):
    """Return (P, Q) arrays, each computed directly where it is accurate."""
    p = np.zeros(a.shape)
    q = np.ones(a.shape)
    use_series = (x < a + 1.0) & (x > 0)
    use_cf = (x >= a + 1.0) & np.isfinite(x)
    if np.any(use_series):
        ps = _series(a[use_series], x[use_series])
        p[use_series] = ps
        q[use_series] = 1.0 - ps
    if np.any(use_cf):
        qc = _continued_fraction(a[use_cf], x[use_cf])
        q[use_cf] = qc
        p[use_cf] = 1.0 - qc
    inf = np.isinf(x)
    p[inf] = 1.0
    q[inf] = 0.0
    return p, q


def reg_lower_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a)."""
    scalar = np.ndim(a) == 0 and np.ndim(x) == 0
    a, x = _check_args(a, x)
    return _out(_pq(a, x)[0], scalar)


def reg_upper_gamma(a, x):
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).

    In the tail Q is computed directly by the continued fraction, so it keeps
    full relative accuracy where 1 - P would cancel to zero.
    """
    scalar = np.ndim(a) == 0 and np.ndim(x) == 0
    a, x = _check_args(a, x)
    return _out(_pq(a, x)[1], scalar)


def _invert(a, target, upper):
    """Safeguarded Newton on the log of P (or of Q when ``upper``).

    ``target`` is the desired value of P (or Q).  All entries are solved in
    lockstep; the bracket [lo, hi] is kept for every entry and any Newton step
    leaving it is replaced by a bisection step.
    """
    log_target = np.log(target)
    lga = log_gamma(a)

    lo = np.zeros(a.shape)
    hi = np.maximum(a, 1.0)
    for _ in range(2000):
        p, q = _pq(a, hi)
        short = q > target if upper else p < target
        if not np.any(short):
            break
        hi = np.where(short, 2.0 * hi, hi)

    if upper:
        guess = np.maximum(-np.log(target) - lga, a)
    else:
        guess = np.exp((np.log(target) + log_gamma(a + 1.0)) / a)
    x = np.where((guess > lo) & (guess < hi), guess, 0.5 * hi)

    done = np.zeros(a.shape, dtype=bool)
    for _ in range(400):
        p, q = _pq(a, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_pdf = (a - 1.0) * np.log(x) - x - lga
            if upper:
                f = log_target - np.log(q)
                df = np.exp(log_pdf - np.log(q))
            else:
                f = np.log(p) - log_target
                df = np.exp(log_pdf - np.log(p))
            below = f < 0
            lo = np.where(below & ~done, x, lo)
            hi = np.where(~below & ~done, x, hi)
            step = x - f / df
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        mid = np.where(lo > 0, np.sqrt(lo * hi), 0.5 * hi)
        new = np.where(f == 0, x, np.where(bad, mid, step))
        conv = (np.abs(new - x) <= 4 * _EPS * new) | (hi - lo <= 4 * _EPS * hi)
        x = np.where(done, x, new)
        done |= conv
        if np.all(done):
            break
    else:
        raise ArithmeticError("incomplete gamma inversion did not converge")
    return x


def inv_reg_lower_gamma(a, q):
    """Return x >= 0 with P(a, x) = q, for 0 <= q < 1."""
    scalar = np.ndim(a) == 0 and np.ndim(q) == 0
    a, q = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(q, dtype=float))
    if np.any(~(a > 0)):
        raise ValueError("inverse incomplete gamma requires a > 0")
    if np.any(~((q >= 0) & (q < 1))):
        raise ValueError("inverse incomplete gamma requires 0 <= q < 1")
    x = np.zeros(a.shape)
    lower = (q > 0) & (q <= 0.5)
    upper = q > 0.5
    if np.any(lower):
        x[lower] = _invert(a[lower], q[lower], upper=False)
    if np.any(upper):
        # 1 - q is exact for q in [0.5, 1)
        x[upper] = _invert(a[upper], 1.0 - q[upper], upper=True)
    return _out(x, scalar)


def inv_reg_upper_gamma(a, qc):
    """Return x >= 0 with Q(a, x) = qc, for 0 < qc <= 1.

    Use this instead of ``inv_reg_lower_gamma(a, 1 - qc)`` when qc is tiny.
    """
    scalar = np.ndim(a) == 0 and np.ndim(qc) == 0
    a, qc = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(qc, dtype=float))
    if np.any(~(a > 0)):
        raise ValueError("inverse incomplete gamma requires a > 0")
    if np.any(~((qc > 0) & (qc <= 1))):
        raise ValueError("inverse upper incomplete gamma requires 0 < qc <= 1")
    x = np.zeros(a.shape)
    tail = qc < 0.5
    head = (qc >= 0.5) & (qc < 1)
    if np.any(tail):
        x[tail] = _invert(a[tail], qc[tail], upper=True)
    if np.any(head):
        x[head] = _invert(a[head], 1.0 - qc[head], upper=False)
    return _out(x, scalar)
