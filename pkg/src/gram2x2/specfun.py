"""Special functions used by the closed-form densities.

All functions accept scalars or numpy arrays and return the same shape
(a Python float for scalar input).
"""

import numpy as np

from .errors import DegenerateParameters, DomainError

EULER_GAMMA = np.euler_gamma
Z_SWITCH = 0.25
G_DISTINCT_REL = 1e-9

# Region boundaries for Ei.
_SERIES_POS_MAX = 40.0
_SERIES_NEG_MAX = 1.0
_EPS = np.finfo(float).eps
_FPMIN = np.finfo(float).tiny / _EPS


def _scalar_out(out, scalar):
    return float(out) if scalar else out


def _sinhc_series(z):
    # sum_k z^k / (2k+1)!, |z| <= Z_SWITCH; 10 terms reach 1e-20
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(1, 11):
        term = term * z / ((2 * k) * (2 * k + 1))
        total = total + term
    return total


def exp_scaled_sinhc_sqrt(alpha, z):
    """Evaluate ``exp(-alpha) * sinh(sqrt(z)) / sqrt(z)`` without overflow.

    For ``z < 0`` the sinh-cardinal continues analytically to
    ``sin(sqrt(-z)) / sqrt(-z)``.
    """
    scalar = np.ndim(alpha) == 0 and np.ndim(z) == 0
    alpha, z = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(z, dtype=float))
    out = np.empty(alpha.shape)
    small = np.abs(z) <= Z_SWITCH
    pos = z > Z_SWITCH
    neg = z < -Z_SWITCH
    with np.errstate(over="ignore", under="ignore"):
        if small.any():
            out[small] = np.exp(-alpha[small]) * _sinhc_series(z[small])
        if pos.any():
            r = np.sqrt(z[pos])
            out[pos] = np.exp(r - alpha[pos]) * (-np.expm1(-2.0 * r)) / (2.0 * r)
        if neg.any():
            r = np.sqrt(-z[neg])
            out[neg] = np.exp(-alpha[neg]) * np.sin(r) / r
    return _scalar_out(out, scalar)


def sinhc_sqrt(z):
    """Entire function ``S(z) = sum_k z^k / (2k+1)!``.

    Equals ``sinh(sqrt(z))/sqrt(z)`` for ``z > 0`` and
    ``sin(sqrt(-z))/sqrt(-z)`` for ``z < 0``, with ``S(0) = 1``.
    """
    return exp_scaled_sinhc_sqrt(0.0, z)


def _ei_series(x):
    # gamma + ln|x| + sum x^k / (k k!)
    total = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        term = np.where(active, term * x / k, term)
        contrib = term / k
        total = np.where(active, total + contrib, total)
        active = active & (np.abs(contrib) > _EPS * np.abs(total))
        if k > 400:
            break
    return EULER_GAMMA + np.log(np.abs(x)) + total


def _e1_contfrac_scaled(t, shift):
    # exp(shift) * E1(t) for t > 1, modified Lentz on the even continued fraction
    b = t + 1.0
    c = np.full_like(t, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(t.shape, dtype=bool)
    for i in range(1, 500):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = np.where(active, h * delta, h)
        active = active & (np.abs(delta - 1.0) > _EPS)
        if not active.any():
            break
    return h * np.exp(shift - t)


def _ei_asymptotic_scaled(x, shift):
    # exp(shift) * Ei(x) for x > 40: e^x/x * sum k!/x^k, truncated at the smallest term
    total = np.ones_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        nxt = term * k / x
        active = active & (nxt < term) & (term > _EPS * total)
        if not active.any():
            break
        term = np.where(active, nxt, term)
        total = np.where(active, total + term, total)
    return np.exp(x + shift) / x * total


def expint_ei_scaled(x, shift=0.0):
    """Return ``exp(shift) * Ei(x)`` with the exponentials combined.

    Useful where ``Ei`` of a large positive argument is multiplied by a
    decaying exponential, e.g. ``exp(-x/phi3) * Ei(c*x)``.
    """
    scalar = np.ndim(x) == 0 and np.ndim(shift) == 0
    x, shift = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(shift, dtype=float))
    if not np.all(np.isfinite(x)) or np.any(x == 0.0):
        raise DomainError("Ei(x) requires finite, nonzero x")
    out = np.empty(x.shape)
    series = (x > -_SERIES_NEG_MAX) & (x <= _SERIES_POS_MAX)
    cf = x <= -_SERIES_NEG_MAX
    asym = x > _SERIES_POS_MAX
    with np.errstate(over="ignore", under="ignore"):
        if series.any():
            out[series] = np.exp(shift[series]) * _ei_series(x[series])
        if cf.any():
            out[cf] = -_e1_contfrac_scaled(-x[cf], shift[cf])
        if asym.any():
            out[asym] = _ei_asymptotic_scaled(x[asym], shift[asym])
    return _scalar_out(out, scalar)


def expint_ei(x):
    """Principal-value exponential integral ``Ei(x) = -int_{-x}^inf e^-t/t dt``.

    Power series for ``-1 < x <= 40``, continued fraction for ``E1(-x)``
    when ``x <= -1``, asymptotic series beyond 40.  Relative accuracy is
    ~1e-15 away from the zero of Ei at x ~ 0.3725, where only absolute
    accuracy is meaningful.
    """
    return expint_ei_scaled(x, 0.0)


def g_rates(p):
    """Return ``(1/phi3 - 1/phi2, 1/phi3 - 1/phi1)`` after the distinctness guard."""
    phi1, phi2, phi3 = p.phi1, p.phi2, p.phi3
    if abs(phi2 - phi1) <= G_DISTINCT_REL * phi2:
        raise DegenerateParameters(f"phi1={phi1} and phi2={phi2} coincide")
    for name, other in (("phi1", phi1), ("phi2", phi2)):
        if abs(phi3 - other) <= G_DISTINCT_REL * max(phi3, other):
            raise DegenerateParameters(
                f"phi3={phi3} coincides with {name}={other}; perturb phi3 (see perturb_distinct)")
    return 1.0 / phi3 - 1.0 / phi2, 1.0 / phi3 - 1.0 / phi1


def g_func_scaled(x, p, shift=0.0):
    """``exp(shift) * g(x)``; see :func:`g_func`."""
    c2, c1 = g_rates(p)
    x = np.asarray(x, dtype=float)
    return expint_ei_scaled(c2 * x, shift) - expint_ei_scaled(c1 * x, shift)


def g_func(x, p):
    """``Ei((1/phi3 - 1/phi2) x) - Ei((1/phi3 - 1/phi1) x)`` for a partial profile."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("g(x) requires x > 0")
    return _scalar_out(g_func_scaled(x, p), scalar)
