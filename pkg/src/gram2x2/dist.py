"""Analytic distributions of ``W = H H^dagger`` and of its eigenvalues.

General profiles go through the one-dimensional eigenvalue integral,
evaluated by Gauss-Legendre quadrature.  Profiles with one flat row
(:class:`~gram2x2.core.PartialProfile`) additionally have closed forms for
the joint eigenvalue density and the CDFs of both extreme eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .core import PartialProfile, VarianceProfile
from .errors import (
    DegenerateParameters,
    InvalidEigenOrder,
    NoConvergence,
    NotPSD,
    QuadratureNoConvergence,
)
from .specfun import (
    G_DISTINCT_REL,
    exp_scaled_sinhc_sqrt,
    expint_ei_scaled,
    g_func_scaled,
    g_rates,
)

PERTURB_REL = 1e-7
A_FACTOR_LIMIT_REL = 1e-9
INV_CDF_FTOL = 1e-12
INV_CDF_MAXITER = 200

# Tail cut for the normalization quadrature: density ~ poly * exp(-l1/phi_max).
TAIL_SPAN = 50.0


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 64
    refine_max: int = 4
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.nodes < 8:
            raise ValueError("nodes must be >= 8")
        if self.refine_max < 1:
            raise ValueError("refine_max must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")


@lru_cache(maxsize=32)
def _gauss_legendre_01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _as_pair(l1, l2):
    scalar = np.ndim(l1) == 0 and np.ndim(l2) == 0
    l1, l2 = np.broadcast_arrays(np.asarray(l1, dtype=float), np.asarray(l2, dtype=float))
    if np.any(l2 < 0.0) or np.any(l1 < l2) or not np.all(np.isfinite(l1)):
        raise InvalidEigenOrder("eigenvalues must satisfy l1 >= l2 >= 0")
    return l1, l2, scalar


def _check_gram(w):
    det = w.w1 * w.w2 - abs(w.w3) ** 2
    if w.w1 < 0.0 or w.w2 < 0.0 or det < -1e-12 * max(w.w1 * w.w2, 1.0):
        raise NotPSD("W is not positive semidefinite")


# ---------------------------------------------------------------- matrix pdf


def matrix_pdf(p: VarianceProfile, w) -> float:
    """Density of ``W`` at a Hermitian PSD matrix, for any profile.

    ``(K/pi) exp(-(w1 s1 + w2 s2)/2) S(D/4)`` with
    ``D = (w1 e1 - w2 e2)^2 + 4 |w3|^2 e1 e2``; ``D < 0`` is allowed when the
    two row contrasts have opposite signs.
    """
    _check_gram(w)
    (s1, s2), (e1, e2) = p.s, p.eps
    disc = (w.w1 * e1 - w.w2 * e2) ** 2 + 4.0 * abs(w.w3) ** 2 * e1 * e2
    alpha = 0.5 * (w.w1 * s1 + w.w2 * s2)
    return p.k_const / math.pi * exp_scaled_sinhc_sqrt(alpha, 0.25 * disc)


def _partial_constants(pp):
    phi1, phi2, phi3 = pp.phi1, pp.phi2, pp.phi3
    k = 1.0 / (phi1 * phi2 * phi3 * phi3)
    s1 = 1.0 / phi1 + 1.0 / phi2
    e1 = 1.0 / phi1 - 1.0 / phi2
    return k, s1, 2.0 / phi3, e1


def _require_phi12_distinct(pp):
    if pp.phi2 - pp.phi1 <= G_DISTINCT_REL * pp.phi2:
        raise DegenerateParameters(f"phi1={pp.phi1} and phi2={pp.phi2} coincide")


def matrix_pdf_partial(pp: PartialProfile, w) -> float:
    _require_phi12_distinct(pp)
    _check_gram(w)
    k, s1, s2, e1 = _partial_constants(pp)
    alpha = 0.5 * (w.w1 * s1 + w.w2 * s2)
    # sinh(w1 e1/2)/(w1 e1/2) == S((w1 e1/2)^2)
    return k / math.pi * exp_scaled_sinhc_sqrt(alpha, (0.5 * w.w1 * e1) ** 2)


# ------------------------------------------------------- general eigen pdf


def _eig_integral(p, l1, l2, n):
    """``int_0^1 exp(-nu/2) S(eta/4) / 2 da`` with ``a = cos^2(kappa)``.

    The substitution absorbs the ``sin(2 kappa) d kappa`` weight.
    """
    (s1, s2), (e1, e2) = p.s, p.eps
    a, wts = _gauss_legendre_01(n)
    l1e = l1[..., None]
    l2e = l2[..., None]
    b = 1.0 - a
    u = a * l1e + b * l2e
    v = b * l1e + a * l2e
    nu = u * s1 + v * s2
    # |w3|^2 of U diag(l1, l2) U^dagger is a b (l1 - l2)^2
    eta = (u * e1 - v * e2) ** 2 + 4.0 * a * b * (l1e - l2e) ** 2 * e1 * e2
    vals = 0.5 * exp_scaled_sinhc_sqrt(0.5 * nu, 0.25 * eta)
    return vals @ wts


def _eig_pdf_general_array(p, l1, l2, quad, atol=0.0):
    prefactor = 2.0 * p.k_const * (l1 - l2) ** 2
    n = quad.nodes
    prev = prefactor * _eig_integral(p, l1, l2, n)
    for _ in range(quad.refine_max):
        n *= 2
        cur = prefactor * _eig_integral(p, l1, l2, n)
        if np.all(np.abs(cur - prev) <= quad.rel_tol * np.abs(cur) + atol):
            return cur
        older, prev = prev, cur
    raise QuadratureNoConvergence(
        f"eigenvalue quadrature did not reach rel_tol={quad.rel_tol} with {n} nodes",
        older, prev)


def eig_pdf_general(p: VarianceProfile, l1, l2, quad: QuadratureConfig | None = None):
    """Joint density of the ordered eigenvalues for an arbitrary profile.

    Accepts scalars or broadcastable arrays.  Symmetric profiles are handled
    by the continuous ``S(0) = 1`` limit of the integrand.
    """
    quad = quad or QuadratureConfig()
    l1, l2, scalar = _as_pair(l1, l2)
    out = _eig_pdf_general_array(p, l1, l2, quad, atol=1e-300)
    return float(out) if scalar else out


# ------------------------------------------------------- partial closed forms


def perturb_distinct(pp: PartialProfile, rel: float = PERTURB_REL) -> PartialProfile:
    """Nudge coinciding variances apart so the closed forms apply.

    ``phi2`` moves up when it coincides with ``phi1``; ``phi3`` moves up
    (by one or two steps of ``rel``) when it coincides with either.  With
    ``rel = 1e-7`` the CDFs shift by about ``1e-7`` relative, far below any
    Monte Carlo resolution used here.
    """
    phi1, phi2, phi3 = pp.as_tuple()
    guard = 10.0 * G_DISTINCT_REL

    def close(a, b):
        return abs(a - b) <= guard * max(a, b)

    if close(phi1, phi2):
        phi2 = phi1 * (1.0 + rel)
    for _ in range(3):
        if close(phi3, phi1) or close(phi3, phi2):
            phi3 = phi3 * (1.0 + rel)
        else:
            break
    return PartialProfile(phi1, phi2, phi3)


def eig_pdf_partial(pp: PartialProfile, l1, l2):
    """Closed-form joint eigenvalue density on a partial profile.

    ``exp(-(l1+l2)/phi3) (l1-l2) (g(l1)-g(l2)) / ((phi2-phi1) phi3^2)``.
    """
    l1, l2, scalar = _as_pair(l1, l2)
    _require_phi12_distinct(pp)
    c2, c1 = g_rates(pp)
    phi1, phi2, phi3 = pp.as_tuple()
    out = np.zeros(l1.shape)
    m = l1 > l2
    if m.any():
        a, b = l1[m], l2[m]
        shift = -(a + b) / phi3
        pos = b > 0.0
        gb = np.empty_like(b)
        gb[pos] = g_func_scaled(b[pos], pp, shift[pos])
        # g(0+) = ln|c2/c1|
        gb[~pos] = np.exp(shift[~pos]) * math.log(abs(c2 / c1))
        diff = g_func_scaled(a, pp, shift) - gb
        out[m] = (a - b) * diff / ((phi2 - phi1) * phi3 * phi3)
    out = np.maximum(out, 0.0)
    return float(out) if scalar else out


def _xei_scaled(x, y, shift):
    # x * exp(shift) * Ei(y), with the x -> 0 limit 0
    out = np.zeros(np.shape(x))
    m = x > 0.0
    if np.any(m):
        out[m] = x[m] * expint_ei_scaled(y[m], shift[m])
    return out


def _as_x(x):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(np.isnan(x)):
        raise ValueError("x must be >= 0")
    return x, scalar


def cdf_min(pp: PartialProfile, x):
    """``P(lambda_min <= x)`` on a partial profile.

    Needs ``phi1 != phi2`` only: the expression is continuous in ``phi3``.
    """
    _require_phi12_distinct(pp)
    x, scalar = _as_x(x)
    phi1, phi2, phi3 = pp.as_tuple()
    xf = np.minimum(x, 1e300)
    shift = -xf / phi3
    # bracket / (phi2 - phi1) written as 1 + corr so small x keeps its digits
    corr = (phi2 * np.expm1(-xf / phi2) - phi1 * np.expm1(-xf / phi1)) / (phi2 - phi1)
    with np.errstate(under="ignore", over="ignore"):
        ei_part = (_xei_scaled(xf, -xf / phi2, shift) - _xei_scaled(xf, -xf / phi1, shift)) / (phi2 - phi1)
        out = -np.expm1(shift) - np.exp(shift) * corr - ei_part
    out = np.clip(out, 0.0, 1.0)
    out = np.where(x == 0.0, 0.0, out)
    return float(out) if scalar else out


def cdf_max(pp: PartialProfile, x):
    """``P(lambda_max <= x)`` on a partial profile with distinct variances."""
    _require_phi12_distinct(pp)
    phi1, phi2, phi3 = pp.as_tuple()
    c2, c1 = g_rates(pp)
    x, scalar = _as_x(x)
    xf = np.minimum(x, 1e300)
    out = np.zeros(x.shape)
    m = xf > 0.0
    if m.any():
        z = xf[m]
        shift = -z / phi3
        log_term = math.log(abs((phi3 - phi2) / (phi3 - phi1)))
        with np.errstate(under="ignore", over="ignore"):
            first = np.expm1(shift) * (phi2 * np.expm1(-z / phi2) - phi1 * np.expm1(-z / phi1))
            bracket = (-expint_ei_scaled(c2 * z, shift) + expint_ei_scaled(c1 * z, shift)
                       + expint_ei_scaled(-z / phi2, shift) - expint_ei_scaled(-z / phi1, shift)
                       + log_term * np.exp(shift))
            out[m] = (first + z * bracket) / (phi2 - phi1)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if scalar else out


def a_factor(pp: PartialProfile) -> float:
    """Slope of the smallest-eigenvalue CDF at the origin.

    ``1/phi3 + (ln phi2 - ln phi1)/(phi2 - phi1)``, continuous at
    ``phi1 == phi2`` where it tends to ``1/phi3 + 1/phi1``.
    """
    phi1, phi2, phi3 = pp.as_tuple()
    gap = phi2 - phi1
    if gap < A_FACTOR_LIMIT_REL * phi2:
        return 1.0 / phi3 + 1.0 / phi1
    return 1.0 / phi3 + math.log1p(gap / phi1) / gap


def cdf_min_small_x(pp: PartialProfile, x):
    return a_factor(pp) * np.asarray(x, dtype=float) if np.ndim(x) else a_factor(pp) * float(x)


def cdf_max_small_x(pp: PartialProfile, x):
    phi1, phi2, phi3 = pp.as_tuple()
    coef = 1.0 / (12.0 * phi1 * phi2 * phi3 * phi3)
    return coef * np.asarray(x, dtype=float) ** 4 if np.ndim(x) else coef * float(x) ** 4


def inv_cdf_min(pp: PartialProfile, prob: float) -> float:
    """Quantile of the smallest eigenvalue: ``x`` with ``cdf_min(x) = prob``."""
    prob = float(prob)
    if not 0.0 < prob < 1.0:
        raise ValueError("prob must lie in (0, 1)")
    _require_phi12_distinct(pp)
    x_hi = prob / a_factor(pp)
    for _ in range(INV_CDF_MAXITER):
        if cdf_min(pp, x_hi) > prob:
            break
        x_hi *= 2.0
    else:
        raise NoConvergence("could not bracket the quantile")
    try:
        root = brentq(lambda t: cdf_min(pp, t) - prob, 0.0, x_hi,
                      xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=INV_CDF_MAXITER)
    except RuntimeError as exc:
        raise NoConvergence(str(exc)) from exc
    if abs(cdf_min(pp, root) - prob) > INV_CDF_FTOL:
        raise NoConvergence(f"quantile residual above {INV_CDF_FTOL}")
    return root


# ------------------------------------------------------------ normalization


def _graded_nodes(fine, span, per_panel=16):
    """Composite Gauss-Legendre nodes on [0, span], panels doubling from ``fine``."""
    edges = [0.0, fine]
    while edges[-1] < span:
        edges.append(min(2.0 * edges[-1], span))
    x01, w01 = _gauss_legendre_01(per_panel)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs.append(lo + (hi - lo) * x01)
        ws.append((hi - lo) * w01)
    return np.concatenate(xs), np.concatenate(ws)


def integrate_ordered(density, phi_min, phi_max, lo2=0.0, hi1=None, per_panel=16):
    """Integrate ``density(l1, l2)`` over ``{l1 > l2 > lo2}`` (and ``l1 < hi1``).

    Tensor-product composite Gauss-Legendre in ``(l2 - lo2, l1 - l2)``,
    graded toward zero on the scale of the smallest variance.  ``density``
    must accept broadcast arrays.
    """
    span = TAIL_SPAN * phi_max
    fine = phi_min / 8.0
    if hi1 is None:
        t, wt = _graded_nodes(fine, span, per_panel)
        u, wu = _graded_nodes(fine, span, per_panel)
        l2 = lo2 + t[:, None]
        l1 = l2 + u[None, :]
        vals = density(l1, np.broadcast_to(l2, l1.shape))
        return float(wt @ vals @ wu)
    # {hi1 > l1 > l2 > lo2}: l2 in (lo2, hi1), l1 in (l2, hi1)
    width = hi1 - lo2
    if width <= 0.0:
        return 0.0
    t, wt = _graded_nodes(min(fine, width), width, per_panel)
    s01, ws01 = _gauss_legendre_01(4 * per_panel)
    l2 = lo2 + t[:, None]
    l1 = l2 + (hi1 - l2) * s01[None, :]
    vals = density(l1, np.broadcast_to(l2, l1.shape))
    inner = (vals * ws01[None, :]).sum(axis=1) * (hi1 - l2[:, 0])
    return float(wt @ inner)


def eig_pdf_normalization(p: VarianceProfile, quad: QuadratureConfig | None = None) -> float:
    """Total mass of the general eigenvalue density (should be 1)."""
    quad = quad or QuadratureConfig()
    phis = p.as_tuple()

    # densities are O(1/phi_max^2) where the mass sits; ignore convergence far below that
    atol = quad.rel_tol * 1e-3 / max(phis) ** 2

    def density(l1, l2):
        return _eig_pdf_general_array(p, l1, l2, quad, atol=atol)

    return integrate_ordered(density, min(phis), max(phis))
