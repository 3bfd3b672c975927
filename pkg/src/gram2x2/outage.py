"""Outage data rate of a two-user ZF uplink with distributed receive antennas."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import PartialProfile, VarianceProfile, classify
from .dist import a_factor, inv_cdf_min, perturb_distinct
from .mc import SampleConfig, sample_channels, zf_gains_batch

TABLE1_PHI3 = (0.01, 0.5, 1.0, 1.2, 1.4, 1.6, 1.8, 1.95)
ASYM_PHI1 = 0.01
CI_Z = 3.2905  # two-sided 99.9% normal quantile

# SNR_i = rho / [W^-1]_ii with W = H H^dagger.  This is the form that
# reproduces the published fractional-loss table; "hh" gives H^dagger H.
ZF_FORM = "w"


@dataclass(frozen=True)
class OutageConfig:
    rho: float
    eps: float
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be > 0")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if int(self.samples) < 1:
            raise ValueError("samples must be >= 1")


@dataclass(frozen=True)
class RatePoint:
    eps: float
    snr_db: float
    r_emp: float
    r_check: Optional[float] = None
    r_tilde: Optional[float] = None


def db_to_linear(snr_db):
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def zf_min_gain_samples(p: VarianceProfile, c: SampleConfig, key=(), form=ZF_FORM) -> np.ndarray:
    """Samples of ``SNR_min / rho``; singular draws give 0 (always in outage)."""
    return zf_gains_batch(sample_channels(p, c, key), form).min(axis=1)


def outage_prob_empirical(p: VarianceProfile, rho: float, r_target: float,
                          c: SampleConfig, key=()) -> float:
    """Fraction of channels with ``log2(1 + SNR_min) <= r_target``."""
    if r_target < 0:
        raise ValueError("r_target must be >= 0")
    snr = rho * zf_min_gain_samples(p, c, key)
    return float(np.mean(np.log2(1.0 + snr) <= r_target))


def quantile_rank(eps, n):
    """1-based rank ``ceil(eps * n)`` of the lower empirical quantile."""
    # shave one ulp-scale so eps*n == 1000.0000000000001 still ranks 1000
    return min(max(math.ceil(eps * n * (1.0 - 1e-12)), 1), n)


def empirical_quantile(values, eps):
    v = np.sort(np.asarray(values, dtype=float))
    return float(v[quantile_rank(eps, v.size) - 1])


def quantile_ci_halfwidth(sorted_values, eps, z=CI_Z):
    """Distribution-free order-statistic CI half-width of the ``eps`` quantile."""
    n = sorted_values.size
    k = quantile_rank(eps, n) - 1
    d = int(math.ceil(z * math.sqrt(n * eps * (1.0 - eps))))
    lo = sorted_values[max(k - d, 0)]
    hi = sorted_values[min(k + d, n - 1)]
    q = sorted_values[k]
    return float(max(q - lo, hi - q))


def rate_from_quantile(rho, q):
    return float(np.log2(1.0 + rho * q))


def outage_rate_empirical(p: VarianceProfile, o: OutageConfig, key=()) -> float:
    """Largest rate with empirical outage probability below ``eps``.

    Realized as ``log2(1 + q)`` with ``q`` the order statistic of rank
    ``ceil(eps n)`` of the sampled ``SNR_min``.
    """
    gains = zf_min_gain_samples(p, SampleConfig(o.samples, o.seed), key)
    return rate_from_quantile(o.rho, empirical_quantile(gains, o.eps))


def outage_rate_lower_bound(pp: PartialProfile, rho: float, eps: float) -> float:
    """``log2(1 + rho F^-1(eps))`` with ``F`` the smallest-eigenvalue CDF."""
    if eps <= 0.0:
        return 0.0
    return rate_from_quantile(rho, inv_cdf_min(pp, eps))


def outage_rate_approx_bound(pp: PartialProfile, rho: float, eps: float) -> float:
    """``log2(1 + rho eps / a)``, the small-outage linearization."""
    return rate_from_quantile(rho, eps / a_factor(pp))


def table1_profiles(phi3):
    """Symmetric and maximally asymmetric profiles with total gain 4."""
    if not 0.0 < phi3 < 2.0:
        raise ValueError("phi3 must lie in (0, 2)")
    sym = VarianceProfile(2.0 - phi3, 2.0 - phi3, phi3, phi3)
    asym = VarianceProfile(ASYM_PHI1, 4.0 - 2.0 * phi3 - ASYM_PHI1, phi3, phi3)
    return sym, asym


def fractional_loss(phi3: float, o: OutageConfig, mode: str = "analytic", key=()) -> float:
    """Relative outage-rate loss of the asymmetric profile against the symmetric one."""
    sym, asym = table1_profiles(phi3)
    if mode == "analytic":
        r_sym = outage_rate_approx_bound(PartialProfile(sym.phi11, sym.phi12, phi3), o.rho, o.eps)
        r_asym = outage_rate_approx_bound(
            PartialProfile.from_unordered(asym.phi11, asym.phi12, phi3), o.rho, o.eps)
    elif mode == "empirical":
        r_sym = outage_rate_empirical(sym, o, key=(*key, 0))
        r_asym = outage_rate_empirical(asym, o, key=(*key, 1))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return (r_sym - r_asym) / r_sym


def table1(snr_db=30.0, eps=0.01, samples=100_000, seed=0, phi3_values=TABLE1_PHI3):
    """Rows ``(phi3, fl_emp, fl_tilde)``; row ``r`` samples under key ``(r, *)``."""
    o = OutageConfig(float(db_to_linear(snr_db)), eps, samples, seed)
    rows = []
    for r, phi3 in enumerate(phi3_values):
        rows.append((phi3, fractional_loss(phi3, o, "empirical", key=(r,)),
                     fractional_loss(phi3, o, "analytic")))
    return rows


def _analytic_partial(p):
    cls = classify(p)
    return perturb_distinct(cls.partial) if cls.is_partial else None


def fig1_sweep(p: VarianceProfile, eps_list, snr_db_grid, c: SampleConfig):
    """Empirical and analytic outage rates over an ``(eps, SNR)`` grid.

    One sample set per ``eps`` (key ``(i,)``) serves every SNR, since the
    quantile of ``SNR_min / rho`` does not depend on ``rho``.  The analytic
    columns are ``None`` unless the profile has exactly one flat row.
    """
    pp = _analytic_partial(p)
    points = []
    for i, eps in enumerate(eps_list):
        gains = np.sort(zf_min_gain_samples(p, c, key=(i,)))
        q = empirical_quantile(gains, eps)
        x_star = inv_cdf_min(pp, eps) if pp is not None else None
        for snr_db in snr_db_grid:
            rho = float(db_to_linear(snr_db))
            r_check = rate_from_quantile(rho, x_star) if pp is not None else None
            r_tilde = outage_rate_approx_bound(pp, rho, eps) if pp is not None else None
            points.append(RatePoint(float(eps), float(snr_db), rate_from_quantile(rho, q),
                                    r_check, r_tilde))
    return points


def fig1_ci_slack(p: VarianceProfile, eps, rho, c: SampleConfig, key=()):
    """``log2(1 + rho dq)`` for the 99.9% CI half-width ``dq`` of the quantile."""
    gains = np.sort(zf_min_gain_samples(p, c, key))
    return rate_from_quantile(rho, quantile_ci_halfwidth(gains, eps))

