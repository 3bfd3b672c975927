"""Seeded Monte Carlo sampling of channels, Gram eigenvalues and ZF SNRs.

Sampling is split into fixed-size blocks.  Block ``b`` of a draw keyed by
``key`` uses a Philox generator seeded from ``SeedSequence(seed,
spawn_key=(*key, b))``, so the output depends only on ``(seed, key, n)``:
the number of worker threads changes the schedule, never the samples.
Normals come from numpy's ``Generator.standard_normal``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ChannelMatrix, VarianceProfile
from .errors import EmptySample, SingularChannel

BLOCK_SIZE = 1 << 16
SINGULAR_DET = 1e-300
THREADS_ENV = "GRAM2X2_THREADS"


@dataclass(frozen=True)
class SampleConfig:
    n: int
    seed: int = 0
    streams: int = 1

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError("n must be >= 1")
        if int(self.streams) < 1:
            raise ValueError("streams must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def derive_rng(seed, *key):
    """Independent Philox generator for ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def max_threads():
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    return os.cpu_count() or 1


def _sqrt_half_phi(p):
    return np.sqrt(np.array(p.phi, dtype=float) / 2.0)


def sample_channel(p: VarianceProfile, rng: np.random.Generator) -> ChannelMatrix:
    g = rng.standard_normal((2, 2, 2))
    h = _sqrt_half_phi(p) * (g[0] + 1j * g[1])
    return ChannelMatrix.from_array(h)


def sample_channels(p: VarianceProfile, c: SampleConfig, key=()) -> np.ndarray:
    """Draw ``c.n`` channels as a complex ``(n, 2, 2)`` array."""
    scale = _sqrt_half_phi(p)
    n = int(c.n)
    nblocks = -(-n // BLOCK_SIZE)

    def block(b):
        m = min(BLOCK_SIZE, n - b * BLOCK_SIZE)
        g = derive_rng(c.seed, *key, b).standard_normal((2, m, 2, 2))
        return scale * (g[0] + 1j * g[1])

    workers = min(int(c.streams), max_threads(), nblocks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, range(nblocks)))
    else:
        parts = [block(b) for b in range(nblocks)]
    return np.concatenate(parts, axis=0)


def gram_entries(h):
    """``(w1, w2, w3)`` arrays of ``W = H H^dagger`` for a batch of channels."""
    w1 = np.abs(h[:, 0, 0]) ** 2 + np.abs(h[:, 0, 1]) ** 2
    w2 = np.abs(h[:, 1, 0]) ** 2 + np.abs(h[:, 1, 1]) ** 2
    w3 = h[:, 0, 0] * np.conj(h[:, 1, 0]) + h[:, 0, 1] * np.conj(h[:, 1, 1])
    return w1, w2, w3


def eigenvalues_batch(w1, w2, w3):
    """Ordered eigenvalues ``(l1, l2)`` of many 2x2 Hermitian matrices."""
    c = np.abs(w3)
    scale = np.maximum(np.maximum(w1, w2), c)
    with np.errstate(divide="ignore", invalid="ignore"):
        a, b, c = w1 / scale, w2 / scale, c / scale
        t = a + b
        l1 = 0.5 * (t + np.hypot(a - b, 2.0 * c))
        l2 = np.where(scale > 0.0, (a * b - c * c) / l1, 0.0)
    l1 = np.where(scale > 0.0, l1 * scale, 0.0)
    return l1, np.clip(l2 * scale, 0.0, l1)


def sample_eigs(p: VarianceProfile, c: SampleConfig, key=()) -> np.ndarray:
    """``(n, 2)`` array of ordered eigenvalue pairs ``[l1, l2]``."""
    h = sample_channels(p, c, key)
    l1, l2 = eigenvalues_batch(*gram_entries(h))
    return np.column_stack([l1, l2])


@dataclass(frozen=True)
class EmpiricalCdf:
    sorted_values: np.ndarray
    n: int

    def __call__(self, x):
        return ecdf_eval(self, x)


def empirical_cdf(values) -> EmpiricalCdf:
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise EmptySample("empirical CDF needs at least one value")
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    v.setflags(write=False)
    return EmpiricalCdf(v, int(v.size))


def ecdf_eval(ecdf: EmpiricalCdf, x):
    counts = np.searchsorted(ecdf.sorted_values, x, side="right")
    out = counts / ecdf.n
    return float(out) if np.ndim(out) == 0 else out


def ks_distance(ecdf: EmpiricalCdf, cdf) -> float:
    """One-sample KS statistic against a vectorized CDF callable."""
    f = np.asarray(cdf(ecdf.sorted_values), dtype=float)
    i = np.arange(1, ecdf.n + 1)
    return float(max(np.max(i / ecdf.n - f), np.max(f - (i - 1) / ecdf.n)))


def ks_two_sample(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptySample("two-sample KS needs nonempty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_threshold(n):
    """Critical KS distance at roughly the 0.1% level."""
    return 1.95 / np.sqrt(n)


def zf_gains_batch(h, form="hh"):
    """Per-user ZF gains ``1 / [G^-1]_ii``, shape ``(n, 2)``.

    ``form="hh"`` uses ``G = H^dagger H`` (users are the columns of ``H``);
    ``form="w"`` uses ``G = W = H H^dagger``.  Both share the eigenvalues of
    ``W``, so both gains dominate ``lambda_min``.  Singular channels
    (``det <= 1e-300``) get gain 0.
    """
    if form == "hh":
        g11 = np.abs(h[:, 0, 0]) ** 2 + np.abs(h[:, 1, 0]) ** 2
        g22 = np.abs(h[:, 0, 1]) ** 2 + np.abs(h[:, 1, 1]) ** 2
    elif form == "w":
        g11 = np.abs(h[:, 0, 0]) ** 2 + np.abs(h[:, 0, 1]) ** 2
        g22 = np.abs(h[:, 1, 0]) ** 2 + np.abs(h[:, 1, 1]) ** 2
    else:
        raise ValueError(f"unknown form {form!r}")
    det = np.abs(h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] * h[:, 1, 0]) ** 2
    ok = det > SINGULAR_DET
    with np.errstate(divide="ignore", invalid="ignore"):
        gains = np.column_stack([np.where(ok, det / g22, 0.0), np.where(ok, det / g11, 0.0)])
    return gains


def zf_snr(h: ChannelMatrix, rho: float, form: str = "hh"):
    """Post-processing SNRs ``rho / [G^-1]_ii`` of a ZF receiver.

    ``G`` is ``H^dagger H`` by default; see :func:`zf_gains_batch` for ``form``.
    """
    if not rho > 0:
        raise ValueError("rho must be > 0")
    if form == "hh":
        g11 = abs(h.h11) ** 2 + abs(h.h21) ** 2
        g22 = abs(h.h12) ** 2 + abs(h.h22) ** 2
    elif form == "w":
        g11 = abs(h.h11) ** 2 + abs(h.h12) ** 2
        g22 = abs(h.h21) ** 2 + abs(h.h22) ** 2
    else:
        raise ValueError(f"unknown form {form!r}")
    det = abs(h.det()) ** 2
    if det <= SINGULAR_DET:
        raise SingularChannel(f"ZF Gram matrix is singular (det={det:.3e})")
    return rho * det / g22, rho * det / g11
