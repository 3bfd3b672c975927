"""Variance profiles, channel and Gram matrices, and 2x2 eigenvalues.

A variance profile ``phi`` fixes the law of a 2x2 channel ``H`` with
independent entries ``H[i][j] ~ CN(0, phi[i][j])``.  The Gram matrix
``W = H H^dagger`` is stored through its three free entries ``w1, w2``
(real diagonal) and ``w3`` (complex upper off-diagonal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import NonPositiveVariance, NotPSD

DEFAULT_CLASSIFY_TOL = 1e-12
EIG_CLAMP_REL = 1e-12
PSD_TOL_REL = 1e-12


def _check_positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise NonPositiveVariance(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class VarianceProfile:
    """Per-entry variances of the channel, row-major."""

    phi11: float
    phi12: float
    phi21: float
    phi22: float

    def __post_init__(self):
        for name in ("phi11", "phi12", "phi21", "phi22"):
            object.__setattr__(self, name, _check_positive(name, getattr(self, name)))

    @property
    def phi(self):
        return ((self.phi11, self.phi12), (self.phi21, self.phi22))

    @property
    def k_const(self):
        return 1.0 / (self.phi11 * self.phi12 * self.phi21 * self.phi22)

    @property
    def s(self):
        return (1.0 / self.phi11 + 1.0 / self.phi12, 1.0 / self.phi21 + 1.0 / self.phi22)

    @property
    def eps(self):
        return (1.0 / self.phi11 - 1.0 / self.phi12, 1.0 / self.phi21 - 1.0 / self.phi22)

    @property
    def total(self):
        return self.phi11 + self.phi12 + self.phi21 + self.phi22

    def as_tuple(self):
        return (self.phi11, self.phi12, self.phi21, self.phi22)


@dataclass(frozen=True)
class PartialProfile:
    """Profile with one flat row: ``((phi1, phi2), (phi3, phi3))``, ``phi1 <= phi2``."""

    phi1: float
    phi2: float
    phi3: float

    def __post_init__(self):
        for name in ("phi1", "phi2", "phi3"):
            object.__setattr__(self, name, _check_positive(name, getattr(self, name)))
        if self.phi1 > self.phi2:
            raise ValueError(f"phi1 must not exceed phi2 (got {self.phi1}, {self.phi2})")

    @classmethod
    def from_unordered(cls, a, b, phi3):
        return cls(min(a, b), max(a, b), phi3)

    def to_profile(self):
        return VarianceProfile(self.phi1, self.phi2, self.phi3, self.phi3)

    def as_tuple(self):
        return (self.phi1, self.phi2, self.phi3)


@dataclass(frozen=True)
class ChannelMatrix:
    h11: complex
    h12: complex
    h21: complex
    h22: complex

    def __post_init__(self):
        for name in ("h11", "h12", "h21", "h22"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, a):
        return cls(a[0][0], a[0][1], a[1][0], a[1][1])

    def det(self):
        return self.h11 * self.h22 - self.h12 * self.h21


@dataclass(frozen=True)
class GramMatrix2:
    """Hermitian PSD matrix ``[[w1, w3], [conj(w3), w2]]``."""

    w1: float
    w2: float
    w3: complex = 0j

    def __post_init__(self):
        w1, w2, w3 = float(self.w1), float(self.w2), complex(self.w3)
        if not all(math.isfinite(v) for v in (w1, w2, w3.real, w3.imag)):
            raise NotPSD("Gram matrix entries must be finite")
        if w1 < 0.0 or w2 < 0.0:
            raise NotPSD(f"diagonal entries must be >= 0, got w1={w1}, w2={w2}")
        scale = max(w1, w2, abs(w3))
        if scale > 0.0:
            a, b, c = w1 / scale, w2 / scale, abs(w3) / scale
            # relative test on W / scale, whose largest entry is 1
            if a * b - c * c < -PSD_TOL_REL:
                raise NotPSD(f"not positive semidefinite: det / max entry^2 = {a * b - c * c:.3e}")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "w3", w3)

    @property
    def trace(self):
        return self.w1 + self.w2

    @staticmethod
    def det_of(w1, w2, w3):
        m = abs(w3)
        return w1 * w2 - m * m

    @property
    def det(self):
        return self.det_of(self.w1, self.w2, self.w3)


class EigenPair(NamedTuple):
    """Ordered eigenvalues ``l1 >= l2 >= 0``."""

    l1: float
    l2: float


@dataclass(frozen=True)
class ProfileClass:
    """Result of :func:`classify`.

    ``kind`` is ``"symmetric"``, ``"partial"`` or ``"general"``.  For the
    partial class ``partial`` holds the Corollary-style parameters and
    ``flat_row`` the row (1 or 2) of the original profile that was flat;
    ``transposed`` is set when the flat line was a column.
    """

    kind: str
    partial: Optional[PartialProfile] = None
    flat_row: Optional[int] = None
    transposed: bool = False

    @property
    def is_partial(self):
        return self.kind == "partial"


def profile_new(phi11, phi12, phi21, phi22):
    return VarianceProfile(phi11, phi12, phi21, phi22)


def profile_from_distances(distances, pathloss_exp):
    """Build ``phi[i][j] = D[i][j] ** -pathloss_exp``.

    ``distances[i][j]`` is the distance between transmit antenna ``j`` and
    receive antenna ``i``.
    """
    pathloss_exp = float(pathloss_exp)
    if not math.isfinite(pathloss_exp) or pathloss_exp <= 0.0:
        raise ValueError(f"path-loss exponent must be > 0, got {pathloss_exp!r}")
    phis = []
    for row in distances:
        for d in row:
            d = float(d)
            if not math.isfinite(d) or d <= 0.0:
                raise NonPositiveVariance(f"distance must be finite and > 0, got {d!r}")
            phis.append(d ** -pathloss_exp)
    if len(phis) != 4:
        raise ValueError("distances must be a 2x2 array")
    return VarianceProfile(*phis)


def profile_transpose(p):
    return VarianceProfile(p.phi11, p.phi21, p.phi12, p.phi22)


def profile_normalize_total(p, total=4.0):
    total = float(total)
    if not math.isfinite(total) or total <= 0.0:
        raise ValueError(f"total must be > 0, got {total!r}")
    scale = total / p.total
    return VarianceProfile(*(v * scale for v in p.as_tuple()))


def _flat(a, b, tol):
    # |1/a - 1/b| <= tol * (1/a + 1/b)
    return abs(b - a) <= tol * (a + b)


def classify(p, tol=DEFAULT_CLASSIFY_TOL):
    """Dispatch a profile onto the symmetric, partial or general closed forms.

    Rows and columns are both inspected, since the eigenvalues of ``W`` are
    unchanged by transposing the profile or by swapping its rows.  A partial
    profile is returned in the orientation where the flat row is row 2.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    (a, b), (c, d) = p.phi
    rows = (_flat(a, b, tol), _flat(c, d, tol))
    cols = (_flat(a, c, tol), _flat(b, d, tol))
    if all(rows) or all(cols):
        return ProfileClass("symmetric")
    if rows[1]:
        return ProfileClass("partial", PartialProfile.from_unordered(a, b, d), flat_row=2)
    if rows[0]:
        return ProfileClass("partial", PartialProfile.from_unordered(c, d, a), flat_row=1)
    if cols[1]:
        return ProfileClass("partial", PartialProfile.from_unordered(a, c, d),
                            flat_row=2, transposed=True)
    if cols[0]:
        return ProfileClass("partial", PartialProfile.from_unordered(b, d, a),
                            flat_row=1, transposed=True)
    return ProfileClass("general")


def gram_from_channel(h):
    w1 = abs(h.h11) ** 2 + abs(h.h12) ** 2
    w2 = abs(h.h21) ** 2 + abs(h.h22) ** 2
    w3 = h.h11 * h.h21.conjugate() + h.h12 * h.h22.conjugate()
    return GramMatrix2(w1, w2, w3)


def eigenvalues(w):
    """Closed-form ordered eigenvalues of a 2x2 Hermitian PSD matrix."""
    # work on W / scale so the determinant neither underflows nor overflows
    scale = max(w.w1, w.w2, abs(w.w3))
    if scale == 0.0:
        return EigenPair(0.0, 0.0)
    a, b, c = w.w1 / scale, w.w2 / scale, abs(w.w3) / scale
    t = a + b
    disc = math.hypot(a - b, 2.0 * c)
    l1 = 0.5 * (t + disc)
    # det / l1 avoids the cancellation in (t - disc) / 2
    l2 = (a * b - c * c) / l1
    if l2 < 0.0:
        if l2 < -EIG_CLAMP_REL * t:
            raise NotPSD(f"smallest eigenvalue {l2 * scale:.3e} is negative")
        l2 = 0.0
    return EigenPair(l1 * scale, min(l2, l1) * scale)
