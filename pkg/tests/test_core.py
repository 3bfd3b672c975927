import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gram2x2.core import (
    ChannelMatrix,
    GramMatrix2,
    PartialProfile,
    VarianceProfile,
    classify,
    eigenvalues,
    gram_from_channel,
    profile_from_distances,
    profile_new,
    profile_normalize_total,
    profile_transpose,
)
from gram2x2.errors import NonPositiveVariance, NotPSD

variances = st.floats(1e-3, 1e3)
profiles = st.builds(VarianceProfile, variances, variances, variances, variances)
complexes = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)
channels = st.builds(ChannelMatrix, complexes, complexes, complexes, complexes)


def test_profile_new_identity():
    p = profile_new(1, 1, 1, 1)
    assert p.k_const == 1.0
    assert p.s == (2.0, 2.0)
    assert p.eps == (0.0, 0.0)


def test_profile_new_substitution():
    p = profile_new(1, 2, 1, 1)
    assert p.k_const == 0.5
    assert p.s == (1.5, 2.0)
    assert p.eps == (0.5, 0.0)


def test_profile_new_fig1_profile():
    p = profile_new(0.01, 0.99, 1.5, 1.5)
    assert p.k_const == pytest.approx(1.0 / (0.01 * 0.99 * 2.25), rel=1e-15)
    assert p.eps[1] == 0.0


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_profile_rejects_nonpositive(bad):
    with pytest.raises(NonPositiveVariance):
        profile_new(1.0, bad, 1.0, 1.0)


@given(profiles)
def test_profile_invariants(p):
    for s, e in zip(p.s, p.eps):
        assert s > abs(e) >= 0
    assert p.k_const > 0


def test_profile_from_distances():
    assert profile_from_distances([[1, 1], [1, 1]], 2).as_tuple() == (1, 1, 1, 1)
    p = profile_from_distances([[1, 1], [2, 2]], 2)
    assert p.as_tuple() == (1, 1, 0.25, 0.25)
    assert p.eps[0] == 0.0
    p = profile_from_distances([[1, 4], [2, 2]], 3)
    assert p.as_tuple() == (1.0, 0.015625, 0.125, 0.125)
    with pytest.raises(NonPositiveVariance):
        profile_from_distances([[0, 1], [1, 1]], 2)


def test_profile_transpose():
    assert profile_transpose(profile_new(1, 2, 3, 4)).as_tuple() == (1, 3, 2, 4)
    p = profile_new(1, 2, 2, 5)
    assert profile_transpose(p) == p


def test_profile_normalize_total():
    assert profile_normalize_total(profile_new(1, 1, 1, 1), 4).as_tuple() == (1, 1, 1, 1)
    assert profile_normalize_total(profile_new(2, 2, 2, 2), 4).as_tuple() == (1, 1, 1, 1)
    p = profile_normalize_total(profile_new(0.01, 0.99, 1.5, 1.5), 4)
    np.testing.assert_allclose(p.as_tuple(), (0.01, 0.99, 1.5, 1.5), rtol=1e-15)


@given(profiles, st.floats(0.1, 100))
def test_normalize_preserves_ratios(p, total):
    q = profile_normalize_total(p, total)
    assert q.total == pytest.approx(total, rel=1e-14)
    for a, b in zip(p.as_tuple(), q.as_tuple()):
        assert b / q.phi11 == pytest.approx(a / p.phi11, rel=1e-14)


def test_classify_examples():
    assert classify(profile_new(1, 1, 1, 1)).kind == "symmetric"
    cls = classify(profile_new(0.01, 0.99, 1.5, 1.5))
    assert cls.kind == "partial"
    assert cls.partial == PartialProfile(0.01, 0.99, 1.5)
    assert cls.flat_row == 2
    assert classify(profile_new(1, 2, 3, 4)).kind == "general"


def test_classify_flat_first_row_is_moved_to_row_two():
    cls = classify(profile_new(1.5, 1.5, 0.99, 0.01))
    assert cls.partial == PartialProfile(0.01, 0.99, 1.5)
    assert cls.flat_row == 1


def test_classify_flat_column():
    cls = classify(profile_new(0.5, 1.0, 1.5, 1.0))
    assert cls.kind == "partial"
    assert cls.transposed
    assert cls.partial == PartialProfile(0.5, 1.5, 1.0)


def test_classify_tolerance_band():
    assert classify(profile_new(1.0, 1.0 + 1e-14, 2.0, 2.0)).kind == "symmetric"
    assert classify(profile_new(1.0, 1.0 + 1e-6, 2.0, 2.0)).kind == "partial"


@given(profiles)
def test_classify_transpose_invariant(p):
    assert classify(profile_transpose(p)).kind == classify(p).kind


def test_gram_from_channel_examples():
    w = gram_from_channel(ChannelMatrix(1, 0, 0, 1))
    assert (w.w1, w.w2, w.w3) == (1.0, 1.0, 0j)
    w = gram_from_channel(ChannelMatrix(1, 1, 1, 1))
    assert (w.w1, w.w2, w.w3) == (2.0, 2.0, 2 + 0j)
    assert w.det == 0.0


@settings(max_examples=300)
@given(channels)
def test_gram_det_identity(h):
    w = gram_from_channel(h)
    det_h = abs(h.det()) ** 2
    scale = max(w.w1 * w.w2, 1e-300)
    assert abs(w.det - det_h) <= 1e-10 * scale


def test_eigenvalues_examples():
    assert eigenvalues(GramMatrix2(1, 1, 0)) == (1.0, 1.0)
    assert eigenvalues(GramMatrix2(3, 1, 0)) == (3.0, 1.0)
    assert eigenvalues(GramMatrix2(1, 3, 0)) == (3.0, 1.0)
    l1, l2 = eigenvalues(GramMatrix2(2, 2, 2))
    assert l1 == 4.0 and l2 == 0.0


def test_eigenvalues_clamp_and_reject():
    # rank-one W from a channel rounds slightly negative at most
    h = ChannelMatrix(0.3 + 0.1j, 0.7, 0.6 + 0.2j, 1.4)
    l1, l2 = eigenvalues(gram_from_channel(h))
    assert l2 >= 0.0
    with pytest.raises(NotPSD):
        GramMatrix2(1.0, 1.0, 2.0)


@settings(max_examples=300)
@given(channels)
def test_eigenvalue_sum_and_product(h):
    w = gram_from_channel(h)
    l1, l2 = eigenvalues(w)
    assert l1 >= l2 >= 0.0
    t = w.w1 + w.w2
    assert l1 + l2 == pytest.approx(t, rel=1e-12, abs=1e-300)
    # product is limited by the conditioning of det itself
    assert abs(l1 * l2 - w.det) <= 1e-12 * max(w.w1 * w.w2, 1e-300) + 1e-300


def test_eigenvalues_against_numpy():
    rng = np.random.default_rng(3)
    for _ in range(100):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        w = gram_from_channel(ChannelMatrix.from_array(a))
        ref = np.linalg.eigvalsh(a @ a.conj().T)[::-1]
        np.testing.assert_allclose(eigenvalues(w), ref, rtol=1e-12, atol=1e-14)


def test_channel_rejects_nonfinite():
    with pytest.raises(ValueError):
        ChannelMatrix(cmath.inf, 0, 0, 1)


@pytest.mark.parametrize("scale", [1e-200, 1e-150, 1.0, 1e150, 1e200])
def test_eigenvalues_scale_extremes(scale):
    """Entries whose products under- or overflow still give exact eigenvalues."""
    w = GramMatrix2(2.0 * scale, 2.0 * scale, 0)
    assert eigenvalues(w) == (2.0 * scale, 2.0 * scale)
    l1, l2 = eigenvalues(GramMatrix2(1.0 * scale, 3.0 * scale, 1.0 * scale))
    assert l1 == pytest.approx((2 + math.sqrt(2)) * scale, rel=1e-15)
    assert l2 == pytest.approx((2 - math.sqrt(2)) * scale, rel=1e-15)
    from gram2x2.mc import eigenvalues_batch

    b1, b2 = eigenvalues_batch(np.array([2.0 * scale]), np.array([2.0 * scale]), np.array([0j]))
    assert (b1[0], b2[0]) == (2.0 * scale, 2.0 * scale)
