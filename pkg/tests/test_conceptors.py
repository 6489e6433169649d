import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cwm.conceptors import (
    Conceptor,
    and_,
    and_beta,
    aperture_adapt,
    conceptor_from_states,
    correlation,
    distance,
    is_conceptor,
    lincomb,
    negate,
    or_,
    or_beta,
    or_many,
    spectrum,
)

from conftest import random_conceptor_matrix


def rel(A, B):
    return np.linalg.norm(A - B) / max(np.linalg.norm(B), 1e-300)


def rand_c(rng, n=6, **kw):
    M = random_conceptor_matrix(rng, n, **kw)
    return Conceptor(0.5 * (M + M.T))


# construction

def test_identity_correlation_gives_ten_elevenths():
    X = np.eye(4)
    C = conceptor_from_states(X, 10.0)
    np.testing.assert_allclose(C.matrix, np.eye(4) * 10 / 11, atol=1e-15)
    assert C.source_len == 4


def test_zero_states_give_zero_conceptor():
    C = conceptor_from_states(np.zeros((5, 3)))
    assert np.all(C.matrix == 0.0)


def test_spectrum_law_against_eigensolver(rng):
    X = rng.standard_normal((5, 20))
    s = np.sort(np.linalg.eigvalsh(X @ X.T))[::-1]
    C = conceptor_from_states(X, 10.0)
    np.testing.assert_allclose(spectrum(C), s / (s + 0.1), atol=1e-12)


def test_normalized_correlation_option(rng):
    X = rng.standard_normal((4, 8))
    np.testing.assert_allclose(correlation(X, normalize=True), X @ X.T / 8)
    C = conceptor_from_states(X, 10.0, normalize_r=True)
    s = np.sort(np.linalg.eigvalsh(X @ X.T / 8))[::-1]
    np.testing.assert_allclose(spectrum(C), s / (s + 0.1), atol=1e-12)


def test_construction_rejects_bad_input():
    with pytest.raises(ValueError):
        conceptor_from_states(np.ones((3, 2)), aperture=0.0)
    with pytest.raises(ValueError):
        conceptor_from_states(np.ones((3, 0)))


def test_monotone_in_aperture(rng):
    X = rng.standard_normal((6, 10))
    lo = conceptor_from_states(X, 2.0).matrix
    hi = conceptor_from_states(X, 20.0).matrix
    assert np.linalg.eigvalsh(hi - lo).min() > -1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(1, 30), st.floats(0.01, 1000.0), st.integers(0, 2**31))
def test_constructed_conceptors_are_valid(n, L, a, seed):
    X = np.random.default_rng(seed).standard_normal((n, L))
    C = conceptor_from_states(X, a)
    assert np.array_equal(C.matrix, C.matrix.T)
    assert is_conceptor(C)


# aperture adaptation

def test_phi_identity_is_exact(rng):
    C = rand_c(rng)
    assert np.array_equal(aperture_adapt(C, 1.0).matrix, C.matrix)


def test_phi_scalar_case():
    C = Conceptor(np.array([[10 / 11]]), aperture=10.0, tag=0.3)
    out = aperture_adapt(C, np.sqrt(10.0))
    assert out.matrix[0, 0] == pytest.approx(100 / 101, rel=1e-12)
    assert out.tag == 0.3
    assert out.aperture == pytest.approx(100.0)


def test_phi_matches_rebuilding_with_scaled_aperture(rng):
    X = rng.standard_normal((5, 12))
    C = conceptor_from_states(X, 10.0)
    np.testing.assert_allclose(aperture_adapt(C, 3.0).matrix, conceptor_from_states(X, 90.0).matrix,
                               atol=1e-10)


def test_phi_composition_and_commutation(rng):
    C = rand_c(rng, 8)
    a = aperture_adapt(aperture_adapt(C, 0.7), 2.5).matrix
    b = aperture_adapt(C, 1.75).matrix
    assert rel(a, b) < 1e-8
    P = aperture_adapt(C, 3.0).matrix
    assert np.linalg.norm(P @ C.matrix - C.matrix @ P) < 1e-8


def test_phi_rejects_nonpositive_gamma(rng):
    with pytest.raises(ValueError):
        aperture_adapt(rand_c(rng), 0.0)


# boolean operations

def test_double_negation_is_exact(rng):
    C = rand_c(rng)
    assert negate(negate(C)) is C
    assert np.array_equal((~~C).matrix, C.matrix)
    np.testing.assert_array_equal(negate(C).matrix, np.eye(6) - C.matrix)


def test_negation_of_raw_matrix():
    M = np.diag([0.2, 0.7])
    np.testing.assert_allclose(negate(M).matrix, np.diag([0.8, 0.3]))


def test_scalar_and_or_values():
    C = Conceptor(np.array([[0.5]]))
    assert and_(C, C).matrix[0, 0] == pytest.approx(1 / 3, rel=1e-12)
    assert or_(C, C).matrix[0, 0] == pytest.approx(2 / 3, rel=1e-12)


def test_de_morgan(rng):
    C, B = rand_c(rng, 7), rand_c(rng, 7)
    assert rel((C & B).matrix, (~(~C | ~B)).matrix) < 1e-8
    assert rel((C | B).matrix, (~(~C & ~B)).matrix) < 1e-8


def test_or_many_folds(rng):
    Cs = [rand_c(rng, 5) for _ in range(3)]
    np.testing.assert_allclose(or_many(Cs).matrix, or_(or_(Cs[0], Cs[1]), Cs[2]).matrix, atol=1e-12)
    with pytest.raises(ValueError):
        or_many([])


def test_shape_mismatch_raises(rng):
    with pytest.raises(ValueError):
        and_(rand_c(rng, 3), rand_c(rng, 4))


def test_beta_variants_are_idempotent(rng):
    C = rand_c(rng, 6)
    for beta in (0.0, 0.3, 0.5, 1.0):
        assert rel(or_beta(C, C, beta).matrix, C.matrix) < 1e-8
        assert rel(and_beta(C, C, beta).matrix, C.matrix) < 1e-8


def test_beta_endpoints(rng):
    C, B = rand_c(rng), rand_c(rng)
    assert np.array_equal(or_beta(C, B, 0.0).matrix, B.matrix)
    assert np.array_equal(or_beta(C, B, 1.0).matrix, C.matrix)
    with pytest.raises(ValueError):
        or_beta(C, B, 1.5)


def test_or_relates_to_half_weighted_or_by_sqrt2(rng):
    # With phi as defined, doubling the summed odds is an aperture factor of sqrt(2).
    C, B = rand_c(rng, 6), rand_c(rng, 6)
    lhs = (C | B).matrix
    assert rel(aperture_adapt(or_beta(C, B, 0.5), np.sqrt(2.0)).matrix, lhs) < 1e-8
    assert rel(aperture_adapt(or_beta(C, B, 0.5), 2.0).matrix, lhs) > 1e-3


def test_clamping_keeps_singular_inputs_finite():
    Z = Conceptor(np.zeros((3, 3)))
    I = Conceptor(np.eye(3))
    assert np.all(np.isfinite((Z & I).matrix))
    assert np.all(np.isfinite((Z | I).matrix))


# linear combination, distance, spectrum

def test_lincomb_endpoints_and_flag(rng):
    C1, C2 = rand_c(rng), rand_c(rng)
    assert np.array_equal(lincomb(C1, C2, 1.0).matrix, C1.matrix)
    assert np.array_equal(lincomb(C1, C2, 0.0).matrix, C2.matrix)
    np.testing.assert_allclose(lincomb(C1, C1, 0.5).matrix, C1.matrix, atol=1e-15)
    out = lincomb(C1, C2, 2.0)
    w = np.linalg.eigvalsh(out.matrix)
    assert out.valid == bool(w[0] >= -1e-10 and w[-1] < 1 + 1e-10)
    big = lincomb(Conceptor(np.eye(2) * 0.9), Conceptor(np.eye(2) * 0.1), 2.0)
    assert not big.valid


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_lincomb_convex_stays_in_cone(lam, seed):
    rng = np.random.default_rng(seed)
    out = lincomb(rand_c(rng, 5), rand_c(rng, 5), lam)
    assert out.valid and np.array_equal(out.matrix, out.matrix.T)


def test_distance_examples(rng):
    A = np.diag([0.5, 0.5])
    B = np.diag([0.5, 0.7])
    assert distance(A, B) == pytest.approx(0.2)
    C = rand_c(rng)
    assert distance(C, C) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_distance_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    A, B, C = (rand_c(rng, 4) for _ in range(3))
    assert distance(A, B) == distance(B, A) >= 0.0
    assert distance(A, C) <= distance(A, B) + distance(B, C) + 1e-12


def test_spectrum_examples():
    np.testing.assert_allclose(spectrum(np.eye(3) * 10 / 11), [10 / 11] * 3)
    assert np.all(spectrum(np.zeros((3, 3))) == 0.0)


def test_spectrum_matches_characteristic_polynomial(rng):
    C = random_conceptor_matrix(rng, 3)
    # det(tI - C) = t^3 - tr t^2 + m2 t - det
    tr = np.trace(C)
    m2 = 0.5 * (tr ** 2 - np.trace(C @ C))
    roots = np.sort(np.roots([1.0, -tr, m2, -np.linalg.det(C)]).real)[::-1]
    np.testing.assert_allclose(spectrum(C), roots, atol=1e-9)


def test_is_conceptor_rejects():
    assert not is_conceptor(np.array([[0.5, 0.1], [0.0, 0.5]]))
    assert not is_conceptor(np.eye(2) * 1.5)
    assert not is_conceptor(np.eye(2) * -0.1)
