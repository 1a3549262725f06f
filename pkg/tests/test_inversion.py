import numpy as np
import pytest

import phasesort.inversion as inversion
from phasesort import (
    AmbiguityDetected,
    DimensionError,
    Key,
    NotInRange,
    NotPhaseRetrievable,
    alpha,
    beta,
    beta_tilde,
    dist_hat_H,
    dist_hat_V,
    generate_key,
    invert_beta,
    invert_beta_tilde,
    omega,
)

from conftest import A_REF, brute_force_magnitude_recovery


def test_omega_reference_measurements(a_ref_key):
    rec = omega(a_ref_key, [1.0, 2.0, 3.0])
    np.testing.assert_allclose(rec.x, [1.0, 2.0], atol=1e-12)
    assert rec.residual <= 1e-12
    oracle = brute_force_magnitude_recovery(A_REF, np.array([1.0, 2.0, 3.0]))
    assert dist_hat_H(rec.x, oracle) <= 1e-9


def test_omega_zero(a_ref_key):
    rec = omega(a_ref_key, np.zeros(3))
    np.testing.assert_array_equal(rec.x, [0.0, 0.0])
    assert rec.residual == 0.0
    assert rec.pivot_columns == ()


def test_omega_matches_bruteforce_on_random_keys():
    rng = np.random.Generator(np.random.PCG64(51))
    for seed in range(20):
        key = generate_key(3, 5, 700 + seed)
        x = rng.standard_normal(3)
        y = alpha(key, x)
        rec = omega(key, y)
        oracle = brute_force_magnitude_recovery(key.matrix, y)
        assert oracle is not None
        assert dist_hat_H(rec.x, oracle) <= 1e-8 * max(1.0, np.linalg.norm(x))


def test_omega_roundtrip_many():
    rng = np.random.Generator(np.random.PCG64(52))
    for seed in range(100):
        d = 2 + seed % 5
        key = generate_key(d, 2 * d - 1, 900 + seed)
        x = rng.standard_normal(d)
        rec = omega(key, alpha(key, x))
        assert dist_hat_H(rec.x, x) <= 1e-8 * max(1.0, np.linalg.norm(x))


def test_omega_canonical_sign():
    rng = np.random.Generator(np.random.PCG64(53))
    key = generate_key(4, 7, 11)
    for _ in range(50):
        x = rng.standard_normal(4)
        rec = omega(key, alpha(key, x))
        scale = np.abs(rec.x).max()
        lead = np.argmax(np.abs(rec.x) > key.tol.rank_tol_factor * scale)
        assert rec.x[lead] > 0


def test_omega_tolerates_tiny_noise(a_ref_key):
    rng = np.random.Generator(np.random.PCG64(54))
    x = np.array([0.7, -1.3])
    y = alpha(a_ref_key, x)
    eta = rng.standard_normal(3)
    eta *= 1e-10 / np.linalg.norm(eta)
    rec = omega(a_ref_key, np.maximum(y + eta, 0.0))
    assert dist_hat_H(rec.x, x) <= 1e-8


def test_omega_rejects_out_of_range(a_ref_key):
    # (1, 2, 3) is consistent; (1, 2, 0) admits no sign pattern
    with pytest.raises(NotInRange):
        omega(a_ref_key, [1.0, 2.0, 0.0])


def test_omega_rejects_negative_measurements(a_ref_key):
    with pytest.raises(NotInRange):
        omega(a_ref_key, [1.0, -2.0, 3.0])


def test_omega_requires_certificate():
    with pytest.raises(NotPhaseRetrievable):
        omega(Key(np.eye(2)), [1.0, 1.0])


def test_omega_dimension_error(a_ref_key):
    with pytest.raises(DimensionError):
        omega(a_ref_key, [1.0, 2.0])


def test_omega_ambiguity_guard(monkeypatch):
    # force the certificate so the identity key reaches the sign search,
    # where (a, b) and (a, -b) are both consistent but on distinct orbits
    key = Key(np.eye(2))
    fake = type("R", (), {"verdict": True})()
    monkeypatch.setattr(inversion, "is_phase_retrievable", lambda k: fake)
    with pytest.raises(AmbiguityDetected):
        omega(key, [1.0, 2.0])


def test_omega_sign_pattern_consistent(a_ref_key):
    rec = omega(a_ref_key, [1.0, 2.0, 3.0])
    a_piv = A_REF[:, list(rec.pivot_columns)]
    y_piv = np.array([1.0, 2.0, 3.0])[list(rec.pivot_columns)]
    np.testing.assert_allclose(a_piv.T @ rec.x, rec.sign_pattern * y_piv, atol=1e-12)


def test_invert_beta_reference(a_ref_key):
    cfg = np.array([[1.0, 0.0], [-1.0, 0.0]])
    rec = invert_beta(a_ref_key, beta(a_ref_key, cfg).matrix)
    assert dist_hat_V(rec, cfg)[0] <= 1e-12


def test_invert_beta_zero(a_ref_key):
    np.testing.assert_array_equal(invert_beta(a_ref_key, np.zeros((2, 3))), np.zeros((2, 2)))


def test_invert_beta_roundtrip_many():
    rng = np.random.Generator(np.random.PCG64(55))
    for seed in range(100):
        d = 2 + seed % 4
        key = generate_key(d, 2 * d, 1500 + seed)
        cfg = rng.standard_normal((2, d))
        rec = invert_beta(key, beta(key, cfg).matrix)
        assert dist_hat_V(rec, cfg)[0] <= 1e-8 * max(1.0, np.linalg.norm(cfg))


def test_invert_beta_rejects_unsorted(a_ref_key):
    with pytest.raises(NotInRange):
        invert_beta(a_ref_key, np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))


def test_invert_beta_rejects_corruption(a_ref_key):
    cfg = np.array([[0.3, 1.1], [-0.4, 0.2]])
    emb = beta(a_ref_key, cfg).matrix.copy()
    emb[0, 0] += 0.5
    with pytest.raises(NotInRange):
        invert_beta(a_ref_key, emb)


def test_invert_beta_shape_check(a_ref_key):
    with pytest.raises(DimensionError):
        invert_beta(a_ref_key, np.zeros((2, 4)))


def test_invert_beta_tilde_reference(a_ref_key):
    cfg = np.array([[1.0, 0.0], [-1.0, 0.0]])
    rec = invert_beta_tilde(a_ref_key, beta_tilde(a_ref_key, cfg))
    assert dist_hat_V(rec, cfg)[0] <= 1e-12


def test_invert_beta_tilde_zero_difference(a_ref_key):
    rec = invert_beta_tilde(a_ref_key, np.array([2.5, -1.0, 0.0, 0.0, 0.0]))
    np.testing.assert_allclose(rec, [[2.5, -1.0], [2.5, -1.0]], atol=1e-12)


def test_invert_beta_tilde_roundtrip_many():
    rng = np.random.Generator(np.random.PCG64(56))
    for seed in range(100):
        d = 2 + seed % 4
        key = generate_key(d, 2 * d - 1, 2500 + seed)
        cfg = rng.standard_normal((2, d))
        rec = invert_beta_tilde(key, beta_tilde(key, cfg))
        assert dist_hat_V(rec, cfg)[0] <= 1e-8 * max(1.0, np.linalg.norm(cfg))


def test_invert_beta_tilde_length_check(a_ref_key):
    with pytest.raises(DimensionError):
        invert_beta_tilde(a_ref_key, np.zeros(4))


def test_decoded_orbit_matches_not_rows():
    # the decoder fixes an orbit representative; row order may differ from input
    key = generate_key(3, 6, 4242)
    rng = np.random.Generator(np.random.PCG64(57))
    cfg = rng.standard_normal((2, 3))
    rec = invert_beta(key, beta(key, cfg).matrix)
    d_quot = dist_hat_V(rec, cfg)[0]
    d_plain = np.linalg.norm(rec - cfg)
    assert d_quot <= 1e-8
    assert d_plain == pytest.approx(d_quot, abs=1e-8) or d_plain > d_quot
