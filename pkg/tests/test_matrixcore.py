import numpy as np
import pytest
import scipy.linalg

from cwspheres.errors import InvalidInput
from cwspheres.matrixcore import (QuaternionMatrix, RngStream,
                                  as_skew_hermitian, as_unitary, conjugate,
                                  expm_skew, haar_su2, haar_symplectic,
                                  haar_unitary, haar_unitary_batch, qabs,
                                  qconj, qmul, quat_from_su2_matrix,
                                  su2_from_vec, su2_inner,
                                  su2_matrix_from_quat, symplectic_defect,
                                  unitary_phases, vec_from_su2)


def random_skew(n, rng):
    z = rng.ginibre(n)
    return (z - z.conj().T) / 2.0


# ---------------------------------------------------------------- expm_skew

def test_expm_zero_is_identity():
    np.testing.assert_allclose(expm_skew(np.zeros((3, 3)), 1.0), np.eye(3),
                               atol=1e-15)


def test_expm_unit_phases_at_pi_is_minus_identity():
    a = np.diag([1j, -1j])
    np.testing.assert_allclose(expm_skew(a, np.pi), -np.eye(2), atol=1e-14)


def test_expm_diagonal_readoff():
    a = np.diag([0.3j, 0.7j])
    expected = np.diag([np.exp(0.6j), np.exp(1.4j)])
    np.testing.assert_allclose(expm_skew(a, 2.0), expected, atol=1e-14)


def test_expm_output_exactly_unitary():
    rng = RngStream(7)
    for n in (2, 5, 8):
        a = random_skew(n, rng.split(n))
        u = expm_skew(a, 1.7)
        defect = np.max(np.abs(u.conj().T @ u - np.eye(n)))
        assert defect <= 1e-12


def test_expm_against_pade_oracle():
    # independent route: scipy's Pade expm
    rng = RngStream(8)
    for n in (2, 4, 6):
        a = random_skew(n, rng.split(n))
        np.testing.assert_allclose(expm_skew(a, 0.9),
                                   scipy.linalg.expm(0.9 * a), atol=1e-12)


def test_expm_group_law():
    rng = RngStream(9)
    for k in range(10):
        sub = rng.split(k)
        a = random_skew(4, sub)
        s, t = sub.gen.uniform(-3, 3, 2)
        lhs = expm_skew(a, s) @ expm_skew(a, t)
        np.testing.assert_allclose(lhs, expm_skew(a, s + t), atol=1e-10)


def test_expm_rejects_non_skew_and_non_finite():
    with pytest.raises(InvalidInput):
        expm_skew(np.eye(2), 1.0)
    bad = np.array([[0.0, np.inf], [-np.inf, 0.0]])
    with pytest.raises(InvalidInput):
        expm_skew(bad, 1.0)


# ----------------------------------------------------------- unitary_phases

def test_phases_identity():
    np.testing.assert_allclose(unitary_phases(np.eye(4)), np.zeros(4))


def test_phases_diagonal_readoff():
    u = np.diag([np.exp(2.0j), np.exp(-1.0j)])
    np.testing.assert_allclose(unitary_phases(u), [-1.0, 2.0], atol=1e-12)


def test_phases_branch_boundary_goes_to_plus_pi():
    np.testing.assert_allclose(unitary_phases(-np.eye(2)), [np.pi, np.pi])


def test_phases_recover_generator_phases():
    rng = RngStream(10)
    phis = rng.gen.uniform(-3.0, 3.0, 5)
    u = expm_skew(np.diag(1j * phis), 1.0)
    np.testing.assert_allclose(unitary_phases(u), np.sort(phis), atol=1e-9)


def test_phases_reduce_mod_two_pi():
    u = expm_skew(np.diag([4.0j, -7.0j]), 1.0)
    expected = np.sort([4.0 - 2 * np.pi, -7.0 + 2 * np.pi])
    np.testing.assert_allclose(unitary_phases(u), expected, atol=1e-9)


def test_phases_match_eigenvalues():
    u = haar_unitary(6, RngStream(11))
    phases = unitary_phases(u)
    eigs = np.sort_complex(np.linalg.eigvals(u))
    matched = np.sort_complex(np.exp(1j * phases))
    assert np.max(np.abs(matched - eigs)) <= 1e-9


# ------------------------------------------------------------- Haar sampling

def test_haar_unitary_membership_small_dims():
    rng = RngStream(12)
    for n in range(1, 9):
        us = haar_unitary_batch(n, 125, rng.split(n))
        grams = np.swapaxes(us.conj(), 1, 2) @ us
        defect = np.max(np.abs(grams - np.eye(n)[None]))
        assert defect <= 1e-10


def test_haar_unitary_u1_is_unit_phase():
    u = haar_unitary(1, RngStream(13))
    assert abs(abs(u[0, 0]) - 1.0) <= 1e-12


def test_haar_unitary_deterministic_replay():
    a = haar_unitary(3, RngStream(42))
    b = haar_unitary(3, RngStream(42))
    np.testing.assert_array_equal(a, b)


def test_haar_unitary_trace_moment():
    # E |tr U|^2 = 1 over the Haar measure; Monte-Carlo to +-0.05
    us = haar_unitary_batch(4, 10000, RngStream(99))
    moment = np.mean(np.abs(np.einsum("kii->k", us)) ** 2)
    assert abs(moment - 1.0) <= 0.05


def test_haar_symplectic_membership_and_determinism():
    for n in (1, 2, 4, 8):
        q = haar_symplectic(n, RngStream(14).split(n))
        assert symplectic_defect(q) <= 1e-10
    a = haar_symplectic(3, RngStream(15))
    b = haar_symplectic(3, RngStream(15))
    np.testing.assert_array_equal(a.q1, b.q1)
    np.testing.assert_array_equal(a.q2, b.q2)


def test_haar_symplectic_sp1_is_unit_quaternion():
    q = haar_symplectic(1, RngStream(16))
    assert abs(float(qabs((q.q1[0, 0], q.q2[0, 0]))) - 1.0) <= 1e-12


def test_rng_split_streams_are_order_independent():
    root = RngStream(123)
    a = root.split(5).gen.standard_normal(3)
    root2 = RngStream(123)
    _ = root2.split(1).gen.standard_normal(10)
    b = root2.split(5).gen.standard_normal(3)
    np.testing.assert_array_equal(a, b)


# ------------------------------------------------------------------ conjugate

def test_conjugate_by_identity_fixes_element():
    x = random_skew(3, RngStream(17))
    np.testing.assert_array_equal(conjugate(np.eye(3), x), x)


def test_conjugate_fixes_center():
    g = haar_unitary(4, RngStream(18))
    np.testing.assert_allclose(conjugate(g, 1j * np.eye(4)), 1j * np.eye(4),
                               atol=1e-14)


def test_conjugate_preserves_phase_multiset():
    rng = RngStream(19)
    x = random_skew(5, rng.split(0))
    g = haar_unitary(5, rng.split(1))
    u = expm_skew(x, 1.0)
    before = unitary_phases(u)
    after = unitary_phases(conjugate(g, u))
    np.testing.assert_allclose(after, before, atol=1e-9)


def test_conjugate_preserves_skewness():
    rng = RngStream(20)
    x = random_skew(4, rng.split(0))
    g = haar_unitary(4, rng.split(1))
    y = conjugate(g, x)
    assert np.max(np.abs(y + y.conj().T)) <= 1e-12


def test_conjugate_shape_mismatch():
    with pytest.raises(InvalidInput):
        conjugate(np.eye(3), np.zeros((2, 2)))


# ------------------------------------------------- quaternion pair arithmetic

def test_quaternion_pair_against_complex_embedding():
    # the 2n x 2n embedding is the independent oracle for pair products
    rng = RngStream(21)
    a = haar_symplectic(3, rng.split(0))
    b = haar_symplectic(3, rng.split(1))
    prod = a @ b
    np.testing.assert_allclose(prod.to_complex(),
                               a.to_complex() @ b.to_complex(), atol=1e-13)
    np.testing.assert_allclose(a.conj_t().to_complex(),
                               a.to_complex().conj().T, atol=1e-13)


def test_qmul_matches_hamilton_table():
    i = (1j + 0j, 0j)
    j = (0j, 1 + 0j)
    k = (0j, 1j)
    for unit in (i, j, k):
        sq = qmul(unit, unit)
        assert sq[0] == -1 and sq[1] == 0
    ij = qmul(i, j)
    assert ij[0] == k[0] and ij[1] == k[1]
    ji = qmul(j, i)
    assert ji[0] == -k[0] and ji[1] == -k[1]


def test_qconj_and_modulus():
    x = (0.3 + 0.4j, -0.1 + 0.2j)
    prod = qmul(x, qconj(x))
    assert prod[1] == 0
    np.testing.assert_allclose(prod[0], float(qabs(x)) ** 2, atol=1e-15)


# ------------------------------------------------------------- su(2) helpers

def test_su2_vec_roundtrip_and_inner():
    v = np.array([0.3, -0.2, 0.9])
    x = su2_from_vec(v)
    np.testing.assert_allclose(vec_from_su2(x), v, atol=1e-15)
    np.testing.assert_allclose(su2_inner(x, x), np.dot(v, v), atol=1e-14)


def test_su2_unit_vector_exponential_focus():
    # unit vectors have eigenvalues +-i, hence exp(pi X) = -I
    rng = RngStream(22)
    for k in range(5):
        v = rng.split(k).gen.standard_normal(3)
        v /= np.linalg.norm(v)
        np.testing.assert_allclose(expm_skew(su2_from_vec(v), np.pi),
                                   -np.eye(2), atol=1e-13)


def test_su2_quaternion_dictionary():
    p = np.array([0.5, 0.5, 0.5, 0.5])
    g = su2_matrix_from_quat(p)
    assert abs(np.linalg.det(g) - 1.0) <= 1e-14
    np.testing.assert_allclose(quat_from_su2_matrix(g), p, atol=1e-15)
    # quaternion product corresponds to matrix product
    q = np.array([0.0, 1.0, 0.0, 0.0])
    gq = su2_matrix_from_quat(q)
    prod = g @ gq
    w = quat_from_su2_matrix(prod)
    assert abs(np.linalg.norm(w) - 1.0) <= 1e-12


def test_haar_su2_lands_in_group():
    g = haar_su2(RngStream(23))
    as_unitary(g)
    assert abs(np.linalg.det(g) - 1.0) <= 1e-12


def test_validators_reject_bad_input():
    with pytest.raises(InvalidInput):
        as_unitary(np.ones((2, 2)))
    with pytest.raises(InvalidInput):
        as_skew_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(InvalidInput):
        QuaternionMatrix(np.zeros((2, 2)), np.zeros((3, 3)))
