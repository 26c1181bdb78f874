import numpy as np
import pytest

from rblab import qcore
from rblab.qcore import (
    KrausChannel,
    PAULI_X,
    apply_superop,
    diamond_bounds,
    compose,
    hs_inner,
    kraus_to_superop,
    choi_to_superop,
    phase_equal,
    superop_to_choi,
    unitary_to_superop,
    unvectorize,
    vectorize,
)
from rblab.noise import depolarizing


def haar(d, rng):
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(d, rng):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_vectorize_identity():
    assert np.allclose(vectorize(np.eye(2)), [1, 0, 0, 1])


def test_hs_inner_pauli_x():
    assert hs_inner(PAULI_X, PAULI_X) == pytest.approx(2.0)


def test_vec_unvec_round_trip_many():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert np.array_equal(unvectorize(vectorize(m)), m)


def test_vectorize_rejects_non_square():
    with pytest.raises(ValueError):
        vectorize(np.ones((2, 3)))


def test_vec_of_product_identity():
    rng = np.random.default_rng(1)
    A, X, B = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(3))
    assert np.allclose(vectorize(A @ X @ B), np.kron(B.T, A) @ vectorize(X))


def test_unitary_superop_identity():
    assert np.allclose(unitary_to_superop(np.eye(2)), np.eye(4))


def test_unitary_superop_bit_flip():
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    out = apply_superop(unitary_to_superop(PAULI_X), rho0)
    assert np.allclose(out, np.diag([0.0, 1.0]))


def test_unitary_superop_matches_conjugation():
    rng = np.random.default_rng(2)
    U = haar(4, rng)
    rho = random_density(4, rng)
    assert np.abs(apply_superop(unitary_to_superop(U), rho) - U @ rho @ U.conj().T).max() < 1e-12


def test_unitary_superop_rejects_non_unitary():
    with pytest.raises(ValueError):
        unitary_to_superop(np.array([[1, 0], [0, 2.0]]))


def test_superop_homomorphism():
    rng = np.random.default_rng(3)
    U, V = haar(4, rng), haar(4, rng)
    lhs = unitary_to_superop(U @ V)
    rhs = compose(unitary_to_superop(U), unitary_to_superop(V))
    assert np.abs(lhs - rhs).max() < 1e-10


def test_compose_with_identity():
    rng = np.random.default_rng(4)
    S = unitary_to_superop(haar(2, rng))
    assert np.allclose(compose(S, np.eye(4)), S)


def test_compose_dim_mismatch():
    with pytest.raises(qcore.DimensionMismatchError):
        compose(np.eye(4), np.eye(16))


def test_choi_of_identity_channel():
    C = superop_to_choi(np.eye(4))
    # unnormalized maximally entangled matrix, trace d
    v = vectorize(np.eye(2))
    assert np.allclose(C, np.outer(v, v.conj()))
    assert np.trace(C) == pytest.approx(2.0)


def test_choi_round_trip_and_kraus_consistency():
    rng = np.random.default_rng(5)
    chan = depolarizing(1, 0.3)
    S = chan.superop()
    assert np.abs(superop_to_choi(S) - chan.choi()).max() < 1e-12
    assert np.abs(choi_to_superop(superop_to_choi(S)) - S).max() < 1e-12


def test_choi_cptp_trace_and_psd():
    chan = depolarizing(2, 0.2)
    C = chan.choi()
    assert np.trace(C).real == pytest.approx(4.0)
    assert np.linalg.eigvalsh(C).min() > -1e-10


def test_kraus_channel_trace_preservation():
    rng = np.random.default_rng(6)
    chan = depolarizing(2, 0.37)
    rho = random_density(4, rng)
    out = apply_superop(chan.superop(), rho)
    assert abs(np.trace(out) - 1) < 1e-10


def test_depolarizing_composition_scales_unital_block():
    # PTM composition: the traceless block scales by (1-p)(1-q)
    p, q = 0.1, 0.25
    S = compose(depolarizing(1, p).superop(), depolarizing(1, q).superop())
    expect = compose(depolarizing(1, 1 - (1 - p) * (1 - q)).superop(), np.eye(4))
    assert np.abs(S - expect).max() < 1e-12


def test_diamond_bounds_zero_map():
    assert diamond_bounds(np.zeros((4, 4))) == (0.0, 0.0)


def test_diamond_bounds_equal_unitaries():
    rng = np.random.default_rng(7)
    U = haar(2, rng)
    S = unitary_to_superop(U) - unitary_to_superop(U)
    lo, hi = diamond_bounds(S)
    assert lo == pytest.approx(0.0, abs=1e-14)
    assert hi == pytest.approx(0.0, abs=1e-14)


def test_diamond_bounds_depolarizing_minus_identity():
    # d=2: Choi difference has eigenvalues {-p/2 (x1), p/2 (x3)} up to basis,
    # computed here directly from the explicit 4x4 Choi difference.
    p = 0.3
    S = depolarizing(1, p).superop() - np.eye(4)
    C = superop_to_choi(S)
    expected_tn = np.abs(np.linalg.eigvalsh(C)).sum()
    lo, hi = diamond_bounds(S)
    assert hi == pytest.approx(expected_tn, abs=1e-12)
    assert lo == pytest.approx(expected_tn / 2, abs=1e-12)
    assert lo <= hi


def test_diamond_bounds_ordering_random():
    rng = np.random.default_rng(8)
    for _ in range(20):
        S = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        lo, hi = diamond_bounds(S)
        assert lo <= hi + 1e-12


def test_phase_equal():
    rng = np.random.default_rng(9)
    U = haar(4, rng)
    assert phase_equal(U, np.exp(0.3j) * U)
    assert not phase_equal(U, haar(4, rng))


def test_check_density_matrix_rejects():
    with pytest.raises(ValueError):
        qcore.check_density_matrix(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        qcore.check_density_matrix(np.array([[1.0, 0.5], [0.0, 0.0]]))


def test_embed_unitary_positions():
    g = np.diag([1.0, 1j])
    assert np.allclose(qcore.embed_unitary(g, (0,), 2), np.kron(g, np.eye(2)))
    assert np.allclose(qcore.embed_unitary(g, (1,), 2), np.kron(np.eye(2), g))
