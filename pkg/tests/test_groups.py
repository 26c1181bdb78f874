import numpy as np
import pytest
from scipy import stats

from rblab.groups import (
    CLIFFORD_2Q_SIZE,
    GateGroup,
    clifford_1q_elements,
    clifford_2q_from_index,
    clifford_sample,
    cnot,
    haar_sample,
    invert_product,
    is_clifford,
    iswap,
    pauli_strings,
    swap,
    xy,
)
from rblab.qcore import is_unitary, phase_equal, unitary_to_superop


def _canonical_key(U, decimals=8):
    flat = U.ravel()
    k = np.argmax(np.abs(flat) > 0.3)
    return (np.round(U * (abs(flat[k]) / flat[k]), decimals) + 0.0).tobytes()


def test_fixed_gates():
    assert np.allclose(xy(0.0), np.eye(4))
    assert np.allclose(xy(np.pi), iswap())
    assert np.allclose(cnot() @ cnot(), np.eye(4))
    assert np.allclose(swap() @ swap(), np.eye(4))


def test_xy_matches_matrix_exponential():
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]])
    H = -0.25 * (np.kron(X, X) + np.kron(Y, Y))
    theta = 0.7
    w, V = np.linalg.eigh(theta * H)
    expect = (V * np.exp(-1j * w)) @ V.conj().T
    assert np.abs(xy(theta) - expect).max() < 1e-12


def test_haar_samples_are_unitary():
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert is_unitary(haar_sample(4, rng))


def test_haar_determinism():
    a = haar_sample(4, np.random.default_rng(42))
    b = haar_sample(4, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_haar_sample_times_dagger_is_identity_channel():
    rng = np.random.default_rng(1)
    U = haar_sample(4, rng)
    S = unitary_to_superop(U.conj().T) @ unitary_to_superop(U)
    assert np.abs(S - np.eye(16)).max() < 1e-10


def test_haar_first_moment():
    # E[|U_00|^2] = 1/d within 3 sigma (Monte Carlo)
    rng = np.random.default_rng(2)
    n = 20000
    vals = np.empty(n)
    for i in range(n):
        vals[i] = abs(haar_sample(4, rng)[0, 0]) ** 2
    se = vals.std(ddof=1) / np.sqrt(n)
    assert abs(vals.mean() - 0.25) < 3 * se


def test_haar_trace_moment():
    # E[|Tr U|^2] = 1 by Schur orthogonality, within 3 sigma
    rng = np.random.default_rng(3)
    n = 20000
    vals = np.empty(n)
    for i in range(n):
        vals[i] = abs(np.trace(haar_sample(4, rng))) ** 2
    se = vals.std(ddof=1) / np.sqrt(n)
    assert abs(vals.mean() - 1.0) < 3 * se


def test_haar_two_design_twirl():
    # channel-level 2-design check: the Haar twirl of a fixed superoperator
    # projects onto span{|vec I><vec I|/d, complement}, i.e. a depolarizing map
    d = 2
    n = 20000
    G = np.zeros((4, 4), dtype=complex)
    G[0, 1] = 1.0
    G[2, 3] = 0.5
    T = np.zeros((4, 4), dtype=complex)
    rng = np.random.default_rng(5)
    for _ in range(n):
        S = unitary_to_superop(haar_sample(d, rng))
        T += S.conj().T @ G @ S
    T /= n
    vI = np.eye(d).reshape(-1, order="F") / np.sqrt(d)
    P0 = np.outer(vI, vI)
    coeff = (np.trace(G) - np.trace(P0 @ G)) / (d**2 - 1)
    expect = np.trace(P0 @ G) * P0 + coeff * (np.eye(4) - P0)
    assert np.abs(T - expect).max() < 5 / np.sqrt(n)


def test_clifford_1q_has_24_elements():
    elems = clifford_1q_elements()
    assert len(elems) == 24
    keys = {_canonical_key(U) for U in elems}
    assert len(keys) == 24


def test_clifford_1q_frequency_chi2():
    rng = np.random.default_rng(6)
    elems = clifford_1q_elements()
    keys = {_canonical_key(U): i for i, U in enumerate(elems)}
    counts = np.zeros(24)
    n = 100_000
    for _ in range(n):
        counts[keys[_canonical_key(clifford_sample(1, rng))]] += 1
    chi2 = ((counts - n / 24) ** 2 / (n / 24)).sum()
    p = stats.chi2.sf(chi2, df=23)
    assert p > 0.001


def test_clifford_samples_normalize_paulis():
    rng = np.random.default_rng(7)
    for _ in range(20):
        assert is_clifford(clifford_sample(1, rng))
    for _ in range(5):
        assert is_clifford(clifford_sample(2, rng))


def test_clifford_2q_index_space_is_the_full_group():
    keys = set()
    for idx in range(CLIFFORD_2Q_SIZE):
        keys.add(_canonical_key(clifford_2q_from_index(idx)))
    assert len(keys) == 11520


def test_clifford_2q_inverse_closes():
    rng = np.random.default_rng(8)
    for _ in range(200):
        U = clifford_sample(2, rng)
        S = unitary_to_superop(U.conj().T) @ unitary_to_superop(U)
        assert np.abs(S - np.eye(16)).max() < 1e-10


def test_invert_product_empty():
    assert np.allclose(invert_product([], np.eye(2)), np.eye(2))


def test_invert_product_single():
    rng = np.random.default_rng(9)
    U = haar_sample(4, rng)
    assert np.abs(invert_product([U]) - U.conj().T).max() < 1e-14


def test_invert_product_sequence_closes_to_g_end():
    rng = np.random.default_rng(10)
    gates = [haar_sample(4, rng) for _ in range(5)]
    g_end = haar_sample(4, rng)
    inv = invert_product(gates, g_end)
    total = inv
    for g in reversed(gates):
        total = total @ g
    assert phase_equal(total, g_end, 1e-9)


def test_gate_group_dispatch():
    rng = np.random.default_rng(11)
    assert GateGroup("haar", 2).sample(rng).shape == (4, 4)
    assert GateGroup("clifford", 2).sample(rng).shape == (4, 4)
    with pytest.raises(ValueError):
        GateGroup("clifford", 3)
    with pytest.raises(ValueError):
        GateGroup("pauli", 1)


def test_pauli_strings_count():
    assert len(pauli_strings(2)) == 16
