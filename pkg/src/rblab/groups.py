"""Random gate sampling and group arithmetic for sequence inversion.

Haar sampling uses the Ginibre + QR construction with the R-diagonal phase
correction.  Clifford sampling is uniform over the 24-element single-qubit
group or the 11520-element two-qubit group (both modulo global phase); the
two-qubit group is indexed through the canonical product decomposition

    (C1 x C1) . E,   E in {I} u {(s x s') CNOT} u {(s x s') iSWAP} u {SWAP}

with ``s`` ranging over the three axis-cycling single-qubit Cliffords, which
makes uniformity of the index space auditable by direct enumeration.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .qcore import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, check_unitary


def cnot() -> np.ndarray:
    """CNOT with control on qubit 0 (most significant factor)."""
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )


def swap() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    )


H_XY = -0.25 * (np.kron(PAULI_X, PAULI_X) + np.kron(PAULI_Y, PAULI_Y))


def xy(theta: float) -> np.ndarray:
    """XY-family gate ``exp(-i theta H_XY)`` with ``H_XY = -(XX + YY)/4``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[1, 0, 0, 0], [0, c, 1j * s, 0], [0, 1j * s, c, 0], [0, 0, 0, 1]],
        dtype=complex,
    )


def iswap() -> np.ndarray:
    return xy(np.pi)


def haar_sample(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary on U(d) (global phase is irrelevant to channels)."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    ph = np.diag(r)
    return q * (ph / np.abs(ph))


def invert_product(gates, g_end=None) -> np.ndarray:
    """Inversion element ``g_end . (g_m ... g_1)^-1`` closing a sequence.

    The ideal product ``g_inv . g_m ... g_1`` then equals ``g_end`` exactly.
    """
    gates = list(gates)
    if gates:
        d = gates[0].shape[0]
    elif g_end is not None:
        d = np.asarray(g_end).shape[0]
    else:
        raise ValueError("need at least one gate or an explicit ending gate")
    prod = np.eye(d, dtype=complex)
    for g in gates:
        if g.shape[0] != d:
            raise ValueError("gates act on different dimensions")
        prod = g @ prod
    if g_end is None:
        g_end = np.eye(d, dtype=complex)
    return np.asarray(g_end, dtype=complex) @ prod.conj().T


# ---------------------------------------------------------------------------
# Clifford groups

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_PHASE_S = np.diag([1.0, 1j])


def _canonical_key(U: np.ndarray, decimals: int = 8) -> bytes:
    """Phase-normalized rounded bytes, identifying unitaries modulo phase."""
    flat = U.ravel()
    k = np.argmax(np.abs(flat) > 0.3)
    V = U * (abs(flat[k]) / flat[k])
    return (np.round(V, decimals) + 0.0).tobytes()  # +0.0 normalizes -0.0


@lru_cache(maxsize=None)
def clifford_1q_elements() -> tuple:
    """The 24 single-qubit Cliffords modulo phase, generated by closure of {H, S}."""
    seen = {}
    frontier = [np.eye(2, dtype=complex)]
    seen[_canonical_key(frontier[0])] = frontier[0]
    while frontier:
        nxt = []
        for U in frontier:
            for g in (_HADAMARD, _PHASE_S):
                V = g @ U
                key = _canonical_key(V)
                if key not in seen:
                    seen[key] = V
                    nxt.append(V)
        frontier = nxt
    elems = tuple(seen.values())
    assert len(elems) == 24, f"closure produced {len(elems)} elements"
    return elems


# 120-degree rotation about (1,1,1)/sqrt(3): cycles the Pauli axes X->Y->Z->X.
_AXIS_CYCLE = (np.eye(2) - 1j * (PAULI_X + PAULI_Y + PAULI_Z) / np.sqrt(3)) / 2 * np.sqrt(2)


@lru_cache(maxsize=None)
def _entangling_layers() -> tuple:
    """The 20 entangling-class layers of the two-qubit Clifford decomposition."""
    cyc = [np.linalg.matrix_power(_AXIS_CYCLE, k).astype(complex) for k in range(3)]
    layers = [np.eye(4, dtype=complex)]
    for mid in (cnot(), iswap()):
        for a in cyc:
            for b in cyc:
                layers.append(np.kron(a, b) @ mid)
    layers.append(swap())
    assert len(layers) == 20
    return tuple(layers)


CLIFFORD_2Q_SIZE = 24 * 24 * 20


def clifford_2q_from_index(index: int) -> np.ndarray:
    """Element of the two-qubit Clifford group (mod phase) at a canonical index."""
    if not 0 <= index < CLIFFORD_2Q_SIZE:
        raise ValueError(f"index {index} outside [0, {CLIFFORD_2Q_SIZE})")
    ones = clifford_1q_elements()
    i, rest = divmod(index, 24 * 20)
    j, k = divmod(rest, 20)
    return _entangling_layers()[k] @ np.kron(ones[i], ones[j])


def clifford_sample(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample from the n-qubit Clifford group (n = 1 or 2), as a unitary."""
    if n == 1:
        elems = clifford_1q_elements()
        return elems[int(rng.integers(len(elems)))]
    if n == 2:
        return clifford_2q_from_index(int(rng.integers(CLIFFORD_2Q_SIZE)))
    raise ValueError("Clifford sampling is supported for 1 or 2 qubits only")


def pauli_strings(n: int) -> list[np.ndarray]:
    """All 4^n Pauli strings, identity first."""
    out = [np.eye(1, dtype=complex)]
    for _ in range(n):
        out = [np.kron(s, P) for s in out for P in PAULIS]
    return out


def is_clifford(U: np.ndarray, atol: float = 1e-9) -> bool:
    """True iff U conjugates every Pauli string to +/- another Pauli string."""
    U = check_unitary(U)
    n = int(round(np.log2(U.shape[0])))
    strings = pauli_strings(n)
    for P in strings[1:]:
        Q = U @ P @ U.conj().T
        if not any(
            np.abs(Q - s * R).max() <= atol for R in strings[1:] for s in (1, -1)
        ):
            return False
    return True


class GateGroup:
    """Gate set for an RB experiment: Haar over U(d) or a uniform Clifford group."""

    def __init__(self, kind: str, n_qubits: int):
        kind = kind.lower()
        if kind not in ("haar", "clifford"):
            raise ValueError(f"unknown group kind {kind!r}")
        if kind == "clifford" and n_qubits not in (1, 2):
            raise ValueError("Clifford groups are built in for 1 or 2 qubits only")
        self.kind = kind
        self.n_qubits = n_qubits
        self.dim = 2**n_qubits

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "haar":
            return haar_sample(self.dim, rng)
        return clifford_sample(self.n_qubits, rng)
