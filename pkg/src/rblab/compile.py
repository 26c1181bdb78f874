"""Decomposition of sampled gates into elementary gates (U1/U2/U3 + CNOT or iSWAP).

Two-qubit gates go through a magic-basis Cartan (KAK) decomposition

    U = phase * (K1l x K1r) . exp(i(x XX + y YY + z ZZ)) . (K2l x K2r)

with the interaction vector brought into the Weyl chamber
``pi/4 >= x >= y >= |z|`` (z >= 0 when x = pi/4).  The canonical class then
selects a minimal entangling template -- 0, 1, 2 or 3 CNOTs -- whose own KAK
matches the target class exactly, so the single-qubit dressing is recovered
by composing the two decompositions.  Haar-random gates land in the generic
class, hence always compile to exactly 3 CNOTs; Clifford-class gates compile
to 0/1/2/3, averaging 1.5 over the two-qubit Clifford group.

In the iSWAP basis each emitted CNOT is expanded through the fixed identity
``CNOT = (1q) . iSWAP . (1q) . iSWAP . (1q)`` (two iSWAPs per CNOT).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .qcore import check_unitary, embed_unitary, phase_equal
from .groups import cnot, iswap, xy

ANGLE_ATOL = 1e-9  # theta-classification tolerance for U1/U2 special cases


class CompilationError(RuntimeError):
    """The Cartan eigen-step failed to produce a valid decomposition."""


# ---------------------------------------------------------------------------
# Elementary gates and circuits

U1_KIND, U2_KIND, U3_KIND = "u1", "u2", "u3"


def u1_matrix(lam: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * lam)])


def u2_matrix(phi: float, lam: float) -> np.ndarray:
    return np.array(
        [[1, -np.exp(1j * lam)], [np.exp(1j * phi), np.exp(1j * (phi + lam))]]
    ) / np.sqrt(2)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]]
    )


@dataclass(frozen=True)
class ElementaryGate:
    """One native gate: kind, continuous parameters and target qubits.

    ``native`` gates carry an explicit unitary (e.g. an interleaved XY with a
    fused coherent error) and bypass compilation.
    """

    kind: str
    params: tuple = ()
    qubits: tuple = (0,)
    payload: np.ndarray | None = field(default=None, compare=False)

    def matrix(self) -> np.ndarray:
        k = self.kind
        if k == U1_KIND:
            return u1_matrix(*self.params)
        if k == U2_KIND:
            return u2_matrix(*self.params)
        if k == U3_KIND:
            return u3_matrix(*self.params)
        if k == "cnot":
            base = cnot()
            if self.qubits == (1, 0):
                s = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
                return s @ base @ s
            return base
        if k == "iswap":
            return iswap()
        if k == "xy":
            return xy(*self.params)
        if k == "native":
            return self.payload
        raise ValueError(f"unknown gate kind {self.kind!r}")


@dataclass
class Circuit:
    n_qubits: int
    gates: list

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)


def recompose(circuit: Circuit) -> np.ndarray:
    """Ordered product of the circuit's gate matrices on the full register."""
    d = 2**circuit.n_qubits
    U = np.eye(d, dtype=complex)
    for g in circuit.gates:
        if any(q >= circuit.n_qubits for q in g.qubits):
            raise ValueError(f"gate on qubits {g.qubits} exceeds register size")
        span = g.qubits if len(g.qubits) > 1 else g.qubits
        U = embed_unitary(g.matrix(), span, circuit.n_qubits) @ U
    return U


def zyz_decompose(U, qubit: int = 0, atol: float = ANGLE_ATOL) -> ElementaryGate:
    """Classify a single-qubit unitary as U1/U2/U3 (up to global phase)."""
    U = check_unitary(U)
    th = 2 * np.arctan2(abs(U[1, 0]), abs(U[0, 0]))
    if th <= atol:
        # diagonal up to phase: U1(arg(V11) - arg(V00))
        lam = float(np.angle(U[1, 1]) - np.angle(U[0, 0]))
        return ElementaryGate(U1_KIND, (lam,), (qubit,))
    if abs(U[0, 0]) > 1e-12:
        V = U * np.exp(-1j * np.angle(U[0, 0]))
    else:
        V = U * np.exp(-1j * np.angle(U[1, 0]))
    phi = float(np.angle(V[1, 0]))
    lam = float(np.angle(-V[0, 1]))
    if abs(th - np.pi / 2) <= atol:
        return ElementaryGate(U2_KIND, (phi, lam), (qubit,))
    return ElementaryGate(U3_KIND, (float(th), phi, lam), (qubit,))


# ---------------------------------------------------------------------------
# Magic-basis KAK machinery

MAGIC = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]]
) / np.sqrt(2)
_MAGIC_DAG = MAGIC.conj().T
# Maps magic-basis eigenphases to (global, XX, YY, ZZ) coefficients.
_GAMMA = np.array(
    [[1, 1, 1, 1], [1, 1, -1, -1], [-1, 1, -1, 1], [1, -1, -1, 1]]
) * 0.25

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0]).astype(complex)
_XX, _YY, _ZZ = np.kron(_X, _X), np.kron(_Y, _Y), np.kron(_Z, _Z)

_CNOT01 = cnot()
_CNOT10 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)


def _rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _ry(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def canonical_gate(x: float, y: float, z: float) -> np.ndarray:
    """``exp(i (x XX + y YY + z ZZ))`` (the generators commute)."""
    H = x * _XX + y * _YY + z * _ZZ
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * w)) @ V.conj().T


def _joint_diag_symmetric(A, B, rng=None, tol: float = 1e-7) -> np.ndarray:
    """Real orthogonal basis simultaneously diagonalizing commuting symmetric A, B."""
    w, P = np.linalg.eigh(A)
    if rng is not None:
        # randomized retry path: mix degenerate subspaces before refining
        q, _ = np.linalg.qr(rng.standard_normal((len(w), len(w))))
        w2, P2 = np.linalg.eigh(q.T @ A @ q)
        w, P = w2, q @ P2
    n = len(w)
    i = 0
    while i < n:
        j = i + 1
        while j < n and w[j] - w[i] < tol:
            j += 1
        if j - i > 1:
            blk = P[:, i:j]
            sub = blk.T @ B @ blk
            _, V = np.linalg.eigh((sub + sub.T) / 2)
            P[:, i:j] = blk @ V
        i = j
    return P


def _kron_factor(M) -> tuple[complex, np.ndarray, np.ndarray]:
    """Split ``M = g * kron(A, B)`` with A, B in SU(2)."""
    a, b = max(((i, j) for i in range(4) for j in range(4)), key=lambda t: abs(M[t]))
    A = np.zeros((2, 2), dtype=complex)
    B = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            A[(a >> 1) ^ i, (b >> 1) ^ j] = M[a ^ (i << 1), b ^ (j << 1)]
            B[(a & 1) ^ i, (b & 1) ^ j] = M[a ^ i, b ^ j]
    A = A / np.sqrt(np.linalg.det(A))
    B = B / np.sqrt(np.linalg.det(B))
    g = M[a, b] / (A[a >> 1, b >> 1] * B[a & 1, b & 1])
    if np.abs(M - g * np.kron(A, B)).max() > 1e-9:
        raise CompilationError("matrix is not a tensor product of single-qubit gates")
    return g, A, B


_FLIP = [1j * _X, 1j * _Y, 1j * _Z]
_AXIS_SWAP = [
    np.array([[1, -1j], [1j, -1]]) * 1j * np.sqrt(0.5),
    np.array([[1, 1], [1, -1]]) * 1j * np.sqrt(0.5),
    np.array([[0, 1 - 1j], [1 + 1j, 0]]) * 1j * np.sqrt(0.5),
]


def _canonicalize_vector(x, y, z, atol=ANGLE_ATOL):
    """Fold an interaction vector into the Weyl chamber with local corrections.

    Returns (phase, (l0, l1), (x', y', z'), (r0, r1)) such that
    ``exp(i(x XX + ...)) = phase * (l0 x l1) Can(x', y', z') (r0 x r1)``.
    """
    phase = 1.0 + 0j
    left = [np.eye(2, dtype=complex), np.eye(2, dtype=complex)]
    right = [np.eye(2, dtype=complex), np.eye(2, dtype=complex)]
    v = [x, y, z]

    def shift(k, step):
        nonlocal phase
        v[k] += step * np.pi / 2
        phase *= 1j**step
        f = np.linalg.matrix_power(_FLIP[k], step % 4)
        right[0] = f @ right[0]
        right[1] = f @ right[1]

    def negate(k1, k2):
        nonlocal phase
        v[k1] *= -1
        v[k2] *= -1
        phase *= -1
        s = _FLIP[3 - k1 - k2]
        left[1] = left[1] @ s
        right[1] = s @ right[1]

    def swap_axes(k1, k2):
        v[k1], v[k2] = v[k2], v[k1]
        s = _AXIS_SWAP[3 - k1 - k2]
        left[0] = left[0] @ s
        left[1] = left[1] @ s
        right[0] = s @ right[0]
        right[1] = s @ right[1]

    def into_range(k):
        while v[k] <= -np.pi / 4:
            shift(k, +1)
        while v[k] > np.pi / 4:
            shift(k, -1)

    for k in range(3):
        into_range(k)
    if abs(v[0]) < abs(v[1]):
        swap_axes(0, 1)
    if abs(v[1]) < abs(v[2]):
        swap_axes(1, 2)
    if abs(v[0]) < abs(v[1]):
        swap_axes(0, 1)
    if v[0] < 0:
        negate(0, 2)
    if v[1] < 0:
        negate(1, 2)
    into_range(2)
    if v[0] > np.pi / 4 - atol and v[2] < 0:
        shift(0, -1)
        negate(0, 2)
    return phase, (left[0], left[1]), tuple(v), (right[0], right[1])


def kak_decompose(U, rng=None):
    """Canonical KAK decomposition of a two-qubit unitary.

    Returns ``(g, (K1l, K1r), (x, y, z), (K2l, K2r))`` with
    ``U = g * kron(K1l, K1r) @ canonical_gate(x, y, z) @ kron(K2l, K2r)``
    and (x, y, z) in the Weyl chamber.
    """
    U = check_unitary(U)
    if U.shape != (4, 4):
        raise ValueError("KAK decomposition needs a 4x4 unitary")
    det = np.linalg.det(U)
    Us = U * det ** (-0.25)
    M = _MAGIC_DAG @ Us @ MAGIC
    C = M @ M.T
    P = _joint_diag_symmetric(C.real, C.imag, rng=rng)
    if np.linalg.det(P) < 0:
        P[:, -1] = -P[:, -1]
    PM = P.T @ M
    theta = np.zeros(4)
    Q = np.zeros((4, 4))
    for j in range(4):
        k = int(np.argmax(np.abs(PM[j])))
        ph = PM[j, k] / abs(PM[j, k])
        theta[j] = np.angle(ph)
        Q[j] = (PM[j] / ph).real
    if np.linalg.det(Q) < 0:
        Q[3] = -Q[3]
        theta[3] += np.pi
    if np.abs(P @ np.diag(np.exp(1j * theta)) @ Q - M).max() > 1e-8:
        raise CompilationError(
            "magic-basis bidiagonalization failed "
            f"(residual {np.abs(P @ np.diag(np.exp(1j * theta)) @ Q - M).max():.2e})"
        )
    w, x, y, z = _GAMMA @ theta
    g1, A1, B1 = _kron_factor(MAGIC @ P @ _MAGIC_DAG)
    g2, A2, B2 = _kron_factor(MAGIC @ Q @ _MAGIC_DAG)
    g = det**0.25 * np.exp(1j * w) * g1 * g2
    ph, (l0, l1), v, (r0, r1) = _canonicalize_vector(x, y, z)
    return g * ph, (A1 @ l0, B1 @ l1), v, (r0 @ A2, r1 @ B2)


def canonical_vector(U) -> tuple[float, float, float]:
    """Weyl-chamber interaction coefficients of a two-qubit unitary."""
    return kak_decompose(U)[2]


def _interior_2cnot(x: float, y: float) -> list:
    """Template with canonical class (x, y, 0), in time order."""
    ct = np.cos(x) * np.eye(2) + 1j * np.sin(x) * _X  # exp(i x X)
    zt = np.diag([np.exp(1j * y), np.exp(-1j * y)])  # exp(i y Z)
    return [
        ("cnot", (1, 0), _CNOT10),
        ("1q", (0,), zt),
        ("1q", (1,), ct),
        ("cnot", (1, 0), _CNOT10),
    ]


def _interior_3cnot(x: float, y: float, z: float) -> list:
    """Template with canonical class (x, y, z), in time order."""
    a, b, c = np.pi / 2 - 2 * x, np.pi / 2 - 2 * y, np.pi / 2 + 2 * z
    return [
        ("cnot", (1, 0), _CNOT10),
        ("1q", (1,), _ry(c)),
        ("cnot", (0, 1), _CNOT01),
        ("1q", (0,), _rz(a)),
        ("1q", (1,), _ry(b)),
        ("cnot", (1, 0), _CNOT10),
    ]


def _interior_matrix(steps) -> np.ndarray:
    U = np.eye(4, dtype=complex)
    for kind, qubits, mat in steps:
        U = embed_unitary(mat, qubits if kind == "cnot" else qubits, 2) @ U
    return U


def _select_template(v, atol=ANGLE_ATOL):
    x, y, z = v
    if x < atol:
        return []
    if abs(z) < atol and y < atol and abs(x - np.pi / 4) < atol:
        return [("cnot", (0, 1), _CNOT01)]
    if abs(z) < atol:
        return _interior_2cnot(x, y)
    return _interior_3cnot(x, y, z)


@lru_cache(maxsize=2)
def _iswap_expansion(orientation: tuple):
    """Locals (A0, A1, M0, M1, C0, C1) with
    CNOT[orientation] ~ (A0 x A1) . iSWAP . (M0 x M1) . iSWAP . (C0 x C1)."""
    target = _CNOT01 if orientation == (0, 1) else _CNOT10
    mid = (_rx(np.pi / 2), np.eye(2, dtype=complex))
    if orientation == (1, 0):
        mid = (mid[1], mid[0])
    W = iswap() @ np.kron(*mid) @ iswap()
    gc, kc1, vc, kc2 = kak_decompose(target)
    gw, kw1, vw, kw2 = kak_decompose(W)
    if max(abs(a - b) for a, b in zip(vc, vw)) > 1e-9:
        raise CompilationError("iSWAP template class does not match CNOT class")
    A = (kc1[0] @ kw1[0].conj().T, kc1[1] @ kw1[1].conj().T)
    C = (kw2[0].conj().T @ kc2[0], kw2[1].conj().T @ kc2[1])
    assert phase_equal((gc / gw) * np.kron(*A) @ W @ np.kron(*C), target, 1e-10)
    return (*A, *mid, *C)


def _emit(steps, n_qubits=2) -> Circuit:
    """Merge adjacent single-qubit steps and classify them as U1/U2/U3."""
    gates = []
    pending = {q: None for q in range(n_qubits)}

    def flush(q):
        if pending[q] is not None:
            gates.append(zyz_decompose(pending[q], qubit=q))
            pending[q] = None

    for kind, qubits, mat in steps:
        if kind == "1q":
            (q,) = qubits
            pending[q] = mat if pending[q] is None else mat @ pending[q]
        else:
            for q in qubits:
                flush(q)
            gates.append(ElementaryGate(kind, (), tuple(qubits)))
    for q in range(n_qubits):
        flush(q)
    return Circuit(n_qubits, gates)


def kak_compile(U, basis: str = "cnot") -> Circuit:
    """Compile a two-qubit unitary into elementary gates over the given basis.

    The recomposed circuit is phase-equal to the input within 1e-9 (verified;
    a degenerate eigen-step is retried with a randomized mixing of the
    magic-basis diagonalization before reporting failure).
    """
    if basis not in ("cnot", "iswap"):
        raise ValueError(f"unknown basis {basis!r}")
    U = check_unitary(np.asarray(U, dtype=complex))
    last_err = None
    for attempt in range(3):
        rng = None if attempt == 0 else np.random.default_rng(1234 + attempt)
        try:
            circuit = _kak_compile_once(U, basis, rng)
        except CompilationError as exc:
            last_err = exc
            continue
        if phase_equal(recompose(circuit), U, 1e-9):
            return circuit
        last_err = CompilationError(
            f"recomposition mismatch on attempt {attempt} "
            f"(canonical vector {canonical_vector(U)})"
        )
    raise last_err


def _kak_compile_once(U, basis, rng) -> Circuit:
    g, (K1l, K1r), v, (K2l, K2r) = kak_decompose(U, rng=rng)
    steps = _select_template(v)
    if steps:
        W = _interior_matrix(steps)
        gw, (P1l, P1r), vw, (P2l, P2r) = kak_decompose(W)
        if max(abs(a - b) for a, b in zip(v, vw)) > 1e-7:
            raise CompilationError(
                f"template class {vw} does not match target class {v}"
            )
        left = (K1l @ P1l.conj().T, K1r @ P1r.conj().T)
        right = (P2l.conj().T @ K2l, P2r.conj().T @ K2r)
    else:
        left = (K1l, K1r)
        right = (K2l, K2r)
    full = (
        [("1q", (0,), right[0]), ("1q", (1,), right[1])]
        + steps
        + [("1q", (0,), left[0]), ("1q", (1,), left[1])]
    )
    if basis == "iswap":
        expanded = []
        for kind, qubits, mat in full:
            if kind != "cnot":
                expanded.append((kind, qubits, mat))
                continue
            A0, A1, M0, M1, C0, C1 = _iswap_expansion(tuple(qubits))
            expanded += [
                ("1q", (0,), C0),
                ("1q", (1,), C1),
                ("iswap", (0, 1), iswap()),
                ("1q", (0,), M0),
                ("1q", (1,), M1),
                ("iswap", (0, 1), iswap()),
                ("1q", (0,), A0),
                ("1q", (1,), A1),
            ]
        full = expanded
    return _emit(full)


def compile_gate(U, basis: str = "cnot", n_qubits: int | None = None) -> Circuit:
    """Compile a 1- or 2-qubit unitary into an elementary-gate circuit."""
    U = np.asarray(U, dtype=complex)
    if U.shape == (2, 2):
        reg = n_qubits or 1
        return Circuit(reg, [zyz_decompose(U, qubit=0)])
    if U.shape == (4, 4):
        return kak_compile(U, basis)
    raise ValueError("only 1- and 2-qubit gates can be compiled")
