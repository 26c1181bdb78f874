"""Dense linear algebra for states, operators and superoperators on small Hilbert spaces.

Everything here works on plain complex numpy arrays and fixes the conventions
the rest of the package relies on:

* vectorization is column-stacking, so ``vec(A X B) = (B.T kron A) vec(X)``
  and ``<<A|B>> = vec(A)^dag vec(B) = Tr[A^dag B]``;
* the Liouville matrix of a unitary ``U`` is ``conj(U) kron U``;
* the Choi matrix is unnormalized, ``C = sum_k vec(A_k) vec(A_k)^dag``,
  with trace ``d`` for a trace-preserving channel.

The dimensions of interest are tiny (d <= 16), so all checks are direct
dense computations with fixed global tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Structural tolerance (unitarity, CPTP, projectors) and algebraic tolerance
# (identities that hold to rounding error at d <= 16).
ATOL_STRUCT = 1e-10
ATOL_ALG = 1e-12

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


class DimensionMismatchError(ValueError):
    """Operands live on different Hilbert spaces."""


class NotCPTPError(ValueError):
    """A Kraus set fails the completeness or positivity check."""


def _as_square(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def is_unitary(U, atol: float = ATOL_STRUCT) -> bool:
    U = _as_square(U)
    return np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() <= atol


def check_unitary(U, atol: float = ATOL_STRUCT) -> np.ndarray:
    U = _as_square(U)
    if not is_unitary(U, atol):
        raise ValueError("matrix is not unitary within tolerance")
    return U


def phase_equal(U, V, atol: float = 1e-9) -> bool:
    """True iff ``U^dag V`` is a scalar multiple of the identity within atol."""
    U = _as_square(U)
    V = _as_square(V)
    if U.shape != V.shape:
        return False
    W = U.conj().T @ V
    c = np.trace(W) / U.shape[0]
    return np.abs(W - c * np.eye(U.shape[0])).max() <= atol and abs(abs(c) - 1) <= atol


def check_density_matrix(rho, atol: float = ATOL_ALG, eig_atol: float = 1e-10) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a density matrix."""
    rho = _as_square(rho)
    if np.abs(rho - rho.conj().T).max() > atol:
        raise ValueError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -eig_atol:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def vectorize(M) -> np.ndarray:
    """Column-stack a square matrix into a d^2 vector."""
    return _as_square(M).flatten(order="F")


def unvectorize(v) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v, dtype=complex).ravel()
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape((d, d), order="F")


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product ``<<A|B>> = Tr[A^dag B]``."""
    return complex(np.vdot(vectorize(A), vectorize(B)))


def unitary_to_superop(U, atol: float = ATOL_STRUCT) -> np.ndarray:
    """Liouville matrix of the conjugation channel ``rho -> U rho U^dag``."""
    U = check_unitary(U, atol)
    return np.kron(U.conj(), U)


def kraus_to_superop(kraus) -> np.ndarray:
    ks = [_as_square(A) for A in kraus]
    d = ks[0].shape[0]
    S = np.zeros((d * d, d * d), dtype=complex)
    for A in ks:
        if A.shape[0] != d:
            raise DimensionMismatchError("Kraus operators have mixed dimensions")
        S += np.kron(A.conj(), A)
    return S


def compose(S1, S2) -> np.ndarray:
    """Composite superoperator applying ``S2`` first, then ``S1``."""
    S1 = _as_square(S1)
    S2 = _as_square(S2)
    if S1.shape != S2.shape:
        raise DimensionMismatchError(f"cannot compose {S1.shape} with {S2.shape}")
    return S1 @ S2


def superop_to_choi(S) -> np.ndarray:
    """Unnormalized Choi matrix of a Liouville-form superoperator.

    With column-stacking, ``S[j*d+i, l*d+k] = sum A[i,k] conj(A[j,l])`` for a
    Kraus set ``{A}``, and the Choi matrix is the index reshuffle
    ``C[k*d+i, l*d+j] = S[j*d+i, l*d+k]``.
    """
    S = _as_square(S)
    d = int(round(np.sqrt(S.shape[0])))
    if d * d != S.shape[0]:
        raise ValueError("superoperator dimension is not a perfect square")
    T = S.reshape(d, d, d, d)            # [j, i, l, k]
    return T.transpose(3, 1, 2, 0).reshape(d * d, d * d)  # [k, i, l, j]


def choi_to_superop(C) -> np.ndarray:
    C = _as_square(C)
    d = int(round(np.sqrt(C.shape[0])))
    T = C.reshape(d, d, d, d)            # [k, i, l, j]
    return T.transpose(3, 1, 2, 0).reshape(d * d, d * d)


def apply_superop(S, rho) -> np.ndarray:
    """Apply a Liouville-form superoperator to a density matrix."""
    return unvectorize(_as_square(S) @ vectorize(rho))


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map held as a Kraus set.

    Parameters
    ----------
    kraus : list of (d, d) complex arrays
        Kraus operators ``A_k`` with ``sum_k A_k^dag A_k = I``.

    The Liouville and Choi forms are derived on demand and the CPTP check is
    run at construction unless ``validate=False``.
    """

    kraus: tuple = field()
    dim: int = field(init=False)
    validate: bool = True

    def __init__(self, kraus, validate: bool = True):
        ks = tuple(np.asarray(A, dtype=complex) for A in kraus)
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "dim", ks[0].shape[0])
        object.__setattr__(self, "validate", validate)
        if validate:
            self.check_cptp()

    def check_cptp(self, atol: float = ATOL_STRUCT) -> None:
        d = self.dim
        comp = sum(A.conj().T @ A for A in self.kraus)
        if np.abs(comp - np.eye(d)).max() > atol:
            raise NotCPTPError("Kraus completeness sum differs from identity")
        if np.linalg.eigvalsh(self.choi()).min() < -atol:
            raise NotCPTPError("Choi matrix is not positive semidefinite")

    def superop(self) -> np.ndarray:
        return kraus_to_superop(self.kraus)

    def choi(self) -> np.ndarray:
        vs = np.column_stack([vectorize(A) for A in self.kraus])
        return vs @ vs.conj().T

    def apply(self, rho) -> np.ndarray:
        rho = _as_square(rho)
        return sum(A @ rho @ A.conj().T for A in self.kraus)

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        """Independent action on two subsystems, ``self`` on the first factor."""
        ks = [np.kron(A, B) for A in self.kraus for B in other.kraus]
        return KrausChannel(ks, validate=False)

    @staticmethod
    def identity(dim: int) -> "KrausChannel":
        return KrausChannel([np.eye(dim, dtype=complex)], validate=False)

    @staticmethod
    def from_unitary(U) -> "KrausChannel":
        return KrausChannel([check_unitary(U)], validate=False)


def trace_norm(M) -> float:
    """Sum of singular values; for Hermitian input, the eigenvalue abs-sum."""
    M = _as_square(M)
    if np.abs(M - M.conj().T).max() <= ATOL_STRUCT:
        return float(np.abs(np.linalg.eigvalsh(M)).sum())
    return float(np.linalg.svd(M, compute_uv=False).sum())


def diamond_bounds(S) -> tuple[float, float]:
    """Certified interval for the diamond norm of a superoperator.

    Returns ``(||C||_1 / d, ||C||_1)`` where ``C`` is the unnormalized Choi
    matrix.  The upper bound follows from writing the output of the channel
    on half of any unit vector as ``(I kron K) C (I kron K)^dag`` with
    ``||K||_F = 1``; the lower bound is the maximally-entangled witness.
    """
    S = _as_square(S)
    d = int(round(np.sqrt(S.shape[0])))
    tn = trace_norm(superop_to_choi(S))
    return tn / d, tn


def embed_unitary(U, qubits, n_qubits: int) -> np.ndarray:
    """Embed a 1- or 2-qubit unitary on the given qubit indices of an n-qubit register.

    Qubit 0 is the most significant tensor factor.  Two-qubit gates must act
    on adjacent indices in ascending order (all this package needs).
    """
    U = _as_square(U)
    qubits = tuple(qubits)
    if U.shape[0] == 2 ** n_qubits and qubits == tuple(range(n_qubits)):
        return U
    if len(qubits) == 1:
        (q,) = qubits
        out = np.eye(1, dtype=complex)
        for i in range(n_qubits):
            out = np.kron(out, U if i == q else PAULI_I)
        return out
    if len(qubits) == 2 and qubits[1] == qubits[0] + 1:
        out = np.eye(1, dtype=complex)
        i = 0
        while i < n_qubits:
            if i == qubits[0]:
                out = np.kron(out, U)
                i += 2
            else:
                out = np.kron(out, PAULI_I)
                i += 1
        return out
    raise ValueError(f"unsupported embedding of {U.shape} gate on qubits {qubits}")
