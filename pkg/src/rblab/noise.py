"""Noise channel constructors and the gate-fidelity / decay-rate formulas.

Channels come out as :class:`~rblab.qcore.KrausChannel` instances; every
constructor produces an exactly CPTP Kraus set.  Times are stored in
nanoseconds internally; the parsers accept ``"100ms"``-style strings.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .qcore import (
    KrausChannel,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PAULIS,
    check_unitary,
)

_TIME_UNITS_NS = {"ns": 1.0, "us": 1e3, "µs": 1e3, "ms": 1e6, "s": 1e9}


def parse_time_ns(value) -> float:
    """Parse a duration into nanoseconds.  Accepts numbers (already ns) or strings
    with an ns/us/ms/s suffix."""
    if isinstance(value, (int, float)):
        return float(value)
    s = str(value).strip()
    for suffix, scale in sorted(_TIME_UNITS_NS.items(), key=lambda kv: -len(kv[0])):
        if s.endswith(suffix):
            return float(s[: -len(suffix)]) * scale
    return float(s)


def depolarizing(n_qubits: int, p: float) -> KrausChannel:
    """n-qubit depolarizing channel ``rho -> (1-p) rho + p I/2^n``.

    Kraus set: ``sqrt(1 - p + p/4^n) I`` together with ``sqrt(p/4^n) sigma``
    for every non-identity Pauli string ``sigma``.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    if n_qubits not in (1, 2):
        raise ValueError("only 1- and 2-qubit depolarizing channels are supported")
    strings = []
    for combo in itertools.product(range(4), repeat=n_qubits):
        sigma = np.eye(1, dtype=complex)
        for i in combo:
            sigma = np.kron(sigma, PAULIS[i])
        strings.append((combo, sigma))
    q = p / 4 ** n_qubits
    kraus = []
    for combo, sigma in strings:
        w = 1 - p + q if all(i == 0 for i in combo) else q
        if w > 0:
            kraus.append(np.sqrt(w) * sigma)
    return KrausChannel(kraus)


def amplitude_damping(gamma: float) -> KrausChannel:
    """Single-qubit amplitude damping with decay probability gamma."""
    if not 0 <= gamma <= 1:
        raise ValueError(f"damping probability {gamma} outside [0, 1]")
    A0 = np.diag([1.0, np.sqrt(1 - gamma)]).astype(complex)
    A1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel([A0, A1])


def thermal_relaxation(t1, t2, tg) -> KrausChannel:
    """Single-qubit thermal relaxation for gate time ``tg`` (requires T2 <= T1).

    Implements the closed-form mixture
    ``(1 - p_r - p_z) rho + p_z Z rho Z + p_r Tr[rho] |0><0|`` with
    ``p_r = 1 - exp(-Tg/T1)`` and ``p_z = (1 - p_r)(1 - exp(-Tg/T2 + Tg/T1))``
    as an exact 4-operator Kraus instrument (the reset term contributes
    ``|0><0|`` and ``|0><1|``).
    """
    t1 = parse_time_ns(t1)
    t2 = parse_time_ns(t2)
    tg = parse_time_ns(tg)
    if t1 <= 0 or t2 <= 0:
        raise ValueError("relaxation times must be positive")
    if tg < 0:
        raise ValueError("gate time must be nonnegative")
    if t2 > t1:
        raise ValueError("T2 > T1 makes the dephasing weight negative")
    p_r = 1 - np.exp(-tg / t1)
    p_z = (1 - p_r) * (1 - np.exp(-tg / t2 + tg / t1))
    kraus = [np.sqrt(1 - p_r - p_z) * np.eye(2, dtype=complex)]
    if p_z > 0:
        kraus.append(np.sqrt(p_z) * PAULI_Z)
    if p_r > 0:
        kraus.append(np.sqrt(p_r) * np.array([[1, 0], [0, 0]], dtype=complex))
        kraus.append(np.sqrt(p_r) * np.array([[0, 1], [0, 0]], dtype=complex))
    return KrausChannel(kraus)


_H_XY = -0.25 * (np.kron(PAULI_X, PAULI_X) + np.kron(PAULI_Y, PAULI_Y))
_H_ZZ = -0.25 * np.kron(PAULI_Z, PAULI_Z)


def _expm_hermitian(H: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w)) @ V.conj().T


def coherent_xy_error(theta: float, d_theta: float, d_z: float) -> np.ndarray:
    """Extra unitary multiplying an ideal XY(theta) due to control imprecision.

    Returns ``exp(-i dtheta H_XY - i (theta + dtheta) dz H_ZZ)``; composing it
    with ``XY(theta)`` gives ``exp(-i (theta + dtheta)(H_XY + dz H_ZZ))``
    since the two generators commute.
    """
    H = d_theta * _H_XY + (theta + d_theta) * d_z * _H_ZZ
    return _expm_hermitian(H)


def average_gate_fidelity(channel: KrausChannel) -> float:
    """Average gate fidelity ``(sum_k |Tr A_k|^2 + D) / (D^2 + D)`` of a CPTP
    error channel relative to the identity."""
    channel.check_cptp()
    D = channel.dim
    s = sum(abs(np.trace(A)) ** 2 for A in channel.kraus)
    return float((s + D) / (D**2 + D))


def average_fidelity_from_superop(S: np.ndarray) -> float:
    """Same fidelity computed from a Liouville matrix: ``(Tr S + D)/(D^2 + D)``."""
    D = int(round(np.sqrt(S.shape[0])))
    return float((np.trace(S).real + D) / (D**2 + D))


def decay_rate_from_kraus(channel: KrausChannel) -> float:
    """RB decay parameter ``alpha = (sum_k |Tr A_k|^2 - 1)/(D^2 - 1)``."""
    D = channel.dim
    s = sum(abs(np.trace(A)) ** 2 for A in channel.kraus)
    return float((s - 1) / (D**2 - 1))


def fidelity_from_alpha(alpha: float, D: int) -> float:
    """Average gate fidelity from a fitted decay parameter: ``alpha + (1-alpha)/D``."""
    if alpha <= 0:
        raise ValueError("decay parameter must be positive")
    return float(alpha + (1 - alpha) / D)


def interleaved_fidelity(alpha: float, alpha_i: float, D: int) -> float:
    """Gate fidelity of the interleaved gate from the two decay parameters."""
    if alpha <= 0:
        raise ValueError("reference decay parameter must be positive")
    if alpha_i > alpha * (1 + 1e-9):
        warnings.warn(
            "interleaved decay exceeds the reference decay; the fit is unphysical",
            stacklevel=2,
        )
    return float(1 - (D - 1) / D * (1 - alpha_i / alpha))


@dataclass
class ThermalParams:
    """Thermal-relaxation times plus per-kind gate durations (all stored in ns)."""

    t1: float
    t2: float
    tg_1q: float
    tg_2q: float
    # XY(theta) gate time is theta/pi * tg_2q, matching evolution-time scaling
    scale: float = 1.0

    def channel(self, tg_ns: float) -> KrausChannel:
        return thermal_relaxation(self.t1, self.t2, tg_ns * self.scale)


class NoiseModel:
    """Map from elementary-gate kind to a noise channel recipe.

    Recipes are keyed by the lowercase gate kind (``u1``, ``u2``, ``u3``,
    ``cnot``, ``iswap``, ``xy``, ``native``).  ``u1`` defaults to noiseless.
    Single-qubit recipes yield 1-qubit channels applied to the gate's target;
    two-qubit recipes yield 4-dimensional channels.
    """

    def __init__(self, recipes: dict | None = None):
        self.recipes = dict(recipes or {})

    def channel_for(self, kind: str, theta: float | None = None) -> KrausChannel | None:
        """Noise channel for one elementary gate, or None when noiseless."""
        recipe = self.recipes.get(kind.lower())
        if recipe is None:
            return None
        if callable(recipe):
            return recipe(theta)
        return recipe

    @staticmethod
    def noiseless() -> "NoiseModel":
        return NoiseModel({})

    @staticmethod
    def depolarizing_model(
        p_2q: float = 0.01, p_u2: float = 0.002, p_u3: float = 0.004
    ) -> "NoiseModel":
        two_q = depolarizing(2, p_2q)
        return NoiseModel(
            {
                "u2": depolarizing(1, p_u2),
                "u3": depolarizing(1, p_u3),
                "cnot": two_q,
                "iswap": two_q,
                "native": two_q,
            }
        )

    @staticmethod
    def amplitude_damping_model(
        gamma_2q: float = 0.01, gamma_u2: float = 0.003, gamma_u3: float = 0.006
    ) -> "NoiseModel":
        both = amplitude_damping(gamma_2q).tensor(amplitude_damping(gamma_2q))
        return NoiseModel(
            {
                "u2": amplitude_damping(gamma_u2),
                "u3": amplitude_damping(gamma_u3),
                "cnot": both,
                "iswap": both,
                "native": both,
            }
        )

    @staticmethod
    def thermal_model(
        t1="100ms", t2="20ms", tg_1q="20ns", tg_2q="60ns", scale: float = 1.0
    ) -> "NoiseModel":
        """Thermal relaxation acting independently on both qubits of 2-qubit
        gates; ``scale`` multiplies every gate time (exposed because the
        nominal times give immeasurably small per-gate error)."""
        params = ThermalParams(
            parse_time_ns(t1), parse_time_ns(t2), parse_time_ns(tg_1q), parse_time_ns(tg_2q), scale
        )
        one_q = params.channel(params.tg_1q)
        two_q = params.channel(params.tg_2q)
        both = two_q.tensor(two_q)

        def xy_channel(theta):
            th = abs(theta if theta is not None else np.pi)
            c = params.channel(params.tg_2q * th / np.pi)
            return c.tensor(c)

        return NoiseModel(
            {
                "u2": one_q,
                "u3": one_q,
                "cnot": both,
                "iswap": both,
                "native": xy_channel,
                "xy": xy_channel,
            }
        )

    @staticmethod
    def from_dict(spec: dict) -> "NoiseModel":
        """Build from a JSON-friendly description, e.g.
        ``{"model": "depolarizing", "p_2q": 0.01, ...}``."""
        spec = dict(spec)
        model = spec.pop("model")
        if model == "none":
            return NoiseModel.noiseless()
        if model == "depolarizing":
            return NoiseModel.depolarizing_model(**spec)
        if model == "amplitude_damping":
            return NoiseModel.amplitude_damping_model(**spec)
        if model == "thermal":
            return NoiseModel.thermal_model(**spec)
        raise ValueError(f"unknown noise model {model!r}")
