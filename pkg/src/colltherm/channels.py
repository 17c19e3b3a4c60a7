"""Physical maps of the collisional protocol.

This module builds every channel the protocol composes:

* thermal probe states (Gibbs states of ``H = omega*sigma_z/2``),
* probe-ancilla collision unitaries for the excitation-exchange coupling
  ``H_int = g (sigma_+ (x) A_- + sigma_- (x) A_+)`` with a qubit or a spin-1
  (qutrit) ancilla,
* the environment-trace Kraus decomposition of a collision,
* ancilla rotations ``exp(-i theta G_axis)`` and their superoperators,
* the partial-thermalization channel: the exponential of the standard
  two-level GKSL generator with rates ``gamma (nbar + 1)`` (decay) and
  ``gamma nbar`` (excitation), whose unique fixed point is the thermal state.

Superoperators use the row-major vectorization of :mod:`colltherm.linalg`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, operators
from .linalg import DensityMatrix, dag, kron

__all__ = [
    "BathSpec",
    "CollisionSpec",
    "RotationSpec",
    "KrausSet",
    "thermal_populations",
    "thermal_state",
    "nbar",
    "collision_unitary_qubit",
    "collision_unitary_qubit_qutrit",
    "collision_unitary",
    "kraus_from_collision",
    "collision_superoperator",
    "rotation_superoperator",
    "lindblad_generator",
    "thermalization_channel",
]

KRAUS_COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True)
class BathSpec:
    """One bath and its probe: temperature (units of hbar*omega/k_B), probe
    frequency, probe-bath coupling rate gamma, and the thermalization time
    granted between successive ancilla collisions."""

    temperature: float
    omega: float = 1.0
    gamma: float = 1.0
    therm_time: float = 0.5

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature: must be > 0, got {self.temperature}")
        if not self.omega > 0:
            raise ValueError(f"omega: must be > 0, got {self.omega}")
        if self.gamma < 0:
            raise ValueError(f"gamma: must be >= 0, got {self.gamma}")
        if self.therm_time < 0:
            raise ValueError(f"therm_time: must be >= 0, got {self.therm_time}")

    def at_temperature(self, T: float) -> "BathSpec":
        return BathSpec(T, self.omega, self.gamma, self.therm_time)


@dataclass(frozen=True)
class CollisionSpec:
    """Collision coupling g and duration tau; only the angle g*tau matters."""

    g: float
    tau: float = 1.0

    def __post_init__(self):
        if self.g < 0:
            raise ValueError(f"g: must be >= 0, got {self.g}")
        if self.tau < 0:
            raise ValueError(f"tau: must be >= 0, got {self.tau}")

    @property
    def angle(self) -> float:
        return self.g * self.tau

    @classmethod
    def from_angle(cls, angle: float) -> "CollisionSpec":
        return cls(g=float(angle), tau=1.0)


@dataclass(frozen=True)
class RotationSpec:
    """Ancilla rotation ``exp(-i theta G)`` with G the Pauli (qubit) or
    spin-1 (qutrit) operator along ``axis``."""

    theta: float
    axis: str = "x"

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise ValueError(f"axis: must be one of x, y, z, got {self.axis!r}")

    def generator(self, dim: int) -> np.ndarray:
        if dim == 2:
            return operators.pauli(self.axis)
        if dim == 3:
            return operators.spin1(self.axis)
        raise ValueError(f"no rotation generator for ancilla dimension {dim}")

    def unitary(self, dim: int) -> np.ndarray:
        return linalg.matrix_exp(self.generator(dim), scale=-1j * self.theta)


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators of a channel; complete to 1e-10 by construction."""

    operators: tuple[np.ndarray, ...]

    def completeness_defect(self) -> float:
        d = self.operators[0].shape[0]
        acc = np.zeros((d, d), dtype=complex)
        for k in self.operators:
            acc += dag(k) @ k
        return float(np.max(np.abs(acc - np.eye(d))))

    def validate(self) -> None:
        defect = self.completeness_defect()
        if defect > KRAUS_COMPLETENESS_TOL:
            raise ValueError(f"Kraus completeness defect {defect:.3e} > {KRAUS_COMPLETENESS_TOL}")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(rho, dtype=complex))
        for k in self.operators:
            out += k @ rho @ dag(k)
        return out

    def superoperator(self) -> np.ndarray:
        d = self.operators[0].shape[0]
        sop = np.zeros((d * d, d * d), dtype=complex)
        for k in self.operators:
            sop += kron(k, k.conj())
        return sop


def thermal_populations(omega: float, T: float) -> tuple[float, float]:
    """(lambda_0, lambda_1) = (excited, ground) Gibbs populations.

    With energies E = (+omega/2, -omega/2) for basis (|0>, |1>):
    lambda_0 = 1/(1 + e^{omega/T}) < lambda_1.
    """
    if not T > 0:
        raise ValueError(f"temperature: must be > 0, got {T}")
    x = omega / T
    lam0 = 1.0 / (1.0 + np.exp(x))
    return float(lam0), float(1.0 - lam0)


def thermal_state(omega: float, T: float, dim: int = 2) -> DensityMatrix:
    """Gibbs state of ``H = omega*sigma_z/2`` at temperature T (qubit)."""
    if dim != 2:
        raise ValueError(f"thermal_state supports qubit probes only, got dim {dim}")
    lam0, lam1 = thermal_populations(omega, T)
    return DensityMatrix(np.diag([lam0, lam1]).astype(complex), (2,))


def nbar(omega: float, T: float) -> float:
    """Bose occupation of the bath mode at the probe frequency."""
    if not T > 0:
        raise ValueError(f"temperature: must be > 0, got {T}")
    return float(1.0 / np.expm1(omega / T))


def collision_unitary_qubit(spec: CollisionSpec) -> np.ndarray:
    """exp(-i H tau) for the qubit-qubit exchange H = g(s+ s- + s- s+).

    Equals the 2x2-rotation block form
    [[1,0,0,0],[0,c,-is,0],[0,-is,c,0],[0,0,0,1]] with c = cos(g tau),
    s = sin(g tau): both off-diagonal entries carry -i, as required by
    unitarity of the exponential of a real-symmetric coupling.
    """
    h = kron(operators.SPLUS, operators.SMINUS) + kron(operators.SMINUS, operators.SPLUS)
    return linalg.matrix_exp(h, scale=-1j * spec.angle)


def collision_unitary_qubit_qutrit(spec: CollisionSpec) -> np.ndarray:
    """exp(-i H tau) for the qubit-qutrit exchange H = g(s+ Q- + s- Q+).

    Probe factor first (2 x 3 = 6 dimensional).  H commutes with the total
    excitation operator sigma_z/2 (x) I + I (x) S_z, so the unitary is block
    diagonal in excitation sectors; each two-dimensional sector rotates by
    the Q-matrix element g*tau/sqrt(2).
    """
    h = kron(operators.SPLUS, operators.Q_MINUS) + kron(operators.SMINUS, operators.Q_PLUS)
    return linalg.matrix_exp(h, scale=-1j * spec.angle)


def collision_unitary(spec: CollisionSpec, ancilla_dim: int = 2) -> np.ndarray:
    if ancilla_dim == 2:
        return collision_unitary_qubit(spec)
    if ancilla_dim == 3:
        return collision_unitary_qubit_qutrit(spec)
    raise ValueError(f"no collision unitary for ancilla dimension {ancilla_dim}")


def kraus_from_collision(u: np.ndarray, rho_env: DensityMatrix) -> KrausSet:
    """Kraus operators of ``rho -> Tr_env[U (rho_env (x) rho) U^dag]``.

    ``u`` acts on env (x) ancilla with the environment factor first; the
    environment must be diagonal in the computational basis (the thermal
    probe), in which case ``K_ij = sqrt(lambda_j) <i|U|j>`` with <i|.|j>
    taken on the environment factor.
    """
    env = rho_env.mat
    off = np.max(np.abs(env - np.diag(np.diag(env))))
    if off > 1e-12:
        raise ValueError(
            f"environment must be diagonal in the computational basis (off-diagonal weight {off:.3e})"
        )
    d_env = env.shape[0]
    u = np.asarray(u)
    d_anc = u.shape[0] // d_env
    if d_env * d_anc != u.shape[0]:
        raise ValueError(
            f"unitary dimension {u.shape[0]} incompatible with environment dimension {d_env}"
        )
    lam = np.real(np.diag(env))
    ops = []
    for i in range(d_env):
        for j in range(d_env):
            block = u[i * d_anc : (i + 1) * d_anc, j * d_anc : (j + 1) * d_anc]
            ops.append(np.sqrt(max(lam[j], 0.0)) * block)
    ks = KrausSet(tuple(ops))
    ks.validate()
    return ks


def collision_superoperator(
    spec: CollisionSpec, bath: BathSpec, ancilla_dim: int = 2
) -> np.ndarray:
    """Vectorized collision channel on the ancilla: sum_k kron(K_k, K_k*)."""
    u = collision_unitary(spec, ancilla_dim)
    env = thermal_state(bath.omega, bath.temperature)
    return kraus_from_collision(u, env).superoperator()


def rotation_superoperator(spec: RotationSpec, dim: int = 2) -> np.ndarray:
    """Vectorized unitary rotation: kron(U, U*)."""
    u = spec.unitary(dim)
    return kron(u, u.conj())


def _dissipator(op: np.ndarray) -> np.ndarray:
    """Vectorized GKSL dissipator D[O] = O.O^dag - 1/2 {O^dag O, .}."""
    d = op.shape[0]
    eye = np.eye(d)
    odo = dag(op) @ op
    return kron(op, op.conj()) - 0.5 * (kron(odo, eye) + kron(eye, odo.T))


def lindblad_generator(bath: BathSpec) -> np.ndarray:
    """Vectorized Liouvillian of the probe-bath coupling.

    L = gamma (nbar+1) D[sigma_-] + gamma nbar D[sigma_+]; the stationary
    state is the Gibbs state of the probe at the bath temperature.
    """
    n = nbar(bath.omega, bath.temperature)
    return bath.gamma * (
        (n + 1.0) * _dissipator(operators.SMINUS) + n * _dissipator(operators.SPLUS)
    )


def thermalization_channel(bath: BathSpec) -> np.ndarray:
    """Partial-thermalization channel exp(L * therm_time) (4x4 superoperator)."""
    if bath.therm_time == 0.0:
        return np.eye(4, dtype=complex)
    return linalg.matrix_exp(lindblad_generator(bath), scale=bath.therm_time)
