"""Qubit and spin-1 operator constants.

Basis conventions used across the package:

* Qubit: ``|0>`` is the upper level of ``H = omega*sigma_z/2`` (energy
  +omega/2), ``|1>`` the lower.  Consequently ``sigma_plus = |0><1|`` raises
  energy and ``sigma_minus = |1><0|`` lowers it.
* Qutrit: basis ordered by magnetic number m = (+1, 0, -1), so index 0 is the
  top level and index 2 the bottom.  ``S_z = diag(1, 0, -1)`` and the ladder
  operators ``Q_pm = (S_x +- i S_y)/2`` move one step up/down with matrix
  elements 1/sqrt(2).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "I2",
    "SX",
    "SY",
    "SZ",
    "SPLUS",
    "SMINUS",
    "S1X",
    "S1Y",
    "S1Z",
    "Q_PLUS",
    "Q_MINUS",
    "pauli",
    "spin1",
    "basis_state",
]

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |0><1|
SMINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|

_s = 1.0 / np.sqrt(2.0)
S1X = np.array([[0, _s, 0], [_s, 0, _s], [0, _s, 0]], dtype=complex)
S1Y = np.array([[0, -1j * _s, 0], [1j * _s, 0, -1j * _s], [0, 1j * _s, 0]], dtype=complex)
S1Z = np.diag([1.0, 0.0, -1.0]).astype(complex)
Q_PLUS = (S1X + 1j * S1Y) / 2
Q_MINUS = (S1X - 1j * S1Y) / 2

_PAULI = {"x": SX, "y": SY, "z": SZ}
_SPIN1 = {"x": S1X, "y": S1Y, "z": S1Z}


def pauli(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}") from None


def spin1(axis: str) -> np.ndarray:
    try:
        return _SPIN1[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}") from None


def basis_state(dim: int, index: int) -> np.ndarray:
    """Density matrix |index><index| on a dim-dimensional space."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dimension {dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[index, index] = 1.0
    return rho
