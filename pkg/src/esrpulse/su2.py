"""Exact 2x2 propagator algebra for a single spin-1/2.

Sign convention (used everywhere in the package): a rotation by ``theta``
about the in-plane axis ``(cos phi, sin phi, 0)`` is

    U = exp(-i * theta/2 * (cos(phi) * sigma_x + sin(phi) * sigma_y))

which is a right-handed rotation of the Bloch vector.  A positive rotation
about +x therefore takes +z to -y, and free precession at a positive
detuning turns +x towards +y.

Unitaries are plain ``(2, 2)`` complex arrays and Bloch vectors are ``(3,)``
float arrays.  Global phase is kept as computed; only :func:`gate_fidelity`
and :func:`apply_to_bloch` are insensitive to it.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Sequence

import numpy as np

from ._validation import DomainError, check_finite, check_unitary

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def axis_unitary(angle: float, axis: Sequence[float]) -> np.ndarray:
    """Rotation by ``angle`` about an arbitrary (not necessarily unit) axis.

    A zero axis gives the identity.
    """
    nx, ny, nz = (float(a) for a in axis)
    check_finite("axis", nx, ny, nz)
    check_finite("angle", angle)
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    if norm == 0.0:
        return IDENTITY.copy()
    nx, ny, nz = nx / norm, ny / norm, nz / norm
    c = math.cos(angle / 2)
    s = math.sin(angle / 2)
    return np.array(
        [[c - 1j * s * nz, -1j * s * (nx - 1j * ny)],
         [-1j * s * (nx + 1j * ny), c + 1j * s * nz]],
        dtype=complex,
    )


def rotation_unitary(theta: float, phi: float) -> np.ndarray:
    """Propagator of the ideal pulse ``[theta]_phi``."""
    check_finite("theta/phi", theta, phi)
    return axis_unitary(theta, (math.cos(phi), math.sin(phi), 0.0))


def rz(phi: float) -> np.ndarray:
    """Rotation by ``phi`` about +z."""
    return axis_unitary(phi, (0.0, 0.0, 1.0))


def field_unitary(rabi_x: float, rabi_y: float, detuning: float, duration: float) -> np.ndarray:
    """Propagator for a constant rotating-frame field held for ``duration``.

    Frequencies are in MHz and ``duration`` in ns, so the rotation angle is
    ``2*pi*|(rabi_x, rabi_y, detuning)|*duration*1e-3`` radians.
    """
    check_finite("field", rabi_x, rabi_y, detuning, duration)
    magnitude = math.sqrt(rabi_x**2 + rabi_y**2 + detuning**2)
    angle = 2 * math.pi * magnitude * duration * 1e-3
    return axis_unitary(angle, (rabi_x, rabi_y, detuning))


def compose(unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """Net propagator of ``unitaries`` listed in time order.

    The first element acts first, so the product is formed right-to-left:
    ``compose([A, B]) == B @ A``.
    """
    unitaries = list(unitaries)
    if not unitaries:
        raise DomainError("compose needs at least one unitary")
    return reduce(lambda acc, u: np.asarray(u, dtype=complex) @ acc, unitaries[1:],
                  np.asarray(unitaries[0], dtype=complex))


def _error_vector_norm(u: np.ndarray, v: np.ndarray) -> float:
    # U^dag V = e^{i g} (a0 I - i a.sigma); |a| = sin(error angle / 2).
    w = u.conj().T @ v
    a = [abs(np.trace(w @ p)) / 2 for p in PAULIS]
    return min(1.0, math.sqrt(sum(x * x for x in a)))


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """``|Tr(U^dag V)| / 2``, insensitive to global phase."""
    u = check_unitary(u)
    v = check_unitary(v)
    return min(1.0, abs(np.trace(u.conj().T @ v)) / 2)


def gate_infidelity(u: np.ndarray, v: np.ndarray) -> float:
    """``1 - gate_fidelity(u, v)`` evaluated without cancellation.

    Computed from the Pauli components of ``U^dag V`` so that infidelities
    far below machine epsilon (e.g. ``1e-18``) keep their relative accuracy.
    """
    u = check_unitary(u)
    v = check_unitary(v)
    a = _error_vector_norm(u, v)
    return a * a / (1.0 + math.sqrt(1.0 - a * a))


def bloch_to_density(m: Sequence[float]) -> np.ndarray:
    mx, my, mz = m
    return 0.5 * (IDENTITY + mx * SIGMA_X + my * SIGMA_Y + mz * SIGMA_Z)


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    return np.array([np.trace(rho @ p).real for p in PAULIS])


def apply_to_bloch(u: np.ndarray, m: Sequence[float]) -> np.ndarray:
    """Rotate Bloch vector ``m`` by conjugating its density matrix with ``u``."""
    u = check_unitary(u)
    m = np.asarray(m, dtype=float)
    if m.shape != (3,) or not np.all(np.isfinite(m)):
        raise DomainError("Bloch vector must be three finite components")
    if np.linalg.norm(m) > 1 + 1e-9:
        raise DomainError("Bloch vector norm exceeds 1")
    rho = bloch_to_density(m)
    return density_to_bloch(u @ rho @ u.conj().T)
