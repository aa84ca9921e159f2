# Copyright 2017--2022 Amazon.com, Inc. or its affiliates. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License"). You may not
# use this file except in compliance with the License. A copy of the License
# is located at
#
#     http://aws.amazon.com/apache2.0/
#
# or in the "license" file accompanying this file. This file is distributed on
# an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""
Dense complex linear algebra and spin-1/2 operators on small Hilbert spaces.

Basis convention: |0> is the +1/2 eigenstate of Sz. On the two-qubit register the electron
spin is the left (most significant) tensor factor and the nuclear spin the right one, so the
basis index of |en> is 2*e + n and |01> means electron in |0>, nucleus in |1>.
"""
import functools
import logging
from typing import List, NamedTuple, Tuple, Union

import numpy as np
import scipy.linalg

from . import constants as C
from .utils import AqfactorError

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray
StateVector = np.ndarray
DensityMatrix = np.ndarray
State = Union[StateVector, DensityMatrix]


class NonHermitianInput(AqfactorError):
    pass


class DimensionMismatch(AqfactorError):
    pass


class InvalidDensityMatrix(AqfactorError):
    pass


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=complex)


def spin_half_ops() -> Tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    """
    Returns the spin-1/2 operators (Sx, Sy, Sz), each with eigenvalues +1/2 and -1/2.
    """
    sx = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
    sy = np.array([[0, -0.5j], [0.5j, 0]], dtype=complex)
    sz = np.array([[0.5, 0], [0, -0.5]], dtype=complex)
    return sx, sy, sz


def tensor(*ops: ComplexMatrix) -> ComplexMatrix:
    """
    Kronecker product of one or more operators (or state vectors), left factor most significant.
    """
    if not ops:
        raise DimensionMismatch("tensor needs at least one factor")
    return functools.reduce(np.kron, [np.asarray(op, dtype=complex) for op in ops])


class SpinOperators(NamedTuple):
    """
    Spin operators of the two-qubit register: S* act on the electron, I* on the nucleus.
    """
    sx: ComplexMatrix
    sy: ComplexMatrix
    sz: ComplexMatrix
    ix: ComplexMatrix
    iy: ComplexMatrix
    iz: ComplexMatrix


def spin_operators() -> SpinOperators:
    sx, sy, sz = spin_half_ops()
    i2 = identity(2)
    return SpinOperators(sx=tensor(sx, i2), sy=tensor(sy, i2), sz=tensor(sz, i2),
                         ix=tensor(i2, sx), iy=tensor(i2, sy), iz=tensor(i2, sz))


def qubit_operator(op: ComplexMatrix, index: int, n_qubits: int) -> ComplexMatrix:
    """
    Embeds a single-qubit operator at position `index` (0 = leftmost) of an n-qubit register.
    """
    if not 0 <= index < n_qubits:
        raise DimensionMismatch("qubit index %d out of range for %d qubits" % (index, n_qubits))
    factors = [identity(2)] * n_qubits
    factors[index] = op
    return tensor(*factors)


def hadamard() -> ComplexMatrix:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def swap_operator() -> ComplexMatrix:
    """
    Exchanges the two qubits of the register.
    """
    swap = np.zeros((4, 4), dtype=complex)
    for e in range(2):
        for n in range(2):
            swap[2 * n + e, 2 * e + n] = 1.
    return swap


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    return a @ b - b @ a


def hermiticity_error(m: ComplexMatrix) -> float:
    """
    Largest entrywise deviation max |M - M^dagger|.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("expected a square matrix, got shape %s" % (m.shape,))
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(m: ComplexMatrix, tol: float = C.HERMITICITY_TOL, name: str = "matrix") -> None:
    error = hermiticity_error(m)
    if error > tol:
        raise NonHermitianInput("%s is not Hermitian: max |M - M^dagger| = %.3e > %.1e" % (name, error, tol))


def unitarity_error(u: ComplexMatrix) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - identity(u.shape[0]))))


def expm_hermitian(h: ComplexMatrix, t: float, tol: float = C.HERMITICITY_TOL) -> ComplexMatrix:
    """
    Propagator exp(-i H t) of a Hermitian H, computed from its eigendecomposition.

    :param h: Hermitian matrix.
    :param t: Time (units of 1/energy).
    :param tol: Hermiticity tolerance.
    :return: Unitary matrix.
    """
    check_hermitian(h, tol, name="generator")
    h = np.asarray(h, dtype=complex)
    evals, evecs = scipy.linalg.eigh((h + h.conj().T) / 2)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def expm_hermitian_batch(hs: np.ndarray, dt: float) -> np.ndarray:
    """
    exp(-i H_k dt) for a stack of Hermitian matrices of shape (n, d, d). Hermiticity is not re-checked;
    callers build the stack from checked operators.
    """
    hs = np.asarray(hs, dtype=complex)
    evals, evecs = np.linalg.eigh((hs + np.conj(np.swapaxes(hs, -1, -2))) / 2)
    phases = np.exp(-1j * evals * dt)
    return (evecs * phases[..., None, :]) @ np.conj(np.swapaxes(evecs, -1, -2))


def ordered_product(us: np.ndarray) -> ComplexMatrix:
    """
    Time-ordered product U_{n-1} ... U_1 U_0 of a stack of matrices (later factors on the left),
    computed by pairwise reduction.
    """
    us = np.asarray(us, dtype=complex)
    if us.ndim != 3 or us.shape[0] == 0:
        raise DimensionMismatch("expected a non-empty stack of matrices, got shape %s" % (us.shape,))
    while us.shape[0] > 1:
        if us.shape[0] % 2:
            us = np.concatenate([us, identity(us.shape[1])[None]], axis=0)
        us = us[1::2] @ us[0::2]
    return us[0]


def basis_labels(n_qubits: int) -> List[str]:
    if n_qubits == 0:
        return [""]
    return [format(i, "0%db" % n_qubits) for i in range(2 ** n_qubits)]


def basis_state(index: int, dim: int) -> StateVector:
    if not 0 <= index < dim:
        raise DimensionMismatch("basis index %d out of range for dimension %d" % (index, dim))
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.
    return psi


def ket(label: str) -> StateVector:
    """
    Computational basis state from a bit string, e.g. ket("01").
    """
    return basis_state(int(label, 2), 2 ** len(label))


def normalize(psi: StateVector) -> StateVector:
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi)


def projector(psi: StateVector) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def as_density_matrix(state: State) -> DensityMatrix:
    state = np.asarray(state, dtype=complex)
    return projector(state) if state.ndim == 1 else state


def populations(state: State) -> np.ndarray:
    """
    Computational basis populations of a state vector or density matrix.
    """
    state = np.asarray(state)
    if state.ndim == 1:
        return np.abs(state) ** 2
    return np.real(np.diag(state)).copy()


def expectation(h: ComplexMatrix, state: State) -> float:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return float(np.real(np.vdot(state, h @ state)))
    return float(np.real(np.trace(h @ state)))


def fidelity(a: State, b: StateVector) -> float:
    """
    Overlap fidelity |<b|a>|^2 for a pure state a, or <b|rho|b> for a density matrix a.

    :param a: State vector or density matrix.
    :param b: Reference state vector.
    :return: Fidelity in [0, 1].
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if b.ndim != 1 or a.shape[0] != b.shape[0] or (a.ndim == 2 and a.shape[1] != b.shape[0]):
        raise DimensionMismatch("fidelity of shapes %s and %s" % (a.shape, b.shape))
    if a.ndim == 1:
        value = abs(np.vdot(b, a)) ** 2
    else:
        value = np.real(np.vdot(b, a @ b))
    return float(np.clip(value, 0., 1.))


def rotation(theta: float, phi: float) -> ComplexMatrix:
    """
    Single-qubit rotation exp(-i theta (cos(phi) Sx + sin(phi) Sy)); phi=0 rotates about x, phi=pi/2 about y.
    """
    sx, sy, _ = spin_half_ops()
    return expm_hermitian(np.cos(phi) * sx + np.sin(phi) * sy, theta)


def min_eigenvalue(h: ComplexMatrix) -> float:
    return float(scipy.linalg.eigvalsh(h)[0])


def is_density_matrix(rho: DensityMatrix, tol: float = C.DENSITY_MATRIX_TOL) -> bool:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    return (hermiticity_error(rho) <= tol
            and abs(np.trace(rho) - 1.) <= tol
            and min_eigenvalue((rho + rho.conj().T) / 2) >= -tol)


def check_density_matrix(rho: DensityMatrix, tol: float = C.DENSITY_MATRIX_TOL) -> None:
    if not is_density_matrix(rho, tol):
        raise InvalidDensityMatrix("not a density matrix within tolerance %.1e" % tol)


def ground_space(h: ComplexMatrix, degeneracy_tol: float = C.DEGENERACY_TOL) -> Tuple[float, np.ndarray]:
    """
    Lowest eigenvalue of H and an orthonormal basis (columns) of all eigenvectors whose energy lies within
    degeneracy_tol * ||H|| of it.
    """
    evals, evecs = scipy.linalg.eigh(h)
    tol = degeneracy_tol * np.linalg.norm(h, 2)
    mask = evals - evals[0] <= tol
    return float(evals[0]), evecs[:, mask]


def spectral_gap(evals: np.ndarray, tol: float = 0.) -> float:
    """
    Gap between the lowest eigenvalue and the first eigenvalue more than `tol` above it (0 if none).
    """
    evals = np.sort(np.asarray(evals, dtype=float))
    above = evals[evals - evals[0] > tol]
    return float(above[0] - evals[0]) if above.size else 0.
