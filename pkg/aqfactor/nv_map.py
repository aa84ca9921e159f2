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
Maps the two-qubit adiabatic problem onto the electron and 14N nuclear spins of an NV center.

The ground-state spin Hamiltonian is taken in the secular approximation (only the A_par Sz Iz part of the
hyperfine tensor). In the rotating frame the driven two-qubit Hamiltonian is

    (d_mw + d_rf) I + 2 W_mw Sx Iz - d_rf Iz + W_rf Ix - d_mw Sz

and a Hadamard on the electron exchanges Sx and Sz, turning it into (1 - s) g2 (Sx + Ix) + s g1 2 Sz Iz.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np

from . import config
from . import constants as C
from . import qcore
from .adiabatic_engine import AdiabaticProblem, default_problem_hamiltonian, initial_hamiltonian
from .utils import AqfactorError

logger = logging.getLogger(__name__)


class NotRealizable(AqfactorError):
    pass


@dataclass
class NvParams(config.Config):
    """
    NV ground-state parameters. Energies in MHz, field in gauss, gyromagnetic ratios in MHz/G (electron)
    and kHz/G (nucleus).
    """
    d: float = C.NV_D_MHZ
    q: float = C.NV_Q_MHZ
    gamma_e: float = C.NV_GAMMA_E_MHZ_PER_G
    gamma_n: float = C.NV_GAMMA_N_KHZ_PER_G
    bz: float = C.NV_BZ_GAUSS
    a_par: float = C.NV_A_PAR_MHZ


@dataclass
class RotFrameParams(config.Config):
    omega_mw: float = 0.
    omega_rf: float = 0.
    delta_mw: float = 0.
    delta_rf: float = 0.

    def to_list(self) -> List[float]:
        return [self.omega_mw, self.omega_rf, self.delta_mw, self.delta_rf]


class RotFrameHamiltonian(NamedTuple):
    operator: qcore.ComplexMatrix
    offset: float


def level_energy(p: NvParams, ms: int, mi: int) -> float:
    return (p.d * ms ** 2 + p.gamma_e * p.bz * ms
            + p.q * mi ** 2 + p.gamma_n / 1000. * p.bz * mi
            + p.a_par * ms * mi)


def nv_level_energies(p: NvParams) -> np.ndarray:
    """
    The nine energies E(m_s, m_I) in MHz, m_s outer and m_I inner over (-1, 0, +1).
    """
    return np.array([level_energy(p, ms, mi) for ms in C.NV_SPIN_PROJECTIONS for mi in C.NV_SPIN_PROJECTIONS])


def nv_level_table(p: NvParams) -> List[Tuple[int, int, float]]:
    return [(ms, mi, level_energy(p, ms, mi)) for ms in C.NV_SPIN_PROJECTIONS for mi in C.NV_SPIN_PROJECTIONS]


def transition_frequencies(p: NvParams) -> List[Tuple[str, str, float]]:
    """
    Electron (m_s 0 -> -1) lines for each nuclear projection and nuclear (m_I +1 -> 0) lines in each of the two
    electron levels of the encoded subspace, as (kind, label, frequency in MHz).
    """
    lines = [("mw", "m_I=%+d" % mi, abs(level_energy(p, -1, mi) - level_energy(p, 0, mi)))
             for mi in C.NV_SPIN_PROJECTIONS]
    lines += [("rf", "m_s=%+d" % ms, abs(level_energy(p, ms, 1) - level_energy(p, ms, 0)))
              for ms in (0, -1)]
    return lines


def rot_frame_hamiltonian(r: RotFrameParams) -> RotFrameHamiltonian:
    """
    Traceless rotating-frame operator with the identity coefficient d_mw + d_rf kept separately.
    """
    ops = qcore.spin_operators()
    operator = (2 * r.omega_mw * ops.sx @ ops.iz
                - r.delta_rf * ops.iz
                + r.omega_rf * ops.ix
                - r.delta_mw * ops.sz)
    return RotFrameHamiltonian(operator=operator, offset=r.delta_mw + r.delta_rf)


def electron_hadamard() -> qcore.ComplexMatrix:
    return qcore.tensor(qcore.hadamard(), qcore.identity(2))


def hadamard_conjugate_electron(h: qcore.ComplexMatrix) -> qcore.ComplexMatrix:
    h = np.asarray(h, dtype=complex)
    if h.shape != (C.TWO_QUBIT_DIM, C.TWO_QUBIT_DIM):
        raise qcore.DimensionMismatch("expected a 4x4 operator, got shape %s" % (h.shape,))
    u = electron_hadamard()
    return u @ h @ u


def check_realizable(problem: AdiabaticProblem):
    """
    The direct rotating-frame realization exists for H0 = g2 (Sx + Ix) and Hp = g1 2 Sz Iz.
    """
    if problem.dim != C.TWO_QUBIT_DIM:
        raise NotRealizable("the NV register has two qubits, the problem has dimension %d" % problem.dim)
    if not np.allclose(problem.h0, initial_hamiltonian(2, problem.g2), atol=C.HERMITICITY_TOL) \
            or not np.allclose(problem.hp, default_problem_hamiltonian(problem.g1), atol=C.HERMITICITY_TOL):
        raise NotRealizable("only H0 = g2 (Sx + Ix) with Hp = g1 2 Sz Iz maps onto the rotating-frame controls")


def schedule_to_controls(problem: AdiabaticProblem, t: float) -> RotFrameParams:
    """
    Controls realizing H(t) after the electron Hadamard: W_mw = s g1, W_rf = -d_mw = (1 - s) g2, d_rf = 0.

    :raises NotRealizable: If the problem is not the two-qubit problem above.
    :raises TimeOutOfRange: Outside [0, T].
    """
    check_realizable(problem)
    s = problem.schedule.s(t)
    return RotFrameParams(omega_mw=s * problem.g1,
                          omega_rf=(1. - s) * problem.g2,
                          delta_mw=-(1. - s) * problem.g2,
                          delta_rf=0.)


def control_schedule(problem: AdiabaticProblem, times: Sequence[float]) -> List[RotFrameParams]:
    return [schedule_to_controls(problem, t) for t in times]


def perturbed_problem(problem: AdiabaticProblem, mw_factor: float, rf_factor: float) -> AdiabaticProblem:
    """
    Problem realized when the MW and RF Rabi amplitudes are scaled by static factors: Hp -> mw_factor Hp and
    H0 -> g2 (Sx + rf_factor Ix). Detunings are unaffected.
    """
    check_realizable(problem)
    ops = qcore.spin_operators()
    return AdiabaticProblem(h0=problem.g2 * (ops.sx + rf_factor * ops.ix),
                            hp=mw_factor * problem.hp,
                            g1=problem.g1, g2=problem.g2,
                            schedule=problem.schedule,
                            degeneracy_tol=problem.degeneracy_tol)


def prepare_initial_state() -> qcore.StateVector:
    """
    Rotations by pi/2 about -y on both spins of the polarized |00>, giving (|0> - |1>)(|0> - |1>) / 2.
    """
    rot = qcore.rotation(np.pi / 2, -np.pi / 2)
    return qcore.tensor(rot, rot) @ qcore.ket("00")


def controls_table(problem: AdiabaticProblem, times: Sequence[float]) -> List[Dict[str, float]]:
    return [{"t": float(t), "s": problem.schedule.s(t), **c.as_dict()}
            for t, c in zip(times, control_schedule(problem, times))]
