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
Two-qubit state tomography from 16 MW/RF readout settings.

Each setting applies a pulse from (identity, pi, pi/2 about x, pi/2 about y) to the electron and to the nucleus and
records the four computational-basis populations. The 64 populations are linear in the 16 real Pauli coefficients
r_ab of rho = 1/4 sum_ab r_ab sigma_a (x) sigma_b and are inverted by least squares.
"""
import functools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from . import constants as C
from . import qcore
from . import utils
from .utils import AqfactorError

logger = logging.getLogger(__name__)


class RankDeficient(AqfactorError):
    pass


@dataclass(frozen=True)
class ReadoutSetting:
    index: int
    mw_pulse: str
    rf_pulse: str

    @property
    def name(self) -> str:
        return "%s/%s" % (self.mw_pulse, self.rf_pulse)


@dataclass
class TomographyRecord:
    setting: ReadoutSetting
    populations: np.ndarray
    shots: int = C.EXACT_SHOTS

    def row(self) -> List[Any]:
        return [self.setting.index, self.setting.mw_pulse, self.setting.rf_pulse] + \
               [float(p) for p in self.populations] + [self.shots]


RECORD_COLUMNS = ["setting", "mw_pulse", "rf_pulse"] + ["pop%s" % label for label in C.TWO_QUBIT_LABELS] + ["shots"]


def readout_settings() -> List[ReadoutSetting]:
    """
    The 16 settings, MW pulse outer and RF pulse inner.
    """
    return [ReadoutSetting(i * len(C.READOUT_PULSES) + j, mw, rf)
            for i, mw in enumerate(C.READOUT_PULSES) for j, rf in enumerate(C.READOUT_PULSES)]


def pulse_unitary(pulse: str) -> qcore.ComplexMatrix:
    if pulse == C.PULSE_IDENTITY:
        return qcore.identity(2)
    if pulse == C.PULSE_PI:
        return qcore.rotation(np.pi, 0.)
    if pulse == C.PULSE_HALF_PI_X:
        return qcore.rotation(np.pi / 2, 0.)
    if pulse == C.PULSE_HALF_PI_Y:
        return qcore.rotation(np.pi / 2, np.pi / 2)
    raise ValueError("Unknown readout pulse %s. Choices: %s" % (pulse, C.READOUT_PULSES))


def setting_unitary(setting: ReadoutSetting) -> qcore.ComplexMatrix:
    return qcore.tensor(pulse_unitary(setting.mw_pulse), pulse_unitary(setting.rf_pulse))


def simulate_readout(rho: qcore.DensityMatrix, setting: ReadoutSetting, shots: int = C.EXACT_SHOTS,
                     rng: Optional[np.random.Generator] = None) -> TomographyRecord:
    """
    Populations of U rho U^dagger; with shots > 0, empirical frequencies of a multinomial draw.
    """
    qcore.check_density_matrix(rho)
    u = setting_unitary(setting)
    populations = np.clip(qcore.populations(u @ rho @ u.conj().T), 0., None)
    populations = populations / populations.sum()
    if shots > 0:
        rng = np.random.default_rng() if rng is None else rng
        populations = rng.multinomial(shots, populations) / shots
    return TomographyRecord(setting=setting, populations=populations, shots=shots)


def _simulate_setting(args: Tuple[qcore.DensityMatrix, ReadoutSetting, int, int]) -> TomographyRecord:
    rho, setting, shots, seed = args
    return simulate_readout(rho, setting, shots, utils.derived_rng(seed, setting.index))


def simulate_tomography(rho: qcore.DensityMatrix, shots: int = C.EXACT_SHOTS, seed: int = C.DEFAULT_SEED,
                        max_processes: int = 1) -> List[TomographyRecord]:
    """
    Records of all 16 settings; the draws of setting k come from a generator seeded by (seed, k).
    """
    jobs = [(np.asarray(rho, dtype=complex), setting, shots, seed) for setting in readout_settings()]
    with utils.create_pool(max_processes) as pool:
        return pool.map(_simulate_setting, jobs)


@functools.lru_cache(maxsize=1)
def pauli_basis() -> np.ndarray:
    """
    The 16 operators sigma_a (x) sigma_b, a major, with sigma_0 = I.
    """
    sx, sy, sz = qcore.spin_half_ops()
    paulis = [qcore.identity(2), 2 * sx, 2 * sy, 2 * sz]
    return np.stack([qcore.tensor(a, b) for a in paulis for b in paulis])


@functools.lru_cache(maxsize=1)
def design_matrix() -> np.ndarray:
    """
    64 x 16 real matrix mapping Pauli coefficients to populations, rows ordered by setting then outcome.
    """
    rows = []
    for setting in readout_settings():
        u = setting_unitary(setting)
        columns = [0.25 * np.real(np.diag(u @ p @ u.conj().T)) for p in pauli_basis()]
        rows.append(np.stack(columns, axis=1))
    return np.concatenate(rows, axis=0)


def condition_number() -> float:
    singular_values = scipy.linalg.svdvals(design_matrix())
    return float(singular_values[0] / singular_values[-1])


def _ordered_populations(records: Sequence[TomographyRecord]) -> np.ndarray:
    by_index = {record.setting.index: record for record in records}
    expected = set(range(len(C.READOUT_PULSES) ** 2))
    if set(by_index) != expected or len(records) != len(expected):
        raise AqfactorError("tomography needs exactly one record per setting, got settings %s" % sorted(by_index))
    return np.concatenate([by_index[i].populations for i in sorted(by_index)])


def linear_inversion(records: Sequence[TomographyRecord]) -> qcore.DensityMatrix:
    """
    Least-squares estimate of rho from the 64 populations, before the physicality projection.

    :raises RankDeficient: If the settings do not determine all 16 parameters.
    """
    matrix = design_matrix()
    coefficients, _, rank, _ = scipy.linalg.lstsq(matrix, _ordered_populations(records))
    if rank < matrix.shape[1]:
        raise RankDeficient("design matrix has rank %d < %d" % (rank, matrix.shape[1]))
    return 0.25 * np.einsum("k,kij->ij", coefficients, pauli_basis())


def project_to_physical(m: qcore.ComplexMatrix) -> qcore.DensityMatrix:
    """
    Nearest density matrix in Frobenius norm: the eigenvalues are projected onto the probability simplex.

    This is not clip-and-renormalize (zero the negative eigenvalues, then divide by the trace). A common shift is
    subtracted from all eigenvalues before clipping so that the trace is 1 without rescaling; the result never lies
    farther from any density matrix than the input does.
    """
    m = (np.asarray(m, dtype=complex) + np.asarray(m, dtype=complex).conj().T) / 2
    evals, evecs = scipy.linalg.eigh(m)
    descending = np.sort(evals)[::-1]
    cumulative = np.cumsum(descending) - 1.
    ranks = np.arange(1, len(evals) + 1)
    last = np.flatnonzero(descending - cumulative / ranks > 0)[-1]
    shift = cumulative[last] / (last + 1)
    projected = np.clip(evals - shift, 0., None)
    return (evecs * projected) @ evecs.conj().T


def reconstruct(records: Sequence[TomographyRecord]) -> qcore.DensityMatrix:
    return project_to_physical(linear_inversion(records))


def report_fidelity(rho: qcore.DensityMatrix, target: Optional[qcore.StateVector] = None) -> float:
    """
    <target|rho|target>, by default with the ideal final state (|01> + |10>)/sqrt(2).
    """
    target = (qcore.ket("01") + qcore.ket("10")) / np.sqrt(2) if target is None else target
    return qcore.fidelity(rho, target)


@dataclass
class TomographyResult:
    records: List[TomographyRecord]
    rho: qcore.DensityMatrix
    fidelity: float
    condition_number: float

    def density_matrix_dict(self) -> Dict[str, Any]:
        return {"labels": list(C.TWO_QUBIT_LABELS),
                "real": np.real(self.rho).tolist(),
                "imag": np.imag(self.rho).tolist(),
                "fidelity": self.fidelity}


def run_tomography(rho: qcore.DensityMatrix, shots: int = C.EXACT_SHOTS, seed: int = C.DEFAULT_SEED,
                   max_processes: int = 1) -> TomographyResult:
    records = simulate_tomography(rho, shots, seed, max_processes)
    estimate = reconstruct(records)
    fidelity = report_fidelity(estimate)
    logger.info("Tomography (%s): fidelity %.6f with the ideal final state",
                "exact" if shots == C.EXACT_SHOTS else "%d shots per setting" % shots, fidelity)
    return TomographyResult(records=records, rho=estimate, fidelity=fidelity, condition_number=condition_number())
