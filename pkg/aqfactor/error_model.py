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
Imperfect initialization and static control-amplitude errors, averaged over seeded samples.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.stats

from . import adiabatic_engine
from . import config
from . import constants as C
from . import nv_map
from . import pulse_opt
from . import qcore
from . import tomography
from . import utils
from .utils import check_condition

logger = logging.getLogger(__name__)


@dataclass
class ErrorConfig(config.Config):
    """
    Depolarized fraction of the initial state, relative standard deviations of the MW and RF Rabi amplitudes
    (Gaussian truncated at +-truncation sigma), and the sampling settings.
    """
    polarization_error: float = C.DEFAULT_POLARIZATION_ERROR
    amplitude_sigma_mw: float = C.DEFAULT_AMPLITUDE_SIGMA
    amplitude_sigma_rf: float = C.DEFAULT_AMPLITUDE_SIGMA
    n_samples: int = C.DEFAULT_NUM_SAMPLES
    seed: int = C.DEFAULT_SEED
    truncation: float = C.DEFAULT_TRUNCATION

    def __post_init__(self):
        check_condition(0. <= self.polarization_error <= 1., "polarization error must lie in [0, 1]")
        check_condition(self.amplitude_sigma_mw >= 0 and self.amplitude_sigma_rf >= 0, "sigmas must be >= 0")
        check_condition(self.n_samples >= 1, "n_samples must be >= 1")
        check_condition(self.truncation > 0, "truncation must be > 0")

    @property
    def noiseless_controls(self) -> bool:
        return self.amplitude_sigma_mw == 0 and self.amplitude_sigma_rf == 0


def imperfect_initial_state(e: ErrorConfig, psi: Optional[qcore.StateVector] = None) -> qcore.DensityMatrix:
    """
    (1 - eps) |psi><psi| + eps I/4 with psi the ideal initial state by default.
    """
    psi = adiabatic_engine.prepared_initial_state() if psi is None else np.asarray(psi, dtype=complex)
    dim = psi.shape[0]
    return (1. - e.polarization_error) * qcore.projector(psi) + e.polarization_error * qcore.identity(dim) / dim


def _truncated_normal(sigma: float, truncation: float, rng: np.random.Generator) -> float:
    if sigma == 0:
        return 0.
    return float(scipy.stats.truncnorm.rvs(-truncation, truncation, loc=0., scale=sigma, random_state=rng))


def sample_amplitude_factors(e: ErrorConfig, index: int) -> Tuple[float, float]:
    """
    Static factors (1 + d_mw, 1 + d_rf) of sample `index`, drawn from a generator seeded by (seed, index).
    """
    rng = utils.derived_rng(e.seed, index)
    return (1. + _truncated_normal(e.amplitude_sigma_mw, e.truncation, rng),
            1. + _truncated_normal(e.amplitude_sigma_rf, e.truncation, rng))


@dataclass
class EnsembleResult:
    times: np.ndarray
    mean_populations: np.ndarray
    std_populations: np.ndarray
    mean_final: qcore.DensityMatrix
    final_fidelity: float
    n_samples: int

    def columns(self) -> List[str]:
        return (["t"] + ["pop%s_mean" % label for label in C.TWO_QUBIT_LABELS]
                + ["pop%s_std" % label for label in C.TWO_QUBIT_LABELS])

    def rows(self) -> List[List[float]]:
        return [[float(t)] + [float(v) for v in mean] + [float(v) for v in std]
                for t, mean, std in zip(self.times, self.mean_populations, self.std_populations)]

    def summary(self) -> Dict[str, Any]:
        return {"n_samples": self.n_samples, "final_fidelity": self.final_fidelity}


def _evolve_density(problem: adiabatic_engine.AdiabaticProblem, rho: qcore.DensityMatrix,
                    checkpoints: Sequence[float], max_dt: float) -> List[qcore.DensityMatrix]:
    states = []
    t = 0.
    for checkpoint in list(checkpoints) + [problem.total_time]:
        u = adiabatic_engine.propagator(problem, t, checkpoint, max_dt)
        rho = u @ rho @ u.conj().T
        states.append(rho)
        t = checkpoint
    return states


def _adiabatic_sample(args) -> List[qcore.DensityMatrix]:
    problem, rho0, checkpoints, max_dt, e, index = args
    mw_factor, rf_factor = sample_amplitude_factors(e, index)
    logger.debug("sample %d: mw factor %.6f, rf factor %.6f", index, mw_factor, rf_factor)
    return _evolve_density(nv_map.perturbed_problem(problem, mw_factor, rf_factor), rho0, checkpoints, max_dt)


def _pulse_sample(args) -> List[qcore.DensityMatrix]:
    cp, pulse, rho0, e, index = args
    mw_factor, rf_factor = sample_amplitude_factors(e, index)
    scaled = pulse.scaled_groups(cp.groups, {C.CHANNEL_GROUP_MW: mw_factor, C.CHANNEL_GROUP_RF: rf_factor})
    u = pulse_opt.total_propagator(cp, scaled, check_bounds=False)
    return [rho0, u @ rho0 @ u.conj().T]


def _average(samples: List[List[qcore.DensityMatrix]], times: Sequence[float],
             target: qcore.StateVector, n_samples: int) -> EnsembleResult:
    populations = utils.OnlineMeanAndVariance()
    final = utils.OnlineMeanAndVariance()
    for states in samples:
        populations.update(np.array([qcore.populations(rho) for rho in states[:len(times)]]))
        final.update(states[-1])
    mean_final = np.asarray(final.mean)
    mean_final = (mean_final + mean_final.conj().T) / 2
    qcore.check_density_matrix(mean_final)
    dim = mean_final.shape[0]
    std = populations.std
    return EnsembleResult(times=np.asarray(times, dtype=float),
                          mean_populations=np.asarray(populations.mean).reshape(len(times), dim),
                          std_populations=np.asarray(std).reshape(len(times), dim),
                          mean_final=mean_final,
                          final_fidelity=qcore.fidelity(mean_final, target),
                          n_samples=n_samples)


def noisy_trajectory_ensemble(problem: adiabatic_engine.AdiabaticProblem, e: ErrorConfig,
                              steps: Optional[adiabatic_engine.StepsConfig] = None,
                              checkpoints: Optional[Sequence[float]] = None,
                              max_processes: int = 1) -> EnsembleResult:
    """
    Averages the density-matrix trajectories of the NV realization of `problem` over amplitude-error samples,
    starting from the imperfect initial state. Samples use the fixed step max_dt without refinement.
    """
    steps = adiabatic_engine.StepsConfig() if steps is None else steps
    checkpoints = adiabatic_engine.default_checkpoints(problem.total_time) if checkpoints is None else checkpoints
    rho0 = imperfect_initial_state(e, adiabatic_engine.initial_ground_state(problem))
    indices = [0] if e.noiseless_controls else list(range(e.n_samples))
    jobs = [(problem, rho0, checkpoints, steps.max_dt, e, i) for i in indices]
    logger.info("Adiabatic ensemble: %d samples (eps=%.3f, sigma_mw=%.3f, sigma_rf=%.3f)", e.n_samples,
                e.polarization_error, e.amplitude_sigma_mw, e.amplitude_sigma_rf)
    with utils.create_pool(max_processes) as pool:
        samples = pool.map(_adiabatic_sample, jobs)
    return _average(samples, checkpoints, adiabatic_engine.ideal_final_state(), e.n_samples)


def noisy_pulse_ensemble(cp: pulse_opt.ControlProblem, pulse: pulse_opt.PulseSequence, e: ErrorConfig,
                         max_processes: int = 1) -> EnsembleResult:
    """
    Averages the final density matrix of a shaped pulse over amplitude-error samples (MW channels scaled by
    1 + d_mw, RF channels by 1 + d_rf, detunings unchanged). Checkpoints are the start and end of the pulse.
    """
    rho0 = imperfect_initial_state(e, cp.initial)
    indices = [0] if e.noiseless_controls else list(range(e.n_samples))
    jobs = [(cp, pulse, rho0, e, i) for i in indices]
    logger.info("Pulse ensemble: %d samples (eps=%.3f, sigma_mw=%.3f, sigma_rf=%.3f)", e.n_samples,
                e.polarization_error, e.amplitude_sigma_mw, e.amplitude_sigma_rf)
    with utils.create_pool(max_processes) as pool:
        samples = pool.map(_pulse_sample, jobs)
    return _average(samples, [0., pulse.duration], cp.target, e.n_samples)


def depolarize(rho: qcore.DensityMatrix, polarization_error: float) -> qcore.DensityMatrix:
    """
    Output of the imperfect initial state, given the output rho of the pure one: evolution is unital, so the
    I/4 admixture passes through unchanged.
    """
    dim = rho.shape[0]
    return (1. - polarization_error) * rho + polarization_error * qcore.identity(dim) / dim


@dataclass
class CalibrationResult:
    polarization_errors: List[float]
    fidelities: List[float]
    best_polarization_error: float
    best_fidelity: float
    in_band: bool

    def rows(self) -> List[List[float]]:
        return [[eps, fid] for eps, fid in zip(self.polarization_errors, self.fidelities)]

    def summary(self) -> Dict[str, Any]:
        return {"polarization_error": self.best_polarization_error, "fidelity": self.best_fidelity,
                "in_band": self.in_band}


def calibrate_polarization(pure_final: qcore.DensityMatrix,
                           shots: int = C.EXACT_SHOTS,
                           seed: int = C.DEFAULT_SEED,
                           grid: Optional[Sequence[float]] = None,
                           target_fidelity: float = C.REPORTED_FIDELITY,
                           band: Tuple[float, float] = C.REPORTED_FIDELITY_BAND) -> CalibrationResult:
    """
    Sweeps the polarization error at fixed amplitude noise and selects the value whose tomography fidelity is
    closest to the target.

    :param pure_final: Ensemble-averaged final density matrix of the polarization-error-free run.
    :param shots: Shots per tomography setting (0 for exact populations).
    :param seed: Tomography seed.
    :param grid: Polarization errors to try.
    :param target_fidelity: Fidelity to match.
    :param band: Accepted fidelity band.
    :return: Sweep table and the selected point.
    """
    grid = list(np.linspace(0., C.CALIBRATION_MAX_POLARIZATION_ERROR, C.CALIBRATION_GRID_POINTS)) \
        if grid is None else list(grid)
    fidelities = []
    for eps in grid:
        result = tomography.run_tomography(depolarize(pure_final, eps), shots=shots, seed=seed)
        fidelities.append(result.fidelity)
    best = int(np.argmin([abs(f - target_fidelity) for f in fidelities]))
    in_band = band[0] <= fidelities[best] <= band[1]
    logger.info("Calibrated polarization error %.4f: fidelity %.6f (%s band [%.2f, %.2f])", grid[best],
                fidelities[best], "in" if in_band else "outside", band[0], band[1])
    return CalibrationResult(polarization_errors=[float(g) for g in grid], fidelities=fidelities,
                             best_polarization_error=float(grid[best]), best_fidelity=float(fidelities[best]),
                             in_band=in_band)
