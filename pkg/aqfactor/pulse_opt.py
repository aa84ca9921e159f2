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
Gradient ascent pulse engineering (GRAPE) of piecewise-constant MW/RF controls.

Amplitudes are in MHz and times in microseconds, so segment k propagates with
exp(-i 2pi (drift + sum_c u_kc C_c) dt).
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import torch

from . import config
from . import constants as C
from . import qcore
from .schedule import LinearSchedule, Schedule, with_total_time
from .utils import AqfactorError, check_condition, smart_open

logger = logging.getLogger(__name__)


class BoundViolation(AqfactorError):
    pass


class NoProgress(AqfactorError):
    """
    Raised when the line search stalls; carries the best result found so far.
    """

    def __init__(self, message: str, result: 'OptimizationResult') -> None:
        super().__init__(message)
        self.result = result


@dataclass
class ControlProblem:
    drift: qcore.ComplexMatrix
    controls: List[qcore.ComplexMatrix]
    channels: List[str]
    initial: qcore.StateVector
    target: qcore.StateVector
    duration: float
    bounds: np.ndarray
    groups: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.drift = np.asarray(self.drift, dtype=complex)
        self.controls = [np.asarray(c, dtype=complex) for c in self.controls]
        self.bounds = np.broadcast_to(np.asarray(self.bounds, dtype=float), (len(self.controls),)).copy()
        check_condition(len(self.channels) == len(self.controls), "one channel name per control operator")
        check_condition(self.duration > 0, "duration budget must be > 0, got %s" % self.duration)
        check_condition(bool(np.all(self.bounds > 0)), "amplitude bounds must be > 0")
        qcore.check_hermitian(self.drift, name="drift")
        for name, op in zip(self.channels, self.controls):
            qcore.check_hermitian(op, name=name)
        if self.duration > C.T2_STAR_US:
            logger.warning("Pulse duration %.3f us exceeds the dephasing time %.1f us", self.duration, C.T2_STAR_US)

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    @property
    def control_stack(self) -> np.ndarray:
        return np.stack(self.controls)

    def scaled_controls(self, factor: float) -> 'ControlProblem':
        return ControlProblem(drift=self.drift, controls=[factor * c for c in self.controls], channels=self.channels,
                              initial=self.initial, target=self.target, duration=self.duration, bounds=self.bounds,
                              groups=self.groups)


def nv_channel_operators() -> Dict[str, qcore.ComplexMatrix]:
    """
    Rotating-frame control terms after the electron Hadamard (Sx <-> Sz, Sy -> -Sy).
    """
    ops = qcore.spin_operators()
    return {C.CHANNEL_MW_X: 2 * ops.sz @ ops.iz,
            C.CHANNEL_MW_Y: -2 * ops.sy @ ops.iz,
            C.CHANNEL_RF_X: ops.ix,
            C.CHANNEL_RF_Y: ops.iy,
            C.CHANNEL_MW_DETUNING: -ops.sx,
            C.CHANNEL_RF_DETUNING: -ops.iz}


def nv_control_problem(duration: float = C.T2_STAR_US,
                       bound: float = C.DEFAULT_BOUND_MHZ,
                       initial: Optional[qcore.StateVector] = None,
                       target: Optional[qcore.StateVector] = None) -> ControlProblem:
    """
    State transfer from (|0> - |1>)(|0> - |1>)/2 to (|01> + |10>)/sqrt(2) on the NV register.
    """
    operators = nv_channel_operators()
    initial = 0.5 * np.array([1, -1, -1, 1], dtype=complex) if initial is None else initial
    target = (qcore.ket("01") + qcore.ket("10")) / np.sqrt(2) if target is None else target
    return ControlProblem(drift=np.zeros((C.TWO_QUBIT_DIM, C.TWO_QUBIT_DIM), dtype=complex),
                          controls=[operators[name] for name in C.NV_CHANNELS],
                          channels=list(C.NV_CHANNELS),
                          initial=initial,
                          target=target,
                          duration=duration,
                          bounds=np.full(len(C.NV_CHANNELS), bound),
                          groups=dict(C.NV_CHANNEL_GROUPS))


@dataclass
class PulseSequence:
    amplitudes: np.ndarray
    segment_duration: float
    channels: List[str]
    bounds: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        self.bounds = np.broadcast_to(np.asarray(self.bounds, dtype=float), (len(self.channels),)).copy()
        check_condition(self.amplitudes.ndim == 2 and self.amplitudes.shape[1] == len(self.channels),
                        "amplitudes must have shape (n_segments, %d)" % len(self.channels))
        check_condition(self.segment_duration > 0, "segment duration must be > 0")

    @property
    def n_segments(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def duration(self) -> float:
        return self.n_segments * self.segment_duration

    def violations(self) -> np.ndarray:
        return np.abs(self.amplitudes) > self.bounds[None, :] * (1 + 1e-12)

    def check_bounds(self):
        if np.any(self.violations()):
            segment, channel = np.argwhere(self.violations())[0]
            raise BoundViolation("|%s| = %.6g exceeds its bound %.6g in segment %d"
                                 % (self.channels[channel], abs(self.amplitudes[segment, channel]),
                                    self.bounds[channel], segment))

    def with_amplitudes(self, amplitudes: np.ndarray) -> 'PulseSequence':
        return PulseSequence(amplitudes=amplitudes, segment_duration=self.segment_duration,
                             channels=self.channels, bounds=self.bounds)

    def scaled(self, factor: float) -> 'PulseSequence':
        return self.with_amplitudes(self.amplitudes * factor)

    def scaled_groups(self, groups: Dict[str, str], factors: Dict[str, float]) -> 'PulseSequence':
        """
        Multiplies each channel by the factor of its group; channels without a group are unchanged.
        """
        column_factors = np.array([factors.get(groups.get(name, ""), 1.) for name in self.channels])
        return self.with_amplitudes(self.amplitudes * column_factors[None, :])

    def save(self, fname: str):
        with smart_open(fname, "w") as out:
            out.write("%s n_segments %d\n" % (C.PULSE_HEADER_PREFIX, self.n_segments))
            out.write("%s segment_duration_us %s\n" % (C.PULSE_HEADER_PREFIX, C.FLOAT_FORMAT % self.segment_duration))
            out.write("%s channels %s\n" % (C.PULSE_HEADER_PREFIX, " ".join(self.channels)))
            out.write("%s bounds_mhz %s\n" % (C.PULSE_HEADER_PREFIX,
                                              " ".join(C.FLOAT_FORMAT % b for b in self.bounds)))
            for row in self.amplitudes:
                out.write(" ".join(C.FLOAT_FORMAT % (v + 0.) for v in row) + "\n")

    @staticmethod
    def load(fname: str) -> 'PulseSequence':
        header = {}  # type: Dict[str, List[str]]
        rows = []
        with smart_open(fname) as inp:
            for line in inp:
                line = line.strip()
                if not line:
                    continue
                if line.startswith(C.PULSE_HEADER_PREFIX):
                    key, *values = line[len(C.PULSE_HEADER_PREFIX):].split()
                    header[key] = values
                else:
                    rows.append([float(v) for v in line.split()])
        for key in ("n_segments", "segment_duration_us", "channels", "bounds_mhz"):
            check_condition(key in header, "pulse file %s lacks the '%s' header" % (fname, key))
        check_condition(len(rows) == int(header["n_segments"][0]),
                        "pulse file %s declares %s segments but holds %d" % (fname, header["n_segments"][0], len(rows)))
        return PulseSequence(amplitudes=np.array(rows, dtype=float).reshape(len(rows), len(header["channels"])),
                             segment_duration=float(header["segment_duration_us"][0]),
                             channels=header["channels"],
                             bounds=np.array([float(b) for b in header["bounds_mhz"]]))


def _check_compatible(cp: ControlProblem, p: PulseSequence):
    if list(p.channels) != list(cp.channels):
        raise qcore.DimensionMismatch("pulse channels %s do not match the problem channels %s"
                                      % (p.channels, cp.channels))


def _segment_hamiltonians(cp: ControlProblem, p: PulseSequence) -> np.ndarray:
    return cp.drift[None] + np.einsum("kc,cij->kij", p.amplitudes.astype(complex), cp.control_stack)


def segment_propagators(cp: ControlProblem, p: PulseSequence) -> np.ndarray:
    _check_compatible(cp, p)
    return qcore.expm_hermitian_batch(C.TWO_PI * _segment_hamiltonians(cp, p), p.segment_duration)


def total_propagator(cp: ControlProblem, p: PulseSequence, check_bounds: bool = True) -> qcore.ComplexMatrix:
    if check_bounds:
        p.check_bounds()
    return qcore.ordered_product(segment_propagators(cp, p))


def propagate(cp: ControlProblem, p: PulseSequence, check_bounds: bool = True) -> qcore.StateVector:
    """
    Final state of the piecewise-constant evolution of the initial state.

    :raises BoundViolation: If an amplitude exceeds its channel bound (unless check_bounds is False).
    """
    return total_propagator(cp, p, check_bounds) @ cp.initial


def transfer_fidelity(cp: ControlProblem, p: PulseSequence, check_bounds: bool = True) -> float:
    return qcore.fidelity(propagate(cp, p, check_bounds), cp.target)


def gradient(cp: ControlProblem, p: PulseSequence) -> np.ndarray:
    """
    Exact gradient of the transfer fidelity with respect to every amplitude, shape (n_segments, n_channels).

    The derivative of each segment exponential exp(A), A = -i 2pi dt H_k, is taken in the eigenbasis of H_k:
    dU = V (Phi o V^dagger E V) V^dagger with the divided differences Phi_jl = (e^a_j - e^a_l) / (a_j - a_l).
    Forward states psi_(k-1) and backward states chi_k = (U_N ... U_(k+1))^dagger target then give
    dF = 2 Re(conj(o) <chi_k| dU |psi_(k-1)>), o = <target|psi_N>.
    """
    _check_compatible(cp, p)
    n = p.n_segments
    scale = -1j * C.TWO_PI * p.segment_duration
    evals, evecs = np.linalg.eigh(_segment_hamiltonians(cp, p))
    exponents = scale * evals
    phases = np.exp(exponents)
    evecs_h = np.conj(np.swapaxes(evecs, -1, -2))
    us = (evecs * phases[:, None, :]) @ evecs_h

    forward = np.empty((n, cp.dim), dtype=complex)
    psi = np.asarray(cp.initial, dtype=complex)
    for k in range(n):
        forward[k] = psi
        psi = us[k] @ psi
    overlap = np.vdot(cp.target, psi)
    backward = np.empty((n, cp.dim), dtype=complex)
    chi = np.asarray(cp.target, dtype=complex)
    for k in range(n - 1, -1, -1):
        backward[k] = chi
        chi = us[k].conj().T @ chi

    diff = exponents[:, :, None] - exponents[:, None, :]
    close = np.abs(diff) < 1e-8
    divided = np.where(close,
                       np.exp((exponents[:, :, None] + exponents[:, None, :]) / 2),
                       (phases[:, :, None] - phases[:, None, :]) / np.where(close, 1., diff))
    a = np.einsum("kij,kj->ki", evecs_h, forward)
    b = np.einsum("kij,kj->ki", evecs_h, backward)
    weights = divided * np.conj(b)[:, :, None] * a[:, None, :]
    rotated_controls = scale * np.einsum("kij,cjl,klm->kcim", evecs_h, cp.control_stack, evecs)
    d_overlap = np.einsum("kij,kcij->kc", weights, rotated_controls)
    return 2 * np.real(np.conj(overlap) * d_overlap)


def autograd_gradient(cp: ControlProblem, p: PulseSequence) -> np.ndarray:
    """
    The same gradient through torch autograd of matrix exponentials.
    """
    _check_compatible(cp, p)
    amplitudes = torch.tensor(p.amplitudes, dtype=torch.float64, requires_grad=True)
    controls = torch.tensor(cp.control_stack, dtype=torch.complex128)
    drift = torch.tensor(cp.drift, dtype=torch.complex128)
    hamiltonians = drift + torch.einsum("kc,cij->kij", amplitudes.to(torch.complex128), controls)
    propagators = torch.linalg.matrix_exp(-1j * C.TWO_PI * p.segment_duration * hamiltonians)
    psi = torch.tensor(cp.initial, dtype=torch.complex128)
    for k in range(p.n_segments):
        psi = propagators[k] @ psi
    fidelity = torch.abs(torch.vdot(torch.tensor(cp.target, dtype=torch.complex128), psi)) ** 2
    fidelity.backward()
    return amplitudes.grad.detach().numpy().copy()


def get_gradient_function(backend: str):
    if backend == C.GRADIENT_ADJOINT:
        return gradient
    if backend == C.GRADIENT_AUTOGRAD:
        return autograd_gradient
    raise ValueError("Unknown gradient backend %s. Choices: %s" % (backend, C.GRADIENT_CHOICES))


def zero_pulse(cp: ControlProblem, n_segments: int) -> PulseSequence:
    return PulseSequence(amplitudes=np.zeros((n_segments, len(cp.channels))),
                         segment_duration=cp.duration / n_segments, channels=cp.channels, bounds=cp.bounds)


def random_pulse(cp: ControlProblem, n_segments: int, seed: int, scale: float = 0.5) -> PulseSequence:
    """
    Uniform amplitudes within scale * bound, drawn from a generator seeded by `seed`.
    """
    rng = np.random.default_rng(seed)
    amplitudes = rng.uniform(-1., 1., size=(n_segments, len(cp.channels))) * scale * cp.bounds[None, :]
    return PulseSequence(amplitudes=amplitudes, segment_duration=cp.duration / n_segments,
                         channels=cp.channels, bounds=cp.bounds)


def adiabatic_pulse(cp: ControlProblem, g: float = C.DEFAULT_PULSE_G_MHZ, n_segments: int = C.DEFAULT_NUM_SEGMENTS,
                    schedule: Optional[Schedule] = None) -> PulseSequence:
    """
    Direct rotating-frame realization of the adiabatic sweep with g1 = g2 = g (MHz), sampled at segment midpoints:
    mw_x = s g, rf_x = (1 - s) g, mw_detuning = -(1 - s) g.
    """
    schedule = LinearSchedule(cp.duration) if schedule is None else with_total_time(schedule, cp.duration)
    dt = cp.duration / n_segments
    s = schedule.values((np.arange(n_segments) + 0.5) * dt)
    amplitudes = np.zeros((n_segments, len(cp.channels)))
    values = {C.CHANNEL_MW_X: s * g, C.CHANNEL_RF_X: (1 - s) * g, C.CHANNEL_MW_DETUNING: -(1 - s) * g}
    for name, column in values.items():
        check_condition(name in cp.channels, "the adiabatic pulse needs the %s channel" % name)
        amplitudes[:, cp.channels.index(name)] = column
    return PulseSequence(amplitudes=amplitudes, segment_duration=dt, channels=cp.channels, bounds=cp.bounds)


@dataclass
class GrapeConfig(config.Config):
    n_segments: int = C.DEFAULT_NUM_SEGMENTS
    max_iters: int = C.DEFAULT_MAX_ITERS
    target_fidelity: float = C.DEFAULT_TARGET_FIDELITY
    initial_step: float = 10.0
    min_step: float = 1e-6
    armijo: float = 1e-4
    max_stalls: int = C.DEFAULT_MAX_STALLS
    init: str = C.PULSE_INIT_ADIABATIC
    seed: int = C.DEFAULT_SEED
    gradient_backend: str = C.GRADIENT_ADJOINT
    pulse_g: float = C.DEFAULT_PULSE_G_MHZ
    log_every: int = 10


def initial_pulse(cp: ControlProblem, grape_config: GrapeConfig) -> PulseSequence:
    if grape_config.init == C.PULSE_INIT_ADIABATIC:
        return adiabatic_pulse(cp, grape_config.pulse_g, grape_config.n_segments)
    if grape_config.init == C.PULSE_INIT_ZERO:
        return zero_pulse(cp, grape_config.n_segments)
    if grape_config.init == C.PULSE_INIT_RANDOM:
        return random_pulse(cp, grape_config.n_segments, grape_config.seed)
    raise ValueError("Unknown pulse initialization %s. Choices: %s" % (grape_config.init, C.PULSE_INIT_CHOICES))


@dataclass
class IterationLog:
    iteration: int
    fidelity: float
    step: float
    grad_norm: float


@dataclass
class OptimizationResult:
    pulse: PulseSequence
    fidelity: float
    converged: bool
    log: List[IterationLog]

    def summary(self) -> Dict:
        return {"fidelity": self.fidelity, "converged": self.converged, "iterations": len(self.log) - 1,
                "n_segments": self.pulse.n_segments, "duration_us": self.pulse.duration}


def optimize(cp: ControlProblem, init: PulseSequence, grape_config: Optional[GrapeConfig] = None) -> OptimizationResult:
    """
    Projected gradient ascent with a backtracking (Armijo) line search. Only improving steps are accepted, so the
    logged fidelity is nondecreasing; the step grows after each accepted move.

    :param cp: Control problem.
    :param init: Initial pulse (must satisfy the bounds).
    :param grape_config: Optimizer settings.
    :return: First pulse reaching the target fidelity, or the best after max_iters.
    :raises NoProgress: After max_stalls consecutive iterations without an accepted step.
    """
    grape_config = GrapeConfig() if grape_config is None else grape_config
    init.check_bounds()
    grad_fn = get_gradient_function(grape_config.gradient_backend)
    bounds = cp.bounds[None, :]
    pulse = init
    fid = transfer_fidelity(cp, pulse)
    step = grape_config.initial_step
    log = [IterationLog(0, fid, 0., 0.)]
    stalls = 0
    logger.info("GRAPE start: fidelity %.9f, %d segments of %.4g us", fid, pulse.n_segments, pulse.segment_duration)
    for iteration in range(1, grape_config.max_iters + 1):
        if fid >= grape_config.target_fidelity:
            break
        grad = grad_fn(cp, pulse)
        grad_norm = float(np.linalg.norm(grad))
        accepted = False
        trial_step = step
        while trial_step >= grape_config.min_step:
            candidate = pulse.with_amplitudes(np.clip(pulse.amplitudes + trial_step * grad, -bounds, bounds))
            candidate_fid = transfer_fidelity(cp, candidate, check_bounds=False)
            ascent = float(np.sum(grad * (candidate.amplitudes - pulse.amplitudes)))
            if candidate_fid > fid and candidate_fid >= fid + grape_config.armijo * ascent:
                pulse, fid, accepted = candidate, candidate_fid, True
                break
            trial_step /= 2
        if accepted:
            stalls = 0
            step = trial_step * 2
        else:
            stalls += 1
            step = grape_config.initial_step
        log.append(IterationLog(iteration, fid, trial_step if accepted else 0., grad_norm))
        if iteration % grape_config.log_every == 0:
            logger.info("GRAPE iteration %d: fidelity %.9f, step %.3g, |grad| %.3g", iteration, fid, trial_step,
                        grad_norm)
        if stalls >= grape_config.max_stalls:
            result = OptimizationResult(pulse=pulse, fidelity=fid, converged=False, log=log)
            raise NoProgress("line search stalled for %d consecutive iterations at fidelity %.9f"
                             % (stalls, fid), result)
    converged = fid >= grape_config.target_fidelity
    logger.info("GRAPE finished after %d iterations: fidelity %.9f (%s)", len(log) - 1, fid,
                "converged" if converged else "target not reached")
    return OptimizationResult(pulse=pulse, fidelity=fid, converged=converged, log=log)


def robustness_scan(cp: ControlProblem, p: PulseSequence,
                    epsilons: Sequence[float] = C.DEFAULT_ROBUSTNESS_EPSILONS) -> List[float]:
    """
    Fidelity with every amplitude multiplied by (1 + epsilon); bounds are not enforced.
    """
    return [transfer_fidelity(cp, p.scaled(1. + eps), check_bounds=False) for eps in epsilons]
