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
Adiabatic evolution under H(t) = (1 - s(t)) H0 + s(t) Hp with hbar = 1.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize

from . import config
from . import constants as C
from . import qcore
from . import utils
from .factor_compiler import ProblemHamiltonianSpec
from .schedule import LinearSchedule, Schedule, with_total_time
from .utils import AqfactorError, check_condition

logger = logging.getLogger(__name__)


class DegenerateGround(AqfactorError):
    pass


class NonConvergent(AqfactorError):
    pass


@dataclass
class StepsConfig(config.Config):
    """
    Step policy of the midpoint propagator. With `refine`, dt is halved until the final ground-subspace fidelity
    changes by less than `refine_tol`.
    """
    max_dt: float = C.DEFAULT_MAX_DT
    refine: bool = True
    refine_tol: float = C.DEFAULT_REFINE_TOL
    min_dt: float = C.DEFAULT_MIN_DT


@dataclass
class AdiabaticProblem:
    h0: qcore.ComplexMatrix
    hp: qcore.ComplexMatrix
    g1: float
    g2: float
    schedule: Schedule
    degeneracy_tol: float = C.DEGENERACY_TOL

    def __post_init__(self):
        self.h0 = np.asarray(self.h0, dtype=complex)
        self.hp = np.asarray(self.hp, dtype=complex)
        qcore.check_hermitian(self.h0, name="H0")
        qcore.check_hermitian(self.hp, name="Hp")
        if self.h0.shape != self.hp.shape:
            raise qcore.DimensionMismatch("H0 %s and Hp %s differ in shape" % (self.h0.shape, self.hp.shape))
        check_condition(np.max(np.abs(qcore.commutator(self.h0, self.hp))) > C.HERMITICITY_TOL,
                        "H0 and Hp commute; the evolution would cross energy levels")

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(self.dim)))

    @property
    def total_time(self) -> float:
        return self.schedule.total_time

    def hamiltonians(self, ts: Sequence[float]) -> np.ndarray:
        """
        Stack of H(t) for many times, shape (len(ts), dim, dim).
        """
        s = self.schedule.values(ts)[:, None, None]
        return (1. - s) * self.h0[None] + s * self.hp[None]

    def hamiltonian_for_s(self, s: float) -> qcore.ComplexMatrix:
        return (1. - s) * self.h0 + s * self.hp

    def with_total_time(self, total_time: float) -> 'AdiabaticProblem':
        return AdiabaticProblem(h0=self.h0, hp=self.hp, g1=self.g1, g2=self.g2,
                                schedule=with_total_time(self.schedule, total_time),
                                degeneracy_tol=self.degeneracy_tol)


def initial_hamiltonian(n_qubits: int, g2: float = C.DEFAULT_G2) -> qcore.ComplexMatrix:
    """
    Transverse field g2 * sum_i X_i / 2; on the two-qubit register this is g2 (Sx + Ix).
    """
    sx, _, _ = qcore.spin_half_ops()
    return g2 * sum(qcore.qubit_operator(sx, i, n_qubits) for i in range(n_qubits))


def default_problem_hamiltonian(g1: float = C.DEFAULT_G1) -> qcore.ComplexMatrix:
    """
    g1 (2 Sz Iz), the reduced problem of N=35: penalty (p + q - 1)^2 without its identity component.
    """
    ops = qcore.spin_operators()
    return g1 * 2 * ops.sz @ ops.iz


def ideal_final_state() -> qcore.StateVector:
    return (qcore.ket("01") + qcore.ket("10")) / np.sqrt(2)


def prepared_initial_state() -> qcore.StateVector:
    return 0.5 * np.array([1, -1, -1, 1], dtype=complex)


def default_problem(g1: float = C.DEFAULT_G1,
                    g2: float = C.DEFAULT_G2,
                    total_time: float = C.DEFAULT_TOTAL_TIME,
                    schedule: Optional[Schedule] = None) -> AdiabaticProblem:
    schedule = LinearSchedule(total_time) if schedule is None else with_total_time(schedule, total_time)
    return AdiabaticProblem(h0=initial_hamiltonian(2, g2), hp=default_problem_hamiltonian(g1),
                            g1=g1, g2=g2, schedule=schedule)


def make_problem(spec: ProblemHamiltonianSpec, g2: float, schedule: Schedule,
                 degeneracy_tol: float = C.DEGENERACY_TOL) -> AdiabaticProblem:
    """
    Adiabatic problem for a compiled Hamiltonian with one transverse-field term per qubit.
    """
    check_condition(spec.n_qubits >= 1, "the compiled problem has no qubits left to evolve")
    return AdiabaticProblem(h0=initial_hamiltonian(spec.n_qubits, g2), hp=spec.operator,
                            g1=spec.g1, g2=g2, schedule=schedule, degeneracy_tol=degeneracy_tol)


def hamiltonian_at(problem: AdiabaticProblem, t: float) -> qcore.ComplexMatrix:
    """
    H(t) = (1 - s(t)) H0 + s(t) Hp.

    :raises TimeOutOfRange: Outside [0, T].
    """
    return problem.hamiltonian_for_s(problem.schedule.s(t))


def initial_ground_state(problem: AdiabaticProblem) -> qcore.StateVector:
    """
    Ground state of H0 with the first nonzero amplitude made real and positive.

    :raises DegenerateGround: If the lowest level of H0 is degenerate.
    """
    evals, evecs = scipy.linalg.eigh(problem.h0)
    norm = np.linalg.norm(problem.h0, 2)
    if evals[1] - evals[0] <= 1e-9 * norm:
        raise DegenerateGround("ground state of H0 is degenerate (gap %.3e)" % (evals[1] - evals[0]))
    psi = evecs[:, 0]
    first = psi[np.flatnonzero(np.abs(psi) > 1e-12)[0]]
    return psi * (abs(first) / first)


def ground_subspace_fidelity(state: qcore.State, h: qcore.ComplexMatrix,
                             degeneracy_tol: float = C.DEGENERACY_TOL) -> float:
    """
    Weight of a state (vector or density matrix) in the span of all eigenvectors of h within
    degeneracy_tol * ||h|| of the lowest eigenvalue.
    """
    qcore.check_hermitian(h, name="H")
    _, ground = qcore.ground_space(h, degeneracy_tol)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        value = np.sum(np.abs(ground.conj().T @ state) ** 2)
    else:
        value = np.real(np.trace(ground.conj().T @ state @ ground))
    return float(np.clip(value, 0., 1.))


def num_steps(span: float, max_dt: float) -> int:
    return max(1, int(math.ceil(span / max_dt - 1e-9)))


def propagator(problem: AdiabaticProblem, t0: float, t1: float, max_dt: float) -> qcore.ComplexMatrix:
    """
    Time-ordered product of exp(-i H(t_k + dt/2) dt) over equal steps dt <= max_dt covering [t0, t1].
    """
    check_condition(t1 >= t0, "propagator needs t1 >= t0, got %s and %s" % (t0, t1))
    u = qcore.identity(problem.dim)
    if t1 == t0:
        return u
    n = num_steps(t1 - t0, max_dt)
    dt = (t1 - t0) / n
    midpoints = t0 + (np.arange(n) + 0.5) * dt
    chunk_size = max(64, C.PROPAGATOR_CHUNK_SIZE // max(1, (problem.dim // 4) ** 2))
    for chunk in utils.chunks(midpoints, chunk_size):
        u = qcore.ordered_product(qcore.expm_hermitian_batch(problem.hamiltonians(chunk), dt)) @ u
    check_condition(qcore.unitarity_error(u) <= C.UNITARITY_TOL,
                    "propagator over [%s, %s] is not unitary (error %.3g)" % (t0, t1, qcore.unitarity_error(u)))
    return u


def _apply(u: qcore.ComplexMatrix, state: qcore.State) -> qcore.State:
    return u @ state if state.ndim == 1 else u @ state @ u.conj().T


@dataclass
class Trajectory:
    times: np.ndarray
    s_values: np.ndarray
    states: List[qcore.State]
    populations: np.ndarray
    ground_fidelities: np.ndarray
    energies: np.ndarray
    final_state: qcore.State
    final_ground_fidelity: float
    dt: float
    target_fidelity: Optional[float] = None

    @property
    def labels(self) -> List[str]:
        return qcore.basis_labels(int(round(math.log2(self.populations.shape[1]))))

    def columns(self) -> List[str]:
        return ["t", "s"] + ["pop%s" % label for label in self.labels] + ["ground_fidelity", "energy"]

    def rows(self) -> List[List[float]]:
        return [[float(t), float(s)] + [float(p) for p in pops] + [float(f), float(e)]
                for t, s, pops, f, e in zip(self.times, self.s_values, self.populations,
                                            self.ground_fidelities, self.energies)]

    def summary(self) -> Dict[str, Any]:
        return {"dt": self.dt,
                "final_ground_fidelity": self.final_ground_fidelity,
                "final_populations": dict(zip(self.labels, (float(p) for p in qcore.populations(self.final_state)))),
                "target_fidelity": self.target_fidelity}


def default_checkpoints(total_time: float, num: int = C.DEFAULT_NUM_CHECKPOINTS) -> List[float]:
    return [float(t) for t in np.linspace(0., total_time, num)]


def _integrate(problem: AdiabaticProblem, state: qcore.State, checkpoints: Sequence[float],
               max_dt: float) -> Tuple[List[qcore.State], qcore.State]:
    states = []
    t = 0.
    for checkpoint in checkpoints:
        state = _apply(propagator(problem, t, checkpoint, max_dt), state)
        states.append(state)
        t = checkpoint
    final = _apply(propagator(problem, t, problem.total_time, max_dt), state)
    return states, final


def evolve(problem: AdiabaticProblem,
           steps: Optional[StepsConfig] = None,
           checkpoints: Optional[Sequence[float]] = None,
           initial_state: Optional[qcore.State] = None,
           target: Optional[qcore.StateVector] = None) -> Trajectory:
    """
    Integrates the Schroedinger (or von Neumann, for a density matrix) equation with the midpoint propagator.

    :param problem: Adiabatic problem.
    :param steps: Step policy.
    :param checkpoints: Sorted times in [0, T]; default 6 uniform times.
    :param initial_state: State vector or density matrix; default the ground state of H0.
    :param target: Reference state for the final fidelity; default the ideal final state on two qubits.
    :return: Trajectory with checkpoint observables.
    :raises NonConvergent: If dt refinement reaches min_dt without converging.
    """
    steps = StepsConfig() if steps is None else steps
    total_time = problem.total_time
    checkpoints = default_checkpoints(total_time) if checkpoints is None else [float(t) for t in checkpoints]
    check_condition(all(a <= b for a, b in zip(checkpoints, checkpoints[1:])), "checkpoints must be sorted")
    problem.schedule.values(checkpoints)
    state0 = initial_ground_state(problem) if initial_state is None else np.asarray(initial_state, dtype=complex)
    if target is None and problem.dim == C.TWO_QUBIT_DIM:
        target = ideal_final_state()

    dt = steps.max_dt
    states, final = _integrate(problem, state0, checkpoints, dt)
    final_fidelity = ground_subspace_fidelity(final, problem.hp, problem.degeneracy_tol)
    if steps.refine:
        while True:
            finer_dt = dt / 2
            if finer_dt < steps.min_dt:
                raise NonConvergent("final fidelity still changes at dt=%.3e (min_dt=%.1e)" % (dt, steps.min_dt))
            finer_states, finer_final = _integrate(problem, state0, checkpoints, finer_dt)
            finer_fidelity = ground_subspace_fidelity(finer_final, problem.hp, problem.degeneracy_tol)
            change = abs(finer_fidelity - final_fidelity)
            logger.debug("dt=%.3e: final ground fidelity %.12f (change %.3e)", finer_dt, finer_fidelity, change)
            dt, states, final, final_fidelity = finer_dt, finer_states, finer_final, finer_fidelity
            if change < steps.refine_tol:
                break
        logger.info("Converged at dt=%.3e (%d steps over T=%s)", dt, num_steps(total_time, dt), total_time)

    hamiltonians = problem.hamiltonians(checkpoints) if checkpoints else np.zeros((0, problem.dim, problem.dim))
    populations = np.array([qcore.populations(state) for state in states]).reshape(len(states), problem.dim)
    for pops in populations:
        if abs(np.sum(pops) - 1.) > C.NORM_TOL:
            raise AqfactorError("population sum drifted to %.12f" % np.sum(pops))
    return Trajectory(times=np.asarray(checkpoints, dtype=float),
                      s_values=problem.schedule.values(checkpoints) if checkpoints else np.zeros(0),
                      states=states,
                      populations=populations,
                      ground_fidelities=np.array([ground_subspace_fidelity(state, h, problem.degeneracy_tol)
                                                  for state, h in zip(states, hamiltonians)]),
                      energies=np.array([qcore.expectation(h, state) for state, h in zip(states, hamiltonians)]),
                      final_state=final,
                      final_ground_fidelity=final_fidelity,
                      dt=dt,
                      target_fidelity=qcore.fidelity(final, target) if target is not None else None)


def symmetric_sector_isometry() -> np.ndarray:
    """
    Columns |00>, (|01> + |10>)/sqrt(2), |11>: the exchange-symmetric subspace of two qubits.
    """
    return np.stack([qcore.ket("00"), ideal_final_state(), qcore.ket("11")], axis=1)


def resolve_sector(problem: AdiabaticProblem, sector: str = C.SECTOR_AUTO) -> str:
    """
    The symmetric sector applies when the problem has two qubits and both Hamiltonians commute with SWAP, so
    that an exchange-symmetric initial state never leaves it.
    """
    if sector == C.SECTOR_FULL:
        return sector
    symmetric = problem.dim == C.TWO_QUBIT_DIM and all(
        np.max(np.abs(qcore.commutator(qcore.swap_operator(), h))) <= C.HERMITICITY_TOL
        for h in (problem.h0, problem.hp))
    if sector == C.SECTOR_SYMMETRIC:
        check_condition(symmetric, "the problem is not exchange symmetric")
    return C.SECTOR_SYMMETRIC if symmetric else C.SECTOR_FULL


@dataclass
class SpectrumScan:
    problem: AdiabaticProblem
    s_grid: np.ndarray
    sector: str
    energies: np.ndarray = field(init=False)
    gaps: np.ndarray = field(init=False)

    def __post_init__(self):
        self.energies = np.array([self.energies_at(s) for s in self.s_grid])
        self.gaps = np.array([self._gap(e) for e in self.energies])

    def energies_at(self, s: float) -> np.ndarray:
        h = self.problem.hamiltonian_for_s(s)
        if self.sector == C.SECTOR_SYMMETRIC:
            v = symmetric_sector_isometry()
            h = v.conj().T @ h @ v
        return scipy.linalg.eigvalsh(h)

    def _gap(self, energies: np.ndarray) -> float:
        scale = max(np.max(np.abs(energies)), 1.)
        return qcore.spectral_gap(energies, self.problem.degeneracy_tol * scale)

    def gap_at(self, s: float) -> float:
        return self._gap(self.energies_at(float(np.clip(s, 0., 1.))))

    def min_gap(self) -> Tuple[float, float]:
        """
        Smallest gap on the grid, refined by golden-section search around the grid minimum.

        :return: (g_min, s*).
        """
        i = int(np.argmin(self.gaps))
        best_gap, best_s = float(self.gaps[i]), float(self.s_grid[i])
        if 0 < i < len(self.s_grid) - 1:
            try:
                result = scipy.optimize.minimize_scalar(self.gap_at, method="golden",
                                                        bracket=(self.s_grid[i - 1], self.s_grid[i],
                                                                 self.s_grid[i + 1]),
                                                        tol=C.GAP_REFINE_TOL)
                if 0. <= result.x <= 1. and result.fun <= best_gap:
                    best_gap, best_s = float(result.fun), float(result.x)
            except ValueError as e:
                logger.debug("Golden-section refinement skipped: %s", e)
        return best_gap, best_s

    def rows(self) -> List[List[float]]:
        return [[float(s), float(g)] + [float(e) for e in energies]
                for s, g, energies in zip(self.s_grid, self.gaps, self.energies)]

    def columns(self) -> List[str]:
        return ["s", "gap"] + ["e%d" % k for k in range(self.energies.shape[1])]


def spectrum_scan(problem: AdiabaticProblem, s_grid: Optional[Sequence[float]] = None,
                  sector: str = C.SECTOR_AUTO) -> SpectrumScan:
    s_grid = np.linspace(0., 1., C.GAP_GRID_POINTS) if s_grid is None else np.asarray(s_grid, dtype=float)
    check_condition(bool(np.all((s_grid >= 0) & (s_grid <= 1))), "s grid must lie in [0, 1]")
    return SpectrumScan(problem=problem, s_grid=s_grid, sector=resolve_sector(problem, sector))


@dataclass
class TScanRow:
    total_time: float
    target_fidelity: Optional[float]
    ground_fidelity: float
    dt: float


def _final_fidelities(args: Tuple[AdiabaticProblem, StepsConfig]) -> TScanRow:
    problem, steps = args
    trajectory = evolve(problem, steps, checkpoints=[])
    return TScanRow(total_time=problem.total_time, target_fidelity=trajectory.target_fidelity,
                    ground_fidelity=trajectory.final_ground_fidelity, dt=trajectory.dt)


def scan_total_time(problem: AdiabaticProblem, totals: Sequence[float],
                    steps: Optional[StepsConfig] = None, max_processes: int = 1) -> List[TScanRow]:
    """
    Final fidelities over a ladder of total times, evaluated in parallel.
    """
    steps = StepsConfig() if steps is None else steps
    jobs = [(problem.with_total_time(total), steps) for total in totals]
    with utils.create_pool(max_processes) as pool:
        rows = pool.map(_final_fidelities, jobs)
    for row in rows:
        logger.info("T=%s: target fidelity %s, ground fidelity %.9f", row.total_time, row.target_fidelity,
                    row.ground_fidelity)
    return rows
