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
aqfactor CLI: compile, gap, evolve, nv, grape, tomo, report.
"""
import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from . import __version__
from . import adiabatic_engine
from . import arguments
from . import config
from . import constants as C
from . import error_model
from . import factor_compiler
from . import nv_map
from . import pulse_opt
from . import qcore
from . import tomography
from .log import setup_main_logger
from .output_handler import write_csv, write_json
from .schedule import ScheduleConfig, get_schedule
from .utils import AqfactorError, check_condition, get_output_dir, log_basic_info, seed_rngs

logger = logging.getLogger(__name__)


class UsageError(AqfactorError):
    pass


@dataclass
class RunConfig(config.Config):
    """
    Record of one run: the subcommand and its parsed arguments (output location excluded). Passing the saved file
    to `--config` repeats the run.
    """
    command: str
    arguments: Dict[str, Any] = field(default_factory=dict)
    version: str = __version__


def run_config_from_args(command: str, args: argparse.Namespace) -> RunConfig:
    excluded = {"config", "out_dir"}
    return RunConfig(command=command, arguments={k: v for k, v in sorted(vars(args).items()) if k not in excluded})


def schedule_config_from_args(args: argparse.Namespace) -> ScheduleConfig:
    return ScheduleConfig(kind=args.schedule, total_time=args.t_total, coefficients=args.schedule_coefficients,
                          taus=args.schedule_taus, values=args.schedule_values)


def steps_config_from_args(args: argparse.Namespace) -> adiabatic_engine.StepsConfig:
    return adiabatic_engine.StepsConfig(max_dt=args.max_dt, refine=not args.no_refine, refine_tol=args.refine_tol,
                                        min_dt=args.min_dt)


def nv_params_from_args(args: argparse.Namespace) -> nv_map.NvParams:
    return nv_map.NvParams(d=args.d, q=args.q, gamma_e=args.gamma_e, gamma_n=args.gamma_n, bz=args.bz,
                           a_par=args.a_par)


def grape_config_from_args(args: argparse.Namespace) -> pulse_opt.GrapeConfig:
    return pulse_opt.GrapeConfig(n_segments=args.segments, max_iters=args.max_iters,
                                 target_fidelity=args.target_fidelity, initial_step=args.initial_step,
                                 max_stalls=args.max_stalls, init=args.init, seed=args.seed,
                                 gradient_backend=args.gradient, pulse_g=args.pulse_g)


def error_config_from_args(args: argparse.Namespace) -> error_model.ErrorConfig:
    return error_model.ErrorConfig(polarization_error=args.polarization_error, amplitude_sigma_mw=args.sigma_mw,
                                   amplitude_sigma_rf=args.sigma_rf, n_samples=args.samples, seed=args.seed,
                                   truncation=args.truncation)


def compile_from_args(args: argparse.Namespace) -> factor_compiler.CompilationResult:
    return factor_compiler.compile_factoring(args.n, args.wx, args.wy, simplify_system=not args.no_simplify,
                                             g1=args.g1, qubit_budget=args.qubit_budget)


def problem_from_args(args: argparse.Namespace) -> adiabatic_engine.AdiabaticProblem:
    """
    Compiles N and builds the adiabatic problem of the remaining qubits.
    """
    result = compile_from_args(args)
    if result.hamiltonian is None:
        raise factor_compiler.TooManyQubits("%d qubits needed, the budget is %d"
                                            % (result.qubits_needed, args.qubit_budget))
    if result.hamiltonian.n_qubits == 0:
        raise UsageError("N=%d is fully determined by the compiler; there is nothing to evolve" % args.n)
    return adiabatic_engine.make_problem(result.hamiltonian, args.g2, get_schedule(schedule_config_from_args(args)),
                                         degeneracy_tol=args.degeneracy_tol)


def cmd_compile(args: argparse.Namespace, out_dir: str):
    result = compile_from_args(args)
    write_json(os.path.join(out_dir, C.COMPILE_NAME), result.to_dict())
    if result.hamiltonian is None:
        raise factor_compiler.TooManyQubits("%d qubits needed, the budget is %d"
                                            % (result.qubits_needed, args.qubit_budget))


def cmd_gap(args: argparse.Namespace, out_dir: str):
    problem = problem_from_args(args)
    scan = adiabatic_engine.spectrum_scan(problem, np.linspace(0., 1., args.s_points), args.sector)
    g_min, s_star = scan.min_gap()
    logger.info("Minimum gap %.9f at s=%.6f (%s sector)", g_min, s_star, scan.sector)
    write_csv(os.path.join(out_dir, C.SPECTRUM_NAME), scan.columns(), scan.rows())
    write_json(os.path.join(out_dir, C.GAP_NAME), {"g_min": g_min, "s_star": s_star, "sector": scan.sector,
                                                   "grid_points": args.s_points,
                                                   "gap_at_start": float(scan.gaps[0]),
                                                   "gap_at_end": float(scan.gaps[-1])})


def cmd_evolve(args: argparse.Namespace, out_dir: str):
    problem = problem_from_args(args)
    steps = steps_config_from_args(args)
    trajectory = adiabatic_engine.evolve(problem, steps,
                                         adiabatic_engine.default_checkpoints(problem.total_time, args.checkpoints))
    write_csv(os.path.join(out_dir, C.TRAJECTORY_NAME), trajectory.columns(), trajectory.rows())
    summary = trajectory.summary()
    summary.update({"t_total": problem.total_time, "g1": problem.g1, "g2": problem.g2})
    if args.scan_t:
        rows = adiabatic_engine.scan_total_time(problem, args.scan_t, steps, args.max_processes)
        write_csv(os.path.join(out_dir, C.T_SCAN_NAME), ["t_total", "target_fidelity", "ground_fidelity", "dt"],
                  [[r.total_time, r.target_fidelity, r.ground_fidelity, r.dt] for r in rows])
        summary["t_scan_monotone"] = all(b.ground_fidelity >= a.ground_fidelity for a, b in zip(rows, rows[1:]))
    write_json(os.path.join(out_dir, C.EVOLVE_SUMMARY_NAME), summary)


def cmd_nv(args: argparse.Namespace, out_dir: str):
    params = nv_params_from_args(args)
    write_csv(os.path.join(out_dir, C.NV_LEVELS_NAME), ["m_s", "m_i", "energy_mhz"], nv_map.nv_level_table(params))
    for kind, label, frequency in nv_map.transition_frequencies(params):
        logger.info("%s transition (%s): %.6f MHz", kind, label, frequency)
    if args.levels:
        return
    problem = problem_from_args(args)
    times = np.linspace(0., problem.total_time, args.control_points)
    rows = nv_map.controls_table(problem, times)
    columns = ["t", "s", "omega_mw", "omega_rf", "delta_mw", "delta_rf"]
    write_csv(os.path.join(out_dir, C.NV_CONTROLS_NAME), columns, [[row[c] for c in columns] for row in rows])


def cmd_grape(args: argparse.Namespace, out_dir: str):
    cp = pulse_opt.nv_control_problem(duration=args.duration, bound=args.bound)
    grape_config = grape_config_from_args(args)
    init = pulse_opt.initial_pulse(cp, grape_config)
    initial_fidelity = pulse_opt.transfer_fidelity(cp, init)
    try:
        result = pulse_opt.optimize(cp, init, grape_config)
    except pulse_opt.NoProgress as e:
        logger.warning("%s; writing the best pulse found", e)
        result = e.result
    result.pulse.save(os.path.join(out_dir, C.PULSE_NAME))
    write_csv(os.path.join(out_dir, C.GRAPE_LOG_NAME), ["iteration", "fidelity", "step", "grad_norm"],
              [[entry.iteration, entry.fidelity, entry.step, entry.grad_norm] for entry in result.log])
    robustness = pulse_opt.robustness_scan(cp, result.pulse, args.epsilons)
    write_csv(os.path.join(out_dir, C.ROBUSTNESS_NAME), ["epsilon", "fidelity"],
              [[eps, fid] for eps, fid in zip(args.epsilons, robustness)])
    summary = result.summary()
    summary.update({"initial_fidelity": initial_fidelity, "min_robust_fidelity": min(robustness),
                    "config": grape_config.as_dict()})
    write_json(os.path.join(out_dir, C.GRAPE_SUMMARY_NAME), summary)


def _tomography_state(args: argparse.Namespace) -> qcore.DensityMatrix:
    if args.state == C.TOMO_STATE_IDEAL:
        return qcore.projector(adiabatic_engine.ideal_final_state())
    if args.state == C.TOMO_STATE_PULSE:
        if args.pulse is None:
            raise UsageError("--state %s needs --pulse" % C.TOMO_STATE_PULSE)
        pulse = pulse_opt.PulseSequence.load(args.pulse)
        cp = pulse_opt.nv_control_problem(duration=pulse.duration, bound=float(np.max(pulse.bounds)))
        cp.bounds = pulse.bounds
        return qcore.projector(pulse_opt.propagate(cp, pulse))
    problem = problem_from_args(args)
    check_condition(problem.dim == C.TWO_QUBIT_DIM, "tomography covers the two-qubit register only")
    trajectory = adiabatic_engine.evolve(problem, steps_config_from_args(args), checkpoints=[])
    return qcore.as_density_matrix(trajectory.final_state)


def cmd_tomo(args: argparse.Namespace, out_dir: str):
    rho = _tomography_state(args)
    result = tomography.run_tomography(rho, shots=args.shots, seed=args.seed, max_processes=args.max_processes)
    write_csv(os.path.join(out_dir, C.TOMO_RECORDS_NAME), tomography.RECORD_COLUMNS,
              [record.row() for record in result.records])
    write_json(os.path.join(out_dir, C.DENSITY_MATRIX_NAME), result.density_matrix_dict())
    write_json(os.path.join(out_dir, C.TOMO_SUMMARY_NAME), {"state": args.state,
                                                            "shots": args.shots,
                                                            "fidelity": result.fidelity,
                                                            "state_fidelity": tomography.report_fidelity(rho),
                                                            "condition_number": result.condition_number})


def _ensemble(args: argparse.Namespace, e: error_model.ErrorConfig,
              pipeline: Dict[str, Any]) -> error_model.EnsembleResult:
    if args.pipeline == C.NOISY_PIPELINE_GRAPE:
        return error_model.noisy_pulse_ensemble(pipeline["cp"], pipeline["pulse"], e, args.max_processes)
    return error_model.noisy_trajectory_ensemble(pipeline["problem"], e, pipeline["steps"],
                                                 max_processes=args.max_processes)


def cmd_report(args: argparse.Namespace, out_dir: str):
    e = error_config_from_args(args)
    pipeline = {}  # type: Dict[str, Any]
    if args.pipeline == C.NOISY_PIPELINE_GRAPE:
        if args.pulse is not None:
            pulse = pulse_opt.PulseSequence.load(args.pulse)
            cp = pulse_opt.nv_control_problem(duration=pulse.duration, bound=float(np.max(pulse.bounds)))
            cp.bounds = pulse.bounds
        else:
            cp = pulse_opt.nv_control_problem(duration=args.duration, bound=args.bound)
            pulse = pulse_opt.adiabatic_pulse(cp, args.pulse_g, args.segments)
        pipeline.update(cp=cp, pulse=pulse)
        noiseless = pulse_opt.transfer_fidelity(cp, pulse)
    else:
        problem = problem_from_args(args)
        nv_map.check_realizable(problem)
        steps = steps_config_from_args(args)
        pipeline.update(problem=problem, steps=steps.copy(refine=False))
        noiseless = adiabatic_engine.evolve(problem, steps, checkpoints=[]).target_fidelity

    ensemble = _ensemble(args, e, pipeline)
    write_csv(os.path.join(out_dir, C.ENSEMBLE_NAME), ensemble.columns(), ensemble.rows())
    noisy = tomography.run_tomography(ensemble.mean_final, shots=args.shots, seed=args.seed,
                                      max_processes=args.max_processes)
    band = C.REPORTED_FIDELITY_BAND
    report = {"pipeline": args.pipeline,
              "noiseless_fidelity": noiseless,
              "ensemble_fidelity": ensemble.final_fidelity,
              "noisy_fidelity": noisy.fidelity,
              "reported_fidelity": C.REPORTED_FIDELITY,
              "band": list(band),
              "in_band": band[0] <= noisy.fidelity <= band[1],
              "errors": e.as_dict(),
              "shots": args.shots}  # type: Dict[str, Any]
    if not args.no_calibration:
        pure = _ensemble(args, e.copy(polarization_error=0.), pipeline)
        calibration = error_model.calibrate_polarization(pure.mean_final, shots=args.shots, seed=args.seed)
        write_csv(os.path.join(out_dir, C.CALIBRATION_NAME), ["polarization_error", "fidelity"], calibration.rows())
        report["calibration"] = calibration.summary()
    logger.info("Noiseless fidelity %.6f, noisy tomography fidelity %.6f (%s the band [%.2f, %.2f])", noiseless,
                noisy.fidelity, "inside" if report["in_band"] else "outside", band[0], band[1])
    write_json(os.path.join(out_dir, C.REPORT_NAME), report)


COMMAND_FUNCTIONS = {
    C.CMD_COMPILE: cmd_compile,
    C.CMD_GAP: cmd_gap,
    C.CMD_EVOLVE: cmd_evolve,
    C.CMD_NV: cmd_nv,
    C.CMD_GRAPE: cmd_grape,
    C.CMD_TOMO: cmd_tomo,
    C.CMD_REPORT: cmd_report,
}  # type: Dict[str, Callable[[argparse.Namespace, str], None]]


def usage() -> str:
    lines = ["usage: aqfactor {%s} [flags]" % ",".join(C.COMMANDS), ""]
    lines += ["  %-8s %s" % (command, C.COMMAND_DESCRIPTIONS[command]) for command in C.COMMANDS]
    lines += ["", "Run 'aqfactor <command> --help' for the flags of a command."]
    return "\n".join(lines)


def exit_code(error: Exception) -> int:
    if isinstance(error, (factor_compiler.InvalidWidths, UsageError)):
        return C.EXIT_CONFIG_ERROR
    if isinstance(error, factor_compiler.Infeasible):
        return C.EXIT_INFEASIBLE
    if isinstance(error, factor_compiler.TooManyQubits):
        return C.EXIT_TOO_MANY_QUBITS
    if isinstance(error, adiabatic_engine.NonConvergent):
        return C.EXIT_NON_CONVERGENT
    return C.EXIT_OTHER_ERROR


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] in ("-h", "--help"):
        print(usage(), file=sys.stdout if argv else sys.stderr)
        return C.EXIT_OK if argv else C.EXIT_CONFIG_ERROR
    if argv[0] in ("-v", "--version"):
        print("aqfactor %s" % __version__)
        return C.EXIT_OK
    command = argv[0]
    if command not in COMMAND_FUNCTIONS:
        print(usage(), file=sys.stderr)
        print("aqfactor: error: unknown command '%s'" % command, file=sys.stderr)
        return C.EXIT_CONFIG_ERROR

    args = arguments.build_parser(command).parse_args(argv[1:])
    out_dir = get_output_dir(args.out_dir)
    setup_main_logger(file_logging=not args.no_logfile,
                      console=not args.quiet,
                      path=os.path.join(out_dir, C.LOG_NAME),
                      level=args.loglevel)
    log_basic_info(args)
    seed_rngs(args.seed)
    run_config_from_args(command, args).save(os.path.join(out_dir, C.RUN_CONFIG_NAME))

    try:
        COMMAND_FUNCTIONS[command](args, out_dir)
    except AqfactorError as e:
        code = exit_code(e)
        logger.error("%s failed (exit code %d): %s", command, code, e)
        return code
    logger.info("Artifacts written to %s", out_dir)
    return C.EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
