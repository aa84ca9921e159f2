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
Defines commandline arguments for the aqfactor subcommands with defaults reproducing the N=35 pipeline.
"""
import argparse
import os
import re
import sys
import types
from typing import Any, Callable, Dict, List, NoReturn, Tuple

import yaml

from . import constants as C
from .config import Config, SafeLoaderWithTuple
from .utils import parse_float_list


NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d)")


class _ConfigErrorParser(argparse.ArgumentParser):
    """
    Argument parser whose usage errors exit with the configuration error code.
    """

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(C.EXIT_CONFIG_ERROR, "%s: error: %s\n" % (self.prog, message))


class ConfigArgumentParser(_ConfigErrorParser):
    """
    Extension of argparse.ArgumentParser supporting config files.

    The option --config is added automatically and expects a YAML serialized
    dictionary of argument destinations (or a saved run configuration). Command line
    parameters have precedence over config file values, which have precedence over defaults.
    """
    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self.argument_definitions = {}  # type: Dict[Tuple, Dict]
        self.argument_actions = []  # type: List[Any]
        self._overwrite_add_argument(self)
        self.add_argument("--config", help="Path to CLI arguments in yaml format "
                                           "(as saved with every run as '%s'). "
                                           "Commandline arguments have precedence over values in this file."
                                           % C.RUN_CONFIG_NAME, type=str)

    def _register_argument(self, _action, *args, **kwargs):
        self.argument_definitions[args] = kwargs
        self.argument_actions.append(_action)

    def _overwrite_add_argument(self, original_object):
        def _new_add_argument(this_self, *args, **kwargs):
            action = this_self.original_add_argument(*args, **kwargs)
            this_self.config_container._register_argument(action, *args, **kwargs)

        original_object.original_add_argument = original_object.add_argument
        original_object.config_container = self
        original_object.add_argument = types.MethodType(_new_add_argument, original_object)

        return original_object

    def _join_negative_values(self, args: List[str]) -> List[str]:
        """
        Rewrites `--opt -0.1,0,0.1` as `--opt=-0.1,0,0.1` for single-valued options; argparse would read the
        value as an option otherwise.
        """
        joined = []  # type: List[str]
        i = 0
        while i < len(args):
            action = self._option_string_actions.get(args[i])
            if action is not None and action.nargs is None and i + 1 < len(args) \
                    and NEGATIVE_VALUE.match(args[i + 1]):
                joined.append("%s=%s" % (args[i], args[i + 1]))
                i += 2
            else:
                joined.append(args[i])
                i += 1
        return joined

    def add_argument_group(self, *args, **kwargs):
        group = super().add_argument_group(*args, **kwargs)
        return self._overwrite_add_argument(group)

    def parse_args(self, args=None, namespace=None) -> argparse.Namespace:  # type: ignore
        args = self._join_negative_values(sys.argv[1:] if args is None else list(args))
        # Mini argument parser to find the config file
        config_parser = _ConfigErrorParser(prog=self.prog, add_help=False)
        config_parser.add_argument("--config", type=regular_file())
        config_args, _ = config_parser.parse_known_args(args=args)
        initial_args = argparse.Namespace()
        if config_args.config:
            try:
                initial_args = load_args(config_args.config)
            except (yaml.YAMLError, TypeError) as e:
                self.error("cannot read config file %s: %s" % (config_args.config, e))
            known = {action.dest for action in self.argument_actions}
            unknown = sorted(set(vars(initial_args)) - known)
            if unknown:
                self.error("unknown keys in config file %s: %s" % (config_args.config, ", ".join(unknown)))
            # Remove the 'required' flag from options loaded from config file
            for action in self.argument_actions:
                if action.dest in initial_args:
                    action.required = False
        return super().parse_args(args=args, namespace=initial_args)


def load_args(fname: str) -> argparse.Namespace:
    """
    Reads a plain mapping of argument destinations, or a saved run configuration whose `arguments` field
    holds that mapping.
    """
    with open(fname, 'r') as inp:
        obj = yaml.load(inp, Loader=SafeLoaderWithTuple)  # type: ignore
    if isinstance(obj, Config):
        obj = getattr(obj, "arguments")
    if obj is None:
        obj = {}
    if not isinstance(obj, dict):
        raise TypeError("expected a mapping of argument names to values")
    return argparse.Namespace(**obj)


def regular_file() -> Callable:
    """
    Returns a method that can be used in argument parsing to check the argument is a regular file or a symbolic link,
    but not, e.g., a process substitution.

    :return: A method that can be used as a type in argparse.
    """

    def check_regular_file(value_to_check):
        value_to_check = str(value_to_check)
        if not os.path.isfile(value_to_check):
            raise argparse.ArgumentTypeError("must exist and be a regular file.")
        return value_to_check

    return check_regular_file


def int_greater_or_equal(threshold: int) -> Callable:
    """
    Returns a method that can be used in argument parsing to check that the int argument is greater or equal to `threshold`.

    :param threshold: The threshold that we assume the cli argument value is greater or equal to.
    :return: A method that can be used as a type in argparse.
    """

    def check_greater_equal(value: str):
        value_to_check = int(value)
        if value_to_check < threshold:
            raise argparse.ArgumentTypeError("must be greater or equal to %d." % threshold)
        return value_to_check

    return check_greater_equal


def float_greater_or_equal(threshold: float) -> Callable:
    """
    Returns a method that can be used in argument parsing to check that the float argument is greater or equal to `threshold`.

    :param threshold: The threshold that we assume the cli argument value is greater or equal to.
    :return: A method that can be used as a type in argparse.
    """

    def check_greater_equal(value: str):
        value_to_check = float(value)
        if value_to_check < threshold:
            raise argparse.ArgumentTypeError("must be greater or equal to %f." % threshold)
        return value_to_check

    return check_greater_equal


def float_in_range(lower: float, upper: float) -> Callable:

    def check_range(value: str):
        value_to_check = float(value)
        if not lower <= value_to_check <= upper:
            raise argparse.ArgumentTypeError("must lie in [%g, %g]." % (lower, upper))
        return value_to_check

    return check_range


def float_list() -> Callable:
    """
    Returns a method that parses comma-separated floats, e.g. "5,10,20".
    """

    def parse(value: str):
        try:
            values = parse_float_list(value)
        except ValueError:
            raise argparse.ArgumentTypeError("expected comma-separated numbers, got '%s'" % value)
        if not values:
            raise argparse.ArgumentTypeError("expected at least one number")
        return values

    return parse


def add_output_args(params):
    output_params = params.add_argument_group("Output")
    output_params.add_argument('--out-dir', '-o',
                               default=None,
                               help='Directory for all artifacts and the log file. Default: $%s, else the '
                                    'current directory.' % C.OUTPUT_DIR_ENV)
    output_params.add_argument('--seed',
                               type=int,
                               default=C.DEFAULT_SEED,
                               help='Random seed. Default: %(default)s.')


def add_logging_args(params):
    logging_params = params.add_argument_group("Logging")
    logging_params.add_argument('--quiet', '-q',
                                default=False,
                                action="store_true",
                                help='Suppress console logging.')
    logging_params.add_argument('--no-logfile',
                                default=False,
                                action="store_true",
                                help='Suppress file logging')
    log_levels = ['INFO', 'DEBUG', 'ERROR']
    logging_params.add_argument('--loglevel', '--log-level',
                                default='INFO',
                                choices=log_levels,
                                help='Log level. Default: %(default)s.')


def add_process_pool_args(params):
    params.add_argument('--max-processes',
                        type=int_greater_or_equal(1),
                        default=1,
                        help='Evaluate independent samples in parallel using max-processes processes. '
                             'Default: %(default)s.')


def add_problem_args(params):
    problem_params = params.add_argument_group("Factoring problem")
    problem_params.add_argument('--n', '-n',
                                type=int_greater_or_equal(C.MIN_SEMIPRIME),
                                default=35,
                                help='Odd number to factor. Default: %(default)s.')
    problem_params.add_argument('--wx',
                                type=int_greater_or_equal(2),
                                default=None,
                                help='Bit width of the first factor. Default: most balanced widths that fit N.')
    problem_params.add_argument('--wy',
                                type=int_greater_or_equal(2),
                                default=None,
                                help='Bit width of the second factor. Default: most balanced widths that fit N.')
    problem_params.add_argument('--no-simplify',
                                action='store_true',
                                default=False,
                                help='Emit the unsimplified column equations.')
    problem_params.add_argument('--qubit-budget',
                                type=int_greater_or_equal(0),
                                default=C.DEFAULT_QUBIT_BUDGET,
                                help='Largest number of qubits for which a Hamiltonian matrix is emitted. '
                                     'Default: %(default)s.')
    problem_params.add_argument('--g1',
                                type=float,
                                default=C.DEFAULT_G1,
                                help='Energy scale of the problem Hamiltonian. Default: %(default)s.')
    problem_params.add_argument('--g2',
                                type=float,
                                default=C.DEFAULT_G2,
                                help='Energy scale of the initial Hamiltonian. Default: %(default)s.')
    problem_params.add_argument('--degeneracy-tol',
                                type=float_greater_or_equal(0.),
                                default=C.DEGENERACY_TOL,
                                help='Relative tolerance under which eigenvalues count as one degenerate level. '
                                     'Default: %(default)s.')


def add_schedule_args(params):
    schedule_params = params.add_argument_group("Schedule")
    schedule_params.add_argument('--t-total',
                                 type=float_greater_or_equal(1e-9),
                                 default=C.DEFAULT_TOTAL_TIME,
                                 help='Total evolution time T in units of 1/g. Default: %(default)s.')
    schedule_params.add_argument('--schedule',
                                 choices=C.SCHEDULE_CHOICES,
                                 default=C.SCHEDULE_LINEAR,
                                 help='Interpolation s(t). Default: %(default)s.')
    schedule_params.add_argument('--schedule-coefficients',
                                 type=float_list(),
                                 default=None,
                                 help='Polynomial coefficients a_0,a_1,... of s(t/T).')
    schedule_params.add_argument('--schedule-taus',
                                 type=float_list(),
                                 default=None,
                                 help='Knot times in [0, 1] of a tabulated schedule.')
    schedule_params.add_argument('--schedule-values',
                                 type=float_list(),
                                 default=None,
                                 help='Knot values of a tabulated schedule.')


def add_steps_args(params):
    steps_params = params.add_argument_group("Integration")
    steps_params.add_argument('--max-dt',
                              type=float_greater_or_equal(1e-9),
                              default=C.DEFAULT_MAX_DT,
                              help='Largest propagator step. Default: %(default)s.')
    steps_params.add_argument('--no-refine',
                              action='store_true',
                              default=False,
                              help='Do not halve the step until the final fidelity converges.')
    steps_params.add_argument('--refine-tol',
                              type=float_greater_or_equal(0.),
                              default=C.DEFAULT_REFINE_TOL,
                              help='Convergence tolerance of the final fidelity. Default: %(default)s.')
    steps_params.add_argument('--min-dt',
                              type=float_greater_or_equal(1e-12),
                              default=C.DEFAULT_MIN_DT,
                              help='Smallest step before giving up. Default: %(default)s.')


def add_gap_args(params):
    gap_params = params.add_argument_group("Spectrum")
    gap_params.add_argument('--s-points',
                            type=int_greater_or_equal(3),
                            default=C.GAP_GRID_POINTS,
                            help='Number of grid points in s. Default: %(default)s.')
    gap_params.add_argument('--sector',
                            choices=C.SECTOR_CHOICES,
                            default=C.SECTOR_AUTO,
                            help='Spectrum used for the gap. Default: %(default)s.')


def add_evolve_args(params):
    evolve_params = params.add_argument_group("Evolution")
    evolve_params.add_argument('--checkpoints',
                               type=int_greater_or_equal(2),
                               default=C.DEFAULT_NUM_CHECKPOINTS,
                               help='Number of uniformly spaced checkpoints. Default: %(default)s.')
    evolve_params.add_argument('--scan-T',
                               dest='scan_t',
                               type=float_list(),
                               default=None,
                               help='Comma-separated total times for a ladder of final fidelities.')


def add_nv_args(params):
    nv_params = params.add_argument_group("NV center")
    nv_params.add_argument('--d', type=float, default=C.NV_D_MHZ,
                           help='Zero-field splitting (MHz). Default: %(default)s.')
    nv_params.add_argument('--q', type=float, default=C.NV_Q_MHZ,
                           help='Nuclear quadrupolar splitting (MHz). Default: %(default)s.')
    nv_params.add_argument('--gamma-e', type=float, default=C.NV_GAMMA_E_MHZ_PER_G,
                           help='Electron gyromagnetic ratio (MHz/G). Default: %(default)s.')
    nv_params.add_argument('--gamma-n', type=float, default=C.NV_GAMMA_N_KHZ_PER_G,
                           help='Nuclear gyromagnetic ratio (kHz/G). Default: %(default)s.')
    nv_params.add_argument('--bz', type=float, default=C.NV_BZ_GAUSS,
                           help='Field along the NV axis (G). Default: %(default)s.')
    nv_params.add_argument('--a-par', type=float, default=C.NV_A_PAR_MHZ,
                           help='Secular hyperfine coupling (MHz). Default: %(default)s.')
    nv_params.add_argument('--levels',
                           action='store_true',
                           default=False,
                           help='Only emit the level table.')
    nv_params.add_argument('--control-points',
                           type=int_greater_or_equal(2),
                           default=101,
                           help='Number of times at which the controls are tabulated. Default: %(default)s.')


def add_pulse_args(params):
    pulse_params = params.add_argument_group("Pulse")
    pulse_params.add_argument('--duration',
                              type=float_greater_or_equal(1e-6),
                              default=C.T2_STAR_US,
                              help='Pulse duration budget (us). Default: %(default)s.')
    pulse_params.add_argument('--bound',
                              type=float_greater_or_equal(1e-6),
                              default=C.DEFAULT_BOUND_MHZ,
                              help='Amplitude bound of every channel (MHz). Default: %(default)s.')
    pulse_params.add_argument('--pulse-g',
                              type=float,
                              default=C.DEFAULT_PULSE_G_MHZ,
                              help='Coupling g1 = g2 (MHz) of the discretized adiabatic pulse. Default: %(default)s.')
    pulse_params.add_argument('--segments',
                              type=int_greater_or_equal(1),
                              default=C.DEFAULT_NUM_SEGMENTS,
                              help='Number of piecewise-constant segments. Default: %(default)s.')


def add_grape_args(params):
    grape_params = params.add_argument_group("Optimizer")
    grape_params.add_argument('--init',
                              choices=C.PULSE_INIT_CHOICES,
                              default=C.PULSE_INIT_ADIABATIC,
                              help='Initial pulse. Default: %(default)s.')
    grape_params.add_argument('--max-iters',
                              type=int_greater_or_equal(0),
                              default=C.DEFAULT_MAX_ITERS,
                              help='Maximum number of ascent iterations. Default: %(default)s.')
    grape_params.add_argument('--target-fidelity',
                              type=float_in_range(0., 1.),
                              default=C.DEFAULT_TARGET_FIDELITY,
                              help='Stop once this transfer fidelity is reached. Default: %(default)s.')
    grape_params.add_argument('--gradient',
                              choices=C.GRADIENT_CHOICES,
                              default=C.GRADIENT_ADJOINT,
                              help='Gradient backend. Default: %(default)s.')
    grape_params.add_argument('--initial-step',
                              type=float_greater_or_equal(0.),
                              default=10.0,
                              help='Initial line-search step. Default: %(default)s.')
    grape_params.add_argument('--max-stalls',
                              type=int_greater_or_equal(1),
                              default=C.DEFAULT_MAX_STALLS,
                              help='Consecutive failed line searches before giving up. Default: %(default)s.')
    grape_params.add_argument('--epsilons',
                              type=float_list(),
                              default=C.DEFAULT_ROBUSTNESS_EPSILONS,
                              help='Relative amplitude errors of the robustness scan. Default: -0.1 to 0.1.')


def add_tomo_args(params):
    tomo_params = params.add_argument_group("Tomography")
    tomo_params.add_argument('--shots',
                             type=int_greater_or_equal(0),
                             default=C.EXACT_SHOTS,
                             help='Shots per readout setting; 0 uses exact populations. Default: %(default)s.')


def add_tomo_state_args(params):
    params.add_argument('--state',
                        choices=[C.TOMO_STATE_ADIABATIC, C.TOMO_STATE_IDEAL, C.TOMO_STATE_PULSE],
                        default=C.TOMO_STATE_ADIABATIC,
                        help='State to reconstruct. Default: %(default)s.')
    params.add_argument('--pulse',
                        type=regular_file(),
                        default=None,
                        help='Pulse file propagated on the NV register for --state %s.' % C.TOMO_STATE_PULSE)


def add_error_args(params):
    error_params = params.add_argument_group("Error model")
    error_params.add_argument('--pipeline',
                              choices=C.NOISY_PIPELINE_CHOICES,
                              default=C.NOISY_PIPELINE_ADIABATIC,
                              help='Noisy realization to report on. Default: %(default)s.')
    error_params.add_argument('--polarization-error',
                              type=float_in_range(0., 1.),
                              default=C.DEFAULT_POLARIZATION_ERROR,
                              help='Depolarized fraction of the initial state. Default: %(default)s.')
    error_params.add_argument('--sigma-mw',
                              type=float_greater_or_equal(0.),
                              default=C.DEFAULT_AMPLITUDE_SIGMA,
                              help='Relative std. dev. of the MW amplitude. Default: %(default)s.')
    error_params.add_argument('--sigma-rf',
                              type=float_greater_or_equal(0.),
                              default=C.DEFAULT_AMPLITUDE_SIGMA,
                              help='Relative std. dev. of the RF amplitude. Default: %(default)s.')
    error_params.add_argument('--samples',
                              type=int_greater_or_equal(1),
                              default=C.DEFAULT_NUM_SAMPLES,
                              help='Number of error samples. Default: %(default)s.')
    error_params.add_argument('--truncation',
                              type=float_greater_or_equal(1e-6),
                              default=C.DEFAULT_TRUNCATION,
                              help='Truncation of the amplitude distribution in standard deviations. '
                                   'Default: %(default)s.')
    error_params.add_argument('--no-calibration',
                              action='store_true',
                              default=False,
                              help='Skip the polarization-error calibration sweep.')
    error_params.add_argument('--pulse',
                              type=regular_file(),
                              default=None,
                              help='Pulse file for the %s pipeline. Default: the discretized adiabatic pulse.'
                                   % C.NOISY_PIPELINE_GRAPE)


def add_common_args(params):
    add_output_args(params)
    add_logging_args(params)
    add_process_pool_args(params)


def build_parser(command: str) -> ConfigArgumentParser:
    """
    Parser of the flags of one subcommand.

    :raises ValueError: For an unknown command.
    """
    if command not in C.COMMANDS:
        raise ValueError("Unknown command %s. Choices: %s" % (command, C.COMMANDS))
    params = ConfigArgumentParser(prog="aqfactor %s" % command,
                                  description=C.COMMAND_DESCRIPTIONS[command])
    add_common_args(params)
    if command in (C.CMD_COMPILE, C.CMD_GAP, C.CMD_EVOLVE, C.CMD_NV, C.CMD_TOMO, C.CMD_REPORT):
        add_problem_args(params)
    if command in (C.CMD_GAP, C.CMD_EVOLVE, C.CMD_NV, C.CMD_TOMO, C.CMD_REPORT):
        add_schedule_args(params)
    if command in (C.CMD_EVOLVE, C.CMD_TOMO, C.CMD_REPORT):
        add_steps_args(params)
    if command == C.CMD_GAP:
        add_gap_args(params)
    if command == C.CMD_EVOLVE:
        add_evolve_args(params)
    if command == C.CMD_NV:
        add_nv_args(params)
    if command in (C.CMD_GRAPE, C.CMD_REPORT):
        add_pulse_args(params)
    if command == C.CMD_GRAPE:
        add_grape_args(params)
    if command in (C.CMD_TOMO, C.CMD_REPORT):
        add_tomo_args(params)
    if command == C.CMD_TOMO:
        add_tomo_state_args(params)
    if command == C.CMD_REPORT:
        add_error_args(params)
    return params
