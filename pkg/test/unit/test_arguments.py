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


import argparse
import os
import tempfile

import pytest
import yaml

import aqfactor.arguments as arguments
import aqfactor.constants as C
from aqfactor.cli import RunConfig


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(out_dir=None, seed=C.DEFAULT_SEED)),
    ('-o results --seed 3', dict(out_dir='results', seed=3)),
])
def test_output_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_output_args)


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(quiet=False,
              loglevel='INFO',
              no_logfile=False)),
    ('-q --loglevel DEBUG --no-logfile', dict(quiet=True,
                                              loglevel='DEBUG',
                                              no_logfile=True)),
])
def test_logging_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_logging_args)


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(n=35, wx=None, wy=None, no_simplify=False, qubit_budget=C.DEFAULT_QUBIT_BUDGET,
              g1=C.DEFAULT_G1, g2=C.DEFAULT_G2, degeneracy_tol=C.DEGENERACY_TOL)),
    ('-n 143 --wx 4 --wy 4 --no-simplify --qubit-budget 12 --g1 2 --g2 0.5',
     dict(n=143, wx=4, wy=4, no_simplify=True, qubit_budget=12, g1=2., g2=0.5,
          degeneracy_tol=C.DEGENERACY_TOL)),
])
def test_problem_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_problem_args)


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(t_total=C.DEFAULT_TOTAL_TIME, schedule=C.SCHEDULE_LINEAR, schedule_coefficients=None,
              schedule_taus=None, schedule_values=None)),
    ('--t-total 50 --schedule polynomial --schedule-coefficients 0,0,3,-2',
     dict(t_total=50., schedule=C.SCHEDULE_POLYNOMIAL, schedule_coefficients=[0., 0., 3., -2.],
          schedule_taus=None, schedule_values=None)),
])
def test_schedule_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_schedule_args)


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(max_dt=C.DEFAULT_MAX_DT, no_refine=False, refine_tol=C.DEFAULT_REFINE_TOL, min_dt=C.DEFAULT_MIN_DT)),
    ('--max-dt 0.1 --no-refine', dict(max_dt=0.1, no_refine=True, refine_tol=C.DEFAULT_REFINE_TOL,
                                      min_dt=C.DEFAULT_MIN_DT)),
])
def test_steps_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_steps_args)


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(checkpoints=C.DEFAULT_NUM_CHECKPOINTS, scan_t=None)),
    ('--checkpoints 11 --scan-T 5,10,20', dict(checkpoints=11, scan_t=[5., 10., 20.])),
])
def test_evolve_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_evolve_args)


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(d=C.NV_D_MHZ, q=C.NV_Q_MHZ, gamma_e=C.NV_GAMMA_E_MHZ_PER_G, gamma_n=C.NV_GAMMA_N_KHZ_PER_G,
              bz=C.NV_BZ_GAUSS, a_par=C.NV_A_PAR_MHZ, levels=False, control_points=101)),
])
def test_nv_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_nv_args)


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(init=C.PULSE_INIT_ADIABATIC, max_iters=C.DEFAULT_MAX_ITERS,
              target_fidelity=C.DEFAULT_TARGET_FIDELITY, gradient=C.GRADIENT_ADJOINT, initial_step=10.,
              max_stalls=C.DEFAULT_MAX_STALLS, epsilons=C.DEFAULT_ROBUSTNESS_EPSILONS)),
    ('--init random --gradient autograd --epsilons -0.05,0.05',
     dict(init=C.PULSE_INIT_RANDOM, max_iters=C.DEFAULT_MAX_ITERS,
          target_fidelity=C.DEFAULT_TARGET_FIDELITY, gradient=C.GRADIENT_AUTOGRAD, initial_step=10.,
          max_stalls=C.DEFAULT_MAX_STALLS, epsilons=[-0.05, 0.05])),
])
def test_grape_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_grape_args)


@pytest.mark.parametrize("test_params, expected_params", [
    ('', dict(pipeline=C.NOISY_PIPELINE_ADIABATIC, polarization_error=C.DEFAULT_POLARIZATION_ERROR,
              sigma_mw=C.DEFAULT_AMPLITUDE_SIGMA, sigma_rf=C.DEFAULT_AMPLITUDE_SIGMA, samples=C.DEFAULT_NUM_SAMPLES,
              truncation=C.DEFAULT_TRUNCATION, no_calibration=False, pulse=None)),
])
def test_error_args(test_params, expected_params):
    _test_args(test_params, expected_params, arguments.add_error_args)


@pytest.mark.parametrize("command, expected_present, expected_absent", [
    (C.CMD_COMPILE, ['n', 'qubit_budget', 'seed', 'max_processes'], ['t_total', 'shots']),
    (C.CMD_GAP, ['n', 't_total', 's_points', 'sector'], ['max_dt', 'checkpoints']),
    (C.CMD_EVOLVE, ['n', 't_total', 'max_dt', 'checkpoints', 'scan_t'], ['s_points', 'shots']),
    (C.CMD_NV, ['n', 'd', 'bz', 'levels'], ['max_dt']),
    (C.CMD_GRAPE, ['duration', 'bound', 'segments', 'init', 'gradient'], ['n', 't_total']),
    (C.CMD_TOMO, ['n', 'max_dt', 'shots', 'state', 'pulse'], ['pipeline']),
    (C.CMD_REPORT, ['n', 'max_dt', 'duration', 'shots', 'pipeline', 'samples', 'pulse'], ['state', 'init']),
])
def test_build_parser(command, expected_present, expected_absent):
    parsed = vars(arguments.build_parser(command).parse_args([]))
    for name in expected_present:
        assert name in parsed, "Expected param %s for command %s." % (name, command)
    for name in expected_absent:
        assert name not in parsed, "Unexpected param %s for command %s." % (name, command)
    assert parsed['config'] is None


def test_build_parser_unknown_command():
    with pytest.raises(ValueError):
        arguments.build_parser("factorize")


@pytest.mark.parametrize("command, test_params, dest, expected", [
    (C.CMD_GRAPE, ["--epsilons", "-0.1,0,0.1"], "epsilons", [-0.1, 0., 0.1]),
    (C.CMD_GRAPE, ["--epsilons", "-.5"], "epsilons", [-0.5]),
    (C.CMD_EVOLVE, ["--schedule-coefficients", "-1,4,-2", "--no-refine"], "schedule_coefficients", [-1., 4., -2.]),
])
def test_negative_list_values(command, test_params, dest, expected):
    assert getattr(arguments.build_parser(command).parse_args(test_params), dest) == expected


@pytest.mark.parametrize("test_params", [
    '-n 4',
    '--wx 1',
    '--qubit-budget -1',
    '--g1 one',
])
def test_invalid_values_exit_with_config_error(test_params):
    with pytest.raises(SystemExit) as e:
        arguments.build_parser(C.CMD_COMPILE).parse_args(test_params.split())
    assert e.value.code == C.EXIT_CONFIG_ERROR


def test_zero_total_time_exits_with_config_error():
    with pytest.raises(SystemExit) as e:
        arguments.build_parser(C.CMD_EVOLVE).parse_args(["--t-total", "0"])
    assert e.value.code == C.EXIT_CONFIG_ERROR


def test_int_greater_or_equal():
    check = arguments.int_greater_or_equal(2)
    assert check("2") == 2
    with pytest.raises(argparse.ArgumentTypeError):
        check("1")


def test_float_greater_or_equal():
    check = arguments.float_greater_or_equal(0.)
    assert check("0.5") == 0.5
    with pytest.raises(argparse.ArgumentTypeError):
        check("-0.5")


def test_float_in_range():
    check = arguments.float_in_range(0., 1.)
    assert check("1") == 1.
    with pytest.raises(argparse.ArgumentTypeError):
        check("1.5")


def test_float_list():
    parse = arguments.float_list()
    assert parse("5,10") == [5., 10.]
    for value in ["", "5,x"]:
        with pytest.raises(argparse.ArgumentTypeError):
            parse(value)


def test_regular_file():
    check = arguments.regular_file()
    with tempfile.TemporaryDirectory() as tmp_dir:
        fname = os.path.join(tmp_dir, "pulse.txt")
        open(fname, "w").close()
        assert check(fname) == fname
        with pytest.raises(argparse.ArgumentTypeError):
            check(tmp_dir)


def _test_args(test_params, expected_params, args_func):
    test_parser = arguments.ConfigArgumentParser()
    args_func(test_parser)
    parsed_params = dict(vars(test_parser.parse_args(test_params.split())))
    assert parsed_params.pop("config") is None
    assert parsed_params == expected_params


def _config_file_parser() -> arguments.ConfigArgumentParser:
    config_file_argparse = arguments.ConfigArgumentParser()
    # Capital letter arguments are required
    config_file_argparse.add_argument("-a", type=int)
    config_file_argparse.add_argument("-b", type=int)
    config_file_argparse.add_argument("-C", type=int, required=True)
    config_file_argparse.add_argument("-D", type=int, required=True)
    config_file_argparse.add_argument("-e", type=int)
    return config_file_argparse


def _write_yaml(fp, contents):
    yaml.safe_dump(contents, fp)
    fp.flush()


# Test that config file and command line are equivalent
@pytest.mark.parametrize("plain_command_line, config_command_line, config_contents", [
    ("-a 1 -b 2 -C 3 -D 4 -e 5", "", dict(a=1, b=2, C=3, D=4, e=5)),
    ("-a 1 -b 2 -C 3 -D 4 -e 5", "-a 1 -b 2 -e 5", dict(C=3, D=4)),
    ("-C 3 -D 4", "-C 3 -D 4", {}),
    ("-C 3 -D 4", "-C 3", dict(D=4)),
    ("-a 1 -C 3 -D 4", "", dict(a=1, C=3, D=4)),
    ("-a 1 -b 2 -C 3 -D 4 -e 5", "-a 1 -b 2 -C 3", dict(a=10, b=20, C=30, D=4, e=5))
])
def test_config_file(plain_command_line, config_command_line, config_contents):
    config_file_argparse = _config_file_parser()

    # The option '--config <file>' will be added automatically to config_command_line
    with tempfile.NamedTemporaryFile("w") as fp:
        _write_yaml(fp, config_contents)

        # Parse args and cast to dicts directly
        args_command_line = vars(config_file_argparse.parse_args(args=plain_command_line.split()))
        args_config = vars(config_file_argparse.parse_args(
            args=(config_command_line + (" --config %s" % fp.name)).split()))

        # Remove the config entry
        del args_command_line["config"]
        del args_config["config"]

        assert args_command_line == args_config


# Test that required options are still required if not specified in the config file
@pytest.mark.parametrize("config_command_line, config_contents", [
    ("", dict(a=1, b=2, C=3, e=5)),
    ("-C 3", dict(a=1))
])
def test_config_file_required(config_command_line, config_contents):
    config_file_argparse = _config_file_parser()

    with pytest.raises(SystemExit):  # argparse does not have finer regularity exceptions
        with tempfile.NamedTemporaryFile("w") as fp:
            _write_yaml(fp, config_contents)
            config_file_argparse.parse_args(args=(config_command_line + (" --config %s" % fp.name)).split())


def test_config_file_unknown_key():
    config_file_argparse = _config_file_parser()
    with pytest.raises(SystemExit) as e:
        with tempfile.NamedTemporaryFile("w") as fp:
            _write_yaml(fp, dict(C=3, D=4, z=1))
            config_file_argparse.parse_args(args=["--config", fp.name])
    assert e.value.code == C.EXIT_CONFIG_ERROR


def test_config_file_not_a_mapping():
    config_file_argparse = _config_file_parser()
    with pytest.raises(SystemExit):
        with tempfile.NamedTemporaryFile("w") as fp:
            _write_yaml(fp, [1, 2])
            config_file_argparse.parse_args(args=["--config", fp.name])


def test_saved_run_config_repeats_arguments():
    parser = arguments.build_parser(C.CMD_EVOLVE)
    args = parser.parse_args("-n 35 --t-total 40 --scan-T 5,10 --no-refine".split())
    arguments_dict = {k: v for k, v in vars(args).items() if k not in ("config", "out_dir")}
    with tempfile.TemporaryDirectory() as tmp_dir:
        fname = os.path.join(tmp_dir, C.RUN_CONFIG_NAME)
        RunConfig(command=C.CMD_EVOLVE, arguments=arguments_dict).save(fname)
        assert vars(arguments.load_args(fname)) == arguments_dict
        rerun = vars(arguments.build_parser(C.CMD_EVOLVE).parse_args(["--config", fname, "--t-total", "60"]))
    assert rerun["t_total"] == 60.
    assert rerun["scan_t"] == [5., 10.]
    assert rerun["no_refine"]
