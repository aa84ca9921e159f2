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
Defines various constants used throughout the project
"""
import math

ARG_SEPARATOR = ","

# numerical tolerances
HERMITICITY_TOL = 1e-9
UNITARITY_TOL = 1e-10
NORM_TOL = 1e-9
DEGENERACY_TOL = 1e-8
DENSITY_MATRIX_TOL = 1e-9
FIDELITY_SLACK = 1e-12

# qubit labels: |0> is the +1/2 eigenstate of Sz, electron is the left tensor factor
QUBIT_DIM = 2
TWO_QUBIT_DIM = 4
TWO_QUBIT_LABELS = ["00", "01", "10", "11"]
MAX_DIM = 16

# factor compiler
VAR_KIND_MULTIPLIER = "multiplier"
VAR_KIND_CARRY = "carry"
X_BIT_PREFIX = "p"
Y_BIT_PREFIX = "q"
CARRY_PREFIX = "z"
MIN_SEMIPRIME = 9
DEFAULT_QUBIT_BUDGET = 6
SIMPLIFY_VERIFY_MAX_VARS = 20
BRUTE_FORCE_MAX_VARS = 24
RULE_EXPAND = "idempotence"
RULE_BOUNDS = "bound_propagation"
RULE_SUBSTITUTE = "substitution"
RULE_SATISFIED = "drop_satisfied"
RULE_DUPLICATE = "drop_duplicate"
RULE_SUBSUMED = "subsumption"
RULES = [RULE_EXPAND, RULE_BOUNDS, RULE_SUBSTITUTE, RULE_SATISFIED, RULE_DUPLICATE, RULE_SUBSUMED]

# schedules
SCHEDULE_LINEAR = "linear"
SCHEDULE_POLYNOMIAL = "polynomial"
SCHEDULE_TABULATED = "tabulated"
SCHEDULE_CHOICES = [SCHEDULE_LINEAR, SCHEDULE_POLYNOMIAL, SCHEDULE_TABULATED]
SCHEDULE_CHECK_POINTS = 1001

# adiabatic engine
DEFAULT_G1 = 1.0
DEFAULT_G2 = 1.0
DEFAULT_TOTAL_TIME = 200.0
DEFAULT_NUM_CHECKPOINTS = 6
DEFAULT_MAX_DT = 0.05
DEFAULT_MIN_DT = 1e-5
DEFAULT_REFINE_TOL = 1e-8
PROPAGATOR_CHUNK_SIZE = 2 ** 14
GAP_GRID_POINTS = 201
GAP_REFINE_TOL = 1e-6
SECTOR_AUTO = "auto"
SECTOR_FULL = "full"
SECTOR_SYMMETRIC = "symmetric"
SECTOR_CHOICES = [SECTOR_AUTO, SECTOR_FULL, SECTOR_SYMMETRIC]
DEFAULT_T_LADDER = [5.0, 10.0, 20.0, 40.0, 80.0]

# NV center, MHz / gauss / kHz per gauss
NV_D_MHZ = 2870.0
NV_Q_MHZ = -4.95
NV_BZ_GAUSS = 510.0
NV_GAMMA_E_MHZ_PER_G = 2.8025
NV_GAMMA_N_KHZ_PER_G = 0.3077
NV_A_PAR_MHZ = -2.16
NV_SPIN_PROJECTIONS = (-1, 0, 1)

# pulse optimization, MHz and microseconds
TWO_PI = 2 * math.pi
T2_STAR_US = 1.7
DEFAULT_BOUND_MHZ = 10.0
DEFAULT_PULSE_G_MHZ = 5.0
DEFAULT_NUM_SEGMENTS = 100
CHANNEL_MW_X = "mw_x"
CHANNEL_MW_Y = "mw_y"
CHANNEL_RF_X = "rf_x"
CHANNEL_RF_Y = "rf_y"
CHANNEL_MW_DETUNING = "mw_detuning"
CHANNEL_RF_DETUNING = "rf_detuning"
NV_CHANNELS = [CHANNEL_MW_X, CHANNEL_MW_Y, CHANNEL_RF_X, CHANNEL_RF_Y, CHANNEL_MW_DETUNING, CHANNEL_RF_DETUNING]
CHANNEL_GROUP_MW = "mw"
CHANNEL_GROUP_RF = "rf"
NV_CHANNEL_GROUPS = {CHANNEL_MW_X: CHANNEL_GROUP_MW,
                     CHANNEL_MW_Y: CHANNEL_GROUP_MW,
                     CHANNEL_RF_X: CHANNEL_GROUP_RF,
                     CHANNEL_RF_Y: CHANNEL_GROUP_RF}
PULSE_INIT_ADIABATIC = "adiabatic"
PULSE_INIT_ZERO = "zero"
PULSE_INIT_RANDOM = "random"
PULSE_INIT_CHOICES = [PULSE_INIT_ADIABATIC, PULSE_INIT_ZERO, PULSE_INIT_RANDOM]
GRADIENT_ADJOINT = "adjoint"
GRADIENT_AUTOGRAD = "autograd"
GRADIENT_CHOICES = [GRADIENT_ADJOINT, GRADIENT_AUTOGRAD]
DEFAULT_MAX_ITERS = 200
DEFAULT_TARGET_FIDELITY = 0.999
DEFAULT_MAX_STALLS = 20
DEFAULT_ROBUSTNESS_EPSILONS = [round(-0.1 + 0.01 * i, 2) for i in range(21)]
PULSE_HEADER_PREFIX = "#"

# tomography
PULSE_IDENTITY = "identity"
PULSE_PI = "pi"
PULSE_HALF_PI_X = "half_pi_x"
PULSE_HALF_PI_Y = "half_pi_y"
READOUT_PULSES = [PULSE_IDENTITY, PULSE_PI, PULSE_HALF_PI_X, PULSE_HALF_PI_Y]
EXACT_SHOTS = 0
TOMO_STATE_ADIABATIC = "adiabatic"
TOMO_STATE_IDEAL = "ideal"
TOMO_STATE_PULSE = "pulse"

# error model and report
DEFAULT_POLARIZATION_ERROR = 0.25
DEFAULT_AMPLITUDE_SIGMA = 0.02
DEFAULT_NUM_SAMPLES = 500
DEFAULT_TRUNCATION = 3.0
DEFAULT_SEED = 13
REPORTED_FIDELITY = 0.81
REPORTED_FIDELITY_BAND = (0.75, 0.87)
CALIBRATION_GRID_POINTS = 51
CALIBRATION_MAX_POLARIZATION_ERROR = 0.5
NOISY_PIPELINE_ADIABATIC = "adiabatic"
NOISY_PIPELINE_GRAPE = "grape"
NOISY_PIPELINE_CHOICES = [NOISY_PIPELINE_ADIABATIC, NOISY_PIPELINE_GRAPE]

# output
FLOAT_FORMAT = "%.12g"
OUTPUT_HANDLER_CSV = "csv"
OUTPUT_HANDLER_JSON = "json"
OUTPUT_HANDLERS = [OUTPUT_HANDLER_CSV, OUTPUT_HANDLER_JSON]
OUTPUT_DIR_ENV = "AQFACTOR_OUTPUT_DIR"
LOG_NAME = "aqfactor.log"
RUN_CONFIG_NAME = "run_config.yaml"
COMPILE_NAME = "compile.json"
GAP_NAME = "gap.json"
SPECTRUM_NAME = "spectrum.csv"
TRAJECTORY_NAME = "trajectory.csv"
EVOLVE_SUMMARY_NAME = "evolve_summary.json"
T_SCAN_NAME = "t_scan.csv"
NV_LEVELS_NAME = "nv_levels.csv"
NV_CONTROLS_NAME = "nv_controls.csv"
PULSE_NAME = "pulse.txt"
GRAPE_LOG_NAME = "grape_log.csv"
ROBUSTNESS_NAME = "robustness.csv"
GRAPE_SUMMARY_NAME = "grape_summary.json"
TOMO_RECORDS_NAME = "tomography_records.csv"
DENSITY_MATRIX_NAME = "density_matrix.json"
TOMO_SUMMARY_NAME = "tomo_summary.json"
ENSEMBLE_NAME = "ensemble.csv"
CALIBRATION_NAME = "calibration.csv"
REPORT_NAME = "report.json"

# command line
CMD_COMPILE = "compile"
CMD_GAP = "gap"
CMD_EVOLVE = "evolve"
CMD_NV = "nv"
CMD_GRAPE = "grape"
CMD_TOMO = "tomo"
CMD_REPORT = "report"
COMMANDS = [CMD_COMPILE, CMD_GAP, CMD_EVOLVE, CMD_NV, CMD_GRAPE, CMD_TOMO, CMD_REPORT]
COMMAND_DESCRIPTIONS = {
    CMD_COMPILE: "Compile the factorization of N into a problem Hamiltonian.",
    CMD_GAP: "Scan the spectrum of H(s) and report the minimum gap.",
    CMD_EVOLVE: "Integrate the adiabatic evolution and record checkpoint populations.",
    CMD_NV: "Tabulate NV spin levels and the rotating-frame control schedule.",
    CMD_GRAPE: "Optimize piecewise-constant MW/RF pulses for the state transfer.",
    CMD_TOMO: "Simulate 16-setting state tomography of the final state.",
    CMD_REPORT: "Average over error samples, calibrate and compare with the reported fidelity.",
}

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_TOO_MANY_QUBITS = 3
EXIT_NON_CONVERGENT = 4
EXIT_OTHER_ERROR = 5
