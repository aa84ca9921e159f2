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


import logging
import os
from typing import Dict, List, Optional

import numpy as np

import aqfactor.constants as C
from aqfactor.test_utils import read_csv, read_json, run_cli

logger = logging.getLogger(__name__)


def check_run(command: str, params: str, out_dir: str, expected_code: int = C.EXIT_OK,
              artifacts: Optional[List[str]] = None) -> None:
    """
    Runs one subcommand and checks its exit code, the run record and the expected artifacts.
    """
    code = run_cli(command, params, out_dir)
    assert code == expected_code, "aqfactor %s %s exited with %d" % (command, params, code)
    assert os.path.exists(os.path.join(out_dir, C.RUN_CONFIG_NAME))
    for name in artifacts or []:
        assert os.path.exists(os.path.join(out_dir, name)), "missing artifact %s" % name


def check_report(out_dir: str, expect_calibration: bool) -> Dict:
    """
    Checks the consistency of a report written by `aqfactor report` and returns it.
    """
    report = read_json(out_dir, C.REPORT_NAME)
    assert report["reported_fidelity"] == C.REPORTED_FIDELITY
    assert report["band"] == list(C.REPORTED_FIDELITY_BAND)
    assert report["in_band"] == (report["band"][0] <= report["noisy_fidelity"] <= report["band"][1])
    assert 0. <= report["noisy_fidelity"] <= 1.
    ensemble = read_csv(out_dir, C.ENSEMBLE_NAME)
    assert len(ensemble) >= 2
    final_populations = [float(ensemble[-1]["pop%s_mean" % label]) for label in C.TWO_QUBIT_LABELS]
    assert np.isclose(sum(final_populations), 1.)
    assert ("calibration" in report) == expect_calibration
    if expect_calibration:
        calibration = read_csv(out_dir, C.CALIBRATION_NAME)
        assert len(calibration) == C.CALIBRATION_GRID_POINTS
        assert report["calibration"]["polarization_error"] in [float(row["polarization_error"])
                                                              for row in calibration]
    return report
