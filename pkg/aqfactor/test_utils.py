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

import csv
import json
import logging
import os
import sys
from typing import Any, Dict, List
from unittest.mock import patch

import numpy as np

import aqfactor.cli
from . import constants as C
from . import qcore

logger = logging.getLogger(__name__)


def random_state(dim: int, seed: int = 13) -> qcore.StateVector:
    rng = np.random.default_rng(seed)
    return qcore.normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_density_matrix(dim: int = C.TWO_QUBIT_DIM, rank: int = 2, seed: int = 13) -> qcore.DensityMatrix:
    """
    Mixture of `rank` random pure states with random weights.
    """
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(rank))
    return sum(w * qcore.projector(random_state(dim, seed + 1 + k)) for k, w in enumerate(weights))


def random_hermitian(dim: int, seed: int = 13) -> qcore.ComplexMatrix:
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


def run_cli(command: str, params: str, out_dir: str) -> int:
    """
    Runs `aqfactor <command> <params>` quietly into out_dir and returns the exit code.
    """
    argv = "aqfactor {} {} --out-dir {} --quiet".format(command, params, out_dir)
    logger.info("Running: %s", argv)
    with patch.object(sys, "argv", argv.split()):
        return aqfactor.cli.main()


def read_json(out_dir: str, name: str) -> Dict[str, Any]:
    with open(os.path.join(out_dir, name)) as inp:
        return json.load(inp)


def read_csv(out_dir: str, name: str) -> List[Dict[str, str]]:
    with open(os.path.join(out_dir, name), newline="") as inp:
        return list(csv.DictReader(inp))
