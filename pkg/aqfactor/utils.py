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
A set of utility methods.
"""
import binascii
import gzip
import logging
import multiprocessing
import multiprocessing.pool
import os
import random
import sys
from itertools import starmap
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from . import constants as C
from .log import log_aqfactor_version, log_numpy_version

logger = logging.getLogger(__name__)


class AqfactorError(Exception):
    pass


def log_basic_info(args) -> None:
    """
    Log basic information like version number, arguments, etc.

    :param args: Arguments as returned by argparse.
    """
    log_aqfactor_version(logger)
    log_numpy_version(logger)
    logger.info("Command: %s", " ".join(sys.argv))
    logger.info("Arguments: %s", args)


def seed_rngs(seed: int) -> None:  # type: ignore
    """
    Seed the global random number generators (Python, NumPy and PyTorch).
    Library code draws from explicit generators (see `derived_rng`); this only pins
    anything that falls back to global state.

    :param seed: The random seed.
    """
    logger.info(f"Random seed: {seed}")
    np.random.seed(seed)
    random.seed(seed)
    try:
        import torch
        torch.manual_seed(seed)
        logger.info(f"PyTorch seed: {seed}")
    except ImportError:
        pass


def derived_rng(seed: int, *indices: int) -> np.random.Generator:
    """
    Returns a generator seeded by (seed, *indices), so that per-sample streams do not depend on
    the order in which samples are processed.
    """
    return np.random.default_rng([seed, *indices])


def check_condition(condition: bool, error_message: str):
    """
    Check the condition and if it is not met, raise an AqfactorError with the given message,
    similar to assertions.

    :param condition: Condition to check.
    :param error_message: Error message to show to the user.
    """
    if not condition:
        raise AqfactorError(error_message)


class OnlineMeanAndVariance:
    """
    Welford accumulator. Values may be floats or equally shaped numpy arrays.
    """

    def __init__(self) -> None:
        self._count = 0
        self._mean = 0.  # type: Union[float, np.ndarray]
        self._M2 = 0.  # type: Union[float, np.ndarray]

    def update(self, value: Union[float, int, np.ndarray]) -> None:
        self._count += 1
        delta = value - self._mean
        self._mean = self._mean + delta / self._count
        delta2 = value - self._mean
        self._M2 = self._M2 + delta * delta2

    @property
    def count(self) -> int:
        return self._count

    @property
    def mean(self) -> Union[float, np.ndarray]:
        return self._mean

    @property
    def variance(self) -> Union[float, np.ndarray]:
        if self._count < 2:
            return np.full_like(self._M2, np.nan) if isinstance(self._M2, np.ndarray) else float('nan')
        return self._M2 / self._count

    @property
    def std(self) -> Union[float, np.ndarray]:
        if self._count < 2:
            return np.zeros_like(self._M2) if isinstance(self._M2, np.ndarray) else 0.0
        return np.sqrt(self.variance)


def chunks(some_list: Sequence, n: int) -> Iterable[Sequence]:
    """Yield successive n-sized chunks from l."""
    for i in range(0, len(some_list), n):
        yield some_list[i:i + n]


def parse_float_list(value: str, separator: str = C.ARG_SEPARATOR) -> List[float]:
    return [float(v) for v in value.split(separator) if v.strip()]


def is_gzip_file(filename: str) -> bool:
    # check for magic gzip number
    with open(filename, 'rb') as test_f:
        return binascii.hexlify(test_f.read(2)) == b'1f8b'


def smart_open(filename: str, mode: str = "rt", ftype: str = "auto", errors: str = 'replace'):
    """
    Returns a file descriptor for filename with UTF-8 encoding.
    If ftype is "auto", uses gzip iff filename endswith .gz (or, when reading, the file is gzipped).
    Text files are written with '\\n' line endings on every platform.

    :param filename: The filename to open.
    :param mode: Reader mode.
    :param ftype: File type. If 'auto' checks filename suffix for gz to try gzip.open.
    :param errors: Encoding error handling during reading. Defaults to 'replace'.
    :return: File descriptor.
    """
    if ftype in ('gzip', 'gz') \
            or (ftype == 'auto' and filename.endswith(".gz")) \
            or (ftype == 'auto' and 'r' in mode and is_gzip_file(filename)):
        if "b" in mode:
            return gzip.open(filename, mode=mode)
        # gzip defaults to binary
        text_mode = mode if "t" in mode else mode + "t"
        return gzip.open(filename, mode=text_mode, encoding='utf-8', errors=errors, newline='\n')
    if mode in ("rb", "wb"):
        return open(filename, mode=mode)
    return open(filename, mode=mode, encoding='utf-8', errors=errors, newline='\n')


def get_output_dir(out_dir: Optional[str]) -> str:
    """
    Resolves the output directory: explicit value, then the environment default, then the working directory.
    The directory is created if needed.
    """
    if out_dir is None:
        out_dir = os.environ.get(C.OUTPUT_DIR_ENV, os.getcwd())
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


class SingleProcessPool:

    def map(self, func, iterable):
        return list(map(func, iterable))

    def starmap(self, func, iterable):
        return list(starmap(func, iterable))

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        pass


def create_pool(max_processes):
    if max_processes == 1:
        return SingleProcessPool()
    else:
        return multiprocessing.pool.Pool(processes=max_processes)
