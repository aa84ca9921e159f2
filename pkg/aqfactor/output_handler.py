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

import json
from abc import ABC, abstractmethod
from typing import Any, List, Optional, Sequence

import numpy as np

from . import constants as C
from .utils import smart_open


def format_float(value: float) -> str:
    return C.FLOAT_FORMAT % (float(value) + 0.)


def normalize(obj: Any) -> Any:
    """
    Converts numpy scalars and arrays to plain Python values and rounds floats to the emitted precision,
    so that JSON output is stable across runs.
    """
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(format_float(obj))
    if isinstance(obj, complex):
        raise ValueError("complex values must be split into real and imaginary parts before output")
    return obj


def get_output_handler(output_type: str, output_fname: str) -> 'OutputHandler':
    """
    :param output_type: Type of output handler.
    :param output_fname: Output filename.
    :raises: ValueError for unknown output_type.
    :return: Output handler.
    """
    if output_type == C.OUTPUT_HANDLER_CSV:
        return CsvOutputHandler(output_fname)
    elif output_type == C.OUTPUT_HANDLER_JSON:
        return JsonOutputHandler(output_fname)
    else:
        raise ValueError("unknown output type")


class OutputHandler(ABC):
    """
    Abstract output handler interface
    """

    def __init__(self, fname: str) -> None:
        self.fname = fname

    @abstractmethod
    def handle(self, data: Any, columns: Optional[Sequence[str]] = None):
        pass


class CsvOutputHandler(OutputHandler):
    """
    Writes a table (header row plus one row per record); floats carry 12 significant digits.
    """

    def handle(self, data: Any, columns: Optional[Sequence[str]] = None):
        assert columns is not None, "CSV output needs column names"
        with smart_open(self.fname, mode="w") as out:
            out.write(",".join(columns) + "\n")
            for row in data:
                out.write(",".join(self._cell(v) for v in row) + "\n")

    @staticmethod
    def _cell(value: Any) -> str:
        if isinstance(value, (float, np.floating)):
            return format_float(value)
        if value is None:
            return ""
        return str(value)


class JsonOutputHandler(OutputHandler):
    """
    Writes a JSON document with sorted keys and rounded floats.
    """

    def handle(self, data: Any, columns: Optional[Sequence[str]] = None):
        with smart_open(self.fname, mode="w") as out:
            json.dump(normalize(data), out, sort_keys=True, indent=2)
            out.write("\n")


def write_csv(fname: str, columns: List[str], rows: Sequence[Sequence[Any]]):
    get_output_handler(C.OUTPUT_HANDLER_CSV, fname).handle(rows, columns)


def write_json(fname: str, data: Any):
    get_output_handler(C.OUTPUT_HANDLER_JSON, fname).handle(data)
