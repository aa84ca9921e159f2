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
from tempfile import TemporaryDirectory

import pytest

import aqfactor.constants as C
from aqfactor import log


@pytest.mark.parametrize("file_logging, console, expected_handlers", [
    (True, True, ['console', 'file']),
    (True, False, ['file']),
    (False, True, ['console']),
])
def test_get_logging_config(file_logging, console, expected_handlers):
    config = log.get_logging_config(file_logging, console)
    assert sorted(config['handlers']) == expected_handlers
    assert config['root']['handlers'] == expected_handlers


def test_get_logging_config_silent():
    assert log.get_logging_config(False, False) == log.NO_LOGGING


def test_get_logging_config_is_a_copy():
    config = log.get_logging_config(True, False)
    config['handlers']['file']['filename'] = 'other.log'
    assert log.FILE_HANDLER['filename'] == C.LOG_NAME


def test_setup_main_logger_writes_file():
    with TemporaryDirectory() as work_dir:
        path = os.path.join(work_dir, C.LOG_NAME)
        log.setup_main_logger(file_logging=True, console=False, path=path, level=logging.INFO)
        try:
            logger = logging.getLogger("aqfactor.test")
            log.log_aqfactor_version(logger)
            log.log_numpy_version(logger)
            logger.debug("not written")
        finally:
            for handler in logging.root.handlers[:]:
                if isinstance(handler, logging.FileHandler):
                    handler.close()
                    logging.root.removeHandler(handler)
        with open(path) as inp:
            text = inp.read()
    assert "aqfactor: " in text
    assert "NumPy: " in text
    assert "not written" not in text
