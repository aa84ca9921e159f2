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

import copy
import logging
import logging.config
import sys
from typing import Any, Dict, Optional

FORMATTERS = {
    'verbose': {
        'format': '[%(asctime)s:%(levelname)s:%(name)s:%(funcName)s] %(message)s',
        'datefmt': "%Y-%m-%d:%H:%M:%S",
    },
    'simple': {
        'format': '[%(levelname)s:%(name)s] %(message)s'
    },
}

CONSOLE_HANDLER = {
    'level': 'INFO',
    'formatter': 'simple',
    'class': 'logging.StreamHandler',
    'stream': None
}

FILE_HANDLER = {
    'level': 'INFO',
    'formatter': 'verbose',
    'class': 'logging.FileHandler',
    'mode': 'w',
    'filename': 'aqfactor.log',
}

NO_LOGGING = {
    'version': 1,
    'disable_existing_loggers': True,
}


def get_logging_config(file_logging: bool, console: bool) -> Dict[str, Any]:
    """
    Builds a dictConfig dictionary with the requested handlers attached to the root logger.
    """
    if not file_logging and not console:
        return copy.deepcopy(NO_LOGGING)
    handlers = {}  # type: Dict[str, Any]
    if console:
        handlers['console'] = copy.deepcopy(CONSOLE_HANDLER)
    if file_logging:
        handlers['file'] = copy.deepcopy(FILE_HANDLER)
    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': FORMATTERS,
        'handlers': handlers,
        'root': {
            'handlers': sorted(handlers),
            'level': 'DEBUG',
        }
    }


def setup_main_logger(file_logging=True, console=True, path: Optional[str] = None, level=logging.INFO,
                      console_level=None):
    """
    Configures logging for the main application.

    :param file_logging: Whether to log to a file.
    :param console: Whether to log to the console.
    :param path: Optional path to write logfile to.
    :param level: Log level. Default: INFO.
    :param console_level: Optionally specify a separate log level for the console.
    """
    log_config = get_logging_config(file_logging, console)

    if file_logging:
        assert path is not None, "Must provide a logfile path"
        log_config["handlers"]["file"]["filename"] = path

    for handler_config in log_config.get('handlers', {}).values():
        handler_config['level'] = level

    if console and console_level is not None:
        log_config['handlers']['console']['level'] = console_level

    logging.config.dictConfig(log_config)

    def exception_hook(exc_type, exc_value, exc_traceback):
        logging.exception("Uncaught exception", exc_info=(exc_type, exc_value, exc_traceback))

    sys.excepthook = exception_hook


def log_aqfactor_version(logger):
    from aqfactor import __version__, __file__
    try:
        from aqfactor.git_version import git_hash
    except ImportError:
        git_hash = "unknown"
    logger.info(f"aqfactor: {__version__}, commit {git_hash}, path {__file__}")


def log_numpy_version(logger):
    from numpy import __version__ as numpy_version
    try:
        from scipy import __version__ as scipy_version
    except ImportError:
        scipy_version = 'unavailable'
    logger.info(f'NumPy: {numpy_version}, SciPy: {scipy_version}')
