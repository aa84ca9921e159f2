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
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from . import config
from . import constants as C
from .utils import AqfactorError, check_condition

logger = logging.getLogger(__name__)


class TimeOutOfRange(AqfactorError):
    pass


@dataclass
class ScheduleConfig(config.Config):
    kind: str = C.SCHEDULE_LINEAR
    total_time: float = C.DEFAULT_TOTAL_TIME
    coefficients: Optional[List[float]] = None
    taus: Optional[List[float]] = None
    values: Optional[List[float]] = None


class Schedule:
    """
    Interpolation function s(t) of the adiabatic Hamiltonian over [0, T] with s(0) = 0, s(T) = 1,
    continuous and nondecreasing. Subclasses define the shape on the reduced time tau = t / T.

    :param total_time: Total evolution time T.
    """

    def __init__(self, total_time: float) -> None:
        check_condition(total_time > 0, "total time needs to be > 0, got %s" % total_time)
        self.total_time = float(total_time)

    def __repr__(self) -> str:
        return "%s(total_time=%s)" % (self.__class__.__name__, self.total_time)

    def shape(self, taus: np.ndarray) -> np.ndarray:
        """
        s as a function of reduced time tau in [0, 1].
        """
        raise NotImplementedError()

    def _check_times(self, ts: np.ndarray):
        tol = C.FIDELITY_SLACK * max(1., self.total_time)
        if np.any(ts < -tol) or np.any(ts > self.total_time + tol):
            raise TimeOutOfRange("times must lie in [0, %s], got range [%s, %s]"
                                 % (self.total_time, np.min(ts), np.max(ts)))

    def values(self, ts: Union[List[float], np.ndarray]) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        self._check_times(ts)
        return np.clip(self.shape(np.clip(ts / self.total_time, 0., 1.)), 0., 1.)

    def s(self, t: float) -> float:
        return float(self.values([t])[0])

    def __call__(self, t: float) -> float:
        return self.s(t)

    def check(self, num_points: int = C.SCHEDULE_CHECK_POINTS):
        """
        Validates endpoints and monotonicity on a uniform grid of reduced times.
        """
        shape = self.shape(np.linspace(0., 1., num_points))
        check_condition(abs(shape[0]) < 1e-12 and abs(shape[-1] - 1.) < 1e-12,
                        "%s must satisfy s(0)=0 and s(T)=1, got %s and %s" % (self, shape[0], shape[-1]))
        check_condition(bool(np.all(np.diff(shape) >= -1e-12)), "%s is not nondecreasing" % self)


class LinearSchedule(Schedule):
    """
    s(t) = t / T.
    """

    def shape(self, taus: np.ndarray) -> np.ndarray:
        return np.asarray(taus, dtype=float)


class PolynomialSchedule(Schedule):
    """
    s(tau) = sum_k a_k tau^k with coefficients in increasing order of power.

    :param total_time: Total evolution time T.
    :param coefficients: Polynomial coefficients a_0, a_1, ...
    """

    def __init__(self, total_time: float, coefficients: List[float]) -> None:
        super().__init__(total_time)
        check_condition(len(coefficients) > 0, "polynomial schedule needs coefficients")
        self.coefficients = [float(a) for a in coefficients]
        self.check()

    def __repr__(self) -> str:
        return "PolynomialSchedule(total_time=%s, coefficients=%s)" % (self.total_time, self.coefficients)

    def shape(self, taus: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(taus, dtype=float), self.coefficients)


class TabulatedSchedule(Schedule):
    """
    Piecewise-linear interpolation of (tau, s) knots spanning [0, 1].
    """

    def __init__(self, total_time: float, taus: List[float], values: List[float]) -> None:
        super().__init__(total_time)
        check_condition(len(taus) == len(values) and len(taus) >= 2,
                        "tabulated schedule needs at least two (tau, s) knots of equal count")
        self.taus = np.asarray(taus, dtype=float)
        self.knots = np.asarray(values, dtype=float)
        check_condition(bool(np.all(np.diff(self.taus) > 0)), "knot times must be strictly increasing")
        check_condition(self.taus[0] == 0. and self.taus[-1] == 1., "knot times must span [0, 1]")
        self.check()

    def shape(self, taus: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(taus, dtype=float), self.taus, self.knots)


def get_schedule(schedule_config: ScheduleConfig) -> Schedule:
    """
    Returns a schedule for the given configuration.

    :param schedule_config: Kind and parameters.
    :return: Schedule.
    """
    if schedule_config.kind == C.SCHEDULE_LINEAR:
        return LinearSchedule(schedule_config.total_time)
    if schedule_config.kind == C.SCHEDULE_POLYNOMIAL:
        check_condition(schedule_config.coefficients is not None, "polynomial schedule needs coefficients")
        return PolynomialSchedule(schedule_config.total_time, schedule_config.coefficients)  # type: ignore
    if schedule_config.kind == C.SCHEDULE_TABULATED:
        check_condition(schedule_config.taus is not None and schedule_config.values is not None,
                        "tabulated schedule needs taus and values")
        return TabulatedSchedule(schedule_config.total_time, schedule_config.taus,  # type: ignore
                                 schedule_config.values)  # type: ignore
    raise ValueError("Unknown schedule type %s. Choices: %s" % (schedule_config.kind, C.SCHEDULE_CHOICES))


def with_total_time(schedule: Schedule, total_time: float) -> Schedule:
    """
    Same shape over a different total time.
    """
    if isinstance(schedule, PolynomialSchedule):
        return PolynomialSchedule(total_time, schedule.coefficients)
    if isinstance(schedule, TabulatedSchedule):
        return TabulatedSchedule(total_time, list(schedule.taus), list(schedule.knots))
    if isinstance(schedule, LinearSchedule):
        return LinearSchedule(total_time)
    raise ValueError("Cannot rescale %s" % schedule)
