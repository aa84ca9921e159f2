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

import numpy as np
import pytest

import aqfactor.constants as C
from aqfactor import schedule
from aqfactor.utils import AqfactorError


def test_linear_schedule():
    s = schedule.LinearSchedule(10.)
    assert s(0.) == 0.
    assert s(10.) == 1.
    assert np.isclose(s(2.5), 0.25)
    assert np.allclose(s.values([0., 5., 10.]), [0., 0.5, 1.])


@pytest.mark.parametrize("t", [-1., 10.5])
def test_time_out_of_range(t):
    with pytest.raises(schedule.TimeOutOfRange):
        schedule.LinearSchedule(10.).s(t)


@pytest.mark.parametrize("total_time", [0., -1.])
def test_nonpositive_total_time(total_time):
    with pytest.raises(AqfactorError):
        schedule.LinearSchedule(total_time)


def test_short_schedule_starts_at_zero():
    s = schedule.LinearSchedule(1e-6)
    assert s(0.) == 0.
    assert s(1e-6) == 1.


def test_polynomial_schedule():
    # smoothstep 3 tau^2 - 2 tau^3
    s = schedule.PolynomialSchedule(4., [0., 0., 3., -2.])
    assert np.isclose(s(2.), 0.5)
    assert np.isclose(s(1.), 3 / 16 - 2 / 64)


@pytest.mark.parametrize("coefficients", [[0., 2.], [0., 2., -2.], [1.]])
def test_polynomial_schedule_invalid(coefficients):
    with pytest.raises(AqfactorError):
        schedule.PolynomialSchedule(1., coefficients)


def test_tabulated_schedule():
    s = schedule.TabulatedSchedule(2., [0., 0.5, 1.], [0., 0.8, 1.])
    assert np.isclose(s(0.5), 0.4)
    assert np.isclose(s(1.5), 0.9)


@pytest.mark.parametrize("taus, values", [([0., 1.], [0.]),
                                          ([0., 0.5], [0., 1.]),
                                          ([0., 0.6, 0.6, 1.], [0., 0.5, 0.6, 1.]),
                                          ([0., 0.5, 1.], [0., 0.7, 0.6])])
def test_tabulated_schedule_invalid(taus, values):
    with pytest.raises(AqfactorError):
        schedule.TabulatedSchedule(1., taus, values)


@pytest.mark.parametrize("config, expected_type", [
    (schedule.ScheduleConfig(kind=C.SCHEDULE_LINEAR, total_time=3.), schedule.LinearSchedule),
    (schedule.ScheduleConfig(kind=C.SCHEDULE_POLYNOMIAL, total_time=3., coefficients=[0., 1.]),
     schedule.PolynomialSchedule),
    (schedule.ScheduleConfig(kind=C.SCHEDULE_TABULATED, total_time=3., taus=[0., 1.], values=[0., 1.]),
     schedule.TabulatedSchedule)])
def test_get_schedule(config, expected_type):
    s = schedule.get_schedule(config)
    assert isinstance(s, expected_type)
    assert s.total_time == 3.


def test_get_schedule_unknown():
    with pytest.raises(ValueError):
        schedule.get_schedule(schedule.ScheduleConfig(kind="cubic"))


def test_get_schedule_missing_coefficients():
    with pytest.raises(AqfactorError):
        schedule.get_schedule(schedule.ScheduleConfig(kind=C.SCHEDULE_POLYNOMIAL))


def test_with_total_time_keeps_shape():
    s = schedule.TabulatedSchedule(2., [0., 0.5, 1.], [0., 0.8, 1.])
    longer = schedule.with_total_time(s, 20.)
    assert isinstance(longer, schedule.TabulatedSchedule)
    assert np.isclose(longer(5.), s(0.5))
