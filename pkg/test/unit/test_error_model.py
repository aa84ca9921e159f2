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

from aqfactor import adiabatic_engine as ae
from aqfactor import error_model as em
from aqfactor import pulse_opt
from aqfactor import qcore
from aqfactor.utils import AqfactorError

STEPS = ae.StepsConfig(max_dt=0.05, refine=False)


def test_imperfect_initial_state():
    rho = em.imperfect_initial_state(em.ErrorConfig(polarization_error=0.2))
    assert qcore.is_density_matrix(rho)
    assert np.isclose(qcore.fidelity(rho, ae.prepared_initial_state()), 0.85)


@pytest.mark.parametrize("kwargs", [dict(polarization_error=1.5), dict(amplitude_sigma_mw=-0.1),
                                    dict(n_samples=0), dict(truncation=0.)])
def test_error_config_validation(kwargs):
    with pytest.raises(AqfactorError):
        em.ErrorConfig(**kwargs)


def test_amplitude_factors():
    e = em.ErrorConfig(amplitude_sigma_mw=0.1, amplitude_sigma_rf=0.05, seed=3, truncation=2.)
    factors = [em.sample_amplitude_factors(e, i) for i in range(50)]
    assert factors[7] == em.sample_amplitude_factors(e, 7)
    assert all(abs(mw - 1.) <= 0.2 and abs(rf - 1.) <= 0.1 for mw, rf in factors)
    assert len(set(factors)) == 50
    assert em.sample_amplitude_factors(em.ErrorConfig(amplitude_sigma_mw=0., amplitude_sigma_rf=0.), 5) == (1., 1.)


def test_noiseless_ensemble_matches_evolution():
    problem = ae.default_problem(total_time=20.)
    e = em.ErrorConfig(polarization_error=0., amplitude_sigma_mw=0., amplitude_sigma_rf=0., n_samples=5)
    ensemble = em.noisy_trajectory_ensemble(problem, e, STEPS)
    trajectory = ae.evolve(problem, STEPS)
    assert np.isclose(ensemble.final_fidelity, trajectory.target_fidelity)
    assert np.allclose(ensemble.mean_populations, trajectory.populations)
    assert np.allclose(ensemble.std_populations, 0.)
    assert ensemble.n_samples == 5


def test_polarization_error_is_linear():
    problem = ae.default_problem(total_time=20.)
    pure = em.noisy_trajectory_ensemble(problem, em.ErrorConfig(polarization_error=0., amplitude_sigma_mw=0.,
                                                                amplitude_sigma_rf=0.), STEPS, checkpoints=[])
    mixed = em.noisy_trajectory_ensemble(problem, em.ErrorConfig(polarization_error=0.3, amplitude_sigma_mw=0.,
                                                                 amplitude_sigma_rf=0.), STEPS, checkpoints=[])
    assert np.allclose(mixed.mean_final, em.depolarize(pure.mean_final, 0.3))


def test_noisy_ensemble():
    problem = ae.default_problem(total_time=20.)
    e = em.ErrorConfig(polarization_error=0.1, amplitude_sigma_mw=0.05, amplitude_sigma_rf=0.05, n_samples=4)
    ensemble = em.noisy_trajectory_ensemble(problem, e, STEPS)
    assert qcore.is_density_matrix(ensemble.mean_final)
    assert ensemble.mean_populations.shape == (6, 4)
    assert np.any(ensemble.std_populations > 0.)
    assert len(ensemble.rows()) == 6
    assert len(ensemble.rows()[0]) == len(ensemble.columns())
    assert ensemble.final_fidelity < 1.


def test_noiseless_pulse_ensemble():
    cp = pulse_opt.nv_control_problem(duration=1.)
    pulse = pulse_opt.adiabatic_pulse(cp, n_segments=20)
    e = em.ErrorConfig(polarization_error=0., amplitude_sigma_mw=0., amplitude_sigma_rf=0., n_samples=3)
    ensemble = em.noisy_pulse_ensemble(cp, pulse, e)
    assert np.isclose(ensemble.final_fidelity, pulse_opt.transfer_fidelity(cp, pulse))
    assert list(ensemble.times) == [0., pulse.duration]


def test_depolarize():
    rho = qcore.projector(ae.ideal_final_state())
    assert np.isclose(np.trace(em.depolarize(rho, 0.4)), 1.)
    assert np.allclose(em.depolarize(rho, 1.), np.eye(4) / 4)


def test_calibrate_polarization():
    # exact readout of the depolarized ideal state gives F(eps) = 1 - 3 eps / 4
    result = em.calibrate_polarization(qcore.projector(ae.ideal_final_state()))
    assert len(result.rows()) == 51
    assert np.isclose(result.best_polarization_error, 0.25)
    assert np.isclose(result.best_fidelity, 0.8125)
    assert result.in_band
    assert result.summary()["in_band"]


def test_calibrate_polarization_out_of_band():
    result = em.calibrate_polarization(qcore.projector(ae.ideal_final_state()), grid=[0.])
    assert not result.in_band


def test_fidelity_nonincreasing_in_polarization_error():
    problem = ae.default_problem(total_time=20.)
    fidelities = [em.noisy_trajectory_ensemble(problem, em.ErrorConfig(polarization_error=eps, amplitude_sigma_mw=0.,
                                                                       amplitude_sigma_rf=0.),
                                               STEPS, checkpoints=[]).final_fidelity
                  for eps in (0., 0.05, 0.1, 0.2, 0.5, 1.)]
    assert all(b <= a + 1e-12 for a, b in zip(fidelities, fidelities[1:]))
    assert np.isclose(fidelities[-1], 0.25)


@pytest.mark.parametrize("seed", [1, 2, 3, 4])
def test_noisy_fidelity_below_noiseless(seed):
    problem = ae.default_problem(total_time=20.)
    noiseless = ae.evolve(problem, STEPS, checkpoints=[]).target_fidelity
    e = em.ErrorConfig(polarization_error=0.1, amplitude_sigma_mw=0.05, amplitude_sigma_rf=0.05, n_samples=3,
                       seed=seed)
    assert em.noisy_trajectory_ensemble(problem, e, STEPS, checkpoints=[]).final_fidelity <= noiseless


def test_seeded_ensemble_is_deterministic():
    problem = ae.default_problem(total_time=20.)
    e = em.ErrorConfig(polarization_error=0.1, amplitude_sigma_mw=0.05, amplitude_sigma_rf=0.05, n_samples=3, seed=7)
    a = em.noisy_trajectory_ensemble(problem, e, STEPS)
    b = em.noisy_trajectory_ensemble(problem, e, STEPS)
    assert np.array_equal(a.mean_final, b.mean_final)
    assert np.array_equal(a.mean_populations, b.mean_populations)
    assert np.array_equal(a.std_populations, b.std_populations)
    assert a.final_fidelity == b.final_fidelity
