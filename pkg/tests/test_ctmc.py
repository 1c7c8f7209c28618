import math

import numpy as np
import pytest
from scipy.special import expit

from cubelab.ctmc import (
    ctmc_simulate,
    discretization_residual,
    glauber_rates,
    kernel_deviation,
    occupation_measure,
)
from cubelab.kernels import (
    dula_generator,
    dula_matrix,
    dups_generator,
    dups_matrix,
    gibbs_matrix,
    glauber_generator,
    prox_exact_matrix,
)
from cubelab.models import BitsMixture, IndependentBits, IsingGrid, exact_target
from cubelab.scores import ScoreField
from cubelab.statespace import hamming, state_of


def test_glauber_rates_uniform_target():
    rates = glauber_rates(IndependentBits(0.0, 4))
    np.testing.assert_allclose(rates(state_of(9, 4)), 0.5, atol=1e-15)


def test_total_exit_rate_bounded_by_dimension():
    model = BitsMixture(0.8, 5)
    rates = glauber_rates(model)
    for k in range(32):
        r = rates(state_of(k, 5))
        assert (r >= 0).all() and r.sum() <= 5.0


def test_trajectory_structure_and_reproducibility():
    model = IsingGrid(2, 2, 0.4, 0.1)
    rates = glauber_rates(model)
    x0 = state_of(3, 4)
    traj = ctmc_simulate(rates, x0, 50.0, np.random.default_rng(123))
    assert traj.states[0] == x0.bits
    assert (np.diff(traj.times) > 0).all()
    assert traj.times.size == 0 or traj.times[-1] <= 50.0
    for j in range(len(traj.times)):
        assert hamming(traj.state_at(j), traj.state_at(j + 1)) == 1
    again = ctmc_simulate(rates, x0, 50.0, np.random.default_rng(123))
    np.testing.assert_array_equal(traj.times, again.times)
    np.testing.assert_array_equal(traj.states, again.states)


def test_long_run_occupation_matches_target():
    model = IndependentBits(0.3, 3)
    traj = ctmc_simulate(glauber_rates(model), state_of(0, 3), 1e5,
                         np.random.default_rng(2024))
    occ = occupation_measure(traj)
    tv = 0.5 * np.abs(occ - exact_target(model)).sum()
    assert tv <= 0.02, f"occupation TV {tv}"


def test_occupation_measure_sums_to_one():
    model = IndependentBits(0.0, 2)
    traj = ctmc_simulate(glauber_rates(model), state_of(0, 2), 25.0,
                         np.random.default_rng(5))
    assert occupation_measure(traj).sum() == pytest.approx(1.0, abs=1e-12)


def test_gibbs_kernel_is_exact_discretization():
    model = BitsMixture(0.5, 4)
    q = glauber_generator(model)
    t = gibbs_matrix(model, 0.6)
    assert discretization_residual(t, q) == 0.0


def test_dula_discretization_order():
    model = IsingGrid(2, 2, 0.4, 0.1)
    field = ScoreField(model, "gibbs")
    q = glauber_generator(model)
    etas = [0.5, 0.4, 0.3, 0.25]
    ratios = [discretization_residual(dula_matrix(model, field, eta), q)
              / math.exp(-4.0 / eta) for eta in etas]
    assert all(r <= 2.0 * ratios[0] + 1e-9 for r in ratios), ratios


def test_dups_discretization_order():
    model = BitsMixture(0.5, 4)
    field = ScoreField(model, "stein")
    q = dups_generator(field)
    etas = [0.5, 0.4, 0.3, 0.25]
    ratios = [discretization_residual(dups_matrix(model, field, eta), q)
              / math.exp(-4.0 / eta) for eta in etas]
    assert all(r <= 2.0 * ratios[0] + 1e-9 for r in ratios), ratios


def test_dups_approaches_exact_proximal_kernel():
    model = IsingGrid(2, 2, 0.4, 0.1)
    field = ScoreField(model, "glauber")
    devs = [kernel_deviation(dups_matrix(model, field, eta), prox_exact_matrix(model, eta))
            for eta in (0.5, 0.35, 0.25)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 1e-4


def test_dimension_mismatch_is_contract_violation():
    t = gibbs_matrix(IndependentBits(0.2, 3), 0.5)
    q = glauber_generator(IndependentBits(0.2, 4))
    with pytest.raises(ValueError):
        discretization_residual(t, q)


def test_bad_horizon_and_negative_rates():
    model = IndependentBits(0.1, 3)
    from cubelab.errors import ParameterError

    with pytest.raises(ParameterError):
        ctmc_simulate(glauber_rates(model), state_of(0, 3), 0.0,
                      np.random.default_rng(1))
    with pytest.raises(ParameterError):
        ctmc_simulate(lambda x: np.array([-1.0, 0.0, 0.0]), state_of(0, 3), 1.0,
                      np.random.default_rng(1))
