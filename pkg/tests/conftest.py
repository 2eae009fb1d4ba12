"""Shared fixtures for expensive runs used by both module and acceptance tests."""

import numpy as np
import pytest

from isingbridge import anneal, markov, montecarlo, spins


@pytest.fixture(scope="session")
def geman_run():
    """Logarithmic-schedule master-equation anneal of a frustrated 4-spin instance."""
    model = spins.frustrated_instance(4, seed=0)
    schedule = anneal.GemanGeman(p=2.0, n_spins=4, t_final=1e4)
    p0 = np.full(model.n_states, 1.0 / model.n_states)
    trajectory = anneal.evolve_master_timedep(model, markov.HEAT_BATH, schedule,
                                              p0, dt=0.025, n_samples=2000)
    return model, schedule, trajectory


@pytest.fixture(scope="session")
def ferro_mc_run():
    """Annealed ferromagnetic chain, 200 seeded chains."""
    model = spins.chain_model(10, [1.0] * 10)
    schedule = anneal.LinearBeta(0.0, 3.0, 1000.0)
    return montecarlo.mc_simulated_annealing(model, markov.HEAT_BATH, schedule,
                                             n_sweeps=1000, n_seeds=200, seed0=42)


@pytest.fixture(scope="session")
def frozen_mc_run():
    """Frozen-temperature sampling of the 6-site chain, 1e6 total sweeps."""
    model = spins.chain_model(6, [1.0] * 6)
    schedule = anneal.frozen_schedule(0.5, 10_000.0)
    report = montecarlo.mc_simulated_annealing(
        model, markov.HEAT_BATH, schedule, n_sweeps=10_000, n_seeds=100, seed0=7,
        track_histogram=True, histogram_burn_in=1000)
    return model, report
