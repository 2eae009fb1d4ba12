"""Single-flip Monte Carlo annealing as a stochastic realization of the dynamics.

One sweep is N random-site flip attempts and advances the schedule by
one time unit, matching the unit attempt rate per site of the dense
generators. Heat-bath and Metropolis rates are probabilities (<= 1) and
are used directly as acceptance probabilities; all chains run in
lockstep from a single seeded RNG stream, so a report is reproducible
from (seed0, n_seeds, n_sweeps) alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spins
from .anneal import Schedule
from .markov import HeatBath, Metropolis, RateRule
from .spins import IsingModel


@dataclass(frozen=True)
class McReport:
    """Outcome of a batch of annealing chains."""

    success_fraction: float
    energy_trace: np.ndarray         # mean energy across chains, per sweep (incl. start)
    final_states: np.ndarray         # configuration index per chain
    final_energies: np.ndarray
    success: np.ndarray              # per-chain ground-state flag
    ground_energy: float
    n_sweeps: int
    n_seeds: int
    seed0: int
    state_histogram: np.ndarray | None = None  # visit counts after burn-in


def mc_simulated_annealing(model: IsingModel, rule: RateRule, schedule: Schedule,
                           n_sweeps: int, n_seeds: int, seed0: int,
                           ground_energy: float | None = None,
                           start: int | str = "random",
                           track_histogram: bool = False,
                           histogram_burn_in: int = 0) -> McReport:
    """Run n_seeds independent annealing chains for n_sweeps sweeps.

    The sweep index is the schedule time (clamped to t_final). `start`
    is either "random" (uniform initial configurations) or a fixed
    configuration index for every chain. A chain succeeds when its final
    energy matches the ground energy; the ground energy is found by
    exhaustive scan unless supplied.
    """
    if not isinstance(rule, (HeatBath, Metropolis)):
        raise ValueError(
            f"Monte Carlo acceptance needs a rate that is a probability; "
            f"rule {rule!r} is not supported")
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    if n_sweeps < 1:
        raise ValueError(f"n_sweeps must be >= 1, got {n_sweeps}")

    n = model.n_spins
    size = model.n_states
    table = spins.energy_table(model)
    if ground_energy is None:
        ground_energy = float(table.min())
    rng = np.random.default_rng(seed0)

    if start == "random":
        states = rng.integers(0, size, size=n_seeds, dtype=np.int64)
    else:
        start = int(start)
        if not 0 <= start < size:
            raise ValueError(f"start index {start} out of range")
        states = np.full(n_seeds, start, dtype=np.int64)

    trace = np.empty(n_sweeps + 1)
    trace[0] = table[states].mean()
    histogram = np.zeros(size, dtype=np.int64) if track_histogram else None

    for sweep in range(n_sweeps):
        beta = schedule.beta(min(float(sweep), schedule.t_final))
        for _ in range(n):
            sites = rng.integers(0, n, size=n_seeds)
            flipped = states ^ (np.int64(1) << sites)
            delta = table[flipped] - table[states]
            accept = rng.random(n_seeds) < rule.rates(beta, delta, n)
            states = np.where(accept, flipped, states)
        trace[sweep + 1] = table[states].mean()
        if histogram is not None and sweep >= histogram_burn_in:
            np.add.at(histogram, states, 1)

    final_energies = table[states]
    success = np.abs(final_energies - ground_energy) <= 1e-9 * max(1.0, abs(ground_energy))
    return McReport(success_fraction=float(success.mean()),
                    energy_trace=trace,
                    final_states=states.copy(),
                    final_energies=final_energies,
                    success=success,
                    ground_energy=ground_energy,
                    n_sweeps=n_sweeps, n_seeds=n_seeds, seed0=seed0,
                    state_histogram=histogram)


def empirical_distribution(report: McReport) -> np.ndarray:
    """Normalized visit histogram (requires track_histogram=True)."""
    if report.state_histogram is None:
        raise ValueError("run with track_histogram=True to collect a distribution")
    total = report.state_histogram.sum()
    return report.state_histogram / total


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Total-variation distance between two distributions."""
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
