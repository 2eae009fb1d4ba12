"""Time-dependent schedules and the three dynamical engines.

The master equation with a time-dependent temperature, dP/dt = W(t) P,
transforms under phi(t) = exp(beta(t) H0 / 2) P(t) into an
imaginary-time flow -dphi/dt = (H(t) - beta_dot(t) H0 / 2) phi, and
replacing -d/dt by i d/dt gives the real-time flow. All three engines
integrate with fixed-step classic RK4 and sample ground-state
probability and overlap with the instantaneous ground state, which for
mapped Hamiltonians is the square-root Boltzmann vector in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spins
from .markov import RateRule, flip_index_table
from .spins import IsingModel

MAX_ANNEAL_SPINS = 10


class Schedule:
    """Nondecreasing inverse temperature beta(t) with closed-form derivative."""

    t_final: float

    def beta(self, t: float) -> float:
        raise NotImplementedError

    def beta_dot(self, t: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearBeta(Schedule):
    """beta(t) = beta0 + (beta1 - beta0) t / t_final."""

    beta0: float
    beta1: float
    t_final: float

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.beta1 < self.beta0:
            raise ValueError("beta must be nondecreasing: beta1 < beta0")
        if self.beta0 < 0:
            raise ValueError(f"beta0 must be nonnegative, got {self.beta0}")

    def beta(self, t):
        return self.beta0 + (self.beta1 - self.beta0) * t / self.t_final

    def beta_dot(self, t):
        return (self.beta1 - self.beta0) / self.t_final


@dataclass(frozen=True)
class ExponentialBeta(Schedule):
    """beta(t) = beta0 * exp(rate * t)."""

    beta0: float
    rate: float
    t_final: float

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.beta0 < 0 or self.rate < 0:
            raise ValueError("beta0 and rate must be nonnegative")

    def beta(self, t):
        return self.beta0 * math.exp(self.rate * t)

    def beta_dot(self, t):
        return self.rate * self.beta0 * math.exp(self.rate * t)


@dataclass(frozen=True)
class GemanGeman(Schedule):
    """Logarithmic growth beta(t) = log(t + t_offset) / (p * N).

    The offset keeps beta finite at t = 0; p is a caller-chosen constant
    of order the largest local field.
    """

    p: float
    n_spins: int
    t_final: float
    t_offset: float = 1.0

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.p <= 0:
            raise ValueError(f"p must be positive, got {self.p}")
        if self.t_offset < 1.0:
            raise ValueError(f"t_offset must be >= 1, got {self.t_offset}")

    def beta(self, t):
        return math.log(t + self.t_offset) / (self.p * self.n_spins)

    def beta_dot(self, t):
        return 1.0 / ((t + self.t_offset) * self.p * self.n_spins)


def frozen_schedule(beta: float, t_final: float) -> LinearBeta:
    """Constant-temperature schedule."""
    return LinearBeta(beta, beta, t_final)


@dataclass(frozen=True)
class AnnealTrajectory:
    """Sampled state history of one annealing run."""

    engine: str
    times: np.ndarray
    betas: np.ndarray
    states: np.ndarray              # (n_samples, 2^N), real or complex
    ground_probability: np.ndarray  # mass on the model's ground configurations
    overlap: np.ndarray             # |<instantaneous ground | state>|^2
    log_norm_decrement: np.ndarray  # cumulative -log of raw norm (imaginary engine)

    @property
    def n_samples(self) -> int:
        return self.times.size


class _FlipSystem:
    """Precomputed flip tables shared by the three engines."""

    def __init__(self, model: IsingModel, rule: RateRule):
        if model.n_spins > MAX_ANNEAL_SPINS:
            raise ValueError(
                f"anneal engines need n_spins <= {MAX_ANNEAL_SPINS}, got {model.n_spins}")
        self.model = model
        self.rule = rule
        self.n = model.n_spins
        self.size = model.n_states
        self.energies = spins.energy_table(model)
        self.flips = flip_index_table(self.n)
        # delta[j, c] = H0(flip(c, j)) - H0(c)
        self.deltas = self.energies[self.flips] - self.energies[None, :]
        self.ground = spins.ground_states(model)

    def rates(self, beta: float) -> np.ndarray:
        return np.asarray(self.rule.rates(beta, self.deltas, self.n))

    def apply_generator(self, rates: np.ndarray, p: np.ndarray) -> np.ndarray:
        """(W p) using the flip tables; rates as returned by self.rates."""
        incoming = (np.take_along_axis(rates, self.flips, axis=1)
                    * p[self.flips]).sum(axis=0)
        return incoming - rates.sum(axis=0) * p

    def apply_hamiltonian(self, beta: float, rates: np.ndarray,
                          phi: np.ndarray) -> np.ndarray:
        """(H phi) for the mapped Hamiltonian at this beta."""
        weights = np.asarray(self.rule.weights(beta, self.deltas, self.n))
        return rates.sum(axis=0) * phi - (weights * phi[self.flips]).sum(axis=0)

    def sqrt_boltzmann(self, beta: float) -> np.ndarray:
        """Instantaneous ground state of the mapped Hamiltonian, unit norm."""
        x = -0.5 * beta * self.energies
        vec = np.exp(x - x.max())
        return vec / np.linalg.norm(vec)

    def max_diag_rate(self, schedule: Schedule, n_probe: int = 33) -> float:
        probes = np.linspace(0.0, schedule.t_final, n_probe)
        return max(self.rates(schedule.beta(t)).sum(axis=0).max() for t in probes)


def _steps_and_stride(t_final: float, dt: float, n_samples: int) -> tuple[int, float, int]:
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n_steps = max(1, int(round(t_final / dt)))
    h = t_final / n_steps
    stride = max(1, n_steps // max(1, n_samples))
    return n_steps, h, stride


def _check_stability(dt: float, max_rate: float) -> None:
    if dt * max_rate > 0.1:
        raise ValueError(
            f"dt={dt} too large: dt * max attempt rate = {dt * max_rate:.3g} > 0.1; "
            f"use dt <= {0.1 / max_rate:.3g}")


def evolve_master_timedep(model: IsingModel, rule: RateRule, schedule: Schedule,
                          p0: np.ndarray, dt: float,
                          n_samples: int = 512) -> AnnealTrajectory:
    """Integrate dP/dt = W(beta(t)) P with the generator rebuilt per stage."""
    sys = _FlipSystem(model, rule)
    spins.check_probability_vector(p0)
    n_steps, h, stride = _steps_and_stride(schedule.t_final, dt, n_samples)
    _check_stability(h, sys.max_diag_rate(schedule))

    p = np.array(p0, dtype=float)
    samples = _SampleBuffer(sys, "master")
    samples.add(0.0, schedule.beta(0.0), p, 0.0)
    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        r0 = sys.rates(schedule.beta(t))
        r1 = sys.rates(schedule.beta(t + 0.5 * h))
        r2 = sys.rates(schedule.beta(t + h))
        k1 = sys.apply_generator(r0, p)
        k2 = sys.apply_generator(r1, p + 0.5 * h * k1)
        k3 = sys.apply_generator(r1, p + 0.5 * h * k2)
        k4 = sys.apply_generator(r2, p + h * k3)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % stride == 0 or step == n_steps:
            total = p.sum()
            if abs(total - 1.0) > 1e-6:
                raise RuntimeError(
                    f"probability drifted to {total} at t={step * h}; reduce dt")
            samples.add(step * h, schedule.beta(step * h), p, 0.0)
    return samples.build()


def evolve_imaginary_schrodinger(model: IsingModel, rule: RateRule, schedule: Schedule,
                                 phi0: np.ndarray, dt: float, n_samples: int = 512,
                                 include_beta_derivative: bool = True) -> AnnealTrajectory:
    """Integrate -dphi/dt = (H(t) - beta_dot(t) H0 / 2) phi, renormalizing per step.

    The norm decrement is accumulated and sampled; only the state
    direction carries the master-equation correspondence. Setting
    include_beta_derivative=False drops the beta_dot term, reproducing
    the stationary-mapping approximation.
    """
    sys = _FlipSystem(model, rule)
    n_steps, h, stride = _steps_and_stride(schedule.t_final, dt, n_samples)
    _check_stability(h, sys.max_diag_rate(schedule))

    def flow(t: float, phi: np.ndarray) -> np.ndarray:
        beta = schedule.beta(t)
        out = -sys.apply_hamiltonian(beta, sys.rates(beta), phi)
        if include_beta_derivative:
            out += 0.5 * schedule.beta_dot(t) * sys.energies * phi
        return out

    phi = np.array(phi0, dtype=float)
    nrm = np.linalg.norm(phi)
    if nrm == 0:
        raise ValueError("phi0 must be nonzero")
    phi /= nrm
    log_decrement = 0.0
    samples = _SampleBuffer(sys, "imaginary")
    samples.add(0.0, schedule.beta(0.0), phi, log_decrement)
    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        k1 = flow(t, phi)
        k2 = flow(t + 0.5 * h, phi + 0.5 * h * k1)
        k3 = flow(t + 0.5 * h, phi + 0.5 * h * k2)
        k4 = flow(t + h, phi + h * k3)
        phi = phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        nrm = np.linalg.norm(phi)
        phi /= nrm
        log_decrement -= math.log(nrm)
        if step % stride == 0 or step == n_steps:
            samples.add(step * h, schedule.beta(step * h), phi, log_decrement)
    return samples.build()


def evolve_real_schrodinger(model: IsingModel, rule: RateRule, schedule: Schedule,
                            phi0: np.ndarray, dt: float,
                            n_samples: int = 512) -> AnnealTrajectory:
    """Integrate i dphi/dt = (H(t) - beta_dot(t) H0 / 2) phi on complex states.

    The norm must stay within 1e-4 of 1 or the run aborts with a dt
    suggestion; at reasonable dt it is conserved to better than 1e-6.
    """
    sys = _FlipSystem(model, rule)
    n_steps, h, stride = _steps_and_stride(schedule.t_final, dt, n_samples)
    _check_stability(h, sys.max_diag_rate(schedule))

    def flow(t: float, phi: np.ndarray) -> np.ndarray:
        beta = schedule.beta(t)
        out = sys.apply_hamiltonian(beta, sys.rates(beta), phi)
        out -= 0.5 * schedule.beta_dot(t) * sys.energies * phi
        return -1j * out

    phi = np.array(phi0, dtype=complex)
    nrm = np.linalg.norm(phi)
    if nrm == 0:
        raise ValueError("phi0 must be nonzero")
    phi /= nrm
    samples = _SampleBuffer(sys, "real")
    samples.add(0.0, schedule.beta(0.0), phi, 0.0)
    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        k1 = flow(t, phi)
        k2 = flow(t + 0.5 * h, phi + 0.5 * h * k1)
        k3 = flow(t + 0.5 * h, phi + 0.5 * h * k2)
        k4 = flow(t + h, phi + h * k3)
        phi = phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        drift = abs(np.linalg.norm(phi) - 1.0)
        if drift > 1e-4:
            raise RuntimeError(
                f"norm drifted by {drift:.3g} at t={step * h}; reduce dt "
                f"(try dt <= {h / 4:.3g})")
        if step % stride == 0 or step == n_steps:
            samples.add(step * h, schedule.beta(step * h), phi, 0.0)
    return samples.build()


class _SampleBuffer:
    """Collects per-sample diagnostics for an engine run."""

    def __init__(self, sys: _FlipSystem, engine: str):
        self.sys = sys
        self.engine = engine
        self.times, self.betas, self.states = [], [], []
        self.ground_probability, self.overlap, self.log_norm = [], [], []

    def add(self, t: float, beta: float, state: np.ndarray, log_norm: float):
        sys = self.sys
        if self.engine == "master":
            probs = state
            x = 0.5 * beta * sys.energies
            phi = state * np.exp(x - x.max())
            phi_norm = np.linalg.norm(phi)
            phi_dir = phi / phi_norm if phi_norm > 0 else phi
        elif self.engine == "imaginary":
            # classical-probability image of the transformed state
            x = -0.5 * beta * sys.energies
            probs = state * np.exp(x - x.max())
            probs = probs / probs.sum()
            phi_dir = state / np.linalg.norm(state)
        else:
            norm2 = float(np.real(np.vdot(state, state)))
            probs = np.real(state * np.conj(state)) / norm2
            phi_dir = state / math.sqrt(norm2)
        ground_vec = sys.sqrt_boltzmann(beta)
        self.times.append(t)
        self.betas.append(beta)
        self.states.append(np.array(state))
        self.ground_probability.append(
            float(np.clip(probs[sys.ground].sum(), 0.0, 1.0)))
        self.overlap.append(float(np.abs(np.vdot(ground_vec, phi_dir)) ** 2))
        self.log_norm.append(log_norm)

    def build(self) -> AnnealTrajectory:
        return AnnealTrajectory(
            engine=self.engine,
            times=np.array(self.times),
            betas=np.array(self.betas),
            states=np.array(self.states),
            ground_probability=np.array(self.ground_probability),
            overlap=np.array(self.overlap),
            log_norm_decrement=np.array(self.log_norm),
        )


def _mapped_master_states(master: AnnealTrajectory, imaginary: AnnealTrajectory,
                          model: IsingModel):
    if master.n_samples != imaginary.n_samples or \
            np.abs(master.times - imaginary.times).max() > 1e-12:
        raise ValueError("trajectories must share their sample times")
    energies = spins.energy_table(model)
    for p, phi, beta in zip(master.states, imaginary.states, master.betas):
        x = 0.5 * beta * energies
        mapped = p * np.exp(x - x.max())
        mapped /= np.linalg.norm(mapped)
        yield mapped, phi


def master_imaginary_deviation(master: AnnealTrajectory,
                               imaginary: AnnealTrajectory,
                               model: IsingModel) -> float:
    """Max direction mismatch between the transformed master and imaginary runs.

    For every shared sample, maps the probability vector through
    exp(beta H0 / 2), normalizes, and returns the largest
    1 - |cos| against the imaginary-time state.
    """
    worst = 0.0
    for mapped, phi in _mapped_master_states(master, imaginary, model):
        cos = abs(float(np.real(np.vdot(mapped, phi))))
        worst = max(worst, 1.0 - cos)
    return worst


def master_imaginary_state_difference(master: AnnealTrajectory,
                                      imaginary: AnnealTrajectory,
                                      model: IsingModel) -> float:
    """Max Euclidean distance between the transformed master and imaginary states.

    Linear in the state error, unlike the cosine deviation (which is
    quadratic and bottoms out at roundoff), so this is the right measure
    for integrator-order checks.
    """
    worst = 0.0
    for mapped, phi in _mapped_master_states(master, imaginary, model):
        worst = max(worst, float(np.linalg.norm(mapped - phi)))
    return worst
