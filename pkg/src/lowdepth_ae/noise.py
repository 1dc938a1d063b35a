"""Effective depolarizing + readout noise over circuit depths.

One model unifies two common parameterizations: a depth-independent
readout/preparation error ``beta`` and per-depth exponential damping rates
``gamma_d`` combine as ``1 - eta_d = (1 - beta) exp(-gamma_d)``.  For small
rates ``eta_d ~ beta + gamma_d``.  Noise acts at the outcome-probability
level: the good-outcome probability is pulled toward 1/2,

    p_bar = p (1 - eta) + eta / 2 = (1 - (1 - eta) cos(2 (2d+1) theta)) / 2.

An optional two-state Markov modulator produces time-correlated bursts in
which ``eta_d`` is multiplied by ``burst_scale``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import DepthCounts


@dataclass(frozen=True)
class CorrelatedNoise:
    """Bursty error modulator: sticky two-state Markov chain over shots.

    Per shot the chain leaves the burst state with probability ``p_switch``
    and enters it with probability ``p_switch * (1 - p_switch)``; it starts
    quiet.  ``p_switch=1`` never bursts and ``burst_scale=1`` changes
    nothing, so either limit reduces exactly to independent shots; small
    ``p_switch`` gives long correlated bursts.
    """

    p_switch: float
    burst_scale: float

    def __post_init__(self):
        if not 0.0 < self.p_switch <= 1.0:
            raise ValueError("p_switch must be in (0, 1]")
        if self.burst_scale < 0.0:
            raise ValueError("burst_scale must be nonnegative")


@dataclass(frozen=True)
class NoiseModel:
    """Readout error plus per-depth depolarizing rates (and optional bursts)."""

    gamma_by_depth: tuple[float, ...]
    beta_readout: float = 0.0
    leak_prob: float = 0.0
    correlation: CorrelatedNoise | None = None

    def __post_init__(self):
        object.__setattr__(self, "gamma_by_depth", tuple(float(g) for g in self.gamma_by_depth))
        if not 0.0 <= self.beta_readout < 1.0:
            raise ValueError("beta_readout must be in [0, 1)")
        if not 0.0 <= self.leak_prob < 1.0:
            raise ValueError("leak_prob must be in [0, 1)")
        if len(self.gamma_by_depth) == 0:
            raise ValueError("gamma_by_depth must not be empty")
        gs = self.gamma_by_depth
        if any(g < 0 for g in gs):
            raise ValueError("gamma rates must be nonnegative")
        if any(b < a - 1e-12 for a, b in zip(gs, gs[1:])):
            raise ValueError("gamma rates must be nondecreasing in depth")

    @property
    def max_depth(self) -> int:
        return len(self.gamma_by_depth) - 1

    @classmethod
    def noiseless(cls, max_depth: int = 7) -> "NoiseModel":
        return cls(gamma_by_depth=(0.0,) * (max_depth + 1))

    @classmethod
    def linear_ramp(cls, max_depth: int = 7, gamma0: float = 0.035,
                    gamma_top: float = 0.35, **kwargs) -> "NoiseModel":
        """Rates interpolated linearly from 0.035 at depth zero to 0.35 at the top."""
        gammas = tuple(np.linspace(gamma0, gamma_top, max_depth + 1))
        return cls(gamma_by_depth=gammas, **kwargs)


def effective_eta(model: NoiseModel, depth: int) -> float:
    """Combined depolarizing probability ``eta_d = 1 - (1-beta) exp(-gamma_d)``."""
    if not 0 <= depth <= model.max_depth:
        raise ValueError(f"depth {depth} outside model range 0..{model.max_depth}")
    return 1.0 - (1.0 - model.beta_readout) * math.exp(-model.gamma_by_depth[depth])


def noisy_prob(theta: float, depth: int, model: NoiseModel) -> float:
    """Good-outcome probability at ``depth`` under the depolarizing map."""
    eta = effective_eta(model, depth)
    return (1.0 - (1.0 - eta) * math.cos(2 * (2 * depth + 1) * theta)) / 2.0


def noise_floor(model: NoiseModel, depth: int, prior_p, weights=None) -> float:
    """Residual mean error ``eta_d * E|1/2 - p|`` under a prior over p.

    ``prior_p`` is an array of probability values (grid or Monte Carlo
    samples); ``weights`` optionally weight them.  The uniform prior on
    [0, 1] gives ``eta_d / 4``.
    """
    ps = np.asarray(prior_p, dtype=float)
    if ps.size == 0 or np.any(ps < 0) or np.any(ps > 1):
        raise ValueError("prior must be probability values in [0, 1]")
    if weights is None:
        expect = float(np.mean(np.abs(0.5 - ps)))
    else:
        w = np.asarray(weights, dtype=float)
        expect = float(np.sum(w * np.abs(0.5 - ps)) / np.sum(w))
    return effective_eta(model, depth) * expect


def _sample_independent(p_bar: float, depth: int, n_shots: int, leak: float,
                        rng: np.random.Generator) -> DepthCounts:
    n_disc = int(rng.binomial(n_shots, leak)) if leak > 0 else 0
    n_good = int(rng.binomial(n_shots - n_disc, p_bar))
    return DepthCounts(depth=depth, n_good=n_good,
                       n_bad=n_shots - n_disc - n_good, n_discarded=n_disc)


def _sample_correlated(theta: float, depth: int, n_shots: int, model: NoiseModel,
                       rng: np.random.Generator) -> DepthCounts:
    corr = model.correlation
    eta = effective_eta(model, depth)
    p_t = math.sin((2 * depth + 1) * theta) ** 2
    p_enter = corr.p_switch * (1.0 - corr.p_switch)
    p_leave = corr.p_switch
    eta_burst = min(eta * corr.burst_scale, 1.0)
    p_quiet = p_t * (1 - eta) + eta / 2
    p_burst = p_t * (1 - eta_burst) + eta_burst / 2
    u_state = rng.random(n_shots)
    u_leak = rng.random(n_shots) if model.leak_prob > 0 else None
    u_out = rng.random(n_shots)
    n_good = n_bad = n_disc = 0
    burst = False
    for i in range(n_shots):
        burst = (u_state[i] >= p_leave) if burst else (u_state[i] < p_enter)
        if u_leak is not None and u_leak[i] < model.leak_prob:
            n_disc += 1
            continue
        if u_out[i] < (p_burst if burst else p_quiet):
            n_good += 1
        else:
            n_bad += 1
    return DepthCounts(depth=depth, n_good=n_good, n_bad=n_bad, n_discarded=n_disc)


def sample_noisy_shots(theta: float, depth: int, n_shots: int, model: NoiseModel,
                       rng: np.random.Generator) -> DepthCounts:
    """Simulate ``n_shots`` postselected measurements of the depth-d circuit.

    Independent mode draws Bernoulli outcomes at ``noisy_prob`` with an
    optional leak channel feeding the discard tally; correlated mode runs
    the burst modulator shot by shot.  Deterministic given the generator.
    """
    if n_shots < 0:
        raise ValueError("n_shots must be nonnegative")
    if model.correlation is not None:
        return _sample_correlated(theta, depth, n_shots, model, rng)
    return _sample_independent(noisy_prob(theta, depth, model), depth, n_shots,
                               model.leak_prob, rng)
