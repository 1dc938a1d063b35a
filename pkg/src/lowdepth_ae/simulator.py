"""Exact statevector execution on four qubits with unary postselection.

Basis convention: qubit 0 is the most significant bit, so the good state
|1000> sits at index 8 and the remaining unary states at 4, 2, 1.  Shots
landing outside the unary code space are detected errors and discarded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, rbs_unitary

NUM_QUBITS = 4
DIM = 16
GOOD_INDEX = 8
BAD_INDICES = (4, 2, 1)
UNARY_INDICES = (GOOD_INDEX,) + BAD_INDICES

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def _ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class DepthCounts:
    """Postselected measurement tallies at one circuit depth."""

    depth: int
    n_good: int
    n_bad: int
    n_discarded: int = 0

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if min(self.n_good, self.n_bad, self.n_discarded) < 0:
            raise ValueError("counts must be nonnegative")

    @property
    def shots(self) -> int:
        return self.n_good + self.n_bad + self.n_discarded

    @property
    def kept(self) -> int:
        return self.n_good + self.n_bad


def _apply_1q(state: np.ndarray, mat: np.ndarray, q: int) -> np.ndarray:
    st = state.reshape([2] * NUM_QUBITS)
    st = np.moveaxis(st, q, 0)
    st = (mat @ st.reshape(2, -1)).reshape([2] * NUM_QUBITS)
    return np.moveaxis(st, 0, q).reshape(DIM)


def _apply_2q(state: np.ndarray, mat: np.ndarray, q1: int, q2: int) -> np.ndarray:
    st = state.reshape([2] * NUM_QUBITS)
    st = np.moveaxis(st, (q1, q2), (0, 1))
    st = (mat @ st.reshape(4, -1)).reshape([2] * NUM_QUBITS)
    return np.moveaxis(st, (0, 1), (q1, q2)).reshape(DIM)


def run_statevector(circuit: Circuit) -> np.ndarray:
    """Final state of ``circuit`` applied to |0000>, as 16 complex amplitudes."""
    if circuit.num_qubits != NUM_QUBITS:
        raise ValueError(f"simulator is fixed at {NUM_QUBITS} qubits")
    state = np.zeros(DIM, dtype=complex)
    state[0] = 1.0
    for g in circuit.gates:
        if g.kind == "x":
            state = _apply_1q(state, _X, g.targets[0])
        elif g.kind == "z":
            state = _apply_1q(state, _Z, g.targets[0])
        elif g.kind == "h":
            state = _apply_1q(state, _H, g.targets[0])
        elif g.kind == "ry":
            state = _apply_1q(state, _ry(g.angle), g.targets[0])
        elif g.kind == "cz":
            state = _apply_2q(state, _CZ, *g.targets)
        elif g.kind == "rbs":
            state = _apply_2q(state, rbs_unitary(g.angle), *g.targets)
        else:
            raise ValueError(f"unsupported gate kind {g.kind!r}")
    return state


def outcome_distribution(state: np.ndarray) -> np.ndarray:
    """Born-rule probabilities over the 16 computational outcomes."""
    return np.abs(np.asarray(state)) ** 2


def success_probability(circuit: Circuit) -> float:
    """Probability of the good outcome |1000> at the end of ``circuit``."""
    return float(outcome_distribution(run_statevector(circuit))[GOOD_INDEX])


def analytic_success_prob(theta: float, t: int) -> float:
    """sin^2((2t+1) theta): the amplified good-outcome probability."""
    if t < 0:
        raise ValueError("depth t must be nonnegative")
    return math.sin((2 * t + 1) * theta) ** 2


def sample_and_postselect(distribution, n_shots: int, rng: np.random.Generator,
                          depth: int = 0) -> DepthCounts:
    """Draw shots from a 16-outcome distribution and tally unary outcomes.

    |1000> counts as good, the other three unary strings as bad, everything
    else is discarded.  Deterministic for a given generator state.
    """
    probs = np.asarray(distribution, dtype=float)
    if probs.shape != (DIM,):
        raise ValueError("distribution must have 16 entries")
    if np.any(probs < -1e-12):
        raise ValueError("distribution has negative entries")
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"distribution sums to {total}, expected 1")
    if n_shots < 0:
        raise ValueError("n_shots must be nonnegative")
    counts = rng.multinomial(n_shots, np.clip(probs, 0.0, None) / total)
    n_good = int(counts[GOOD_INDEX])
    n_bad = int(sum(counts[i] for i in BAD_INDICES))
    return DepthCounts(depth=depth, n_good=n_good, n_bad=n_bad,
                       n_discarded=n_shots - n_good - n_bad)
