"""Statevector execution, analytic probabilities and shot postselection."""
import math

import numpy as np
import pytest

from lowdepth_ae.circuits import Circuit, Gate, build_iterated_circuit
from lowdepth_ae.simulator import (BAD_INDICES, GOOD_INDEX, DepthCounts,
                                   analytic_success_prob, outcome_distribution,
                                   run_statevector, sample_and_postselect)

RNG = np.random.default_rng(42)


def random_unit():
    x = RNG.standard_normal(4)
    return x / np.linalg.norm(x)


def test_empty_circuit_stays_in_vacuum():
    state = run_statevector(Circuit(4, ()))
    assert state[0] == 1.0
    assert np.all(state[1:] == 0.0)


def test_single_x_prepares_good_state():
    state = run_statevector(Circuit(4, (Gate("x", (0,)),)))
    assert state[GOOD_INDEX] == 1.0


def test_wrong_register_size_rejected():
    with pytest.raises(ValueError):
        run_statevector(Circuit(3, ()))


def test_iterated_circuit_matches_analytic_probability():
    for _ in range(100):
        x, y = random_unit(), random_unit()
        theta = math.asin(max(-1.0, min(1.0, float(np.dot(x, y)))))
        for t in range(8):
            probs = outcome_distribution(run_statevector(build_iterated_circuit(x, y, t)))
            assert abs(probs[GOOD_INDEX] - analytic_success_prob(theta, t)) < 1e-9


def test_analytic_success_prob_values():
    assert abs(analytic_success_prob(math.pi / 6, 1) - 1.0) < 1e-15
    theta = 0.37
    assert abs(analytic_success_prob(theta, 0) - math.sin(theta) ** 2) < 1e-15
    # sin^2(1.4) for theta=0.2, t=3, frozen from a high-precision evaluation
    assert abs(analytic_success_prob(0.2, 3) - 0.9711111703343291) < 1e-12
    with pytest.raises(ValueError):
        analytic_success_prob(0.2, -1)


def test_norm_preserved_over_random_circuits():
    kinds = ("x", "z", "h", "ry", "rbs", "cz")
    for _ in range(1000):
        gates = []
        for _ in range(RNG.integers(1, 12)):
            kind = kinds[RNG.integers(len(kinds))]
            if kind in ("rbs", "cz"):
                q1, q2 = RNG.choice(4, size=2, replace=False)
                angle = float(RNG.uniform(-math.pi, math.pi)) if kind == "rbs" else None
                gates.append(Gate(kind, (int(q1), int(q2)), angle))
            else:
                angle = float(RNG.uniform(-math.pi, math.pi)) if kind == "ry" else None
                gates.append(Gate(kind, (int(RNG.integers(4)),), angle))
        state = run_statevector(Circuit(4, tuple(gates)))
        assert abs(np.linalg.norm(state) - 1.0) < 1e-9


def test_postselect_concentrated_on_good():
    probs = np.zeros(16)
    probs[GOOD_INDEX] = 1.0
    counts = sample_and_postselect(probs, 500, np.random.default_rng(0))
    assert (counts.n_good, counts.n_bad, counts.n_discarded) == (500, 0, 0)


def test_postselect_vacuum_is_discarded():
    probs = np.zeros(16)
    probs[0] = 1.0
    counts = sample_and_postselect(probs, 500, np.random.default_rng(0))
    assert (counts.n_good, counts.n_bad, counts.n_discarded) == (0, 0, 500)


def test_postselect_uniform_within_binomial_bounds():
    probs = np.full(16, 1.0 / 16)
    counts = sample_and_postselect(probs, 16000, np.random.default_rng(7))
    # 5 sigma binomial bounds around 1000 good / 3000 bad
    assert abs(counts.n_good - 1000) <= 5 * math.sqrt(16000 * (1 / 16) * (15 / 16))
    assert abs(counts.n_bad - 3000) <= 5 * math.sqrt(16000 * (3 / 16) * (13 / 16))
    assert counts.shots == 16000


def test_postselect_partition_is_exhaustive():
    for _ in range(25):
        probs = RNG.random(16)
        probs /= probs.sum()
        n = int(RNG.integers(0, 2000))
        counts = sample_and_postselect(probs, n, np.random.default_rng(3))
        assert counts.n_good + counts.n_bad + counts.n_discarded == n


def test_postselect_deterministic_given_seed():
    probs = np.full(16, 1.0 / 16)
    a = sample_and_postselect(probs, 1000, np.random.default_rng(11))
    b = sample_and_postselect(probs, 1000, np.random.default_rng(11))
    assert a == b


def test_postselect_rejects_bad_distribution():
    with pytest.raises(ValueError):
        sample_and_postselect(np.full(16, 0.1), 10, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_and_postselect(np.full(8, 0.125), 10, np.random.default_rng(0))


def test_depth_counts_validation():
    with pytest.raises(ValueError):
        DepthCounts(depth=-1, n_good=0, n_bad=0)
    with pytest.raises(ValueError):
        DepthCounts(depth=0, n_good=-1, n_bad=0)
    counts = DepthCounts(depth=2, n_good=3, n_bad=4, n_discarded=5)
    assert counts.shots == 12
    assert counts.kept == 7
