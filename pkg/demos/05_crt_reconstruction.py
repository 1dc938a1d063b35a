"""Angle recovery from two coprime depths via the Chinese remainder theorem.

Sampling at depths D and D-1 measures the angle modulo pi/(2D-1) and
pi/(2D+1); folding the readings back into residues of v modulo the coprime
pair (2D-1, 2D+1) pins the angle to the grid v pi / (4D^2 - 1).  With
exact probabilities recovery is exact on the whole grid.  With 500-shot
estimates under bursty noise, a missed residue lands the reconstruction
far away: the error histogram splits into an accurate cluster plus
outliers, and the mean error is best at small D.
"""
import math

import numpy as np

from lowdepth_ae import (CorrelatedNoise, ExperimentConfig, NoiseModel,
                         crt_reconstruct, run_experiment)
import tempfile

print("Noiseless grid recovery (exact probabilities, exhaustive):")
for d_max in range(2, 8):
    modulus = 4 * d_max * d_max - 1
    worst = 0.0
    for v in range(0, (modulus + 1) // 2):
        theta = v * math.pi / modulus
        est, _ = crt_reconstruct(math.sin((2 * d_max + 1) * theta) ** 2,
                                 math.sin((2 * d_max - 1) * theta) ** 2, theta, d_max)
        worst = max(worst, abs(est - theta))
    print(f"  D={d_max}: modulus {modulus:>3}, worst grid error {worst:.2e}")

noise = NoiseModel.linear_ramp(7, correlation=CorrelatedNoise(p_switch=0.05,
                                                                burst_scale=4.0))
config = ExperimentConfig(n_trials=150, n_shots=500, max_depth=7, seed=5,
                          vector_mode="uniform-theta", algorithms=("crt",),
                          noise=noise)
with tempfile.TemporaryDirectory() as tmp:
    trials, _ = run_experiment(config, out_dir=tmp)

print("\n500 shots per depth under bursty depolarizing noise:")
print(f"{'D':>3} {'mean err':>9} {'median':>8} {'outliers>3x median':>19}")
for d_max in range(2, 8):
    errs = np.array([abs(e.p_hat - t.p_true) for t in trials
                     for e in t.estimates["crt"] if e.diagnostics["label"] == d_max])
    med = float(np.median(errs))
    print(f"{d_max:>3} {errs.mean():>9.4f} {med:>8.4f} {float(np.mean(errs > 3 * med)):>19.2f}")

print("\nAccuracy per point is excellent when both residues land; the failures")
print("are all-or-nothing, which is what the hybrid fallback is built to catch.")
