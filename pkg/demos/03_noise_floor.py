"""Why direct sampling saturates: the depolarizing noise floor.

Depolarizing noise pulls every outcome probability toward 1/2, so the
observed rate is off by eta |1/2 - p| no matter how many shots are taken.
Averaged over a uniform prior on p the residual error is eta / 4.  Here
eta is set so the floor lands at 0.053 and the mean error of the direct
estimator is tracked as the shot budget grows.
"""
import math

import numpy as np

from lowdepth_ae import NoiseModel, direct_estimate, noise_floor, sample_noisy_shots

FLOOR_TARGET = 0.053
eta0 = 4 * FLOOR_TARGET
model = NoiseModel(gamma_by_depth=(-math.log(1 - eta0),) * 8)

grid = (np.arange(1000) + 0.5) / 1000
print(f"eta_0 = {eta0}   analytic floor eta_0 * E|1/2 - p| = "
      f"{noise_floor(model, 0, grid):.4f}\n")

rng = np.random.default_rng(7)
print(f"{'shots':>7} {'mean |p_hat - p|':>17}")
for shots in (10, 30, 100, 300, 1000, 3000, 10000):
    errs = []
    for _ in range(400):
        p = rng.uniform()
        counts = sample_noisy_shots(math.asin(math.sqrt(p)), 0, shots, model, rng)
        errs.append(abs(direct_estimate(counts).p_hat - p))
    print(f"{shots:>7} {np.mean(errs):>17.4f}")

print("\nThe error stops improving near the floor: more shots cannot remove")
print("the depolarizing bias, only amplification at higher depths can.")
