"""Grid-posterior MLE on a linear schedule, with and without noise awareness.

500 shots are taken at every depth 0..7 under depolarizing rates rising
from 0.035 to 0.35.   The posterior over 1000 candidate angles is updated
depth by depth; the plain likelihood ignores the noise while the
noise-aware one folds the depolarizing map into the update.  Deeper
samples keep helping as long as the damped Fisher information grows.
"""
import numpy as np

from lowdepth_ae import ExperimentConfig, NoiseModel, run_experiment
import tempfile

N_TRIALS = 60
results = {}
for aware in (False, True):
    config = ExperimentConfig(
        n_trials=N_TRIALS, n_shots=500, max_depth=7, seed=11,
        vector_mode="uniform-theta", algorithms=("direct", "mle"),
        noise=NoiseModel.linear_ramp(7), mle_noise_aware=aware)
    with tempfile.TemporaryDirectory() as tmp:
        trials, _ = run_experiment(config, out_dir=tmp)
    per_depth = {d: [] for d in range(8)}
    direct_errs = []
    for trial in trials:
        direct_errs.append(abs(trial.estimates["direct"][0].p_hat - trial.p_true))
        for est in trial.estimates["mle"]:
            per_depth[est.diagnostics["label"]].append(abs(est.p_hat - trial.p_true))
    results[aware] = ({d: float(np.mean(v)) for d, v in per_depth.items()},
                      float(np.mean(direct_errs)))

print(f"direct sampling at depth 0 (500 shots): mean error {results[False][1]:.4f}\n")
print(f"{'max depth':>9} {'oracle calls':>13} {'plain MLE':>11} {'noise-aware':>12}")
calls = 0
for d in range(8):
    calls += 500 * (2 * d + 1)
    print(f"{d:>9} {calls:>13} {results[False][0][d]:>11.4f} {results[True][0][d]:>12.4f}")

print("\nAmplification beats the depth-0 baseline well before the deepest")
print("circuits; modeling the noise in the likelihood removes the residual bias.")
