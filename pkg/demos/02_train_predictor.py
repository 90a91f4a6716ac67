"""
Learning a comfort index from wearables
=======================================

Synthetic occupants produce heart rate and skin conductance that drift with
air temperature. A ridge model maps windowed features to the -3..+3 comfort
scale.
"""

import numpy as np

from comfortloop.predictor import FEATURE_NAMES, extract_features, predict_tci, train_tci_model
from comfortloop.simkit import Environment, make_occupants, sample_occupant, true_tci

occupants = make_occupants([21.5, 24.0], sensitivities=[0.5, 0.8], noise_fraction=0.1)
env = Environment()

# one 10-sample window per occupant per sweep temperature
dataset = []
for occ in occupants:
    for k, temp in enumerate(np.arange(17.0, 28.5, 0.5)):
        times = [1000.0 * k + j for j in range(10)]
        physio = [sample_occupant(occ, temp, t) for t in times]
        envs = [env.sample(t, temp) for t in times]
        dataset.append((extract_features(physio, envs, end=times[-1]), true_tci(occ, temp)))
print(f"{len(dataset)} labelled windows")

model = train_tci_model(dataset, ridge_strength=1e-3, seed=1)
w, b = model.raw_coefficients()
for name, coef in zip(FEATURE_NAMES, w):
    print(f"  {name:>16s} {coef:+.4f}")
print(f"  {'intercept':>16s} {b:+.4f}")

# check the fit on fresh, later windows
errors = []
for occ in occupants:
    for temp in (19.0, 22.3, 25.7):
        times = [5e5 + j for j in range(10)]
        x = extract_features([sample_occupant(occ, temp, t) for t in times],
                             [env.sample(t, temp) for t in times], end=times[-1])
        pred, truth = predict_tci(model, x), true_tci(occ, temp)
        errors.append(pred - truth)
        print(f"{occ.occupant_id} at {temp:4.1f} degC: predicted {pred:+.2f}, true {truth:+.2f}")
print(f"RMSE {np.sqrt(np.mean(np.square(errors))):.3f}")

model.save("tci_model.json")
