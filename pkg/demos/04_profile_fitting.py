"""
Fitting lambda from evaluation records
======================================

Blended accuracy of a marked model is modeled as 1 - lambda * alpha. Given
test-set and trigger-set predictions for a few marked models, we estimate
each model's profile and check that one lambda fits them all.
"""

# %%
import numpy as np

from wmgame import ModelProfile, estimate_profile, fit_lambda, lambda_coefficients
from wmgame.profiles import EvaluationSet, PredictionRecord, agreement_rate, bounds_check

rng = np.random.default_rng(0)


def synthetic(kind, n, accuracy, prefix):
    labels = rng.integers(0, 10, n)
    hits = rng.random(n) < accuracy
    preds = np.where(hits, labels, (labels + 1) % 10)
    return EvaluationSet(kind, [PredictionRecord(f"{prefix}{i}", int(y), int(p))
                                for i, (y, p) in enumerate(zip(labels, preds))])


# %%
# Three models marked at different intensities. Test accuracy p = 0.98 and
# trigger accuracy q chosen so that (1 - alpha) p + alpha q = 1 - 0.2 alpha.
lam_true, p_true = 0.2, 0.98
profiles = []
for alpha in (0.1, 0.3, 0.5):
    q_true = (1 - lam_true * alpha - (1 - alpha) * p_true) / alpha
    test = synthetic("test", 20000, p_true, "x")
    trig = synthetic("trigger", 20000, q_true, "t")
    prof = estimate_profile(alpha, test, trig)
    profiles.append(prof)
    print(prof, "blended", round(prof.blended, 4), bounds_check(prof).passed)

# %%
# Per-model coefficients and a consistency check. A tight tolerance fails on
# noisy data; a loose one accepts the mean.
print(lambda_coefficients(profiles))
try:
    fit_lambda(profiles, 1e-6)
except ValueError as exc:
    print("tight:", exc)
print("loose:", fit_lambda(profiles, 0.05))

# %%
# Exact profiles reproduce the textbook fixture.
print(fit_lambda([ModelProfile(0.2, 1.0, 0.8), ModelProfile(0.5, 1.0, 0.8)], 1e-12))

# %%
# Fidelity compares a marked model with its unmarked baseline sample by sample.
base = synthetic("test", 1000, 0.9, "s")
print("agreement with itself:", agreement_rate(base, base))
