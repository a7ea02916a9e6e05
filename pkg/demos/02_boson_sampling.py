"""Boson sampling at desk scale.

Output probabilities are squared permanents of submatrices of the
interferometer. This script checks the Hong-Ou-Mandel dip, compares the
two permanent algorithms and samples a random 5-mode, 3-photon device.
"""

import time

import numpy as np

from qhlab import boson
from qhlab.distance import total_variation

rng = np.random.default_rng(1)

hom = boson.full_distribution(boson.hong_ou_mandel())
print("Hong-Ou-Mandel:", {boson.format_outcome(k): round(v, 12) for k, v in hom.as_dict().items()})

M = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
for f in (boson.permanent_ryser, boson.permanent_minors):
    start = time.perf_counter()
    val = f(M)
    print(f"{f.__name__:18s} {val:.6f}  ({time.perf_counter() - start:.3f} s)")

A = boson.haar_random_interferometer(5, 3, rng)
dist = boson.full_distribution(A)
print(f"{len(dist)} outcomes, total probability {dist.probs.sum():.12f}")
top = np.argsort(dist.probs)[::-1][:5]
for i in top:
    print(f"  {boson.format_outcome(dist.labels[i])}: {dist.probs[i]:.4f}")

shots = boson.sample_outcome(A, 20_000, rng)
index = {S: i for i, S in enumerate(dist.labels)}
freq = np.bincount([index[S] for S in shots], minlength=len(dist)) / len(shots)
print("empirical TV distance to exact:", round(total_variation(freq, dist.probs), 4))
