"""How many samples does it take to tell two distributions apart?

One sample is enough to be right with probability (1 + TV)/2. Repeating
and voting drives the error down, and a random die is hard to tell from a
fair one when it has many faces.
"""

import numpy as np

from qhlab import distance
from qhlab.harness import dice_experiment

rng = np.random.default_rng(2)

p = np.array([0.55, 0.45])
q = p[::-1].copy()
pd = distance.distinguish_probability(p, q)
print(f"single-sample success: {pd:.3f}, empirical {distance.single_sample_accuracy(p, q, 100_000, rng):.3f}")

reps = distance.repetitions_for_confidence(pd, 0.01)
truths = rng.choice(["p", "q"], 1000)
acc = np.mean([distance.majority_vote_distinguish(p, q, t, reps, rng) == t for t in truths])
print(f"{reps} votes -> accuracy {acc:.3f}")

die = distance.random_dice_distribution(10_000, 1e-8, rng)
print(f"10,000-sided die: mean face probability {die.probs.mean():.2e}, variance {die.probs.var():.2e}")

print("rolls needed for 2/3 accuracy against a fair die:")
for row in dice_experiment([4, 16, 64, 256, 1024, 4096], trials=400, seed=2):
    print(f"  D={row['D']:5d}: {row['samples']}")
