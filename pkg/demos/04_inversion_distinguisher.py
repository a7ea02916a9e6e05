"""Telling two unitaries apart by undoing one of them.

If the black box applies U_a, then U_a^dagger brings the input back every
time. For a different random U_b the input is almost never recovered, so a
few shots settle the question.
"""

import numpy as np

from qhlab.boson import haar_random_unitary
from qhlab.qhl import distinguish_by_inversion
from qhlab.statevector import basis_state

rng = np.random.default_rng(3)
v0 = basis_state(0, 16)

for shots in (1, 2, 5, 20):
    right = 0
    for _ in range(500):
        Ua, Ub = haar_random_unitary(16, rng), haar_random_unitary(16, rng)
        truth = rng.choice(["a", "b"])
        U = Ua if truth == "a" else Ub
        right += distinguish_by_inversion(Ua, Ub, lambda v: U @ v, v0, shots, rng) == truth
    print(f"{shots:2d} shots: accuracy {right / 500:.3f}")
