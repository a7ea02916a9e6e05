"""Gates, measurement and time evolution on a small state vector.

Run with ``python demos/01_gates_and_measurement.py``.
"""

import numpy as np

from qhlab import statevector as sv
from qhlab.ising import CouplingGraph, ising_diagonal, uniform_superposition

rng = np.random.default_rng(0)

# A Hadamard turns |0> into an equal superposition, and undoes itself.
H = sv.hadamard_gate()
plus = H @ sv.basis_state(0, 2)
print("H|0> =", np.round(plus, 4))
print("H H|0> =", np.round(H @ plus, 4))

# The Toffoli gate flips the last bit only when the first two are set.
T = sv.toffoli_gate()
for k in (3, 6, 7):
    print(f"Toffoli |{k:03b}> -> |{int(np.argmax(np.abs(T @ sv.basis_state(k, 8)))):03b}>")

# Measuring sqrt(2/3)|0> - sqrt(1/3)|1> gives 0 about two thirds of the time.
v = np.array([np.sqrt(2 / 3), -np.sqrt(1 / 3)])
shots = sv.measure(v, rng, shots=100_000)
print("frequency of 0:", np.mean(shots == 0))

# Two-qubit Ising evolution followed by an imperfect inversion: the state
# survives with probability cos^2(delta t).
g = CouplingGraph.complete(2)
v0 = uniform_superposition(2)
for delta in (0.0, 0.3, np.pi / 4):
    p = sv.survival_probability(ising_diagonal([0.5 + delta], g), ising_diagonal([0.5], g), 1.0, v0)
    print(f"delta={delta:.3f}: survival {p:.4f}, cos^2 {np.cos(delta) ** 2:.4f}")
