"""How the decay rate depends on the number of couplings.

Fits the loss decay rate for complete graphs on 3 and 5 qubits and a line
graph on 5 qubits. Expect a few minutes of runtime.
"""

from qhlab.harness import RunConfig, sweep_gamma

base = RunConfig(runs=10, n_exp=200)
for graph in ("complete", "line"):
    sweep = sweep_gamma(base.replace(graph=graph), [3, 5])
    for r in sweep.rows:
        print(f"{graph:8s} n={r.n_qubits} dim={r.dim:2d} gamma={r.gamma:.5f} R^2={r.r_squared:.3f}")
    for t in sweep.ratio_tests():
        print(f"  gamma ratio {t['gamma_ratio']:.2f} vs dim ratio {t['dim_ratio']:.2f}")
