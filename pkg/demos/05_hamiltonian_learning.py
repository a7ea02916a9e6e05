"""Learning the couplings of a 3-qubit Ising model.

Twenty seeded runs of the adaptive inversion protocol with default
settings. The median loss falls exponentially; we print it every 20
experiments and the fitted decay rate.
"""

from qhlab.harness import RunConfig, run_qhl_experiment

res = run_qhl_experiment(RunConfig(n_qubits=3, runs=20, n_exp=200))
for row in res.summary[::20]:
    print(f"iteration {row['iteration']:3d}: median loss {row['median_loss']:.3e} "
          f"(IQR {row['q25_loss']:.1e} .. {row['q75_loss']:.1e})")
print(f"gamma = {res.gamma:.4f}, R^2 = {res.r_squared:.3f}")

trace = res.traces[0]
print("run 0 truth:   ", trace.x_true.round(4))
print("run 0 estimate:", trace.rows[-1]["estimate"].round(4))
