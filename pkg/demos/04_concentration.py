# Watching the variance of a functional vanish as the dimension grows.
#
# The runs below are cut down (5000 samples per n) so the script finishes in a
# few seconds; the CLI runs the full-size versions.

from pball import FIRST_QUADRANT, FULL, ExperimentConfig, PNormOrder, run_experiment
from pball.concentration import CUBE_DERIVATIVE

small = dict(n_grid=(16, 64, 256, 1024), samples_per_n=5000, seed=0)

# %% x1^2 on the p=2 ball: Y = |x|^2 / n
rep = run_experiment(ExperimentConfig("x1^2", PNormOrder.ratio(2), region=FULL, **small))
print(rep.to_csv())
print(rep.summary())

# %% The finite-n mean is n/(n+2), not the limit value 1
for row in rep.rows:
    n = row.n
    print(f"n={n:5d}  empirical {row.mean:.6f}  exact finite-n {n / (n + 2):.6f}  stderr {row.stderr:.1e}")

# %% A first-quadrant case
rep = run_experiment(ExperimentConfig("x1", PNormOrder.ratio(1), region=FIRST_QUADRANT, **small))
print("\n" + rep.summary())

# %% Nonlinear exchange: E sin(Y1 + Y2) against sin(E Y1 + E Y2)
rep = run_experiment(ExperimentConfig(["x1^2", "cos(x1)"], PNormOrder.ratio(2), h="sin(y1+y2)", **small))
print("\n", rep.exchange)

# %% Arc length and area of random monotone paths
arc = run_experiment(ExperimentConfig("sqrt(1+x1^2)", region=CUBE_DERIVATIVE, **small))
area = run_experiment(ExperimentConfig("x1", region=CUBE_DERIVATIVE, apply_to="path", **small))
print("\narc:", arc.summary())
print("area:", area.summary())
