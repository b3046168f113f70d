# Volumes, Dirichlet integrals and where the volume of a p-ball lives.

import math

import numpy as np

from pball import FIRST_QUADRANT, PBall, PNormOrder, dirichlet_integral, pball_volume, sample_uniform_pball, shell_ratio
from pball.ball_geometry import log_pball_volume

# %% Dirichlet integrals over the positive part of the unit ball
print("int x^0 y^0 over the quarter disk:", dirichlet_integral([1, 1]), "(pi/4 =", math.pi / 4, ")")
print("int y z^2 over the positive octant of the ball:", dirichlet_integral([1, 2, 3]))

# %% Volumes, carried in log space
print("\nunit disk:", pball_volume(PBall(2, PNormOrder.ratio(2))))
print("cross-polytope n=3:", 8 * pball_volume(PBall(3, 1.0, region=FIRST_QUADRANT)))
for n in (10, 100, 1000, 10_000):
    print(f"log volume of the unit 4-ball in dimension {n:5d}: {log_pball_volume(PBall(n, PNormOrder.ratio(4))):.3f}")

# %% Almost all the volume sits in a thin shell
for n in (10, 100, 1000):
    print(f"n={n:4d}: fraction inside radius 0.99 = {shell_ratio(n, 0.99, 1.0):.3e}")

# %% Uniform sampling: direction from normalized high-order normals, radius from U^(1/n)
ball = PBall(3, PNormOrder.ratio(4))
pts = sample_uniform_pball(ball, np.random.default_rng(1), 100_000)
r = np.sum(pts**4, axis=1) ** 0.25
print("\nall inside:", bool(np.all(ball.contains(pts))))
print("P(|x|_4 <= 0.5) empirical", np.mean(r <= 0.5), "exact", 0.5**3)
