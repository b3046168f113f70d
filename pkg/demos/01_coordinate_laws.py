# Coordinate laws of high-dimensional p-balls.
#
# One coordinate of a uniform point in {sum |x_k|^p <= n R^p} has an exact
# density that, as n grows, settles onto exp(-|x|^p / (p R^p)) suitably
# normalized: a normal-like law on the full line when p = p0/q0 with p0 even,
# an exponent-like law on [0, inf) otherwise.

import numpy as np

from pball import FiniteCoordDensity, GenExponent, GenNormal, PNormOrder, coordinate_law

# %% Parity decides the geometry
for p0, q0 in [(2, 1), (4, 3), (1, 1), (3, 2)]:
    o = PNormOrder.ratio(p0, q0)
    print(f"p = {o}: {o.classification:14s} -> {type(coordinate_law(o)).__name__}")

# %% p = 2 is the standard normal, p = 4 its flatter cousin
normal = GenNormal(PNormOrder.ratio(2))
quartic = GenNormal(PNormOrder.ratio(4))
x = np.array([0.0, 0.5, 1.0, 2.0, 3.0])
print("\nx        p=2 pdf      p=4 pdf")
for xi, a, b in zip(x, normal.pdf(x), quartic.pdf(x)):
    print(f"{xi:4.1f}  {a:11.8f}  {b:11.8f}")
print("p=4 variance:", quartic.var(), " 97.5% quantile:", quartic.quantile(0.975))

# %% Rate parametrization of the half-line law: exp(-lambda x^p)
expo = GenExponent.from_rate(PNormOrder.ratio(1), 2.0)
cubic = GenExponent.from_rate(PNormOrder.ratio(3), 1.0)
print("\np=1, lambda=2: pdf(0) =", expo.pdf(0.0), " mean =", expo.mean())
print("p=3, lambda=1: pdf(0) =", cubic.pdf(0.0), " median =", cubic.quantile(0.5))

# %% The finite-n marginal converges
grid = np.linspace(-5, 5, 2001)
for p in (2, 4):
    o = PNormOrder.ratio(p)
    lim = coordinate_law(o).pdf(grid)
    gaps = [np.max(np.abs(FiniteCoordDensity(o, 1.0, n).pdf(grid) - lim)) for n in (8, 32, 128, 512)]
    print(f"\np={p}: sup |rho_n - rho| at n=8,32,128,512:", " ".join(f"{g:.2e}" for g in gaps))

# %% |X|^p / (p beta) is Gamma(1/p, beta)
rng = np.random.default_rng(0)
law = coordinate_law(PNormOrder.ratio(3))
z = law.to_gamma(law.sample(rng, 200_000), beta=2.0)
g = law.gamma_law(2.0)
print(f"\nGamma(1/3, 2): sample mean {z.mean():.5f} vs {g.mean():.5f}, var {z.var():.5f} vs {g.var():.5f}")
