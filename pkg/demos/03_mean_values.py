# Exact mean-values of integral functionals.
#
# For Y = int g(x(t)) dt on the infinite-dimensional ball, the mean is an
# ordinary expectation of g under the coordinate law, computed here by
# quadrature in the probability variable.

import math

from pball import PNormOrder, cube_mean, exchange, functional, mean_even, mean_general, mean_odd, parse, to_text

p2 = PNormOrder.ratio(2)

# %% Integrands are plain text
e = parse("sqrt(1 + x1^2)")
print("parsed and printed back:", to_text(e))

# %% Means on the full ball (p even) and on the first quadrant
print("\nE x1^2, p=2:", mean_even("x1^2", p2).value)
print("E cos(x1), p=2:", mean_even("cos(x1)", p2).value, " exp(-1/2) =", math.exp(-0.5))
print("E x1^4, p=4:", mean_even("x1^4", PNormOrder.ratio(4)).value)
print("E x1*x2, p=1 quadrant:", mean_odd("x1*x2", PNormOrder.ratio(1)).value)

# %% t-dependence and subintervals
r = mean_general(functional("x1^2 * t1", [(0.0, 0.5)]), p2)
print("\nint_0^0.5 t E x^2 dt:", r.value, "+/-", r.error_estimate)

# %% The exchange formula evaluates h at the component means
m1, m2 = mean_even("x1^2", p2).value, mean_even("cos(x1)", p2).value
print("\nsin(E Y1 + E Y2) =", exchange("sin(y1+y2)", [m1, m2]))

# %% The two introductory cube examples
print("\nmean arc length of a path with slope in [0, 1]:", cube_mean("sqrt(1+x1^2)", 0, 1, "derivative").value)
print("closed form:", math.sqrt(2) / 2 + 0.5 * math.log(1 + math.sqrt(2)))
