"""A short tour of weight constants.

Power weights |x|^a on an interval around the origin are A_2 weights for
-1 < a < 1; the estimated constant blows up as a approaches either end.  The
embedding weight [M chi_Q]^eps stays A_1 with a constant that settles under
refinement.

    python demos/weights_tour.py
"""

from mixfrac import Box, make_grid
from mixfrac.operators import CubeFamily
from mixfrac.weights import a1_constant, ap_constant, embedding_weight, power_weight

grid = make_grid(Box(-1.0, 1.0), 1024)
family = CubeFamily.dyadic()
print("A_2 constant of |x|^a on [-1, 1]")
for a in (-0.95, -0.5, 0.0, 0.5, 0.95):
    print(f"  a = {a:+.2f}: {ap_constant(power_weight(grid, a), 2, family):8.3f}")

print("A_1 constant of the embedding weight, eps = 1/2")
for res in (128, 256, 512, 1024):
    g = make_grid(Box.symmetric(4.0), res)
    w = embedding_weight(g, 0.5, CubeFamily.dense())
    print(f"  resolution {res:5d}: {a1_constant(w, CubeFamily.dense()):.4f}")
