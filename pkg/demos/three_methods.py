"""Series, Volterra and variational estimates of the first resonant coupling.

The exponential potential exp(-r) has an exact answer in three dimensions:
kappa* = j_{0,1}^2 / 4 with j_{0,1} the first zero of the Bessel function J_0.
"""

from scipy.special import jn_zeros

from zeroresonance import (RadialPotential, bracket_first_zero, find_first_resonance_general,
                           variational_J)

yukawa = RadialPotential.yukawa()
series = bracket_first_zero("1.67626", "1.68742", 1e-6)
volterra = find_first_resonance_general(yukawa, 3, tol=1e-8)
var = variational_J(yukawa, 3)
print("Yukawa, n = 3")
print("  certified series bracket :", series)
print("  Volterra estimate        :", volterra.kappa_star,
      "sensitivity", volterra.diagnostics["grid_sensitivity"])
print("  variational upper value  :", var.kappa_estimate, "sensitivity", var.kappa_sensitivity)
for N, J in var.refinement_history:
    print(f"    {N:5d} cells  1/J = {1 / J:.8f}")

expo = RadialPotential.exponential()
exact = jn_zeros(0, 1)[0] ** 2 / 4
print("exp(-r), n = 3: exact", exact)
print("  Volterra   ", find_first_resonance_general(expo, 3, tol=1e-8).kappa_star.mid)
print("  variational", variational_J(expo, 3).kappa_estimate)

for n in (4, 5, 6):
    rep = find_first_resonance_general(yukawa, n, search_hi=60, tol=1e-6)
    print(f"Yukawa, n = {n}: kappa* ~ {rep.kappa_star.mid:.6f}, {rep.classification}")
