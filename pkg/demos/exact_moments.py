"""Exact moments of the partial-transpose determinant.

Integrates powers of det(rho^PT) over the flat two-rebit measure in exact
rational arithmetic, then shows how the moments feed the separability
estimates.  Run: python3 demos/exact_moments.py
"""

from rebit_moments import recon
from rebit_moments.exact import intermediate_function, moment
from rebit_moments.exact.moments import coefficient_C

# The intermediate function is an even polynomial in mu = sqrt(rho11 rho44 / (rho22 rho33)).
for m in (1, 2):
    I = intermediate_function(m)
    print(f"I_{m}(mu) coefficients:", [str(c) for c in I.coefficients])

# The same coefficients follow from a closed form in m.
print("C_4(2) from the closed form:", coefficient_C(4, 2))

# Integrating over the diagonal simplex gives the moments themselves.
for m in (1, 2, 3):
    print(f"E[det(rho^PT)^{m}] =", moment(m).value)

# Nine exact moments, mapped onto [0, 1], fix a beta fit and its separable tail.
seq = recon.MomentSequence.from_kind("pt-det", 9)
mapped = recon.affine_map_moments(seq)
fit = recon.beta_fit_two_moments(mapped)
threshold = seq.image_of(0)
print("beta parameters:", [str(p) for p in fit.params])
print(f"separable mass above {threshold}: {fit.tail(threshold):.7f}")
print("Cantelli upper bound:", recon.chebyshev_upper_bound(seq))
