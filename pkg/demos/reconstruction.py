"""Separability estimates from finitely many moments.

Compares the Mnatsakanov binomial-sum estimator, a Provost-Ha correction of
the beta fit and an exact degree-9 polynomial density.
Run: python3 demos/reconstruction.py
"""

from rebit_moments import recon

seq = recon.MomentSequence.from_kind("pt-det", 9)
mapped = recon.affine_map_moments(seq)
t = seq.image_of(0)
beta = recon.beta_fit_two_moments(mapped)

print(" K  Mnatsakanov  Provost-Ha")
for k in range(1, 10):
    mn = recon.mnatsakanov_estimate(mapped, t, k)
    ph = recon.provost_ha_density(mapped, beta, k, threshold=t).estimate
    print(f"{k:2d}  {mn:11.4f}  {ph:10.4f}")

poly = recon.naive_polynomial_density(seq)
y, p = recon.density_grid(poly.pdf, seq.lo, seq.hi)
print(f"degree-9 polynomial: separable mass {poly.separability_estimate:.5f}, minimum density {p.min():.1f}")

# the Libby-Novick family cannot match three moments exactly here
ln = recon.libby_novick_fit(mapped)
print("Libby-Novick best fit:", [f"{x:.4g}" for x in ln.params], "converged:", ln.converged,
      f"tail {ln.tail(t):.5f}")
