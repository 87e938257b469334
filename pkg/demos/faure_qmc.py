"""Faure points against pseudo-random points, and a QMC check of I_1.

Run: python3 demos/faure_qmc.py
"""

from fractions import Fraction

import numpy as np

from rebit_moments.exact import intermediate_function
from rebit_moments.qmc import FaureState, qmc_intermediate, star_discrepancy

# with very few points a lucky random draw can win, so compare against the average of 20 draws
for d, n in ((2, 4), (2, 16), (3, 9), (3, 27)):
    rnd = np.mean([star_discrepancy(np.random.default_rng(k).random((n, d))) for k in range(20)])
    print(f"d={d}, {n:2d} points: Faure discrepancy {star_discrepancy(FaureState(d).take(n)):.4f}, random {rnd:.4f}")

exact = intermediate_function(1)
for mu in (0.5, 1.0, 2.0):
    print(f"I_1({mu}) exact {float(exact(Fraction(mu))):+.5f}  QMC {qmc_intermediate(mu, 1, 20_000):+.5f}")
