"""Seeded Monte Carlo estimates for several random-state ensembles.

Each estimate is a deterministic function of (scenario, measure, seed,
sample count); the thread count only changes the wall time.
Run: python3 demos/monte_carlo.py
"""

from rebit_moments.sampling import SamplerConfig, estimate_many

cases = [
    ("real-9d", "HS", 1 / 2288, -1 / 858),
    ("complex-15d", "HS", 1 / 3876, -7 / 3876),
    ("real-9d", "Bures", 1 / 8192, -0.0030959720),
]
for scenario, measure, det_ref, pt_ref in cases:
    reps = estimate_many(SamplerConfig(scenario, measure, seed=7, sample_count=200_000), ["det", "detPT"])
    for name, ref in (("det", det_ref), ("detPT", pt_ref)):
        r = reps[name]
        print(f"{scenario:12s} {measure:5s} {name:5s} {r.mean:+.4e} +- {r.standard_error:.1e}"
              f"  reference {ref:+.4e}  z={r.z_score(ref):+.2f}")
