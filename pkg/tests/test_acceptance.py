"""Acceptance criteria, one printed PASS/FAIL line each.

Reference values and tolerances are pinned here, independently of the
package's own verification table. Monte Carlo rows use seed 7 and 1e6
samples (1e7 where a nonzero mean has to be resolved); a row passes when
the estimate is within 3 standard errors.
"""

import math
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from rebit_moments import density as dm
from rebit_moments import recon
from rebit_moments.bloore import from_bloore, to_bloore
from rebit_moments.exact import moments as mom
from rebit_moments.exact.intermediate import intermediate_function
from rebit_moments.sampling import SamplerConfig, estimate_many, hs_real_batch, ppt_probability

SEED = 7
N = 1_000_000
N_BIG = 10_000_000
R3 = math.sqrt(3)


def show(x):
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {show(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(show(v) for v in x) + "]"
    return str(x)


def check(key, description, passed, computed, expected):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {key:<5} {description}: "
                            f"computed {show(computed)} | expected {show(expected)}")
    assert passed, f"{key} {description}: computed {computed}, expected {expected}"


def check_exact(key, description, computed, expected):
    check(key, description, computed == expected, computed, expected)


def check_close(key, description, computed, expected, tol):
    check(key, description, abs(computed - expected) <= tol, f"{computed:.10g}", f"{expected:.10g} +- {tol:g}")


def nonzero_coeffs(coeffs):
    return {i: F(c) for i, c in enumerate(coeffs) if c}


# ---------------------------------------------------------------- exact tier

PT_I = {
    1: {0: F(-1, 5), 2: F(34, 125), 4: F(-1, 5)},
    2: {0: F(3, 35), 2: F(-12, 875), 4: F(20898, 42875), 6: F(-12, 875), 8: F(3, 35)},
    3: {0: F(-1, 21), 2: F(-54, 875), 4: F(-27873, 42875), 6: F(-466876, 1157625),
        8: F(-27873, 42875), 10: F(-54, 875), 12: F(-1, 21)},
}
PRODUCT_I = {
    1: {0: F(-24, 875), 2: F(3888, 42875), 4: F(-24, 875)},
    2: {0: F(192, 94325), 2: F(-12032, 1528065), 4: F(5561984, 184895865), 6: F(-12032, 1528065),
        8: F(192, 94325)},
}
MINOR3_I = {
    1: {0: F(-3, 5), 2: F(1, 5)},
    2: {0: F(79, 175), 2: F(-26, 125), 4: F(3, 35)},
    3: {0: F(-187, 525), 2: F(9, 35), 4: F(-99, 875), 6: F(1, 21)},
}
GOLDEN = (F(-1, 858), F(27, 2489344), F(-8363, 66216550400))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_1_pt_intermediate(m):
    check_exact(f"1.pt{m}", f"I_{m} pt-det coefficients", nonzero_coeffs(intermediate_function(m).coefficients), PT_I[m])


@pytest.mark.parametrize("m", [1, 2])
def test_1_product_intermediate(m):
    got = nonzero_coeffs(intermediate_function(m, "product").coefficients)
    check_exact(f"1.pr{m}", f"I_{m} product coefficients", got, PRODUCT_I[m])


@pytest.mark.parametrize("m", [1, 2, 3])
def test_1_minor3_intermediate(m):
    got = nonzero_coeffs(intermediate_function(m, "minor3").coefficients)
    check_exact(f"1.mi{m}", f"I_{m} 3x3 minor coefficients", got, MINOR3_I[m])


def test_2_pt_moments_from_the_engine():
    check_exact("2.a", "pt-det moments 1..3", tuple(mom.moment(m).value for m in (1, 2, 3)), GOLDEN)


def test_2_golden_moments_consistent_with_the_gamma_sum():
    bad = []
    for m in range(4, 10):
        I = mom.tabulated_intermediate(m)
        golden = mom.GOLDEN_PT_MOMENTS[m - 1]
        if mom.moment_form_gamma(m, I.even_coefficients()) != golden or mom.assemble_moment(I).value != golden:
            bad.append(m)
    check_exact("2.b", "moments 4..9 rebuilt from intermediate coefficients", bad, [])


def test_2_fourth_intermediate_from_the_engine():
    I = intermediate_function(4, allow_large=True)
    upper = mom.TABULATED_UPPER_COEFFICIENTS[4]
    check_exact("2.c", "engine I_4 against tabulated coefficients", {i: I.coefficient(i) for i in upper}, dict(upper))


def test_3_product_moments():
    got = (mom.moment(1, "product").value, mom.moment(2, "product").value,
           mom.product_moment_ratio(1), mom.product_moment_ratio(2))
    check_exact("3", "product moments and ratios", got, (0, F(7, 5696343244800), 0, F(77, 54)))


def test_4_minor3_moments():
    got = tuple(mom.moment(m, "minor3").value for m in (1, 2, 3))
    check_exact("4", "3x3 minor moments", got, (F(-1, 264), F(7, 74880), 0))


def test_5_coefficient_closed_forms():
    bad = [(i, m) for m in (1, 2, 3) for i in (0, 2, 4, 6)
           if i <= 4 * m and mom.coefficient_C(i, m) != intermediate_function(m).coefficient(i)]
    check_exact("5.a", "closed-form C_i(m) against the engine", bad, [])
    check_exact("5.b", "Pochhammer denominators", [mom.denominators_match_pochhammer(i) for i in (0, 2, 4, 6)],
                [True] * 4)


def test_6_det_closed_forms():
    got = (mom.det_moment_closed_form(1), mom.det_moment_closed_form(2), mom.det_moment_closed_form(1, "complex"))
    check_exact("6", "det moment closed forms", got, (F(1, 2288), F(1, 2489344), F(1, 3876)))


def _seq(kind):
    return recon.MomentSequence.from_kind(kind, 9 if kind == "pt-det" else 2)


def _beta(kind):
    return recon.beta_fit_two_moments(recon.affine_map_moments(_seq(kind)))


def test_7_beta_fits_and_chebyshev():
    check_exact("7.a", "beta fit pt-det", _beta("pt-det").params, (F(15171156, 516749), F(5018013, 2066996)))
    check_exact("7.b", "beta fit product", _beta("product").params, (F(2392921, 57792), F(21536289, 308224)))
    seq = _seq("pt-det")
    check_exact("7.c", "Chebyshev bound and variance", (recon.chebyshev_upper_bound(seq), seq.variance),
                (F(30397, 34749), F(30397, 3203785728)))


def test_8_tail_probabilities():
    check_close("8.a", "beta tail pt-det", recon.tail_probability(_beta("pt-det"), F(16, 17)), 0.4183149, 1e-6)
    check_close("8.b", "beta tail product", recon.tail_probability(_beta("product"), F(16, 43)), 0.49331935, 1e-6)
    ln = recon.FitResult("libby-novick", (3.7141606, 359.577737, 0.00064805))
    check_close("8.c", "Libby-Novick tail, reference parameters", recon.tail_probability(ln, F(16, 17)), 0.429121, 1e-4)
    poly = recon.naive_polynomial_density(recon.MomentSequence.from_kind("pt-det", 9))
    check_close("8.d", "degree-9 polynomial separable mass", poly.separability_estimate, 0.39648, 5e-4)


def test_9_summary_statistics():
    s = recon.summary_stats(_seq("pt-det"), recon.MomentSequence.from_kind("det", 2), 0)
    check_close("9.a", "skewness", s["skewness"], -3.13228, 1e-4)
    check_close("9.b", "kurtosis (raw)", s["kurtosis_raw"], 17.6316, 1e-3)
    check_close("9.c", "det / det-PT correlation", s["correlation"], 0.360291, 1e-5)
    check_close("9.d", "mode interval lower", s["mode_interval"][0], -0.00650062, 1e-7)
    check_close("9.e", "mode interval upper", s["mode_interval"][1], 0.00416962, 1e-7)


def test_10_extremal_state():
    rho = dm.extremal_product_state()
    pt = dm.partial_transpose(rho)
    got = [dm.determinant(rho), dm.determinant(pt), dm.determinant(rho) * dm.determinant(pt), dm.purity(rho)[0],
           *dm.eigenvalues_sym4(rho).eigenvalues, *dm.eigenvalues_sym4(pt).eigenvalues]
    want = [(2 * R3 - 3) / 576, -(3 + 2 * R3) / 576, -1 / 110592, 0.5,
            (1 + R3) / 4, *[(3 - R3) / 12] * 3, *[(3 + R3) / 12] * 3, (1 - R3) / 4]
    err = max(abs(a - b) for a, b in zip(got, want))
    check("10", "extremal state values and spectra", err <= 1e-12, f"max error {err:.2e}", "<= 1e-12")


# -------------------------------------------------------------- property tier

@pytest.fixture(scope="module")
def states():
    return hs_real_batch(np.random.default_rng(SEED), 100_000)


def test_property_involution_and_cauchy_binet(states):
    check_exact("P.1", "partial transpose is an involution", bool(np.array_equal(dm.pt_array(dm.pt_array(states)), states)), True)
    b = dm.pt_array(states)
    err = float(np.max(np.abs(dm.det4(states) * dm.det4(b) - np.linalg.det(states @ b))))
    check("P.2", "Cauchy-Binet", err <= 1e-12, f"{err:.2e}", "<= 1e-12")


def test_property_bloore_round_trip(states):
    err = max(float(np.max(np.abs(from_bloore(to_bloore(dm.DensityMatrix(a))).entries - a))) for a in states[:500])
    check("P.3", "Bloore round trip", err <= 1e-12, f"{err:.2e}", "<= 1e-12")


def test_property_value_ranges(states):
    d, dp = dm.det4(states), dm.det4(dm.pt_array(states))
    p = d * dp
    ok = (d.min() >= -1e-15 and d.max() <= 1 / 256 and dp.min() >= -1 / 16 and dp.max() <= 1 / 256
          and p.min() >= -1 / 110592 and p.max() <= 1 / 65536)
    check("P.4", "values inside their ranges", bool(ok),
          f"det [{d.min():.2e}, {d.max():.2e}] detPT [{dp.min():.2e}, {dp.max():.2e}]", "inside the ranges")


def test_property_hankel():
    check_exact("P.5", "mapped moments satisfy the Hausdorff conditions",
                recon.affine_map_moments(_seq("pt-det")).hankel_psd(), True)


def test_property_mnatsakanov_uniform_oracle():
    u = recon.MomentSequence.uniform(20)
    grid = [F(i, 400) for i in range(401)]
    errs = [max(abs(float(recon.mnatsakanov_cdf(u, x, K)) - float(x)) for x in grid) for K in (5, 10, 20)]
    check("P.6", "Mnatsakanov converges on the uniform oracle", errs[0] > errs[1] > errs[2] and errs[2] <= 1 / 21,
          ", ".join(f"{e:.4f}" for e in errs), "decreasing, last <= 1/21")


def test_property_provost_ha_baseline_exactness():
    lam = recon.provost_ha_density(recon.affine_map_moments(_seq("pt-det")), _beta("pt-det"), 2).lambdas
    check("P.7", "Provost-Ha lambda_1 = lambda_2 = 0", abs(lam[1]) < 1e-30 and abs(lam[2]) < 1e-30,
          f"{lam[1]:.1e}, {lam[2]:.1e}", "0, 0")


def test_property_beta_moment_ratio_window():
    g = _beta("pt-det").goodness[2:8]
    check("P.8", "beta fit moment ratios m = 3..8 in (0.99, 1)", all(0.99 < x < 1 for x in g),
          ", ".join(f"{x:.4f}" for x in g), "(0.99, 1)")


def test_property_mnatsakanov_not_below_provost_ha():
    mapped = recon.affine_map_moments(_seq("pt-det"))
    t = _seq("pt-det").image_of(0)
    pairs = [(recon.mnatsakanov_estimate(mapped, t, k),
              recon.provost_ha_density(mapped, _beta("pt-det"), k, threshold=t).estimate) for k in range(3, 10)]
    check("P.9", "Mnatsakanov >= Provost-Ha at equal K", all(a >= b for a, b in pairs),
          ", ".join(f"{a:.3f}/{b:.3f}" for a, b in pairs), "first >= second")


# ---------------------------------------------------------- statistical tier

FUNCS = ["det", "detPT", "product", "commutator_det", "rank3_product", "rank3_product_detPT"]
_cache = {}


def estimates(scenario, measure, n=N):
    key = (scenario, measure, n)
    if key not in _cache:
        _cache[key] = estimate_many(SamplerConfig(scenario, measure, SEED, n, 1), FUNCS, 2)
    return _cache[key]


def check_mc(key, description, rep, expected, order=1, nonzero=False):
    mean, se = rep.raw_moments[order - 1], rep.moment_standard_errors[order - 1]
    z = (mean - expected) / se
    passed = abs(z) <= 3 and (not nonzero or abs(mean) > 3 * se)
    check(key, description, passed, f"{mean:.6g} +- {se:.2g} (z={z:+.2f})", f"{expected:.7g}")


COMMUTATOR_REASON = ("for real rho the commutator [rho, rho^PT] is skew-symmetric, so its determinant is a "
                     "squared Pfaffian and its mean is strictly positive")
REAL8D_REASON = ("on the flat measure with rho34 = 0 the det mean is exactly 1/1980 (Dirichlet diagonal times "
                 "the vine-factorised correlation determinant); the reference 1/4752 is not reproducible")
MIXED10D_REASON = ("reference values are numerical estimates that an independent literal box-rejection "
                   "sampler does not reproduce at 3 standard errors")

MC_ROWS = [
    ("11.a", "HS real det mean", "real-9d", "HS", "det", 1 / 2288, {}, None),
    ("11.b", "HS real det-PT mean", "real-9d", "HS", "detPT", -1 / 858, {}, None),
    ("11.c", "HS real product mean", "real-9d", "HS", "product", 0.0, {}, None),
    ("11.d", "HS real commutator det mean", "real-9d", "HS", "commutator_det", 0.0, {}, COMMUTATOR_REASON),
    ("11.e", "HS real product second moment", "real-9d", "HS", "product", 7 / 5696343244800, {"order": 2}, None),
    ("12.a", "Bures real det mean", "real-9d", "Bures", "det", 1 / 8192, {}, None),
    ("12.b", "Bures real det-PT mean", "real-9d", "Bures", "detPT", -0.0030959720, {}, None),
    ("12.c", "Bures real product mean at 1e7", "real-9d", "Bures", "product", -1.124478e-7,
     {"n": N_BIG, "nonzero": True}, None),
    ("13.a", "boundary eigenvalue-product mean", "boundary-rank3", "boundary", "rank3_product", 1 / 66, {}, None),
    ("13.b", "boundary det-PT mean", "boundary-rank3", "boundary", "detPT", -5 / 2376, {}, None),
    ("13.c", "boundary product mean", "boundary-rank3", "boundary", "rank3_product_detPT", -1 / 47520, {}, None),
    ("14.a", "real-8d det mean", "real-8d-rho34=0", "flat-rejection", "det", 1 / 4752, {}, REAL8D_REASON),
    ("14.b", "real-8d det-PT mean", "real-8d-rho34=0", "flat-rejection", "detPT", -13 / 9504, {}, REAL8D_REASON),
    ("14.c", "mixed-10d det mean", "mixed-10d-rho34-complex", "flat-rejection", "det", 0.000412154, {}, MIXED10D_REASON),
    ("14.d", "mixed-10d det-PT mean", "mixed-10d-rho34-complex", "flat-rejection", "detPT", -0.00082468, {},
     MIXED10D_REASON),
    ("15.a", "complex det mean", "complex-15d", "HS", "det", 1 / 3876, {}, None),
    ("15.b", "complex det-PT mean", "complex-15d", "HS", "detPT", -7 / 3876, {}, None),
    ("15.c", "complex product mean at 1e7", "complex-15d", "HS", "product", -1 / 4576264,
     {"n": N_BIG, "nonzero": True}, None),
]


def _mc_param(row):
    marks = [pytest.mark.slow]
    if row[-1]:
        marks.append(pytest.mark.xfail(strict=True, reason=row[-1]))
    return pytest.param(*row[:-1], marks=marks, id=row[0])


@pytest.mark.parametrize("key,description,scenario,measure,func,expected,opts", [_mc_param(r) for r in MC_ROWS])
def test_statistical(key, description, scenario, measure, func, expected, opts):
    rep = estimates(scenario, measure, opts.get("n", N))[func]
    check_mc(key, description, rep, expected, opts.get("order", 1), opts.get("nonzero", False))


@pytest.mark.slow
def test_13_ppt_ratio():
    full = ppt_probability(SamplerConfig("real-9d", "HS", SEED, N, 1))
    edge = ppt_probability(SamplerConfig("boundary-rank3", "boundary", SEED, N, 1))
    ratio = full[0] / edge[0]
    se = ratio * math.hypot(full[1] / full[0], edge[1] / edge[0])
    z = (ratio - 2) / se
    check("13.d", "PPT probability ratio full / boundary", abs(z) <= 3, f"{ratio:.5f} +- {se:.2g} (z={z:+.2f})", "2")
