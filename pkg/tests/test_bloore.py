import math

import numpy as np
import pytest
from scipy import integrate

from rebit_moments import DensityMatrix, InvalidStateError, determinant, partial_transpose
from rebit_moments.bloore import (
    BlooreCoords, correlations_to_partials, corr_det_polynomial, from_bloore, jacobian_weight,
    minor3_polynomial, partials_to_correlations, pt_determinant, to_bloore,
)
from rebit_moments.density import principal_minor
from rebit_moments.sampling import hs_complex_batch, hs_real_batch


def test_round_trip(rng):
    for a in hs_real_batch(rng, 50):
        c = to_bloore(DensityMatrix(a))
        assert np.allclose(from_bloore(c).entries, a, atol=1e-14)
        assert c.nu == pytest.approx(c.mu ** 2)
        assert c.xi == pytest.approx(math.log(c.mu))


def test_partials_invert(rng):
    for p, q, r, z12, z23, z34 in rng.uniform(-0.95, 0.95, (200, 6)):
        z13, z24, z14 = partials_to_correlations(z12, z23, z34, p, q, r)
        assert np.allclose(correlations_to_partials(z12, z13, z14, z23, z24, z34), (p, q, r))


def test_vine_factorisation_of_the_correlation_determinant(rng):
    for p, q, r, z12, z23, z34 in rng.uniform(-1, 1, (200, 6)):
        c = BlooreCoords.from_partials((0.25,) * 4, z12, z23, z34, p, q, r)
        expected = (1 - z12 ** 2) * (1 - z23 ** 2) * (1 - z34 ** 2) * (1 - p ** 2) * (1 - q ** 2) * (1 - r ** 2)
        assert corr_det_polynomial(c) == pytest.approx(expected, abs=1e-12)


def test_jacobian_integrates_to_the_correlation_volume(rng):
    # the weight factorises, so each one-dimensional slice is checked by quadrature
    def one(i, t):
        return jacobian_weight(*[t if j == i else 0.0 for j in range(5)])
    slices = [integrate.quad(lambda t: one(i, t), -1, 1)[0] for i in range(5)]
    assert slices == pytest.approx([4 / 3] * 3 + [math.pi / 2] * 2, rel=1e-9)
    x = rng.uniform(-1, 1, 5)
    assert jacobian_weight(*x) == pytest.approx(np.prod([one(i, x[i]) for i in range(5)]))


def test_polynomials_reproduce_determinants(rng):
    for a in hs_real_batch(rng, 50):
        rho = DensityMatrix(a)
        c = to_bloore(rho)
        assert pt_determinant(c) == pytest.approx(determinant(partial_transpose(rho)), rel=1e-9, abs=1e-18)
        assert np.prod(c.diagonal) * corr_det_polynomial(c) == pytest.approx(determinant(rho), rel=1e-9)
        assert minor3_polynomial(c) == pytest.approx(-principal_minor(partial_transpose(rho), [1, 2, 3]),
                                                     rel=1e-9, abs=1e-18)


def test_singular_and_complex_inputs_are_rejected(rng):
    with pytest.raises(InvalidStateError):
        to_bloore(DensityMatrix(np.diag([0.5, 0.5, 0.0, 0.0])))
    with pytest.raises(InvalidStateError):
        to_bloore(DensityMatrix(hs_complex_batch(rng, 1)[0], "complex-15d"))
