import numpy as np
import pytest

from rebit_moments.qmc import (
    MAX_DIGITS, FaureState, faure_point, qmc_integrate, smallest_prime_at_least, star_discrepancy,
)


def test_base_is_the_smallest_prime_not_below_the_dimension():
    assert [smallest_prime_at_least(d) for d in (1, 2, 3, 4, 6, 8, 12)] == [2, 2, 3, 5, 7, 11, 13]
    assert FaureState(6).base == 7
    with pytest.raises(ValueError):
        FaureState(3, base=2)
    with pytest.raises(ValueError):
        FaureState(0)


def test_first_points_in_two_dimensions():
    pts = FaureState(2).take(4)
    assert np.allclose(pts, [[0, 0], [0.5, 0.5], [0.25, 0.75], [0.75, 0.25]])
    assert star_discrepancy(pts) == pytest.approx(0.4375)


def test_iteration_continues_where_take_stopped():
    s = FaureState(3)
    first = s.take(5)
    assert np.allclose(next(s), faure_point(FaureState(3), 5))
    assert first.shape == (5, 3)


@pytest.mark.parametrize("d", [2, 3])
def test_discrepancy_beats_random_points(d):
    s = FaureState(d)
    n = s.base ** 2
    faure = star_discrepancy(s.take(n))
    rnd = np.mean([star_discrepancy(np.random.default_rng(k).random((n, d))) for k in range(5)])
    assert faure < rnd


def test_one_dimensional_coordinate_is_van_der_corput():
    pts = FaureState(1).take(8)[:, 0]
    assert np.allclose(pts, [0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875])


def test_integration_of_a_smooth_function():
    val = qmc_integrate(lambda x: np.prod(x, axis=1), 3, 3 ** 7)
    assert val == pytest.approx(1 / 8, abs=1e-3)
    assert qmc_integrate(lambda x: x[:, 0] ** 2, 2, 4096, -1.0, 1.0) == pytest.approx(4 / 3, abs=5e-3)


def test_index_overflow():
    with pytest.raises(OverflowError):
        faure_point(FaureState(2), 2 ** MAX_DIGITS)
    with pytest.raises(ValueError):
        faure_point(FaureState(2), -1)
