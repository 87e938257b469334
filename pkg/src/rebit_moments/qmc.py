"""Faure low-discrepancy points and a small quasi-Monte Carlo integrator."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb
from typing import Callable

import numpy as np

MAX_DIGITS = 40


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def smallest_prime_at_least(d: int) -> int:
    n = max(2, d)
    while not _is_prime(n):
        n += 1
    return n


@dataclass
class FaureState:
    """Plain (unscrambled) Faure sequence in ``dimension`` coordinates."""

    dimension: int
    base: int = 0
    index: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.base == 0:
            self.base = smallest_prime_at_least(self.dimension)
        if not _is_prime(self.base) or self.base < self.dimension:
            raise ValueError("base must be a prime >= dimension")
        b = self.base
        # generator matrices C_j = P**j mod b, P the upper-triangular Pascal matrix
        self._gen = np.zeros((self.dimension, MAX_DIGITS, MAX_DIGITS), dtype=np.int64)
        for j in range(self.dimension):
            for r in range(MAX_DIGITS):
                for k in range(r, MAX_DIGITS):
                    self._gen[j, r, k] = comb(k, r) * pow(j, k - r, b) % b if (j or k == r) else 0
        self._scale = float(b) ** -(np.arange(MAX_DIGITS) + 1)

    def __iter__(self):
        return self

    def __next__(self) -> np.ndarray:
        pt = faure_point(self, self.index)
        self.index += 1
        return pt

    def take(self, n: int) -> np.ndarray:
        out = faure_points(self, self.index, n)
        self.index += n
        return out


def _digits(n: int, b: int) -> np.ndarray:
    if n < 0:
        raise ValueError("index must be nonnegative")
    out = np.zeros(MAX_DIGITS, dtype=np.int64)
    k = 0
    while n:
        if k == MAX_DIGITS:
            raise OverflowError(f"index needs more than {MAX_DIGITS} base-{b} digits")
        n, out[k] = divmod(n, b)
        k += 1
    return out


def faure_point(state: FaureState, index: int) -> np.ndarray:
    """Point ``index`` of the sequence, in ``[0, 1)**dimension``."""
    a = _digits(index, state.base)
    y = (state._gen @ a) % state.base
    return y @ state._scale


def faure_points(state: FaureState, start: int, n: int) -> np.ndarray:
    return np.array([faure_point(state, i) for i in range(start, start + n)])


def star_discrepancy(points: np.ndarray) -> float:
    """Exact star discrepancy of a small point set by enumerating critical boxes."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = pts.shape
    grids = [np.unique(np.concatenate([pts[:, j], [1.0]])) for j in range(d)]
    worst = 0.0
    for corner in product(*grids):
        c = np.array(corner)
        vol = float(np.prod(c))
        open_count = np.sum(np.all(pts < c, axis=1))
        closed_count = np.sum(np.all(pts <= c, axis=1))
        worst = max(worst, vol - open_count / n, closed_count / n - vol)
    return worst


def qmc_integrate(f: Callable[[np.ndarray], np.ndarray], dimension: int, n: int,
                  lower=0.0, upper=1.0, skip: int = 0) -> float:
    """Average of ``f`` over the box ``[lower, upper]**dimension`` times its volume.

    ``f`` receives an ``(n, dimension)`` array of points.
    """
    state = FaureState(dimension)
    u = faure_points(state, skip, n)
    lo = np.broadcast_to(np.asarray(lower, dtype=float), (dimension,))
    hi = np.broadcast_to(np.asarray(upper, dtype=float), (dimension,))
    x = lo + u * (hi - lo)
    return float(np.mean(f(x)) * np.prod(hi - lo))


def qmc_intermediate(mu: float, m: int = 1, n: int = 50_000, kind: str = "pt-det") -> float:
    """Quasi-Monte Carlo estimate of ``I_m(mu)`` over the partial-correlation cube."""
    from .exact.intermediate import corr_det, minor3_factor, pt_polynomial

    def integrand(x):
        z12, z23, z34, p, q, r = x.T
        z13, z24, z14 = _vector_partials(z12, z23, z34, p, q, r)
        jac = (1 - z12 ** 2) * (1 - z23 ** 2) * (1 - z34 ** 2) * np.sqrt(1 - p ** 2) * np.sqrt(1 - q ** 2)
        if kind == "pt-det":
            val = pt_polynomial(z12, z13, z14, z23, z24, z34, mu)
        elif kind == "product":
            val = corr_det(z12, z13, z14, z23, z24, z34) * pt_polynomial(z12, z13, z14, z23, z24, z34, mu)
        elif kind == "minor3":
            val = minor3_factor(z12, z13, z14, mu)
        else:
            raise ValueError(f"unknown kind {kind!r}")
        return jac * val ** m

    total = qmc_integrate(integrand, 6, n, -1.0, 1.0, skip=1)
    return total * 27 / (32 * np.pi ** 2)


def _vector_partials(z12, z23, z34, p, q, r):
    s12, s23, s34 = np.sqrt(1 - z12 ** 2), np.sqrt(1 - z23 ** 2), np.sqrt(1 - z34 ** 2)
    sp, sq = np.sqrt(1 - p ** 2), np.sqrt(1 - q ** 2)
    z13 = z12 * z23 + s12 * s23 * p
    z24 = z23 * z34 + s23 * s34 * q
    z14 = (z12 * z23 * z34 + s12 * s23 * z34 * p + z12 * s23 * s34 * q
           - s12 * z23 * s34 * p * q + s12 * s34 * sp * sq * r)
    return z13, z24, z14
