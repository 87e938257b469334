"""First stage of the exact moment pipeline: hypercube integration.

The integrands live in twelve variables: ``mu``, the three adjacent
correlations ``z12, z23, z34``, the three partial correlations
``z13_2, z24_3, z14_23`` and a square-root companion ``s_x = sqrt(1 - x**2)``
for each of the six.  Integrating the m-th power of the integrand against the
hypercube jacobian leaves an even polynomial in ``mu``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

from .gammas import wallis_integral
from .polynomial import BITS, FIELD, SparsePoly

log = logging.getLogger(__name__)

CUBE = ("z12", "z23", "z34", "z13_2", "z24_3", "z14_23")
VARIABLES = ("mu",) + CUBE + tuple("s_" + v for v in CUBE)
# s-exponent contributed by the hypercube jacobian, per cube variable
JACOBIAN_S_POWERS = (2, 2, 2, 1, 1, 0)
NORMALIZATION = Fraction(27, 32)  # times pi**-2

KINDS = ("pt-det", "product", "minor3")
MAX_ORDER = {"pt-det": 5, "product": 3, "minor3": 6}


def _symbols():
    return {name: SparsePoly.var(VARIABLES, name) for name in VARIABLES}


def correlation_polys():
    """``(z12, z13, z14, z23, z24, z34)`` written in partial correlations.

    Real sign convention: every ``sqrt(z**2 - 1)`` is replaced by
    ``sqrt(1 - z**2)``; the resulting sign flips are absorbed by reflecting
    the partial correlations, which leaves hypercube integrals unchanged.
    """
    v = _symbols()
    z12, z23, z34 = v["z12"], v["z23"], v["z34"]
    p, q, r = v["z13_2"], v["z24_3"], v["z14_23"]
    s12, s23, s34 = v["s_z12"], v["s_z23"], v["s_z34"]
    sp, sq = v["s_z13_2"], v["s_z24_3"]
    z13 = z12 * z23 + s12 * s23 * p
    z24 = z23 * z34 + s23 * s34 * q
    z14 = (z12 * z23 * z34 + s12 * s23 * z34 * p + z12 * s23 * s34 * q
           - s12 * z23 * s34 * p * q + s12 * s34 * sp * sq * r)
    return z12, z13, z14, z23, z24, z34


def pt_polynomial(z12, z13, z14, z23, z24, z34, mu):
    """Polynomial proportional to det of the partial transpose.

    ``det(rho^PT) = (rho22 rho33)**2 * P``.  Works on floats, Fractions,
    numpy arrays or :class:`SparsePoly` arguments alike.
    """
    V = ((z34 ** 2 - 1) * z12 ** 2 - 2 * (z14 * z23 + z13 * z24) * z34 * z12
         + z14 ** 2 * z23 ** 2 - z24 ** 2 - z34 ** 2)
    W = -2 * z13 * z14 * z23 * z24 + z13 ** 2 * (z24 ** 2 - 1) + 1
    return (-(z14 ** 2) * mu ** 4 + 2 * z14 * (z12 * z13 + z24 * z34) * mu ** 3
            + (V + W) * mu ** 2 + 2 * z23 * (z12 * z24 + z13 * z34) * mu - z23 ** 2)


def corr_det(z12, z13, z14, z23, z24, z34):
    """Determinant of the 4x4 unit-diagonal correlation matrix."""
    return (1 - z12 ** 2 - z13 ** 2 - z14 ** 2 - z23 ** 2 - z24 ** 2 - z34 ** 2
            + z12 ** 2 * z34 ** 2 + z13 ** 2 * z24 ** 2 + z14 ** 2 * z23 ** 2
            + 2 * (z12 * z13 * z23 + z12 * z14 * z24 + z13 * z14 * z34 + z23 * z24 * z34)
            - 2 * (z12 * z13 * z24 * z34 + z12 * z14 * z23 * z34 + z13 * z14 * z23 * z24))


def minor3_factor(z12, z13, z14, mu):
    """Bracket of the 3x3 minor: ``mu^2 z14^2 - 2 mu z12 z13 z14 + z13^2 + z12^2 - 1``."""
    return mu ** 2 * z14 ** 2 - 2 * mu * z12 * z13 * z14 + z13 ** 2 + z12 ** 2 - 1


@lru_cache(maxsize=None)
def integrand(kind: str) -> SparsePoly:
    """The m = 1 integrand of a kind, in partial-correlation variables."""
    mu = SparsePoly.var(VARIABLES, "mu")
    z12, z13, z14, z23, z24, z34 = correlation_polys()
    if kind == "pt-det":
        return pt_polynomial(z12, z13, z14, z23, z24, z34, mu)
    if kind == "product":
        # the vine factorisation of det Z: product of (1 - partial**2) = product of s**2
        s = _symbols()
        detz = SparsePoly.constant(VARIABLES, 1)
        for name in CUBE:
            detz = detz * s["s_" + name] ** 2
        return detz * pt_polynomial(z12, z13, z14, z23, z24, z34, mu)
    if kind == "minor3":
        return minor3_factor(z12, z13, z14, mu)
    raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")


@lru_cache(maxsize=None)
def _wallis_float_free(a: int, b: int) -> Tuple[Fraction, Fraction]:
    w = wallis_integral(a, b)
    return w.rational, w.pi_power


def integrate_cube(poly: SparsePoly) -> Dict[int, Fraction]:
    """Integrate over [-1, 1]^6 against the jacobian; return ``{mu power: coefficient}``.

    The normalisation 27 / (32 pi**2) is applied and the pi bookkeeping is
    checked: every surviving term must carry exactly pi**2 before it.
    """
    zi = [VARIABLES.index(v) for v in CUBE]
    si = [VARIABLES.index("s_" + v) for v in CUBE]
    shifts = [(BITS * a, BITS * b, j) for a, b, j in zip(zi, si, JACOBIAN_S_POWERS)]
    mu_shift = BITS * VARIABLES.index("mu")
    out: Dict[int, Fraction] = {}
    pi_seen = set()
    for key, c in poly.terms.items():
        value = Fraction(c)
        pi = Fraction(0)
        for zs, ss, jac in shifts:
            a = (key >> zs) & FIELD
            if a & 1:
                value = 0
                break
            w, wp = _wallis_float_free(a, ((key >> ss) & FIELD) + jac)
            value *= w
            pi += wp
        if not value:
            continue
        pi_seen.add(pi)
        e = (key >> mu_shift) & FIELD
        out[e] = out.get(e, 0) + value
    if pi_seen and pi_seen != {Fraction(2)}:
        raise ArithmeticError(f"inconsistent pi powers after cube integration: {sorted(pi_seen)}")
    return {e: v * NORMALIZATION for e, v in sorted(out.items()) if v}


@dataclass(frozen=True)
class IntermediateFunction:
    """Even polynomial ``I_m(mu) = sum_i C_i(m) mu**i`` with exact coefficients."""

    m: int
    kind: str
    coefficients: Tuple[Fraction, ...]  # index i -> coefficient of mu**i

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, i: int) -> Fraction:
        return self.coefficients[i] if 0 <= i < len(self.coefficients) else Fraction(0)

    def __call__(self, mu):
        total = 0
        for c in reversed(self.coefficients):
            total = total * mu + c
        return total

    def even_coefficients(self) -> Dict[int, Fraction]:
        return {i: c for i, c in enumerate(self.coefficients) if i % 2 == 0}

    @classmethod
    def from_mapping(cls, m: int, kind: str, coeffs: Dict[int, Fraction]) -> "IntermediateFunction":
        deg = max(coeffs) if coeffs else 0
        return cls(m, kind, tuple(Fraction(coeffs.get(i, 0)) for i in range(deg + 1)))


def expected_degree(m: int, kind: str) -> int:
    return 2 * m if kind == "minor3" else 4 * m


def intermediate_function(m: int, kind: str = "pt-det", allow_large: bool = False) -> IntermediateFunction:
    """Exact ``I_m(mu)`` for ``kind`` in ``{"pt-det", "product", "minor3"}``.

    Orders above ``MAX_ORDER[kind]`` are refused unless ``allow_large`` is set;
    term counts (and memory) grow roughly tenfold per order.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if m < 1 or (m > MAX_ORDER[kind] and not allow_large):
        raise ValueError(f"order m={m} unsupported for {kind} (1..{MAX_ORDER[kind]})")
    return _intermediate_cached(m, kind)


@lru_cache(maxsize=None)
def _intermediate_cached(m: int, kind: str) -> IntermediateFunction:
    power = _power(kind, m)
    coeffs = integrate_cube(power)
    if any(e % 2 for e in coeffs):
        raise ArithmeticError("odd power of mu survived integration")
    deg = expected_degree(m, kind)
    if coeffs and max(coeffs) > deg:
        raise ArithmeticError(f"degree {max(coeffs)} exceeds expected {deg}")
    return IntermediateFunction(m, kind, tuple(Fraction(coeffs.get(i, 0)) for i in range(deg + 1)))


@lru_cache(maxsize=8)
def _power(kind: str, m: int) -> SparsePoly:
    if m == 1:
        return integrand(kind)
    prev = _power(kind, m - 1)
    out = prev * integrand(kind)
    log.debug("%s power %d: %d terms", kind, m, len(out))
    return out
