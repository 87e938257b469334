"""Exact gamma-function bookkeeping for integer and half-integer arguments.

Every value handled here has the form ``q * pi**k`` with ``q`` rational and
``k`` a multiple of 1/2; :class:`PiMultiple` carries that pair.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import NamedTuple, Sequence


class PiMultiple(NamedTuple):
    """``rational * pi**pi_power``."""

    rational: Fraction
    pi_power: Fraction

    def __mul__(self, other):
        if isinstance(other, PiMultiple):
            return PiMultiple(self.rational * other.rational, self.pi_power + other.pi_power)
        return PiMultiple(self.rational * other, self.pi_power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PiMultiple):
            return PiMultiple(self.rational / other.rational, self.pi_power - other.pi_power)
        return PiMultiple(self.rational / other, self.pi_power)

    def __float__(self):
        import math
        return float(self.rational) * math.pi ** float(self.pi_power)

    def as_rational(self) -> Fraction:
        if self.pi_power != 0 and self.rational != 0:
            raise ValueError(f"value still carries pi**{self.pi_power}")
        return self.rational


@lru_cache(maxsize=None)
def gamma_half(twice_x: int) -> PiMultiple:
    """Exact ``Gamma(twice_x / 2)`` for a positive integer ``twice_x``."""
    if twice_x <= 0:
        raise ValueError("gamma argument must be positive")
    if twice_x % 2 == 0:
        return PiMultiple(Fraction(factorial(twice_x // 2 - 1)), Fraction(0))
    n = (twice_x - 1) // 2  # Gamma(n + 1/2) = (2n)! / (4^n n!) sqrt(pi)
    return PiMultiple(Fraction(factorial(2 * n), 4 ** n * factorial(n)), Fraction(1, 2))


def gamma_exact(x) -> PiMultiple:
    x = Fraction(x)
    if (2 * x).denominator != 1:
        raise ValueError(f"{x} is not an integer or half-integer")
    return gamma_half(int(2 * x))


@lru_cache(maxsize=None)
def wallis_integral(a: int, b: int) -> PiMultiple:
    """``int_{-1}^{1} z**a (1 - z**2)**(b/2) dz``.

    Zero for odd ``a``; otherwise ``Beta((a+1)/2, (b+2)/2)``.  The result is
    rational for even ``b`` and a rational multiple of pi for odd ``b``.
    """
    if a < 0 or b < 0:
        raise ValueError("exponents must be nonnegative")
    if a % 2:
        return PiMultiple(Fraction(0), Fraction(0))
    num = gamma_half(a + 1) * gamma_half(b + 2)
    return num / gamma_half(a + b + 3)


def simplex_weight_integral(exponents: Sequence) -> PiMultiple:
    """Dirichlet integral of ``prod x_i**e_i`` over the unit simplex in R^n, n = len - 1.

    Exponents may be integers or half-integers greater than -1.
    """
    exps = [Fraction(e) for e in exponents]
    if any(e <= -1 for e in exps):
        raise ValueError("Dirichlet exponents must exceed -1")
    result = PiMultiple(Fraction(1), Fraction(0))
    for e in exps:
        result = result * gamma_exact(e + 1)
    return result / gamma_exact(sum(exps) + len(exps))
