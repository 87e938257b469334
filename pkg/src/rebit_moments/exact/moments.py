"""Second stage: simplex integration, closed-form coefficients and moment tables."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Mapping, Sequence

from .gammas import PiMultiple, gamma_exact, simplex_weight_integral
from .intermediate import IntermediateFunction, intermediate_function

HALF = Fraction(1, 2)
THREE_HALVES = Fraction(3, 2)


@dataclass(frozen=True)
class MomentValue:
    m: int
    kind: str
    value: Fraction

    def __float__(self):
        return float(self.value)


def simplex_exponents(kind: str, m: int, i: int) -> tuple:
    """Dirichlet exponents on (rho11, rho22, rho33, rho44) for the ``mu**i`` term.

    The HS weight in Bloore coordinates contributes 3/2 on every diagonal
    entry; ``mu**i`` adds ``i/2`` to rho11, rho44 and removes it from rho22, rho33.
    """
    h = Fraction(i, 2)
    if kind == "pt-det":
        base = (THREE_HALVES, THREE_HALVES + 2 * m, THREE_HALVES + 2 * m, THREE_HALVES)
    elif kind == "product":
        base = (THREE_HALVES + m, THREE_HALVES + 3 * m, THREE_HALVES + 3 * m, THREE_HALVES + m)
    elif kind == "minor3":
        # prefactor rho11 rho22 rho33
        base = (THREE_HALVES + m, THREE_HALVES + m, THREE_HALVES + m, THREE_HALVES)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return (base[0] + h, base[1] - h, base[2] - h, base[3] + h)


def hs_simplex_normalization() -> PiMultiple:
    """Reciprocal of the Dirichlet(5/2, 5/2, 5/2, 5/2) integral: 1146880 / pi**2."""
    w = simplex_weight_integral([THREE_HALVES] * 4)
    return PiMultiple(1 / w.rational, -w.pi_power)


def assemble_moment_from_coefficients(m: int, kind: str, coeffs: Mapping[int, Fraction]) -> MomentValue:
    norm = hs_simplex_normalization()
    total = Fraction(0)
    for i, c in coeffs.items():
        if not c:
            continue
        w = norm * simplex_weight_integral(simplex_exponents(kind, m, i))
        if w.pi_power != 0:
            raise ArithmeticError(f"pi**{w.pi_power} left over in mu**{i} term")
        total += c * w.rational
    return MomentValue(m, kind, total)


def assemble_moment(I: IntermediateFunction) -> MomentValue:
    """Integrate ``I_m`` over the diagonal simplex; returns the exact raw moment."""
    return assemble_moment_from_coefficients(I.m, I.kind, I.even_coefficients())


def moment(m: int, kind: str = "pt-det", allow_large: bool = False) -> MomentValue:
    return assemble_moment(intermediate_function(m, kind, allow_large=allow_large))


def moment_form_gamma(m: int, coeffs: Mapping[int, Fraction]) -> Fraction:
    """pt-det moment through the explicit gamma-sum form.

    ``zeta_m = 1146880 / (pi**2 Gamma(4m+10)) * sum_i Gamma((i+5)/2)**2 Gamma(2m + 5/2 - i/2)**2 C_i``.
    Independent of :func:`simplex_weight_integral`; used as a cross-check.
    """
    acc = Fraction(0)
    for i, c in coeffs.items():
        g1 = gamma_exact(Fraction(i + 5, 2))
        g2 = gamma_exact(2 * m + Fraction(5, 2) - Fraction(i, 2))
        term = g1 * g1 * g2 * g2
        if term.pi_power != 2:
            raise ArithmeticError("gamma sum should carry pi**2")
        acc += term.rational * c
    return Fraction(1146880) * acc / factorial(4 * m + 9)


def symmetric_completion(m: int, upper: Mapping[int, Fraction]) -> Dict[int, Fraction]:
    """Fill ``C_i = C_{4m-i}`` from coefficients given for ``i >= 2m``."""
    out = {}
    for i, c in upper.items():
        out[i] = Fraction(c)
        out[4 * m - i] = Fraction(c)
    return out


# -- closed forms -----------------------------------------------------------

def det_moment_closed_form(m: int, ensemble: str = "real") -> Fraction:
    """m-th HS moment of det(rho) for two rebits (``real``) or two qubits (``complex``)."""
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    if ensemble == "real":
        return Fraction(945) * Fraction(4) ** (3 - 2 * m) * factorial(2 * m + 1) * factorial(2 * m + 3) \
            / factorial(4 * m + 9)
    if ensemble == "complex":
        return Fraction(108972864000 * factorial(m) * factorial(m + 1) * factorial(m + 2) * factorial(m + 3),
                        factorial(4 * m + 15))
    raise ValueError("ensemble must be 'real' or 'complex'")


def pochhammer_denominator(i: int, m) -> Fraction:
    """``prod_{k=-2,0,...,i} (m + (1 - k)/2)``, the denominator of ``C_i(m)``."""
    m = Fraction(m)
    out = Fraction(1)
    for k in range(-2, i + 1, 2):
        out *= m + Fraction(1 - k, 2)
    return out


def coefficient_numerator(i: int, m) -> Fraction:
    """Numerator of ``C_i(m)`` without the ``(-1)**m`` sign, as a polynomial in any rational m."""
    m = Fraction(m)
    if i == 0:
        return Fraction(3, 4)
    if i == 2:
        return 3 * m * (2 * m * (4 * m - 5) - 15) / 100
    if i == 4:
        return 3 * m * (2 * m * (2 * m * (2 * m * (8 * m * (6 * m - 7) + 155) - 13) - 1017) - 315) / 19600
    if i == 6:
        return (m - 1) * m * (4 * m * (2 * m * (2 * m * (m * (4 * m * (20 * m * (4 * m - 11) + 173) - 4303)
                                                         + 4733) + 14911) - 9165) - 4725) / 529200
    raise ValueError("closed forms exist only for i in {0, 2, 4, 6}")


def coefficient_C(i: int, m: int) -> Fraction:
    """Closed form of the ``mu**i`` (and ``mu**(4m-i)``) coefficient of the pt-det ``I_m``."""
    if i not in (0, 2, 4, 6):
        raise ValueError("closed forms exist only for i in {0, 2, 4, 6}")
    m = Fraction(m)
    if m.denominator != 1:
        if pochhammer_denominator(i, m) == 0:
            raise ZeroDivisionError(f"C_{i} has a pole at m = {m}")
        raise ValueError("m must be an integer order")
    if m < 1:
        raise ValueError("m must be >= 1")
    sign = -1 if int(m) % 2 else 1
    return sign * coefficient_numerator(i, m) / pochhammer_denominator(i, m)


# -- verbatim tables ------------------------------------------------------------

GOLDEN_PT_MOMENTS = (
    Fraction(-1, 858),
    Fraction(27, 2489344),
    Fraction(-8363, 66216550400),
    Fraction(21859, 10443295948800),
    Fraction(-23071, 539633583390720),
    Fraction(3317321, 3253917653076541440),
    Fraction(-419856257, 15366774022001834065920),
    Fraction(16945249, 21117403549591928832000),
    Fraction(-6102620963, 240565904621616585139814400),
)

# coefficients C_i(m) for i >= 2m (the rest follow by symmetry)
TABULATED_UPPER_COEFFICIENTS: Dict[int, Dict[int, Fraction]] = {
    4: {16: Fraction(1, 33), 14: Fraction(584, 5775), 12: Fraction(278884, 282975),
        10: Fraction(8984, 4851), 8: Fraction(65788454, 20543985)},
    5: {20: Fraction(-3, 143), 18: Fraction(-18, 143), 16: Fraction(-70881, 49049),
        14: Fraction(-2178728, 441441), 12: Fraction(-59472398, 4855851),
        10: Fraction(-4103383444, 273546273)},
    6: {24: Fraction(1, 65), 22: Fraction(2556, 17875), 20: Fraction(5454, 2695),
        18: Fraction(3359372, 315315), 16: Fraction(3273117, 86515),
        14: Fraction(597414184, 7872865), 12: Fraction(173821048732, 1771394625)},
    7: {28: Fraction(-1, 85), 26: Fraction(-4298, 27625), 24: Fraction(-826637, 303875),
        22: Fraction(-165865636, 8204625), 20: Fraction(-71226035, 722007),
        18: Fraction(-1947049760374, 6711055065), 16: Fraction(-93373201818911, 167776376625),
        14: Fraction(-33225665966177656, 48487372844625)},
    8: {32: Fraction(3, 323), 30: Fraction(6672, 40375), 28: Fraction(12986136, 3674125),
        26: Fraction(4250871568, 121246125), 24: Fraction(3319251741068, 14670781125),
        22: Fraction(755365923834768, 826454003375), 20: Fraction(2024301386770232, 826454003375),
        18: Fraction(61510285844520752, 14049718057375),
        16: Fraction(3853435310162220966, 724564031244625)},
    9: {36: Fraction(-1, 133), 34: Fraction(-9774, 56525), 32: Fraction(-651051, 145775),
        30: Fraction(-8355664, 146965), 28: Fraction(-18384996780, 39122083),
        26: Fraction(-4848288282648, 1944597655), 24: Fraction(-133915228926036, 15026436425),
        22: Fraction(-61222919937476688, 2809943611475),
        20: Fraction(-396008663496240078, 10677785723605),
        18: Fraction(-2103161056387491292, 47564681859695)},
}

PRODUCT_MOMENT_RATIOS = (Fraction(0), Fraction(77, 54), Fraction(24, 55), Fraction(209, 175),
                         Fraction(598, 833), Fraction(3929, 3724))
MINOR3_MOMENTS = (Fraction(-1, 264), Fraction(7, 74880), Fraction(0))


def golden_moment_table() -> List[MomentValue]:
    """Tabulated exact raw moments of det(rho^PT), orders 1..9."""
    return [MomentValue(m, "pt-det", v) for m, v in enumerate(GOLDEN_PT_MOMENTS, start=1)]


def tabulated_intermediate(m: int) -> IntermediateFunction:
    """Full pt-det ``I_m`` for 4 <= m <= 9 rebuilt from the tabulated upper half."""
    if m not in TABULATED_UPPER_COEFFICIENTS:
        raise KeyError(f"no tabulated coefficients for m={m}")
    coeffs = symmetric_completion(m, TABULATED_UPPER_COEFFICIENTS[m])
    return IntermediateFunction.from_mapping(m, "pt-det", coeffs)


def pt_moments(K: int, allow_large: bool = False) -> List[Fraction]:
    """Exact ``zeta_1..zeta_K`` of det(rho^PT): engine where supported, table beyond."""
    if K > len(GOLDEN_PT_MOMENTS):
        raise ValueError(f"only {len(GOLDEN_PT_MOMENTS)} exact moments are available")
    out = []
    for m in range(1, K + 1):
        if m <= 3 or allow_large:
            out.append(moment(m, "pt-det", allow_large=allow_large).value)
        else:
            out.append(GOLDEN_PT_MOMENTS[m - 1])
    return out


def product_moment_ratio(m: int, exact: bool = True) -> Fraction:
    """``zeta_m(product) / E[det(rho)**(2m)]``.

    Computed from the engine for m <= 2 (``exact``), otherwise from the
    tabulated ratio table (m <= 6).
    """
    if exact and m <= 2:
        return moment(m, "product").value / det_moment_closed_form(2 * m, "real")
    if 1 <= m <= len(PRODUCT_MOMENT_RATIOS):
        return PRODUCT_MOMENT_RATIOS[m - 1]
    raise ValueError(f"product moment of order {m} unavailable")


def product_moment(m: int) -> Fraction:
    """Product moments: engine for m <= 2, ratio table times closed form up to m = 6."""
    if m <= 2:
        return moment(m, "product").value
    return product_moment_ratio(m, exact=False) * det_moment_closed_form(2 * m, "real")


def minor3_moments(K: int) -> List[Fraction]:
    return [moment(m, "minor3").value for m in range(1, K + 1)]


def raw_moment_sequence(kind: str, K: int) -> List[Fraction]:
    """``[1, zeta_1, ..., zeta_K]`` for a kind."""
    if kind == "pt-det":
        seq = pt_moments(K)
    elif kind == "product":
        seq = [product_moment(m) for m in range(1, K + 1)]
    elif kind == "minor3":
        seq = minor3_moments(K)
    elif kind == "det":
        seq = [det_moment_closed_form(m) for m in range(1, K + 1)]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return [Fraction(1)] + list(seq)


def finite_difference_vanishes(values: Sequence[Fraction], order: int) -> bool:
    """True when the ``order``-th forward differences of an equispaced sample are all zero."""
    vals = list(values)
    for _ in range(order):
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return bool(vals) and all(v == 0 for v in vals)


def denominators_match_pochhammer(i: int, orders: Sequence[int] = tuple(range(1, 40))) -> bool:
    """True when ``(-1)**m C_i(m) * pochhammer(i, m)`` is a polynomial of degree ``3i/2`` in m.

    Checked on exact values at consecutive integer orders, with no recourse to
    the closed-form numerator.
    """
    vals = [(-1) ** m * coefficient_C(i, m) * pochhammer_denominator(i, m) for m in orders]
    return finite_difference_vanishes(vals, 3 * i // 2 + 1) and not finite_difference_vanishes(vals, 3 * i // 2)
