"""Sparse multivariate polynomials with exact integer/rational coefficients.

Monomials are packed into a single Python ``int`` (one 8-bit field per
variable) so that multiplying two monomials is a single integer addition.
That keeps the hot loop of ``P**m`` expansions cheap enough to reach the
third and fourth powers of the seven-variable determinant polynomial.

The variable set is fixed at construction.  Variables named ``s_<x>`` are
treated as square-root companions of ``<x>``, i.e. ``s_x**2 == 1 - x**2``;
:meth:`SparsePoly.normalize` applies that rewrite.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Sequence, Tuple

BITS = 8
FIELD = (1 << BITS) - 1
MAX_EXPONENT = FIELD


def pack(exponents: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exponents):
        if e < 0 or e > MAX_EXPONENT:
            raise OverflowError(f"exponent {e} outside [0, {MAX_EXPONENT}]")
        key |= e << (BITS * i)
    return key


def unpack(key: int, nvars: int) -> Tuple[int, ...]:
    return tuple((key >> (BITS * i)) & FIELD for i in range(nvars))


class SparsePoly:
    """Exact sparse polynomial over a fixed, ordered set of variables.

    Parameters
    ----------
    variables : sequence of str
        Variable names; order defines the monomial packing.
    terms : mapping of packed monomial -> coefficient, optional
        Coefficients may be ``int`` or ``Fraction``.  Zero coefficients are
        dropped.
    pi_power : int
        Power of pi attached to the whole polynomial (bookkeeping only).
    """

    __slots__ = ("variables", "terms", "pi_power", "_maxexp")

    def __init__(self, variables: Sequence[str], terms: Mapping[int, Rational] | None = None,
                 pi_power: int = 0):
        self.variables = tuple(variables)
        self.terms: Dict[int, Rational] = {k: v for k, v in (terms or {}).items() if v != 0}
        self.pi_power = pi_power
        self._maxexp = None

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, variables, value) -> "SparsePoly":
        return cls(variables, {0: value})

    @classmethod
    def var(cls, variables, name: str, power: int = 1) -> "SparsePoly":
        idx = tuple(variables).index(name)
        exps = [0] * len(variables)
        exps[idx] = power
        return cls(variables, {pack(exps): 1})

    @classmethod
    def from_dict(cls, variables, coeffs: Mapping[Tuple[int, ...], Rational]) -> "SparsePoly":
        return cls(variables, {pack(e): c for e, c in coeffs.items()})

    def as_dict(self) -> Dict[Tuple[int, ...], Rational]:
        n = len(self.variables)
        return {unpack(k, n): v for k, v in self.terms.items()}

    def _lift(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.variables != self.variables:
                raise ValueError("polynomials live over different variable sets")
            return other
        return SparsePoly(self.variables, {0: other})

    # -- inspection ---------------------------------------------------------
    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly(self.variables, {0: other})
        return (self.variables == other.variables and self.terms == other.terms
                and self.pi_power == other.pi_power)

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items()), self.pi_power))

    def max_exponents(self) -> Tuple[int, ...]:
        if self._maxexp is None:
            n = len(self.variables)
            best = [0] * n
            for key in self.terms:
                for i in range(n):
                    e = (key >> (BITS * i)) & FIELD
                    if e > best[i]:
                        best[i] = e
            self._maxexp = tuple(best)
        return self._maxexp

    def degree(self, name: str) -> int:
        return self.max_exponents()[self.variables.index(name)]

    def is_zero(self) -> bool:
        return not self.terms

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return SparsePoly(self.variables, out, self.pi_power)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.variables, {k: -v for k, v in self.terms.items()}, self.pi_power)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            if other == 0:
                return SparsePoly(self.variables, {}, self.pi_power)
            return SparsePoly(self.variables, {k: v * other for k, v in self.terms.items()},
                              self.pi_power)
        other = self._lift(other)
        mine, theirs = self.max_exponents(), other.max_exponents()
        if any(a + b > MAX_EXPONENT for a, b in zip(mine, theirs)):
            raise OverflowError("product exponent exceeds packed field width")
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: Dict[int, Rational] = {}
        get = out.get
        for kb, vb in b.items():
            for ka, va in a.items():
                k = ka + kb
                out[k] = get(k, 0) + va * vb
        out = {k: v for k, v in out.items() if v}
        return SparsePoly(self.variables, out, self.pi_power + other.pi_power)

    __rmul__ = __mul__

    def __pow__(self, m: int):
        if m < 0:
            raise ValueError("negative powers are not polynomials")
        result = SparsePoly.constant(self.variables, 1)
        for _ in range(m):
            result = result * self
        return result

    # -- substitution / evaluation -----------------------------------------
    def evaluate(self, values: Mapping[str, object]):
        """Evaluate at a point; variables missing from ``values`` are an error."""
        n = len(self.variables)
        vals = [values[v] for v in self.variables]
        total = 0
        for key, c in self.terms.items():
            term = c
            for i in range(n):
                e = (key >> (BITS * i)) & FIELD
                if e:
                    term = term * vals[i] ** e
            total = total + term
        return total

    def normalize(self) -> "SparsePoly":
        """Rewrite ``s_x**2 -> 1 - x**2`` until every ``s_x`` exponent is 0 or 1."""
        pairs = []
        for i, name in enumerate(self.variables):
            if name.startswith("s_") and name[2:] in self.variables:
                pairs.append((i, self.variables.index(name[2:])))
        if not pairs:
            return self
        n = len(self.variables)
        out: Dict[int, Rational] = {}
        stack = list(self.terms.items())
        while stack:
            key, c = stack.pop()
            exps = list(unpack(key, n))
            for si, zi in pairs:
                if exps[si] >= 2:
                    exps[si] -= 2
                    stack.append((pack(exps), c))
                    exps[zi] += 2
                    stack.append((pack(exps), -c))
                    break
            else:
                s = out.get(key, 0) + c
                if s:
                    out[key] = s
                else:
                    out.pop(key)
        return SparsePoly(self.variables, out, self.pi_power)

    def coefficients_in(self, name: str) -> Dict[int, "SparsePoly"]:
        """Split into ``{power: coefficient polynomial}`` with respect to one variable."""
        idx = self.variables.index(name)
        shift = BITS * idx
        mask = FIELD << shift
        parts: Dict[int, Dict[int, Rational]] = {}
        for key, c in self.terms.items():
            e = (key & mask) >> shift
            parts.setdefault(e, {})[key & ~mask] = c
        return {e: SparsePoly(self.variables, t, self.pi_power) for e, t in parts.items()}

    def __repr__(self):
        if not self.terms:
            return "SparsePoly(0)"
        n = len(self.variables)
        chunks = []
        for key in sorted(self.terms, reverse=True)[:8]:
            mono = "*".join(f"{v}^{e}" if e > 1 else v
                            for v, e in zip(self.variables, unpack(key, n)) if e)
            chunks.append(f"{self.terms[key]}{'*' + mono if mono else ''}")
        more = "" if len(self.terms) <= 8 else f" + ... ({len(self.terms)} terms)"
        return "SparsePoly(" + " + ".join(chunks) + more + ")"


def poly_vars(variables: Iterable[str]):
    """Return one :class:`SparsePoly` per variable name, in order."""
    variables = tuple(variables)
    return [SparsePoly.var(variables, v) for v in variables]


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
