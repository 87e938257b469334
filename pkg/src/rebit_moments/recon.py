"""Distributions recovered from moment sequences.

Moments stay exact (``Fraction``) for as long as possible; the places where
floats enter are the special functions and the Libby-Novick quadratures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb, floor
from typing import Callable, Optional, Tuple

import mpmath
import numpy as np
import sympy
from scipy import integrate, optimize, special

from .exact.moments import raw_moment_sequence

SUPPORTS = {
    "pt-det": (Fraction(-1, 16), Fraction(1, 256)),
    "product": (Fraction(-1, 110592), Fraction(1, 65536)),
    "det": (Fraction(0), Fraction(1, 256)),
    "minor3": (Fraction(-1, 27), Fraction(1, 8)),
}

MAX_PROVOST_HA_ORDER = 12
SQRT3 = math.sqrt(3)


@dataclass(frozen=True)
class MomentSequence:
    """Raw moments ``moments[k] = E[X**k]`` of a variable supported on ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction
    moments: Tuple
    exact: bool = True
    kind: str = "pt-det"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"degenerate support [{self.lo}, {self.hi}]")
        if not self.moments or self.moments[0] != 1:
            raise ValueError("the zeroth moment must be 1")

    @classmethod
    def from_kind(cls, kind: str, K: int) -> "MomentSequence":
        lo, hi = SUPPORTS[kind]
        return cls(lo, hi, tuple(raw_moment_sequence(kind, K)), True, kind)

    @classmethod
    def uniform(cls, K: int) -> "MomentSequence":
        return cls(Fraction(0), Fraction(1), tuple(Fraction(1, k + 1) for k in range(K + 1)), True, "uniform")

    @property
    def order(self) -> int:
        return len(self.moments) - 1

    @property
    def mean(self):
        return self.moments[1]

    @property
    def variance(self):
        return self.moments[2] - self.moments[1] ** 2

    def truncated(self, K: int) -> "MomentSequence":
        if K > self.order:
            raise ValueError(f"only {self.order} moments available, asked for {K}")
        return replace(self, moments=self.moments[:K + 1])

    def image_of(self, x) -> Fraction:
        """Position of ``x`` after mapping the support onto [0, 1]."""
        return (Fraction(x) - self.lo) / (self.hi - self.lo)

    def hankel_psd(self, tol: float = 1e-12) -> bool:
        """Hausdorff conditions on [0, 1]: Hankel matrices of ``m_k`` and ``m_k - m_{k+1}`` are PSD."""
        seq = self if (self.lo, self.hi) == (0, 1) else affine_map_moments(self)
        m = [float(x) for x in seq.moments]
        n = (len(m) - 1) // 2
        h = np.array([[m[i + j] for j in range(n + 1)] for i in range(n + 1)])
        checks = [h]
        if len(m) >= 2:
            n2 = (len(m) - 2) // 2
            checks.append(np.array([[m[i + j] - m[i + j + 1] for j in range(n2 + 1)] for i in range(n2 + 1)]))
        for a in checks:
            scale = np.sqrt(np.outer(np.diag(a), np.diag(a)))
            w = np.linalg.eigvalsh(a / np.where(scale > 0, scale, 1))
            if w[0] < -tol:
                return False
        return True


def _binomial_transform(moments, shift, scale):
    """Moments of ``(X + shift) / scale``."""
    out = []
    for k in range(len(moments)):
        total = sum(comb(k, j) * moments[j] * shift ** (k - j) for j in range(k + 1))
        out.append(total / scale ** k)
    return tuple(out)


def affine_map_moments(seq: MomentSequence) -> MomentSequence:
    """Moments of ``y = (x - lo) / (hi - lo)`` on [0, 1]."""
    width = seq.hi - seq.lo
    moments = _binomial_transform(seq.moments, -seq.lo, width)
    return MomentSequence(Fraction(0), Fraction(1), moments, seq.exact, seq.kind)


def inverse_map_moments(mapped: MomentSequence, lo, hi) -> MomentSequence:
    lo, hi = Fraction(lo), Fraction(hi)
    width = hi - lo
    # x = lo + width * y
    out = []
    for k in range(len(mapped.moments)):
        out.append(sum(comb(k, j) * width ** j * mapped.moments[j] * lo ** (k - j) for j in range(k + 1)))
    return MomentSequence(lo, hi, tuple(out), mapped.exact, mapped.kind)


# -- fits ---------------------------------------------------------------------

@dataclass
class FitResult:
    """A fitted density on [0, 1] (``beta``, ``libby-novick``) or on the raw support (``poly9``)."""

    family: str
    params: Tuple
    goodness: Tuple = ()
    separability_estimate: Optional[float] = None
    converged: bool = True
    support: Tuple = (Fraction(0), Fraction(1))
    extra: dict = field(default_factory=dict)

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        if self.family == "beta":
            a, b = (float(p) for p in self.params)
            return _beta_pdf(y, a, b)
        if self.family == "libby-novick":
            return libby_novick(*(float(p) for p in self.params))(y)
        if self.family == "poly9":
            coeffs = [float(c) for c in self.params]
            return np.polynomial.polynomial.polyval(y, coeffs)
        raise ValueError(f"unknown family {self.family!r}")

    def moment(self, k: int):
        if self.family == "beta":
            return beta_moment(self.params[0], self.params[1], k)
        if self.family == "libby-novick":
            return libby_novick_moment(*(float(p) for p in self.params), k)
        if self.family == "poly9":
            lo, hi = self.support
            return sum(c * (hi ** (j + k + 1) - lo ** (j + k + 1)) / (j + k + 1) for j, c in enumerate(self.params))
        raise ValueError(f"unknown family {self.family!r}")

    def total_mass(self) -> float:
        if self.family == "libby-novick":
            a, b, lam = (float(p) for p in self.params)
            return float(integrate.quad(lambda x: _beta_pdf(x, a, b), 0, 1, points=[a / (a + b)])[0])
        return float(self.moment(0))

    def tail(self, threshold) -> float:
        return tail_probability(self, threshold)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params), "goodness": list(self.goodness),
                "separability_estimate": self.separability_estimate, "converged": self.converged}


def _beta_pdf(y, a, b):
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = (a - 1) * np.log(y) + (b - 1) * np.log1p(-y) - special.betaln(a, b)
        out = np.exp(logp)
    return np.where((y > 0) & (y < 1), out, 0.0)


def beta_moment(a, b, k: int):
    """``E[Y**k]`` for Beta(a, b); exact when ``a`` and ``b`` are rational."""
    out = Fraction(1) if isinstance(a, Fraction) and isinstance(b, Fraction) else 1.0
    for r in range(k):
        out *= (a + r) / (a + b + r)
    return out


def moment_ratios(mapped: MomentSequence, fit: FitResult, K: Optional[int] = None) -> Tuple[float, ...]:
    """``exact_k / fitted_k`` for k = 1..K."""
    K = mapped.order if K is None else K
    out = []
    for k in range(1, K + 1):
        fitted = fit.moment(k)
        if isinstance(fitted, Fraction) and mapped.exact:
            out.append(float(Fraction(mapped.moments[k]) / fitted))
        else:
            out.append(float(mapped.moments[k]) / float(fitted))
    return tuple(out)


def beta_fit_two_moments(mapped: MomentSequence) -> FitResult:
    """Method-of-moments beta fit; exact rationals in, exact rationals out."""
    mu, var = mapped.mean, mapped.variance
    if not 0 < mu < 1:
        raise ValueError(f"mean {mu} outside (0, 1)")
    if not 0 < var < mu * (1 - mu):
        raise ValueError(f"variance {var} outside (0, mean(1-mean))")
    t = mu * (1 - mu) / var - 1
    fit = FitResult("beta", (mu * t, (1 - mu) * t))
    fit.goodness = moment_ratios(mapped, fit)
    return fit


def tail_probability(fit: FitResult, threshold) -> float:
    """``P(Y >= threshold)`` under the fitted density."""
    t = Fraction(threshold)
    if fit.family == "poly9":
        lo, hi = fit.support
        t = max(lo, min(hi, t))
        return float(sum(c * (hi ** (j + 1) - t ** (j + 1)) / (j + 1) for j, c in enumerate(fit.params)))
    if not 0 <= t <= 1:
        raise ValueError("threshold must lie in [0, 1]")
    if fit.family == "beta":
        a, b = (float(p) for p in fit.params)
        return float(special.betaincc(a, b, float(t)))
    if fit.family == "libby-novick":
        a, b, lam = (float(p) for p in fit.params)
        return float(special.betaincc(a, b, _ln_to_beta(float(t), lam)))
    raise ValueError(f"unknown family {fit.family!r}")


# -- Libby-Novick --------------------------------------------------------------

def _ln_to_beta(y, lam):
    """Map ``Y ~ LN(a, b, lam)`` to ``X ~ Beta(a, b)``; odds(X) = lam * odds(Y)."""
    return lam * y / (1 - y + lam * y)


def libby_novick(a: float, b: float, lam: float) -> Callable[[np.ndarray], np.ndarray]:
    """Density ``lam**a y**(a-1) (1-y)**(b-1) / (B(a,b) (1-(1-lam) y)**(a+b))``."""
    if min(a, b, lam) <= 0:
        raise ValueError("Libby-Novick parameters must be positive")

    def pdf(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            logp = (a * math.log(lam) + (a - 1) * np.log(y) + (b - 1) * np.log1p(-y)
                    - special.betaln(a, b) - (a + b) * np.log1p(-(1 - lam) * y))
            out = np.exp(logp)
        return np.where((y > 0) & (y < 1), out, 0.0)

    return pdf


def libby_novick_moment(a: float, b: float, lam: float, k: int, dps: int = 30) -> float:
    """``E[Y**k] = lam**a B(a+k, b) / B(a, b) 2F1(a+b, a+k; a+b+k; 1-lam)``."""
    if k == 0:
        return 1.0
    with mpmath.workdps(dps):
        a, b, lam = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(lam)
        val = (lam ** a * mpmath.beta(a + k, b) / mpmath.beta(a, b)
               * mpmath.hyp2f1(a + b, a + k, a + b + k, 1 - lam))
        return float(val)


def libby_novick_fit(mapped: MomentSequence, max_evaluations: int = 400, tol: float = 1e-10,
                     start: Optional[Tuple[float, float, float]] = None) -> FitResult:
    """Fit the first three mapped moments by trust-region least squares in log-parameters.

    Starts from the two-moment beta fit with ``lam = 1`` unless ``start`` is
    given. For the partial-transpose determinant no exact three-moment
    solution exists (the third-moment residual stays positive as ``lam -> 0``),
    so the returned best iterate carries ``converged=False``.
    """
    target = np.array([float(mapped.moments[k]) for k in (1, 2, 3)])
    if start is None:
        beta = beta_fit_two_moments(mapped)
        start = (float(beta.params[0]), float(beta.params[1]), 1.0)

    def resid(th):
        a, b, lam = np.exp(th)
        return np.array([libby_novick_moment(a, b, lam, k) for k in (1, 2, 3)]) / target - 1

    res = optimize.least_squares(resid, np.log(np.asarray(start, dtype=float)), method="trf",
                                 xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_evaluations)
    a, b, lam = (float(x) for x in np.exp(res.x))
    fit = FitResult("libby-novick", (a, b, lam), converged=bool(np.max(np.abs(res.fun)) < tol))
    fit.extra["residuals"] = [float(x) for x in res.fun]
    fit.goodness = moment_ratios(mapped, fit)
    return fit


# -- one-sided Chebyshev --------------------------------------------------------

def chebyshev_upper_bound(seq: MomentSequence):
    """Cantelli bound ``P(X >= 0) <= var / (var + mean**2)`` for a negative mean."""
    mean, var = seq.mean, seq.variance
    if mean == 0:
        if var == 0:
            raise ValueError("zero variance with zero mean: the bound is undefined")
        return Fraction(1) if seq.exact else 1.0
    if not mean < 0 < seq.hi:
        raise ValueError("the bound needs mean < 0 < hi")
    return var / (var + mean ** 2)


# -- Mnatsakanov ---------------------------------------------------------------

def mnatsakanov_cdf(mapped: MomentSequence, x, K: int):
    """Binomial-sum CDF estimate at ``x`` from the first ``K`` moments on [0, 1].

    Summed exactly in rationals when the moments are exact; the alternating
    binomial sums lose all precision in floating point well before K = 50.
    """
    if K > mapped.order:
        raise ValueError(f"K={K} exceeds the {mapped.order} available moments")
    if K < 1:
        raise ValueError("K must be positive")
    x = Fraction(x)
    moms = [Fraction(m) for m in mapped.moments] if mapped.exact else list(mapped.moments)
    top = min(K, floor(x * K))
    total = 0
    for k in range(top + 1):
        inner = sum((-1) ** (j - k) * comb(K, j) * comb(j, k) * moms[j] for j in range(k, K + 1))
        total += inner
    return total


def mnatsakanov_estimate(mapped: MomentSequence, threshold, K: int) -> float:
    return float(1 - mnatsakanov_cdf(mapped, threshold, K))


# -- Provost-Ha -------------------------------------------------------------------

@dataclass
class ProvostHaResult:
    K: int
    lambdas: Tuple[float, ...]
    estimate: float
    density: Callable[[np.ndarray], np.ndarray]
    baseline: FitResult


def _baseline_moments(baseline: FitResult, n: int):
    if baseline.family == "beta":
        a, b = baseline.params
        return [mpmath.mpf(Fraction(beta_moment(Fraction(a), Fraction(b), k)).numerator)
                / Fraction(beta_moment(Fraction(a), Fraction(b), k)).denominator for k in range(n)]
    if baseline.family == "libby-novick":
        a, b, lam = (mpmath.mpf(p) for p in baseline.params)
        norm = mpmath.beta(a, b)
        return [mpmath.quad(lambda x: (x / (x + lam * (1 - x))) ** k * x ** (a - 1) * (1 - x) ** (b - 1),
                            [0, a / (a + b), 1]) / norm for k in range(n)]
    raise ValueError("Provost-Ha needs a beta or Libby-Novick baseline")


def _baseline_upper_moments(baseline: FitResult, t, n: int):
    """``E_base[Y**k ; Y >= t]`` for k < n."""
    t = mpmath.mpf(Fraction(t).numerator) / Fraction(t).denominator
    if baseline.family == "beta":
        a, b = (mpmath.mpf(Fraction(p).numerator) / Fraction(p).denominator for p in baseline.params)
        out = []
        for k in range(n):
            scale = mpmath.beta(a + k, b) / mpmath.beta(a, b)
            out.append(scale * mpmath.betainc(a + k, b, t, 1, regularized=True))
        return out
    a, b, lam = (mpmath.mpf(p) for p in baseline.params)
    xt = lam * t / (1 - t + lam * t)
    norm = mpmath.beta(a, b)
    return [mpmath.quad(lambda x: (x / (x + lam * (1 - x))) ** k * x ** (a - 1) * (1 - x) ** (b - 1),
                        [xt, max(xt, a / (a + b)), 1]) / norm for k in range(n)]


def provost_ha_density(mapped: MomentSequence, baseline: FitResult, K: int,
                       threshold=None, dps: int = 60) -> ProvostHaResult:
    """Baseline density times an orthonormal-polynomial correction of degree ``K``."""
    if K > MAX_PROVOST_HA_ORDER:
        raise ValueError(f"Gram matrix is too ill-conditioned beyond K={MAX_PROVOST_HA_ORDER}; use fewer moments")
    if K > mapped.order:
        raise ValueError(f"K={K} exceeds the {mapped.order} available moments")
    with mpmath.workdps(dps):
        base = _baseline_moments(baseline, 2 * K + 1)
        gram = mpmath.matrix(K + 1, K + 1)
        for i in range(K + 1):
            for j in range(K + 1):
                gram[i, j] = base[i + j]
        chol = mpmath.cholesky(gram)
        coeffs = chol ** -1  # row j: monomial coefficients of the orthonormal pi_j
        tau = mpmath.matrix([mpmath.mpf(Fraction(m).numerator) / Fraction(m).denominator
                             for m in mapped.moments[:K + 1]])
        lam = coeffs * tau
        poly = (lam.T * coeffs)  # density = baseline * sum_k poly[k] y**k
        poly_coeffs = [poly[0, k] for k in range(K + 1)]
        estimate = None
        if threshold is not None:
            upper = _baseline_upper_moments(baseline, threshold, K + 1)
            estimate = float(mpmath.fsum(c * u for c, u in zip(poly_coeffs, upper)))
        lambdas = tuple(float(lam[j]) for j in range(K + 1))
    float_coeffs = [float(c) for c in poly_coeffs]

    def density(y):
        y = np.asarray(y, dtype=float)
        return baseline.pdf(y) * np.polynomial.polynomial.polyval(y, float_coeffs)

    return ProvostHaResult(K, lambdas, estimate, density, baseline)


# -- naive polynomial ---------------------------------------------------------------

def naive_polynomial_density(seq: MomentSequence, degree: Optional[int] = None) -> FitResult:
    """Polynomial density on the raw support reproducing moments 0..degree exactly."""
    degree = seq.order if degree is None else degree
    if degree > seq.order:
        raise ValueError(f"degree {degree} needs {degree} moments, only {seq.order} available")
    lo, hi = seq.lo, seq.hi
    n = degree + 1

    def power_integral(p):
        return sympy.Rational(hi ** p - lo ** p) / p

    mat = sympy.Matrix(n, n, lambda j, k: power_integral(j + k + 1))
    rhs = sympy.Matrix([sympy.Rational(seq.moments[j]) for j in range(n)])
    if mat.det() == 0:
        raise ValueError("singular moment system")
    sol = mat.LUsolve(rhs)
    coeffs = tuple(Fraction(int(c.p), int(c.q)) for c in sol)
    fit = FitResult("poly9", coeffs, support=(lo, hi))
    fit.goodness = tuple(float(fit.moment(k) / Fraction(seq.moments[k])) if seq.moments[k] else 1.0
                         for k in range(1, n))
    if lo < 0 < hi:
        fit.separability_estimate = tail_probability(fit, 0)
    return fit


# -- summary statistics ---------------------------------------------------------------

def central_moments(seq: MomentSequence, order: int):
    m = seq.moments
    mean = m[1]
    return [sum(comb(k, j) * m[j] * (-mean) ** (k - j) for j in range(k + 1)) for k in range(order + 1)]


def summary_stats(seq: MomentSequence, other: Optional[MomentSequence] = None, cross_moment=0) -> dict:
    """Variance, skewness, kurtosis (raw and excess), mode interval and correlation.

    ``other`` with ``cross_moment = E[XY]`` enables the correlation.
    """
    if seq.order < 2:
        raise ValueError("need at least two moments")
    c = central_moments(seq, min(4, seq.order))
    var = c[2]
    sigma = math.sqrt(var)
    out = {"mean": seq.mean, "variance": var,
           "mode_interval": (float(seq.mean) - SQRT3 * sigma, float(seq.mean) + SQRT3 * sigma)}
    if seq.order >= 3:
        out["skewness"] = float(c[3]) / sigma ** 3
    if seq.order >= 4:
        raw = float(Fraction(c[4]) / Fraction(var) ** 2) if seq.exact else float(c[4]) / float(var) ** 2
        out["kurtosis_raw"] = raw
        out["kurtosis_excess"] = raw - 3
    if other is not None:
        cov = cross_moment - seq.mean * other.mean
        rho_sq = cov * cov / (var * other.variance)
        out["correlation_squared"] = rho_sq
        out["correlation"] = math.copysign(math.sqrt(rho_sq), cov)
    return out


# -- reports -----------------------------------------------------------------------

def density_grid(pdf: Callable[[np.ndarray], np.ndarray], lo=0.0, hi=1.0, points: int = 1001):
    y = np.linspace(float(lo), float(hi), points)
    return y, pdf(y)


def beta_mode(fit: FitResult) -> float:
    a, b = (float(p) for p in fit.params)
    return (a - 1) / (a + b - 2)
