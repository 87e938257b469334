"""Bloore (correlation) coordinates for real two-rebit density matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .density import DensityMatrix, InvalidStateError
from .exact.intermediate import corr_det, minor3_factor, pt_polynomial

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _s(z: float) -> float:
    return math.sqrt(max(0.0, 1.0 - z * z))


@dataclass(frozen=True)
class BlooreCoords:
    """Diagonal, the six correlations and the equivalent three partial correlations."""

    diagonal: Tuple[float, float, float, float]
    z12: float
    z13: float
    z14: float
    z23: float
    z24: float
    z34: float
    z13_2: float
    z24_3: float
    z14_23: float

    @property
    def mu(self) -> float:
        r11, r22, r33, r44 = self.diagonal
        return math.sqrt(r11 * r44 / (r22 * r33))

    @property
    def nu(self) -> float:
        return self.mu ** 2

    @property
    def xi(self) -> float:
        return math.log(self.mu)

    @property
    def correlations(self) -> Tuple[float, ...]:
        return (self.z12, self.z13, self.z14, self.z23, self.z24, self.z34)

    @property
    def partials(self) -> Tuple[float, float, float]:
        return (self.z13_2, self.z24_3, self.z14_23)

    @classmethod
    def from_partials(cls, diagonal, z12, z23, z34, z13_2, z24_3, z14_23) -> "BlooreCoords":
        z13, z24, z14 = partials_to_correlations(z12, z23, z34, z13_2, z24_3, z14_23)
        return cls(tuple(float(x) for x in diagonal), z12, z13, z14, z23, z24, z34, z13_2, z24_3, z14_23)

    def to_dict(self) -> dict:
        return {"diagonal": list(self.diagonal), "correlations": list(self.correlations),
                "partials": list(self.partials), "mu": self.mu}


def partials_to_correlations(z12, z23, z34, z13_2, z24_3, z14_23):
    """``(z13, z24, z14)`` from adjacent and partial correlations (real sign convention)."""
    s12, s23, s34 = _s(z12), _s(z23), _s(z34)
    sp, sq = _s(z13_2), _s(z24_3)
    z13 = z12 * z23 + s12 * s23 * z13_2
    z24 = z23 * z34 + s23 * s34 * z24_3
    z14 = (z12 * z23 * z34 + s12 * s23 * z34 * z13_2 + z12 * s23 * s34 * z24_3
           - s12 * z23 * s34 * z13_2 * z24_3 + s12 * s34 * sp * sq * z14_23)
    return z13, z24, z14


def correlations_to_partials(z12, z13, z14, z23, z24, z34):
    """Inverse of :func:`partials_to_correlations` away from the |z| = 1 faces."""
    s12, s23, s34 = _s(z12), _s(z23), _s(z34)
    p = (z13 - z12 * z23) / (s12 * s23)
    q = (z24 - z23 * z34) / (s23 * s34)
    rest = z12 * z23 * z34 + s12 * s23 * z34 * p + z12 * s23 * s34 * q - s12 * z23 * s34 * p * q
    r = (z14 - rest) / (s12 * s34 * _s(p) * _s(q))
    return p, q, r


def jacobian_weight(z12, z23, z34, z13_2, z24_3) -> float:
    """Density of the correlation volume in partial-correlation coordinates."""
    return (1 - z12 ** 2) * (1 - z23 ** 2) * (1 - z34 ** 2) * _s(z13_2) * _s(z24_3)


def to_bloore(rho: DensityMatrix) -> BlooreCoords:
    a = rho.to_float()
    if np.iscomplexobj(a):
        raise InvalidStateError("Bloore coordinates here cover real density matrices only")
    d = np.diag(a)
    if np.any(d <= 0):
        raise InvalidStateError("a zero diagonal entry makes the Bloore parameterisation singular")
    z = {f"z{i + 1}{j + 1}": float(a[i, j] / math.sqrt(d[i] * d[j])) for i, j in PAIRS}
    p, q, r = correlations_to_partials(z["z12"], z["z13"], z["z14"], z["z23"], z["z24"], z["z34"])
    return BlooreCoords(tuple(float(x) for x in d), **z, z13_2=p, z24_3=q, z14_23=r)


def from_bloore(coords: BlooreCoords, scenario: str = "real-9d") -> DensityMatrix:
    d = np.asarray(coords.diagonal, dtype=float)
    a = np.diag(d)
    for (i, j), z in zip(PAIRS, coords.correlations):
        a[i, j] = a[j, i] = z * math.sqrt(d[i] * d[j])
    return DensityMatrix(a, scenario)


def pt_det_polynomial(coords: BlooreCoords) -> float:
    """``P(mu, z)`` with ``det(rho^PT) = (rho22 rho33)**2 P``."""
    return pt_polynomial(*coords.correlations, coords.mu)


def pt_determinant(coords: BlooreCoords) -> float:
    r22, r33 = coords.diagonal[1], coords.diagonal[2]
    return (r22 * r33) ** 2 * pt_det_polynomial(coords)


def corr_det_polynomial(coords: BlooreCoords) -> float:
    return corr_det(*coords.correlations)


def minor3_polynomial(coords: BlooreCoords) -> float:
    """``rho11 rho22 rho33 (mu^2 z14^2 - 2 mu z12 z13 z14 + z13^2 + z12^2 - 1)``.

    Equals minus the {1,2,3} principal minor of rho^PT.
    """
    r11, r22, r33, _ = coords.diagonal
    return r11 * r22 * r33 * minor3_factor(coords.z12, coords.z13, coords.z14, coords.mu)
