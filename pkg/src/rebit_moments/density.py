"""4x4 two-qubit / two-rebit density matrices.

Array helpers (``pt_array``, ``det4``, ...) act on the trailing two axes, so
the same code serves a single matrix, a batch of a million samples, or an
``object`` array of :class:`fractions.Fraction` for exact golden checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

SCENARIOS = ("real-9d", "real-8d-rho34=0", "mixed-10d-rho34-complex", "complex-15d", "boundary-rank3")

PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12


class InvalidStateError(ValueError):
    """Raised when a matrix is not an admissible density matrix."""


# -- array primitives ---------------------------------------------------------

def pt_array(a: np.ndarray) -> np.ndarray:
    """Transpose each 2x2 block in place (partial transpose on the second qubit)."""
    a = np.asarray(a)
    shape = a.shape
    b = a.reshape(shape[:-2] + (2, 2, 2, 2))
    return np.swapaxes(b, -1, -3).reshape(shape)


def det4(a: np.ndarray):
    """Determinant of 4x4 matrices by Laplace expansion along the first two rows.

    Exact for ``Fraction`` entries; vectorised over leading axes.
    """
    a = np.asarray(a)
    if a.shape[-2:] != (4, 4):
        raise ValueError("expected trailing shape (4, 4)")

    def m2(r0, r1, c0, c1):
        return a[..., r0, c0] * a[..., r1, c1] - a[..., r0, c1] * a[..., r1, c0]

    total = 0
    for (c0, c1) in combinations(range(4), 2):
        d0, d1 = [c for c in range(4) if c not in (c0, c1)]
        sign = -1 if (c0 + c1 + 1) % 2 else 1  # (-1)**(0 + 1 + c0 + c1)
        total = total + sign * m2(0, 1, c0, c1) * m2(2, 3, d0, d1)
    return total


def det3(a: np.ndarray):
    return (a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
            - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
            + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0]))


def det_small(a: np.ndarray):
    n = a.shape[-1]
    if n == 1:
        return a[..., 0, 0]
    if n == 2:
        return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    if n == 3:
        return det3(a)
    if n == 4:
        return det4(a)
    raise ValueError("only sizes 1..4 are supported")


def _real_if_hermitian(x):
    if isinstance(x, np.ndarray) and np.iscomplexobj(x):
        return x.real
    if isinstance(x, complex):
        return x.real
    return x


# -- value types --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A 4x4 density matrix tagged with the scenario it was drawn from."""

    entries: np.ndarray
    scenario: str = "real-9d"

    def __post_init__(self):
        arr = np.array(self.entries, copy=True)
        if arr.shape != (4, 4):
            raise InvalidStateError(f"expected a 4x4 matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        if self.scenario not in SCENARIOS:
            raise InvalidStateError(f"unknown scenario {self.scenario!r}")

    @property
    def is_exact(self) -> bool:
        return self.entries.dtype == object

    def to_float(self) -> np.ndarray:
        if self.is_exact:
            vals = [complex(x) for x in self.entries.ravel()]
            arr = np.array(vals).reshape(4, 4)
            return arr.real if not np.any(arr.imag) else arr
        return np.asarray(self.entries)

    def trace(self):
        return _real_if_hermitian(sum(self.entries[i, i] for i in range(4)))

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.scenario == other.scenario and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash((self.scenario, tuple(self.entries.ravel().tolist())))

    def validate(self, tol: float = PSD_TOL) -> "DensityMatrix":
        a = self.to_float()
        if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("matrix is not Hermitian")
        if abs(np.trace(a).real - 1) > TRACE_TOL:
            raise InvalidStateError(f"trace {np.trace(a).real!r} differs from 1")
        if np.linalg.eigvalsh(a)[0] < -tol:
            raise InvalidStateError("matrix has a negative eigenvalue")
        if self.scenario == "real-8d-rho34=0" and (a[2, 3] != 0 or a[3, 2] != 0):
            raise InvalidStateError("scenario real-8d requires rho34 = rho43 = 0")
        return self


class SpectralData(NamedTuple):
    eigenvalues: tuple  # descending
    determinant: float
    rank3_product: float


# -- constructors ---------------------------------------------------------------

def maximally_mixed(exact: bool = False) -> DensityMatrix:
    if exact:
        arr = np.empty((4, 4), dtype=object)
        arr[:] = Fraction(0)
        for i in range(4):
            arr[i, i] = Fraction(1, 4)
        return DensityMatrix(arr)
    return DensityMatrix(np.eye(4) / 4)


def from_rationals(rows: Sequence[Sequence], scenario: str = "real-9d") -> DensityMatrix:
    """Exact matrix from ints, Fractions or ``"p/q"`` strings."""
    arr = np.empty((4, 4), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            arr[i, j] = Fraction(x)
    return DensityMatrix(arr, scenario)


def pure_state(vector: Iterable[complex], scenario: str = "real-9d") -> DensityMatrix:
    v = np.asarray(list(vector), dtype=complex)
    v = v / np.linalg.norm(v)
    rho = np.outer(v, v.conj())
    if not np.any(rho.imag):
        rho = rho.real
    return DensityMatrix(rho, scenario)


def bell_phi_plus() -> DensityMatrix:
    """Projector on (|00> + |11>)/sqrt(2)."""
    return pure_state([1, 0, 0, 1])


def extremal_product_state() -> DensityMatrix:
    """The two-rebit state minimising det(rho) det(rho^PT), value -1/110592."""
    r2, r3 = math.sqrt(2), math.sqrt(3)
    a = 1 / (6 * r2)
    rho = np.array([
        [1 / 6, -a, a, (r3 - 1) / 12],
        [-a, 1 / 3, -(1 + r3) / 12, -a],
        [a, -(1 + r3) / 12, 1 / 3, a],
        [(r3 - 1) / 12, -a, a, 1 / 6],
    ])
    return DensityMatrix(rho)


# -- operations ---------------------------------------------------------------------

def partial_transpose(rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(pt_array(rho.entries), rho.scenario)


def determinant(rho: DensityMatrix):
    """Cofactor determinant; exact for rational entries, real for Hermitian input."""
    return _real_if_hermitian(det4(rho.entries))


def _hermitian_float(rho) -> np.ndarray:
    a = rho.to_float() if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if a.shape != (4, 4):
        raise InvalidStateError("expected a 4x4 matrix")
    if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
        raise InvalidStateError("matrix is not Hermitian")
    return a


def eigenvalues_sym4(rho) -> SpectralData:
    """Eigenvalues (descending), determinant and product of the three largest."""
    a = _hermitian_float(rho)
    w = np.linalg.eigvalsh(a)[::-1]
    return SpectralData(tuple(float(x) for x in w), float(np.prod(w)), float(np.prod(w[:3])))


def is_psd(rho, tol: float = PSD_TOL) -> bool:
    return eigenvalues_sym4(rho).eigenvalues[-1] >= -tol


def ppt_separable(rho: DensityMatrix, tol: float = PSD_TOL, method: str = "eigen") -> bool:
    """Peres-Horodecki test.

    ``method="eigen"`` (authoritative) checks the smallest eigenvalue of the
    partial transpose; ``method="det"`` uses the sign of ``det(rho^PT)``, which
    is equivalent for 4x4 states since the partial transpose has at most one
    negative eigenvalue.
    """
    if method == "eigen":
        return is_psd(partial_transpose(rho), tol)
    if method == "det":
        return float(determinant(partial_transpose(rho))) >= -tol
    raise ValueError("method must be 'eigen' or 'det'")


def purity(rho: DensityMatrix):
    """``(Tr rho^2, 1 / Tr rho^2)``."""
    a = rho.entries
    p = _real_if_hermitian(sum(a[i, j] * a[j, i] for i in range(4) for j in range(4)))
    return p, 1 / p


def commutator_determinant(rho: DensityMatrix):
    a = rho.entries
    b = pt_array(a)
    return _real_if_hermitian(det4(a @ b - b @ a))


def principal_minor(rho, rows: Iterable[int]):
    """Determinant of the principal submatrix on 1-based indices ``rows``."""
    idx = list(rows)
    if not idx or len(set(idx)) != len(idx) or any(i not in (1, 2, 3, 4) for i in idx):
        raise ValueError(f"rows must be distinct indices from 1..4, got {idx}")
    a = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    sub = a[np.ix_([i - 1 for i in sorted(idx)], [i - 1 for i in sorted(idx)])]
    return _real_if_hermitian(det_small(sub))
