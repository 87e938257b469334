"""Random two-qubit/two-rebit states and streaming moment estimators.

Samples are produced in fixed-size blocks.  Block ``k`` draws from its own
generator seeded by ``SeedSequence(seed, spawn_key=(scenario, measure, k))``,
so every estimate is a deterministic function of the configuration, whatever
the number of worker threads.  Block statistics are merged in block order
with the pairwise (Chan) update, so the merge is order-fixed as well.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .density import SCENARIOS, DensityMatrix, det3, det4, pt_array

MEASURES = ("HS", "Bures", "flat-rejection", "boundary")
FUNCTIONALS = ("det", "detPT", "product", "commutator_det", "minor3", "rank3_product",
               "rank3_product_detPT", "one")
DEFAULT_BLOCK = 1 << 14

# sup over the simplex of prod_{i<j} |l_i - l_j| / sqrt(l_i + l_j) is 0.0120281...
BURES_ENVELOPE = 0.0121


# -- batched samplers --------------------------------------------------------------

def _normalize(a: np.ndarray) -> np.ndarray:
    tr = np.trace(a, axis1=-2, axis2=-1).real
    return a / tr[..., None, None]


def hs_real_batch(rng: np.random.Generator, n: int) -> np.ndarray:
    """Flat (HS) two-rebit states: ``G G^T / Tr`` with ``G`` a real 4x5 Gaussian.

    The extra column matters: the real induced measure with ``k`` columns has
    eigenvalue weight ``prod l**((k - 5)/2)``, flat only for ``k = 5``.
    """
    g = rng.standard_normal((n, 4, 5))
    return _normalize(g @ np.swapaxes(g, -1, -2))


def hs_complex_batch(rng: np.random.Generator, n: int) -> np.ndarray:
    """Flat (HS) two-qubit states from a square complex Ginibre matrix."""
    g = rng.standard_normal((n, 4, 4)) + 1j * rng.standard_normal((n, 4, 4))
    return _normalize(g @ np.conj(np.swapaxes(g, -1, -2)))


def haar_orthogonal_batch(rng: np.random.Generator, n: int, cols: int = 4) -> np.ndarray:
    z = rng.standard_normal((n, 4, cols))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs[signs == 0] = 1
    return q * signs[:, None, :]


def _bures_weight(lam: np.ndarray) -> np.ndarray:
    w = np.ones(lam.shape[0])
    for i, j in combinations(range(4), 2):
        w *= np.abs(lam[:, i] - lam[:, j]) / np.sqrt(lam[:, i] + lam[:, j])
    return w


def bures_real_batch(rng: np.random.Generator, n: int) -> np.ndarray:
    """Real Bures states by rejection on the spectrum, then a Haar rotation.

    Spectral density ``prod l**(-1/2) prod_{i<j} |l_i - l_j| / sqrt(l_i + l_j)``:
    the first factor is the Dirichlet(1/2, ...) proposal, the second the
    acceptance ratio (bounded by ``BURES_ENVELOPE``).
    """
    accepted: List[np.ndarray] = []
    have = 0
    while have < n:
        m = max(64, int((n - have) * 5.5))
        lam = rng.dirichlet([0.5] * 4, size=m)
        w = _bures_weight(lam)
        if np.any(w > BURES_ENVELOPE):
            raise RuntimeError("Bures envelope violated; acceptance would be biased")
        keep = rng.random(m) * BURES_ENVELOPE < w
        accepted.append(lam[keep])
        have += int(keep.sum())
    lam = np.concatenate(accepted)[:n]
    o = haar_orthogonal_batch(rng, n)
    return (o * lam[:, None, :]) @ np.swapaxes(o, -1, -2)


def boundary_rank3_batch(rng: np.random.Generator, n: int) -> np.ndarray:
    """Flat measure on the rank-3 boundary of the two-rebit set.

    Boundary surface measure has spectral weight ``prod_{i<j<=3}|l_i - l_j| prod l_i``
    on the nonzero eigenvalues: a 3x3 real Wishart with 6 degrees of freedom,
    placed in a Haar-random 3-dimensional subspace.
    """
    u = haar_orthogonal_batch(rng, n, cols=3)
    h = rng.standard_normal((n, 3, 6))
    g = u @ h
    return _normalize(g @ np.swapaxes(g, -1, -2))


# Dirichlet parameters (exponent + 1) of the diagonal for each flat scenario
_FLAT_DIAGONAL = {
    "real-9d": (2.5, 2.5, 2.5, 2.5),
    "real-8d-rho34=0": (2.5, 2.5, 2.0, 2.0),
    "mixed-10d-rho34-complex": (2.5, 2.5, 3.0, 3.0),
}


def flat_rejection_batch(rng: np.random.Generator, n: int, scenario: str) -> Tuple[np.ndarray, float]:
    """Flat-measure states by rejection in Bloore coordinates.

    The diagonal is drawn from the Dirichlet law that the Bloore jacobian
    induces, correlations uniformly from the cube (the complex rho34 from the
    square), and a draw is kept iff the correlation matrix is PSD.  Returns
    ``n`` accepted states and the observed acceptance rate.
    """
    if scenario not in _FLAT_DIAGONAL:
        raise ValueError(f"flat rejection supports {tuple(_FLAT_DIAGONAL)}")
    complex34 = scenario == "mixed-10d-rho34-complex"
    dtype = complex if complex34 else float
    out: List[np.ndarray] = []
    have = attempts = 0
    while have < n:
        m = max(64, int((n - have) * 6))
        z = np.zeros((m, 4, 4), dtype=dtype)
        for i, j in combinations(range(4), 2):
            if (i, j) == (2, 3):
                if scenario == "real-8d-rho34=0":
                    continue
                if complex34:
                    v = rng.uniform(-1, 1, m) + 1j * rng.uniform(-1, 1, m)
                    z[:, 2, 3], z[:, 3, 2] = v, np.conj(v)
                    continue
            v = rng.uniform(-1, 1, m)
            z[:, i, j] = z[:, j, i] = v
        z[:, range(4), range(4)] = 1
        ok = np.linalg.eigvalsh(z)[:, 0] >= 0
        attempts += m
        diag = rng.dirichlet(_FLAT_DIAGONAL[scenario], size=m)
        z, diag = z[ok], diag[ok]
        root = np.sqrt(diag)
        out.append(z * root[:, :, None] * root[:, None, :])
        have += int(ok.sum())
    return np.concatenate(out)[:n], have / attempts


# -- single-state API ----------------------------------------------------------------

def _one(batch: np.ndarray, scenario: str) -> DensityMatrix:
    return DensityMatrix(batch[0], scenario)


def sample_hs(scenario: str, rng: np.random.Generator) -> DensityMatrix:
    if scenario == "real-9d":
        return _one(hs_real_batch(rng, 1), scenario)
    if scenario == "complex-15d":
        return _one(hs_complex_batch(rng, 1), scenario)
    raise ValueError("HS Ginibre sampling covers 'real-9d' and 'complex-15d'")


def sample_bures_real(rng: np.random.Generator) -> DensityMatrix:
    return _one(bures_real_batch(rng, 1), "real-9d")


def sample_boundary_rank3(rng: np.random.Generator) -> DensityMatrix:
    return _one(boundary_rank3_batch(rng, 1), "boundary-rank3")


def sample_flat_rejection(scenario: str, rng: np.random.Generator) -> Tuple[DensityMatrix, float]:
    states, rate = flat_rejection_batch(rng, 1, scenario)
    return DensityMatrix(states[0], scenario), rate


# -- configuration and blocks -------------------------------------------------------

@dataclass(frozen=True)
class SamplerConfig:
    scenario: str = "real-9d"
    measure: str = "HS"
    seed: int = 0
    sample_count: int = 100_000
    thread_count: int = 1
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.thread_count < 1:
            raise ValueError("thread_count must be >= 1")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}")
        _generator_for(self)  # validates the combination

    def blocks(self) -> List[Tuple[int, int]]:
        full, rest = divmod(self.sample_count, self.block_size)
        sizes = [self.block_size] * full + ([rest] if rest else [])
        return list(enumerate(sizes))


def _generator_for(config: SamplerConfig) -> Callable[[np.random.Generator, int], np.ndarray]:
    sc, me = config.scenario, config.measure
    if me == "HS" and sc == "real-9d":
        return hs_real_batch
    if me == "HS" and sc == "complex-15d":
        return hs_complex_batch
    if me == "Bures" and sc == "real-9d":
        return bures_real_batch
    if (me == "boundary" or me == "HS") and sc == "boundary-rank3":
        return boundary_rank3_batch
    if me == "flat-rejection" and sc in _FLAT_DIAGONAL:
        return lambda rng, n: flat_rejection_batch(rng, n, sc)[0]
    raise ValueError(f"no sampler for scenario={sc!r} with measure={me!r}")


def block_rng(config: SamplerConfig, block: int) -> np.random.Generator:
    key = (SCENARIOS.index(config.scenario), MEASURES.index(config.measure), block)
    return np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=key))


def generate_block(config: SamplerConfig, block: int, n: int) -> np.ndarray:
    return _generator_for(config)(block_rng(config, block), n)


def iter_blocks(config: SamplerConfig):
    for b, n in config.blocks():
        yield generate_block(config, b, n)


# -- functionals ------------------------------------------------------------------------

def _rank3_product(a: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(a)
    return np.prod(w[:, 1:], axis=1)


def evaluate_functional(name: str, a: np.ndarray) -> np.ndarray:
    """Vectorised functional of a batch ``(n, 4, 4)``; real-valued output."""
    if name == "one":
        return np.ones(a.shape[0])
    if name == "det":
        return det4(a).real
    if name == "detPT":
        return det4(pt_array(a)).real
    if name == "product":
        return (det4(a) * det4(pt_array(a))).real
    if name == "commutator_det":
        b = pt_array(a)
        return det4(a @ b - b @ a).real
    if name == "minor3":
        # sign convention of the exact pipeline: minus the {1,2,3} minor of rho^PT
        return -det3(pt_array(a)[:, :3, :3]).real
    if name == "rank3_product":
        return _rank3_product(a)
    if name == "rank3_product_detPT":
        return _rank3_product(a) * det4(pt_array(a)).real
    raise ValueError(f"unknown functional {name!r}; expected one of {FUNCTIONALS}")


def ppt_indicator(a: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    return (np.linalg.eigvalsh(pt_array(a))[:, 0] >= -tol).astype(float)


# -- streaming statistics -------------------------------------------------------------

@dataclass
class MomentAccumulator:
    """Mergeable count / mean / centred-second-moment of ``x**k``, k = 1..M."""

    max_order: int
    count: int = 0
    means: np.ndarray = None
    m2: np.ndarray = None

    def __post_init__(self):
        if self.means is None:
            self.means = np.zeros(self.max_order)
            self.m2 = np.zeros(self.max_order)

    @classmethod
    def from_values(cls, x: np.ndarray, max_order: int) -> "MomentAccumulator":
        x = np.asarray(x, dtype=float)
        powers = np.stack([x ** k for k in range(1, max_order + 1)])
        means = powers.mean(axis=1)
        m2 = ((powers - means[:, None]) ** 2).sum(axis=1)
        return cls(max_order, x.size, means, m2)

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if other.count == 0:
            return self
        if self.count == 0:
            return MomentAccumulator(self.max_order, other.count, other.means.copy(), other.m2.copy())
        n = self.count + other.count
        delta = other.means - self.means
        means = self.means + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta ** 2 * (self.count * other.count / n)
        return MomentAccumulator(self.max_order, n, means, m2)

    def standard_errors(self) -> np.ndarray:
        if self.count < 2:
            return np.full(self.max_order, math.nan)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


@dataclass
class EstimateReport:
    functional: str
    mean: float
    standard_error: float
    raw_moments: List[float]
    moment_standard_errors: List[float]
    sample_count: int
    config: Dict = field(default_factory=dict)

    def z_score(self, expected: float, order: int = 1) -> float:
        se = self.moment_standard_errors[order - 1]
        diff = self.raw_moments[order - 1] - expected
        if se == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / se

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["functional", "order", "raw_moment", "standard_error", "sample_count"])
        for k, (v, se) in enumerate(zip(self.raw_moments, self.moment_standard_errors), start=1):
            w.writerow([self.functional, k, repr(v), repr(se), self.sample_count])
        return buf.getvalue()


def _block_stats(config: SamplerConfig, block: int, n: int, functionals: Sequence[str], M: int):
    a = generate_block(config, block, n)
    out = {}
    for f in functionals:
        x = ppt_indicator(a) if f == "ppt" else evaluate_functional(f, a)
        out[f] = MomentAccumulator.from_values(x, M)
    return out


def estimate_many(config: SamplerConfig, functionals: Sequence[str], M: int = 2) -> Dict[str, EstimateReport]:
    """Estimate raw moments 1..M of several functionals from one sample stream."""
    if not 1 <= M <= 10:
        raise ValueError("max moment order must be in 1..10")
    for f in functionals:
        if f != "ppt" and f not in FUNCTIONALS:
            raise ValueError(f"unknown functional {f!r}")
    blocks = config.blocks()
    job = lambda bn: _block_stats(config, bn[0], bn[1], functionals, M)  # noqa: E731
    if config.thread_count > 1:
        with ThreadPoolExecutor(config.thread_count) as pool:
            parts = list(pool.map(job, blocks))
    else:
        parts = [job(bn) for bn in blocks]
    reports = {}
    for f in functionals:
        acc = MomentAccumulator(M)
        for part in parts:
            acc = acc.merge(part[f])
        se = acc.standard_errors()
        cfg = asdict(config)
        cfg.pop("thread_count")
        reports[f] = EstimateReport(f, float(acc.means[0]), float(se[0]), [float(v) for v in acc.means],
                                    [float(v) for v in se], acc.count, cfg)
    return reports


def estimate_moments(config: SamplerConfig, functional: str, M: int = 2) -> EstimateReport:
    return estimate_many(config, [functional], M)[functional]


def ppt_probability(config: SamplerConfig) -> Tuple[float, float]:
    """Fraction of PPT (separable) samples and its binomial standard error."""
    rep = estimate_many(config, ["ppt"], 1)["ppt"]
    p = rep.mean
    return p, math.sqrt(p * (1 - p) / rep.sample_count)


def flat_acceptance_rate(scenario: str, seed: int = 0, n: int = 20_000) -> float:
    return flat_rejection_batch(np.random.default_rng(seed), n, scenario)[1]
