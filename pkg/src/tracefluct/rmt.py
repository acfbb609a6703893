"""
Random-matrix engine: seeded samplers for Hermitian Gaussian families and
compound Wishart matrices, trace statistics with unbiased cumulant
estimation, and exact finite-N moment/cumulant oracles.

Normalization anchor (fixed once): entries satisfy E|x_ij|^2 = 1/N including
the diagonal, so Var[Tr X_N(f)] == 1 exactly for every N when |f| = 1. The
oracle's N-power bookkeeping is derived from the entrywise Wick expansion
rather than transcribed: a pairing contributes N^{#(gamma pi) - n/2}, the
-n/2 coming from the n/2 covariance factors of 1/N.

Reproducibility: the generator is Philox (counter-based, keyed by the master
seed); sample i uses the stream jumped i times, so parallel and serial
evaluation orders produce identical batches. Gaussian variates come from
numpy's standard_normal on that stream.

Floats are used for samples, exact rationals for oracles; every comparison
in the tests states which side is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .algebra import GramSpace, Mat, MatrixAlgebra, Vec, psi_pi
from .annular import enumerate_pairings
from .exact import ONE, ZERO, Scalar, as_scalar, fit_inverse_powers
from .perm import AnnulusProfile, Permutation, all_permutations, join_with
from . import theory

GUE_ORACLE_GUARD = 14
WISHART_ORACLE_GUARD = 8


# ---------------------------------------------------------------------------
# exact finite-N oracles
# ---------------------------------------------------------------------------


def exact_gue_cumulant(space: GramSpace, groups: Sequence[Sequence[Vec]], N: int) -> Scalar:
    """
    The exact joint classical cumulant k_r of the unnormalized trace words
    Tr[X(f..) ... X(f..)], one word per group, at matrix size N:

        sum over pairings pi of the slots, connecting all r groups,
        of prod <f_i, f_j> * N^(#(gamma pi) - n/2).

    For r = 1 this is the plain expectation.
    """
    return _gue_pairing_sum(space, groups, N, connected_only=True)


def exact_gue_moment(space: GramSpace, groups: Sequence[Sequence[Vec]], N: int) -> Scalar:
    """E[Y_1 ... Y_r] of the trace words: the same pairing sum without the connectivity restriction."""
    return _gue_pairing_sum(space, groups, N, connected_only=False)


def _gue_pairing_sum(space, groups, N, connected_only: bool) -> Scalar:
    sizes = tuple(len(g) for g in groups)
    if any(s < 1 for s in sizes):
        raise ValueError("every trace word must be nonempty")
    total = sum(sizes)
    if total > GUE_ORACLE_GUARD:
        raise ValueError(f"oracle limited to {GUE_ORACLE_GUARD} total slots, got {total}")
    if N < 1:
        raise ValueError("N must be a positive integer")
    if total % 2 != 0:
        return ZERO
    profile = AnnulusProfile(sizes)
    gamma = profile.gamma()
    slots = [f for g in groups for f in g]
    out = ZERO
    for pairing in enumerate_pairings(total):
        p = pairing.as_permutation()
        if connected_only and join_with(p, gamma).block_count != 1:
            continue
        term = ONE
        for i, j in pairing.pairs:
            term = term * space.inner(slots[i - 1], slots[j - 1])
            if term.is_zero():
                break
        if term.is_zero():
            continue
        power = gamma.compose(p).cycle_count() - total // 2
        out = out + term * as_scalar(Fraction(N) ** power)
    return out


def exact_wishart_cumulant(
    algebra: MatrixAlgebra, groups: Sequence[Sequence[Mat]], N: int
) -> Scalar:
    """
    The exact joint cumulant k_r of Tr[P(D..) ... P(D..)] words at size N,
    with the constant matrices realized by inflation d (x) I_{N/k}:

        sum over sigma in S_n with sigma v gamma = 1_n
        of N^(#(sigma^-1 gamma) + #(sigma) - n) * psi_sigma(d_1,...,d_n).

    The psi_sigma factor is exactly tr_sigma of the inflated matrices, which
    is what makes the finite-N value a polynomial in 1/N^2 times N^(2-r).
    """
    return _wishart_perm_sum(algebra, groups, N, connected_only=True)


def exact_wishart_moment(algebra: MatrixAlgebra, groups: Sequence[Sequence[Mat]], N: int) -> Scalar:
    """E[Y_1 ... Y_r] of the compound Wishart trace words: the unrestricted permutation sum."""
    return _wishart_perm_sum(algebra, groups, N, connected_only=False)


def _wishart_perm_sum(algebra, groups, N, connected_only: bool) -> Scalar:
    sizes = tuple(len(g) for g in groups)
    if any(s < 1 for s in sizes):
        raise ValueError("every trace word must be nonempty")
    total = sum(sizes)
    if total > WISHART_ORACLE_GUARD:
        raise ValueError(f"oracle limited to {WISHART_ORACLE_GUARD} total slots, got {total}")
    if N < 1 or N % algebra.dim != 0:
        raise ValueError(f"N must be a positive multiple of the algebra dimension {algebra.dim}")
    profile = AnnulusProfile(sizes)
    gamma = profile.gamma()
    slots = [d for g in groups for d in g]
    out = ZERO
    for sigma in all_permutations(total):
        if connected_only and join_with(sigma, gamma).block_count != 1:
            continue
        psi_val = psi_pi(algebra, sigma, slots)
        if psi_val.is_zero():
            continue
        power = sigma.inverse().compose(gamma).cycle_count() + sigma.cycle_count() - total
        out = out + psi_val * as_scalar(Fraction(N) ** power)
    return out


def extract_limit(values: dict[int, Scalar], powers: Sequence[int]) -> Scalar:
    """
    The N -> infinity constant recovered by an exact fit of finite-N oracle
    values against the inverse-power basis {N^-p : p in powers} (powers must
    include 0 and match the number of sample points).
    """
    if 0 not in powers:
        raise ValueError("the constant power 0 must be part of the basis")
    coeffs = fit_inverse_powers(values, powers)
    return coeffs[list(powers).index(0)]


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianFamilySpec:
    N: int
    space: GramSpace
    seed: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not self.space.is_real():
            raise ValueError("sampling requires a real Gram matrix")


@dataclass(frozen=True)
class WishartSpec:
    N: int
    algebra: MatrixAlgebra
    seed: int

    def __post_init__(self):
        if self.N < 1 or self.N % self.algebra.dim != 0:
            raise ValueError("N must be a positive multiple of the algebra dimension")


def _rng(seed: int, sample_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(sample_index))


def _gue_matrix(rng: np.random.Generator, N: int) -> np.ndarray:
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2.0)
    return (z + z.conj().T) / np.sqrt(2.0 * N)


def _ginibre_matrix(rng: np.random.Generator, N: int) -> np.ndarray:
    return (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2.0 * N)


def _gram_factor(space: GramSpace) -> np.ndarray:
    g = np.array([[x.to_complex().real for x in row] for row in space.gram])
    w, v = np.linalg.eigh(g)
    if w.min() < -1e-9:
        raise ValueError("Gram matrix is numerically not PSD")  # exact check already passed
    return v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))


def _coords(space: GramSpace, f: Vec) -> np.ndarray:
    return np.array([c.to_complex().real for c in f.coords])


def sample_gaussian_family(spec: GaussianFamilySpec, fs: Sequence[Vec], sample_index: int) -> list[np.ndarray]:
    """
    One sample of the family {X_N(f)}: X(f) = sum_s c_s(f) Z_s with the Z_s
    independent GUE(N) draws and c(f) = L^T coords(f) for any L with
    L L^T = Gram, so that E x_ij(f) conj(x_kl(g)) = delta delta <f,g>/N.
    """
    rng = _rng(spec.seed, sample_index)
    L = _gram_factor(spec.space)
    base = [_gue_matrix(rng, spec.N) for _ in range(spec.space.dim)]
    out = []
    for f in fs:
        c = L.T @ _coords(spec.space, f)
        out.append(sum(c[s] * base[s] for s in range(spec.space.dim)))
    return out


def inflate(d: Mat, N: int) -> Mat:
    """Exact block inflation d (x) I_{N/k}; every trace word equals psi of the word."""
    k = d.dim
    if N % k != 0:
        raise ValueError(f"N = {N} is not a multiple of the block size {k}")
    reps = N // k
    rows = []
    for i in range(k):
        for a in range(reps):
            row = []
            for j in range(k):
                for b in range(reps):
                    row.append(d.entries[i][j] if a == b else ZERO)
            rows.append(tuple(row))
    return Mat(tuple(rows))


def inflate_float(d: Mat, N: int) -> np.ndarray:
    k = d.dim
    if N % k != 0:
        raise ValueError(f"N = {N} is not a multiple of the block size {k}")
    return np.kron(d.to_numpy(), np.eye(N // k))


def sample_compound_wishart(spec: WishartSpec, ds: Sequence[Mat], sample_index: int) -> list[np.ndarray]:
    """One sample of {P(d_i)}: a shared Ginibre X and P(d) = X* inflate(d) X."""
    rng = _rng(spec.seed, sample_index)
    x = _ginibre_matrix(rng, spec.N)
    xh = x.conj().T
    return [xh @ inflate_float(d, spec.N) @ x for d in ds]


def _trace_product(mats: Sequence[np.ndarray]) -> complex:
    if len(mats) == 1:
        return complex(np.trace(mats[0]))
    prod = mats[0]
    for m in mats[1:-1]:
        prod = prod @ m
    return complex(np.einsum("ij,ji->", prod, mats[-1]))


# ---------------------------------------------------------------------------
# sample batches and k-statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CumulantEstimates:
    k1: float
    k2: float
    k3: float
    k4: float
    k1_se: float
    k2_se: float
    k3_se: float
    k4_se: float


def k_statistics(x: np.ndarray) -> tuple[float, float, float, float]:
    """
    The unbiased k-statistics (k1..k4) of a sample: minimum-variance unbiased
    estimators of the classical cumulants.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 4:
        raise ValueError("k-statistics through k4 need at least 4 samples")
    mean = x.mean()
    d = x - mean
    m2 = np.mean(d**2)
    m3 = np.mean(d**3)
    m4 = np.mean(d**4)
    k1 = mean
    k2 = n / (n - 1) * m2
    k3 = n**2 / ((n - 1) * (n - 2)) * m3
    k4 = n**2 * ((n + 1) * m4 - 3 * (n - 1) * m2**2) / ((n - 1) * (n - 2) * (n - 3))
    return float(k1), float(k2), float(k3), float(k4)


def joint_k2(x: np.ndarray, y: np.ndarray) -> float:
    """Unbiased sample covariance (the bivariate k-statistic k_{11})."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 2 or len(y) != n:
        raise ValueError("joint_k2 needs two equally long samples with n >= 2")
    return float(n / (n - 1) * (np.mean(x * y) - x.mean() * y.mean()))


def batched_se(values: np.ndarray, estimator: Callable[[np.ndarray], float], nbatches: int = 10) -> float:
    """Standard error of an estimator by splitting the sample into sub-batches."""
    m = len(values) // nbatches
    if m < 4:
        raise ValueError("not enough samples per batch")
    estimates = [estimator(values[i * m : (i + 1) * m]) for i in range(nbatches)]
    return float(np.std(estimates, ddof=1) / np.sqrt(nbatches))


@dataclass(frozen=True)
class SampleBatch:
    """Per-sample values of trace statistics: columns = statistics, rows = samples."""

    labels: tuple[str, ...]
    values: np.ndarray
    seed: int

    @property
    def count(self) -> int:
        return self.values.shape[0]

    def column(self, label: str) -> np.ndarray:
        return self.values[:, self.labels.index(label)]

    def cumulants(self, label: str, nbatches: int = 10) -> CumulantEstimates:
        x = self.column(label)
        k1, k2, k3, k4 = k_statistics(x)
        ses = [
            batched_se(x, lambda v, i=i: k_statistics(v)[i], nbatches=nbatches) for i in range(4)
        ]
        return CumulantEstimates(k1, k2, k3, k4, *ses)

    def covariance(self, label_x: str, label_y: str, nbatches: int = 10) -> tuple[float, float]:
        """Unbiased joint k2 with its batched standard error."""
        x = self.column(label_x)
        y = self.column(label_y)
        est = joint_k2(x, y)
        m = len(x) // nbatches
        if m < 2:
            raise ValueError("not enough samples per batch")
        subs = [joint_k2(x[i * m : (i + 1) * m], y[i * m : (i + 1) * m]) for i in range(nbatches)]
        se = float(np.std(subs, ddof=1) / np.sqrt(nbatches))
        return est, se


def _real_stat(value: complex) -> float:
    if abs(value.imag) > 1e-8 * max(1.0, abs(value.real)):
        raise AssertionError(f"statistic expected real, got {value}")
    return value.real


def gaussian_trace_batch(
    space: GramSpace, words: Sequence[Sequence[Vec]], N: int, samples: int, seed: int
) -> SampleBatch:
    """Monte Carlo batch of Tr[X(f_1)...X(f_k)] for each word."""
    spec = GaussianFamilySpec(N, space, seed)
    distinct: list[Vec] = []
    for w in words:
        for f in w:
            if all(f is not g and f != g for g in distinct):
                distinct.append(f)
    labels = tuple(f"gauss_word_{i}" for i in range(len(words)))
    values = np.empty((samples, len(words)))
    for idx in range(samples):
        mats = sample_gaussian_family(spec, distinct, idx)
        lookup = {id(f): m for f, m in zip(distinct, mats)}

        def mat_of(f):
            for g, m in zip(distinct, mats):
                if f is g or f == g:
                    return m
            raise KeyError

        for j, w in enumerate(words):
            values[idx, j] = _real_stat(_trace_product([mat_of(f) for f in w]))
    return SampleBatch(labels, values, seed)


def wishart_trace_batch(
    algebra: MatrixAlgebra, words: Sequence[Sequence[Mat]], N: int, samples: int, seed: int
) -> SampleBatch:
    """Monte Carlo batch of Tr[P(d_1)...P(d_k)] for each word."""
    spec = WishartSpec(N, algebra, seed)
    distinct: list[Mat] = []
    for w in words:
        for d in w:
            if all(d != e for e in distinct):
                distinct.append(d)
    labels = tuple(f"wishart_word_{i}" for i in range(len(words)))
    values = np.empty((samples, len(words)))
    for idx in range(samples):
        ps = sample_compound_wishart(spec, distinct, idx)

        def mat_of(d):
            for e, m in zip(distinct, ps):
                if d == e:
                    return m
            raise KeyError

        for j, w in enumerate(words):
            values[idx, j] = _real_stat(_trace_product([mat_of(d) for d in w]))
    return SampleBatch(labels, values, seed)


def polynomial_trace_batch(
    space: GramSpace,
    f: Vec,
    polys: Sequence[Sequence[Fraction]],
    N: int,
    samples: int,
    seed: int,
) -> SampleBatch:
    """Monte Carlo batch of Tr q(X(f)) for each polynomial q (coefficients by degree)."""
    spec = GaussianFamilySpec(N, space, seed)
    max_deg = max(len(p) - 1 for p in polys)
    labels = tuple(f"poly_{i}" for i in range(len(polys)))
    values = np.empty((samples, len(polys)))
    coeffs = [np.array([float(c) for c in p]) for p in polys]
    for idx in range(samples):
        (x,) = sample_gaussian_family(spec, [f], idx)
        powers = [np.eye(N, dtype=complex)]
        for _ in range(max_deg):
            powers.append(powers[-1] @ x)
        traces = np.array([np.trace(p) for p in powers])
        for j, c in enumerate(coeffs):
            values[idx, j] = _real_stat(complex(np.dot(c, traces[: len(c)])))
    return SampleBatch(labels, values, seed)


def gue_constant_word_batch(
    space: GramSpace,
    f: Vec,
    d: Mat,
    words: Sequence[str],
    N: int,
    samples: int,
    seed: int,
) -> SampleBatch:
    """
    Monte Carlo batch of mixed trace words over the alphabet {"X", "D"}:
    "XDXD" means Tr[X D X D] with X = X(f) and D the inflated constant.
    """
    spec = GaussianFamilySpec(N, space, seed)
    dmat = inflate_float(d, N)
    labels = tuple(words)
    values = np.empty((samples, len(words)))
    for idx in range(samples):
        (x,) = sample_gaussian_family(spec, [f], idx)
        for j, w in enumerate(words):
            mats = [x if ch == "X" else dmat for ch in w]
            values[idx, j] = _real_stat(_trace_product(mats))
    return SampleBatch(labels, values, seed)


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRequest:
    flavor: str  # "gaussian" | "wishart"
    left: tuple
    right: tuple
    n_list: tuple[int, ...]
    samples: int
    seed: int

    def __post_init__(self):
        if self.flavor not in ("gaussian", "wishart"):
            raise ValueError("flavor must be gaussian or wishart")
        if not self.n_list:
            raise ValueError("need at least one N")


def convergence_study(request: ConvergenceRequest, model) -> list[dict]:
    """
    For each N: Monte Carlo k1 (left word), joint k2, k3 (left word), the
    exact oracle k2 at that N where the guards allow, and the theory limit.
    ``model`` is the GramSpace (gaussian) or MatrixAlgebra (wishart).
    """
    rows = []
    left, right = list(request.left), list(request.right)
    if request.flavor == "gaussian":
        limit = theory.gauss_cov(model, left, right)
        oracle = lambda N: exact_gue_cumulant(model, [left, right], N)
        batcher = lambda N: gaussian_trace_batch(model, [left, right], N, request.samples, request.seed)
        guard_ok = len(left) + len(right) <= GUE_ORACLE_GUARD
    else:
        limit = theory.wishart_cov(model, left, right)
        oracle = lambda N: exact_wishart_cumulant(model, [left, right], N)
        batcher = lambda N: wishart_trace_batch(model, [left, right], N, request.samples, request.seed)
        guard_ok = len(left) + len(right) <= WISHART_ORACLE_GUARD
    limit_f = limit.to_complex().real
    for N in request.n_list:
        batch = batcher(N)
        la, lb = batch.labels
        cums = batch.cumulants(la)
        k2, k2_se = batch.covariance(la, lb)
        oracle_k2 = None
        if guard_ok:
            try:
                oracle_k2 = oracle(N).to_complex().real
            except ValueError:
                oracle_k2 = None
        rows.append(
            {
                "N": N,
                "statistic": f"{request.flavor}:{len(left)}x{len(right)}",
                "k1": cums.k1,
                "k1_se": cums.k1_se,
                "k2": k2,
                "k2_se": k2_se,
                "k3": cums.k3,
                "k3_se": cums.k3_se,
                "oracle_k2": oracle_k2,
                "theory_limit": limit_f,
            }
        )
    return rows
