"""
The combinatorial limit formulas, computed exactly:

- first-order moments alpha (semicircular) and beta (compound Poisson);
- second-order covariances as sums over annular non-crossing pairings
  resp. permutations;
- leading-order r-th cumulants over multi-annular diagrams;
- the partition-side covariance psicheck_sum, which must agree with the
  permutation-side wishart_cov (the two sides of the fiber decomposition).

Slot convention everywhere: the left word occupies circle 1 (points 1..n in
gamma order), the right word circle 2 (points n+1..n+m); the reversed inner
orientation is already encoded in the membership tests of module annular.
"""
from __future__ import annotations

from typing import Sequence

from .algebra import GramSpace, Mat, MatrixAlgebra, Vec, psi_pi, psicheck_sigma
from .annular import enumerate_nc2, enumerate_nc_annular_partitions, enumerate_nc_disc, enumerate_snc
from .exact import ONE, ZERO, Scalar
from .perm import AnnulusProfile, Permutation

GAUSS_LEADING_GUARD = 14
WISHART_LEADING_GUARD = 9
PSICHECK_GUARD = 8


def alpha(space: GramSpace, fs: Sequence[Vec]) -> Scalar:
    """
    The limit of normalized-trace moments of a Gaussian family: the sum over
    disc non-crossing pairings of the Gram products; zero for odd length.
    """
    n = len(fs)
    if n % 2 != 0:
        return ZERO
    if n == 0:
        return ONE
    total = ZERO
    for pairing in enumerate_nc2(AnnulusProfile((n,))):
        term = ONE
        for i, j in pairing.pairs:
            term = term * space.inner(fs[i - 1], fs[j - 1])
        total = total + term
    return total


def beta(algebra: MatrixAlgebra, ds: Sequence[Mat]) -> Scalar:
    """
    The limit of normalized-trace moments of compound Wishart matrices: the
    sum over all disc non-crossing partitions, each block read as its unique
    increasing cycle.
    """
    n = len(ds)
    if n == 0:
        return ONE
    total = ZERO
    for part in enumerate_nc_disc(n):
        pi = Permutation.from_cycles(n, part.blocks)
        total = total + psi_pi(algebra, pi, ds)
    return total


def gauss_cov(space: GramSpace, fs: Sequence[Vec], gs: Sequence[Vec]) -> Scalar:
    """
    The limit covariance of two unnormalized Gaussian trace words: the sum
    over (n, m)-annular non-crossing pairings of the Gram products.
    """
    if not fs or not gs:
        raise ValueError("both words must be nonempty")
    return gauss_cumulant_leading(space, [fs, gs])


def wishart_cov(algebra: MatrixAlgebra, ds: Sequence[Mat], es: Sequence[Mat]) -> Scalar:
    """
    The limit covariance of two unnormalized compound-Wishart trace words:
    the sum over (n, m)-annular non-crossing permutations of psi_pi on the
    concatenated word.
    """
    if not ds or not es:
        raise ValueError("both words must be nonempty")
    return wishart_cumulant_leading(algebra, [ds, es])


def gauss_cumulant_leading(space: GramSpace, groups: Sequence[Sequence[Vec]]) -> Scalar:
    """
    The coefficient of N^(2-r) in the r-th joint cumulant of unnormalized
    Gaussian trace words: the multi-annular planar pairing sum. Zero when the
    total number of slots is odd.
    """
    sizes = tuple(len(g) for g in groups)
    if any(s < 1 for s in sizes):
        raise ValueError("every group must be nonempty")
    total = sum(sizes)
    if total > GAUSS_LEADING_GUARD:
        raise ValueError(f"total slots limited to {GAUSS_LEADING_GUARD}, got {total}")
    if total % 2 != 0:
        return ZERO
    slots = [f for g in groups for f in g]
    out = ZERO
    for pairing in enumerate_nc2(AnnulusProfile(sizes)):
        term = ONE
        for i, j in pairing.pairs:
            term = term * space.inner(slots[i - 1], slots[j - 1])
            if term.is_zero():
                break
        out = out + term
    return out


def wishart_cumulant_leading(algebra: MatrixAlgebra, groups: Sequence[Sequence[Mat]]) -> Scalar:
    """
    The coefficient of N^(2-r) in the r-th joint cumulant of unnormalized
    compound-Wishart trace words: the sum of psi_pi over multi-annular
    non-crossing permutations.
    """
    sizes = tuple(len(g) for g in groups)
    if any(s < 1 for s in sizes):
        raise ValueError("every group must be nonempty")
    total = sum(sizes)
    if total > WISHART_LEADING_GUARD:
        raise ValueError(f"total slots limited to {WISHART_LEADING_GUARD}, got {total}")
    slots = [d for g in groups for d in g]
    out = ZERO
    for ap in enumerate_snc(AnnulusProfile(sizes)):
        out = out + psi_pi(algebra, ap.perm, slots)
    return out


def psicheck_sum(algebra: MatrixAlgebra, ds: Sequence[Mat], es: Sequence[Mat]) -> Scalar:
    """
    The partition-side covariance: the sum of psicheck_sigma over all
    (n, m)-annular non-crossing partitions. Identical to wishart_cov by the
    fiber decomposition; computing it separately is the point (the equality
    is a theorem, asserted in the test suite, not a shortcut taken here).
    """
    n, m = len(ds), len(es)
    if n < 1 or m < 1:
        raise ValueError("both words must be nonempty")
    if n + m > PSICHECK_GUARD:
        raise ValueError(f"psicheck_sum limited to n+m <= {PSICHECK_GUARD}")
    slots = list(ds) + list(es)
    out = ZERO
    for sigma in enumerate_nc_annular_partitions(n, m):
        out = out + psicheck_sigma(algebra, sigma, slots)
    return out
