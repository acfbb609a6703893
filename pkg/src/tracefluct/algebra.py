"""
Concrete exact models for the two flavors of input data:

- a finite-dimensional real (or complex) Hilbert space presented by a
  rational Gram matrix, for the semi-circular side;
- a *-algebra of small exact matrices with the normalized trace as its
  state, for the compound-Poisson side.

Plus the functionals built from them: psi on words, psi_pi over the cycles
of a permutation, Tr_sigma on concrete matrices, and the block functional
psicheck_sigma on annular non-crossing partitions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .annular import AnnularPartition, block_cycle_orders
from .exact import ONE, ZERO, Scalar, as_scalar, is_psd_hermitian, parse_scalar
from .perm import Permutation

GRAM_DIM_GUARD = 8
MATRIX_DIM_GUARD = 6


@dataclass(frozen=True)
class GramSpace:
    """
    A Hilbert space given by its exact Gram matrix G[i][j] = <e_i, e_j>.
    The matrix must be Hermitian and positive semidefinite; for the real
    Hilbert spaces used by the Gaussian family it is real symmetric.
    """

    gram: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        k = len(self.gram)
        if not 1 <= k <= GRAM_DIM_GUARD:
            raise ValueError(f"Gram dimension must be in [1,{GRAM_DIM_GUARD}], got {k}")
        if any(len(row) != k for row in self.gram):
            raise ValueError("Gram matrix must be square")
        for i in range(k):
            for j in range(k):
                if self.gram[i][j] != self.gram[j][i].conjugate():
                    raise ValueError("Gram matrix must be Hermitian")
        if not is_psd_hermitian(self.gram):
            raise ValueError("Gram matrix is not positive semidefinite")

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "GramSpace":
        return GramSpace(tuple(tuple(as_scalar(x) for x in row) for row in rows))

    @staticmethod
    def from_json(obj) -> "GramSpace":
        return GramSpace(tuple(tuple(parse_scalar(x) for x in row) for row in obj))

    @staticmethod
    def orthonormal(k: int) -> "GramSpace":
        return GramSpace.from_rows([[1 if i == j else 0 for j in range(k)] for i in range(k)])

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.gram)
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def dim(self) -> int:
        return len(self.gram)

    def is_real(self) -> bool:
        return all(s.is_real() for row in self.gram for s in row)

    def basis(self, i: int) -> "Vec":
        if not 0 <= i < self.dim:
            raise ValueError(f"basis index {i} out of range")
        return Vec(self, tuple(ONE if j == i else ZERO for j in range(self.dim)))

    def inner(self, f: "Vec", g: "Vec") -> Scalar:
        """<f, g> = coords(f)^T . G . conj(coords(g)): linear in f, conjugate-linear in g."""
        if f.space is not self and f.space != self:
            raise ValueError("vector f does not live in this space")
        if g.space is not self and g.space != self:
            raise ValueError("vector g does not live in this space")
        total = ZERO
        for a, fa in enumerate(f.coords):
            if fa.is_zero():
                continue
            for b, gb in enumerate(g.coords):
                if gb.is_zero():
                    continue
                total = total + fa * self.gram[a][b] * gb.conjugate()
        return total


@dataclass(frozen=True)
class Vec:
    """A vector in a GramSpace, as exact coordinates over the distinguished basis."""

    space: GramSpace
    coords: tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.coords) != self.space.dim:
            raise ValueError("coordinate length does not match space dimension")

    def __hash__(self):
        # hot path: Fock words are tuples of Vec keys, so cache the hash
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.coords)
            object.__setattr__(self, "_hash", h)
        return h

    def conj(self) -> "Vec":
        """Entrywise conjugation over the distinguished real basis."""
        return Vec(self.space, tuple(c.conjugate() for c in self.coords))

    def __add__(self, other: "Vec") -> "Vec":
        if self.space != other.space:
            raise ValueError("space mismatch")
        return Vec(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def scale(self, s) -> "Vec":
        s = as_scalar(s)
        return Vec(self.space, tuple(s * c for c in self.coords))

    def sort_key(self):
        return tuple(c.sort_key() for c in self.coords)

    def __repr__(self):
        return "Vec(" + ", ".join(str(c) for c in self.coords) + ")"


def inner(f: Vec, g: Vec) -> Scalar:
    return f.space.inner(f, g)


@dataclass(frozen=True)
class Mat:
    """An exact k x k matrix, the element type of MatrixAlgebra."""

    entries: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        k = len(self.entries)
        if k < 1 or any(len(row) != k for row in self.entries):
            raise ValueError("Mat must be square and nonempty")

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "Mat":
        return Mat(tuple(tuple(as_scalar(x) for x in row) for row in rows))

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.entries)
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __mul__(self, other: "Mat") -> "Mat":
        k = self.dim
        if other.dim != k:
            raise ValueError("matrix size mismatch")
        rows = []
        for i in range(k):
            row = []
            for j in range(k):
                acc = ZERO
                for l in range(k):
                    a = self.entries[i][l]
                    if a.is_zero():
                        continue
                    acc = acc + a * other.entries[l][j]
                row.append(acc)
            rows.append(tuple(row))
        return Mat(tuple(rows))

    def __add__(self, other: "Mat") -> "Mat":
        if other.dim != self.dim:
            raise ValueError("matrix size mismatch")
        return Mat(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def scale(self, s) -> "Mat":
        s = as_scalar(s)
        return Mat(tuple(tuple(s * x for x in row) for row in self.entries))

    def adjoint(self) -> "Mat":
        k = self.dim
        return Mat(tuple(tuple(self.entries[j][i].conjugate() for j in range(k)) for i in range(k)))

    def trace(self) -> Scalar:
        t = ZERO
        for i in range(self.dim):
            t = t + self.entries[i][i]
        return t

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def sort_key(self):
        return tuple(x.sort_key() for row in self.entries for x in row)

    def to_numpy(self):
        import numpy as np

        return np.array([[x.to_complex() for x in row] for row in self.entries])

    def __repr__(self):
        return "Mat(" + "; ".join(",".join(str(x) for x in row) for row in self.entries) + ")"


@dataclass(frozen=True)
class MatrixAlgebra:
    """
    The full k x k matrix *-algebra with state psi = normalized trace.
    Traciality and positivity of psi hold by construction and are asserted
    in the test suite rather than at runtime.
    """

    dim: int

    def __post_init__(self):
        if not 1 <= self.dim <= MATRIX_DIM_GUARD:
            raise ValueError(f"matrix algebra dimension must be in [1,{MATRIX_DIM_GUARD}]")

    def element(self, rows: Sequence[Sequence]) -> Mat:
        m = Mat.from_rows(rows)
        if m.dim != self.dim:
            raise ValueError(f"expected {self.dim}x{self.dim} entries")
        return m

    def from_json(self, obj) -> Mat:
        return self.element([[parse_scalar(x) for x in row] for row in obj])

    def identity(self) -> Mat:
        return self.element([[1 if i == j else 0 for j in range(self.dim)] for i in range(self.dim)])

    def zero(self) -> Mat:
        return self.element([[0] * self.dim for _ in range(self.dim)])

    def psi(self, m: Mat) -> Scalar:
        if m.dim != self.dim:
            raise ValueError("element of the wrong algebra")
        return m.trace() * as_scalar(Fraction(1, self.dim))

    def psi_word(self, word: Sequence[Mat]) -> Scalar:
        """psi of the product of a nonempty word of elements."""
        if not word:
            raise ValueError("psi_word needs a nonempty word")
        prod = word[0]
        for m in word[1:]:
            prod = prod * m
        return self.psi(prod)


def psi_pi(algebra: MatrixAlgebra, pi: Permutation, ds: Sequence[Mat]) -> Scalar:
    """
    The permutation functional: the product over the cycles (r_1,...,r_l) of
    pi of psi(d_{r_1} ... d_{r_l}). Well defined on cycles because psi is a
    trace. Cycle order matters: (1,2,3) and (1,3,2) differ in general.
    """
    if pi.size != len(ds):
        raise ValueError(f"permutation size {pi.size} != word length {len(ds)}")
    total = ONE
    for cycle in pi.cycles():
        total = total * algebra.psi_word([ds[i - 1] for i in cycle])
    return total


def tr_sigma(sigma: Permutation, mats: Sequence, normalized: bool = False):
    """
    Product over the cycles of sigma of the trace of the cycle-ordered matrix
    product. Works on numpy arrays (returns complex) and on exact Mat values
    (returns Scalar). ``normalized`` divides each factor by N.
    """
    if sigma.size != len(mats):
        raise ValueError("permutation size does not match number of matrices")
    if len(mats) == 0:
        raise ValueError("need at least one matrix")
    if isinstance(mats[0], Mat):
        dim = mats[0].dim
        if any(m.dim != dim for m in mats):
            raise ValueError("matrix size mismatch")
        total = ONE
        for cycle in sigma.cycles():
            prod = mats[cycle[0] - 1]
            for i in cycle[1:]:
                prod = prod * mats[i - 1]
            factor = prod.trace()
            if normalized:
                factor = factor * as_scalar(Fraction(1, dim))
            total = total * factor
        return total

    import numpy as np

    dim = mats[0].shape[0]
    if any(m.shape != (dim, dim) for m in mats):
        raise ValueError("matrix shape mismatch")
    total = 1.0 + 0.0j
    for cycle in sigma.cycles():
        prod = mats[cycle[0] - 1]
        for i in cycle[1:]:
            prod = prod @ mats[i - 1]
        factor = np.trace(prod)
        if normalized:
            factor = factor / dim
        total *= factor
    return total


def psicheck2(algebra: MatrixAlgebra, xs: Sequence[Mat], ys: Sequence[Mat]) -> Scalar:
    """
    The single-through-block functional: the double sum over cut points of
    psi of the cyclic splice

        psi(y_l..y_q y_1..y_{l-1} x_{k+1}..x_p x_1..x_k),

    tracial in each of the two argument groups separately.
    """
    p, q = len(xs), len(ys)
    if p < 1 or q < 1:
        raise ValueError("both argument groups must be nonempty")
    total = ZERO
    for k in range(1, p + 1):
        for l in range(1, q + 1):
            word = list(ys[l - 1 :]) + list(ys[: l - 1]) + list(xs[k:]) + list(xs[:k])
            total = total + algebra.psi_word(word)
    return total


def psicheck_sigma(algebra: MatrixAlgebra, sigma: AnnularPartition, ds: Sequence[Mat]) -> Scalar:
    """
    The block functional on an annular non-crossing partition: ordinary
    blocks (and every block when there are two or more through-blocks)
    contribute psi of their uniquely ordered cycle; a unique through-block
    contributes the spliced double sum psicheck2 of its two sides.
    """
    if len(ds) != sigma.n + sigma.m:
        raise ValueError("word length does not match the partition's annulus")
    total = ONE
    unique_through = len(sigma.through_blocks) == 1
    orders = block_cycle_orders(sigma)
    for idx in range(len(sigma.partition.blocks)):
        if unique_through and idx == sigma.through_blocks[0]:
            xs = [ds[i - 1] for i in sigma.outer_part(idx)]
            ys = [ds[i - 1] for i in sigma.inner_part(idx)]
            total = total * psicheck2(algebra, xs, ys)
        else:
            (order,) = orders[idx]
            total = total * algebra.psi_word([ds[i - 1] for i in order])
    return total
