"""
Exact symbolic linear and cyclic Fock spaces.

Two flavors share the machinery:

- semicircular: slots are Gram-space vectors, the field operator is
  omega(f) = l(f) + l*(conj f);
- Poisson: slots are exact matrices d with slot inner product psi(e* d),
  and the field operator is p(d) = l(d) + l*(d*) + Lambda(d) + psi(d) 1.

Operators are never materialized as matrices; they act on FockVector values,
and algebra elements are represented by OpPoly, a formal linear combination
of generator words (words in omega(f_i) resp. p(d_i)). Since the vacuum is
cyclic and separating for both generated algebras, applying both sides of an
operator identity to spanning vectors decides it.

The cyclic layer: CyclicVector stores circular tensor words by their
lexicographically minimal rotation; cyc() is the wrap-and-pair map from the
linear to the cyclic space (one recursion per flavor), and cyc_inner is the
rotation-sum inner product, conjugate-linear in its second argument.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .algebra import GramSpace, Mat, MatrixAlgebra, Vec
from .exact import ONE, ZERO, Scalar, as_scalar

Slot = Union[Vec, Mat]


@dataclass(frozen=True)
class SemicircularSpace:
    """Fock model over a GramSpace; slots are vectors."""

    gram_space: GramSpace

    flavor = "semicircular"

    def _cache(self) -> dict:
        cache = self.__dict__.get("_inner_cache")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_inner_cache", cache)
        return cache

    def slot_inner(self, a: Vec, b: Vec) -> Scalar:
        cache = self._cache()
        key = (a, b)
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = self.gram_space.inner(a, b)
        return hit

    def slot_conj(self, a: Vec) -> Vec:
        cache = self.__dict__.get("_conj_cache")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_conj_cache", cache)
        hit = cache.get(a)
        if hit is None:
            hit = cache[a] = a.conj()
        return hit

    def generator_adjoint(self, f: Vec) -> Vec:
        # omega(f)* = omega(conj f)
        return f.conj()

    def check_slot(self, a):
        if not isinstance(a, Vec) or a.space != self.gram_space:
            raise ValueError("slot does not belong to this semicircular space")


@dataclass(frozen=True)
class PoissonSpace:
    """Fock model over a matrix *-algebra; slots are algebra elements."""

    algebra: MatrixAlgebra

    flavor = "poisson"

    def _cache(self, name: str) -> dict:
        cache = self.__dict__.get(name)
        if cache is None:
            cache = {}
            object.__setattr__(self, name, cache)
        return cache

    def slot_inner(self, a: Mat, b: Mat) -> Scalar:
        # GNS inner product <a, b> = psi(b* a) = (1/k) sum_ij conj(b_ij) a_ij
        cache = self._cache("_inner_cache")
        key = (a, b)
        hit = cache.get(key)
        if hit is not None:
            return hit
        total = ZERO
        for ra, rb in zip(a.entries, b.entries):
            for xa, xb in zip(ra, rb):
                if not xa.is_zero() and not xb.is_zero():
                    total = total + xb.conjugate() * xa
        hit = total * as_scalar(Fraction(1, a.dim))
        cache[key] = hit
        return hit

    def slot_conj(self, a: Mat) -> Mat:
        cache = self._cache("_star_cache")
        hit = cache.get(a)
        if hit is None:
            hit = cache[a] = a.adjoint()
        return hit

    def generator_adjoint(self, d: Mat) -> Mat:
        # p(d)* = p(d*)
        return self.slot_conj(d)

    def psi(self, d: Mat) -> Scalar:
        cache = self._cache("_psi_cache")
        hit = cache.get(d)
        if hit is None:
            hit = cache[d] = self.algebra.psi(d)
        return hit

    def mul(self, a: Mat, b: Mat) -> Mat:
        cache = self._cache("_mul_cache")
        key = (a, b)
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = a * b
        return hit

    def check_slot(self, a):
        if not isinstance(a, Mat) or a.dim != self.algebra.dim:
            raise ValueError("slot does not belong to this Poisson space")


Space = Union[SemicircularSpace, PoissonSpace]


class FockVector:
    """
    A finite formal linear combination of tensor words over one model space.
    The empty word is the vacuum. Canonical: no zero coefficients.
    """

    __slots__ = ("space", "terms")

    def __init__(self, space: Space, terms: dict[tuple, Scalar] | None = None):
        self.space = space
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    @staticmethod
    def vacuum(space: Space) -> "FockVector":
        return FockVector(space, {(): ONE})

    @staticmethod
    def word(space: Space, slots: Sequence[Slot]) -> "FockVector":
        for s in slots:
            space.check_slot(s)
        return FockVector(space, {tuple(slots): ONE})

    @staticmethod
    def zero(space: Space) -> "FockVector":
        return FockVector(space, {})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FockVector") -> "FockVector":
        if self.space is not other.space and self.space != other.space:
            raise ValueError("flavor mismatch between Fock vectors")
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return FockVector(self.space, out)

    def scale(self, s) -> "FockVector":
        s = as_scalar(s)
        if s.is_zero():
            return FockVector(self.space, {})
        return FockVector(self.space, {w: s * c for w, c in self.terms.items()})

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, FockVector) and self.terms == other.terms

    def vacuum_coefficient(self) -> Scalar:
        return self.terms.get((), ZERO)

    def __repr__(self):
        if not self.terms:
            return "FockVector(0)"
        bits = []
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), str(t[0]))):
            label = "Omega" if not w else "(" + " . ".join(repr(s) for s in w) + ")"
            bits.append(f"{c} * {label}")
        return "FockVector[" + " + ".join(bits) + "]"


# ---------------------------------------------------------------------------
# elementary operators
# ---------------------------------------------------------------------------


def _accumulate(acc: dict, word: tuple, coef: Scalar):
    prev = acc.get(word)
    acc[word] = coef if prev is None else prev + coef


def apply_creation(f: Slot, v: FockVector) -> FockVector:
    """l(f): prepend a slot; l(f) Omega is the one-particle word (f)."""
    v.space.check_slot(f)
    return FockVector(v.space, {(f,) + w: c for w, c in v.terms.items()})


def apply_annihilation(f: Slot, v: FockVector) -> FockVector:
    """l*(f): strip the first slot against <w_1, f>; kills the vacuum."""
    v.space.check_slot(f)
    out: dict[tuple, Scalar] = {}
    for w, c in v.terms.items():
        if not w:
            continue
        coef = v.space.slot_inner(w[0], f) * c
        if coef.is_zero():
            continue
        _accumulate(out, w[1:], coef)
    return FockVector(v.space, out)


def apply_omega(f: Vec, v: FockVector) -> FockVector:
    """omega(f) = l(f) + l*(conj f) on the semicircular flavor."""
    if v.space.flavor != "semicircular":
        raise ValueError("omega acts on the semicircular flavor")
    space = v.space
    fbar = space.slot_conj(f)
    out: dict[tuple, Scalar] = {}
    for w, c in v.terms.items():
        _accumulate(out, (f,) + w, c)
        if w:
            coef = space.slot_inner(w[0], fbar) * c
            if not coef.is_zero():
                _accumulate(out, w[1:], coef)
    return FockVector(space, out)


def apply_preservation(d: Mat, v: FockVector) -> FockVector:
    """Lambda(d): multiply into the first slot; kills the vacuum."""
    if v.space.flavor != "poisson":
        raise ValueError("preservation acts on the Poisson flavor")
    v.space.check_slot(d)
    out: dict[tuple, Scalar] = {}
    for w, c in v.terms.items():
        if not w:
            continue
        _accumulate(out, (v.space.mul(d, w[0]),) + w[1:], c)
    return FockVector(v.space, out)


def apply_poisson(d: Mat, v: FockVector) -> FockVector:
    """p(d) = l(d) + l*(d*) + Lambda(d) + psi(d) 1."""
    if v.space.flavor != "poisson":
        raise ValueError("p(d) acts on the Poisson flavor")
    space = v.space
    dstar = space.slot_conj(d)
    psi_d = space.psi(d)
    out: dict[tuple, Scalar] = {}
    for w, c in v.terms.items():
        _accumulate(out, (d,) + w, c)
        if not psi_d.is_zero():
            _accumulate(out, w, psi_d * c)
        if w:
            coef = space.slot_inner(w[0], dstar) * c
            if not coef.is_zero():
                _accumulate(out, w[1:], coef)
            _accumulate(out, (space.mul(d, w[0]),) + w[1:], c)
    return FockVector(space, out)


def apply_generator(space: Space, atom: Slot, v: FockVector) -> FockVector:
    if space.flavor == "semicircular":
        return apply_omega(atom, v)
    return apply_poisson(atom, v)


def apply_word(space: Space, atoms: Sequence[Slot], v: FockVector) -> FockVector:
    """Apply the operator word atoms[0] . atoms[1] ... (rightmost acts first)."""
    for atom in reversed(atoms):
        v = apply_generator(space, atom, v)
    return v


# ---------------------------------------------------------------------------
# operator polynomials
# ---------------------------------------------------------------------------


class OpPoly:
    """
    A formal linear combination of generator words: sum_w c_w * g(w_1)...g(w_k)
    with g = omega or p depending on the flavor. Supports the ring operations,
    the adjoint, and application to Fock vectors.
    """

    __slots__ = ("space", "terms", "_vector_cache")

    def __init__(self, space: Space, terms: dict[tuple, Scalar] | None = None):
        self.space = space
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}
        self._vector_cache = None

    @staticmethod
    def one(space: Space) -> "OpPoly":
        return OpPoly(space, {(): ONE})

    @staticmethod
    def zero(space: Space) -> "OpPoly":
        return OpPoly(space, {})

    @staticmethod
    def generator(space: Space, atom: Slot) -> "OpPoly":
        space.check_slot(atom)
        return OpPoly(space, {(atom,): ONE})

    @staticmethod
    def from_word(space: Space, atoms: Sequence[Slot]) -> "OpPoly":
        for a in atoms:
            space.check_slot(a)
        return OpPoly(space, {tuple(atoms): ONE})

    def __add__(self, other: "OpPoly") -> "OpPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return OpPoly(self.space, out)

    def __sub__(self, other: "OpPoly") -> "OpPoly":
        return self + other.scale(-1)

    def scale(self, s) -> "OpPoly":
        s = as_scalar(s)
        return OpPoly(self.space, {w: s * c for w, c in self.terms.items()})

    def __mul__(self, other: "OpPoly") -> "OpPoly":
        out: dict[tuple, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, ZERO) + c1 * c2
        return OpPoly(self.space, out)

    def __pow__(self, k: int) -> "OpPoly":
        out = OpPoly.one(self.space)
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self) -> "OpPoly":
        out: dict[tuple, Scalar] = {}
        for w, c in self.terms.items():
            new = tuple(self.space.generator_adjoint(a) for a in reversed(w))
            out[new] = out.get(new, ZERO) + c.conjugate()
        return OpPoly(self.space, out)

    def apply(self, v: FockVector) -> FockVector:
        acc: dict[tuple, Scalar] = {}
        for w, c in self.terms.items():
            for word, coef in apply_word(self.space, w, v).terms.items():
                _accumulate(acc, word, c * coef)
        return FockVector(self.space, acc)

    def vector(self) -> FockVector:
        """The image of the vacuum (cached; OpPoly values are immutable)."""
        if self._vector_cache is None:
            self._vector_cache = self.apply(FockVector.vacuum(self.space))
        return self._vector_cache

    def phi(self) -> Scalar:
        """The vacuum state <x Omega, Omega>."""
        return self.vector().vacuum_coefficient()

    def __eq__(self, other) -> bool:
        return isinstance(other, OpPoly) and self.terms == other.terms

    def __repr__(self):
        gen = "omega" if self.space.flavor == "semicircular" else "p"
        if not self.terms:
            return "OpPoly(0)"
        bits = []
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), str(t[0]))):
            label = "1" if not w else " ".join(f"{gen}({a!r})" for a in w)
            bits.append(f"{c} * {label}")
        return "OpPoly[" + " + ".join(bits) + "]"


# ---------------------------------------------------------------------------
# Wick products
# ---------------------------------------------------------------------------


def wick(space: Space, word: Sequence[Slot]) -> OpPoly:
    """
    The Wick product W(word): the unique algebra element with
    W(word) Omega == word. Semicircular flavor: the two-term recursion

        W(f . w) = omega(f) W(w) - <w_1, conj f> W(w[1:]).

    Poisson flavor: the free Kailath-Segall four-term recursion

        W(d . w) = p(d) W(w) - psi(d w_1) W(w[1:]) - W(d w_1 . w[1:]) - psi(d) W(w).
    """
    memo: dict[tuple, OpPoly] = {}
    if space.flavor == "semicircular":
        return _wick_semi(space, tuple(word), memo)
    return _wick_poisson(space, tuple(word), memo)


def _wick_semi(space: SemicircularSpace, word: tuple, memo: dict) -> OpPoly:
    if word in memo:
        return memo[word]
    if not word:
        out = OpPoly.one(space)
    else:
        f, rest = word[0], word[1:]
        out = OpPoly.generator(space, f) * _wick_semi(space, rest, memo)
        if rest:
            coef = space.slot_inner(rest[0], space.slot_conj(f))
            out = out - _wick_semi(space, rest[1:], memo).scale(coef)
    memo[word] = out
    return out


def _wick_poisson(space: PoissonSpace, word: tuple, memo: dict) -> OpPoly:
    if word in memo:
        return memo[word]
    if not word:
        out = OpPoly.one(space)
    else:
        d, rest = word[0], word[1:]
        out = OpPoly.generator(space, d) * _wick_poisson(space, rest, memo)
        out = out - _wick_poisson(space, rest, memo).scale(space.psi(d))
        if rest:
            fused = space.mul(d, rest[0])
            out = out - _wick_poisson(space, rest[1:], memo).scale(space.psi(fused))
            out = out - _wick_poisson(space, (fused,) + rest[1:], memo)
    memo[word] = out
    return out


def kailath_segall(space: PoissonSpace, word: Sequence[Mat]) -> OpPoly:
    """Alias: the Poisson-flavor Wick products are the Kailath-Segall polynomials."""
    if space.flavor != "poisson":
        raise ValueError("Kailath-Segall polynomials live on the Poisson flavor")
    return wick(space, word)


def cyclic_wick(space: Space, word: Sequence[Slot]) -> OpPoly:
    """
    The cyclic Wick product C(word), characterized by cyc(C(word) Omega) == [word].

    Semicircular: C(w) = W(w) - <w_1, conj w_n> W(w[1:-1])  (n >= 2), C(f) = omega(f).
    Poisson: solved top-down from
        W(w) = C(w) + C(w_n w_1 . w[1:-1]) + psi(w_1 w_n) W(w[1:-1]).
    """
    word = tuple(word)
    if len(word) < 1:
        raise ValueError("cyclic Wick products need at least one slot")
    if space.flavor == "semicircular":
        if len(word) == 1:
            return OpPoly.generator(space, word[0])
        coef = space.slot_inner(word[0], space.slot_conj(word[-1]))
        return wick(space, word) - wick(space, word[1:-1]).scale(coef)
    return _cyclic_wick_poisson(space, word, {})


def _cyclic_wick_poisson(space: PoissonSpace, word: tuple, memo: dict) -> OpPoly:
    if word in memo:
        return memo[word]
    if len(word) == 1:
        out = wick(space, word)
    else:
        fused = (space.mul(word[-1], word[0]),) + word[1:-1]
        out = wick(space, word) - _cyclic_wick_poisson(space, fused, memo)
        out = out - wick(space, word[1:-1]).scale(space.psi(space.mul(word[0], word[-1])))
    memo[word] = out
    return out


# ---------------------------------------------------------------------------
# cyclic Fock space
# ---------------------------------------------------------------------------


def _min_rotation(word: tuple) -> tuple:
    if len(word) <= 1:
        return word
    keyed = [s.sort_key() for s in word]
    n = len(word)
    best = min(range(n), key=lambda k: [keyed[(k + i) % n] for i in range(n)])
    return word[best:] + word[:best]


class CyclicVector:
    """A formal linear combination of circular tensor words, canonically rotated."""

    __slots__ = ("space", "terms")

    def __init__(self, space: Space, terms: dict[tuple, Scalar] | None = None):
        self.space = space
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    @staticmethod
    def zero(space: Space) -> "CyclicVector":
        return CyclicVector(space, {})

    @staticmethod
    def word(space: Space, slots: Sequence[Slot]) -> "CyclicVector":
        if len(slots) < 1:
            raise ValueError("cyclic words have at least one slot")
        for s in slots:
            space.check_slot(s)
        return CyclicVector(space, {_min_rotation(tuple(slots)): ONE})

    def __add__(self, other: "CyclicVector") -> "CyclicVector":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return CyclicVector(self.space, out)

    def scale(self, s) -> "CyclicVector":
        s = as_scalar(s)
        return CyclicVector(self.space, {w: s * c for w, c in self.terms.items()})

    def __sub__(self, other: "CyclicVector") -> "CyclicVector":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclicVector) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "CyclicVector(0)"
        bits = []
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), str(t[0]))):
            bits.append(f"{c} * [" + " . ".join(repr(s) for s in w) + "]")
        return "CyclicVector[" + " + ".join(bits) + "]"


def cyc(v: FockVector) -> CyclicVector:
    """
    The wrap-and-pair map from the linear to the cyclic Fock space, extended
    linearly. Vacuum goes to zero. Semicircular words shed their outermost
    pair against the Gram form; Poisson words additionally fuse the two ends.
    """
    memo: dict[tuple, CyclicVector] = {}
    acc: dict[tuple, Scalar] = {}
    for w, c in v.terms.items():
        for word, coef in _cyc_word(v.space, w, memo).terms.items():
            _accumulate(acc, word, c * coef)
    return CyclicVector(v.space, acc)


def _cyc_word(space: Space, word: tuple, memo: dict) -> CyclicVector:
    if word in memo:
        return memo[word]
    if len(word) == 0:
        out = CyclicVector.zero(space)
    elif len(word) == 1:
        out = CyclicVector.word(space, word)
    elif space.flavor == "semicircular":
        coef = space.slot_inner(word[0], space.slot_conj(word[-1]))
        out = CyclicVector.word(space, word)
        if not coef.is_zero():
            out = out + _cyc_word(space, word[1:-1], memo).scale(coef)
    else:
        fused = (space.mul(word[-1], word[0]),) + word[1:-1]
        out = CyclicVector.word(space, word) + CyclicVector.word(space, fused)
        coef = space.psi(space.mul(word[0], word[-1]))
        if not coef.is_zero():
            out = out + _cyc_word(space, word[1:-1], memo).scale(coef)
    memo[word] = out
    return out


def cyc_inner(u: CyclicVector, v: CyclicVector) -> Scalar:
    """
    <[f_1..f_n], [g_1..g_m]>_cyc = delta_{nm} sum_k prod_i <f_i, g_{i+k}>,
    extended sesquilinearly (conjugate-linear in the second argument).
    """
    if u.space.flavor != v.space.flavor:
        raise ValueError("flavor mismatch in cyclic inner product")
    space = u.space
    by_len_v: dict[int, list[tuple[tuple, Scalar]]] = {}
    for w, c in v.terms.items():
        by_len_v.setdefault(len(w), []).append((w, c))
    total = ZERO
    for wu, cu in u.terms.items():
        n = len(wu)
        for wv, cv in by_len_v.get(n, ()):  # noqa: B020
            rot_sum = ZERO
            for k in range(n):
                prod = ONE
                for i in range(n):
                    prod = prod * space.slot_inner(wu[i], wv[(i + k) % n])
                    if prod.is_zero():
                        break
                rot_sum = rot_sum + prod
            total = total + cu * cv.conjugate() * rot_sum
    return total


# ---------------------------------------------------------------------------
# fluctuation formulas
# ---------------------------------------------------------------------------


def fluct_gauss_fock(space: SemicircularSpace, fs: Sequence[Vec], gs: Sequence[Vec]) -> Scalar:
    """
    <cyc omega(f_1)..omega(f_n) Omega, cyc omega(g_m)..omega(g_1) Omega>_cyc.
    The second word is applied in reversed order because the cyclic inner
    product is conjugate-linear in its second argument.
    """
    if space.flavor != "semicircular":
        raise ValueError("fluct_gauss_fock needs the semicircular flavor")
    left = apply_word(space, tuple(fs), FockVector.vacuum(space))
    right = apply_word(space, tuple(reversed(tuple(gs))), FockVector.vacuum(space))
    return cyc_inner(cyc(left), cyc(right))


def fluct_poisson_fock(space: PoissonSpace, ds: Sequence[Mat], es: Sequence[Mat]) -> Scalar:
    """
    <cyc p(d_1)..p(d_n) Omega, cyc p(e_m*)..p(e_1*) Omega>_cyc, the starred,
    reversed second argument making the expression linear in both trace words.
    """
    if space.flavor != "poisson":
        raise ValueError("fluct_poisson_fock needs the Poisson flavor")
    left = apply_word(space, tuple(ds), FockVector.vacuum(space))
    right = apply_word(space, tuple(space.slot_conj(e) for e in reversed(tuple(es))), FockVector.vacuum(space))
    return cyc_inner(cyc(left), cyc(right))


def rho_fock(x: OpPoly, y: OpPoly) -> Scalar:
    """The model bilinear fluctuation functional rho(x, y) = <cyc x Omega, cyc y* Omega>_cyc."""
    if x.space.flavor != y.space.flavor:
        raise ValueError("flavor mismatch")
    return cyc_inner(cyc(x.vector()), cyc(y.adjoint().vector()))


# ---------------------------------------------------------------------------
# diagonalizing polynomials
# ---------------------------------------------------------------------------


def chebyshev_u(n: int) -> tuple[Fraction, ...]:
    """Coefficients (by degree) of the Chebyshev polynomial U_n, U_n(cos t) = sin((n+1)t)/sin t."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    prev = [Fraction(1)]
    if n == 0:
        return tuple(prev)
    cur = [Fraction(0), Fraction(2)]
    for _ in range(n - 1):
        nxt = [Fraction(0)] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return tuple(cur)


def chebyshev_t(n: int) -> tuple[Fraction, ...]:
    """Coefficients (by degree) of the Chebyshev polynomial T_n, T_n(cos t) = cos(nt)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    prev = [Fraction(1)]
    if n == 0:
        return tuple(prev)
    cur = [Fraction(0), Fraction(1)]
    for _ in range(n - 1):
        nxt = [Fraction(0)] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return tuple(cur)


def poly_rescale_half(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Coefficients of q(x) = p(x/2)."""
    return tuple(c / (Fraction(2) ** i) for i, c in enumerate(coeffs))


def poly_of_op(coeffs: Sequence, op: OpPoly) -> OpPoly:
    """Evaluate a polynomial (coefficients by degree) at an operator."""
    out = OpPoly.zero(op.space)
    power = OpPoly.one(op.space)
    for c in coeffs:
        out = out + power.scale(as_scalar(c))
        power = power * op
    return out


def free_poisson_moments(lam, count: int) -> list[Fraction]:
    """
    Moments m_1..m_count of the free Poisson(lambda) law, from the summation
    over disc non-crossing partitions with every block contributing lambda.
    """
    from .annular import enumerate_nc_disc

    lam = Fraction(lam)
    out = []
    for n in range(1, count + 1):
        total = Fraction(0)
        for part in enumerate_nc_disc(n):
            total += lam ** part.block_count
        out.append(total)
    return out


def orthogonal_poly_sequence(moments: Sequence[Fraction], count: int) -> list[tuple[Fraction, ...]]:
    """
    Monic orthogonal polynomials Pi_0..Pi_count for the functional with the
    given moment sequence (moments[j-1] = m_j, m_0 = 1), by Gram-Schmidt on
    the monomial basis.
    """

    def moment(j: int) -> Fraction:
        if j == 0:
            return Fraction(1)
        return Fraction(moments[j - 1])

    def pair(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                if a and b:
                    total += a * b * moment(i + j)
        return total

    polys: list[tuple[Fraction, ...]] = [(Fraction(1),)]
    for n in range(1, count + 1):
        cand = [Fraction(0)] * n + [Fraction(1)]
        for q in polys:
            norm = pair(q, q)
            if norm == 0:
                raise ValueError("degenerate moment functional")
            coef = pair(cand, q) / norm
            cand = [a - coef * (q[i] if i < len(q) else 0) for i, a in enumerate(cand)]
        polys.append(tuple(cand))
    return polys


def poisson_gamma_polys(lam, count: int) -> list[tuple[Fraction, ...]]:
    """
    The diagonalizing polynomials Gamma_1..Gamma_count of the free Poisson
    fluctuations: Gamma_1 = Pi_1 and Gamma_n = Pi_n - lambda Pi_{n-2} - Gamma_{n-1},
    with Pi_n the monic orthogonal polynomials of the free Poisson(lambda) law.
    """
    lam = Fraction(lam)
    pis = orthogonal_poly_sequence(free_poisson_moments(lam, 2 * count), count)

    def sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple[Fraction, ...]:
        size = max(len(p), len(q))
        return tuple(
            (p[i] if i < len(p) else Fraction(0)) - (q[i] if i < len(q) else Fraction(0))
            for i in range(size)
        )

    def scale(p: Sequence[Fraction], s: Fraction) -> tuple[Fraction, ...]:
        return tuple(s * c for c in p)

    gammas: list[tuple[Fraction, ...]] = []
    for n in range(1, count + 1):
        if n == 1:
            gammas.append(pis[1])
        else:
            prev2 = pis[n - 2]
            g = sub(sub(pis[n], scale(prev2, lam)), gammas[-1])
            gammas.append(g)
    return gammas
