"""
The abstract second-order layer: the freeness axioms for the pair of
functionals (phi, rho) as checkable predicates, and a constructive
calculator that reduces a mixed covariance rho(a_1...a_n, b_1...b_m) of
cyclically alternating words to the phi- and rho-data of the individual
subalgebras.

The calculator works symbolically first: it emits a list of terms, each a
product of phi- and rho-atoms whose arguments are (possibly centered)
products of input slots. Structural facts -- each input slot is consumed
exactly once per term, at most one rho-atom per term -- are assertions on
that tree; numbers only appear when a term is evaluated against a model.

A model supplies four operations on its elements: phi, rho (same-subalgebra
pairs only), mul, and center (a -> a - phi(a) 1). FockSofModel wires these
to the exact Fock machinery; CallableSofModel adapts ad-hoc oracles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Protocol, Sequence

from .exact import ONE, ZERO, Scalar, as_scalar
from . import fock


class SofModel(Protocol):
    def phi(self, element) -> Scalar: ...

    def rho(self, left, right) -> Scalar: ...

    def mul(self, a, b): ...

    def center(self, element): ...


@dataclass(frozen=True)
class FockSofModel:
    """phi(a) = <a Omega, Omega>, rho(a, b) = <cyc a Omega, cyc b* Omega>_cyc on OpPoly elements."""

    space: Any

    def phi(self, element: fock.OpPoly) -> Scalar:
        return element.phi()

    def rho(self, left: fock.OpPoly, right: fock.OpPoly) -> Scalar:
        return fock.rho_fock(left, right)

    def mul(self, a: fock.OpPoly, b: fock.OpPoly) -> fock.OpPoly:
        return a * b

    def center(self, element: fock.OpPoly) -> fock.OpPoly:
        # keyed by identity with a keep-alive reference: centering the same
        # element object is common in the expansion recursion
        cache = self.__dict__.get("_center_cache")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_center_cache", cache)
        hit = cache.get(id(element))
        if hit is not None and hit[0] is element:
            return hit[1]
        centered = element - fock.OpPoly.one(self.space).scale(element.phi())
        cache[id(element)] = (element, centered)
        return centered


@dataclass(frozen=True)
class CallableSofModel:
    """Adapter for models given by plain callables (used for limit predictions)."""

    phi_fn: Callable[[Any], Scalar]
    rho_fn: Callable[[Any, Any], Scalar]
    mul_fn: Callable[[Any, Any], Any]
    center_fn: Callable[[Any], Any]

    def phi(self, element) -> Scalar:
        return as_scalar(self.phi_fn(element))

    def rho(self, left, right) -> Scalar:
        return as_scalar(self.rho_fn(left, right))

    def mul(self, a, b):
        return self.mul_fn(a, b)

    def center(self, element):
        return self.center_fn(element)


# ---------------------------------------------------------------------------
# alternating words
# ---------------------------------------------------------------------------


def validate_alternating(word: Sequence[tuple[Any, Hashable]]):
    """Cyclic alternation: consecutive tags differ, including last vs first for length >= 2."""
    tags = [t for _, t in word]
    if len(tags) == 0:
        raise ValueError("alternating words must be nonempty")
    if len(tags) >= 2:
        for i, t in enumerate(tags):
            if t == tags[(i + 1) % len(tags)]:
                raise ValueError(f"word tags {tags} are not cyclically alternating")


# ---------------------------------------------------------------------------
# symbolic expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Factor:
    """
    One multiplicand inside an atom: a product of input slots, with an
    optional final centering. ``slots`` are the original slot indices covered
    (a single index unless regrouping merged slots), ``element`` is the
    concrete model element of the *uncentered* product, ``centered`` says
    whether the factor is used as element - phi(element) 1.
    """

    slots: tuple[int, ...]
    element: Any
    centered: bool
    tag: Hashable

    def resolve(self, model: SofModel):
        return model.center(self.element) if self.centered else self.element


@dataclass(frozen=True)
class PhiAtom:
    factors: tuple[Factor, ...]

    def slots(self) -> tuple[int, ...]:
        return tuple(s for f in self.factors for s in f.slots)

    def value(self, model: SofModel) -> Scalar:
        elem = self.factors[0].resolve(model)
        for f in self.factors[1:]:
            elem = model.mul(elem, f.resolve(model))
        return model.phi(elem)


@dataclass(frozen=True)
class RhoAtom:
    left: tuple[Factor, ...]
    right: tuple[Factor, ...]

    def slots(self) -> tuple[int, ...]:
        return tuple(s for f in self.left + self.right for s in f.slots)

    def value(self, model: SofModel) -> Scalar:
        def resolve_side(side):
            elem = side[0].resolve(model)
            for f in side[1:]:
                elem = model.mul(elem, f.resolve(model))
            return elem

        return model.rho(resolve_side(self.left), resolve_side(self.right))


Atom = "PhiAtom | RhoAtom"


@dataclass(frozen=True)
class ExpansionTerm:
    coeff: int
    atoms: tuple


@dataclass
class Expansion:
    """The symbolic result of rho_expand: a sum of balanced products of atoms."""

    slot_count: int
    terms: list[ExpansionTerm] = field(default_factory=list)

    def value(self, model: SofModel) -> Scalar:
        total = ZERO
        for term in self.terms:
            prod = as_scalar(term.coeff)
            for atom in term.atoms:
                if prod.is_zero():
                    break
                prod = prod * atom.value(model)
            total = total + prod
        return total

    def assert_balanced(self):
        """Every term uses each input slot exactly once and has at most one rho factor."""
        want = tuple(range(self.slot_count))
        for term in self.terms:
            used = tuple(sorted(s for atom in term.atoms for s in atom.slots()))
            if used != want:
                raise AssertionError(f"term covers slots {used}, expected {want}")
            rho_count = sum(1 for atom in term.atoms if isinstance(atom, RhoAtom))
            if rho_count > 1:
                raise AssertionError(f"term has {rho_count} rho factors")

    def expanded_original_terms(self) -> list[tuple[int, tuple]]:
        """
        Rewrite every atom over single-slot factors into atoms on the original
        (uncentered) slots, distributing centerings; used to compare against
        closed-form expansions symbolically. Only supports single-slot factors.
        Each output term is (coefficient, atoms) with atoms over frozen
        descriptors ('phi', slot-tuple) / ('rho', slots-left, slots-right).
        """
        out: list[tuple[int, tuple]] = []
        for term in self.terms:
            expanded_atoms: list[list[tuple[int, tuple]]] = []
            for atom in term.atoms:
                expanded_atoms.append(_expand_atom_original(atom))
            for combo in itertools.product(*expanded_atoms):
                coeff = term.coeff
                atoms = []
                for c, described in combo:
                    coeff *= c
                    atoms.extend(described)
                out.append((coeff, tuple(sorted(atoms))))
        return out


def _expand_atom_original(atom) -> list[tuple[int, tuple]]:
    """Expand one atom's centered single-slot factors into original-slot descriptors."""

    def factor_options(f: Factor):
        if len(f.slots) != 1:
            raise AssertionError("symbolic original-slot expansion needs single-slot factors")
        if not f.centered:
            return [(1, ("slot", f.slots[0]), None)]
        # centered: slot - phi(slot): either keep the slot or extract a phi factor
        return [(1, ("slot", f.slots[0]), None), (-1, None, ("phi", (f.slots[0],)))]

    if isinstance(atom, PhiAtom):
        sides = [atom.factors]
        make = lambda words: ("phi", words[0])
    else:
        sides = [atom.left, atom.right]
        make = lambda words: ("rho", words[0], words[1])

    out = []
    options_per_side = [[factor_options(f) for f in side] for side in sides]
    for per_factor in itertools.product(*[list(itertools.product(*opts)) for opts in options_per_side]):
        coeff = 1
        extracted = []
        words = []
        for side_choice in per_factor:
            word = []
            for c, kept, extra in side_choice:
                coeff *= c
                if kept is not None:
                    word.append(kept[1])
                if extra is not None:
                    extracted.append(extra)
            words.append(tuple(word))
        if any(len(w) == 0 for w in words):
            if isinstance(atom, PhiAtom):
                # phi(1) = 1: the empty word contributes the extracted scalars only
                out.append((coeff, tuple(extracted)))
                continue
            # rho with an empty side vanishes
            continue
        head = make(words)
        out.append((coeff, tuple(extracted) + (head,)))
    return out


def rho_expand(
    a_word: Sequence[tuple[Any, Hashable]],
    b_word: Sequence[tuple[Any, Hashable]],
    model: SofModel,
) -> Expansion:
    """
    Express rho(a_1...a_n, b_1...b_m) for cyclically alternating tagged words
    through phi on products and rho restricted to single subalgebras, by the
    centering recursion: write every slot as (slot - phi) + phi, evaluate the
    fully centered term through the freeness axioms, regroup cyclic
    neighbours sharing a tag, and recurse on what remains.
    """
    validate_alternating(a_word)
    validate_alternating(b_word)
    slots = [el for el, _ in a_word] + [el for el, _ in b_word]
    n = len(a_word)
    a_factors = [
        Factor((i,), el, False, tag) for i, (el, tag) in enumerate(a_word)
    ]
    b_factors = [
        Factor((n + i,), el, False, tag) for i, (el, tag) in enumerate(b_word)
    ]
    expansion = Expansion(slot_count=len(slots))
    expansion.terms = _expand(tuple(a_factors), tuple(b_factors), model)
    expansion.assert_balanced()
    return expansion


def _expand(a: tuple[Factor, ...], b: tuple[Factor, ...], model: SofModel) -> list[ExpansionTerm]:
    if not a or not b:
        return []  # rho(1, .) = 0 = rho(., 1)
    terms: list[ExpansionTerm] = []
    # positions whose phi-extraction is not identically zero
    a_sites = [i for i, f in enumerate(a) if not f.centered]
    b_sites = [i for i, f in enumerate(b) if not f.centered]
    for ka in range(len(a_sites) + 1):
        for sa in itertools.combinations(a_sites, ka):
            for kb in range(len(b_sites) + 1):
                for sb in itertools.combinations(b_sites, kb):
                    phi_atoms = tuple(PhiAtom((a[i],)) for i in sa) + tuple(
                        PhiAtom((b[i],)) for i in sb
                    )
                    rest_a = _center_all(tuple(f for i, f in enumerate(a) if i not in sa))
                    rest_b = _center_all(tuple(f for i, f in enumerate(b) if i not in sb))
                    if ka + kb == 0:
                        for tail in _axiom_terms(rest_a, rest_b):
                            terms.append(tail)
                        continue
                    if not rest_a or not rest_b:
                        continue  # a side reduced to scalars: rho vanishes
                    sub_a = _regroup(rest_a, model)
                    sub_b = _regroup(rest_b, model)
                    for sub in _expand(sub_a, sub_b, model):
                        terms.append(ExpansionTerm(sub.coeff, phi_atoms + sub.atoms))
    return terms


def _center_all(factors: tuple[Factor, ...]) -> tuple[Factor, ...]:
    return tuple(
        f if f.centered else Factor(f.slots, f.element, True, f.tag) for f in factors
    )


def _regroup(factors: tuple[Factor, ...], model: SofModel) -> tuple[Factor, ...]:
    """Merge cyclically adjacent factors with equal tags into product factors."""
    out = list(factors)
    # linear pass
    merged = True
    while merged and len(out) >= 2:
        merged = False
        for i in range(len(out) - 1):
            if out[i].tag == out[i + 1].tag:
                out[i : i + 2] = [_merge(out[i], out[i + 1], model)]
                merged = True
                break
    # wrap-around: traciality of rho in each argument permits the rotation
    while len(out) >= 2 and out[0].tag == out[-1].tag:
        last = out.pop()
        out[0] = _merge(last, out[0], model)
    return tuple(out)


def _merge(left: Factor, right: Factor, model: SofModel) -> Factor:
    elem = model.mul(left.resolve(model), right.resolve(model))
    return Factor(left.slots + right.slots, elem, False, left.tag)


def _axiom_terms(a: tuple[Factor, ...], b: tuple[Factor, ...]) -> list[ExpansionTerm]:
    """
    The fully centered case, straight from the freeness axioms:
    different lengths vanish; two singletons need equal tags and become a
    rho-atom; equal lengths >= 2 give the cyclic spoke sum of phi-pairs,
    with cross-subalgebra pairs killed by first-order freeness.
    """
    n, m = len(a), len(b)
    if n != m:
        return []
    if n == 1:
        if a[0].tag != b[0].tag:
            return []
        return [ExpansionTerm(1, (RhoAtom((a[0],), (b[0],)),))]
    out = []
    for k in range(n):
        atoms = []
        dead = False
        for i in range(n):
            j = (n - 1 - i + k) % n  # pairs a_1 with b_{n+k}, a_2 with b_{n-1+k}, ...
            if a[i].tag != b[j].tag:
                dead = True
                break
            atoms.append(PhiAtom((a[i], b[j])))
        if not dead:
            out.append(ExpansionTerm(1, tuple(atoms)))
    return out


# ---------------------------------------------------------------------------
# axiom checker
# ---------------------------------------------------------------------------


@dataclass
class FreenessReport:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_second_order_free(
    model: SofModel,
    pools: dict[Hashable, Sequence[Any]],
    max_total_len: int,
) -> FreenessReport:
    """
    Verify the second-order freeness axioms on all centered, cyclically
    alternating tuples built from the given per-subalgebra pools, with the
    two tuple lengths summing to at most max_total_len:

    (i)   rho(a_1..a_n, b_1..b_m) == 0 when n != m;
    (ii)  rho(a, b) == 0 for single elements of different subalgebras;
    (iii) for n == m >= 2 the cyclic spoke formula
          rho(a_1..a_n, b_1..b_n) == sum_k phi(a_1 b_{n+k}) ... phi(a_n b_{1+k}).

    Pool elements must be centered; that is asserted up front.
    """
    report = FreenessReport()
    tags = sorted(pools, key=repr)
    for tag in tags:
        for el in pools[tag]:
            if not model.phi(el).is_zero():
                raise ValueError(f"pool element for tag {tag!r} is not centered")

    def alternating_tag_seqs(length: int):
        for seq in itertools.product(tags, repeat=length):
            if length == 1 or all(seq[i] != seq[(i + 1) % length] for i in range(length)):
                yield seq

    def tuples_of(length: int):
        for tag_seq in alternating_tag_seqs(length):
            for choice in itertools.product(*[range(len(pools[t])) for t in tag_seq]):
                yield [(pools[t][c], t) for t, c in zip(tag_seq, choice)]

    def product_of(word):
        elem = word[0][0]
        for el, _ in word[1:]:
            elem = model.mul(elem, el)
        return elem

    for n in range(1, max_total_len):
        for m in range(1, max_total_len - n + 1):
            has_alt = (n == 1 or n % 2 == 0) and (m == 1 or m % 2 == 0) if len(tags) == 2 else True
            if not has_alt:
                continue
            for aw in tuples_of(n):
                for bw in tuples_of(m):
                    report.checked += 1
                    val = model.rho(product_of(aw), product_of(bw))
                    if n != m:
                        if not val.is_zero():
                            report.failures.append(f"(i) rho != 0 for lengths {n} != {m}: {aw} | {bw}")
                        continue
                    if n == 1:
                        if aw[0][1] != bw[0][1]:
                            if not val.is_zero():
                                report.failures.append(f"(ii) cross-subalgebra rho(a,b) = {val} != 0")
                        continue
                    spoke = ZERO
                    for k in range(n):
                        prod = ONE
                        for i in range(n):
                            j = (n - 1 - i + k) % n
                            prod = prod * model.phi(model.mul(aw[i][0], bw[j][0]))
                            if prod.is_zero():
                                break
                        spoke = spoke + prod
                    if val != spoke:
                        report.failures.append(
                            f"(iii) spoke mismatch at n={n}: rho={val} vs spoke={spoke} for {aw} | {bw}"
                        )
    return report
