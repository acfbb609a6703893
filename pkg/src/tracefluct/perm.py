"""
Permutations of [1, n], set partitions, and classical cumulants.

Conventions, fixed once and tested rather than re-derived downstream:

- Permutations act on the 1-based interval [1, n]; ``images[i-1] == p(i)``.
- Composition is "apply q first": ``compose(p, q)(x) == p(q(x))``.
- Cycle decompositions are canonical: each cycle starts at its minimum and
  cycles are sorted by their minima, e.g. "(1,3)(2)".
- Set partitions are canonical: elements sorted inside blocks, blocks sorted
  by minimum.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .exact import ONE, ZERO, Scalar, as_scalar

PARTITION_GUARD = 12


@dataclass(frozen=True)
class Permutation:
    """A bijection of [1, n], stored as the tuple of images."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"images {self.images} are not a bijection of [1,{n}]")

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))

    @staticmethod
    def from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """
        >>> Permutation.from_cycles(3, [(1, 2)]).images
        (2, 1, 3)
        """
        images = list(range(1, n + 1))
        seen: set[int] = set()
        for cycle in cycles:
            for x in cycle:
                if not 1 <= x <= n or x in seen:
                    raise ValueError(f"bad cycle element {x} in cycles of size {n}")
                seen.add(x)
            for a, b in zip(cycle, cycle[1:] + type(cycle)([cycle[0]])):
                images[a - 1] = b
        return Permutation(tuple(images))

    @staticmethod
    def from_cycle_string(n: int, text: str) -> "Permutation":
        """Parse cycle notation like "(1,2,3)(4)"; fixed points may be omitted."""
        body = text.replace(" ", "")
        if not re.fullmatch(r"(\(\d+(,\d+)*\))*", body):
            raise ValueError(f"cannot parse cycle string {text!r}")
        cycles = [tuple(int(x) for x in grp.split(",")) for grp in re.findall(r"\(([^)]*)\)", body)]
        return Permutation.from_cycles(n, cycles)

    def compose(self, other: "Permutation") -> "Permutation":
        """(self . other)(x) = self(other(x)): other is applied first."""
        if self.size != other.size:
            raise ValueError(f"size mismatch: {self.size} vs {other.size}")
        return Permutation(tuple(self.images[y - 1] for y in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, y in enumerate(self.images, start=1):
            inv[y - 1] = i
        return Permutation(tuple(inv))

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """
        Canonical disjoint cycles, fixed points included.

        >>> Permutation((2, 1, 3)).cycles()
        ((1, 2), (3,))
        """
        seen = [False] * self.size
        out = []
        for start in range(1, self.size + 1):
            if seen[start - 1]:
                continue
            cycle = []
            x = start
            while not seen[x - 1]:
                seen[x - 1] = True
                cycle.append(x)
                x = self.images[x - 1]
            out.append(tuple(cycle))
        return tuple(out)

    def cycle_count(self) -> int:
        return len(self.cycles())

    def cycle_string(self) -> str:
        return "".join("(" + ",".join(map(str, c)) + ")" for c in self.cycles())

    def is_identity(self) -> bool:
        return all(self.images[i] == i + 1 for i in range(self.size))

    def __repr__(self):
        return f"Permutation[{self.cycle_string()}]"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Module-level alias for the fixed "apply q first" convention."""
    return p.compose(q)


def cycle_count(p: Permutation) -> int:
    return p.cycle_count()


@dataclass(frozen=True)
class AnnulusProfile:
    """Circle sizes (n(1), ..., n(r)) of a multi-annulus."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.sizes) < 1 or any(s < 1 for s in self.sizes):
            raise ValueError(f"profile sizes must be positive, got {self.sizes}")

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def circles(self) -> int:
        return len(self.sizes)

    def offsets(self) -> tuple[int, ...]:
        """Start offset of each circle: circle i covers offsets[i]+1 .. offsets[i]+sizes[i]."""
        out = [0]
        for s in self.sizes[:-1]:
            out.append(out[-1] + s)
        return tuple(out)

    def circle_of(self, x: int) -> int:
        """0-based index of the circle containing point x."""
        if not 1 <= x <= self.total:
            raise ValueError(f"point {x} outside [1,{self.total}]")
        acc = 0
        for i, s in enumerate(self.sizes):
            acc += s
            if x <= acc:
                return i
        raise AssertionError

    def points_of(self, circle: int) -> tuple[int, ...]:
        off = self.offsets()[circle]
        return tuple(range(off + 1, off + 1 + self.sizes[circle]))

    def gamma(self) -> Permutation:
        """
        The reference permutation with one consecutive increasing cycle per
        circle: (1,...,n(1))(n(1)+1,...,n(1)+n(2))...

        >>> AnnulusProfile((2, 1)).gamma().cycle_string()
        '(1,2)(3)'
        """
        cycles = [self.points_of(i) for i in range(self.circles)]
        return Permutation.from_cycles(self.total, cycles)


def gamma_of(profile: AnnulusProfile) -> Permutation:
    return profile.gamma()


@dataclass(frozen=True)
class SetPartition:
    """A partition of [1, n] into disjoint nonempty blocks, canonicalized."""

    size: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        flat = sorted(x for b in self.blocks for x in b)
        if flat != list(range(1, self.size + 1)):
            raise ValueError(f"blocks {self.blocks} do not partition [1,{self.size}]")
        canonical = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0]))
        if canonical != self.blocks:
            raise ValueError(f"blocks {self.blocks} are not in canonical form")

    @staticmethod
    def from_blocks(size: int, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        canonical = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else 0))
        return SetPartition(size, canonical)

    @staticmethod
    def singletons(size: int) -> "SetPartition":
        return SetPartition(size, tuple((i,) for i in range(1, size + 1)))

    @staticmethod
    def one_block(size: int) -> "SetPartition":
        return SetPartition(size, (tuple(range(1, size + 1)),))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def block_index_of(self, x: int) -> int:
        for i, b in enumerate(self.blocks):
            if x in b:
                return i
        raise ValueError(f"{x} not in [1,{self.size}]")

    def as_labels(self) -> tuple[int, ...]:
        """labels[i-1] = index of the block containing i."""
        labels = [0] * self.size
        for idx, b in enumerate(self.blocks):
            for x in b:
                labels[x - 1] = idx
        return tuple(labels)

    def refines(self, other: "SetPartition") -> bool:
        """True when every block of self lies inside a block of other."""
        if self.size != other.size:
            raise ValueError("size mismatch")
        lab = other.as_labels()
        return all(len({lab[x - 1] for x in b}) == 1 for b in self.blocks)

    def join(self, other: "SetPartition") -> "SetPartition":
        if self.size != other.size:
            raise ValueError("size mismatch")
        uf = _UnionFind(self.size)
        for part in (self, other):
            for b in part.blocks:
                for x in b[1:]:
                    uf.union(b[0], x)
        return uf.partition()

    def __repr__(self):
        inner = ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"SetPartition[{inner}]"


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n + 1))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def partition(self) -> SetPartition:
        n = len(self.parent) - 1
        groups: dict[int, list[int]] = {}
        for x in range(1, n + 1):
            groups.setdefault(self.find(x), []).append(x)
        return SetPartition.from_blocks(n, groups.values())


def kernel(index_map: Sequence[int]) -> SetPartition:
    """
    Partition of positions by equal values: k ~ l iff index_map[k-1] == index_map[l-1].

    >>> kernel((7, 3, 3, 7)).blocks
    ((1, 4), (2, 3))
    """
    if len(index_map) < 1:
        raise ValueError("kernel needs at least one entry")
    groups: dict[int, list[int]] = {}
    for pos, val in enumerate(index_map, start=1):
        groups.setdefault(val, []).append(pos)
    return SetPartition.from_blocks(len(index_map), groups.values())


def join_with(sigma: "Permutation | SetPartition", gamma: Permutation) -> SetPartition:
    """The partition sigma v gamma: orbits of the group generated by both."""
    uf = _UnionFind(gamma.size)
    if isinstance(sigma, Permutation):
        if sigma.size != gamma.size:
            raise ValueError("size mismatch")
        for x in range(1, gamma.size + 1):
            uf.union(x, sigma(x))
    else:
        if sigma.size != gamma.size:
            raise ValueError("size mismatch")
        for b in sigma.blocks:
            for x in b[1:]:
                uf.union(b[0], x)
    for x in range(1, gamma.size + 1):
        uf.union(x, gamma(x))
    return uf.partition()


def induced_on_cycles(join_partition: SetPartition, gamma: Permutation) -> SetPartition:
    """
    The partition of gamma's cycles induced by a partition of the points
    (each cycle lies inside one block of any partition refined by... joined
    with gamma, which is the only case we use).
    """
    cycles = gamma.cycles()
    labels = join_partition.as_labels()
    block_of_cycle = []
    for cyc in cycles:
        labs = {labels[x - 1] for x in cyc}
        if len(labs) != 1:
            raise ValueError("partition does not contain gamma's cycles in single blocks")
        block_of_cycle.append(labs.pop())
    groups: dict[int, list[int]] = {}
    for idx, lab in enumerate(block_of_cycle, start=1):
        groups.setdefault(lab, []).append(idx)
    return SetPartition.from_blocks(len(cycles), groups.values())


def enumerate_partitions(n: int) -> tuple[SetPartition, ...]:
    """
    All Bell(n) partitions of [1, n] via restricted growth strings.

    >>> len(enumerate_partitions(4))
    15
    """
    if not 1 <= n <= PARTITION_GUARD:
        raise ValueError(f"enumerate_partitions supports 1 <= n <= {PARTITION_GUARD}, got {n}")
    out = []
    for labels in _growth_strings(n):
        groups: dict[int, list[int]] = {}
        for pos, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(pos)
        out.append(SetPartition.from_blocks(n, groups.values()))
    return tuple(out)


def _growth_strings(n: int):
    # restricted growth: labels[0] = 0 and labels[i] <= 1 + max(previous)
    labels = [0] * n

    def rec(i: int, top: int):
        if i == n:
            yield tuple(labels)
            return
        for lab in range(top + 2):
            labels[i] = lab
            yield from rec(i + 1, max(top, lab))

    yield from rec(1, 0)


def mobius_to_top(partition: SetPartition) -> int:
    """Moebius function mu(A, 1_n) = (-1)^(#A - 1) * (#A - 1)! on the partition lattice."""
    b = partition.block_count
    return (-1) ** (b - 1) * math.factorial(b - 1)


def classical_cumulant(joint_moments: Callable[[tuple], Scalar], args: Sequence) -> Scalar:
    """
    The r-th classical cumulant k_r{a_1,...,a_r} by Moebius inversion over the
    partition lattice: sum over partitions A of mu(A, 1) times the product of
    block moments. ``joint_moments`` maps a tuple of arguments (a sub-multiset
    of args, in the original order) to the expectation of their product.
    """
    r = len(args)
    if r < 1:
        raise ValueError("need at least one argument")
    total = ZERO
    for part in enumerate_partitions(r):
        term = as_scalar(mobius_to_top(part))
        for block in part.blocks:
            term = term * as_scalar(joint_moments(tuple(args[i - 1] for i in block)))
        total = total + term
    return total


def bell_number(n: int) -> int:
    """Bell numbers by the binomial recurrence (independent of enumerate_partitions)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    bells = [1]
    for m in range(n):
        bells.append(sum(math.comb(m, k) * bells[k] for k in range(m + 1)))
    return bells[n]


def all_permutations(n: int) -> Iterable[Permutation]:
    """Brute-force iterator over S_n; the workhorse oracle for small scans."""
    for images in itertools.permutations(range(1, n + 1)):
        yield Permutation(images)
