"""
Disc and (multi-)annular non-crossing objects: pairings, permutations,
partitions, genus, and the fiber map from annular permutations down to
annular partitions.

Geometry convention: circle i carries the consecutive points of the i-th
group of the profile, in the cyclic order of the reference permutation gamma.
For two circles that is [1,n] clockwise outside and [n+1,n+m] counter-
clockwise inside; the "reversed order" phenomena downstream all come out of
the gamma-based geodesic condition, no extra index flipping happens here.

A permutation tau on the multi-annulus is non-crossing when it is connected
(tau v gamma joins every pair of circles) and geodesic:
#(tau) + #(tau^{-1} gamma) == total + 2 - r.  Equivalently its genus,
defined through #(tau) + #(tau^{-1} gamma) + #(gamma) == total + 2(1 - g),
is zero. Both products tau^{-1} gamma and gamma tau^{-1} have the same cycle
type, so the membership test does not depend on that choice; tests verify
this exhaustively.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .perm import AnnulusProfile, Permutation, SetPartition, all_permutations, enumerate_partitions, join_with

SNC_GUARD = 10
NC2_GUARD = 16
DISC_GUARD = 12
ANNULAR_PARTITION_GUARD = 10


def catalan(n: int) -> int:
    """
    >>> [catalan(n) for n in range(7)]
    [1, 1, 2, 5, 14, 42, 132]
    """
    return math.comb(2 * n, n) // (n + 1)


@dataclass(frozen=True)
class Pairing:
    """A perfect matching of [1, n] for even n, stored as sorted pairs."""

    size: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        flat = sorted(x for p in self.pairs for x in p)
        if self.size % 2 != 0 or flat != list(range(1, self.size + 1)):
            raise ValueError(f"pairs {self.pairs} are not a perfect matching of [1,{self.size}]")
        canonical = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        if canonical != self.pairs:
            raise ValueError("pairs not in canonical sorted form")

    @staticmethod
    def from_pairs(size: int, pairs: Iterable[Sequence[int]]) -> "Pairing":
        return Pairing(size, tuple(sorted(tuple(sorted(p)) for p in pairs)))

    def as_permutation(self) -> Permutation:
        return Permutation.from_cycles(self.size, self.pairs)

    def partner(self, x: int) -> int:
        for a, b in self.pairs:
            if x == a:
                return b
            if x == b:
                return a
        raise ValueError(f"{x} not matched")


def enumerate_pairings(n: int) -> tuple[Pairing, ...]:
    """
    All (n-1)!! perfect matchings of [1, n].

    >>> len(enumerate_pairings(6))
    15
    """
    if n % 2 != 0:
        raise ValueError(f"pairings need an even ground set, got {n}")
    if not 0 <= n <= NC2_GUARD + 4:
        raise ValueError(f"enumerate_pairings supports n <= {NC2_GUARD + 4}, got {n}")
    out: list[Pairing] = []

    def rec(remaining: tuple[int, ...], acc: list[tuple[int, int]]):
        if not remaining:
            out.append(Pairing.from_pairs(n, list(acc)))
            return
        first, rest = remaining[0], remaining[1:]
        for i, partner in enumerate(rest):
            acc.append((first, partner))
            rec(rest[:i] + rest[i + 1 :], acc)
            acc.pop()

    rec(tuple(range(1, n + 1)), [])
    return tuple(out)


def is_connected(p: Permutation, profile: AnnulusProfile) -> bool:
    """True when p v gamma is the one-block partition (all circles joined)."""
    if p.size != profile.total:
        raise ValueError("size mismatch between permutation and profile")
    return join_with(p, profile.gamma()).block_count == 1


def genus(p: Permutation, profile: AnnulusProfile) -> int:
    """
    The integer g with #(p) + #(p^{-1} gamma) + #(gamma) == n + 2(1 - g),
    defined for p connected to gamma. Raises on disconnected input and
    asserts integrality (a failure would mean a bug, not bad data).
    """
    if not is_connected(p, profile):
        raise ValueError("genus is only defined for permutations connected with gamma")
    gamma = profile.gamma()
    total = profile.total
    lhs = p.cycle_count() + p.inverse().compose(gamma).cycle_count() + gamma.cycle_count()
    twice_g = total + 2 - lhs
    assert twice_g % 2 == 0, f"non-integer genus for {p} on {profile}"
    g = twice_g // 2
    assert g >= 0, f"negative genus for {p} on {profile}"
    return g


def is_geodesic(p: Permutation, profile: AnnulusProfile) -> bool:
    """#(p) + #(p^{-1} gamma) == total + 2 - r, the planarity condition."""
    gamma = profile.gamma()
    lhs = p.cycle_count() + p.inverse().compose(gamma).cycle_count()
    return lhs == profile.total + 2 - profile.circles


@dataclass(frozen=True)
class AnnularPermutation:
    """A non-crossing permutation of a multi-annulus; validated on creation."""

    profile: AnnulusProfile
    perm: Permutation

    def __post_init__(self):
        if self.perm.size != self.profile.total:
            raise ValueError("permutation size does not match profile")
        if not is_connected(self.perm, self.profile):
            raise ValueError(f"{self.perm} does not connect all circles of {self.profile}")
        if not is_geodesic(self.perm, self.profile):
            raise ValueError(f"{self.perm} fails the geodesic condition on {self.profile}")

    def partition(self) -> SetPartition:
        return SetPartition.from_blocks(self.perm.size, self.perm.cycles())


@lru_cache(maxsize=None)
def enumerate_snc(profile: AnnulusProfile) -> tuple[AnnularPermutation, ...]:
    """
    All annular non-crossing permutations of the profile, by brute scan of
    S_n. Doubles as the oracle for every faster structure in this module.

    >>> len(enumerate_snc(AnnulusProfile((2, 1))))
    4
    """
    n = profile.total
    if n > SNC_GUARD:
        raise ValueError(f"enumerate_snc scans S_n and is limited to total <= {SNC_GUARD}, got {n}")
    gamma = profile.gamma()
    target = n + 2 - profile.circles
    out = []
    for p in all_permutations(n):
        if p.cycle_count() + p.inverse().compose(gamma).cycle_count() != target:
            continue
        if join_with(p, gamma).block_count != 1:
            continue
        out.append(AnnularPermutation(profile, p))
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_nc2(profile: AnnulusProfile) -> tuple[Pairing, ...]:
    """
    All annular non-crossing pairings: perfect matchings that connect the
    circles and satisfy #(gamma pi) == 2 - r + total/2.

    >>> [p.pairs for p in enumerate_nc2(AnnulusProfile((2, 2)))]
    [((1, 3), (2, 4)), ((1, 4), (2, 3))]
    """
    n = profile.total
    if n % 2 != 0:
        raise ValueError(f"annular pairings need an even total, got {n}")
    if n > NC2_GUARD:
        raise ValueError(f"enumerate_nc2 is limited to total <= {NC2_GUARD}, got {n}")
    gamma = profile.gamma()
    target = 2 - profile.circles + n // 2
    out = []
    for pairing in enumerate_pairings(n):
        p = pairing.as_permutation()
        if gamma.compose(p).cycle_count() != target:
            continue
        if join_with(p, gamma).block_count != 1:
            continue
        out.append(pairing)
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_nc_disc(n: int) -> tuple[SetPartition, ...]:
    """
    All non-crossing partitions of the disc [1, n], generated directly by the
    interval decomposition of the block containing the smallest element.

    >>> len(enumerate_nc_disc(4))
    14
    """
    if not 1 <= n <= DISC_GUARD:
        raise ValueError(f"enumerate_nc_disc supports 1 <= n <= {DISC_GUARD}, got {n}")
    blocks_lists = _nc_blocks(tuple(range(1, n + 1)))
    return tuple(SetPartition.from_blocks(n, blocks) for blocks in blocks_lists)


def _nc_blocks(elements: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    if not elements:
        return [()]
    first, rest = elements[0], elements[1:]
    out = []
    for subset_mask in itertools.product((False, True), repeat=len(rest)):
        block = (first,) + tuple(x for x, keep in zip(rest, subset_mask) if keep)
        # elements between consecutive chosen points must be partitioned
        # among themselves, which is exactly the non-crossing constraint
        segments = []
        seg: list[int] = []
        for x, keep in zip(rest, subset_mask):
            if keep:
                segments.append(tuple(seg))
                seg = []
            else:
                seg.append(x)
        segments.append(tuple(seg))
        combos = [_nc_blocks(s) for s in segments]
        for pieces in itertools.product(*combos):
            out.append((block,) + tuple(b for piece in pieces for b in piece))
    return out


def is_nc_disc(partition: SetPartition) -> bool:
    """Direct crossing test: no a < b < c < d with a,c and b,d in different blocks."""
    labels = partition.as_labels()
    n = partition.size
    for a, b, c, d in itertools.combinations(range(1, n + 1), 4):
        if labels[a - 1] == labels[c - 1] != labels[b - 1] == labels[d - 1]:
            return False
    return True


# ---------------------------------------------------------------------------
# annular partitions (two circles)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnularPartition:
    """
    An (n, m)-annular non-crossing partition: outer points [1, n], inner
    points [n+1, n+m]. ``through_blocks`` are the indices of blocks meeting
    both circles; validity is established by the recursive-removal
    characterization at construction time.
    """

    n: int
    m: int
    partition: SetPartition
    through_blocks: tuple[int, ...]

    def __post_init__(self):
        if not is_annular_nc_partition(self.partition, self.n, self.m):
            raise ValueError(f"{self.partition} is not ({self.n},{self.m})-annular non-crossing")
        expected = tuple(
            i
            for i, b in enumerate(self.partition.blocks)
            if any(x <= self.n for x in b) and any(x > self.n for x in b)
        )
        if self.through_blocks != expected:
            raise ValueError("through_blocks inconsistent with the partition")

    @staticmethod
    def create(n: int, m: int, partition: SetPartition) -> "AnnularPartition":
        if partition.size != n + m:
            raise ValueError("partition size does not match n + m")
        through = tuple(
            i
            for i, b in enumerate(partition.blocks)
            if any(x <= n for x in b) and any(x > n for x in b)
        )
        return AnnularPartition(n, m, partition, through)

    @property
    def profile(self) -> AnnulusProfile:
        return AnnulusProfile((self.n, self.m))

    def outer_part(self, block_idx: int) -> tuple[int, ...]:
        return tuple(x for x in self.partition.blocks[block_idx] if x <= self.n)

    def inner_part(self, block_idx: int) -> tuple[int, ...]:
        return tuple(x for x in self.partition.blocks[block_idx] if x > self.n)


def _consecutive_run_start(block: set[int], circle: list[int]) -> int | None:
    """
    If block is a cyclically consecutive subset of circle, return the start of
    the run (the unique element whose cyclic predecessor is outside the block;
    for block == circle, the smallest element). Otherwise None.
    """
    k = len(circle)
    if len(block) == k:
        return min(block)
    positions = sorted(circle.index(x) for x in block)
    starts = [p for p in positions if circle[(p - 1) % k] not in block]
    if len(starts) != 1:
        return None
    return circle[starts[0]]


def is_annular_nc_partition(partition: SetPartition, n: int, m: int) -> bool:
    """
    Recursive-removal characterization: repeatedly delete one-circle blocks
    that are cyclically consecutive on their (current) circle; the remainder
    must leave both circles nonempty, consist only of through-blocks whose
    restrictions are consecutive runs, and show reversed cyclic block orders
    on the two circles.
    """
    if partition.size != n + m:
        raise ValueError("partition size does not match n + m")
    outer = list(range(1, n + 1))
    inner = list(range(n + 1, n + m + 1))
    blocks = [set(b) for b in partition.blocks]

    changed = True
    while changed:
        changed = False
        for b in list(blocks):
            circle = outer if all(x <= n for x in b) else inner if all(x > n for x in b) else None
            if circle is None or not b.issubset(circle):
                continue
            if _consecutive_run_start(b, circle) is None:
                continue
            for x in b:
                circle.remove(x)
            blocks.remove(b)
            changed = True

    if not blocks:
        return False  # everything removable: the two circles were never connected
    if not outer or not inner:
        return False

    outer_runs: dict[int, int] = {}
    inner_runs: dict[int, int] = {}
    for idx, b in enumerate(blocks):
        bp = {x for x in b if x <= n}
        bpp = {x for x in b if x > n}
        if not bp or not bpp:
            return False  # a one-circle block survived: it was not consecutive
        sp = _consecutive_run_start(bp, outer)
        spp = _consecutive_run_start(bpp, inner)
        if sp is None or spp is None:
            return False
        outer_runs[idx] = sp
        inner_runs[idx] = spp

    order_out = _block_order(blocks, outer, n, outer_side=True)
    order_in = _block_order(blocks, inner, n, outer_side=False)
    return _cyclically_equal(order_out, tuple(reversed(order_in)))


def _block_order(blocks: list[set[int]], circle: list[int], n: int, outer_side: bool) -> tuple[int, ...]:
    seq = []
    for x in circle:
        for idx, b in enumerate(blocks):
            if x in b:
                if not seq or seq[-1] != idx:
                    seq.append(idx)
                break
    if len(seq) > 1 and seq[0] == seq[-1]:
        seq.pop()
    return tuple(seq)


def _cyclically_equal(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    return any(a == b[k:] + b[:k] for k in range(len(b)))


@lru_cache(maxsize=None)
def enumerate_nc_annular_partitions(n: int, m: int) -> tuple[AnnularPartition, ...]:
    """
    All (n, m)-annular non-crossing partitions, by filtering the full
    partition lattice through the recursive-removal test.

    >>> len(enumerate_nc_annular_partitions(2, 1))
    3
    """
    if n + m > ANNULAR_PARTITION_GUARD:
        raise ValueError(
            f"enumerate_nc_annular_partitions is limited to n+m <= {ANNULAR_PARTITION_GUARD}"
        )
    out = []
    for part in enumerate_partitions(n + m):
        if is_annular_nc_partition(part, n, m):
            out.append(AnnularPartition.create(n, m, part))
    return tuple(out)


# ---------------------------------------------------------------------------
# fibers of the permutation -> partition map
# ---------------------------------------------------------------------------


def _run_from(block_part: Sequence[int], start: int) -> tuple[int, ...]:
    """Traverse a one-circle part in increasing cyclic label order from start."""
    ordered = sorted(block_part)
    i = ordered.index(start)
    return tuple(ordered[i:] + ordered[:i])


def block_cycle_orders(sigma: AnnularPartition) -> list[list[tuple[int, ...]]]:
    """
    For each block of sigma, the list of admissible cycle orders:

    - a one-circle block has the single increasing cyclic order;
    - with two or more through-blocks each through-block has a unique order,
      its runs starting where the (reduced-circle) predecessor leaves the
      block;
    - a unique through-block B admits |B'| * |B''| orders, one per choice of
      first elements.
    """
    n = sigma.n
    blocks = sigma.partition.blocks
    through = set(sigma.through_blocks)
    reduced_outer = sorted(x for i in through for x in sigma.outer_part(i))
    reduced_inner = sorted(x for i in through for x in sigma.inner_part(i))

    orders: list[list[tuple[int, ...]]] = []
    for idx, block in enumerate(blocks):
        if idx not in through:
            orders.append([tuple(sorted(block))])
            continue
        bp, bpp = sigma.outer_part(idx), sigma.inner_part(idx)
        if len(through) == 1:
            orders.append(
                [
                    _run_from(bp, s1) + _run_from(bpp, s2)
                    for s1 in bp
                    for s2 in bpp
                ]
            )
        else:
            s1 = _consecutive_run_start(set(bp), reduced_outer)
            s2 = _consecutive_run_start(set(bpp), reduced_inner)
            assert s1 is not None and s2 is not None, "through-block parts must be runs"
            orders.append([_run_from(bp, s1) + _run_from(bpp, s2)])
    return orders


def fibers(sigma: AnnularPartition) -> tuple[AnnularPermutation, ...]:
    """
    All annular non-crossing permutations whose cycle structure is sigma.
    Constructed from the block order analysis; the AnnularPermutation
    constructor re-checks connectedness and the geodesic condition, so a
    wrong order choice cannot slip through silently.

    >>> [ap.perm.cycle_string() for ap in fibers(enumerate_nc_annular_partitions(2, 1)[0])]
    ['(1,2,3)', '(1,3,2)']
    """
    total = sigma.n + sigma.m
    choices = block_cycle_orders(sigma)
    out = []
    for combo in itertools.product(*choices):
        perm = Permutation.from_cycles(total, combo)
        out.append(AnnularPermutation(sigma.profile, perm))
    return tuple(out)
