"""
Exact complex-rational scalars and the little linear algebra the rest of the
package needs (determinants, principal minors, small linear solves).

Everything here is exact: no floats sneak in until a caller asks for one via
``to_complex``/``to_float``. Scalars are immutable and hashable so they can be
used as coefficients in canonicalized formal linear combinations.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction, str]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class Scalar:
    """
    An exact complex number a + b*i with rational a, b.

    >>> Scalar(1, 2) * Scalar(1, -2)
    Scalar('5')
    >>> Scalar("1/2") + Scalar("1/3")
    Scalar('5/6')
    """

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "Scalar":
        s = object.__new__(cls)
        object.__setattr__(s, "re", re)
        object.__setattr__(s, "im", im)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = as_scalar(other)
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        other = as_scalar(other)
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "Scalar":
        return as_scalar(other) - self

    def __mul__(self, other) -> "Scalar":
        other = as_scalar(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0 and d == 0:
            return Scalar._raw(a * c, _FR_ZERO)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        other = as_scalar(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("division by zero Scalar")
        return Scalar._raw((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other) -> "Scalar":
        return as_scalar(other) / self

    def __neg__(self) -> "Scalar":
        return Scalar._raw(-self.re, -self.im)

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int):
            raise TypeError("Scalar powers must be integers")
        if n < 0:
            return ONE / (self ** (-n))
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    # -- predicates and conversions ----------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def as_fraction(self) -> Fraction:
        if self.im != 0:
            raise ValueError(f"{self} is not real")
        return self.re

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def to_float(self) -> float:
        return float(self.as_fraction())

    def sort_key(self) -> tuple[Fraction, Fraction]:
        return (self.re, self.im)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


_FR_ZERO = Fraction(0)
ZERO = Scalar(0)
ONE = Scalar(1)


def as_scalar(x) -> Scalar:
    """Coerce an int/Fraction/str/Scalar into a Scalar."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar._raw(_as_fraction(x), _FR_ZERO)
    if isinstance(x, str):
        return Scalar._raw(Fraction(x), _FR_ZERO)
    raise TypeError(f"cannot interpret {x!r} as a Scalar")


def parse_scalar(obj) -> Scalar:
    """
    Parse the JSON form of a scalar: an int, a string "a/b", or an object
    {"re": "a/b", "im": "c/d"} (either key may be omitted).
    """
    if isinstance(obj, dict):
        extra = set(obj) - {"re", "im"}
        if extra:
            raise ValueError(f"unknown scalar fields {sorted(extra)}")
        return Scalar(_as_fraction(obj.get("re", 0)), _as_fraction(obj.get("im", 0)))
    if isinstance(obj, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(obj, (int, str)):
        return as_scalar(obj)
    raise ValueError(f"cannot parse scalar from {obj!r}")


def scalar_to_json(s: Scalar):
    if s.im == 0:
        return str(s.re)
    return {"re": str(s.re), "im": str(s.im)}


def prod(scalars: Iterable[Scalar]) -> Scalar:
    out = ONE
    for s in scalars:
        out = out * s
    return out


def ssum(scalars: Iterable[Scalar]) -> Scalar:
    out = ZERO
    for s in scalars:
        out = out + s
    return out


def det_exact(rows: Sequence[Sequence[Scalar]]) -> Scalar:
    """Determinant by fraction-free-ish Gaussian elimination, exact."""
    n = len(rows)
    a = [list(r) for r in rows]
    if any(len(r) != n for r in a):
        raise ValueError("determinant needs a square matrix")
    det = ONE
    for col in range(n):
        pivot = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if pivot is None:
            return ZERO
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor.is_zero():
                continue
            for c in range(col, n):
                a[r][c] = a[r][c] - factor * a[col][c]
    return det


def solve_exact(rows: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> list[Scalar]:
    """Solve A x = b exactly; raises ValueError if A is singular."""
    n = len(rows)
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if pivot is None:
            raise ValueError("singular system")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def is_psd_hermitian(rows: Sequence[Sequence[Scalar]]) -> bool:
    """
    Exact positive-semidefiniteness test for a Hermitian matrix: every
    principal minor (not just the leading ones, which would miss e.g.
    diag(0, -1)) must be a nonnegative real.
    """
    n = len(rows)
    for size in range(1, n + 1):
        for subset in _subsets(n, size):
            sub = [[rows[i][j] for j in subset] for i in subset]
            d = det_exact(sub)
            if not d.is_real() or d.re < 0:
                return False
    return True


def _subsets(n: int, size: int):
    import itertools

    return itertools.combinations(range(n), size)


def fit_inverse_powers(values: dict[int, Scalar], powers: Sequence[int]) -> list[Scalar]:
    """
    Given exact values f(N) at len(powers) distinct N, solve exactly for the
    coefficients c_j in f(N) = sum_j c_j * N**(-powers[j]).
    """
    ns = sorted(values)
    if len(ns) != len(powers):
        raise ValueError("need exactly one sample point per basis power")
    rows = [[as_scalar(Fraction(1, n**p) if p else 1) for p in powers] for n in ns]
    return solve_exact(rows, [values[n] for n in ns])
