import random
from fractions import Fraction

import pytest

from tracefluct.algebra import GramSpace, Mat, MatrixAlgebra, Vec
from tracefluct.exact import Scalar


def rational_rng(seed: int) -> random.Random:
    return random.Random(seed)


def random_fraction(rng: random.Random, den: int = 4, span: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def random_psd_gram(rng: random.Random, dim: int) -> GramSpace:
    """A random rational PSD Gram matrix G = L L^T with rational lower-triangular L."""
    L = [[random_fraction(rng) if j < i else (random_fraction(rng) + 1 if j == i else Fraction(0)) for j in range(dim)] for i in range(dim)]
    rows = [[sum(L[i][k] * L[j][k] for k in range(dim)) for j in range(dim)] for i in range(dim)]
    return GramSpace.from_rows(rows)


def random_mat(rng: random.Random, algebra: MatrixAlgebra) -> Mat:
    return algebra.element(
        [[random_fraction(rng) for _ in range(algebra.dim)] for _ in range(algebra.dim)]
    )


@pytest.fixture
def ortho3() -> GramSpace:
    return GramSpace.orthonormal(3)


@pytest.fixture
def alg2() -> MatrixAlgebra:
    return MatrixAlgebra(2)
