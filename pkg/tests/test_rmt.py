from fractions import Fraction

import numpy as np
import pytest

from conftest import random_mat, random_psd_gram, rational_rng
from tracefluct.algebra import GramSpace, MatrixAlgebra, psi_pi, tr_sigma
from tracefluct.exact import Scalar, as_scalar, fit_inverse_powers
from tracefluct.perm import Permutation
from tracefluct.rmt import (
    ConvergenceRequest,
    GaussianFamilySpec,
    WishartSpec,
    batched_se,
    convergence_study,
    exact_gue_cumulant,
    exact_gue_moment,
    exact_wishart_cumulant,
    exact_wishart_moment,
    extract_limit,
    gaussian_trace_batch,
    gue_constant_word_batch,
    inflate,
    inflate_float,
    joint_k2,
    k_statistics,
    polynomial_trace_batch,
    sample_compound_wishart,
    sample_gaussian_family,
    wishart_trace_batch,
)
from tracefluct import theory


@pytest.fixture
def unit_line():
    return GramSpace.orthonormal(1)


class TestGueOracle:
    def test_var_tr_x_is_one_every_n(self, unit_line):
        f = unit_line.basis(0)
        for N in (1, 2, 3, 7, 32, 101):
            assert exact_gue_cumulant(unit_line, [[f], [f]], N) == 1

    def test_expectation_tr_x2_is_n(self, unit_line):
        f = unit_line.basis(0)
        for N in (1, 4, 9):
            assert exact_gue_cumulant(unit_line, [[f, f]], N) == N

    def test_k2_x2_x2_is_two_exactly(self, unit_line):
        f = unit_line.basis(0)
        for N in (2, 5, 8):
            assert exact_gue_cumulant(unit_line, [[f, f], [f, f]], N) == 2

    def test_k2_x_x3_is_three_exactly(self, unit_line):
        f = unit_line.basis(0)
        for N in (2, 5):
            assert exact_gue_cumulant(unit_line, [[f], [f, f, f]], N) == 3

    def test_moment_vs_cumulant_consistency(self, unit_line):
        # k2 = E[Y1 Y2] - E[Y1] E[Y2], checked through the independent moment sum
        f = unit_line.basis(0)
        for N in (2, 4):
            m11 = exact_gue_moment(unit_line, [[f, f], [f, f]], N)
            m1 = exact_gue_moment(unit_line, [[f, f]], N)
            k2 = exact_gue_cumulant(unit_line, [[f, f], [f, f]], N)
            assert k2 == m11 - m1 * m1

    def test_odd_total_vanishes(self, unit_line):
        f = unit_line.basis(0)
        assert exact_gue_cumulant(unit_line, [[f], [f, f]], 5).is_zero()

    def test_correlated_family(self):
        space = GramSpace.from_rows([[1, "1/2"], ["1/2", 1]])
        f, g = space.basis(0), space.basis(1)
        # k2[Tr X(f), Tr X(g)] == <f, g> for every N
        assert exact_gue_cumulant(space, [[f], [g]], 6) == Fraction(1, 2)

    def test_guard(self, unit_line):
        f = unit_line.basis(0)
        with pytest.raises(ValueError):
            exact_gue_cumulant(unit_line, [[f] * 15, [f]], 4)


class TestWishartOracle:
    def test_expectation_tr_p_is_n(self, alg2):
        one = alg2.identity()
        for N in (2, 4, 10):
            assert exact_wishart_cumulant(alg2, [[one]], N) == N

    def test_expectation_matches_trace_of_d(self, alg2):
        rng = rational_rng(3)
        d = random_mat(rng, alg2)
        for N in (2, 6):
            assert exact_wishart_cumulant(alg2, [[d]], N) == N * alg2.psi(d)

    def test_second_moment_marchenko_pastur(self, alg2):
        # E[Tr P^2] for D = I equals 2N, from the independent entrywise Wick count
        one = alg2.identity()
        for N in (2, 4, 8):
            assert exact_wishart_moment(alg2, [[one, one]], N) == 2 * N

    def test_k2_single_words_exact(self, alg2):
        rng = rational_rng(5)
        d = random_mat(rng, alg2)
        for N in (2, 4):
            assert exact_wishart_cumulant(alg2, [[d], [d]], N) == alg2.psi(d * d)

    def test_divisibility_guard(self, alg2):
        with pytest.raises(ValueError):
            exact_wishart_cumulant(alg2, [[alg2.identity()]], 5)

    def test_size_guard(self, alg2):
        with pytest.raises(ValueError):
            exact_wishart_cumulant(alg2, [[alg2.identity()] * 9], 4)


class TestLimitExtraction:
    def test_gaussian_pairs(self, unit_line):
        f = unit_line.basis(0)
        pairs = [([f, f], [f, f]), ([f], [f, f, f]), ([f] * 3, [f] * 3)]
        for left, right in pairs:
            values = {N: exact_gue_cumulant(unit_line, [left, right], N) for N in (4, 6, 8)}
            const = extract_limit(values, (0, 1, 2))
            assert const == theory.gauss_cov(unit_line, left, right)
            # the genus expansion has no odd powers: the 1/N coefficient is zero
            assert fit_inverse_powers(values, (0, 1, 2))[1].is_zero()

    def test_wishart_needs_even_basis(self, alg2):
        # at total length 6 a genus-two term N^-4 appears: the even-power basis
        # recovers the limit, a 1/N basis cannot
        d = alg2.element([[1, 0], [0, 0]])
        values = {N: exact_wishart_cumulant(alg2, [[d] * 3, [d] * 3], N) for N in (4, 6, 8)}
        limit = theory.wishart_cov(alg2, [d] * 3, [d] * 3)
        assert extract_limit(values, (0, 2, 4)) == limit
        assert extract_limit(values, (0, 1, 2)) != limit

    def test_requires_constant_power(self):
        with pytest.raises(ValueError):
            extract_limit({2: as_scalar(1), 3: as_scalar(1)}, (1, 2))


class TestSamplers:
    def test_deterministic(self, unit_line):
        spec = GaussianFamilySpec(8, unit_line, seed=424242)
        f = unit_line.basis(0)
        a = sample_gaussian_family(spec, [f], 3)[0]
        b = sample_gaussian_family(spec, [f], 3)[0]
        assert np.array_equal(a, b)
        c = sample_gaussian_family(spec, [f], 4)[0]
        assert not np.array_equal(a, c)

    def test_exactly_hermitian(self, unit_line):
        spec = GaussianFamilySpec(6, unit_line, seed=7)
        x = sample_gaussian_family(spec, [unit_line.basis(0)], 0)[0]
        assert np.array_equal(x, x.conj().T)

    def test_entry_covariance_spot_check(self, unit_line):
        spec = GaussianFamilySpec(4, unit_line, seed=11)
        f = unit_line.basis(0)
        vals = [sample_gaussian_family(spec, [f], i)[0][0, 1] for i in range(4000)]
        est = np.mean([v * np.conj(v) for v in vals]).real
        assert abs(est - 1 / 4) < 0.02

    def test_correlated_vectors(self):
        space = GramSpace.from_rows([[1, "1/2"], ["1/2", 1]])
        spec = GaussianFamilySpec(6, space, seed=13)
        f, g = space.basis(0), space.basis(1)
        traces = np.array(
            [[m.trace().real for m in sample_gaussian_family(spec, [f, g], i)] for i in range(4000)]
        )
        cov = joint_k2(traces[:, 0], traces[:, 1])
        assert abs(cov - 0.5) < 0.1  # k2[TrX(f), TrX(g)] == <f,g> exactly

    def test_wishart_adjoint_property(self, alg2):
        spec = WishartSpec(8, alg2, seed=5)
        d = alg2.element([[1, "1/2"], [0, 0]])
        p_d, p_dstar = sample_compound_wishart(spec, [d, d.adjoint()], 0)
        assert np.allclose(p_d.conj().T, p_dstar, atol=1e-12)

    def test_wishart_mean_tr_p_identity(self, alg2):
        batch = wishart_trace_batch(alg2, [[alg2.identity()]], 16, 3000, seed=21)
        est = batch.cumulants(batch.labels[0])
        assert abs(est.k1 - 16) < 4 * est.k1_se + 1e-9


class TestInflation:
    def test_scalar_case(self):
        alg1 = MatrixAlgebra(1)
        lam = alg1.element([["3/2"]])
        big = inflate(lam, 4)
        assert big.entries[0][0] == Fraction(3, 2)
        assert all(big.entries[i][i] == Fraction(3, 2) for i in range(4))

    def test_trace_words_match_psi(self, alg2):
        rng = rational_rng(9)
        d1, d2 = random_mat(rng, alg2), random_mat(rng, alg2)
        b1, b2 = inflate(d1, 6), inflate(d2, 6)
        assert (b1 * b1).trace() * Fraction(1, 6) == alg2.psi(d1 * d1)
        assert (b1 * b2).trace() * Fraction(1, 6) == alg2.psi(d1 * d2)

    def test_float_matches_exact(self, alg2):
        rng = rational_rng(10)
        d = random_mat(rng, alg2)
        assert np.allclose(inflate_float(d, 4), inflate(d, 4).to_numpy())

    def test_divisibility(self, alg2):
        with pytest.raises(ValueError):
            inflate(alg2.identity(), 5)


class TestKStatistics:
    def test_constant_samples(self):
        x = np.full(100, 3.25)
        k1, k2, k3, k4 = k_statistics(x)
        assert k1 == 3.25 and k2 == 0 and k3 == 0 and k4 == 0

    def test_two_point_unbiased(self):
        assert joint_k2(np.array([0.0, 2.0]), np.array([0.0, 2.0])) == pytest.approx(2.0)

    def test_synthetic_normal_stream(self):
        rng = np.random.Generator(np.random.Philox(key=2024))
        x = rng.standard_normal(40000)
        k1, k2, k3, k4 = k_statistics(x)
        se2 = batched_se(x, lambda v: k_statistics(v)[1])
        se3 = batched_se(x, lambda v: k_statistics(v)[2])
        assert abs(k2 - 1) < 4 * se2
        assert abs(k3) < 4 * se3

    def test_insufficient_samples(self):
        with pytest.raises(ValueError):
            k_statistics(np.array([1.0, 2.0, 3.0]))

    def test_k3_unbiased_on_bernoulli(self):
        # analytic k3 of Bernoulli(1/4) is p(1-p)(1-2p) = 3/32; check bias is small
        rng = np.random.Generator(np.random.Philox(key=99))
        estimates = [k_statistics((rng.random(12) < 0.25).astype(float))[2] for _ in range(6000)]
        assert abs(np.mean(estimates) - 3 / 32) < 0.01


class TestOracleVsSampler:
    def test_gaussian_var_anchor(self, unit_line):
        f = unit_line.basis(0)
        batch = gaussian_trace_batch(unit_line, [[f]], 16, 4000, seed=31)
        est = batch.cumulants(batch.labels[0])
        exact = exact_gue_cumulant(unit_line, [[f], [f]], 16).to_float()
        assert abs(est.k2 - exact) < 4 * est.k2_se

    def test_wishart_k2_small(self, alg2):
        d = alg2.element([[1, 0], [0, 0]])
        batch = wishart_trace_batch(alg2, [[d], [d, d]], 8, 4000, seed=37)
        est, se = batch.covariance(*batch.labels)
        exact = exact_wishart_cumulant(alg2, [[d], [d, d]], 8).to_float()
        assert abs(est - exact) < 4 * se

    def test_polynomial_batch(self, unit_line):
        f = unit_line.basis(0)
        # Tr X^2 via the polynomial path equals the word path sample by sample
        b1 = polynomial_trace_batch(unit_line, f, [(Fraction(0), Fraction(0), Fraction(1))], 8, 50, seed=41)
        b2 = gaussian_trace_batch(unit_line, [[f, f]], 8, 50, seed=41)
        assert np.allclose(b1.values[:, 0], b2.values[:, 0], atol=1e-9)

    def test_mixed_words(self, unit_line, alg2):
        f = unit_line.basis(0)
        d = alg2.element([[1, 0], [0, 0]])
        batch = gue_constant_word_batch(unit_line, f, d, ["XD", "XDXD"], 8, 1000, seed=43)
        assert batch.values.shape == (1000, 2)
        est = batch.cumulants("XD")
        assert abs(est.k1) < 4 * est.k1_se + 1e-9  # E[Tr XD] = 0


class TestConvergenceStudy:
    def test_gaussian_table(self, unit_line):
        f = unit_line.basis(0)
        req = ConvergenceRequest("gaussian", (f, f), (f, f), (8, 16), 2000, seed=53)
        rows = convergence_study(req, unit_line)
        assert [r["N"] for r in rows] == [8, 16]
        for row in rows:
            assert row["theory_limit"] == pytest.approx(2.0)
            assert row["oracle_k2"] == pytest.approx(2.0)
            assert abs(row["k2"] - row["oracle_k2"]) < 4 * row["k2_se"]

    def test_wishart_table(self, alg2):
        d = alg2.element([[1, 0], [0, 0]])
        req = ConvergenceRequest("wishart", (d,), (d,), (8,), 2000, seed=59)
        rows = convergence_study(req, alg2)
        # k2[Tr P(d), Tr P(d)] == psi(d^2) == 1/2 exactly for the projection
        assert rows[0]["oracle_k2"] == pytest.approx(0.5)
        assert abs(rows[0]["k2"] - 0.5) < 4 * rows[0]["k2_se"]

    def test_bad_flavor(self):
        with pytest.raises(ValueError):
            ConvergenceRequest("haar", (1,), (1,), (4,), 10, 1)
