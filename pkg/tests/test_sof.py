from collections import Counter
from fractions import Fraction

import pytest

from conftest import random_mat, random_psd_gram, rational_rng
from tracefluct.algebra import GramSpace, MatrixAlgebra
from tracefluct.exact import ONE, Scalar, as_scalar
from tracefluct.fock import OpPoly, PoissonSpace, SemicircularSpace, rho_fock, wick
from tracefluct.sof import (
    CallableSofModel,
    FockSofModel,
    PhiAtom,
    RhoAtom,
    check_second_order_free,
    rho_expand,
    validate_alternating,
)


@pytest.fixture
def semi_model():
    space = SemicircularSpace(GramSpace.orthonormal(2))
    return space, FockSofModel(space)


@pytest.fixture
def poisson_model():
    space = PoissonSpace(MatrixAlgebra(2))
    return space, FockSofModel(space)


def _shifted(space, word, shift):
    return wick(space, word) + OpPoly.one(space).scale(as_scalar(shift))


class TestValidation:
    def test_alternation_enforced(self):
        validate_alternating([("a", 1)])
        validate_alternating([("a", 1), ("b", 2)])
        with pytest.raises(ValueError):
            validate_alternating([("a", 1), ("b", 1)])
        with pytest.raises(ValueError):
            validate_alternating([("a", 1), ("b", 2), ("c", 1)])  # wraps around
        with pytest.raises(ValueError):
            validate_alternating([])


class TestClosedFormPatterns:
    def test_cross_subalgebra_singletons_vanish(self, semi_model):
        space, model = semi_model
        e1, e2 = space.gram_space.basis(0), space.gram_space.basis(1)
        a = _shifted(space, (e1,), "1/3")
        b = _shifted(space, (e2,), 2)
        exp = rho_expand([(a, 1)], [(b, 2)], model)
        assert exp.terms == []
        assert exp.value(model).is_zero()

    def test_phi_peel_pattern(self, poisson_model):
        # rho(a1 b2, a2) == phi(b2) rho(a1, a2), symbolically and numerically
        space, model = poisson_model
        d1 = space.algebra.element([[1, 0], [0, 0]])
        d2 = space.algebra.element([[0, 0], [0, 1]])
        a1 = _shifted(space, (d1,), "1/3")
        b2 = _shifted(space, (d2,), "5")
        a2 = _shifted(space, (d1, d1), "-1/2")
        exp = rho_expand([(a1, 1), (b2, 2)], [(a2, 1)], model)
        symbolic = Counter(exp.expanded_original_terms())
        assert symbolic == Counter([(1, (("phi", (1,)), ("rho", (0,), (2,))))])
        direct = rho_fock(a1 * b2, a2)
        assert exp.value(model) == direct
        assert direct == b2.phi() * rho_fock(a1, a2)
        assert not direct.is_zero()

    def test_six_term_expansion(self, poisson_model):
        space, model = poisson_model
        d1 = space.algebra.element([[1, 0], [0, 0]])
        d2 = space.algebra.element([[0, 0], [0, 1]])
        a1 = _shifted(space, (d1,), "1/3")
        b1 = _shifted(space, (d2,), "-2")
        a2 = _shifted(space, (d1, d1), "1/7")
        b2 = _shifted(space, (d2, d2), "3/5")
        exp = rho_expand([(a1, 1), (b1, 2)], [(a2, 1), (b2, 2)], model)
        # slots: a1=0, b1=1, a2=2, b2=3; the six net terms of the closed form
        expected = Counter(
            [
                (1, (("phi", (0, 2)), ("phi", (1, 3)))),
                (-1, (("phi", (0, 2)), ("phi", (1,)), ("phi", (3,)))),
                (-1, (("phi", (0,)), ("phi", (1, 3)), ("phi", (2,)))),
                (1, (("phi", (0,)), ("phi", (1,)), ("phi", (2,)), ("phi", (3,)))),
                (1, (("phi", (1,)), ("phi", (3,)), ("rho", (0,), (2,)))),
                (1, (("phi", (0,)), ("phi", (2,)), ("rho", (1,), (3,)))),
            ]
        )
        net = Counter()
        for coeff, atoms in exp.expanded_original_terms():
            net[atoms] += coeff
        net_terms = Counter({k: v for k, v in net.items()})
        expected_net = Counter()
        for coeff, atoms in expected:
            expected_net[atoms] += coeff
        assert {k: v for k, v in net_terms.items() if v} == {
            k: v for k, v in expected_net.items() if v
        }
        assert exp.value(model) == rho_fock(a1 * b1, a2 * b2)

    def test_balanced_structure_asserted(self, semi_model):
        space, model = semi_model
        e1, e2 = space.gram_space.basis(0), space.gram_space.basis(1)
        a = _shifted(space, (e1,), "1/2")
        b = _shifted(space, (e2, e2), "1")
        exp = rho_expand([(a, 1), (b, 2)], [(a, 1), (b, 2)], model)
        exp.assert_balanced()  # raises on violation
        assert any(isinstance(atom, RhoAtom) for term in exp.terms for atom in term.atoms)


class TestAgreementWithDirectRho:
    @pytest.mark.parametrize("flavor", ["semicircular", "poisson"])
    def test_all_alternating_words_up_to_six(self, flavor, semi_model, poisson_model):
        space, model = semi_model if flavor == "semicircular" else poisson_model
        if flavor == "semicircular":
            g1, g2 = space.gram_space.basis(0), space.gram_space.basis(1)
        else:
            g1 = space.algebra.element([[1, 0], [0, 0]])
            g2 = space.algebra.element([[0, 0], [0, 1]])
        pool = {
            1: [_shifted(space, (g1,), "1/3"), _shifted(space, (g1, g1), "-1")],
            2: [_shifted(space, (g2,), "2"), _shifted(space, (g2, g2), "1/5")],
        }

        def words(length, start_tag):
            tags = [1 + (start_tag + i) % 2 for i in range(length)]
            if length >= 2 and tags[0] == tags[-1]:
                return
            import itertools

            for combo in itertools.product(range(2), repeat=length):
                yield [(pool[t][c], t) for t, c in zip(tags, combo)]

        def product(word):
            out = word[0][0]
            for el, _ in word[1:]:
                out = out * el
            return out

        checked = 0
        for n in (1, 2, 4):
            for m in (1, 2, 4):
                if n + m > 6:
                    continue
                for s1 in (0, 1):
                    for s2 in (0, 1):
                        for aw in words(n, s1):
                            for bw in words(m, s2):
                                exp = rho_expand(aw, bw, model)
                                assert exp.value(model) == rho_fock(product(aw), product(bw))
                                checked += 1
        assert checked > 50

    def test_multilinearity_in_each_slot(self, poisson_model):
        space, model = poisson_model
        d1 = space.algebra.element([[1, 0], [0, 0]])
        d2 = space.algebra.element([[0, 0], [0, 1]])
        a = _shifted(space, (d1,), "1/3")
        b = _shifted(space, (d2,), "2")
        c = _shifted(space, (d1, d1), "-1")
        base = rho_expand([(a, 1), (b, 2)], [(c, 1)], model).value(model)
        scaled = rho_expand([(a.scale("3/7"), 1), (b, 2)], [(c, 1)], model).value(model)
        assert scaled == Scalar("3/7") * base
        scaled_right = rho_expand([(a, 1), (b, 2)], [(c.scale(-2), 1)], model).value(model)
        assert scaled_right == Scalar(-2) * base


class TestAxiomChecker:
    def test_fock_models_pass(self, semi_model, poisson_model):
        for space, model in (semi_model, poisson_model):
            if isinstance(space, SemicircularSpace):
                g1, g2 = space.gram_space.basis(0), space.gram_space.basis(1)
            else:
                g1 = space.algebra.element([[1, 0], [0, 0]])
                g2 = space.algebra.element([[0, 0], [0, 1]])
            pools = {1: [wick(space, (g1,)), wick(space, (g1, g1))],
                     2: [wick(space, (g2,)), wick(space, (g2, g2))]}
            report = check_second_order_free(model, pools, max_total_len=4)
            assert report.ok and report.checked > 0

    def test_perturbed_rho_fails(self, semi_model):
        space, model = semi_model
        e1, e2 = space.gram_space.basis(0), space.gram_space.basis(1)

        # same phi, but rho shifted by +1 on every pair: axiom (ii) must break
        broken = CallableSofModel(
            phi_fn=lambda x: x.phi(),
            rho_fn=lambda x, y: rho_fock(x, y) + ONE,
            mul_fn=lambda x, y: x * y,
            center_fn=model.center,
        )
        pools = {1: [wick(space, (e1,))], 2: [wick(space, (e2,))]}
        report = check_second_order_free(broken, pools, max_total_len=3)
        assert not report.ok
        assert any("(ii)" in f or "(i)" in f for f in report.failures)

    def test_uncentered_pool_rejected(self, semi_model):
        space, model = semi_model
        e1 = space.gram_space.basis(0)
        bad = wick(space, (e1,)) + OpPoly.one(space)
        with pytest.raises(ValueError):
            check_second_order_free(model, {1: [bad], 2: [wick(space, (e1,))]}, 3)
