import random
from fractions import Fraction

import pytest

from pairforge.errors import ConfigError, FrontierError
from pairforge.groups import (FreeWord, free_nilpotent_c2_r3, heisenberg_group,
                              nilpotent_image)
from pairforge.series import (CrossedProductCtx, GroupRingCoeff,
                              check_star_invariance, crossed_tau,
                              heisenberg_f2_context, order_compare, phi_N,
                              pullback_X, scalar_square_series, series_inv,
                              series_mul, star_on_crossed)


@pytest.fixture(scope="module")
def ctx():
    return heisenberg_f2_context(star_images={"x": "x", "y": "y"})


class TestOrder:
    def test_goldens(self):
        H = heisenberg_group()
        one, x, z = H.identity(), H.gen("x"), H.gen("z")
        assert order_compare(one, x) == -1
        assert order_compare(x, x * x) == -1
        assert order_compare(z, x) == -1
        assert order_compare(x, x) == 0

    def test_group_mismatch(self):
        H = heisenberg_group()
        G = free_nilpotent_c2_r3()
        with pytest.raises(ConfigError):
            order_compare(H.gen("x"), G.gen("x1"))

    @pytest.mark.parametrize("group", [heisenberg_group(),
                                       free_nilpotent_c2_r3()])
    def test_bi_invariance_random(self, group):
        rng = random.Random(21)
        r = group.rank
        for _ in range(300):
            f, g, h = (group.from_exps(tuple(rng.randrange(-3, 4)
                                             for _ in range(r)))
                       for _ in range(3))
            c = order_compare(g, h)
            assert order_compare(f * g, f * h) == c
            assert order_compare(g * f, h * f) == c

    def test_totality(self):
        H = heisenberg_group()
        rng = random.Random(22)
        for _ in range(100):
            g = H.from_exps(tuple(rng.randrange(-2, 3) for _ in range(3)))
            h = H.from_exps(tuple(rng.randrange(-2, 3) for _ in range(3)))
            assert order_compare(g, h) == -order_compare(h, g)


class TestScalarSeries:
    def test_polynomial_product(self, ctx):
        one = {(0, 0, 0): 1}
        f = ctx.scalar_series({**one, (1, 0, 0): 1})
        g = ctx.scalar_series({**one, (1, 0, 0): -1})
        assert (f * g).support == {(0, 0, 0): Fraction(1), (2, 0, 0): Fraction(-1)}

    def test_geometric_inverse(self, ctx):
        f = ctx.scalar_series({(0, 0, 0): 1, (1, 0, 0): -1})
        g = series_inv(f, (4, 0, 0))
        assert g.support == {(k, 0, 0): Fraction(1) for k in range(4)}
        prod = series_mul(f, g)
        assert prod.support == {(0, 0, 0): Fraction(1)}

    def test_inverse_of_one(self, ctx):
        one = ctx.scalar_series({(0, 0, 0): 1})
        assert series_inv(one, (2, 0, 0)).support == {(0, 0, 0): Fraction(1)}

    def test_frontier_unreachable(self, ctx):
        f = ctx.scalar_series({(0, 0, 0): 1, (0, 0, 1): -1})
        with pytest.raises(FrontierError, match="frontier unreachable"):
            series_inv(f, (1, 0, 0))

    def test_central_inverse_reachable_in_z(self, ctx):
        f = ctx.scalar_series({(0, 0, 0): 1, (0, 0, 1): -1})
        g = series_inv(f, (0, 0, 5))
        assert g.support == {(0, 0, k): Fraction(1) for k in range(5)}

    def test_inverse_with_shifted_leading_term(self, ctx):
        # f = x^-1 - 1: leading term x^-1
        f = ctx.scalar_series({(-1, 0, 0): 1, (0, 0, 0): -1})
        g = series_inv(f, (3, 0, 0))
        assert series_mul(f, g).support == {(0, 0, 0): Fraction(1)}

    def test_mul_frontier_law(self, ctx):
        f = ctx.scalar_series({(0, 0, 0): 1, (1, 0, 0): 2}, frontier=(2, 0, 0))
        g = ctx.scalar_series({(0, 0, 0): 1}, frontier=(3, 0, 0))
        prod = f * g
        # min supports are the identity, so the tighter frontier wins
        assert prod.frontier == (2, 0, 0)

    def test_associativity_random(self, ctx):
        rng = random.Random(23)
        for _ in range(60):
            fs = []
            for _ in range(3):
                sup = {(rng.randrange(0, 2), rng.randrange(0, 2),
                        rng.randrange(0, 2)): rng.randrange(-3, 4)
                       for _ in range(2)}
                fs.append(ctx.scalar_series(sup))
            f, g, h = fs
            lhs, rhs = (f * g) * h, f * (g * h)
            assert lhs.support == rhs.support


class TestCrossedProduct:
    def test_single_term_law(self, ctx):
        Q = ctx.quotient
        n = FreeWord.from_string("y^-1 x^-1 y x")
        m = FreeWord.from_string("x^-1 y^-1 x y")
        f = ctx.crossed_series({(1, 0, 0): GroupRingCoeff.from_word(n)})
        g = ctx.crossed_series({(0, 1, 0): GroupRingCoeff.from_word(m)})
        prod = f * g
        x, y = Q.gen("x"), Q.gen("y")
        expect = n * m.conjugated_by(ctx.section(x)) * ctx.tau(x, y)
        assert prod.support == {(1, 1, 0): {expect: Fraction(1)}}

    def test_tau_identity_on_unit(self, ctx):
        Q = ctx.quotient
        alpha = Q.from_exps((1, -2, 1))
        assert crossed_tau(ctx, Q.identity(), alpha).is_identity()
        assert crossed_tau(ctx, alpha, Q.identity()).is_identity()

    def test_tau_lands_in_n_and_augments(self, ctx):
        Q = ctx.quotient
        rng = random.Random(24)
        for _ in range(100):
            a = Q.from_exps(tuple(rng.randrange(-2, 3) for _ in range(3)))
            b = Q.from_exps(tuple(rng.randrange(-2, 3) for _ in range(3)))
            t = crossed_tau(ctx, a, b)
            assert nilpotent_image(t, Q).is_identity()
            assert GroupRingCoeff.augment(GroupRingCoeff.from_word(t)) == 1

    def test_crossed_inverse_trivial_unit_leading(self, ctx):
        # leading coefficient 2 * word: still invertible
        w = FreeWord.from_string("y^-1 x^-1 y x")
        f = ctx.crossed_series({(0, 0, 0): GroupRingCoeff.from_word(w, 2),
                                (1, 0, 0): GroupRingCoeff.from_scalar(1)})
        g = f.inv((2, 0, 0))
        prod = (f * g).truncate((2, 0, 0))
        assert prod.support == {(0, 0, 0): {FreeWord(): Fraction(1)}}

    def test_crossed_inverse_rejects_sums(self, ctx):
        c = GroupRingCoeff.add(
            GroupRingCoeff.from_scalar(1),
            GroupRingCoeff.from_word(FreeWord.from_string("y^-1 x^-1 y x")))
        f = ctx.crossed_series({(0, 0, 0): c})
        with pytest.raises(ConfigError, match="trivial unit"):
            f.inv((1, 0, 0))

    def test_associativity_random(self, ctx):
        rng = random.Random(25)
        for _ in range(40):
            fs = []
            for _ in range(3):
                sup = {}
                for _ in range(2):
                    e = (rng.randrange(0, 2), rng.randrange(0, 2),
                         rng.randrange(0, 2))
                    w = FreeWord.from_letters(
                        [(rng.choice("xy"), rng.choice([-1, 1]))
                         for _ in range(rng.randrange(0, 3))])
                    c = GroupRingCoeff.from_word(w, rng.randrange(-2, 3))
                    if c:
                        sup[e] = GroupRingCoeff.add(sup.get(e, {}), c)
                fs.append(ctx.crossed_series(sup))
            f, g, h = fs
            assert ((f * g) * h).support == (f * (g * h)).support


class TestAugmentation:
    def test_scalar_sum(self, ctx):
        n = FreeWord.from_string("y^-1 x^-1 y x")
        c = GroupRingCoeff.add(GroupRingCoeff.from_scalar(2),
                               GroupRingCoeff.from_word(n, 3))
        f = ctx.crossed_series({(1, 0, 0): c})
        assert phi_N(f).support == {(1, 0, 0): Fraction(5)}

    def test_phi_of_one(self, ctx):
        assert phi_N(ctx.one()).support == {(0, 0, 0): Fraction(1)}

    def test_homomorphism_two_sided(self, ctx):
        rng = random.Random(26)
        for _ in range(120):
            fs = []
            for _ in range(2):
                sup = {}
                for _ in range(rng.randrange(1, 4)):
                    e = (rng.randrange(0, 2), rng.randrange(0, 2),
                         rng.randrange(0, 2))
                    w = FreeWord.from_letters(
                        [(rng.choice("xy"), rng.choice([-1, 1]))
                         for _ in range(rng.randrange(0, 4))])
                    c = GroupRingCoeff.from_word(w, rng.randrange(-3, 4))
                    if c:
                        sup[e] = GroupRingCoeff.add(sup.get(e, {}), c)
                fs.append(ctx.crossed_series(sup))
            f, g = fs
            assert phi_N(f * g).support == (phi_N(f) * phi_N(g)).support
            assert phi_N(f + g).support == (phi_N(f) + phi_N(g)).support

    def test_sigma_invariance_of_augmentation(self, ctx):
        Q = ctx.quotient
        rng = random.Random(27)
        for _ in range(50):
            alpha = Q.from_exps(tuple(rng.randrange(-2, 3) for _ in range(3)))
            w = FreeWord.from_letters(
                [(rng.choice("xy"), rng.choice([-1, 1]))
                 for _ in range(rng.randrange(0, 4))])
            c = GroupRingCoeff.from_word(w, 2)
            assert GroupRingCoeff.augment(ctx.sigma(alpha, c)) == \
                GroupRingCoeff.augment(c)


class TestStar:
    def test_transversal_star_golden(self, ctx):
        Q = ctx.quotient
        s = ctx.crossed_series({(1, 1, 0): 1})
        out = s.star()
        alpha = Q.from_exps((1, 1, 0))
        alpha_star = ctx.quotient_star.apply(alpha)
        n = ctx.n_alpha(alpha)
        assert out.support == {alpha_star.exps: {n: Fraction(1)}}

    def test_one_fixed(self, ctx):
        one = ctx.one()
        assert one.star().support == one.support

    def test_order_two_on_scalar_coefficients(self, ctx):
        rng = random.Random(28)
        for _ in range(60):
            sup = {(rng.randrange(0, 3), rng.randrange(0, 3),
                    rng.randrange(-1, 2)): rng.randrange(-3, 4)
                   for _ in range(3)}
            f = ctx.embed_scalar_poly(sup)
            ff = star_on_crossed(ctx, star_on_crossed(ctx, f))
            assert ff.support == f.support

    def test_star_of_truncated_series_rejected(self, ctx):
        f = ctx.embed_scalar_poly({(0, 0, 0): 1}).truncate((1, 0, 0))
        with pytest.raises(ConfigError):
            f.star()

    def test_scalar_series_star(self, ctx):
        Q = ctx.quotient
        f = ctx.scalar_series({(0, 0, 1): 1})  # z-bar
        out = f.star()
        zstar = ctx.quotient_star.apply(Q.gen("z"))
        assert out.support == {zstar.exps: Fraction(1)}


class TestPullback:
    FRONT = (3, 0, 0)

    def test_trivial(self, ctx):
        X = pullback_X(ctx, {(0, 0, 0): 1}, {(0, 0, 0): 1}, self.FRONT)
        assert phi_N(X).support == {(0, 0, 0): Fraction(1)}
        assert check_star_invariance(X, self.FRONT)

    def test_single_polynomial(self, ctx):
        p = {(0, 0, 0): 1, (1, 0, 0): 1}
        X = pullback_X(ctx, p, {(0, 0, 0): 1}, self.FRONT)
        A2 = scalar_square_series(ctx, p, {(0, 0, 0): 1}, self.FRONT)
        assert phi_N(X).eq_below(A2, self.FRONT)
        assert check_star_invariance(X, self.FRONT)
        # direct expansion: (1+x)^2 = 1 + 2x + x^2
        assert A2.support == {(0, 0, 0): Fraction(1), (1, 0, 0): Fraction(2),
                              (2, 0, 0): Fraction(1)}

    def test_case1_transport(self, ctx):
        for p in ({(0, 0, 0): 1, (1, 0, 0): 1}, {(0, 0, 0): 1, (0, 1, 0): 1}):
            X = pullback_X(ctx, p, {(0, 0, 0): 1}, self.FRONT)
            A2 = scalar_square_series(ctx, p, {(0, 0, 0): 1}, self.FRONT)
            assert phi_N(X).eq_below(A2, self.FRONT)
            assert check_star_invariance(X, self.FRONT)

    def test_nontrivial_denominator(self, ctx):
        p = {(0, 0, 0): 1, (1, 0, 0): 1, (2, 0, 0): 1}
        q = {(0, 0, 0): 1, (1, 0, 0): 1}
        front = (4, 0, 0)
        X = pullback_X(ctx, p, q, front)
        A2 = scalar_square_series(ctx, p, q, front)
        assert phi_N(X).eq_below(A2, front)
        assert check_star_invariance(X, front)

    def test_x_inverse_image(self, ctx):
        # Phi_N(X^{-1}-side): invert X and compare against A^-2
        p = {(0, 0, 0): 1, (1, 0, 0): 1}
        X = pullback_X(ctx, p, {(0, 0, 0): 1}, self.FRONT)
        Xinv = X.inv((2, 0, 0))
        A2 = scalar_square_series(ctx, p, {(0, 0, 0): 1}, self.FRONT)
        A2inv = A2.inv((2, 0, 0))
        assert phi_N(Xinv).eq_below(A2inv, (2, 0, 0))

    def test_zero_polynomial_rejected(self, ctx):
        with pytest.raises(ConfigError):
            pullback_X(ctx, {}, {(0, 0, 0): 1}, self.FRONT)


class TestContextValidation:
    def test_bad_section_rejected(self):
        Q = heisenberg_group()
        with pytest.raises(ConfigError):
            CrossedProductCtx(Q, {"x": "y", "y": "x", "z": "y^-1 x^-1 y x"})

    def test_missing_section(self):
        Q = heisenberg_group()
        with pytest.raises(ConfigError):
            CrossedProductCtx(Q, {"x": "x", "y": "y"})

    def test_star_requires_data(self):
        ctx = heisenberg_f2_context()
        f = ctx.one()
        with pytest.raises(ConfigError):
            f.star()
