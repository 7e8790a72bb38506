import random

import pytest

from pairforge.errors import (ConfigError, InvalidInvolutionError,
                              NotInvertibleError)
from pairforge.symbol import (AlgInvolution, SymbolAlgebra, mat_eq,
                              mat_identity, mat_mul)

CONFIGS = [(0, 2), (0, 3), (0, 4), (3, 2), (3, 4)]


def random_elem(alg, rng, nterms=3):
    e = alg.zero()
    for _ in range(nterms):
        r, s = rng.randrange(alg.m), rng.randrange(alg.m)
        e = e + alg.basis_elem(r, s, alg.field.scalar(rng.randrange(-3, 4)))
    return e


@pytest.mark.parametrize("p,q", CONFIGS)
def test_defining_relations(p, q):
    alg = SymbolAlgebra(p, q)
    i, j = alg.i(), alg.j()
    assert i ** q == alg.scalar(alg.a)
    assert j ** q == alg.scalar(alg.b)
    assert j * i == (i * j).scale(alg.theta)


def test_ji_power_commutation():
    alg = SymbolAlgebra(0, 4)
    i, j = alg.i(), alg.j()
    for r in range(4):
        for s in range(4):
            lhs = (j ** s) * (i ** r)
            rhs = ((i ** r) * (j ** s)).scale(alg.field.theta(r * s))
            assert lhs == rhs


def test_quaternion_product_golden():
    alg = SymbolAlgebra(0, 2)
    one, i = alg.one(), alg.i()
    assert (one + i) * (one - i) == alg.scalar(alg.field.one - alg.a)


@pytest.mark.parametrize("p,q", CONFIGS)
def test_associativity_random(p, q):
    alg = SymbolAlgebra(p, q)
    rng = random.Random(17 * p + q)
    for _ in range(40):
        u, v, w = (random_elem(alg, rng) for _ in range(3))
        assert (u * v) * w == u * (v * w)


class TestInverse:
    def test_one(self):
        alg = SymbolAlgebra(0, 3)
        assert alg.one().inv() == alg.one()

    def test_i_inverse_golden(self):
        for q in (2, 3, 4):
            alg = SymbolAlgebra(0, q)
            want = alg.basis_elem(q - 1, 0, alg.field.one / alg.a)
            assert alg.i().inv() == want

    def test_one_plus_j_quaternion(self):
        alg = SymbolAlgebra(0, 2)
        one, j = alg.one(), alg.j()
        want = (one - j).scale(alg.field.one / (alg.field.one - alg.b))
        assert (one + j).inv() == want

    def test_zero_not_invertible(self):
        alg = SymbolAlgebra(0, 2)
        with pytest.raises(NotInvertibleError):
            alg.zero().inv()

    @pytest.mark.parametrize("p,q", [(0, 2), (0, 3), (3, 4)])
    def test_random_roundtrip(self, p, q):
        alg = SymbolAlgebra(p, q)
        rng = random.Random(23 * p + q)
        done = 0
        while done < 12:
            u = random_elem(alg, rng)
            if u.is_zero():
                continue
            w = u.inv()
            assert (u * w).is_one() and (w * u).is_one()
            done += 1


class TestRegularRep:
    def test_rep_one_identity(self):
        alg = SymbolAlgebra(0, 3)
        assert mat_eq(alg.ext, alg.one().regular_rep(), mat_identity(alg.ext, 3))

    def test_rep_j_golden(self):
        # subdiagonal 1s with b in the top-right corner
        alg = SymbolAlgebra(0, 3)
        M = alg.j().regular_rep()
        ext = alg.ext
        b = ext.scalar(alg.b)
        for r in range(3):
            for c in range(3):
                if r == 0 and c == 2:
                    assert M[r][c] == b
                elif r == c + 1:
                    assert M[r][c] == ext.one
                else:
                    assert ext.is_zero(M[r][c])

    def test_rep_i_golden(self):
        # diagonal (i, theta i, theta^2 i, ...)
        alg = SymbolAlgebra(0, 4)
        M = alg.i().regular_rep()
        ext = alg.ext
        t = ext.gen()
        for s in range(4):
            for c in range(4):
                if s == c:
                    wanted = tuple(x * alg.field.theta(s) for x in t)
                    assert M[s][c] == wanted
                else:
                    assert ext.is_zero(M[s][c])

    def test_orientation_fixed(self):
        # right action on the j-power basis: rep(uv) = rep(v) rep(u), and the
        # transposed rep_hom is a straight homomorphism
        alg = SymbolAlgebra(0, 3)
        rng = random.Random(7)
        for _ in range(15):
            u, v = random_elem(alg, rng), random_elem(alg, rng)
            assert mat_eq(alg.ext, (u * v).regular_rep(),
                          mat_mul(alg.ext, v.regular_rep(), u.regular_rep()))
            assert mat_eq(alg.ext, (u * v).rep_hom(),
                          mat_mul(alg.ext, u.rep_hom(), v.rep_hom()))

    def test_invertibility_detection(self):
        alg = SymbolAlgebra(0, 2)
        rng = random.Random(8)
        for _ in range(10):
            u = random_elem(alg, rng)
            M = u.regular_rep()
            # det via 2x2 formula over F(i)
            ext = alg.ext
            det = ext.sub(ext.mul(M[0][0], M[1][1]), ext.mul(M[0][1], M[1][0]))
            if ext.is_zero(det):
                with pytest.raises(NotInvertibleError):
                    u.inv()
            else:
                assert (u * u.inv()).is_one()


class TestInvolutions:
    def test_case1_golden(self):
        alg = SymbolAlgebra(0, 2)
        inv = alg.case_involution(1)
        i, j = alg.i(), alg.j()
        assert inv.apply(i * j) == (i * j).scale(alg.theta)
        assert inv.apply(alg.one()) == alg.one()

    def test_case3_j_image(self):
        alg = SymbolAlgebra(0, 2)
        inv = alg.case_involution(3)
        want = alg.basis_elem(0, 1, alg.field.one / alg.b)
        assert inv.apply(alg.j()) == want

    @pytest.mark.parametrize("case", [1, 2, 3])
    @pytest.mark.parametrize("p,q", [(0, 2), (0, 3), (3, 4)])
    def test_involution_laws_random(self, case, p, q):
        alg = SymbolAlgebra(p, q)
        inv = alg.case_involution(case)
        rng = random.Random(11 * case + p + q)
        for _ in range(20):
            u, v = random_elem(alg, rng), random_elem(alg, rng)
            assert inv.apply(u * v) == inv.apply(v) * inv.apply(u)
            assert inv.apply(inv.apply(u)) == u

    def test_invalid_involution_rejected(self):
        alg = SymbolAlgebra(0, 2)
        with pytest.raises(InvalidInvolutionError):
            AlgInvolution(alg.i(), alg.i(), -1)
        alg4 = SymbolAlgebra(0, 4)
        with pytest.raises(InvalidInvolutionError):
            # with theta of order 4 fixing it breaks the relation image
            AlgInvolution(alg4.i(), alg4.j(), 1)

    def test_center_action_forced_by_images(self):
        alg = SymbolAlgebra(0, 2)
        inv2 = alg.case_involution(2)
        assert inv2.coeff_star(alg.a) == alg.a ** -1
        assert inv2.coeff_star(alg.b) == alg.b ** -1
        inv1 = alg.case_involution(1)
        assert inv1.coeff_star(alg.a) == alg.a
        assert inv1.coeff_star(alg.b) == alg.b


class TestSplitRep:
    def test_identity(self):
        alg = SymbolAlgebra(0, 2)
        assert mat_eq(alg.ext, alg.one().quat_split_rep(),
                      mat_identity(alg.ext, 2))

    def test_k_squared(self):
        alg = SymbolAlgebra(0, 2)
        k = alg.i() * alg.j()
        M2 = mat_mul(alg.ext, k.quat_split_rep(), k.quat_split_rep())
        want = alg.ext.scalar(-(alg.a * alg.b))
        assert M2[0][0] == want and M2[1][1] == want
        assert alg.ext.is_zero(M2[0][1]) and alg.ext.is_zero(M2[1][0])

    def test_linearity_golden(self):
        alg = SymbolAlgebra(0, 2)
        M = (alg.one() + alg.i()).quat_split_rep()
        ext = alg.ext
        one_plus = ext.add(ext.one, ext.gen())
        one_minus = ext.sub(ext.one, ext.gen())
        assert M[0][0] == one_plus and M[1][1] == one_minus
        assert ext.is_zero(M[0][1]) and ext.is_zero(M[1][0])

    def test_multiplicative_random(self):
        alg = SymbolAlgebra(0, 2)
        rng = random.Random(9)
        for _ in range(20):
            u, v = random_elem(alg, rng), random_elem(alg, rng)
            assert mat_eq(alg.ext, (u * v).quat_split_rep(),
                          mat_mul(alg.ext, u.quat_split_rep(),
                                  v.quat_split_rep()))

    def test_degree_guard(self):
        alg = SymbolAlgebra(0, 3)
        with pytest.raises(ConfigError):
            alg.one().quat_split_rep()


def test_serialize_roundtrip():
    alg = SymbolAlgebra(0, 3)
    rng = random.Random(10)
    for _ in range(10):
        u = random_elem(alg, rng)
        assert alg.from_serialized(u.serialize()) == u


def test_algebra_mismatch():
    a2 = SymbolAlgebra(0, 2)
    a3 = SymbolAlgebra(0, 3)
    with pytest.raises(ConfigError, match="algebra mismatch"):
        a2.one() * a3.one()
