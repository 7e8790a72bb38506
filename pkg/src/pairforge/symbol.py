"""Symbol algebras and quaternion algebras with exact arithmetic.

An algebra of degree m over F = P(theta)(a, b) is generated by i, j with

    i^m = a,   j^m = b,   j i = theta * i j,

and has basis {i^r j^s : 0 <= r, s < m}.  Elements are stored dense as an
m x m coefficient grid of rational functions.  The right regular
representation over the commutative field F(i) = F[t]/(t^m - a) drives
inversion and feeds the freeness certification layer.
"""

from __future__ import annotations

from .errors import (ConfigError, FieldError, InternalConsistencyError,
                     InvalidInvolutionError, NotInvertibleError)
from .fields import FunctionField, RatFunc


class RootExtField:
    """F(i) = F[t]/(t^m - radicand) for a function field F.

    Elements are tuples of m rational functions (coordinates on 1, t, ...,
    t^(m-1)).  With radicand a transcendental variable this is a field.
    """

    def __init__(self, base: FunctionField, m: int, radicand):
        self.base = base
        self.m = m
        self.radicand = radicand
        self.zero = (base.zero,) * m
        self.one = (base.one,) + (base.zero,) * (m - 1)

    def __eq__(self, other):
        return (isinstance(other, RootExtField) and self.base == other.base
                and self.m == other.m and self.radicand == other.radicand)

    def __hash__(self):
        return hash((self.base, self.m))

    def scalar(self, c):
        return (c,) + (self.base.zero,) * (self.m - 1)

    def gen(self):
        if self.m == 1:
            return (self.radicand,)
        return (self.base.zero, self.base.one) + (self.base.zero,) * (self.m - 2)

    def add(self, u, v):
        return tuple(x + y for x, y in zip(u, v))

    def sub(self, u, v):
        return tuple(x - y for x, y in zip(u, v))

    def neg(self, u):
        return tuple(-x for x in u)

    def mul(self, u, v):
        m = self.m
        if m == 1:
            return (u[0] * v[0],)
        conv = [self.base.zero] * (2 * m - 1)
        for x, cx in enumerate(u):
            if cx.is_zero():
                continue
            for y, cy in enumerate(v):
                if not cy.is_zero():
                    conv[x + y] = conv[x + y] + cx * cy
        out = conv[:m]
        for k in range(m, 2 * m - 1):
            c = conv[k]
            if not c.is_zero():
                out[k - m] = out[k - m] + c * self.radicand
        return tuple(out)

    def is_zero(self, u):
        return all(x.is_zero() for x in u)

    def inv(self, u):
        """Inverse by extended Euclid in F[t] against t^m - radicand."""
        if self.is_zero(u):
            raise ZeroDivisionError("division by zero in F(i)")
        if self.m == 1:
            return (self.base.one / u[0],)
        F = self.base
        modulus = [-self.radicand] + [F.zero] * (self.m - 1) + [F.one]
        f = modulus
        g = [x for x in u]
        while g and g[-1].is_zero():
            g.pop()
        s_f, s_g = [], [F.one]
        while g:
            q, r = self._uni_divmod(f, g)
            s_r = self._uni_sub(s_f, self._uni_mul(q, s_g))
            f, g = g, r
            s_f, s_g = s_g, s_r
        if len(f) != 1:
            raise NotInvertibleError("element is a zero divisor in F[t]/(t^m - a)")
        c_inv = F.one / f[0]
        out = [x * c_inv for x in s_f]
        out += [F.zero] * (self.m - len(out))
        return tuple(out[:self.m])

    def _uni_divmod(self, f, g):
        F = self.base
        r = list(f)
        q = [F.zero] * max(0, len(f) - len(g) + 1)
        inv_lead = F.one / g[-1]
        while len(r) >= len(g):
            c = r[-1] * inv_lead
            deg = len(r) - len(g)
            q[deg] = c
            for k, gc in enumerate(g):
                r[deg + k] = r[deg + k] - c * gc
            r.pop()
            while r and r[-1].is_zero():
                r.pop()
            if not r:
                break
        return q, r

    def _uni_mul(self, f, g):
        F = self.base
        if not f or not g:
            return []
        out = [F.zero] * (len(f) + len(g) - 1)
        for x, cx in enumerate(f):
            if cx.is_zero():
                continue
            for y, cy in enumerate(g):
                out[x + y] = out[x + y] + cx * cy
        while out and out[-1].is_zero():
            out.pop()
        return out

    def _uni_sub(self, f, g):
        F = self.base
        out = list(f) + [F.zero] * max(0, len(g) - len(f))
        for k, gc in enumerate(g):
            out[k] = out[k] - gc
        while out and out[-1].is_zero():
            out.pop()
        return out

    def pretty(self, u, gen_name="i"):
        parts = []
        for k, c in enumerate(u):
            if c.is_zero():
                continue
            head = f"{gen_name}^{k}" if k > 1 else (gen_name if k == 1 else "1")
            parts.append(f"({c})*{head}" if k else f"({c})")
        return " + ".join(parts) if parts else "0"


# -- small dense matrices over a RootExtField --------------------------------


def mat_identity(ext, n):
    return [[ext.one if r == c else ext.zero for c in range(n)] for r in range(n)]


def mat_mul(ext, A, B):
    n = len(A)
    out = []
    for r in range(n):
        row = []
        Ar = A[r]
        for c in range(n):
            acc = ext.zero
            for k in range(n):
                if not ext.is_zero(Ar[k]):
                    acc = ext.add(acc, ext.mul(Ar[k], B[k][c]))
            row.append(acc)
        out.append(row)
    return out

def mat_transpose(A):
    n = len(A)
    return [[A[c][r] for c in range(n)] for r in range(n)]


def mat_eq(ext, A, B):
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def mat_is_identity(ext, A):
    n = len(A)
    for r in range(n):
        for c in range(n):
            want = ext.one if r == c else ext.zero
            if A[r][c] != want:
                return False
    return True


def mat_solve(ext, A, rhs_cols):
    """Solve A X = RHS by Gauss-Jordan over the (commutative) extension field.

    ``rhs_cols`` is a list of columns; returns the solution columns.
    Raises NotInvertibleError when A is singular.
    """
    n = len(A)
    aug = [list(A[r]) + [col[r] for col in rhs_cols] for r in range(n)]
    width = n + len(rhs_cols)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if not ext.is_zero(aug[r][col]):
                pivot = r
                break
        if pivot is None:
            raise NotInvertibleError("singular matrix over F(i)")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = ext.inv(aug[col][col])
        aug[col] = [ext.mul(inv_p, x) for x in aug[col]]
        for r in range(n):
            if r != col and not ext.is_zero(aug[r][col]):
                factor = aug[r][col]
                aug[r] = [ext.sub(x, ext.mul(factor, y))
                          for x, y in zip(aug[r], aug[col])]
    return [[aug[r][n + k] for r in range(n)] for k in range(len(rhs_cols))]


def mat_inv(ext, A):
    n = len(A)
    cols = mat_solve(ext, A, [[ext.one if r == c else ext.zero for r in range(n)]
                              for c in range(n)])
    return [[cols[c][r] for c in range(n)] for r in range(n)]


# ---------------------------------------------------------------------------


class SymbolAlgebra:
    """S_F(a, b, theta) of degree m = q over F = P(theta)(a, b)."""

    def __init__(self, characteristic: int = 0, degree: int = 2,
                 variables=("a", "b")):
        if degree < 2:
            raise ConfigError(f"symbol algebra degree must be >= 2, got {degree}")
        self.field = FunctionField(characteristic, degree, variables)
        self.m = degree
        self.a = self.field.var(variables[0])
        self.b = self.field.var(variables[1])
        self.theta = self.field.theta()
        self.ext = RootExtField(self.field, degree, self.a)

    def __eq__(self, other):
        return (isinstance(other, SymbolAlgebra) and self.field == other.field
                and self.m == other.m)

    def __hash__(self):
        return hash((self.field, self.m))

    def __repr__(self):
        return (f"SymbolAlgebra(p={self.field.characteristic}, m={self.m})")

    def zero(self):
        z = self.field.zero
        return SymElem(self, tuple(tuple(z for _ in range(self.m))
                                   for _ in range(self.m)))

    def scalar(self, c):
        if not hasattr(c, "field"):
            c = self.field.scalar(c)
        return self.basis_elem(0, 0, c)

    def one(self):
        return self.scalar(self.field.one)

    def i(self):
        return self.basis_elem(1, 0, self.field.one)

    def j(self):
        return self.basis_elem(0, 1, self.field.one)

    def basis_elem(self, r: int, s: int, coeff=None):
        coeff = self.field.one if coeff is None else coeff
        z = self.field.zero
        rows = [[z] * self.m for _ in range(self.m)]
        rows[r][s] = coeff
        return SymElem(self, tuple(tuple(row) for row in rows))

    def from_coeffs(self, grid):
        return SymElem(self, tuple(tuple(row) for row in grid))

    def from_serialized(self, triples):
        """Rebuild an element from (r, s, coefficient-string) triples."""
        z = self.field.zero
        rows = [[z] * self.m for _ in range(self.m)]
        for r, s, text in triples:
            rows[int(r)][int(s)] = self.field.from_string(text)
        return SymElem(self, tuple(tuple(row) for row in rows))

    # fixed involution data for the three star patterns on the generators
    def case_involution(self, case: int) -> "AlgInvolution":
        if case == 1:
            return AlgInvolution(self.i(), self.j(), -1)
        if case == 2:
            return AlgInvolution(self.i().inv(), self.j().inv(), -1)
        if case == 3:
            return AlgInvolution(self.i(), self.j().inv(), 1)
        raise ConfigError(f"unknown involution case {case}")


class SymElem:
    """Element of a SymbolAlgebra: dense m x m grid of coefficients on i^r j^s."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs):
        self.algebra = algebra
        self.coeffs = coeffs

    def _check(self, other):
        if not isinstance(other, SymElem):
            if isinstance(other, int) or hasattr(other, "field"):
                return self.algebra.scalar(other)
            return NotImplemented
        if other.algebra != self.algebra:
            raise ConfigError("algebra mismatch")
        return other

    def __eq__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return SymElem(self.algebra, tuple(
            tuple(x + y for x, y in zip(r1, r2))
            for r1, r2 in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return SymElem(self.algebra, tuple(tuple(-x for x in row)
                                           for row in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        alg = self.algebra
        m = alg.m
        F = alg.field
        theta_pows = [F.theta(k) for k in range(alg.field.order)]
        z = F.zero
        out = [[z] * m for _ in range(m)]
        a, b = alg.a, alg.b
        for r1 in range(m):
            row1 = self.coeffs[r1]
            for s1 in range(m):
                c1 = row1[s1]
                if c1.is_zero():
                    continue
                for r2 in range(m):
                    row2 = other.coeffs[r2]
                    phase = theta_pows[(s1 * r2) % alg.field.order]
                    for s2 in range(m):
                        c2 = row2[s2]
                        if c2.is_zero():
                            continue
                        c = c1 * c2 * phase
                        ri, si = r1 + r2, s1 + s2
                        if ri >= m:
                            ri -= m
                            c = c * a
                        if si >= m:
                            si -= m
                            c = c * b
                        out[ri][si] = out[ri][si] + c
        return SymElem(alg, tuple(tuple(row) for row in out))

    def __rmul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        result = self.algebra.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c):
        """Multiply by a central scalar (RatFunc or int)."""
        if not hasattr(c, "field"):
            c = self.algebra.field.scalar(c)
        return SymElem(self.algebra, tuple(tuple(x * c for x in row)
                                           for row in self.coeffs))

    def is_zero(self):
        return all(x.is_zero() for row in self.coeffs for x in row)

    def is_one(self):
        return self == self.algebra.one()

    # -- representations ------------------------------------------------------

    def j_coefficients(self):
        """Left F(i)-coefficients on the basis 1, j, ..., j^(m-1)."""
        m = self.algebra.m
        return [tuple(self.coeffs[r][s] for r in range(m)) for s in range(m)]

    def regular_rep(self):
        """Right-multiplication matrix on column vectors over F(i).

        Entry (s, t) is the j^s-coefficient of j^t * u, so rep(j) has 1s on
        the subdiagonal and b in the top-right corner, and the orientation is
        rep(u v) = rep(v) rep(u).
        """
        alg = self.algebra
        m = alg.m
        cols = []
        for t in range(m):
            jt = alg.basis_elem(0, t)
            prod = jt * self
            cols.append(prod.j_coefficients())
        return [[cols[t][s] for t in range(m)] for s in range(m)]

    def rep_hom(self):
        """Transpose of regular_rep; a genuine multiplicative homomorphism."""
        return mat_transpose(self.regular_rep())

    def inv(self):
        """Two-sided inverse, computed through the regular representation.

        Fraction-free: the rep matrix is cleared to polynomial coordinates,
        the Cramer solution is assembled with cofactor determinants over
        K[a,b][i]/(i^m - a), and the one genuine division happens at the end
        through the Galois norm of the determinant (a plain polynomial).
        """
        from .fields import (poly_divexact, poly_lcm, poly_mul, poly_scale,
                             poly_add)
        alg = self.algebra
        K = alg.field.coeff_field
        m = alg.m
        M = self.regular_rep()
        one_poly = {(0, 0): K.one}
        den = one_poly
        for row in M:
            for entry in row:
                for coord in entry:
                    den = poly_lcm(K, den, coord.den)
        N = []
        for row in M:
            out_row = []
            for entry in row:
                coords = []
                for coord in entry:
                    scale = poly_divexact(K, den, coord.den)
                    coords.append(poly_mul(K, coord.num, scale))
                out_row.append(tuple(coords))
            N.append(tuple(out_row))

        a_poly = {(1, 0): K.one}

        def ext_mul(u, v):
            conv = [dict() for _ in range(2 * m - 1)]
            for xdeg, px in enumerate(u):
                if not px:
                    continue
                for ydeg, py in enumerate(v):
                    if py:
                        conv[xdeg + ydeg] = poly_add(
                            K, conv[xdeg + ydeg], poly_mul(K, px, py))
            out = conv[:m]
            for k in range(m, 2 * m - 1):
                if conv[k]:
                    out[k - m] = poly_add(K, out[k - m],
                                          poly_mul(K, conv[k], a_poly))
            return tuple(out)

        def ext_sub(u, v):
            from .fields import poly_sub
            return tuple(poly_sub(K, pu, pv) for pu, pv in zip(u, v))

        zero_ext = tuple({} for _ in range(m))

        def det(rows, cols):
            if len(cols) == 1:
                return N[rows[0]][cols[0]]
            acc = zero_ext
            for pos, r in enumerate(rows):
                lead = N[r][cols[0]]
                if all(not p for p in lead):
                    continue
                minor = det(rows[:pos] + rows[pos + 1:], cols[1:])
                term = ext_mul(lead, minor)
                if pos % 2 == 0:
                    acc = tuple(poly_add(K, a, t) for a, t in zip(acc, term))
                else:
                    acc = ext_sub(acc, term)
            return acc

        all_rows = tuple(range(m))
        D = det(all_rows, tuple(range(m)))
        if all(not p for p in D):
            raise NotInvertibleError("element is not invertible")
        # Galois cofactor product: G = prod_{k>=1} sigma^k(D), sigma(i) = theta i
        G = tuple(({(0, 0): K.one} if k == 0 else {}) for k in range(m))
        for k in range(1, m):
            twisted = tuple(poly_scale(K, p, K.theta_power(k * idx))
                            for idx, p in enumerate(D))
            G = ext_mul(G, twisted)
        norm = ext_mul(D, G)
        if any(norm[k] for k in range(1, m)):
            raise InternalConsistencyError("determinant norm is not scalar")
        norm_poly = norm[0]
        F = alg.field
        rows_out = [[F.zero] * m for _ in range(m)]
        sign = 1
        for t in range(m):
            # Cramer: column t of the solution of (N/den) x = e_0
            minor_rows = tuple(r for r in range(m) if r != 0)
            minor_cols = tuple(c for c in range(m) if c != t)
            if m == 1:
                cof = (one_poly,)
            else:
                cof = det(minor_rows, minor_cols)
            sgn_t = 1 if t % 2 == 0 else -1
            num_ext = ext_mul(cof, G)
            for ridx in range(m):
                p = num_ext[ridx]
                if not p:
                    continue
                num = poly_mul(K, p, den)
                if sgn_t < 0:
                    from .fields import poly_neg
                    num = poly_neg(K, num)
                rows_out[ridx][t] = RatFunc(F, num, dict(norm_poly))
        w = SymElem(alg, tuple(tuple(row) for row in rows_out))
        if not (w * self).is_one() or not (self * w).is_one():
            raise InternalConsistencyError("inverse verification failed")
        return w

    def quat_split_rep(self):
        """2x2 split image over F(i) for quaternion algebras (degree 2 only).

        i maps to diag(i, -i) and j to [[0, b], [1, 0]]; the map is a unital
        homomorphism.
        """
        alg = self.algebra
        if alg.m != 2:
            raise ConfigError("split representation requires degree 2")
        ext = alg.ext
        t = ext.gen()
        i_img = [[t, ext.zero], [ext.zero, ext.neg(t)]]
        j_img = [[ext.zero, ext.scalar(alg.b)], [ext.one, ext.zero]]
        pows_i = [mat_identity(ext, 2), i_img]
        pows_j = [mat_identity(ext, 2), j_img]
        out = [[ext.zero, ext.zero], [ext.zero, ext.zero]]
        for r in range(2):
            for s in range(2):
                c = self.coeffs[r][s]
                if c.is_zero():
                    continue
                term = mat_mul(ext, pows_i[r], pows_j[s])
                for rr in range(2):
                    for cc in range(2):
                        out[rr][cc] = ext.add(
                            out[rr][cc],
                            tuple(c * comp for comp in term[rr][cc]))
        return out

    def serialize(self):
        out = []
        for r in range(self.algebra.m):
            for s in range(self.algebra.m):
                c = self.coeffs[r][s]
                if not c.is_zero():
                    out.append((r, s, str(c)))
        return out

    def __str__(self):
        parts = []
        for r, s, text in self.serialize():
            mono = ("" if r == 0 else ("i" if r == 1 else f"i^{r}")) + \
                   ("" if s == 0 else ("j" if s == 1 else f"j^{s}"))
            parts.append(f"({text})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"SymElem({self})"


class AlgInvolution:
    """An anti-automorphism of order 2, given by generator images and the
    theta action (exponent +1 or -1 on the root of unity).

    The action on the center is forced by the images: a maps to (i*)^m and
    b to (j*)^m, both of which must be central scalars.  A prime-field-linear
    involution therefore need not fix a and b (the inversion-type patterns
    send them to their inverses).
    """

    def __init__(self, image_i: SymElem, image_j: SymElem, theta_action: int):
        if theta_action not in (1, -1):
            raise InvalidInvolutionError("theta action must be +1 or -1")
        self.algebra = image_i.algebra
        self.image_i = image_i
        self.image_j = image_j
        self.theta_action = theta_action
        alg = self.algebra
        m = alg.m
        self._pows_i = [alg.one()]
        self._pows_j = [alg.one()]
        for _ in range(m - 1):
            self._pows_i.append(self._pows_i[-1] * image_i)
            self._pows_j.append(self._pows_j[-1] * image_j)
        a_img = self._pows_i[m - 1] * image_i
        b_img = self._pows_j[m - 1] * image_j
        self._a_image = self._central_scalar(a_img, "i")
        self._b_image = self._central_scalar(b_img, "j")
        self._validate()

    def _central_scalar(self, elem: SymElem, gen: str):
        c = elem.coeffs[0][0]
        probe = elem - self.algebra.scalar(c)
        if not probe.is_zero() or c.is_zero():
            raise InvalidInvolutionError(
                f"the m-th power of the {gen} image is not a central unit")
        return c

    def coeff_star(self, c):
        """Action on the center: theta -> theta^e, then a, b -> their images."""
        c = c.conjugate_theta(self.theta_action)
        names = self.algebra.field.variables
        return c.substitute({names[0]: self._a_image, names[1]: self._b_image})

    def _validate(self):
        alg = self.algebra
        try:
            for probe in (alg.a, alg.b, alg.theta):
                if self.coeff_star(self.coeff_star(probe)) != probe:
                    raise InvalidInvolutionError("center action is not of order 2")
        except FieldError as exc:
            raise InvalidInvolutionError(str(exc)) from None
        if self.apply(self.image_i) != alg.i() or self.apply(self.image_j) != alg.j():
            raise InvalidInvolutionError("involution is not of order 2 on generators")
        lhs = self.image_i * self.image_j
        theta_c = self.coeff_star(alg.theta)
        rhs = (self.image_j * self.image_i).scale(theta_c)
        if lhs != rhs:
            raise InvalidInvolutionError("generator images break j i = theta i j")

    def apply(self, u: SymElem) -> SymElem:
        """Image of u: coefficients through coeff_star, monomials reversed."""
        alg = self.algebra
        if u.algebra != alg:
            raise ConfigError("algebra mismatch")
        out = alg.zero()
        for r in range(alg.m):
            for s in range(alg.m):
                c = u.coeffs[r][s]
                if c.is_zero():
                    continue
                out = out + (self._pows_j[s] * self._pows_i[r]).scale(self.coeff_star(c))
        return out
