"""Exact coefficient arithmetic.

Three layers, bottom up:

* prime fields Q and F_p (raw values: ``Fraction`` for characteristic 0,
  ints in ``range(p)`` otherwise);
* cyclotomic extensions P(theta) with theta a primitive q-th root of unity,
  elements stored as coefficient tuples on the power basis 1, theta, ...,
  theta^(d-1) where d = deg of the minimal polynomial;
* multivariate rational functions P(theta)(a, b, ...) as canonical
  numerator/denominator pairs of sparse polynomials.

Everything is immutable and exact; there is no floating point anywhere.
Polynomials are sparse dicts mapping exponent tuples to cyclotomic
coefficient tuples, ordered by graded lex with the leftmost variable most
significant.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd as int_gcd

from .errors import EvaluationError, FieldError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# univariate helpers over the prime field (coefficient lists, constant first)


def _uni_trim(c):
    while c and not c[-1]:
        c.pop()
    return c


def _uni_mul(c1, c2, p):
    if not c1 or not c2:
        return []
    out = [0] * (len(c1) + len(c2) - 1)
    for i, a in enumerate(c1):
        if not a:
            continue
        for j, b in enumerate(c2):
            out[i + j] += a * b
    if p:
        out = [c % p for c in out]
    return _uni_trim(out)


def _uni_sub(c1, c2, p):
    out = list(c1) + [0] * max(0, len(c2) - len(c1))
    for j, b in enumerate(c2):
        out[j] -= b
    if p:
        out = [c % p for c in out]
    return _uni_trim(out)


def _uni_divmod(c1, c2, p):
    """Division with remainder; the divisor's leading coefficient must be a unit."""
    r = list(c1)
    q = [0] * max(0, len(c1) - len(c2) + 1)
    lead = c2[-1]
    inv_lead = pow(lead, p - 2, p) if p else Fraction(1) / lead
    while len(r) >= len(c2):
        coef = r[-1] * inv_lead
        if p:
            coef %= p
        deg = len(r) - len(c2)
        q[deg] = coef
        for j, b in enumerate(c2):
            r[deg + j] -= coef * b
        if p:
            r = [c % p for c in r]
        r.pop()
        _uni_trim(r)
        if not r:
            break
    return _uni_trim(q), r


def _cyclotomic_poly(q: int, p: int):
    """q-th cyclotomic polynomial over the prime field, constant-first coefficients."""
    one = 1 if p else Fraction(1)
    zero = 0 if p else Fraction(0)
    num = [-one] + [zero] * (q - 1) + [one]  # lambda^q - 1
    if p:
        num = [c % p for c in num]
    for d in range(1, q):
        if q % d == 0:
            phi_d = _cyclotomic_poly(d, p)
            num, rem = _uni_divmod(num, phi_d, p)
            if rem:
                raise AssertionError("cyclotomic recursion gave a nonzero remainder")
    return num


def cyclo_min_poly(p: int, q: int):
    """Minimal polynomial of a primitive q-th root of unity over Q or F_p.

    Returns a monic coefficient list (constant term first).  For p = 0 this is
    the q-th cyclotomic polynomial; for p > 0 it is the lexicographically least
    monic irreducible factor of it mod p (coefficient tuples compared constant
    term first), which makes builds reproducible.
    """
    if p < 0 or (p > 0 and not _is_prime(p)):
        raise FieldError(f"characteristic must be 0 or prime, got {p}")
    if q < 1:
        raise FieldError(f"root of unity order must be >= 1, got {q}")
    if p and q % p == 0:
        raise FieldError("root of unity order not coprime to characteristic")
    phi = _cyclotomic_poly(q, p)
    if p == 0:
        return phi
    # order of p in (Z/q)*: the common degree of every irreducible factor mod p
    d, acc = 1, p % q
    while acc != 1:
        acc = acc * p % q
        d += 1
    if d == len(phi) - 1:
        return phi
    for tail in itertools.product(range(p), repeat=d):
        cand = list(tail) + [1]
        _, rem = _uni_divmod(phi, cand, p)
        if not rem:
            # Phi_q is squarefree mod p and all its irreducible factors have
            # degree exactly d, so any monic degree-d divisor is irreducible.
            return cand
    raise AssertionError("no factor of the expected degree found")


class CycloField:
    """The field P(theta), P a prime field and theta a primitive q-th root of unity.

    Elements are tuples of length ``self.degree`` holding prime-field values
    (the coordinates on the basis 1, theta, ..., theta^(degree-1)).
    """

    def __init__(self, characteristic: int = 0, order: int = 1):
        self.characteristic = characteristic
        self.order = order
        self.min_poly = tuple(cyclo_min_poly(characteristic, order))
        self.degree = len(self.min_poly) - 1
        p, d = characteristic, self.degree
        self._zero_scalar = 0 if p else Fraction(0)
        self._one_scalar = 1 if p else Fraction(1)
        self.zero = (self._zero_scalar,) * d
        self.one = (self._one_scalar,) + (self._zero_scalar,) * (d - 1)
        # rows for reducing lambda^(d+k), k = 0..d-2, modulo the minimal polynomial
        row = [-c for c in self.min_poly[:-1]]
        if p:
            row = [c % p for c in row]
        rows = [tuple(row)]
        for _ in range(d - 2):
            shifted = [self._zero_scalar] + list(rows[-1][:-1])
            top = rows[-1][-1]
            if top:
                for i in range(d):
                    shifted[i] += top * rows[0][i]
            if p:
                shifted = [c % p for c in shifted]
            rows.append(tuple(shifted))
        self._red_rows = tuple(rows)
        # theta^k on the power basis, k = 0..q-1
        pows = [self.one]
        for _ in range(order - 1):
            pows.append(self._mul_by_theta(pows[-1]))
        self._theta_pows = tuple(pows)
        if self._theta_pows and order > 1:
            for k in range(1, order):
                if self._theta_pows[k] == self.one:
                    raise FieldError(f"residue has order {k}, expected {order}")

    def __eq__(self, other):
        return (isinstance(other, CycloField)
                and self.characteristic == other.characteristic
                and self.order == other.order)

    def __hash__(self):
        return hash((self.characteristic, self.order))

    def __repr__(self):
        base = "Q" if self.characteristic == 0 else f"F{self.characteristic}"
        return f"CycloField({base}, order={self.order})"

    def _mul_by_theta(self, u):
        d = self.degree
        shifted = [self._zero_scalar] + list(u[:-1])
        top = u[-1]
        if top:
            for i in range(d):
                shifted[i] += top * self._red_rows[0][i]
        if self.characteristic:
            shifted = [c % self.characteristic for c in shifted]
        return tuple(shifted)

    # -- scalar embedding ---------------------------------------------------

    def scalar(self, n):
        """Embed an integer or Fraction as a field element."""
        p, d = self.characteristic, self.degree
        if p:
            if isinstance(n, Fraction):
                if n.denominator % p == 0:
                    raise FieldError(f"denominator of {n} vanishes mod {p}")
                v = n.numerator * pow(n.denominator, p - 2, p) % p
            else:
                v = n % p
        else:
            v = Fraction(n)
        return (v,) + (self._zero_scalar,) * (d - 1)

    def theta_power(self, e: int = 1):
        return self._theta_pows[e % self.order]

    # -- arithmetic ----------------------------------------------------------

    def add(self, u, v):
        p = self.characteristic
        if p:
            return tuple((a + b) % p for a, b in zip(u, v))
        return tuple(a + b for a, b in zip(u, v))

    def sub(self, u, v):
        p = self.characteristic
        if p:
            return tuple((a - b) % p for a, b in zip(u, v))
        return tuple(a - b for a, b in zip(u, v))

    def neg(self, u):
        p = self.characteristic
        if p:
            return tuple(-a % p for a in u)
        return tuple(-a for a in u)

    def mul(self, u, v):
        d = self.degree
        if d == 1:
            x = u[0] * v[0]
            return (x % self.characteristic,) if self.characteristic else (x,)
        conv = [self._zero_scalar] * (2 * d - 1)
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if b:
                    conv[i + j] += a * b
        out = conv[:d]
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                row = self._red_rows[k - d]
                for i in range(d):
                    out[i] += c * row[i]
        if self.characteristic:
            out = [c % self.characteristic for c in out]
        return tuple(out)

    def inv(self, u):
        if not any(u):
            raise ZeroDivisionError("division by zero in cyclotomic field")
        p = self.characteristic
        if self.degree == 1:
            x = u[0]
            return (pow(x, p - 2, p),) if p else (Fraction(1) / x,)
        # extended Euclid in P[lambda] against the minimal polynomial
        f = list(self.min_poly)
        g = _uni_trim(list(u))
        s_f, s_g = [], [self._one_scalar]
        while g:
            q, r = _uni_divmod(f, g, p)
            s_r = _uni_sub(s_f, _uni_mul(q, s_g, p), p)
            f, g = g, r
            s_f, s_g = s_g, s_r
        # now f = gcd (a nonzero constant), s_f * u = f mod min_poly
        c = f[0]
        c_inv = pow(c, p - 2, p) if p else Fraction(1) / c
        out = [x * c_inv for x in s_f]
        if p:
            out = [x % p for x in out]
        out += [self._zero_scalar] * (self.degree - len(out))
        return tuple(out[:self.degree])

    def div(self, u, v):
        return self.mul(u, self.inv(v))

    def is_zero(self, u):
        return not any(u)

    def conjugate(self, u, exponent: int = -1):
        """Apply theta -> theta^exponent coordinate-wise.

        Only valid when theta^exponent is a root of the same minimal
        polynomial (always true in characteristic 0 and for exponent
        +1; checked otherwise).
        """
        e = exponent % self.order
        target = self._theta_pows[e]
        # check f(theta^e) = 0 so the map is a field automorphism
        acc, powv = self.zero, self.one
        for c in self.min_poly:
            if c:
                acc = self.add(acc, tuple(c * x for x in powv) if not self.characteristic
                               else tuple(c * x % self.characteristic for x in powv))
            powv = self.mul(powv, target)
        if not self.is_zero(acc):
            raise FieldError(f"theta -> theta^{exponent} is not an automorphism here")
        out = self.zero
        base = self.one
        for k, c in enumerate(u):
            if c:
                term = self._theta_pows[(e * k) % self.order]
                scaled = tuple(c * x for x in term)
                if self.characteristic:
                    scaled = tuple(x % self.characteristic for x in scaled)
                out = self.add(out, scaled)
        return out

    def pretty(self, u) -> str:
        if self.is_zero(u):
            return "0"
        parts = []
        for k, c in enumerate(u):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                var = "theta" if k == 1 else f"theta^{k}"
                if c == 1:
                    parts.append(var)
                else:
                    coeff = str(c) if "/" not in str(c) else f"({c})"
                    parts.append(f"{coeff}*{var}")
        return " + ".join(parts)


@lru_cache(maxsize=None)
def cyclotomic_field(characteristic: int, order: int) -> CycloField:
    return CycloField(characteristic, order)


# ---------------------------------------------------------------------------
# sparse multivariate polynomials: dict {exponent tuple: cyclo tuple}


def glex_key(exps):
    return (sum(exps), exps)


def poly_zero():
    return {}


def poly_const(field, c, nvars: int):
    return {} if field.is_zero(c) else {(0,) * nvars: c}


def poly_add(field, f, g):
    out = dict(f)
    for m, c in g.items():
        if m in out:
            s = field.add(out[m], c)
            if field.is_zero(s):
                del out[m]
            else:
                out[m] = s
        else:
            out[m] = c
    return out


def poly_sub(field, f, g):
    return poly_add(field, f, poly_neg(field, g))


def poly_neg(field, f):
    return {m: field.neg(c) for m, c in f.items()}


def poly_mul(field, f, g):
    if not f or not g:
        return {}
    if len(g) > len(f):
        f, g = g, f
    out = {}
    for m2, c2 in g.items():
        for m1, c1 in f.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            c = field.mul(c1, c2)
            if m in out:
                s = field.add(out[m], c)
                if field.is_zero(s):
                    del out[m]
                else:
                    out[m] = s
            elif not field.is_zero(c):
                out[m] = c
    return out


def poly_scale(field, f, c):
    if field.is_zero(c):
        return {}
    return {m: field.mul(v, c) for m, v in f.items()}


def poly_pow(field, f, e: int):
    if e < 0:
        raise ValueError("negative polynomial power")
    if not f:
        if e == 0:
            raise ValueError("0^0 with unknown arity")
        return {}
    nvars = len(next(iter(f)))
    base = f
    result = {(0,) * nvars: field.one}
    while e:
        if e & 1:
            result = poly_mul(field, result, base)
        e >>= 1
        if e:
            base = poly_mul(field, base, base)
    return result


def poly_lead(f):
    """Leading (monomial, coefficient) under graded lex."""
    m = max(f, key=glex_key)
    return m, f[m]


def poly_monic(field, f):
    if not f:
        return f
    _, lc = poly_lead(f)
    return poly_scale(field, f, field.inv(lc))


def poly_divexact(field, f, g):
    """Exact division f / g; raises ArithmeticError if g does not divide f."""
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if not f:
        return {}
    gm, gc = poly_lead(g)
    gc_inv = field.inv(gc)
    rem = dict(f)
    out = {}
    while rem:
        fm, fc = poly_lead(rem)
        qm = tuple(a - b for a, b in zip(fm, gm))
        if any(e < 0 for e in qm):
            raise ArithmeticError("inexact polynomial division")
        qc = field.mul(fc, gc_inv)
        out[qm] = qc
        for m2, c2 in g.items():
            m = tuple(a + b for a, b in zip(qm, m2))
            c = field.mul(qc, c2)
            cur = rem.get(m)
            if cur is None:
                rem[m] = field.neg(c)
            else:
                s = field.sub(cur, c)
                if field.is_zero(s):
                    del rem[m]
                else:
                    rem[m] = s
    return out


def _split_main(f):
    """View f as univariate in variable 0: {degree: poly in the remaining vars}."""
    out = {}
    for m, c in f.items():
        out.setdefault(m[0], {})[m[1:]] = c
    return out


def _join_main(ud):
    out = {}
    for d, coeff in ud.items():
        for m, c in coeff.items():
            out[(d,) + m] = c
    return out


def _uni_view_lead(u):
    d = max(u)
    return d, u[d]


def poly_gcd(field, f, g):
    """Monic gcd in P(theta)[x1..xn] via the primitive PRS.

    Contents with respect to the leading variable are removed (and leading
    coefficients renormalized) at every step, which keeps intermediate
    coefficient growth tame at the scale this toolkit works at; genuinely
    univariate inputs take a monic Euclidean fast path.
    """
    if not f:
        return poly_monic(field, g)
    if not g:
        return poly_monic(field, f)
    nvars = len(next(iter(f)))
    if nvars == 0:
        return {(): field.one}
    zero_m = (0,) * nvars
    if (len(f) == 1 and zero_m in f) or (len(g) == 1 and zero_m in g):
        return {zero_m: field.one}
    only_var = _single_variable_of(f, g, nvars)
    if only_var is not None:
        return _gcd_univariate(field, f, g, only_var, nvars)
    fu = _split_main(f)
    gu = _split_main(g)
    if max(fu) == 0 and max(gu) == 0:
        inner = poly_gcd(field, fu[0], gu[0])
        return {(0,) + m: c for m, c in inner.items()}
    cf = _content(field, fu)
    cg = _content(field, gu)
    c = poly_gcd(field, cf, cg)
    fp = {d: poly_divexact(field, coeff, cf) for d, coeff in fu.items()}
    gp = {d: poly_divexact(field, coeff, cg) for d, coeff in gu.items()}
    if max(fu) < max(gu):
        fp, gp = gp, fp
    while True:
        r = _pseudo_rem(field, fp, gp)
        if not r:
            break
        cr = _content(field, r)
        r = {d: poly_divexact(field, coeff, cr) for d, coeff in r.items()}
        # renormalize the whole remainder by its top cyclotomic coefficient
        # to keep rational coefficients from ballooning along the sequence
        _, top = poly_lead(r[max(r)])
        scale = field.inv(top)
        r = {d: poly_scale(field, coeff, scale) for d, coeff in r.items()}
        fp, gp = gp, r
        if max(gp) == 0:
            break
    if max(gp) == 0:
        # coprime primitive parts
        result = {(0,) + m: v for m, v in c.items()}
        return poly_monic(field, result)
    cg2 = _content(field, gp)
    pp = {d: poly_divexact(field, coeff, cg2) for d, coeff in gp.items()}
    result = poly_mul(field, _join_main(pp), {(0,) + m: v for m, v in c.items()})
    return poly_monic(field, result)


def _single_variable_of(f, g, nvars):
    """The unique variable index both polynomials live in, or None."""
    used = set()
    for poly in (f, g):
        for m in poly:
            for idx, e in enumerate(m):
                if e:
                    used.add(idx)
                    if len(used) > 1:
                        return None
    return next(iter(used)) if used else None


def _gcd_univariate(field, f, g, var, nvars):
    """Monic Euclid for inputs supported on a single variable."""
    def to_list(poly):
        deg = max(m[var] for m in poly)
        out = [field.zero] * (deg + 1)
        for m, c in poly.items():
            out[m[var]] = c
        return out

    a, b = to_list(f), to_list(g)
    while b and field.is_zero(b[-1]):
        b.pop()
    while b:
        inv_lead = field.inv(b[-1])
        b = [field.mul(c, inv_lead) for c in b]
        # remainder of a by the monic b
        r = list(a)
        while len(r) >= len(b):
            coef = r[-1]
            if not field.is_zero(coef):
                shift = len(r) - len(b)
                for k in range(len(b) - 1):
                    r[shift + k] = field.sub(r[shift + k],
                                             field.mul(coef, b[k]))
            r.pop()
            while r and field.is_zero(r[-1]):
                r.pop()
        a, b = b, r
    inv_lead = field.inv(a[-1])
    out = {}
    for deg, c in enumerate(a):
        if not field.is_zero(c):
            m = tuple(deg if idx == var else 0 for idx in range(nvars))
            out[m] = field.mul(c, inv_lead)
    return out


def _content(field, u):
    acc = {}
    # iterate in a deterministic order for reproducibility
    for d in sorted(u):
        acc = poly_gcd(field, acc, u[d])
        if len(acc) == 1:
            m, cval = next(iter(acc.items()))
            if all(e == 0 for e in m):
                return acc
    return acc


def _pseudo_rem(field, a, b):
    """Pseudo-remainder of a by b as univariate views (coefficients are polys)."""
    db, lb = _uni_view_lead(b)
    r = dict(a)
    while r:
        dr, lr = _uni_view_lead(r)
        if dr < db:
            break
        shift = dr - db
        new = {}
        for d, coeff in r.items():
            new[d] = poly_mul(field, lb, coeff)
        for d, coeff in b.items():
            prod = poly_mul(field, lr, coeff)
            tgt = d + shift
            cur = new.get(tgt)
            if cur is None:
                new[tgt] = poly_neg(field, prod)
            else:
                s = poly_sub(field, cur, prod)
                if s:
                    new[tgt] = s
                else:
                    del new[tgt]
        r = {d: c for d, c in new.items() if c}
    return r


def poly_lcm(field, f, g):
    if not f or not g:
        return {}
    return poly_divexact(field, poly_mul(field, f, g), poly_gcd(field, f, g))


def poly_substitute(field, f, values):
    """Evaluate f at ``values`` (a list of per-variable substitutes, themselves
    polynomial dicts over the same field, or None to keep the variable)."""
    nvars = len(next(iter(f))) if f else len(values)
    out = {}
    cache = [dict() for _ in values]
    for m, c in f.items():
        term = {(0,) * nvars: c}
        for i, e in enumerate(m):
            if not e:
                continue
            if values[i] is None:
                factor = {tuple(e if j == i else 0 for j in range(nvars)): field.one}
            else:
                if e not in cache[i]:
                    cache[i][e] = poly_pow(field, values[i], e)
                factor = cache[i][e]
            term = poly_mul(field, term, factor)
        out = poly_add(field, out, term)
    return out


def poly_str(field, f, variables) -> str:
    if not f:
        return "0"
    parts = []
    for m in sorted(f, key=glex_key, reverse=True):
        c = f[m]
        factors = []
        cs = field.pretty(c)
        is_plain_one = cs == "1"
        body = [f"{v}^{e}" if e > 1 else v for v, e in zip(variables, m) if e]
        if not body:
            factors.append(f"({cs})" if _needs_parens(cs) else cs)
        else:
            if not is_plain_one:
                factors.append(f"({cs})" if _needs_parens(cs) else cs)
            factors.extend(body)
        parts.append("*".join(factors))
    return " + ".join(parts)


def _needs_parens(s: str) -> bool:
    return "+" in s or "/" in s or "*" in s or (s.startswith("-"))


# ---------------------------------------------------------------------------
# rational functions


class FunctionField:
    """P(theta)(x1, ..., xn): the field of fractions of P(theta)[x1..xn]."""

    def __init__(self, characteristic: int = 0, order: int = 1,
                 variables=("a", "b")):
        self.coeff_field = cyclotomic_field(characteristic, order)
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise FieldError("duplicate variable names")
        self.nvars = len(self.variables)
        self._zero_m = (0,) * self.nvars
        self.zero = RatFunc(self, {}, {self._zero_m: self.coeff_field.one}, _canonical=True)
        self.one = RatFunc(self, {self._zero_m: self.coeff_field.one},
                           {self._zero_m: self.coeff_field.one}, _canonical=True)

    @property
    def characteristic(self):
        return self.coeff_field.characteristic

    @property
    def order(self):
        return self.coeff_field.order

    def __eq__(self, other):
        return (isinstance(other, FunctionField)
                and self.coeff_field == other.coeff_field
                and self.variables == other.variables)

    def __hash__(self):
        return hash((self.coeff_field, self.variables))

    def __repr__(self):
        return f"FunctionField(p={self.characteristic}, q={self.order}, vars={self.variables})"

    def var(self, name: str) -> "RatFunc":
        i = self.variables.index(name)
        m = tuple(1 if j == i else 0 for j in range(self.nvars))
        return RatFunc(self, {m: self.coeff_field.one},
                       {self._zero_m: self.coeff_field.one}, _canonical=True)

    def scalar(self, n) -> "RatFunc":
        c = self.coeff_field.scalar(n)
        if self.coeff_field.is_zero(c):
            return self.zero
        return RatFunc(self, {self._zero_m: c},
                       {self._zero_m: self.coeff_field.one}, _canonical=True)

    def theta(self, e: int = 1) -> "RatFunc":
        c = self.coeff_field.theta_power(e)
        return RatFunc(self, {self._zero_m: c},
                       {self._zero_m: self.coeff_field.one}, _canonical=True)

    def from_cyclo(self, c) -> "RatFunc":
        if self.coeff_field.is_zero(c):
            return self.zero
        return RatFunc(self, {self._zero_m: c},
                       {self._zero_m: self.coeff_field.one}, _canonical=True)

    def from_string(self, text: str) -> "RatFunc":
        from .exprs import parse_expression, eval_scalar
        return eval_scalar(parse_expression(text), self)


class RatFunc:
    """A canonical numerator/denominator pair over a FunctionField.

    Canonical means gcd(num, den) = 1 and den is monic under graded lex,
    so equality of values is equality of representations.
    """

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den, _canonical=False):
        self.field = field
        if _canonical:
            self.num = num
            self.den = den
            return
        K = field.coeff_field
        if not den:
            raise ZeroDivisionError("division by zero")
        if not num:
            self.num = {}
            self.den = {field._zero_m: K.one}
            return
        g = poly_gcd(K, num, den)
        if g != {field._zero_m: K.one}:
            num = poly_divexact(K, num, g)
            den = poly_divexact(K, den, g)
        _, lc = poly_lead(den)
        if not K.is_zero(K.sub(lc, K.one)):
            inv = K.inv(lc)
            num = poly_scale(K, num, inv)
            den = poly_scale(K, den, inv)
        self.num = num
        self.den = den

    # -- ring plumbing --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.field != self.field:
                raise FieldError("mixing elements of different function fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __bool__(self):
        return bool(self.num)

    def is_zero(self):
        return not self.num

    def is_one(self):
        return self == self.field.one

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        K = self.field.coeff_field
        num = poly_add(K, poly_mul(K, self.num, other.den),
                       poly_mul(K, other.num, self.den))
        den = poly_mul(K, self.den, other.den)
        return RatFunc(self.field, num, den)

    __radd__ = __add__

    def __neg__(self):
        K = self.field.coeff_field
        return RatFunc(self.field, poly_neg(K, self.num), self.den, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        K = self.field.coeff_field
        return RatFunc(self.field, poly_mul(K, self.num, other.num),
                       poly_mul(K, self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("division by zero")
        K = self.field.coeff_field
        return RatFunc(self.field, poly_mul(K, self.num, other.den),
                       poly_mul(K, self.den, other.num))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, e: int):
        if e == 0:
            return self.field.one
        if e < 0:
            return (self.field.one / self) ** (-e)
        K = self.field.coeff_field
        return RatFunc(self.field, poly_pow(K, self.num, e), poly_pow(K, self.den, e))

    def inv(self):
        return self.field.one / self

    def conjugate_theta(self, exponent: int = -1) -> "RatFunc":
        """Apply the coefficient automorphism theta -> theta^exponent."""
        K = self.field.coeff_field
        num = {m: K.conjugate(c, exponent) for m, c in self.num.items()}
        den = {m: K.conjugate(c, exponent) for m, c in self.den.items()}
        return RatFunc(self.field, num, den)

    def substitute(self, bindings: dict) -> "RatFunc":
        """Substitute variables by RatFunc values; unbound variables persist."""
        values = []
        for name in self.field.variables:
            values.append(bindings.get(name))
        num_val = self._eval_poly(self.num, values)
        den_val = self._eval_poly(self.den, values)
        if den_val.is_zero():
            raise EvaluationError("evaluation outside localization")
        return num_val / den_val

    def _eval_poly(self, poly, values) -> "RatFunc":
        field = self.field
        out = field.zero
        cache = [dict() for _ in values]
        for m, c in poly.items():
            term = field.from_cyclo(c)
            for i, e in enumerate(m):
                if not e:
                    continue
                v = values[i]
                if v is None:
                    v = field.var(field.variables[i])
                if e not in cache[i]:
                    cache[i][e] = v ** e
                term = term * cache[i][e]
            out = out + term
        return out

    def __str__(self):
        K = self.field.coeff_field
        num_s = poly_str(K, self.num, self.field.variables)
        if self.den == {self.field._zero_m: K.one}:
            return num_s
        den_s = poly_str(K, self.den, self.field.variables)
        return f"({num_s}) / ({den_s})"

    def __repr__(self):
        return f"RatFunc({self})"


def ratfunc_arith(op: str, f: RatFunc, g: RatFunc = None) -> RatFunc:
    """Functional front end over the operator methods (add/mul/div/neg)."""
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    if op == "neg":
        return -f
    raise ValueError(f"unknown operation {op!r}")
