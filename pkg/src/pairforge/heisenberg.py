"""The Heisenberg group algebra, its star patterns, the specialization onto
symbol algebras, and the catalog of symmetric/unitary pair constructions.

Elements of the (Laurent) group algebra are finite sums of monomials
x^a y^b z^c with y x = x y z and z central; the specialization sends
x to i, y to j and z to theta (or, in the power variant, x^(2^n) to i and
z^(2^n) to theta with the quaternion target).  Localized elements that are
not in the group algebra itself are carried as unevaluated expression trees
of products and inverses, and only evaluated in the target algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (ConfigError, NotInvertibleError, SpecializationKernelError,
                     UnsupportedPairError)
from .exprs import parse_expression
from .fields import CycloField, cyclotomic_field
from .symbol import SymbolAlgebra, SymElem

# exponent signs of (x*, y*, z*) for the three star patterns
STAR_PATTERNS = {1: (1, 1, -1), 2: (-1, -1, -1), 3: (1, -1, 1)}


class HLaurent:
    """Element of the Heisenberg Laurent group algebra over a prime field
    (or a cyclotomic extension of one)."""

    __slots__ = ("field", "terms")

    def __init__(self, field: CycloField, terms):
        self.field = field
        self.terms = {m: c for m, c in terms.items() if not field.is_zero(c)}

    @classmethod
    def zero(cls, field):
        return cls(field, {})

    @classmethod
    def monomial(cls, field, ex=0, ey=0, ez=0, coeff=1):
        c = coeff if isinstance(coeff, tuple) else field.scalar(coeff)
        return cls(field, {(ex, ey, ez): c})

    @classmethod
    def one(cls, field):
        return cls.monomial(field)

    def _check(self, other):
        if isinstance(other, int):
            return HLaurent.monomial(self.field, coeff=other)
        if not isinstance(other, HLaurent):
            return NotImplemented
        if other.field != self.field:
            raise ConfigError("base field mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        K = self.field
        for m, c in other.terms.items():
            if m in out:
                s = K.add(out[m], c)
                if K.is_zero(s):
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        return HLaurent(K, out)

    __radd__ = __add__

    def __neg__(self):
        K = self.field
        return HLaurent(K, {m: K.neg(c) for m, c in self.terms.items()})

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
        K = self.field
        out = {}
        for (a, b, c), c1 in self.terms.items():
            for (d, e, f), c2 in other.terms.items():
                m = (a + d, b + e, c + f + b * d)
                v = K.mul(c1, c2)
                if m in out:
                    s = K.add(out[m], v)
                    if K.is_zero(s):
                        del out[m]
                    else:
                        out[m] = s
                elif not K.is_zero(v):
                    out[m] = v
        return HLaurent(K, out)

    def __rmul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __pow__(self, e: int):
        if e < 0:
            if len(self.terms) != 1:
                raise NotInvertibleError(
                    "only monomials invert inside the group algebra")
            ((m, c),) = self.terms.items()
            a, b, cz = m
            K = self.field
            inv_m = (-a, -b, a * b - cz)  # (x^a y^b z^c)^-1 collected
            return HLaurent(K, {inv_m: K.inv(c)}) ** (-e)
        out = HLaurent.one(self.field)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def star(self, case: int) -> "HLaurent":
        """Anti-automorphic image under the given star pattern."""
        if case not in STAR_PATTERNS:
            raise ConfigError(f"unknown star case {case}")
        out = {}
        for (a, b, c), v in self.terms.items():
            if case == 1:
                m = (a, b, a * b - c)
            elif case == 2:
                m = (-a, -b, a * b - c)
            else:
                m = (a, -b, c - a * b)
            out[m] = v
        return HLaurent(self.field, out)

    def substituted_x_power(self, step: int) -> "HLaurent":
        """Replace every x by x^step (and so z-corrections scale too)."""
        if step == 1:
            return self
        out = {}
        for (a, b, c), v in self.terms.items():
            out[(a * step, b, c * step)] = v
        return HLaurent(self.field, out)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            body = " ".join(f"{n}^{e}" if e != 1 else n
                            for n, e in zip(("x", "y", "z"), m) if e)
            cs = self.field.pretty(c)
            if not body:
                parts.append(cs)
            elif cs == "1":
                parts.append(body)
            else:
                parts.append(f"({cs}) {body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"HLaurent({self})"


def hl_mul(f: HLaurent, g: HLaurent) -> HLaurent:
    return f * g


def hl_star(case: int, f: HLaurent) -> HLaurent:
    return f.star(case)


# ---------------------------------------------------------------------------
# specialization


def specialize(f: HLaurent, target: SymbolAlgebra, x_step: int = 1) -> SymElem:
    """Ring homomorphism x -> i, y -> j, z -> theta (monomials map to units).

    With x_step = 2^n > 1 this is the variant sending x^step to i and
    z^step to theta; every monomial must then have x- and z-exponents
    divisible by step.
    """
    K = f.field
    FF = target.field
    if K.characteristic != FF.characteristic:
        raise ConfigError("characteristic mismatch between algebra and coefficients")
    if K.order not in (1, FF.order):
        raise ConfigError("coefficient cyclotomic order does not embed in the target")
    m = target.m
    out = target.zero()
    a, b = target.a, target.b
    for (ex, ey, ez), c in f.terms.items():
        if ex % x_step or ez % x_step:
            raise ConfigError(
                "monomial exponent not divisible by the power-variant step")
        kx, kz = ex // x_step, ez // x_step
        r, s = kx % m, ey % m
        ka, kb = (kx - r) // m, (ey - s) // m
        if K.order == 1:
            coeff = FF.scalar(c[0])
        else:
            coeff = FF.from_cyclo(c)
        coeff = coeff * FF.theta(kz) * a ** ka * b ** kb
        out = out + target.basis_elem(r, s, coeff)
    return out


# ---------------------------------------------------------------------------
# expression trees for localized elements


class LocExpr:
    def __mul__(self, other):
        left = self.factors if isinstance(self, HProduct) else (self,)
        right = other.factors if isinstance(other, HProduct) else (other,)
        return HProduct(left + right)

    def inv(self):
        return HInverse(self)

    def star(self, case: int) -> "LocExpr":
        raise NotImplementedError

    def specialize(self, target: SymbolAlgebra, x_step: int = 1) -> SymElem:
        raise NotImplementedError


class HAtom(LocExpr):
    def __init__(self, value: HLaurent):
        self.value = value

    def star(self, case):
        return HAtom(self.value.star(case))

    def specialize(self, target, x_step=1):
        return specialize(self.value, target, x_step)

    def __repr__(self):
        return f"<{self.value}>"


class HProduct(LocExpr):
    def __init__(self, factors):
        self.factors = tuple(factors)

    def star(self, case):
        return HProduct(tuple(f.star(case) for f in reversed(self.factors)))

    def specialize(self, target, x_step=1):
        out = target.one()
        for f in self.factors:
            out = out * f.specialize(target, x_step)
        return out

    def __repr__(self):
        return " * ".join(f"({f!r})" for f in self.factors)


class HInverse(LocExpr):
    def __init__(self, child: LocExpr):
        self.child = child

    def star(self, case):
        return HInverse(self.child.star(case))

    def specialize(self, target, x_step=1):
        img = self.child.specialize(target, x_step)
        try:
            return img.inv()
        except NotInvertibleError:
            raise SpecializationKernelError(
                "image in specialization kernel") from None

    def __repr__(self):
        return f"({self.child!r})^-1"


def specialize_expr(expr: LocExpr, target: SymbolAlgebra, x_step: int = 1) -> SymElem:
    return expr.specialize(target, x_step)


def expr_star(case: int, expr: LocExpr) -> LocExpr:
    return expr.star(case)


def parse_group_algebra(text: str, field: CycloField) -> LocExpr:
    """Parse an expression like ``1 + x*y^5 - y^-5*x`` or
    ``(1 - r) * (1 + r)^-1`` into a LocExpr; plain group-algebra sums and
    Laurent monomials collapse into a single atom."""
    return _eval_ga(parse_expression(text), field)


def _eval_ga(node, field):
    kind = node[0]
    if kind == "int":
        return HAtom(HLaurent.monomial(field, coeff=node[1]))
    if kind == "var":
        name = node[1]
        gens = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
        if name not in gens:
            raise ConfigError(f"unknown group-algebra symbol {name!r}")
        return HAtom(HLaurent.monomial(field, *gens[name]))
    if kind == "neg":
        inner = _eval_ga(node[1], field)
        if isinstance(inner, HAtom):
            return HAtom(-inner.value)
        raise ConfigError("cannot negate a localized (non-polynomial) expression")
    if kind in ("add", "sub"):
        lhs = _eval_ga(node[1], field)
        rhs = _eval_ga(node[2], field)
        if isinstance(lhs, HAtom) and isinstance(rhs, HAtom):
            val = lhs.value + rhs.value if kind == "add" else lhs.value - rhs.value
            return HAtom(val)
        raise ConfigError("sums must stay inside the group algebra")
    if kind == "mul":
        lhs = _eval_ga(node[1], field)
        rhs = _eval_ga(node[2], field)
        if isinstance(lhs, HAtom) and isinstance(rhs, HAtom):
            return HAtom(lhs.value * rhs.value)
        return lhs * rhs
    if kind == "div":
        lhs = _eval_ga(node[1], field)
        rhs = _eval_ga(node[2], field)
        return lhs * _invert_ga(rhs)
    if kind == "pow":
        base = _eval_ga(node[1], field)
        e = node[2]
        if isinstance(base, HAtom):
            if e >= 0 or len(base.value.terms) == 1:
                return HAtom(base.value ** e)
            out = _invert_ga(base)
            for _ in range(-e - 1):
                out = out * _invert_ga(base)
            return out
        if e < 0:
            out = _invert_ga(base)
            for _ in range(-e - 1):
                out = out * _invert_ga(base)
            return out
        if e == 0:
            return HAtom(HLaurent.one(field))
        out = base
        for _ in range(e - 1):
            out = out * base
        return out
    raise ConfigError(f"unknown AST node {kind!r}")


def _invert_ga(expr: LocExpr) -> LocExpr:
    if isinstance(expr, HAtom) and len(expr.value.terms) == 1:
        return HAtom(expr.value ** -1)
    return HInverse(expr)


# ---------------------------------------------------------------------------
# the pair catalog


@dataclass(frozen=True)
class CaseTag:
    """Which construction a pair comes from: the main theorem's star case,
    or one of the normal-subgroup constructions (with an optional power-of-two
    substitution on x)."""
    main_case: int | None = None
    normal_case: int | None = None
    power_n: int = 0

    def __post_init__(self):
        if (self.main_case is None) == (self.normal_case is None):
            raise ConfigError("exactly one of main_case/normal_case must be set")
        if self.main_case is not None and self.main_case not in (1, 2, 3):
            raise ConfigError(f"unknown main case {self.main_case}")
        if self.normal_case is not None and self.normal_case not in (1, 2, 3):
            raise ConfigError(f"unknown normal case {self.normal_case}")
        if self.power_n < 0:
            raise ConfigError("power_n must be >= 0")
        if self.power_n and self.normal_case is None:
            raise ConfigError("the power variant applies to normal cases only")

    @property
    def star_case(self) -> int:
        if self.main_case is not None:
            return self.main_case
        return {1: 1, 2: 3, 3: 2}[self.normal_case]

    @property
    def x_step(self) -> int:
        return 2 ** self.power_n


def _pf(characteristic: int) -> CycloField:
    return cyclotomic_field(characteristic, 1)


def _gens(field):
    one = HLaurent.one(field)
    x = HLaurent.monomial(field, 1, 0, 0)
    y = HLaurent.monomial(field, 0, 1, 0)
    z = HLaurent.monomial(field, 0, 0, 1)
    return one, x, y, z


def build_pair(kind: str, case: int, characteristic: int = 0):
    """The main-theorem pair for (kind, case); elements as expression trees."""
    field = _pf(characteristic)
    one, x, y, z = _gens(field)
    if kind not in ("symmetric", "unitary"):
        raise ConfigError(f"unknown pair kind {kind!r}")
    if case == 1 and kind == "symmetric":
        return HAtom(one + x), HAtom(one + y)
    if case == 1 and kind == "unitary":
        u = HAtom(one - z * x) * HInverse(HAtom(one - z ** -1 * x))
        v = HAtom(one - z * y) * HInverse(HAtom(one - z ** -1 * y))
        return u, v.inv() * u * v
    if case == 2 and kind == "symmetric":
        # the inversion-type star fixes 1 + x + x^-1; reuse those elements
        return build_normal_pair(3, characteristic=characteristic)
    if case == 2 and kind == "unitary":
        raise UnsupportedPairError("unimplemented: delegated to external reference")
    if case == 3 and kind == "symmetric":
        u = HAtom(one + x)
        r = x * y ** 5 - y ** -5 * x
        v = HAtom(one - r) * HInverse(HAtom(one + r))
        return u, v.inv() * u * v
    if case == 3 and kind == "unitary":
        u_val = x * y ** 5 - y ** -5 * x
        v_val = y - y ** -1
        r = HAtom(one - v_val) * HInverse(HAtom(one + v_val))
        s = HAtom(one - u_val) * HInverse(HAtom(one + u_val))
        return r, s.inv() * r * s
    raise ConfigError(f"unknown case {case}")


def build_normal_pair(case_n: int, power_n: int = 0, characteristic: int = 0):
    """The normal-subgroup pair {s s*, t t*} for construction N1/N2/N3,
    with x replaced by x^(2^power_n) when power_n > 0."""
    field = _pf(characteristic)
    one, x, y, z = _gens(field)
    step = 2 ** power_n
    X = HLaurent.monomial(field, step, 0, 0)
    Xi = X ** -1
    yi = y ** -1
    tag = CaseTag(normal_case=case_n, power_n=power_n)
    star_case = tag.star_case
    if case_n == 1:
        u, v = HAtom(one + X), HAtom(one + y)
        s = u * HAtom(yi) * u.inv() * HAtom(y)
        t = v * HAtom(Xi) * v.inv() * HAtom(X)
    elif case_n == 2:
        u, v = HAtom(one + X), HAtom(one + y + yi)
        s = u * HAtom(y) * u.inv() * HAtom(yi)
        t = v * HAtom(X) * v.inv() * HAtom(Xi)
    elif case_n == 3:
        u, v = HAtom(one + X + Xi), HAtom(one + y + yi)
        s = HAtom(y) * u * HAtom(yi) * u.inv()
        t = HAtom(X) * v * HAtom(Xi) * v.inv()
    else:
        raise ConfigError(f"unknown normal case {case_n}")
    return s * s.star(star_case), t * t.star(star_case)


_MAIN_IDS = {f"main-{c}-{k}" for c in (1, 2, 3) for k in ("symmetric", "unitary")}


def catalog_ids():
    out = sorted(_MAIN_IDS - {"main-2-unitary"})
    out += [f"normal-{c}" for c in (1, 2, 3)]
    out += [f"normal-{c}-pow{n}" for c in (1, 2, 3) for n in (1, 2)]
    return out


def parse_pair_id(pair_id: str) -> CaseTag:
    parts = pair_id.split("-")
    try:
        if parts[0] == "main" and len(parts) == 3:
            case = int(parts[1])
            if parts[2] not in ("symmetric", "unitary"):
                raise ValueError
            return CaseTag(main_case=case)
        if parts[0] == "normal" and len(parts) in (2, 3):
            case = int(parts[1])
            power = 0
            if len(parts) == 3:
                if not parts[2].startswith("pow"):
                    raise ValueError
                power = int(parts[2][3:])
            return CaseTag(normal_case=case, power_n=power)
    except (ValueError, IndexError):
        pass
    raise ConfigError(f"unknown pair id {pair_id!r}")


def build_pair_by_id(pair_id: str, characteristic: int = 0):
    tag = parse_pair_id(pair_id)
    if tag.main_case is not None:
        kind = pair_id.split("-")[2]
        exprs = build_pair(kind, tag.main_case, characteristic)
    else:
        kind = "symmetric"
        exprs = build_normal_pair(tag.normal_case, tag.power_n, characteristic)
    return exprs, tag, kind


def pair_kind(pair_id: str) -> str:
    tag = parse_pair_id(pair_id)
    if tag.main_case is not None:
        return pair_id.split("-")[2]
    return "symmetric"


def expected_image(pair_id: str, target: SymbolAlgebra):
    """The closed-form images, built directly in the symbol algebra (an
    independent route from specializing the expression trees)."""
    F = target.field
    one, i, j = target.one(), target.i(), target.j()
    a, b = F.var(F.variables[0]), F.var(F.variables[1])
    f1 = F.one
    tag = parse_pair_id(pair_id)

    if pair_id == "main-1-symmetric":
        return one + i, one + j
    if pair_id == "main-1-unitary":
        q = target.m
        U = (one - i.scale(F.theta(1))) * (one - i.scale(F.theta(q - 1))).inv()
        V = (one - j.scale(F.theta(1))) * (one - j.scale(F.theta(q - 1))).inv()
        return U, V.inv() * U * V
    if pair_id == "main-3-symmetric":
        if target.m != 2:
            raise ConfigError("main-3 closed forms live in the quaternion algebra")
        R = i * j.scale(b ** 2) - j.scale(b ** -3) * i
        W = (one - R) * (one + R).inv()
        return one + i, W.inv() * (one + i) * W
    if pair_id == "main-3-unitary":
        if target.m != 2:
            raise ConfigError("main-3 closed forms live in the quaternion algebra")
        U = i * j.scale(b ** 2) - j.scale(b ** -3) * i
        V = j.scale(f1 - b ** -1)
        R = (one - V) * (one + V).inv()
        S = (one - U) * (one + U).inv()
        return R, S.inv() * R * S
    if pair_id == "main-2-symmetric" or (tag.normal_case == 3):
        if target.m != 2:
            raise ConfigError("normal-case closed forms live in the quaternion algebra")
        alpha = f1 + a ** -1
        beta = f1 + b ** -1  # the construction forces 1 + b^-1 here
        first = ((one - i.scale(alpha)) ** 4).scale((f1 - alpha ** 2 * a) ** -2)
        second = ((one - j.scale(beta)) ** 4).scale((f1 - beta ** 2 * b) ** -2)
        return first, second
    if tag.normal_case == 1:
        if target.m != 2:
            raise ConfigError("normal-case closed forms live in the quaternion algebra")
        first = ((one + i) ** 4).scale((f1 - a) ** -2)
        second = ((one + j) ** 4).scale((f1 - b) ** -2)
        return first, second
    if tag.normal_case == 2:
        if target.m != 2:
            raise ConfigError("normal-case closed forms live in the quaternion algebra")
        beta = f1 + b ** -1
        first = ((one + i) ** 4).scale((f1 - a) ** -2)
        second = ((one + j.scale(beta)) ** 4).scale((f1 - beta ** 2 * b) ** -2)
        return first, second
    raise ConfigError(f"no closed form shipped for pair id {pair_id!r}")
