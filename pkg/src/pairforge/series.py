"""Truncated Malcev-Neumann series over an ordered nilpotent quotient,
crossed-product coefficients, the coefficient-augmentation homomorphism onto
plain group series, the star formula on the crossed ring, and the symmetric
pullback construction.

The running instance is the free group on x, y with the normal subgroup
generated by weight-3 commutators, so the quotient is the Heisenberg group;
coefficients live in the rational group ring of the normal subgroup, stored
as linear combinations of reduced free words.  Truncation is by an explicit
frontier element: coefficients at group elements below the frontier are
exact, nothing is asserted at or above it (the order is non-Archimedean, so
reachability is checked, never assumed).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError, FrontierError, InternalConsistencyError
from .groups import (FreeWord, GroupElem, GroupInvolution, PcGroup,
                     heisenberg_group, nilpotent_image, parse_word)

INV_CAP = 256  # geometric-series length cap before declaring unreachable


def order_compare(g: GroupElem, h: GroupElem) -> int:
    """-1, 0 or +1: lexicographic on Mal'cev exponents, first coordinate most
    significant; positive elements are greater than the identity."""
    if g.group != h.group:
        raise ConfigError("group mismatch")
    if g.exps == h.exps:
        return 0
    return -1 if g.exps < h.exps else 1


def _lt(e1, e2) -> bool:
    return e1 < e2


def _leq_frontier(e, frontier) -> bool:
    """True when e is inside the exact region bounded by frontier."""
    return frontier is None or e < frontier


# ---------------------------------------------------------------------------
# coefficients: k and k[N]


class GroupRingCoeff:
    """Helpers for k[N] coefficients stored as {FreeWord: Fraction}."""

    @staticmethod
    def from_scalar(c) -> dict:
        c = Fraction(c)
        return {FreeWord(): c} if c else {}

    @staticmethod
    def from_word(w: FreeWord, c=1) -> dict:
        c = Fraction(c)
        return {w: c} if c else {}

    @staticmethod
    def add(c1: dict, c2: dict) -> dict:
        out = dict(c1)
        for w, v in c2.items():
            s = out.get(w, Fraction(0)) + v
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return out

    @staticmethod
    def mul(c1: dict, c2: dict) -> dict:
        out = {}
        for w1, v1 in c1.items():
            for w2, v2 in c2.items():
                w = w1 * w2
                s = out.get(w, Fraction(0)) + v1 * v2
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return out

    @staticmethod
    def neg(c: dict) -> dict:
        return {w: -v for w, v in c.items()}

    @staticmethod
    def conjugate(c: dict, g: FreeWord) -> dict:
        return {w.conjugated_by(g): v for w, v in c.items()}

    @staticmethod
    def star(c: dict, images: dict) -> dict:
        return {w.star(images): v for w, v in c.items()}

    @staticmethod
    def augment(c: dict) -> Fraction:
        return sum(c.values(), Fraction(0))

    @staticmethod
    def trivial_unit(c: dict):
        """(scalar, word) when c = scalar * word, else None."""
        if len(c) != 1:
            return None
        ((w, v),) = c.items()
        return (v, w) if v else None


class CrossedProductCtx:
    """The group ring of a free group presented as a crossed product of its
    nilpotent quotient over the normal-subgroup group ring.

    ``quotient``: the quotient PcGroup; each basis generator needs a
    representative free word (``section_words``), and the Mal'cev section is
    the ordered product of those representatives.  ``star_images`` gives the
    free-group involution on the alphabet.
    """

    def __init__(self, quotient: PcGroup, section_words: dict,
                 star_images: dict | None = None, tau_override=None):
        self.quotient = quotient
        self.section_words = {name: FreeWord.from_string(w) if isinstance(w, str)
                              else w for name, w in section_words.items()}
        for name in quotient.names:
            if name not in self.section_words:
                raise ConfigError(f"no section word for generator {name!r}")
            img = nilpotent_image(self.section_words[name], quotient)
            if img != quotient.gen(name):
                raise ConfigError(
                    f"section word for {name!r} does not project to it")
        self.tau_override = tau_override or {}
        self._tau_cache = {}
        self.star_images = None
        self.quotient_star = None
        if star_images is not None:
            self.star_images = {n: FreeWord.from_string(w) if isinstance(w, str)
                                else w for n, w in star_images.items()}
            q_images = {}
            for idx, name in enumerate(quotient.names):
                word = self.section(quotient.gen(name))
                q_images[idx] = nilpotent_image(
                    word.star(self.star_images), quotient)
            self.quotient_star = GroupInvolution(quotient, q_images)

    # -- the transversal ------------------------------------------------------

    def section(self, alpha: GroupElem) -> FreeWord:
        """The Mal'cev section: ordered product of generator-word powers."""
        out = FreeWord()
        for name, e in zip(self.quotient.names, alpha.exps):
            if e:
                out = out * (self.section_words[name] ** e)
        return out

    def tau(self, alpha: GroupElem, beta: GroupElem) -> FreeWord:
        """Twisting x_alpha x_beta x_{alpha beta}^{-1}, a word in N."""
        key = (alpha.exps, beta.exps)
        if key in self.tau_override:
            return self.tau_override[key]
        cached = self._tau_cache.get(key)
        if cached is not None:
            return cached
        word = self.section(alpha) * self.section(beta) * \
            self.section(alpha * beta).inv()
        if not nilpotent_image(word, self.quotient).is_identity():
            raise InternalConsistencyError("twisting word escaped N")
        self._tau_cache[key] = word
        return word

    def sigma(self, alpha: GroupElem, coeff: dict) -> dict:
        """Action of alpha on k[N]: conjugation by the section word."""
        return GroupRingCoeff.conjugate(coeff, self.section(alpha))

    def word_star(self, w: FreeWord) -> FreeWord:
        if self.star_images is None:
            raise ConfigError("context carries no involution data")
        return w.star(self.star_images)

    def n_alpha(self, alpha: GroupElem) -> FreeWord:
        """The correction x_alpha^* = n_alpha x_{alpha^*}."""
        alpha_star = self.quotient_star.apply(alpha)
        n = self.word_star(self.section(alpha)) * self.section(alpha_star).inv()
        if not nilpotent_image(n, self.quotient).is_identity():
            raise InternalConsistencyError("star correction escaped N")
        return n

    # -- series factories ------------------------------------------------------

    def scalar_series(self, support: dict, frontier=None) -> "TruncSeries":
        sup = {}
        for exps, c in support.items():
            c = Fraction(c)
            if c:
                sup[tuple(exps)] = c
        return TruncSeries(self, "k", sup, _as_exps(frontier))

    def crossed_series(self, support: dict, frontier=None) -> "TruncSeries":
        sup = {}
        for exps, c in support.items():
            if isinstance(c, FreeWord):
                c = GroupRingCoeff.from_word(c)
            elif not isinstance(c, dict):
                c = GroupRingCoeff.from_scalar(c)
            if c:
                sup[tuple(exps)] = c
        return TruncSeries(self, "kN", sup, _as_exps(frontier))

    def embed_scalar_poly(self, support: dict) -> "TruncSeries":
        """A k-combination of transversal elements, as a crossed series."""
        return self.crossed_series(
            {exps: GroupRingCoeff.from_scalar(c) for exps, c in support.items()})

    def one(self, ring="kN") -> "TruncSeries":
        ident = (0,) * self.quotient.rank
        if ring == "k":
            return self.scalar_series({ident: 1})
        return self.crossed_series({ident: GroupRingCoeff.from_scalar(1)})


def _as_exps(frontier):
    if frontier is None:
        return None
    if isinstance(frontier, GroupElem):
        return frontier.exps
    return tuple(frontier)


class TruncSeries:
    """Finitely supported series with an exactness frontier.

    Coefficients at group elements strictly below the frontier equal the
    coefficients of the underlying exact series; nothing is asserted at or
    above it.  ``frontier=None`` means the series is globally exact.
    """

    __slots__ = ("ctx", "ring", "support", "frontier")

    def __init__(self, ctx, ring, support, frontier=None):
        self.ctx = ctx
        self.ring = ring
        self.support = {e: c for e, c in support.items()
                        if _leq_frontier(e, frontier)}
        self.frontier = frontier

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            raise ConfigError("expected a series")
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise ConfigError("context mismatch")
        if other.ring != self.ring:
            raise ConfigError("coefficient ring mismatch")
        return other

    def is_zero(self):
        return not self.support

    def coefficient(self, exps):
        exps = _as_exps(exps)
        if self.ring == "k":
            return self.support.get(exps, Fraction(0))
        return self.support.get(exps, {})

    def min_support(self):
        if not self.support:
            return None
        return min(self.support)

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.support)
        if self.ring == "k":
            for e, c in other.support.items():
                s = out.get(e, Fraction(0)) + c
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        else:
            for e, c in other.support.items():
                s = GroupRingCoeff.add(out.get(e, {}), c)
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return TruncSeries(self.ctx, self.ring, out,
                           _min_frontier(self.frontier, other.frontier))

    def __neg__(self):
        if self.ring == "k":
            sup = {e: -c for e, c in self.support.items()}
        else:
            sup = {e: GroupRingCoeff.neg(c) for e, c in self.support.items()}
        return TruncSeries(self.ctx, self.ring, sup, self.frontier)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        other = self._check(other)
        Q = self.ctx.quotient
        out = {}
        if self.ring == "k":
            for e1, c1 in self.support.items():
                for e2, c2 in other.support.items():
                    e = Q.mul_vec(e1, e2)
                    s = out.get(e, Fraction(0)) + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        out.pop(e, None)
        else:
            for e1, c1 in self.support.items():
                a1 = Q.from_exps(e1)
                for e2, c2 in other.support.items():
                    e = Q.mul_vec(e1, e2)
                    c = GroupRingCoeff.mul(c1, self.ctx.sigma(a1, c2))
                    tau = self.ctx.tau(a1, Q.from_exps(e2))
                    if not tau.is_identity():
                        c = GroupRingCoeff.mul(c, GroupRingCoeff.from_word(tau))
                    s = GroupRingCoeff.add(out.get(e, {}), c)
                    if s:
                        out[e] = s
                    else:
                        out.pop(e, None)
        frontier = self._mul_frontier(other)
        return TruncSeries(self.ctx, self.ring, out, frontier)

    def _mul_frontier(self, other):
        """Exactness bound of a product: each factor's frontier translated by
        the other factor's least support term."""
        Q = self.ctx.quotient
        candidates = []
        for f, g in ((self, other), (other, self)):
            if f.frontier is None:
                continue
            mu = g.min_support()
            if mu is None:
                mu = g.frontier if g.frontier is not None else None
            if mu is None:
                candidates.append(f.frontier)
            else:
                if f is self:
                    candidates.append(Q.mul_vec(f.frontier, mu))
                else:
                    candidates.append(Q.mul_vec(mu, f.frontier))
        if not candidates:
            return None
        return min(candidates)

    def truncate(self, frontier) -> "TruncSeries":
        frontier = _as_exps(frontier)
        new_frontier = _min_frontier(self.frontier, frontier)
        return TruncSeries(self.ctx, self.ring, self.support, new_frontier)

    def inv(self, frontier) -> "TruncSeries":
        """Inverse, exact below ``frontier``; the least coefficient must be
        invertible (a scalar, or a scalar times a single word)."""
        frontier = _as_exps(frontier)
        if frontier is None:
            raise ConfigError("series inversion needs a finite frontier")
        if not self.support:
            raise ZeroDivisionError("cannot invert the zero series")
        Q = self.ctx.quotient
        g0 = self.min_support()
        c0 = self.support[g0]
        ident = (0,) * Q.rank
        g0_inv = Q.inv_vec(g0)
        if self.ring == "k":
            u0_inv = TruncSeries(self.ctx, "k", {g0_inv: Fraction(1) / c0}, None)
        else:
            unit = GroupRingCoeff.trivial_unit(c0)
            if unit is None:
                raise ConfigError(
                    "leading coefficient is not a trivial unit of k[N]")
            v, w = unit
            alpha0 = Q.from_exps(g0)
            alpha0_inv = Q.from_exps(g0_inv)
            tau = self.ctx.tau(alpha0, alpha0_inv)
            d_word = (tau * w).inv().conjugated_by(self.ctx.section(alpha0).inv())
            u0_inv = TruncSeries(self.ctx, "kN",
                                 {g0_inv: GroupRingCoeff.from_word(d_word,
                                                                   1 / v)}, None)
        # frontier for the geometric part: translate the request by g0
        front_geo = Q.mul_vec(frontier, g0)
        eps = (u0_inv * self).truncate(front_geo) - self.ctx.one(self.ring)
        if eps.support and min(eps.support) <= ident:
            raise InternalConsistencyError("normalized series has bad support")
        if eps.frontier is not None and not _lt(ident, eps.frontier):
            raise FrontierError("frontier unreachable")
        acc = self.ctx.one(self.ring)
        if not eps.is_zero():
            m_eps = eps.min_support()
            # find K with m_eps^(K+1) at or above the frontier
            power = m_eps
            K = 0
            while _lt(power, front_geo):
                K += 1
                power = Q.mul_vec(power, m_eps)
                if K > INV_CAP:
                    raise FrontierError("frontier unreachable")
            term = self.ctx.one(self.ring)
            for _ in range(K):
                term = (-(term * eps)).truncate(front_geo)
                if term.is_zero():
                    break
                acc = acc + term
        result = (acc * u0_inv).truncate(frontier)
        if result.frontier is not None and _lt(result.frontier, frontier):
            raise FrontierError("frontier unreachable")
        result.frontier = frontier
        checked = (self * result).truncate(frontier)
        ident_coeff = checked.coefficient(ident)
        ok_one = (ident_coeff == 1) if self.ring == "k" else (
            GroupRingCoeff.trivial_unit(ident_coeff) == (Fraction(1), FreeWord()))
        rest = {e for e in checked.support if e != ident}
        if not ok_one or rest:
            raise InternalConsistencyError("series inverse failed verification")
        return result

    def augment(self) -> "TruncSeries":
        """Coefficient-wise augmentation k[N] -> k; frontier preserved."""
        if self.ring == "k":
            return self
        sup = {}
        for e, c in self.support.items():
            v = GroupRingCoeff.augment(c)
            if v:
                sup[e] = v
        return TruncSeries(self.ctx, "k", sup, self.frontier)

    def _star_support(self) -> dict:
        """The transformed support of the known part.  Each term
        f_alpha alpha-bar maps to sum_w c_w n_alpha (w*)^{sigma(alpha*)}
        (alpha*)-bar; scalar series just send alpha to alpha*."""
        ctx = self.ctx
        if ctx.quotient_star is None:
            raise ConfigError("context carries no involution data")
        Q = ctx.quotient
        out = {}
        if self.ring == "k":
            for e, c in self.support.items():
                estar = ctx.quotient_star.apply(Q.from_exps(e)).exps
                s = out.get(estar, Fraction(0)) + c
                if s:
                    out[estar] = s
                else:
                    out.pop(estar, None)
            return out
        for e, c in self.support.items():
            alpha = Q.from_exps(e)
            alpha_star = ctx.quotient_star.apply(alpha)
            estar = alpha_star.exps
            n_a = ctx.n_alpha(alpha)
            x_astar = ctx.section(alpha_star)
            coeff = {}
            for w, v in c.items():
                word = n_a * ctx.word_star(w).conjugated_by(x_astar)
                coeff = GroupRingCoeff.add(coeff, GroupRingCoeff.from_word(word, v))
            if coeff:
                merged = GroupRingCoeff.add(out.get(estar, {}), coeff)
                if merged:
                    out[estar] = merged
                else:
                    out.pop(estar, None)
        return out

    def star(self) -> "TruncSeries":
        """The induced involution; the input must be exact (no frontier),
        because an involution need not map an order interval to one.  For
        star-invariance checks of truncated series use
        ``check_star_invariance``."""
        if self.frontier is not None:
            raise ConfigError(
                "star of a truncated series is only defined on its support; "
                "use check_star_invariance for frontier-limited comparisons")
        return TruncSeries(self.ctx, self.ring, self._star_support(), None)

    def eq_below(self, other, frontier) -> bool:
        other = self._check(other)
        frontier = _as_exps(frontier)
        keys = set(self.support) | set(other.support)
        for e in keys:
            if frontier is not None and not _lt(e, frontier):
                continue
            if self.coefficient(e) != other.coefficient(e):
                return False
        return True

    def __str__(self):
        Q = self.ctx.quotient
        if not self.support:
            body = "0"
        else:
            parts = []
            for e in sorted(self.support):
                g = str(Q.from_exps(e))
                c = self.support[e]
                cs = str(c) if self.ring == "k" else \
                    " + ".join(f"{v}*[{w}]" for w, v in sorted(
                        c.items(), key=lambda kv: str(kv[0])))
                parts.append(f"({cs})*<{g}>")
            body = " + ".join(parts)
        tail = "" if self.frontier is None else \
            f"  [exact below {Q.from_exps(self.frontier)}]"
        return body + tail

    __repr__ = __str__


def _min_frontier(f1, f2):
    if f1 is None:
        return f2
    if f2 is None:
        return f1
    return min(f1, f2)


def check_star_invariance(series: TruncSeries, frontier=None) -> bool:
    """Whether the series equals its own star image on the doubly safe
    region: group elements gamma with both gamma and gamma* below the
    frontier (the star image of a coefficient at gamma sits at gamma*, so
    only there are both sides exact)."""
    ctx = series.ctx
    if ctx.quotient_star is None:
        raise ConfigError("context carries no involution data")
    frontier = _as_exps(frontier)
    if frontier is None:
        frontier = series.frontier
    Q = ctx.quotient
    image = series._star_support()
    keys = set(series.support) | set(image)
    zero = Fraction(0) if series.ring == "k" else {}
    for e in keys:
        estar = ctx.quotient_star.apply(Q.from_exps(e)).exps
        if frontier is not None and not (_lt(e, frontier) and _lt(estar, frontier)):
            continue
        if image.get(e, zero) != series.support.get(e, zero):
            return False
    return True


def phi_N(series: TruncSeries) -> TruncSeries:
    """The coefficient-augmentation algebra map onto plain group series."""
    return series.augment()


def star_on_crossed(ctx: CrossedProductCtx, series: TruncSeries) -> TruncSeries:
    if series.ctx is not ctx and series.ctx != ctx:
        raise ConfigError("context mismatch")
    return series.star()


def series_mul(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    return f * g


def series_inv(f: TruncSeries, frontier) -> TruncSeries:
    return f.inv(frontier)


def crossed_tau(ctx: CrossedProductCtx, alpha, beta) -> FreeWord:
    Q = ctx.quotient
    if not isinstance(alpha, GroupElem):
        alpha = Q.from_exps(alpha)
    if not isinstance(beta, GroupElem):
        beta = Q.from_exps(beta)
    return ctx.tau(alpha, beta)


# ---------------------------------------------------------------------------
# the pullback


def pullback_X(ctx: CrossedProductCtx, p_support: dict, q_support: dict,
               frontier) -> TruncSeries:
    """X = P Q^{-1} (Q*)^{-1} P* in the crossed series ring, exact below the
    frontier.  P, Q are scalar-coefficient combinations of transversal
    elements (supports over the quotient group)."""
    frontier = _as_exps(frontier)
    P = ctx.embed_scalar_poly(p_support)
    Qs = ctx.embed_scalar_poly(q_support)
    if P.is_zero() or Qs.is_zero():
        raise ConfigError("pullback needs nonzero polynomials")
    Q_inv = Qs.inv(frontier)
    Q_star_inv = Qs.star().inv(frontier)
    P_star = P.star()
    X = (((P * Q_inv) * Q_star_inv) * P_star).truncate(frontier)
    return X


def scalar_square_series(ctx: CrossedProductCtx, p_support: dict,
                         q_support: dict, frontier) -> TruncSeries:
    """The series of A A* = p q^{-1} (q*)^{-1} p* computed entirely inside
    the scalar group-series ring (the independent side of the pullback
    check)."""
    frontier = _as_exps(frontier)
    p = ctx.scalar_series(p_support)
    q = ctx.scalar_series(q_support)
    q_inv = q.inv(frontier)
    q_star_inv = q.star().inv(frontier)
    p_star = p.star()
    return (((p * q_inv) * q_star_inv) * p_star).truncate(frontier)


def heisenberg_f2_context(star_images=None, tau_override=None) -> CrossedProductCtx:
    """The stock context: F_2 over its weight-3 normal subgroup, quotient the
    Heisenberg group with section words x, y and the commutator word for z."""
    Q = heisenberg_group()
    sections = {"x": "x", "y": "y", "z": "y^-1 x^-1 y x"}
    return CrossedProductCtx(Q, sections, star_images=star_images,
                             tau_override=tau_override)
