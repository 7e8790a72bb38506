"""Finitely generated torsion-free nilpotent groups in Mal'cev coordinates.

A group is described by an ordered basis g_1, ..., g_r, a commutator table
giving [g_s, g_t] for s > t as a normal-form word in generators of index
greater than s, and markers locating the upper central series as coordinate
suffixes.  Elements are exponent vectors (unique normal forms
g_1^{e_1} ... g_r^{e_r}); multiplication is collection from the left,
supported through nilpotency class 3.

Also here: involutions on such groups, the integer eigenlattice machinery
(Hermite normal form of I +- A), the extraction of a star-invariant
Heisenberg subgroup, and reduced words in free groups for the series layer.
"""

from __future__ import annotations

import itertools
import json
import random
import re
from dataclasses import dataclass
from math import gcd as int_gcd

from .errors import (AbelianGroupError, ConfigError, InternalConsistencyError,
                     InvalidInvolutionError, UnsupportedClassError)

MAX_SUPPORTED_CLASS = 3


class PcGroup:
    """Torsion-free nilpotent group on a polycyclic (Mal'cev) basis."""

    def __init__(self, names, commutators, ucs):
        """``names``: generator names in basis order.
        ``commutators``: {(s, t): exponent vector of [g_s, g_t]} for s > t;
        missing pairs commute.  Entries must be supported on indices > s.
        ``ucs``: start indices of the upper-central-series suffixes,
        strictly decreasing, ending at 0 (length = nilpotency class).
        """
        self.names = tuple(names)
        self.rank = len(self.names)
        if len(set(self.names)) != self.rank or self.rank == 0:
            raise ConfigError("generator names must be nonempty and distinct")
        self.ucs = tuple(ucs)
        bad = (not self.ucs or self.ucs[-1] != 0
               or any(a <= b for a, b in zip(self.ucs, self.ucs[1:]))
               or any(not 0 <= m < self.rank for m in self.ucs))
        if bad:
            raise ConfigError("ucs markers must strictly decrease to 0")
        self.nilpotency_class = len(self.ucs)
        if self.nilpotency_class > MAX_SUPPORTED_CLASS:
            raise UnsupportedClassError(
                f"nilpotency class {self.nilpotency_class} above supported bound "
                f"{MAX_SUPPORTED_CLASS}")
        table = {}
        for (s, t), vec in commutators.items():
            if not (0 <= t < s < self.rank):
                raise ConfigError(f"commutator key ({s},{t}) must have s > t")
            vec = tuple(vec)
            if len(vec) != self.rank:
                raise ConfigError("commutator word has wrong arity")
            if any(vec[:s + 1]):
                raise ConfigError(
                    f"[{self.names[s]},{self.names[t]}] must lie above index {s}")
            if any(vec):
                table[(s, t)] = vec
        self.table = table
        self._comm_cache = {}
        self._identity = (0,) * self.rank
        self._check_ucs()

    # -- structural checks ----------------------------------------------------

    def _check_ucs(self):
        center_start = self.ucs[0]
        for (s, t), vec in self.table.items():
            if s >= center_start:
                raise ConfigError("central suffix generators must commute")
        for level in range(1, len(self.ucs)):
            lo = self.ucs[level]
            target = self.ucs[level - 1]
            for (s, t), vec in self.table.items():
                if s >= lo and any(vec[:target]):
                    raise ConfigError(
                        f"[{self.names[s]},{self.names[t]}] escapes the "
                        f"expected central suffix")

    def validate(self):
        """Consistency of the presentation: associativity of collection on all
        basis-letter triples (including inverses)."""
        letters = [self.gen(i) for i in range(self.rank)]
        letters += [g.inv() for g in letters]
        for x in letters:
            for y in letters:
                xy = x * y
                for z in letters:
                    if (xy * z) != (x * (y * z)):
                        raise ConfigError(
                            "inconsistent presentation: collection is not associative")
        return True

    def __eq__(self, other):
        return (isinstance(other, PcGroup) and self.names == other.names
                and self.table == other.table and self.ucs == other.ucs)

    def __hash__(self):
        return hash((self.names, self.ucs, tuple(sorted(self.table.items()))))

    def __repr__(self):
        return f"PcGroup({'/'.join(self.names)}, class={self.nilpotency_class})"

    # -- elements --------------------------------------------------------------

    def identity(self):
        return GroupElem(self, self._identity)

    def gen(self, which):
        if isinstance(which, str):
            which = self.names.index(which)
        vec = [0] * self.rank
        vec[which] = 1
        return GroupElem(self, tuple(vec))

    def from_exps(self, exps):
        exps = tuple(exps)
        if len(exps) != self.rank:
            raise ConfigError("exponent vector has wrong arity")
        return GroupElem(self, exps)

    def is_abelian(self):
        return not self.table

    # -- collection ------------------------------------------------------------

    def _single(self, idx, e):
        vec = [0] * self.rank
        vec[idx] = e
        return tuple(vec)

    def mul_vec(self, u, v):
        """Normal form of u * v."""
        while True:
            k = next((i for i, e in enumerate(v) if e), None)
            if k is None:
                return u
            eps = 1 if v[k] > 0 else -1
            u = self._push_letter(u, k, eps)
            v = v[:k] + (v[k] - eps,) + v[k + 1:]

    def _push_letter(self, u, k, eps):
        """Normal form of u * g_k^eps."""
        j = None
        for idx in range(self.rank - 1, k, -1):
            if u[idx]:
                j = idx
                break
        if j is None:
            return u[:k] + (u[k] + eps,) + u[k + 1:]
        s = 1 if u[j] > 0 else -1
        shrunk = u[:j] + (u[j] - s,) + u[j + 1:]
        w = self._push_letter(shrunk, k, eps)
        c = self._letter_comm(j, s, k, eps)
        # g_j^s * c: c is supported above j, so this is a plain splice
        tail = list(self._single(j, s))
        for idx, e in enumerate(c):
            if e:
                tail[idx] = e
        return self.mul_vec(w, tuple(tail))

    def _letter_comm(self, j, s, k, eps):
        """Normal form of [g_j^s, g_k^eps] for j > k; supported above index j."""
        key = (j, s, k, eps)
        cached = self._comm_cache.get(key)
        if cached is not None:
            return cached
        base = self.table.get((j, k))
        if base is None:
            out = self._identity
            for sg in (1, -1):
                for eg in (1, -1):
                    self._comm_cache[(j, sg, k, eg)] = out
            return out
        self._comm_cache[(j, 1, k, 1)] = base
        if (s, eps) == (1, 1):
            return base
        if (s, eps) == (1, -1):
            # [u, v^-1] = v c^-1 v^-1
            out = self._conjugate_vec(self.inv_vec(base), self._single(k, 1))
        elif (s, eps) == (-1, 1):
            # [u^-1, v] = u c^-1 u^-1
            out = self._conjugate_vec(self.inv_vec(base), self._single(j, 1))
        else:
            # [u^-1, v^-1] = u [u, v^-1]^-1 u^-1, reducing to the cached
            # mixed case so the recursion only ever touches deeper pairs
            mixed = self._letter_comm(j, 1, k, -1)
            out = self._conjugate_vec(self.inv_vec(mixed), self._single(j, 1))
        if any(out[:j + 1]):
            raise InternalConsistencyError("letter commutator escaped its depth")
        self._comm_cache[key] = out
        return out

    def _conjugate_vec(self, w, g):
        """g w g^-1."""
        return self.mul_vec(self.mul_vec(g, w), self.inv_vec(g))

    def inv_vec(self, u):
        out = self._identity
        for idx in range(self.rank - 1, -1, -1):
            e = u[idx]
            if e:
                out = self.mul_vec(out, self._single(idx, -e))
        return out

    def collect(self, word):
        """Normal form of a word: iterable of (generator name or index, exponent)."""
        acc = self._identity
        for which, e in word:
            idx = self.names.index(which) if isinstance(which, str) else which
            acc = self.mul_vec(acc, self._single(idx, e))
        return GroupElem(self, acc)


class GroupElem:
    __slots__ = ("group", "exps")

    def __init__(self, group, exps):
        self.group = group
        self.exps = exps

    def __mul__(self, other):
        if other.group != self.group:
            raise ConfigError("group mismatch")
        return GroupElem(self.group, self.group.mul_vec(self.exps, other.exps))

    def inv(self):
        return GroupElem(self.group, self.group.inv_vec(self.exps))

    def __pow__(self, e: int):
        base = self if e >= 0 else self.inv()
        out = self.group.identity()
        for _ in range(abs(e)):
            out = out * base
        return out

    def comm(self, other):
        """[self, other] = self^-1 other^-1 self other."""
        return self.inv() * other.inv() * self * other

    def conjugated_by(self, g):
        """g self g^-1."""
        return g * self * g.inv()

    def is_identity(self):
        return not any(self.exps)

    def __eq__(self, other):
        return (isinstance(other, GroupElem) and self.group == other.group
                and self.exps == other.exps)

    def __hash__(self):
        return hash(self.exps)

    def __str__(self):
        parts = [f"{n}^{e}" if e != 1 else n
                 for n, e in zip(self.group.names, self.exps) if e]
        return " ".join(parts) if parts else "1"

    def __repr__(self):
        return f"GroupElem({self})"


def commutator(g: GroupElem, h: GroupElem) -> GroupElem:
    return g.comm(h)


# ---------------------------------------------------------------------------
# involutions


class GroupInvolution:
    """Order-2 anti-automorphism given by images of the basis generators.

    Images may be supplied for a generating prefix only; generators that the
    commutator table defines as a plain commutator [g_s, g_t] get their
    images derived from ([g_s, g_t])^* = g_t^* g_s^* (g_t^*)^{-1} (g_s^*)^{-1}.
    """

    def __init__(self, group: PcGroup, images: dict, validate: bool = True):
        self.group = group
        img = {}
        for which, elem in images.items():
            idx = group.names.index(which) if isinstance(which, str) else which
            if not isinstance(elem, GroupElem):
                elem = group.from_exps(elem)
            img[idx] = elem
        defined_by = {}
        for (s, t), vec in group.table.items():
            nz = [i for i, e in enumerate(vec) if e]
            if len(nz) == 1 and vec[nz[0]] == 1:
                defined_by.setdefault(nz[0], (s, t))
        for idx in range(group.rank):
            if idx in img:
                continue
            if idx not in defined_by:
                raise InvalidInvolutionError(
                    f"no image given or derivable for generator {group.names[idx]}")
            s, t = defined_by[idx]
            gs, gt = img.get(s), img.get(t)
            if gs is None or gt is None:
                raise InvalidInvolutionError(
                    f"image of {group.names[idx]} depends on later generators")
            img[idx] = gt * gs * gt.inv() * gs.inv()
        self.images = img
        if validate:
            self._validate()

    def apply(self, g: GroupElem) -> GroupElem:
        if g.group != self.group:
            raise ConfigError("group mismatch")
        out = self.group.identity()
        for idx in range(self.group.rank - 1, -1, -1):
            e = g.exps[idx]
            if e:
                out = out * (self.images[idx] ** e)
        return out

    def _validate(self):
        G = self.group
        gens = [G.gen(i) for i in range(G.rank)]
        for g in gens:
            if self.apply(self.apply(g)) != g:
                raise InvalidInvolutionError("involution is not of order 2")
        for g in gens:
            for h in gens:
                if self.apply(g * h) != self.apply(h) * self.apply(g):
                    raise InvalidInvolutionError("map is not anti-multiplicative")
        rng = random.Random(20240501)
        for _ in range(16):
            u = G.from_exps(tuple(rng.randrange(-2, 3) for _ in range(G.rank)))
            v = G.from_exps(tuple(rng.randrange(-2, 3) for _ in range(G.rank)))
            if self.apply(u * v) != self.apply(v) * self.apply(u):
                raise InvalidInvolutionError("map is not anti-multiplicative")
            if self.apply(self.apply(u)) != u:
                raise InvalidInvolutionError("involution is not of order 2")


# ---------------------------------------------------------------------------
# center quotients and the integer eigenlattice


def center_quotient(group: PcGroup):
    """Rank of G/C and the projection killing the center suffix."""
    n = group.ucs[0]

    def project(g: GroupElem):
        return g.exps[:n]

    return n, project


def quotient_by_center(group: PcGroup):
    """The group G/C on the prefix basis, with project/lift helpers."""
    n = group.ucs[0]
    if n == 0:
        raise ConfigError("group is abelian; the center quotient is trivial")
    names = group.names[:n]
    table = {}
    for (s, t), vec in group.table.items():
        if s < n:
            tail = vec[:n]
            if any(tail):
                table[(s, t)] = tail
    ucs = tuple(m for m in group.ucs[1:])
    quotient = PcGroup(names, table, ucs)

    def project(g: GroupElem):
        return quotient.from_exps(g.exps[:n])

    def lift(q: GroupElem):
        return group.from_exps(q.exps + (0,) * (group.rank - n))

    return quotient, project, lift


def involution_matrix(group: PcGroup, inv: GroupInvolution):
    """Integer matrix A with A^2 = I describing the induced map on G/C."""
    n = group.ucs[0]
    cols = []
    for c in range(n):
        img = inv.apply(group.gen(c))
        cols.append(img.exps[:n])
    for c in range(n, group.rank):
        img = inv.apply(group.gen(c))
        if any(img.exps[:n]):
            raise InvalidInvolutionError("induced map on G/C is not well defined")
    A = [[cols[c][r] for c in range(n)] for r in range(n)]
    ident = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    if _int_mat_mul(A, A) != ident:
        raise InvalidInvolutionError("induced matrix does not square to identity")
    return A


def _int_mat_mul(A, B):
    n, m, k = len(A), len(B[0]) if B else 0, len(B)
    return [[sum(A[r][t] * B[t][c] for t in range(k)) for c in range(m)]
            for r in range(n)]


def row_hnf(mat):
    """Row Hermite normal form (positive pivots, reduced above) of an integer
    matrix; returns the list of nonzero rows."""
    rows = [list(r) for r in mat]
    if not rows:
        return []
    ncols = len(rows[0])
    pivot_row = 0
    for col in range(ncols):
        pick = None
        for r in range(pivot_row, len(rows)):
            if rows[r][col]:
                pick = r
                break
        if pick is None:
            continue
        rows[pivot_row], rows[pick] = rows[pick], rows[pivot_row]
        for r in range(pivot_row + 1, len(rows)):
            while rows[r][col]:
                q = rows[pivot_row][col] // rows[r][col]
                rows[pivot_row] = [a - q * b for a, b in zip(rows[pivot_row], rows[r])]
                rows[pivot_row], rows[r] = rows[r], rows[pivot_row]
        if rows[pivot_row][col] < 0:
            rows[pivot_row] = [-a for a in rows[pivot_row]]
        p = rows[pivot_row][col]
        for r in range(pivot_row):
            q = rows[r][col] // p
            if q:
                rows[r] = [a - q * b for a, b in zip(rows[r], rows[pivot_row])]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return [r for r in rows[:pivot_row] if any(r)]


def pm_eigenbasis(A):
    """Integral eigenbasis for an integer matrix with A^2 = I.

    Returns [(vector, +1), ..., (vector, -1), ...]: primitive integer vectors
    v with A v = eps v, Q-linearly independent, obtained from the column
    lattices of I + A and I - A via Hermite normal form.
    """
    n = len(A)
    ident = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    if _int_mat_mul(A, A) != ident:
        raise ConfigError("matrix does not square to the identity")
    out = []
    for eps in (1, -1):
        M = [[A[r][c] + (eps if r == c else 0) for c in range(n)] for r in range(n)]
        # columns of eps*I + A ... for eps=+1 (I+A) spans the +1 eigenspace
        cols = [[M[r][c] for r in range(n)] for c in range(n)]
        for row in row_hnf(cols):
            g = 0
            for x in row:
                g = int_gcd(g, x)
            vec = tuple(x // g for x in row)
            want = tuple(eps * x for x in vec)
            got = tuple(sum(A[r][c] * vec[c] for c in range(n)) for r in range(n))
            if got != want:
                raise InternalConsistencyError("eigenvector reconstruction failed")
            out.append((vec, eps))
    if len(out) != n:
        raise InternalConsistencyError("eigenbasis has wrong rank")
    return out


# ---------------------------------------------------------------------------
# star-invariant Heisenberg extraction


@dataclass
class HeisenbergPair:
    x: GroupElem
    y: GroupElem
    case: int
    signs: tuple

    def as_tuple(self):
        return self.x, self.y, self.case


def _finalize_pair(G, inv, h1, e1, h2, e2):
    """Given noncommuting h1, h2 with h_i^* = h_i^{eps_i} z_i (z_i central),
    build the star-invariant pair x = h1^{2 eps1} z1, y = h2^{2 eps2} z2."""
    center_start = G.ucs[0]
    pair = []
    for h, eps in ((h1, e1), (h2, e2)):
        z = (h ** (-eps)) * inv.apply(h)
        if any(z.exps[:center_start]):
            raise InternalConsistencyError("correction element is not central")
        if inv.apply(z) != z ** (-eps):
            raise InternalConsistencyError("central correction breaks z* = z^-eps")
        pair.append((h ** (2 * eps)) * z)
    x, y = pair
    e1_, e2_ = e1, e2
    if (e1_, e2_) == (-1, 1):
        x, y = y, x
        e1_, e2_ = 1, -1
    case = {(1, 1): 1, (-1, -1): 2, (1, -1): 3}[(e1_, e2_)]
    _check_heisenberg_postconditions(G, inv, x, y, (e1_, e2_))
    return HeisenbergPair(x, y, case, (e1_, e2_))


def _check_heisenberg_postconditions(G, inv, x, y, signs):
    z = x.comm(y)
    if z.is_identity():
        raise InternalConsistencyError("extracted pair commutes")
    if not x.comm(z).is_identity() or not y.comm(z).is_identity():
        raise InternalConsistencyError("extracted commutator is not central in <x,y>")
    if inv.apply(x) != x ** signs[0] or inv.apply(y) != y ** signs[1]:
        raise InternalConsistencyError("extracted pair is not star-invariant")


def _class2_pair(G: PcGroup, inv: GroupInvolution) -> HeisenbergPair:
    A = involution_matrix(G, inv)
    basis = pm_eigenbasis(A)
    n = G.ucs[0]
    lifts = []
    for vec, eps in basis:
        lifts.append((G.from_exps(vec + (0,) * (G.rank - n)), eps))
    for (i1, (h1, e1)), (i2, (h2, e2)) in itertools.combinations(
            enumerate(lifts), 2):
        if not h1.comm(h2).is_identity():
            return _finalize_pair(G, inv, h1, e1, h2, e2)
    raise InternalConsistencyError(
        "no noncommuting pair among eigenbasis lifts of a nonabelian group")


def star_invariant_heisenberg(G: PcGroup, inv: GroupInvolution) -> HeisenbergPair:
    """A pair x, y with [x,y] != 1 central in <x, y> and x* = x^{+-1},
    y* = y^{+-1}; the case tag encodes the sign pattern (after a possible
    swap): (+,+) -> 1, (-,-) -> 2, (+,-) -> 3."""
    if G.is_abelian():
        raise AbelianGroupError("group is abelian")
    if G.nilpotency_class <= 2:
        return _class2_pair(G, inv)
    # class 3: work through G/C, then either the lifted pair already behaves
    # like class 2 or the pair (x, [x,y]) inside <x, x*, z, z*> does
    Q, project, lift = quotient_by_center(G)
    inv_q = GroupInvolution(Q, {idx: project(inv.apply(G.gen(idx)))
                                for idx in range(Q.rank)})
    sub = star_invariant_heisenberg(Q, inv_q)
    x, y = lift(sub.x), lift(sub.y)
    e1, e2 = sub.signs
    z = x.comm(y)
    if x.comm(z).is_identity() and y.comm(z).is_identity():
        return _finalize_pair(G, inv, x, e1, y, e2)
    if x.comm(z).is_identity():
        x, y = y, x
        e1, e2 = e2, e1
        z = x.comm(y)
    # now [x, z] != 1; x* = x^e1 c and z* = z^{-e1 e2} w with c, w central
    return _finalize_pair(G, inv, x, e1, z, -e1 * e2)


# ---------------------------------------------------------------------------
# free words


class FreeWord:
    """Reduced word over a free alphabet with formal inverses."""

    __slots__ = ("syllables",)

    def __init__(self, syllables=()):
        self.syllables = tuple((n, e) for n, e in syllables if e)

    @classmethod
    def from_letters(cls, letters):
        out = []
        for name, e in letters:
            if not e:
                continue
            if out and out[-1][0] == name:
                merged = out[-1][1] + e
                out.pop()
                if merged:
                    out.append((name, merged))
            else:
                out.append((name, e))
        return cls(out)

    @classmethod
    def from_string(cls, text: str):
        return cls.from_letters(parse_word(text))

    def is_identity(self):
        return not self.syllables

    def __mul__(self, other):
        return FreeWord.from_letters(self.syllables + other.syllables)

    def inv(self):
        return FreeWord((n, -e) for n, e in reversed(self.syllables))

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inv()
        out = FreeWord()
        for _ in range(abs(k)):
            out = out * base
        return out

    def conjugated_by(self, g: "FreeWord"):
        """g w g^-1."""
        return g * self * g.inv()

    def letters(self):
        for name, e in self.syllables:
            step = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield name, step

    def exponent_sum(self, name):
        return sum(e for n, e in self.syllables if n == name)

    def star(self, images: dict):
        """Anti-automorphic image: reverse the word and replace each letter by
        the image word of its generator."""
        out = FreeWord()
        for name, e in reversed(self.syllables):
            out = out * (images[name] ** e)
        return out

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.syllables == other.syllables

    def __hash__(self):
        return hash(self.syllables)

    def __str__(self):
        if not self.syllables:
            return "1"
        return " ".join(f"{n}^{e}" if e != 1 else n for n, e in self.syllables)

    def __repr__(self):
        return f"FreeWord({self})"


def nilpotent_image(word: FreeWord, group: PcGroup) -> GroupElem:
    """Image of a free word in a nilpotent quotient whose generator names
    include the word's alphabet."""
    acc = group.identity()
    for name, e in word.syllables:
        acc = acc * (group.gen(name) ** e)
    return acc


_WORD_TOKEN = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?")


def parse_word(text: str):
    """Parse 'x y^-1 z^2' into [(name, exponent), ...]; '1' or '' is empty."""
    text = text.strip()
    if text in ("", "1"):
        return []
    out = []
    pos = 0
    for m in _WORD_TOKEN.finditer(text):
        between = text[pos:m.start()].strip()
        if between not in ("", "*"):
            raise ConfigError(f"cannot parse word near {between!r}")
        name, exp = m.groups()
        out.append((name, int(exp) if exp is not None else 1))
        pos = m.end()
    if text[pos:].strip():
        raise ConfigError(f"cannot parse word near {text[pos:].strip()!r}")
    if not out:
        raise ConfigError(f"cannot parse word {text!r}")
    return out


# ---------------------------------------------------------------------------
# JSON schemas


_COMM_KEY = re.compile(r"^\[\s*([A-Za-z_][A-Za-z_0-9]*)\s*,\s*([A-Za-z_][A-Za-z_0-9]*)\s*\]$")


def group_from_dict(data: dict) -> PcGroup:
    try:
        names = list(data["basis"])
        ucs = list(data["ucs"])
        raw_comms = dict(data.get("commutators", {}))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed group file: {exc}") from None
    index = {n: i for i, n in enumerate(names)}
    table = {}
    for key, word in raw_comms.items():
        m = _COMM_KEY.match(key)
        if not m:
            raise ConfigError(f"malformed commutator key {key!r}")
        s_name, t_name = m.groups()
        if s_name not in index or t_name not in index:
            raise ConfigError(f"unknown generator in commutator key {key!r}")
        s, t = index[s_name], index[t_name]
        if s <= t:
            raise ConfigError(f"commutator key {key!r} must list the later "
                              f"generator first")
        vec = [0] * len(names)
        for name, e in parse_word(word):
            if name not in index:
                raise ConfigError(f"unknown generator {name!r} in word {word!r}")
            vec[index[name]] += e
        table[(s, t)] = tuple(vec)
    group = PcGroup(names, table, ucs)
    group.validate()
    return group


def load_group(path) -> PcGroup:
    with open(path) as fh:
        return group_from_dict(json.load(fh))


def involution_from_dict(group: PcGroup, data: dict) -> GroupInvolution:
    try:
        images = dict(data["images"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed involution file: {exc}") from None
    parsed = {}
    for name, word in images.items():
        if name not in group.names:
            raise ConfigError(f"unknown generator {name!r} in involution file")
        parsed[name] = group.collect(parse_word(word))
    return GroupInvolution(group, parsed)


def load_involution(group: PcGroup, path) -> GroupInvolution:
    with open(path) as fh:
        return involution_from_dict(group, json.load(fh))


# ---------------------------------------------------------------------------
# stock groups


def heisenberg_group() -> PcGroup:
    """<x, y | [y,x] = z central>; z is the third basis generator."""
    return PcGroup(("x", "y", "z"), {(1, 0): (0, 0, 1)}, (2, 0))


def free_nilpotent_c2_r3() -> PcGroup:
    """Free class-2 group on three generators; basic commutators as center."""
    names = ("x1", "x2", "x3", "c12", "c13", "c23")
    table = {
        (1, 0): (0, 0, 0, 1, 0, 0),
        (2, 0): (0, 0, 0, 0, 1, 0),
        (2, 1): (0, 0, 0, 0, 0, 1),
    }
    return PcGroup(names, table, (3, 0))


def free_nilpotent_c3_r2() -> PcGroup:
    """Free class-3 group on two generators: basis x, y, z=[y,x], u=[z,x], v=[z,y]."""
    names = ("x", "y", "z", "u", "v")
    table = {
        (1, 0): (0, 0, 1, 0, 0),
        (2, 0): (0, 0, 0, 1, 0),
        (2, 1): (0, 0, 0, 0, 1),
    }
    return PcGroup(names, table, (3, 2, 0))
