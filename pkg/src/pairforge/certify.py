"""Freeness evidence for constructed unit pairs.

Two tools:

* exhaustive search for relations among two units up to a word-length bound,
  over exact matrix images (split 2x2 representation for quaternions, the
  q x q regular representation otherwise);
* the nonarchimedean valuation at the place of 1 - theta*i, plus a checker
  for valuation-inequality criteria loaded from descriptor files.

The default search oracle evaluates the exact matrices at a deterministic
point of a large prime field and re-verifies any identity hit with full
exact arithmetic; a homomorphic image can only collapse relations, never
invent non-relations, so verdicts agree with the all-exact run.  The exact
common-denominator oracle is available directly as oracle="exact".
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

from .errors import ConfigError, CriterionFormatError, NotInvertibleError
from .fields import (FunctionField, cyclotomic_field, poly_gcd, poly_divexact,
                     poly_lcm, poly_mul, poly_lead, _is_prime)
from .heisenberg import build_pair_by_id, catalog_ids, specialize_expr
from .symbol import SymbolAlgebra, SymElem

LETTER_NAMES = ("A", "A^-1", "B", "B^-1")
_INVERSE_OF = (1, 0, 3, 2)


def count_reduced_words(length: int) -> int:
    return 4 * 3 ** (length - 1) if length >= 1 else 0


def word_to_str(word) -> str:
    return " ".join(LETTER_NAMES[l] for l in word)


def unit_matrix(u: SymElem):
    """The matrix image used by the equality oracle (a homomorphism)."""
    if u.algebra.m == 2:
        return u.quat_split_rep()
    return u.rep_hom()


# ---------------------------------------------------------------------------
# exact oracle: common-denominator matrices over F(i)


class ExactOracle:
    """Matrices stored as (numerator grid over K[a,b] x i-powers, denominator
    polynomial); gcd reduction after every multiplication."""

    def __init__(self, algebra: SymbolAlgebra):
        self.algebra = algebra
        self.K = algebra.field.coeff_field
        self.m = algebra.m
        self.size = 2 if algebra.m == 2 else algebra.m
        one = self.K.one
        self._one_poly = {(0, 0): one}
        self._a_poly = {(1, 0): one}

    def from_symelem(self, u: SymElem):
        mat = unit_matrix(u)
        K = self.K
        den = self._one_poly
        for row in mat:
            for entry in row:
                for coord in entry:
                    den = poly_lcm(K, den, coord.den)
        num = []
        for row in mat:
            out_row = []
            for entry in row:
                coords = []
                for coord in entry:
                    scale = poly_divexact(K, den, coord.den)
                    coords.append(poly_mul(K, coord.num, scale))
                out_row.append(tuple(coords))
            num.append(tuple(out_row))
        return tuple(num), den

    def identity(self):
        z = {}
        rows = []
        for r in range(self.size):
            row = []
            for c in range(self.size):
                coords = [dict(self._one_poly) if (r == c and k == 0) else z
                          for k in range(self.m)]
                row.append(tuple(coords))
            rows.append(tuple(row))
        return tuple(rows), dict(self._one_poly)

    def _ext_mul(self, u, v):
        K, m = self.K, self.m
        conv = [{} for _ in range(2 * m - 1)]
        from .fields import poly_add
        for x, px in enumerate(u):
            if not px:
                continue
            for y, py in enumerate(v):
                if py:
                    conv[x + y] = poly_add(K, conv[x + y], poly_mul(K, px, py))
        out = conv[:m]
        for k in range(m, 2 * m - 1):
            if conv[k]:
                out[k - m] = poly_add(K, out[k - m],
                                      poly_mul(K, conv[k], self._a_poly))
        return tuple(out)

    def mul(self, M1, M2):
        from .fields import poly_add
        (n1, d1), (n2, d2) = M1, M2
        K = self.K
        size, m = self.size, self.m
        rows = []
        for r in range(size):
            row = []
            for c in range(size):
                acc = tuple({} for _ in range(m))
                for k in range(size):
                    e1 = n1[r][k]
                    if all(not p for p in e1):
                        continue
                    term = self._ext_mul(e1, n2[k][c])
                    acc = tuple(poly_add(K, a, t) for a, t in zip(acc, term))
                row.append(acc)
            rows.append(tuple(row))
        den = poly_mul(K, d1, d2)
        return self._reduce((tuple(rows), den))

    def _reduce(self, M):
        num, den = M
        K = self.K
        g = den
        for row in num:
            for entry in row:
                for p in entry:
                    if p:
                        g = poly_gcd(K, g, p)
                        if g == self._one_poly:
                            return M
        if g == self._one_poly:
            return M
        new_num = tuple(
            tuple(tuple(poly_divexact(K, p, g) if p else p for p in entry)
                  for entry in row) for row in num)
        return new_num, poly_divexact(K, den, g)

    def is_identity(self, M):
        num, den = M
        for r in range(self.size):
            for c in range(self.size):
                entry = num[r][c]
                want_first = den if r == c else {}
                if entry[0] != want_first:
                    return False
                if any(entry[k] for k in range(1, self.m)):
                    return False
        return True


# ---------------------------------------------------------------------------
# evaluation oracle: deterministic point in a large prime field


_POINTS = ((2, 3), (5, 7), (6, 10), (11, 13), (17, 19), (23, 29), (31, 37))


def _eval_prime(q: int) -> int:
    p = 10 ** 9 + 7
    while p % q != 1 or not _is_prime(p):
        p += 1
    return p


def _primitive_root_of_unity(P: int, q: int) -> int:
    if q == 1:
        return 1
    prime_divs = set()
    n = q
    d = 2
    while d * d <= n:
        while n % d == 0:
            prime_divs.add(d)
            n //= d
        d += 1
    if n > 1:
        prime_divs.add(n)
    for cand in range(2, 200):
        eta = pow(cand, (P - 1) // q, P)
        if eta != 1 and all(pow(eta, q // r, P) != 1 for r in prime_divs):
            roots = sorted(pow(eta, k, P) for k in range(1, q + 1)
                           if math.gcd(k, q) == 1)
            return roots[0]
    raise ConfigError("could not find a root of unity in the evaluation field")


class EvalOracle:
    """Images of the exact matrices at a = a0, b = b0 over F_P (characteristic
    zero base only); identity hits must be confirmed exactly by the caller."""

    def __init__(self, algebra: SymbolAlgebra, exact_letters, exact_oracle):
        if algebra.field.characteristic != 0:
            raise ConfigError("evaluation oracle requires characteristic zero")
        self.algebra = algebra
        self.m = algebra.m
        self.size = exact_oracle.size
        q = algebra.field.order
        self.P = _eval_prime(q)
        self.theta0 = _primitive_root_of_unity(self.P, q)
        self.letters = None
        for a0, b0 in _POINTS:
            try:
                self.letters = [self._eval_mat(M, a0, b0) for M in exact_letters]
                self.a0 = a0 % self.P
                break
            except ZeroDivisionError:
                continue
        if self.letters is None:
            raise ConfigError("no usable evaluation point found")

    def _eval_scalar(self, c) -> int:
        # cyclotomic tuple -> F_P via theta -> theta0
        acc, powt = 0, 1
        for comp in c:
            f = Fraction(comp)
            d = f.denominator % self.P
            if d == 0:
                raise ZeroDivisionError
            acc = (acc + f.numerator * pow(d, self.P - 2, self.P) * powt) % self.P
            powt = powt * self.theta0 % self.P
        return acc

    def _eval_poly(self, poly, a0, b0) -> int:
        acc = 0
        for (ea, eb), c in poly.items():
            acc = (acc + self._eval_scalar(c) * pow(a0, ea, self.P)
                   * pow(b0, eb, self.P)) % self.P
        return acc

    def _eval_mat(self, M, a0, b0):
        num, den = M
        dval = self._eval_poly(den, a0, b0)
        if dval == 0:
            raise ZeroDivisionError
        rows = tuple(
            tuple(tuple(self._eval_poly(p, a0, b0) for p in entry)
                  for entry in row) for row in num)
        return rows, dval

    def identity(self):
        rows = tuple(
            tuple(tuple(1 if (r == c and k == 0) else 0 for k in range(self.m))
                  for c in range(self.size)) for r in range(self.size))
        return rows, 1

    def _ext_mul(self, u, v):
        P, m, a0 = self.P, self.m, self.a0
        conv = [0] * (2 * m - 1)
        for x, px in enumerate(u):
            if not px:
                continue
            for y, py in enumerate(v):
                conv[x + y] += px * py
        out = conv[:m]
        for k in range(m, 2 * m - 1):
            out[k - m] += conv[k] * a0
        return tuple(c % P for c in out)

    def mul(self, M1, M2):
        (n1, d1), (n2, d2) = M1, M2
        P, size, m = self.P, self.size, self.m
        rows = []
        for r in range(size):
            row = []
            for c in range(size):
                acc = [0] * m
                for k in range(size):
                    e1 = n1[r][k]
                    if not any(e1):
                        continue
                    term = self._ext_mul(e1, n2[k][c])
                    acc = [(a + t) % P for a, t in zip(acc, term)]
                row.append(tuple(acc))
            rows.append(tuple(row))
        return tuple(rows), d1 * d2 % P

    def is_identity(self, M):
        num, den = M
        for r in range(self.size):
            for c in range(self.size):
                entry = num[r][c]
                if entry[0] != (den if r == c else 0):
                    return False
                if any(entry[1:]):
                    return False
        return True


# ---------------------------------------------------------------------------
# the search itself


@dataclass
class SearchResult:
    verdict: str
    bound: int
    witness: str | None = None
    words_per_length: list = dc_field(default_factory=list)
    exact_confirmations: int = 0
    false_hits: int = 0
    elapsed_ms: int = 0

    def to_dict(self):
        out = {"verdict": self.verdict, "bound": self.bound,
               "words_per_length": list(self.words_per_length),
               "elapsed_ms": self.elapsed_ms}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _dfs_collect(oracle, letters, lmax, first_letter):
    """All identity hits in the subtree of words starting with first_letter."""
    hits = []
    counts = [0] * lmax

    def rec(state, depth, last, word):
        for letter in range(4):
            if letter == _INVERSE_OF[last]:
                continue
            new_state = oracle.mul(state, letters[letter])
            counts[depth] += 1
            word.append(letter)
            if oracle.is_identity(new_state):
                hits.append(tuple(word))
            if depth + 1 < lmax:
                rec(new_state, depth + 1, letter, word)
            word.pop()

    start = oracle.mul(oracle.identity(), letters[first_letter])
    counts[0] += 1
    word = [first_letter]
    if oracle.is_identity(start):
        hits.append(tuple(word))
    if lmax > 1:
        rec(start, 1, first_letter, word)
    return counts, hits


def _search_task(args):
    algebra_params, exact_letters, lmax, first_letter, mode = args
    algebra = SymbolAlgebra(*algebra_params)
    exact = ExactOracle(algebra)
    if mode == "filtered":
        oracle = EvalOracle(algebra, exact_letters, exact)
        letters = oracle.letters
    else:
        oracle = exact
        letters = exact_letters
    return _dfs_collect(oracle, letters, lmax, first_letter)


def relation_search(A: SymElem, B: SymElem, lmax: int, oracle: str = "auto",
                    threads: int | None = None) -> SearchResult:
    """Search all nonempty reduced words in A, B (and inverses) of length up
    to lmax for one equal to 1.  Deterministic: the reported witness is the
    first relation in (length, lexicographic) order over the fixed alphabet
    A < A^-1 < B < B^-1.
    """
    t0 = time.monotonic()
    if A.algebra != B.algebra:
        raise ConfigError("algebra mismatch")
    algebra = A.algebra
    if lmax < 1:
        raise ConfigError("search bound must be >= 1")
    try:
        letters_sym = [A, A.inv(), B, B.inv()]
    except NotInvertibleError:
        raise ConfigError("relation search requires invertible inputs") from None
    exact = ExactOracle(algebra)
    exact_letters = [exact.from_symelem(u) for u in letters_sym]
    if oracle == "auto":
        mode = "filtered" if algebra.field.characteristic == 0 else "exact"
    elif oracle in ("exact", "filtered"):
        mode = oracle
    else:
        raise ConfigError(f"unknown oracle {oracle!r}")

    if threads is None:
        threads = int(os.environ.get("FORGE_THREADS", "1") or "1")
    params = (algebra.field.characteristic, algebra.m, algebra.field.variables)
    tasks = [(params, exact_letters, lmax, first, mode) for first in range(4)]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=min(4, threads)) as pool:
            results = list(pool.map(_search_task, tasks))
    else:
        results = [_search_task(t) for t in tasks]

    counts = [0] * lmax
    hits = []
    for sub_counts, sub_hits in results:
        counts = [a + b for a, b in zip(counts, sub_counts)]
        hits.extend(sub_hits)

    confirmations = 0
    false_hits = 0
    confirmed = []
    if mode == "filtered" and hits:
        # re-verify every hit with exact arithmetic
        for word in sorted(hits, key=lambda w: (len(w), w)):
            state = exact.identity()
            for letter in word:
                state = exact.mul(state, exact_letters[letter])
            confirmations += 1
            if exact.is_identity(state):
                confirmed.append(word)
            else:
                false_hits += 1
    else:
        confirmed = hits

    elapsed = int((time.monotonic() - t0) * 1000)
    if confirmed:
        best = min(confirmed, key=lambda w: (len(w), w))
        return SearchResult("relation-found", lmax, word_to_str(best), counts,
                            confirmations, false_hits, elapsed)
    return SearchResult(f"no-relation-up-to-{lmax}", lmax, None, counts,
                        confirmations, false_hits, elapsed)


def verify_witness(A: SymElem, B: SymElem, witness: str) -> bool:
    """Re-evaluate a reported relation word exactly."""
    lookup = {name: idx for idx, name in enumerate(LETTER_NAMES)}
    letters_sym = [A, A.inv(), B, B.inv()]
    acc = A.algebra.one()
    for tok in witness.split():
        acc = acc * letters_sym[lookup[tok]]
    return acc.is_one()


# ---------------------------------------------------------------------------
# the valuation at 1 - theta i


def _convert_to_ti(rf, tfield: FunctionField, m: int):
    """Map a rational function in (a, b) into (t, b) with a = t^m."""
    t = tfield.var("t")
    b = tfield.var("b")
    tm = t ** m

    def conv_poly(poly):
        out = tfield.zero
        for (ea, eb), c in poly.items():
            out = out + tfield.from_cyclo(c) * tm ** ea * b ** eb
        return out

    return conv_poly(rf.num) / conv_poly(rf.den)


def _t_order(poly, tfield: FunctionField):
    """Order of vanishing of a (t, b)-polynomial at t = theta^{-1}."""
    if not poly:
        return math.inf
    K = tfield.coeff_field
    root = K.theta_power(-1)
    order = 0
    cur = dict(poly)
    while True:
        # evaluate at t = root: group by t-degree
        by_t = {}
        for (et, eb), c in cur.items():
            by_t.setdefault(et, {})[eb] = c
        val = {}
        for et, bpoly in by_t.items():
            scale = K.one
            for _ in range(et):
                scale = K.mul(scale, root)
            for eb, c in bpoly.items():
                prev = val.get(eb, K.zero)
                s = K.add(prev, K.mul(c, scale))
                if K.is_zero(s):
                    val.pop(eb, None)
                else:
                    val[eb] = s
        if val:
            return order
        # synthetic division by (t - root)
        max_t = max(et for (et, _) in cur)
        coeffs = [dict() for _ in range(max_t + 1)]
        for (et, eb), c in cur.items():
            coeffs[et][eb] = c
        quot = [dict() for _ in range(max_t)]
        carry = {}
        for et in range(max_t, 0, -1):
            level = dict(coeffs[et])
            for eb, c in carry.items():
                prev = level.get(eb, K.zero)
                s = K.add(prev, c)
                if K.is_zero(s):
                    level.pop(eb, None)
                else:
                    level[eb] = s
            quot[et - 1] = level
            carry = {eb: K.mul(c, root) for eb, c in level.items()}
        cur = {}
        for et, bpoly in enumerate(quot):
            for eb, c in bpoly.items():
                cur[(et, eb)] = c
        order += 1
        if not cur:
            raise CriterionFormatError("valuation of the zero polynomial")


def nu(x, algebra: SymbolAlgebra):
    """Valuation at the place of 1 - theta i (equivalently i - theta^{-1},
    with a = i^m pushing the residue to a = 1).

    ``x`` is an element of F(i) as a coordinate tuple of rational functions,
    or a single rational function.
    """
    if hasattr(x, "field"):
        coords = (x,) + (algebra.field.zero,) * (algebra.m - 1)
    else:
        coords = tuple(x)
    if all(c.is_zero() for c in coords):
        return math.inf
    K = algebra.field
    tfield = FunctionField(K.characteristic, K.order, ("t", "b"))
    t = tfield.var("t")
    total = tfield.zero
    for s, c in enumerate(coords):
        if not c.is_zero():
            total = total + _convert_to_ti(c, tfield, algebra.m) * t ** s
    return _t_order(total.num, tfield) - _t_order(total.den, tfield)


# ---------------------------------------------------------------------------
# valuation-criterion certificates


_CMPS = {
    "<": lambda v, b: v < b,
    "<=": lambda v, b: v <= b,
    "==": lambda v, b: v == b,
    "!=": lambda v, b: v != b,
    ">": lambda v, b: v > b,
    ">=": lambda v, b: v >= b,
}


def load_criterion(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    validate_criterion(data)
    return data


def validate_criterion(data) -> None:
    if not isinstance(data, dict) or "constraints" not in data:
        raise CriterionFormatError("criterion file must carry a constraints list")
    if not isinstance(data["constraints"], list) or not data["constraints"]:
        raise CriterionFormatError("criterion constraints must be a nonempty list")
    for cons in data["constraints"]:
        if not isinstance(cons, dict):
            raise CriterionFormatError("each constraint must be an object")
        if cons.get("cmp") not in _CMPS:
            raise CriterionFormatError(f"unknown comparison {cons.get('cmp')!r}")
        if not isinstance(cons.get("bound"), int):
            raise CriterionFormatError("constraint bound must be an integer")
        prod = cons.get("product")
        if not isinstance(prod, list) or not prod:
            raise CriterionFormatError("constraint product must be a nonempty list")
        for factor in prod:
            if (not isinstance(factor, list) or len(factor) != 4
                    or factor[0] not in ("A", "B")
                    or not all(isinstance(v, int) for v in factor[1:])):
                raise CriterionFormatError(
                    "product factors must be [matrix, row, col, exponent]")


def gl14_certificate(A_mat, B_mat, criterion: dict | None,
                     algebra: SymbolAlgebra) -> dict:
    """Check a transcribed valuation criterion against the matrix images.

    Returns {"verdict": "certified"|"inconclusive", ...}.  Without a
    criterion the method is wired but inconclusive (nothing to check
    against); the report always records the criterion provenance.
    """
    if criterion is None:
        return {"verdict": "inconclusive",
                "reason": "no criterion transcribed; method wired but idle"}
    validate_criterion(criterion)
    mats = {"A": A_mat, "B": B_mat}
    details = []
    all_hold = True
    for cons in criterion["constraints"]:
        val = 0
        for name, r, c, exp in cons["product"]:
            M = mats[name]
            if not (0 <= r < len(M) and 0 <= c < len(M)):
                raise CriterionFormatError("matrix index out of range")
            v = nu(M[r][c], algebra)
            val = val + exp * v
        holds = _CMPS[cons["cmp"]](val, cons["bound"])
        all_hold &= holds
        details.append({"product": cons["product"], "cmp": cons["cmp"],
                        "bound": cons["bound"],
                        "value": "inf" if val == math.inf else
                                 ("-inf" if val == -math.inf else val),
                        "holds": holds})
    return {"verdict": "certified" if all_hold else "inconclusive",
            "criterion": criterion.get("name", "unnamed"),
            "source": criterion.get("source", "unspecified"),
            "constraints": details}


# ---------------------------------------------------------------------------
# orchestration


SANITY_IDS = ("sanity-equal", "sanity-square", "sanity-cube")


@dataclass
class CertReport:
    pair: str
    method: str
    bound: int | None
    verdict: str
    witness: str | None = None
    details: dict = dc_field(default_factory=dict)
    elapsed_ms: int = 0

    def to_dict(self):
        out = {"pair": self.pair, "method": self.method, "verdict": self.verdict,
               "elapsed_ms": self.elapsed_ms}
        if self.bound is not None:
            out["bound"] = self.bound
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


def pair_units(pair_id: str, q: int | None = None, characteristic: int = 0):
    """The two units whose freeness is being probed, as symbol-algebra
    elements, plus the algebra.  Cached: the dense inversions behind the
    q = 3 constructions are expensive and every value is immutable."""
    return _pair_units_cached(pair_id, q, characteristic)


@lru_cache(maxsize=None)
def _pair_units_cached(pair_id: str, q: int | None, characteristic: int):
    if pair_id in SANITY_IDS:
        algebra = SymbolAlgebra(characteristic, q or 2)
        base = algebra.one() + algebra.i()
        if pair_id == "sanity-equal":
            return base, base, algebra
        if pair_id == "sanity-square":
            return base, base * base, algebra
        return base, base * base * base, algebra
    (e1, e2), tag, kind = build_pair_by_id(pair_id, characteristic)
    if q is None:
        q = 3 if pair_id == "main-1-unitary" else 2
    algebra = SymbolAlgebra(characteristic, q)
    u1 = specialize_expr(e1, algebra, tag.x_step)
    u2 = specialize_expr(e2, algebra, tag.x_step)
    return u1, u2, algebra


def certify_pair(pair_id: str, method: str = "relation-search",
                 q: int | None = None, characteristic: int = 0,
                 bound: int = 6, criterion: dict | None = None,
                 oracle: str = "auto", threads: int | None = None) -> CertReport:
    t0 = time.monotonic()
    known = set(catalog_ids()) | set(SANITY_IDS)
    if pair_id not in known:
        raise ConfigError(f"unknown pair id {pair_id!r}")
    A, B, algebra = pair_units(pair_id, q, characteristic)
    if method == "relation-search":
        res = relation_search(A, B, bound, oracle=oracle, threads=threads)
        report = CertReport(pair_id, method, bound, res.verdict, res.witness,
                            {"words_per_length": res.words_per_length,
                             "false_hits": res.false_hits,
                             "q": algebra.m})
        if res.witness is not None and not verify_witness(A, B, res.witness):
            raise ConfigError("reported witness failed exact re-evaluation")
    elif method == "pingpong-gl14":
        A_mat, B_mat = unit_matrix(A), unit_matrix(B)
        out = gl14_certificate(A_mat, B_mat, criterion, algebra)
        report = CertReport(pair_id, method, None, out.pop("verdict"),
                            details={**out, "q": algebra.m})
    else:
        raise ConfigError(f"unknown method {method!r}")
    report.elapsed_ms = int((time.monotonic() - t0) * 1000)
    return report
