"""Relation systems over the group algebra of a free group.

A ``RelationSystem`` pairs a relation family with the constant tau and
derives from it the monomial set M, the small pieces and the Lambda measure.
Families are either explicit finite lists of polynomials (closed under
nonzero scalars) or generated graph families from ``scring.families``.
"""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .polynomials import Field, Polynomial, format_polynomial
from .words import (Alphabet, Word, concat, deglex_key, format_word, letter_rank,
                    inverse, is_reduced)

INFINITY = math.inf


class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


class NotInM(ValueError):
    pass


def jump_game(piece_len: Sequence[int], start: int, end: int) -> float:
    """Fewest small pieces covering [start, end) when a piece starting at i
    may have any length up to piece_len[i] (pieces are closed under
    subwords)."""
    if start >= end:
        return 0
    count = 0
    lo = far = start
    while far < end:
        best = far
        for i in range(lo, far + 1):
            best = max(best, i + min(int(piece_len[i]), end - i))
        if best == far:
            return INFINITY
        lo, far = far + 1, best
        count += 1
    return count


def lambda_by_cuts(u: Word, is_piece: Callable[[Word], bool]) -> float:
    """Breadth-first search over cut points, each segment tested directly."""
    n = len(u)
    if n == 0:
        return 0
    dist = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for j in range(i + 1, n + 1):
                if j not in dist and is_piece(u[i:j]):
                    dist[j] = dist[i] + 1
                    if j == n:
                        return dist[j]
                    nxt.append(j)
        frontier = nxt
    return INFINITY


# ---------------------------------------------------------------- families
class RelationFamily:
    """Interface shared by explicit and generated relation families."""

    certified_add_closed = False
    certifies_transversality = False
    piece_measure_bound = 1
    # incident() lists every incident monomial when given no length cap
    incident_complete = False

    def is_in_M(self, u: Word) -> bool:
        raise NotImplementedError

    def is_small_piece(self, c: Word) -> bool:
        raise NotImplementedError

    def contains(self, p: Polynomial) -> bool:
        raise NotImplementedError

    def incident(self, a: Word, max_len: int) -> list[Word]:
        raise NotImplementedError

    def generators(self) -> list[Polynomial]:
        raise NotImplementedError

    def sample_relation(self, rng: random.Random, len_bound: int) -> Polynomial | None:
        raise NotImplementedError

    def enumerate_relations(self, len_bound: int) -> Iterable[Polynomial]:
        raise NotImplementedError

    def relations_with(self, a: Word, len_bound: int) -> Iterable[Polynomial]:
        for r in self.enumerate_relations(len_bound):
            if a in r:
                yield r

    # tables over a host word; generic fallback by direct testing
    def m_prefix_lengths(self, U: Word) -> np.ndarray:
        n = len(U)
        out = np.zeros(n + 1, dtype=np.int64)
        for i in range(n):
            best = 0
            for j in range(i + 1, n + 1):
                if self.is_in_M(U[i:j]):
                    best = j - i
            out[i] = best
        return out

    def piece_prefix_lengths(self, U: Word) -> np.ndarray:
        n = len(U)
        out = np.zeros(n + 1, dtype=np.int64)
        for i in range(n):
            best = 0
            for j in range(i + 1, n + 1):
                if self.is_small_piece(U[i:j]):
                    best = j - i
                elif not self.is_in_M(U[i:j]):
                    break
            out[i] = best
        return out

    def m_intervals(self, U: Word) -> list[tuple[int, int]]:
        """Occurrences of M-words in U not properly inside another one."""
        raise NotImplementedError


class ExplicitFamily(RelationFamily):
    """A finite list of relations together with their nonzero multiples."""

    incident_complete = True

    def __init__(self, relations: Sequence[Polynomial], field: Field):
        self.field = field
        self.relations = [r for r in relations if not r.is_zero()]
        self._normal = {self._normalise(r) for r in self.relations}
        self.terms = set()
        for r in self.relations:
            self.terms.update(r.terms)
        # M is closed under subwords
        self.subwords = {a[i:j] for a in self.terms for i in range(len(a))
                         for j in range(i, len(a) + 1)}
        self._pieces: dict[Word, bool] = {}

    def _normalise(self, p: Polynomial) -> Polynomial:
        lead = p.sorted_words()[0]
        return p.scale(self.field.inv(p.coeff(lead)))

    def is_in_M(self, u: Word) -> bool:
        return u in self.subwords

    def contains(self, p: Polynomial) -> bool:
        if p.is_zero():
            return False
        return self._normalise(p) in self._normal

    def generators(self) -> list[Polynomial]:
        return list(self.relations)

    def enumerate_relations(self, len_bound: int) -> Iterable[Polynomial]:
        for r in self.relations:
            if r.max_length() <= len_bound:
                yield r

    def incident(self, a: Word, max_len: int) -> list[Word]:
        out = set()
        for r in self.relations:
            if a in r:
                out.update(w for w in r.terms if w != a and len(w) <= max_len)
        return sorted(out, key=deglex_key)

    def sample_relation(self, rng, len_bound):
        pool = list(self.enumerate_relations(len_bound))
        if not pool:
            return None
        r = rng.choice(pool)
        return r.scale(rng.choice(self.field.nonzero_elements()))

    def is_small_piece(self, c: Word) -> bool:
        if not c:
            return True
        if c in self._pieces:
            return self._pieces[c]
        answer = c in self.subwords and self._decide_piece(c)
        self._pieces[c] = answer
        return answer

    def _decide_piece(self, c: Word) -> bool:
        k = len(c)
        sites = []  # (relation, term, prefix, suffix)
        for r in self.relations:
            for a in r.terms:
                for i in range(len(a) - k + 1):
                    if a[i:i + k] == c:
                        sites.append((r, a[:i], a[i + k:]))
        for p, a1, a2 in sites:
            for _, b1, b2 in sites:
                left = p.shift(left=concat(b1, inverse(a1)))
                if not self.contains(left):
                    return True
                right = p.shift(right=concat(inverse(a2), b2))
                if not self.contains(right):
                    return True
        return False

    def m_intervals(self, U: Word) -> list[tuple[int, int]]:
        n = len(U)
        hits = [(i, j) for i in range(n) for j in range(i + 1, n + 1)
                if U[i:j] in self.subwords]
        out = []
        for i, j in hits:
            if not any((s <= i and j <= e) and (s, e) != (i, j) for s, e in hits):
                out.append((i, j))
        return sorted(out)


# ----------------------------------------------------------------- systems
class RelationSystem:
    def __init__(self, alphabet: Alphabet, field: Field, family: RelationFamily,
                 tau: int, measure_mode: str = "standard",
                 counted: Sequence[int] = (), caps: Caps = DEFAULT_CAPS,
                 names: dict | None = None, label: str = ""):
        if tau < 10:
            raise ValueError(f"tau must be at least 10, got {tau}")
        if measure_mode not in ("standard", "count_letters"):
            raise ValueError(f"unknown measure mode {measure_mode!r}")
        if measure_mode == "count_letters" and not family.certifies_transversality:
            raise ValueError("letter counting needs a family certifying transversality")
        self.alphabet = alphabet
        self.field = field
        self.family = family
        self.tau = tau
        self.measure_mode = measure_mode
        self.counted = frozenset(counted)
        self.caps = caps
        self.names = dict(names or {})
        self.label = label
        self._lambda: dict[Word, float] = {}
        self._tables: dict[Word, tuple] = {}
        self.cache: dict = {}  # shared memo for chart-level computations

    def variant(self, **kw) -> "RelationSystem":
        args = dict(alphabet=self.alphabet, field=self.field, family=self.family,
                    tau=self.tau, measure_mode=self.measure_mode,
                    counted=tuple(self.counted), caps=self.caps, names=self.names,
                    label=self.label)
        args.update(kw)
        return RelationSystem(**args)

    # M, pieces, Lambda ---------------------------------------------------
    def is_in_M(self, u: Word) -> bool:
        return not u or self.family.is_in_M(u)

    def is_small_piece(self, c: Word) -> bool:
        if not is_reduced(c):
            raise ValueError("small-piece query on an unreduced word")
        return self.family.is_small_piece(c)

    def tables(self, U: Word) -> tuple[np.ndarray, np.ndarray]:
        t = self._tables.get(U)
        if t is None:
            t = (self.family.m_prefix_lengths(U), self.family.piece_prefix_lengths(U))
            if len(self._tables) > 20000:
                self._tables.clear()
            self._tables[U] = t
        return t

    def lambda_(self, u: Word) -> float:
        if not u:
            return 0
        if u in self._lambda:
            return self._lambda[u]
        if not self.is_in_M(u):
            raise NotInM(f"{format_word(u, self.alphabet)} is not in M")
        if self.measure_mode == "count_letters":
            value = sum(1 for a in u if a in self.counted)
        else:
            value = self.lambda_standard(u)
        self._lambda[u] = value
        return value

    def lambda_standard(self, u: Word) -> float:
        if not u:
            return 0
        _, pieces = self.tables(u)
        return jump_game(pieces, 0, len(u))

    def span_measure(self, U: Word, start: int, end: int) -> float:
        """Lambda of the subword U[start:end], which must be in M."""
        if start >= end:
            return 0
        if self.measure_mode == "count_letters":
            return sum(1 for a in U[start:end] if a in self.counted)
        _, pieces = self.tables(U)
        return jump_game(pieces, start, end)

    def format(self, w: Word) -> str:
        return format_word(w, self.alphabet)

    def format_poly(self, p: Polynomial) -> str:
        return format_polynomial(p, self.alphabet)


# ----------------------------------------------------------------- reports
@dataclass
class Report:
    name: str
    ok: bool
    bound: dict
    checked: int = 0
    witness: str | None = None
    detail: str = ""
    conclusive: bool = True

    def line(self) -> str:
        verdict = "pass" if self.ok else ("fail" if self.conclusive else "inconclusive")
        bounds = ", ".join(f"{k}={v}" for k, v in self.bound.items())
        text = f"{self.name}: {verdict} ({bounds}; {self.checked} checked)"
        if self.witness:
            text += f" witness: {self.witness}"
        if self.detail:
            text += f" [{self.detail}]"
        return text


def _shift_letters(p: Polynomial) -> tuple[set, set]:
    left = {-w[0] for w in p.terms if w}
    right = {-w[-1] for w in p.terms if w}
    return left, right


def check_compatibility(sys: RelationSystem, bound: int, samples: int = 300,
                        seed: int = 0) -> Report:
    """Shift every enumerable relation by each admissible letter."""
    fam = sys.family
    checked = 0
    if hasattr(fam, "relations"):
        pool = list(fam.enumerate_relations(bound))
    else:
        rng = random.Random(seed)
        pool = list(fam.generators())
        for _ in range(samples):
            r = fam.sample_relation(rng, bound)
            if r is not None and r.max_length() <= bound:
                pool.append(r)
    for p in pool:
        for coeff in sys.field.nonzero_elements(3):
            checked += 1
            if not fam.contains(p.scale(coeff)):
                return Report("compatibility", False, {"bound": bound}, checked,
                              f"{sys.field.format(coeff)} * ({sys.format_poly(p)})")
        lefts, rights = _shift_letters(p)
        for x in sorted(lefts, key=letter_rank):
            checked += 1
            q = p.shift(left=(x,))
            if not fam.contains(q):
                return Report("compatibility", False, {"bound": bound}, checked,
                              f"{sys.format((x,))} * ({sys.format_poly(p)})")
        for x in sorted(rights, key=letter_rank):
            checked += 1
            q = p.shift(right=(x,))
            if not fam.contains(q):
                return Report("compatibility", False, {"bound": bound}, checked,
                              f"({sys.format_poly(p)}) * {sys.format((x,))}")
    return Report("compatibility", True, {"bound": bound}, checked)


def check_small_cancellation(sys: RelationSystem, sample_combos: int, len_bound: int,
                             seed: int = 0) -> Report:
    """Every sampled nonzero combination keeps a term of measure > tau."""
    rng = random.Random(seed)
    fam = sys.family
    name = "small-cancellation"
    if sys.measure_mode == "count_letters":
        name += " (transversality form)"
    bound = {"combos": sample_combos, "len": len_bound}
    checked = 0
    attempts = 0
    while checked < sample_combos and attempts < 20 * sample_combos:
        attempts += 1
        total = Polynomial(sys.field)
        for _ in range(rng.randint(1, 3)):
            r = fam.sample_relation(rng, len_bound)
            if r is None:
                break
            total = total + r.scale(rng.choice(sys.field.nonzero_elements()))
        if total.is_zero():
            continue
        checked += 1
        if not any(sys.lambda_(w) >= sys.tau + 1 for w in total.terms):
            return Report(name, False, bound, checked, sys.format_poly(total))
    return Report(name, True, bound, checked)


def check_isolation(sys: RelationSystem, witness_len: int, chain_len: int) -> Report:
    """Bounded check of both isolation conditions."""
    bound = {"witness_len": witness_len, "chain_len": chain_len}
    fam = sys.family
    if hasattr(fam, "isolation_structural"):
        return fam.isolation_structural(sys, witness_len, chain_len)
    return _isolation_explicit(sys, witness_len, chain_len, bound)


def _incident_chains(sys, m1, chain_len, hi):
    """Monomials reachable from m1 by chains of incident monomials of
    measure >= tau - 2 with at most chain_len members."""
    seen = {m1}
    frontier = [m1]
    for _ in range(chain_len - 1):
        nxt = []
        for m in frontier:
            for w in sys.family.incident(m, 10 ** 6):
                if w not in seen and sys.is_in_M(w) and sys.lambda_(w) >= hi:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    seen.discard(m1)
    return seen


def _isolation_explicit(sys, witness_len, chain_len, bound) -> Report:
    from .chart import compute_chart

    fam = sys.family
    hi = sys.tau - 2
    terms = sorted(fam.terms, key=deglex_key)
    high = [m for m in terms if sys.lambda_(m) >= hi]
    witnesses = [a for a in high if len(a) <= witness_len]
    pieces = sorted({w[i:j] for w in terms for i in range(len(w))
                     for j in range(i, len(w) + 1) if sys.is_small_piece(w[i:j])},
                    key=deglex_key)
    checked = 0
    for m1 in high:
        for mk in sorted(_incident_chains(sys, m1, chain_len, hi), key=deglex_key):
            for a in witnesses:
                for side in ("left", "right"):
                    got = _isolation_case(sys, compute_chart, m1, mk, a, side, pieces,
                                          chain_len, hi)
                    if got is None:
                        continue
                    checked += 1
                    if got is False:
                        w = (f"{side}: m1={sys.format(m1)} mk={sys.format(mk)} "
                             f"a={sys.format(a)}")
                        return Report("isolation", False, bound, checked, w)
    return Report("isolation", True, bound, checked)


def _isolation_case(sys, compute_chart, m1, mk, a, side, pieces, chain_len, hi):
    """None when the hypotheses fail, otherwise whether the conclusion holds."""
    if side == "left":
        words = (a + m1, a + mk)
        if a[-1] == -m1[0] or a[-1] == -mk[0]:
            return None
    else:
        words = (m1 + a, mk + a)
        if m1[-1] == -a[0] or mk[-1] == -a[0]:
            return None
    if any(sys.is_in_M(w) for w in words):
        return None
    overlaps = []
    for w, m in zip(words, (m1, mk)):
        chart = compute_chart(w, sys)
        spans = [(o.start, o.end) for o in chart.occurrences]
        if side == "left":
            if (len(a), len(w)) not in spans:
                return None
            host = [s for s in spans if s[0] == 0 and s[1] >= len(a)]
            if not host:
                return None
            overlaps.append(w[len(a):host[0][1]])
        else:
            if (0, len(m)) not in spans:
                return None
            host = [s for s in spans if s[1] == len(w) and s[0] <= len(m)]
            if not host:
                return None
            overlaps.append(w[host[0][0]:len(m)])
    p1, pk = overlaps
    # the glued chain condition through small pieces l, l'
    if side == "left":
        ends = [(l + a + p1, l2 + a + pk) for l in pieces for l2 in pieces
                if is_reduced(l + a) and is_reduced(l2 + a)]
    else:
        ends = [(p1 + a + r, pk + a + r2) for r in pieces for r2 in pieces
                if is_reduced(a + r) and is_reduced(a + r2)]
    linked = False
    for b1, bn in ends:
        if not (sys.is_in_M(b1) and sys.is_in_M(bn)):
            continue
        if sys.lambda_(b1) < hi or sys.lambda_(bn) < hi:
            continue
        if b1 == bn or bn in _incident_chains(sys, b1, max(chain_len, 2), hi):
            linked = True
            break
    if not linked:
        return None
    if side == "left":
        return concat(inverse(p1), m1) != concat(inverse(pk), mk)
    return concat(m1, inverse(p1)) != concat(mk, inverse(pk))


# --------------------------------------------------------- additive closure
def additive_closure_step(sys: RelationSystem, p: Polynomial, q: Polynomial):
    """alpha^-1 p - beta^-1 q for a shared term of measure >= tau - 2, or
    None when no such term exists.  Equal inputs give the zero polynomial."""
    shared = [w for w in p.sorted_words() if w in q and sys.is_in_M(w)
              and sys.lambda_(w) >= sys.tau - 2]
    if not shared:
        return None
    a = shared[0]
    f = sys.field
    return p.scale(f.inv(p.coeff(a))) - q.scale(f.inv(q.coeff(a)))


class Closure(enum.Enum):
    YES = "yes"
    NO_WITHIN_BOUND = "no-within-bound"
    UNKNOWN = "unknown"


def add_closure_status(t: Polynomial, sys: RelationSystem, steps: int | None = None,
                       len_bound: int | None = None) -> Closure:
    fam = sys.family
    if fam.contains(t):
        return Closure.YES
    if fam.certified_add_closed:
        return Closure.NO_WITHIN_BOUND if not t.is_zero() else Closure.UNKNOWN
    steps = sys.caps.closure_steps if steps is None else steps
    len_bound = sys.caps.closure_len if len_bound is None else len_bound
    target = _normal(t, sys.field)
    known = {_normal(r, sys.field): r for r in fam.enumerate_relations(len_bound)}
    truncated = False
    for _ in range(steps):
        fresh = {}
        items = list(known.values())
        for i, p in enumerate(items):
            for q in items[i + 1:]:
                r = additive_closure_step(sys, p, q)
                if r is None or r.is_zero():
                    continue
                if r.max_length() > len_bound:
                    truncated = True
                    continue
                key = _normal(r, sys.field)
                if key not in known and key not in fresh:
                    fresh[key] = r
        if target in fresh:
            return Closure.YES
        if not fresh:
            break
        known.update(fresh)
        truncated = truncated or bool(fresh)
    return Closure.UNKNOWN if truncated else Closure.NO_WITHIN_BOUND


def _normal(p: Polynomial, f: Field):
    if p.is_zero():
        return p
    lead = p.sorted_words()[0]
    return p.scale(f.inv(p.coeff(lead)))


def is_in_AddR(t: Polynomial, sys: RelationSystem) -> bool:
    return add_closure_status(t, sys) is Closure.YES
