"""Generated relation families: relator binomials and the two-loop trinomials.

Both families are modelled by a folded labelled graph made of loops glued at
base vertices.  Monomials of M are labels of reduced paths, incident
monomials are labels of paths with common endpoints, and a word is a small
piece exactly when it labels more than one path.
"""
from __future__ import annotations

from bisect import bisect_left
import random
from dataclasses import dataclass
from math import comb
from typing import Callable, Iterator, Sequence

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .graphs import LoopGraph
from .polynomials import QQ, Field, Polynomial
from .relations import INFINITY, RelationFamily, RelationSystem, Report, jump_game
from .words import (ONE, Alphabet, Word, concat_many, cyclic_shifts,
                    deglex_key, inverse, is_cyclically_reduced, is_reduced,
                    primitive_root, reduce_letters)


# ------------------------------------------------------------ graph family
class GraphFamily(RelationFamily):
    certified_add_closed = True

    def __init__(self, graph: LoopGraph, field: Field, caps: Caps = DEFAULT_CAPS):
        self.graph = graph
        self.field = field
        self.caps = caps
        self._loop_max = max(len(l) for l in graph.loops)

    # M and small pieces
    def is_in_M(self, u: Word) -> bool:
        return not u or self.graph.is_label(u)

    def is_small_piece(self, c: Word) -> bool:
        return not c or self.graph.count_paths(c) >= 2

    def m_prefix_lengths(self, U: Word) -> np.ndarray:
        longest, _ = self.graph.reach_table(U)
        return longest

    def piece_prefix_lengths(self, U: Word) -> np.ndarray:
        _, second = self.graph.reach_table(U)
        return second

    def m_intervals(self, U: Word) -> list[tuple[int, int]]:
        longest, _ = self.graph.reach_table(U)
        out = []
        prev_end = -1
        for i in range(len(U)):
            e = i + int(longest[i])
            if e > i and e > prev_end:
                out.append((i, e))
            prev_end = max(prev_end, e)
        return out

    # relations
    def common_readings(self, words: Sequence[Word]) -> list[tuple[int, int, list]]:
        """(I, F, weights per word) for every reading shared by all words."""
        if not words:
            return []
        first = max(words, key=len)
        out = []
        for s in self.graph.starts(first):
            end = None
            weights = []
            for w in words:
                r = self.graph.walk(s, w)
                if r is None or (end is not None and r.end != end):
                    break
                end = r.end
                weights.append(r.weights)
            else:
                out.append((s, end, weights))
        return out

    def incident(self, a: Word, max_len: int) -> list[Word]:
        found = set()
        for r in self.graph.readings(a):
            for w in self.path_candidates(r.start, r.end, a, max_len):
                if w != a:
                    found.add(w)
        return sorted(found, key=deglex_key)[: self.caps.incident_cap]

    def path_candidates(self, start: int, end: int, a: Word, max_len: int) -> list[Word]:
        return self.graph.paths(start, end, max_len, self.caps.greedy_candidates)

    def random_path(self, rng: random.Random, length: int, start: int | None = None):
        g = self.graph
        v = rng.randrange(g.n_vertices) if start is None else start
        s = v
        word = []
        for _ in range(length):
            options = [a for a in g.succ[v] if not word or a != -word[-1]]
            a = rng.choice(options)
            word.append(a)
            v = g.succ[v][a]
        return s, v, tuple(word)

    def reducers(self, sys, a_h: Word, qualifies: Callable[[Word], bool],
                 limit: int = 1) -> Iterator[Polynomial]:
        raise NotImplementedError

    def _small_walks(self, start: int, first_forbidden: int) -> list[Word]:
        """Maximal small-piece words readable from ``start`` that do not
        begin with ``first_forbidden``."""
        g = self.graph
        leaves = []
        stack = [((), start)]
        while stack:
            w, v = stack.pop()
            grown = False
            for a, u in g.succ[v].items():
                if (not w and a == first_forbidden) or (w and a == -w[-1]):
                    continue
                nw = w + (a,)
                if self.is_small_piece(nw):
                    stack.append((nw, u))
                    grown = True
            if not grown:
                leaves.append(w)
        return leaves

    def extension_bound(self, sys, m: Word, left: bool, right: bool):
        """Upper bound on the measure of p*m*s for small pieces p, s (each
        side only when allowed), or None when m has several readings."""
        rs = self.graph.readings(m)
        if len(rs) != 1:
            return None
        I, F = rs[0].start, rs[0].end
        ps = [inverse(q) for q in self._small_walks(I, m[0])] if left else [()]
        ss = self._small_walks(F, -m[-1]) if right else [()]
        best_l = max(sys.lambda_(p + m) for p in ps)
        best_r = max(sys.lambda_(m + s) for s in ss)
        if sys.measure_mode == "count_letters":
            return best_l + best_r - sys.lambda_(m)
        return min(best_l + (1 if right else 0), best_r + (1 if left else 0))

    def isolation_structural(self, sys, witness_len: int, chain_len: int) -> Report:
        """Two distinct small-piece paths with common endpoints are the only
        way two incident monomials can agree after stripping an overlap.
        Enumerate every small-piece path up to the length bound."""
        g = self.graph
        bound = {"witness_len": witness_len, "chain_len": chain_len}
        labels = {(v, v): {ONE} for v in range(g.n_vertices)}
        frontier = []
        for v in range(g.n_vertices):
            for a in g.succ[v]:
                frontier.append(((a,), [(v, g.succ[v][a])]))
        # group readings of each one-letter word
        grouped: dict[Word, list] = {}
        for w, rs in frontier:
            grouped.setdefault(w, []).extend(rs)
        frontier = list(grouped.items())
        checked = 0
        complete = True
        while frontier:
            nxt: dict[Word, list] = {}
            for w, rs in frontier:
                if len(rs) < 2:
                    continue
                checked += 1
                for pair in rs:
                    bucket = labels.setdefault(pair, set())
                    bucket.add(w)
                    if len(bucket) > 1:
                        other = min((x for x in bucket if x != w), key=deglex_key)
                        wit = f"{sys.format(w)} and {sys.format(other)}"
                        return Report("isolation", False, bound, checked, wit,
                                      "two small-piece paths share endpoints",
                                      conclusive=False)
                if len(w) >= witness_len:
                    complete = False
                    continue
                for s, v in rs:
                    for a, u in g.succ[v].items():
                        if a == -w[-1]:
                            continue
                        nxt.setdefault(w + (a,), []).append((s, u))
            frontier = list(nxt.items())
        detail = ("every small piece enumerated" if complete
                  else "small pieces enumerated up to the witness bound")
        return Report("isolation", True, bound, checked, None, detail)


# ------------------------------------------------------------ group family
class GroupPresentation:
    def __init__(self, alphabet: Alphabet, relators: Sequence[Word]):
        if not relators:
            raise ValueError("at least one relator is required")
        rels = []
        for r in relators:
            r = tuple(r)
            if not r or not is_reduced(r) or not is_cyclically_reduced(r):
                raise ValueError("relators must be nonempty and cyclically reduced")
            root, k = primitive_root(r)
            if k > 1:
                raise ValueError("proper-power relators are not supported")
            rels.append(r)
        for i, r in enumerate(rels):
            for j, s in enumerate(rels):
                if i != j and any(_in_cyclic(r, t) for t in (s, inverse(s))):
                    raise ValueError("a relator is a cyclic subword of another relator")
        self.alphabet = alphabet
        self.relators = rels
        sym = set()
        for r in rels:
            sym.update(cyclic_shifts(r))
            sym.update(cyclic_shifts(inverse(r)))
        self.symmetrized = sorted(sym, key=deglex_key)
        self._lex = sorted(sym)
        self._by_first: dict[int, list[Word]] = {}
        for r in self.symmetrized:
            self._by_first.setdefault(r[0], []).append(r)
        self._cm = None


def _in_cyclic(r: Word, s: Word) -> bool:
    if len(r) > len(s):
        return False
    doubled = s + s
    n = len(r)
    return any(doubled[i:i + n] == r for i in range(len(s)))


def group_small_piece(c: Word, pres: GroupPresentation) -> bool:
    """c is a common prefix of two different symmetrized relators."""
    if not c:
        return True
    lex = pres._lex
    i = bisect_left(lex, c)
    return i + 1 < len(lex) and all(r[:len(c)] == c for r in lex[i:i + 2])


def _lcp(a: Word, b: Word) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def check_Cm(pres: GroupPresentation) -> int:
    """Least number of group-sense pieces needed to spell a symmetrized relator."""
    if pres._cm is not None:
        return pres._cm
    sym = sorted(pres.symmetrized)
    longest = {}
    for i, r in enumerate(sym):
        best = 0
        if i > 0:
            best = max(best, _lcp(r, sym[i - 1]))
        if i + 1 < len(sym):
            best = max(best, _lcp(r, sym[i + 1]))
        longest[r] = best
    m = None
    for base in pres.relators:
        for word in (base, inverse(base)):
            n = len(word)
            at = [longest[word[k:] + word[:k]] for k in range(n)]
            for j in range(n):
                table = [min(at[(j + k) % n], n - k) for k in range(n)] + [0]
                count = jump_game(table, 0, n)
                m = count if m is None else min(m, count)
    pres._cm = int(m) if m != INFINITY else 10 ** 9
    return pres._cm


class GroupFamily(GraphFamily):
    """Binomials c - d over pairs of distinct relator-graph paths with common
    endpoints, with all nonzero multiples."""

    def __init__(self, pres: GroupPresentation, field: Field, caps: Caps = DEFAULT_CAPS):
        g = LoopGraph(len(pres.alphabet))
        for r in pres.relators:
            g.add_component([r])
        super().__init__(g, field, caps)
        self.pres = pres

    def is_small_piece(self, c: Word) -> bool:
        return not c or self.graph.count_paths(c) >= 2

    def contains(self, p: Polynomial) -> bool:
        if len(p) != 2:
            return False
        c, d = p.sorted_words()
        if not self.field.add(p.coeff(c), p.coeff(d)) == self.field.zero():
            return False
        return bool(self.common_readings([c, d]))

    def generators(self) -> list[Polynomial]:
        return [Polynomial(self.field, {r: 1, ONE: -1}) for r in self.pres.relators]

    def path_candidates(self, start, end, a, max_len):
        cap = min(max_len, len(a) + self.caps.n_cap * self._loop_max)
        return self.graph.paths(start, end, cap, self.caps.greedy_candidates)

    def sample_relation(self, rng, len_bound):
        for _ in range(50):
            length = rng.randint(1, max(1, len_bound))
            s, e, c = self.random_path(rng, length)
            others = [d for d in self.graph.paths(s, e, len_bound) if d != c]
            if others:
                d = rng.choice(others)
                gamma = rng.choice(self.field.nonzero_elements())
                return Polynomial(self.field, {c: gamma, d: self.field.neg(gamma)})
        return None

    def reducers(self, sys, a_h, qualifies, limit=1):
        made = 0
        for r in self.graph.readings(a_h):
            cands = [w for w in self.path_candidates(r.start, r.end, a_h, 10 ** 9)
                     if w != a_h]
            cands.sort(key=lambda w: (sys.lambda_(w), len(w), deglex_key(w)))
            for c in cands:
                if qualifies(c):
                    yield Polynomial(self.field, {a_h: 1, c: -1})
                    made += 1
                    if made >= limit:
                        return


def dehn_reduce(W: Word, pres: GroupPresentation) -> Word:
    """Classical Dehn reduction: replace more than half of a relator by the
    inverse of the rest until no such subword remains."""
    m = check_Cm(pres)
    if m < 7:
        raise ValueError(f"Dehn reduction needs C(7); this presentation is C({m})")
    W = reduce_letters(W)
    while True:
        for i in range(len(W)):
            for r in pres._by_first.get(W[i], ()):
                k = _lcp(W[i:], r)
                if 2 * k > len(r):
                    W = concat_many(W[:i], inverse(r[k:]), W[i + k:])
                    break
            else:
                continue
            break
        else:
            return W


def make_group_system(pres: GroupPresentation, field: Field = QQ,
                      caps: Caps = DEFAULT_CAPS, label: str = "") -> RelationSystem:
    m = check_Cm(pres)
    if m < 22:
        raise ValueError(f"relators satisfy only C({m}); C(22) is required")
    tau = m // 2 - 1
    names = {"R": pres.relators[0]}
    if len(pres.relators) > 1:
        names.update({f"R{i + 1}": r for i, r in enumerate(pres.relators)})
    sys = RelationSystem(pres.alphabet, field, GroupFamily(pres, field, caps), tau,
                         caps=caps, names=names, label=label)
    sys.presentation = pres
    sys.cm = m
    return sys


# -------------------------------------------------------- trinomial family
@dataclass(frozen=True)
class TrinomialParams:
    alphabet: Alphabet
    w: Word
    n1: int
    n2: int
    x: int  # generator letters (positive)
    y: int

    def __post_init__(self):
        w = self.w
        if not w or not is_reduced(w) or not is_cyclically_reduced(w):
            raise ValueError("w must be nonempty and cyclically reduced")
        if primitive_root(w)[1] != 1:
            raise ValueError("w must be primitive")
        if self.x == self.y or self.x < 1 or self.y < 1:
            raise ValueError("x and y must be distinct generators")
        forbidden = {self.x, -self.x, self.y, -self.y}
        if {w[0], w[-1], -w[0], -w[-1]} & forbidden:
            raise ValueError("boundary letters of w must differ from x and y")
        if not self.n1 - len(w) > 0:
            raise ValueError("n1 - |w| must be positive")
        if not self.n2 - self.n1 >= 21:
            raise ValueError("n2 - n1 must be at least 21")

    @property
    def v(self) -> Word:
        out = []
        for n in range(self.n1, self.n2 + 1):
            out += [self.x] * n + [self.y]
        return tuple(out)


class TwoLoopGraph:
    """Explicit vertex/edge model of the v-cycle and the w-cycle sharing the
    base vertex O.  Kept separate from ``LoopGraph`` as an independent path
    counter."""

    def __init__(self, v: Word, w: Word):
        self.v, self.w = v, w
        self.vertices = ["O"] + [("v", k) for k in range(1, len(v))] + \
            [("w", k) for k in range(1, len(w))]
        self.edges = []  # (source, letter, target)
        for name, loop in (("v", v), ("w", w)):
            chain = ["O"] + [(name, k) for k in range(1, len(loop))] + ["O"]
            for k, a in enumerate(loop):
                self.edges.append((chain[k], a, chain[k + 1]))
        self.out: dict = {u: [] for u in self.vertices}
        for s, a, t in self.edges:
            self.out[s].append((a, t))
            self.out[t].append((-a, s))

    def shared_vertices(self) -> int:
        v_side = {s for s, _, _ in self.edges[:len(self.v)]} | {t for _, _, t in self.edges[:len(self.v)]}
        w_side = {s for s, _, _ in self.edges[len(self.v):]} | {t for _, _, t in self.edges[len(self.v):]}
        return len(v_side & w_side)


def count_paths(c: Word, g: TwoLoopGraph) -> int:
    """Number of walks in g spelling c, by depth-first search."""
    if not c:
        return len(g.vertices)
    total = 0
    stack = [(u, 0) for u in g.vertices]
    while stack:
        u, i = stack.pop()
        if i == len(c):
            total += 1
            continue
        for a, t in g.out[u]:
            if a == c[i]:
                stack.append((t, i + 1))
    return total


def _psi_poly(entries, field: Field) -> dict:
    """Clear denominators of sum coef * t^ew * (1+t)^(-ev) and expand."""
    if not entries:
        return {}
    shift_t = -min(ew for _, ew, _ in entries)
    top = max(ev for _, _, ev in entries)
    out: dict[int, object] = {}
    for coef, ew, ev in entries:
        n = top - ev
        for k in range(n + 1):
            c = comb(n, k)
            if field.is_gf2:
                c %= 2
                if not c:
                    continue
            deg = ew + shift_t + k
            out[deg] = field.add(out.get(deg, field.zero()), field.mul(coef, field.coerce(c)))
    return {d: c for d, c in out.items() if c != field.zero()}


class TrinomialFamily(GraphFamily):
    """Sums of paths with common endpoints whose loop exponents vanish under
    v -> (1+t)^-1, w -> t."""

    certifies_transversality = True

    def __init__(self, params: TrinomialParams, field: Field, caps: Caps = DEFAULT_CAPS):
        g = LoopGraph(len(params.alphabet))
        self.v = params.v
        self.w = params.w
        g.add_component([self.v, self.w])
        super().__init__(g, field, caps)
        self.params = params
        self.two_loop = TwoLoopGraph(self.v, self.w)

    def _terms(self, weights):
        return [(weights[1], weights[0])]

    def contains(self, p: Polynomial) -> bool:
        if len(p) < 2:
            return False
        words = p.sorted_words()
        for _, _, weights in self.common_readings(words):
            entries = [(p.coeff(w), wt[1], wt[0]) for w, wt in zip(words, weights)]
            if not _psi_poly(entries, self.field):
                return True
        return False

    def generators(self) -> list[Polynomial]:
        return [Polynomial(self.field, {inverse(self.v): 1, ONE: -1, self.w: -1})]

    # candidates: local edits of the loop word of a path
    def decompose(self, start: int, word: Word):
        g = self.graph
        base = g.base(start)
        v = start
        visits = [0] if v == base else []
        for i, a in enumerate(word):
            v = g.succ[v][a]
            if v == base:
                visits.append(i + 1)
        if not visits:
            return None
        f, l = visits[0], visits[-1]
        loops = []
        for a, b in zip(visits, visits[1:]):
            seg = word[a:b]
            for i, loop in enumerate(g.loops):
                if seg == loop:
                    loops.append(i + 1)
                    break
                if seg == inverse(loop):
                    loops.append(-(i + 1))
                    break
            else:
                raise AssertionError("segment between base visits is not a loop")
        return word[:f], tuple(loops), word[l:]

    def _edits(self, G: tuple) -> set:
        letters = [1, -1, 2, -2]
        words = [()] + [(a,) for a in letters] + [(a, b) for a in letters for b in letters if a != -b]
        out = {G}
        n = len(G)
        for i in range(n + 1):
            for width in (0, 1, 2):
                if i + width > n:
                    continue
                for rep in words:
                    if width == 2 and rep:
                        continue
                    out.add(G[:i] + rep + G[i + width:])
        return out

    def path_candidates(self, start, end, a, max_len):
        g = self.graph
        found = set()
        dec = self.decompose(start, a) if a else None
        G = dec[1] if dec else ()
        for ex, _, _ in g._exits(start):
            for en, _, _ in g._entries(end):
                for H in self._edits(G):
                    w = concat_many(ex, g.loop_word(_free(H)), en)
                    if len(w) <= max_len:
                        found.add(w)
        si, sk = g.position[start]
        ei, ek = g.position[end]
        if si >= 0 and si == ei:
            loop = g.loops[si]
            found.add(loop[sk:ek] if ek >= sk else inverse(loop[ek:sk]))
        return sorted(found, key=deglex_key)

    def psi(self, w: Word, start: int):
        r = self.graph.walk(start, w)
        return r.end, r.weights[1], r.weights[0]

    def sample_relation(self, rng, len_bound):
        g = self.graph
        for _ in range(100):
            X = _random_loop_word(rng, rng.randint(0, 1))
            Y = _random_loop_word(rng, rng.randint(0, 1))
            start = rng.randrange(g.n_vertices)
            end = rng.randrange(g.n_vertices)
            ex = rng.choice(g._exits(start))[0]
            en = rng.choice(g._entries(end))[0]
            forms = [((-1,), 1), ((), -1), ((2,), -1)]
            terms = {}
            for mid, c in forms:
                word = concat_many(ex, g.loop_word(_free(X + mid + Y)), en)
                terms[word] = c
            p = Polynomial(self.field, terms)
            if p.max_length() <= len_bound and len(p) == 3:
                return p.scale(rng.choice(self.field.nonzero_elements()))
        return None

    def reducers(self, sys, a_h, qualifies, limit=1):
        f = self.field
        made = 0
        for r in self.graph.readings(a_h):
            cands = [w for w in self.path_candidates(r.start, r.end, a_h, 10 ** 9) if w != a_h]
            cands.sort(key=lambda w: (sys.lambda_(w), len(w), deglex_key(w)))
            target = (f.one(), r.weights[1], r.weights[0])
            chosen = []
            for c in cands:
                if not qualifies(c):
                    continue
                cr = self.graph.walk(r.start, c)
                chosen.append((c, cr.weights[1], cr.weights[0]))
                sol = _solve_span(target, [(ew, ev) for _, ew, ev in chosen], f)
                if sol is None:
                    continue
                terms = {a_h: f.one()}
                for (c2, _, _), x in zip(chosen, sol):
                    if x != f.zero():
                        terms[c2] = f.neg(x)
                yield Polynomial(f, terms)
                made += 1
                if made >= limit:
                    return


def _free(H: tuple) -> tuple:
    out = []
    for a in H:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def _random_loop_word(rng, n):
    out = []
    while len(out) < n:
        a = rng.choice([1, -1, 2, -2])
        if out and out[-1] == -a:
            continue
        out.append(a)
    return tuple(out)


def _solve_span(target, vectors, field: Field):
    """Coefficients x with sum x_k psi_k = psi_target, or None."""
    entries = [(field.one(), ew, ev) for ew, ev in vectors] + [(field.one(),) + target[1:]]
    shift_t = -min(e[1] for e in entries)
    top = max(e[2] for e in entries)

    def vec(ew, ev):
        return _psi_poly([(field.one(), ew, ev), (field.zero(), -shift_t, top)], field)

    cols = [vec(ew, ev) for ew, ev in vectors]
    rhs = vec(target[1], target[2])
    degs = sorted({d for c in cols for d in c} | set(rhs))
    rows = [[c.get(d, field.zero()) for c in cols] + [rhs.get(d, field.zero())] for d in degs]
    return _gauss(rows, len(cols), field)


def _gauss(rows, ncols, f: Field):
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != f.zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = f.inv(rows[r][c])
        rows[r] = [f.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != f.zero():
                k = rows[i][c]
                rows[i] = [f.sub(x, f.mul(k, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][ncols] != f.zero():
            return None
    x = [f.zero()] * ncols
    for i, c in enumerate(pivots):
        x[c] = rows[i][ncols]
    return x


def make_trinomial_system(params: TrinomialParams, field: Field = QQ,
                          caps: Caps = DEFAULT_CAPS, label: str = "",
                          measure_mode: str = "count_letters") -> RelationSystem:
    fam = TrinomialFamily(params, field, caps)
    sys = RelationSystem(params.alphabet, field, fam, 10, measure_mode=measure_mode,
                         counted=(params.y, -params.y), caps=caps,
                         names={"v": fam.v, "w": fam.w}, label=label)
    sys.params = params
    return sys


# ------------------------------------------------------------------ presets
def demo_group_presentation() -> GroupPresentation:
    alpha = Alphabet(["a", "b"])
    a, b = alpha.letter("a"), alpha.letter("b")
    rel = []
    for i in range(4, 27):
        rel += [a] * i + [b]
    return GroupPresentation(alpha, [tuple(rel)])


def demo_trinomial_params() -> TrinomialParams:
    alpha = Alphabet(["x", "y", "z", "t"])
    z, t = alpha.letter("z"), alpha.letter("t")
    return TrinomialParams(alpha, (z, t, z), 4, 25, alpha.letter("x"), alpha.letter("y"))


def demo_system(name: str, field: Field = QQ, caps: Caps = DEFAULT_CAPS) -> RelationSystem:
    if name == "demo-group":
        return make_group_system(demo_group_presentation(), field, caps, label=name)
    if name == "demo-trinomial":
        return make_trinomial_system(demo_trinomial_params(), field, caps, label=name)
    raise KeyError(name)


PRESETS = ("demo-group", "demo-trinomial")
