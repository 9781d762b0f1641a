"""Brute-force validators kept independent of the production deciders."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .chart import Chart, MaxOccurrence, OracleCapExceeded
from .polynomials import Field, Polynomial
from .relations import INFINITY, NotInM, RelationSystem, Tri
from .rewrite import Certificate, Layout
from .words import Word, deglex_key


def _free_reduce(letters) -> tuple:
    # standalone stack reduction, kept apart from the word library
    out: list[int] = []
    for a in letters:
        if out and out[-1] + a == 0:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def expand_certificate(cert: Certificate, field: Field) -> dict:
    acc: dict = {}
    for coef, lay in cert.steps:
        for w in lay.relation.terms:
            c = field.mul(coef, lay.relation.coeff(w))
            key = _free_reduce(list(lay.left) + list(w) + list(lay.right))
            acc[key] = field.add(acc.get(key, field.zero()), c)
    return {w: c for w, c in acc.items() if c != field.zero()}


def verify_certificate(p: Polynomial, cert: Certificate, sys: RelationSystem | None = None) -> bool:
    """Expand the certificate term by term and compare with p.  With a
    system given, every relation must also belong to its family."""
    if sys is not None:
        for _, lay in cert.steps:
            if not sys.family.contains(lay.relation):
                return False
    got = expand_certificate(cert, p.field)
    want = {w: c for w, c in p.terms.items()}
    return got == want


def _reduced_words(n_letters: int, max_len: int):
    letters = [g for i in range(1, n_letters + 1) for g in (i, -i)]
    out = [()]
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for a in letters:
                if w and w[-1] == -a:
                    continue
                nxt.append(w + (a,))
        out += nxt
        frontier = nxt
    return out


@dataclass
class Membership:
    member: bool
    certificate: Certificate | None
    columns: int


def bounded_membership(p: Polynomial, sys: RelationSystem, len_bound: int,
                       context_len: int = 1, generators=None) -> Membership:
    """Exact linear solve of p over all layouts L*g*R of the generators with
    |L|, |R| <= context_len and every expanded term of length <= len_bound."""
    if any(len(w) > len_bound for w in p.terms):
        raise ValueError("length bound is smaller than a term of the input")
    f = sys.field
    gens = list(sys.family.generators() if generators is None else generators)
    ctx = _reduced_words(len(sys.alphabet), context_len)
    ctx.sort(key=deglex_key)
    columns = []
    for gi, g in enumerate(gens):
        for L in ctx:
            for R in ctx:
                vec = {}
                for w in g.terms:
                    key = _free_reduce(list(L) + list(w) + list(R))
                    vec[key] = f.add(vec.get(key, f.zero()), g.coeff(w))
                vec = {w: c for w, c in vec.items() if c != f.zero()}
                if vec and all(len(w) <= len_bound for w in vec):
                    columns.append(((L, gi, R), vec))
    # incremental elimination: basis rows keyed by pivot word
    basis: dict = {}  # pivot -> (vector, combination)
    order = lambda w: deglex_key(w)  # noqa: E731

    def reduce(vec, comb):
        vec, comb = dict(vec), dict(comb)
        while vec:
            piv = max(vec, key=order)
            if piv not in basis:
                return vec, comb, piv
            bv, bc = basis[piv]
            k = f.div(vec[piv], bv[piv])
            for w, c in bv.items():
                vec[w] = f.sub(vec.get(w, f.zero()), f.mul(k, c))
                if vec[w] == f.zero():
                    del vec[w]
            for j, c in bc.items():
                comb[j] = f.sub(comb.get(j, f.zero()), f.mul(k, c))
                if comb[j] == f.zero():
                    del comb[j]
        return vec, comb, None

    for idx, (_, vec) in enumerate(columns):
        v2, c2, piv = reduce(vec, {idx: f.one()})
        if piv is not None:
            basis[piv] = (v2, c2)
    rest, comb, _ = reduce(dict(p.terms), {})
    if rest:
        return Membership(False, None, len(columns))
    cert = Certificate()
    for j in sorted(comb):
        (L, gi, R), _ = columns[j]
        cert.steps.append((f.neg(comb[j]), Layout(L, gens[gi], R)))
    return Membership(True, cert, len(columns))


def exhaustive_lambda(u: Word, sys: RelationSystem, cap: int | None = None) -> float:
    """Try every set of cut points, fewest pieces first."""
    cap = sys.caps.exhaustive_lambda_letters if cap is None else cap
    n = len(u)
    if n > cap:
        raise OracleCapExceeded(f"exhaustive lambda is capped at {cap} letters")
    if not sys.is_in_M(u):
        raise NotInM("word is not in M")
    if sys.measure_mode == "count_letters":
        return sum(1 for a in u if a in sys.counted)
    if n == 0:
        return 0
    piece = {(i, j): sys.family.is_small_piece(u[i:j])
             for i in range(n) for j in range(i + 1, n + 1)}
    # reachability first, so impossible words do not walk all 2^(n-1) subsets
    reach = [False] * (n + 1)
    reach[0] = True
    for j in range(1, n + 1):
        reach[j] = any(reach[i] and piece[(i, j)] for i in range(j))
    if not reach[n]:
        return INFINITY
    for k in range(1, n + 1):
        for cuts in itertools.combinations(range(1, n), k - 1):
            bounds = (0,) + cuts + (n,)
            if all(piece[(a, b)] for a, b in zip(bounds, bounds[1:])):
                return k
    return INFINITY


def _reduce_tracked(U: Word, s: int, e: int, sub: Word):
    """New word plus, for every surviving letter, where it came from."""
    items = [(U[i], ("old", i)) for i in range(s)] + \
        [(x, ("sub", j)) for j, x in enumerate(sub)] + \
        [(U[i], ("old", i)) for i in range(e, len(U))]
    out: list = []
    for x, tag in items:
        if out and out[-1][0] + x == 0:
            out.pop()
        else:
            out.append((x, tag))
    return tuple(x for x, _ in out), [tag for _, tag in out]


def _survivors(tags, wanted) -> tuple[int, int] | None:
    pos = [k for k, t in enumerate(tags) if t in wanted]
    return (pos[0], pos[-1] + 1) if pos else None


def _containing(chart: Chart, span) -> list[MaxOccurrence]:
    if span is None:
        return []
    return [o for o in chart.occurrences if o.start <= span[0] and span[1] <= o.end]


def exhaustive_virtual(b: MaxOccurrence, chart: Chart, sys: RelationSystem,
                       depth_cap: int = 2, state_cap: int = 5000) -> Tri:
    """Unpruned depth-first walk over every admissible sequence up to
    depth_cap replacements, with all listed incident substitutes."""
    from .chart import compute_chart

    tau = sys.tau
    if b.lam < tau - 2:
        return Tri.NO
    if b.lam >= tau:
        return Tri.YES
    complete = sys.family.incident_complete
    g = getattr(sys.family, "graph", None)
    if complete:
        slack = 10 ** 9
    else:
        slack = max(len(l) for l in g.loops) if g is not None else 0
    count = 0
    cut = False

    def walk(U: Word, span, depth) -> bool:
        nonlocal count, cut
        if depth == 0:
            cut = True
            return False
        ch = compute_chart(U, sys)
        for a in ch.occurrences:
            if a.span == span or a.lam < tau - 2:
                continue
            for sub in sys.family.incident(a.word, len(a.word) + slack):
                if not sub:
                    continue
                V, tags = _reduce_tracked(U, a.start, a.end, sub)
                new = compute_chart(V, sys)
                sub_span = _survivors(tags, {("sub", j) for j in range(len(sub))})
                if sub_span is None:
                    continue
                covered = []
                for c in ch.occurrences:
                    if c.lam < 3 or c.span == a.span:
                        continue
                    part = {("old", i) for i in range(c.start, c.end)
                            if not (a.start <= i < a.end)}
                    covered += [o.span for o in _containing(new, _survivors(tags, part))]
                if _union_covers(covered, sub_span):
                    continue
                part = {("old", i) for i in range(span[0], span[1])
                        if not (a.start <= i < a.end)}
                for img in _containing(new, _survivors(tags, part)):
                    if img.lam >= tau:
                        return True
                    count += 1
                    if count > state_cap:
                        raise OracleCapExceeded("exhaustive virtual search exceeded its cap")
                    if walk(V, img.span, depth - 1):
                        return True
        return False

    if walk(chart.host, b.span, depth_cap):
        return Tri.YES
    # a finite family with every sequence walked out before the cap
    return Tri.NO if complete and not cut else Tri.UNDECIDED


def _union_covers(spans, target) -> bool:
    lo, hi = target
    pos = lo
    for s, e in sorted(spans):
        if s > pos:
            return False
        pos = max(pos, e)
        if pos >= hi:
            return True
    return pos >= hi
