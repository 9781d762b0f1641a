"""Multi-turns, the <_f order, greedy reduction and membership certificates."""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field

from .chart import (MaxOccurrence, UndecidedVirtual, _slack, annotate,
                    apply_replacement, compute_chart, f_char, images_in)
from .polynomials import Field, Polynomial, format_polynomial, parse_polynomial
from .relations import ExplicitFamily, RelationSystem, Tri, additive_closure_step
from .words import Alphabet, Word, concat_many, deglex_key, format_word, parse_word


@dataclass(frozen=True)
class Layout:
    left: Word
    relation: Polynomial
    right: Word
    pivot: Word | None = None

    def expansion(self) -> Polynomial:
        return self.relation.shift(self.left, self.right)


def _split(U: Word, target: MaxOccurrence) -> tuple[Word, Word]:
    if U[target.start:target.end] != target.word:
        raise ValueError("target is not an occurrence of the host")
    return U[:target.start], U[target.end:]


def layout_of(U: Word, target: MaxOccurrence, relation: Polynomial) -> Layout:
    if target.word not in relation:
        raise ValueError("pivot is not a term of the relation")
    L, R = _split(U, target)
    return Layout(L, relation, R, target.word)


def multi_turn(U: Word, target: MaxOccurrence, relation: Polynomial,
               sys: RelationSystem | None = None) -> Polynomial:
    lay = layout_of(U, target, relation)
    f = relation.field
    alpha = relation.coeff(target.word)
    out = Polynomial(f)
    for w in relation.sorted_words():
        if w == target.word:
            continue
        c = f.neg(f.div(relation.coeff(w), alpha))
        out = out + Polynomial.monomial(f, concat_many(lay.left, w, lay.right), c)
    return out


# ------------------------------------------------------------------ order
def representative(U: Word, sys: RelationSystem) -> Word:
    """Fixpoint of replacing virtual-member slots by (Lambda, deglex)-smaller
    incident monomials that keep the slot a virtual member and keep f."""
    cache = sys.cache.setdefault("rep", {})
    if U in cache:
        return cache[U]
    f0 = f_char(U, sys)
    cur = U
    floor = sys.tau - 2 - 2 * sys.family.piece_measure_bound
    for _ in range(sys.caps.rep_iterations):
        ch = annotate(compute_chart(cur, sys), sys)
        moved = False
        for a in ch.occurrences:
            if a.virtual is not Tri.YES:
                continue
            mine = (a.lam, deglex_key(a.word))
            cands = [c for c in sys.family.incident(a.word, len(a.word) + _slack(sys))
                     if c and sys.lambda_(c) >= floor
                     and (sys.lambda_(c), deglex_key(c)) < mine]
            cands.sort(key=lambda c: (sys.lambda_(c), deglex_key(c)))
            for c in cands[: sys.caps.rep_candidates]:
                applied = apply_replacement(cur, a.start, a.end, c)
                if len(applied.word) != len(cur) - len(a.word) + len(c):
                    continue  # cancellation changes the layout
                Z = applied.word
                try:
                    if f_char(Z, sys) != f0:
                        continue
                except UndecidedVirtual:
                    continue
                new = annotate(compute_chart(Z, sys), sys)
                if any(o.virtual is Tri.YES for o in images_in(new, applied.sub_span)):
                    cur = Z
                    moved = True
                    break
            if moved:
                break
        if not moved:
            break
    cache[U] = cur
    return cur


def order_key(U: Word, sys: RelationSystem) -> tuple:
    cache = sys.cache.setdefault("okey", {})
    if U in cache:
        return cache[U]
    f = f_char(U, sys)
    rep = representative(U, sys)
    ch = annotate(compute_chart(U, sys), sys)
    slots = tuple((o.lam, deglex_key(o.word)) for o in ch.occurrences
                  if o.virtual is Tri.YES)
    key = (f.nu, f.v, deglex_key(rep), slots, deglex_key(U))
    cache[U] = key
    return key


def compare_f(u: Word, v: Word, sys: RelationSystem) -> int:
    """-1, 0 or 1 as u <_f v, u = v, u >_f v."""
    if u == v:
        return 0
    ku, kv = order_key(u, sys), order_key(v, sys)
    return -1 if ku < kv else 1


def highest_term(p: Polynomial, sys: RelationSystem) -> Word:
    return max(p.terms, key=lambda w: order_key(w, sys))


# ----------------------------------------------------------------- greedy
@dataclass
class Certificate:
    steps: list = dc_field(default_factory=list)  # (coefficient, Layout)

    def expansion(self, field: Field) -> Polynomial:
        total = Polynomial(field)
        for c, lay in self.steps:
            total = total + lay.expansion().scale(c)
        return total

    def format(self, alphabet: Alphabet, field: Field) -> str:
        lines = [f"# field {field.name}"]
        for c, lay in self.steps:
            lines.append(f"{field.format(c)} * {format_word(lay.left, alphabet)} * "
                         f"rel{{{format_polynomial(lay.relation, alphabet)}}} * "
                         f"{format_word(lay.right, alphabet)}")
        return "".join(line + "\n" for line in lines)


_CERT_LINE = re.compile(r"^\s*(\S+)\s*\*\s*(\S+)\s*\*\s*rel\{(.*)\}\s*\*\s*(\S+)\s*$")


def parse_certificate(text: str, alphabet: Alphabet, field: Field) -> Certificate:
    steps = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.lstrip().startswith("#"):
            head = line.lstrip("# ").split()
            if len(head) == 2 and head[0] == "field" and head[1] != field.name:
                raise ValueError(f"certificate is over {head[1]}, system is over {field.name}")
            continue
        m = _CERT_LINE.match(line)
        if not m:
            raise ValueError(f"certificate line {n} is malformed")
        c = field.parse(m.group(1))
        L = parse_word(m.group(2), alphabet)
        rel = parse_polynomial(m.group(3), alphabet, field)
        R = parse_word(m.group(4), alphabet)
        steps.append((c, Layout(L, rel, R)))
    return Certificate(steps)


@dataclass
class Step:
    highest: Word
    layout: Layout
    coefficient: object
    result: Polynomial


@dataclass
class ReductionTrace:
    start: Polynomial
    steps: list = dc_field(default_factory=list)
    outcome: str = "running"  # zero | stuck | stuck-within-bounds | exhausted
    final: Polynomial | None = None
    keys: list = dc_field(default_factory=list)

    @property
    def reached_zero(self) -> bool:
        return self.outcome == "zero"


def _explicit_reducers(sys, a_h, qualifies, limit):
    fam = sys.family
    pool = list(fam.relations_with(a_h, 10 ** 6))
    extra = []
    for i, p in enumerate(pool):
        for q in pool[i + 1:]:
            r = additive_closure_step(sys, p, q)
            if r is not None and not r.is_zero() and a_h in r:
                extra.append(r)
    made = 0
    for r in pool + extra:
        r = r.scale(sys.field.inv(r.coeff(a_h)))
        if all(qualifies(w) for w in r.terms if w != a_h):
            yield r
            made += 1
            if made >= limit:
                return


def step_options(p: Polynomial, sys: RelationSystem, limit: int = 1):
    """(highest term, candidate layouts, proved) for one greedy step.  An
    empty candidate list with proved=True means no virtual member exists."""
    W = highest_term(p, sys)
    kW = order_key(W, sys)
    ch = annotate(compute_chart(W, sys), sys)
    virtuals = [o for o in ch.occurrences if o.virtual is Tri.YES]
    if not virtuals:
        return W, [], True
    out = []
    for a in virtuals:
        L, R = W[:a.start], W[a.end:]

        def qualifies(c, L=L, R=R):
            Z = concat_many(L, c, R)
            try:
                return order_key(Z, sys) < kW
            except UndecidedVirtual:
                return False

        gen = (_explicit_reducers(sys, a.word, qualifies, limit)
               if isinstance(sys.family, ExplicitFamily)
               else sys.family.reducers(sys, a.word, qualifies, limit))
        for rel in gen:
            out.append(Layout(L, rel, R, a.word))
            if len(out) >= limit:
                return W, out, False
    return W, out, False


def greedy_step(p: Polynomial, sys: RelationSystem):
    """(new polynomial, layout) or None when stuck."""
    W, opts, _ = step_options(p, sys, 1)
    if not opts:
        return None
    lay = opts[0]
    gamma = p.coeff(W)
    return p - lay.expansion().scale(gamma), lay


def default_budget(p: Polynomial) -> int:
    n = max(1, sum(len(w) for w in p.terms))
    return 10 * n * n


@dataclass
class Reduction:
    trace: ReductionTrace
    certificate: Certificate | None


def greedy_reduce(p: Polynomial, sys: RelationSystem, max_steps: int | None = None) -> Reduction:
    max_steps = default_budget(p) if max_steps is None else max_steps
    trace = ReductionTrace(p)
    cert = Certificate()
    cur = p
    while True:
        if cur.is_zero():
            trace.outcome, trace.final = "zero", cur
            return Reduction(trace, cert)
        if len(trace.steps) >= max_steps:
            trace.outcome, trace.final = "exhausted", cur
            return Reduction(trace, None)
        W, opts, proved = step_options(cur, sys, 1)
        trace.keys.append(order_key(W, sys))
        if not opts:
            trace.outcome = "stuck" if proved else "stuck-within-bounds"
            trace.final = cur
            return Reduction(trace, None)
        lay = opts[0]
        gamma = cur.coeff(W)
        nxt = cur - lay.expansion().scale(gamma)
        trace.steps.append(Step(W, lay, gamma, nxt))
        cert.steps.append((gamma, lay))
        cur = nxt


def greedy_branches(p: Polynomial, sys: RelationSystem, max_steps: int | None = None,
                    width: int = 3) -> list[Reduction]:
    """Explore every choice of qualifying relation (up to ``width`` per step
    and the configured branch cap); one Reduction per leaf, in branch order."""
    max_steps = default_budget(p) if max_steps is None else max_steps
    leaves: list[Reduction] = []
    stack = [(p, ReductionTrace(p), Certificate())]
    while stack:
        cur, trace, cert = stack.pop()
        if cur.is_zero():
            trace.outcome, trace.final = "zero", cur
            leaves.append(Reduction(trace, cert))
            continue
        if len(trace.steps) >= max_steps:
            trace.outcome, trace.final = "exhausted", cur
            leaves.append(Reduction(trace, None))
            continue
        W, opts, proved = step_options(cur, sys, width)
        key = order_key(W, sys)
        if not opts:
            trace.keys.append(key)
            trace.outcome = "stuck" if proved else "stuck-within-bounds"
            trace.final = cur
            leaves.append(Reduction(trace, None))
            continue
        room = sys.caps.branch_cap - len(leaves) - len(stack)
        opts = opts[: max(1, room)]
        children = []
        for lay in opts:
            gamma = cur.coeff(W)
            nxt = cur - lay.expansion().scale(gamma)
            t2 = ReductionTrace(p, trace.steps + [Step(W, lay, gamma, nxt)],
                                keys=trace.keys + [key])
            c2 = Certificate(cert.steps + [(gamma, lay)])
            children.append((nxt, t2, c2))
        stack.extend(reversed(children))
    return leaves
