"""Charts of monomials, coverings, images under replacements and virtual
members."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field

from .relations import RelationSystem, Tri
from .words import ONE, Occurrence, Word, deglex_key


@dataclass
class MaxOccurrence:
    start: int
    length: int
    word: Word
    lam: float
    member: bool
    virtual: Tri = Tri.UNDECIDED

    @property
    def end(self) -> int:
        return self.start + self.length

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def occurrence(self, host: Word) -> Occurrence:
        return Occurrence(host, self.start, self.length)


@dataclass
class Chart:
    host: Word
    occurrences: list[MaxOccurrence]

    def __iter__(self):
        return iter(self.occurrences)

    def __len__(self):
        return len(self.occurrences)

    def find(self, start: int, end: int) -> MaxOccurrence | None:
        for o in self.occurrences:
            if o.start == start and o.end == end:
                return o
        return None

    def index_of(self, occ: MaxOccurrence) -> int:
        for i, o in enumerate(self.occurrences):
            if o.span == occ.span:
                return i
        raise ValueError("occurrence not in chart")


@dataclass(frozen=True)
class FChar:
    nu: int
    v: int

    def __post_init__(self):
        if self.v > self.nu:
            raise ValueError("v(U) cannot exceed nu(U)")

    def key(self) -> tuple:
        return (self.nu, self.v)

    def __lt__(self, other):
        return self.key() < other.key()

    def __le__(self, other):
        return self.key() <= other.key()


class UndecidedVirtual(RuntimeError):
    def __init__(self, host: Word, occ: MaxOccurrence):
        super().__init__(f"virtual membership undecided for occurrence at {occ.start}")
        self.host = host
        self.occurrence = occ


@dataclass
class Replacement:
    host: Word
    target: MaxOccurrence
    substitute: Word
    relation_witness: object = None


# ------------------------------------------------------------------- charts
def compute_chart(U: Word, sys: RelationSystem) -> Chart:
    cache = sys.cache.setdefault("chart", {})
    ch = cache.get(U)
    if ch is None:
        occs = []
        for s, e in sys.family.m_intervals(U):
            lam = sys.span_measure(U, s, e)
            occs.append(MaxOccurrence(s, e - s, U[s:e], lam, lam >= sys.tau))
        ch = Chart(U, occs)
        if len(cache) > 20000:
            cache.clear()
        cache[U] = ch
    return ch


def validate_chart(ch: Chart, sys: RelationSystem) -> None:
    occs = ch.occurrences
    for a, b in zip(occs, occs[1:]):
        if not (a.start < b.start and a.end < b.end):
            raise AssertionError("chart entries are not linearly ordered")
    for o in occs:
        if not sys.is_in_M(o.word):
            raise AssertionError("chart entry outside M")
        if o.member != (o.lam >= sys.tau):
            raise AssertionError("member flag disagrees with the measure")
    for a in occs:
        for b in occs:
            if a is not b and a.start <= b.start and b.end <= a.end:
                raise AssertionError("nested chart entries")


def separated(a: MaxOccurrence, b: MaxOccurrence) -> bool:
    """Neither overlapping nor touching."""
    return a.end < b.start or b.end < a.start


def overlap(a: MaxOccurrence, b: MaxOccurrence) -> tuple[int, int]:
    return max(a.start, b.start), min(a.end, b.end)


def chart_segments(ch: Chart) -> list[list[MaxOccurrence]]:
    """Maximal runs of consecutive non-separated entries."""
    segs: list[list[MaxOccurrence]] = []
    for o in ch.occurrences:
        if segs and not separated(segs[-1][-1], o) and o.start <= segs[-1][-1].end:
            segs[-1].append(o)
        else:
            segs.append([o])
    return segs


def minimal_covering(U: Word, ch: Chart) -> int:
    total = 0
    for seg in chart_segments(ch):
        lo, hi = seg[0].start, max(o.end for o in seg)
        covered = lo
        i = 0
        while covered < hi:
            best = covered
            while i < len(seg) and seg[i].start <= covered:
                best = max(best, seg[i].end)
                i += 1
            if best == covered:  # cannot happen inside a connected run
                raise AssertionError("gap inside a chart segment")
            covered = best
            total += 1
    return total


def fully_covered(ch: Chart) -> list[MaxOccurrence]:
    """Entries contained in the union of the other entries."""
    out = []
    for i, o in enumerate(ch.occurrences):
        others = [p for j, p in enumerate(ch.occurrences) if j != i]
        if _covered(o.span, [p.span for p in others]):
            out.append(o)
    return out


def _covered(span, spans) -> bool:
    lo, hi = span
    if lo >= hi:
        return True
    pos = lo
    for s, e in sorted(spans):
        if s > pos:
            if s >= hi:
                break
            return False
        pos = max(pos, e)
        if pos >= hi:
            return True
    return pos >= hi


# ------------------------------------------------------------- replacements
@dataclass
class Applied:
    word: Word
    left_map: dict  # old index in L -> new index
    right_map: dict  # old index in R (absolute in host) -> new index
    sub_span: tuple[int, int]  # surviving part of the substitute


def apply_replacement(U: Word, start: int, end: int, sub: Word) -> Applied:
    stack: list[tuple[int, tuple]] = []
    items = [(U[i], ("L", i)) for i in range(start)] + \
        [(a, ("S", j)) for j, a in enumerate(sub)] + \
        [(U[i], ("R", i)) for i in range(end, len(U))]
    for a, tag in items:
        if stack and stack[-1][0] == -a:
            stack.pop()
        else:
            stack.append((a, tag))
    word = tuple(a for a, _ in stack)
    left, right, sub_pos = {}, {}, []
    for k, (_, tag) in enumerate(stack):
        if tag[0] == "L":
            left[tag[1]] = k
        elif tag[0] == "R":
            right[tag[1]] = k
        else:
            sub_pos.append(k)
    span = (sub_pos[0], sub_pos[-1] + 1) if sub_pos else (len(left), len(left))
    return Applied(word, left, right, span)


def _hat(applied: Applied, target: MaxOccurrence, b: MaxOccurrence):
    """New-coordinate span of the surviving part of b outside the target."""
    if b.span == target.span:
        s, e = applied.sub_span
        return (s, e) if e > s else None
    if b.start < target.start:
        idx = [applied.left_map[i] for i in range(b.start, min(b.end, target.start))
               if i in applied.left_map]
    else:
        idx = [applied.right_map[i] for i in range(max(b.start, target.end), b.end)
               if i in applied.right_map]
    if not idx:
        return None
    return (min(idx), max(idx) + 1)


def images_in(ch_new: Chart, hat) -> list[MaxOccurrence]:
    if hat is None:
        return []
    s, e = hat
    return [o for o in ch_new.occurrences if o.start <= s and e <= o.end]


def images_of(rep: Replacement, b: MaxOccurrence, sys: RelationSystem) -> list[MaxOccurrence]:
    t = rep.target
    if rep.host[t.start:t.end] != t.word:
        raise ValueError("malformed replacement: target does not match the host")
    if b.span == t.span and not rep.substitute:
        return []
    applied = apply_replacement(rep.host, t.start, t.end, rep.substitute)
    return images_in(compute_chart(applied.word, sys), _hat(applied, t, b))


def longmo(ch: Chart) -> list[MaxOccurrence]:
    return [o for o in ch.occurrences if o.lam >= 3]


def is_admissible(rep: Replacement, sys: RelationSystem) -> bool:
    t = rep.target
    if t.lam < sys.tau - 2 or not rep.substitute:
        return False
    ch = compute_chart(rep.host, sys)
    applied = apply_replacement(rep.host, t.start, t.end, rep.substitute)
    return _admissible_applied(ch, t, applied, sys)


def _admissible_applied(ch: Chart, t: MaxOccurrence, applied: Applied, sys) -> bool:
    s, e = applied.sub_span
    if e <= s:
        return False
    new = compute_chart(applied.word, sys)
    spans = []
    for c in longmo(ch):
        if c.span == t.span:
            continue
        spans += [o.span for o in images_in(new, _hat(applied, t, c))]
    return not _covered((s, e), spans)


# --------------------------------------------------------------- neighbours
def left_neighbours(b: MaxOccurrence, ch: Chart) -> list[MaxOccurrence]:
    return [c for c in ch.occurrences if c.start < b.start and not separated(c, b)]


def right_neighbours(b: MaxOccurrence, ch: Chart) -> list[MaxOccurrence]:
    return [c for c in ch.occurrences if c.start > b.start and not separated(c, b)]


def neighbour_subwords(b: MaxOccurrence, ch: Chart, sys: RelationSystem):
    """(t(b), i(b), m(b)) as occurrences in the host."""
    if b.lam < 3:
        raise ValueError("neighbour subwords need measure at least 3")
    U = ch.host
    hi = sys.tau - 3
    lefts = [c for c in left_neighbours(b, ch) if c.lam >= hi]
    rights = [c for c in right_neighbours(b, ch) if c.lam >= hi]
    t_start = max([c.end for c in lefts], default=b.start)
    t_start = max(t_start, b.start)
    i_end = min([c.start for c in rights], default=b.end)
    i_end = min(i_end, b.end)
    t = Occurrence(U, t_start, b.end - t_start)
    i = Occurrence(U, b.start, i_end - b.start)
    m_s, m_e = t_start, max(t_start, i_end)
    m = Occurrence(U, m_s, m_e - m_s)
    return t, i, m


# ---------------------------------------------------------- virtual members
def _search(U: Word, b: MaxOccurrence, sys: RelationSystem, depth: int,
            candidates: int, states: int, strict: bool) -> Tri:
    """Breadth-first search over (b, U)-admissible sequences."""
    tau = sys.tau
    queue = deque([(U, b.span, 0)])
    seen = {(U, b.span)}
    explored = 0
    truncated = not sys.family.incident_complete
    while queue:
        W, span, k = queue.popleft()
        if k >= depth:
            truncated = True
            continue
        ch = compute_chart(W, sys)
        cur = ch.find(*span)
        for a in ch.occurrences:
            if a.span == span or a.lam < tau - 2:
                continue
            subs = [s for s in sys.family.incident(a.word, len(a.word) + _slack(sys)) if s]
            subs.sort(key=lambda s: (sys.lambda_(s), len(s), deglex_key(s)))
            if len(subs) > candidates:
                truncated = True
            for sub in subs[:candidates]:
                applied = apply_replacement(W, a.start, a.end, sub)
                if not _admissible_applied(ch, a, applied, sys):
                    continue
                new = compute_chart(applied.word, sys)
                for img in images_in(new, _hat(applied, a, cur)):
                    if img.lam >= tau:
                        return Tri.YES
                    key = (applied.word, img.span)
                    if key in seen:
                        continue
                    seen.add(key)
                    explored += 1
                    if explored > states:
                        if strict:
                            raise OracleCapExceeded("virtual search state cap exceeded")
                        return Tri.UNDECIDED
                    queue.append((applied.word, img.span, k + 1))
    # every admissible sequence was enumerated and none promotes b
    return Tri.UNDECIDED if truncated else Tri.NO


class OracleCapExceeded(RuntimeError):
    pass


def _slack(sys) -> int:
    if sys.family.incident_complete:
        return 10 ** 9
    g = getattr(sys.family, "graph", None)
    return max(len(l) for l in g.loops) if g is not None else 0


def decide_virtual(b: MaxOccurrence, ch: Chart, sys: RelationSystem,
                   depth: int | None = None) -> Tri:
    tau = sys.tau
    if b.lam >= tau:
        return Tri.YES
    if b.lam < tau - 2:
        return Tri.NO
    _, _, m = neighbour_subwords(b, ch, sys)
    lam_m = sys.span_measure(ch.host, m.start, m.end)
    if lam_m < tau - 2:
        return Tri.NO
    # an image is p m(b) s with p, s small pieces, and a side without a
    # long neighbour keeps its end fixed
    hi = tau - 3
    sides = int(any(c.lam >= hi for c in left_neighbours(b, ch))) + \
        int(any(c.lam >= hi for c in right_neighbours(b, ch)))
    if lam_m + sides * sys.family.piece_measure_bound < tau:
        return Tri.NO
    bound_fn = getattr(sys.family, "extension_bound", None)
    if bound_fn is not None and m.length:
        left = any(c.lam >= hi for c in left_neighbours(b, ch))
        right = any(c.lam >= hi for c in right_neighbours(b, ch))
        ub = bound_fn(sys, m.word, left, right)
        if ub is not None and ub < tau:
            return Tri.NO
    depth = sys.caps.virtual_depth if depth is None else depth
    return _search(ch.host, b, sys, depth, sys.caps.virtual_candidates,
                   sys.caps.virtual_states, strict=False)


def annotate(ch: Chart, sys: RelationSystem, depth: int | None = None) -> Chart:
    cache = sys.cache.setdefault("virtual", {})
    for o in ch.occurrences:
        key = (ch.host, o.span, depth)
        if key not in cache:
            cache[key] = decide_virtual(o, ch, sys, depth)
        o.virtual = cache[key]
    return ch


def f_char(U: Word, sys: RelationSystem, depth: int | None = None) -> FChar:
    cache = sys.cache.setdefault("fchar", {})
    key = (U, depth)
    if key in cache:
        got = cache[key]
        if isinstance(got, UndecidedVirtual):
            raise got
        return got
    ch = annotate(compute_chart(U, sys), sys, depth)
    for o in ch.occurrences:
        if o.virtual is Tri.UNDECIDED:
            err = UndecidedVirtual(U, o)
            cache[key] = err
            raise err
    f = FChar(minimal_covering(U, ch), sum(o.virtual is Tri.YES for o in ch.occurrences))
    cache[key] = f
    return f


def virtual_members(U: Word, sys: RelationSystem) -> list[MaxOccurrence]:
    ch = annotate(compute_chart(U, sys), sys)
    return [o for o in ch.occurrences if o.virtual is Tri.YES]


# ---------------------------------------------------------------- filtration
def filtration_index(f: FChar | tuple) -> int:
    r, s = (f.nu, f.v) if isinstance(f, FChar) else f
    if s > r or r < 0 or s < 0:
        raise ValueError("need 0 <= v <= nu")
    return r * (r + 1) // 2 + s


def filtration_pair(n: int) -> tuple[int, int]:
    """t(n) by unrolling the recurrence."""
    r, s = 0, 0
    for _ in range(n):
        r, s = (r, s + 1) if r > s else (r + 1, 0)
    return r, s


# --------------------------------------------------------- derived monomials
@dataclass
class DerivedSet:
    items: dict  # word -> FChar or None when undecidable
    truncated: bool
    trace: list = dc_field(default_factory=list)  # (parent, child, sub was virtual)


def derived_monomials(U: Word, sys: RelationSystem, max_len: int | None = None,
                      max_size: int = 200, per_slot: int = 6) -> DerivedSet:
    max_len = len(U) + _slack(sys) if max_len is None else max_len

    def fc(W):
        try:
            return f_char(W, sys)
        except UndecidedVirtual:
            return None

    items = {U: fc(U)}
    trace = []
    queue = deque([U])
    truncated = False
    while queue:
        W = queue.popleft()
        ch = annotate(compute_chart(W, sys), sys)
        for a in ch.occurrences:
            if a.virtual is not Tri.YES:
                continue
            subs = sys.family.incident(a.word, len(a.word) + _slack(sys))
            subs = sorted(subs, key=lambda s: (sys.lambda_(s), len(s), deglex_key(s)))
            if ONE not in subs:
                subs = [ONE] + subs
            for sub in subs[:per_slot]:
                applied = apply_replacement(W, a.start, a.end, sub)
                Z = applied.word
                if len(Z) > max_len:
                    truncated = True
                    continue
                new = compute_chart(Z, sys)
                sub_virtual = False
                if sub:
                    annotate(new, sys)
                    sub_virtual = any(o.virtual is Tri.YES
                                      for o in images_in(new, applied.sub_span))
                trace.append((W, Z, sub_virtual))
                if Z in items:
                    continue
                if len(items) >= max_size:
                    truncated = True
                    continue
                items[Z] = fc(Z)
                queue.append(Z)
    return DerivedSet(items, truncated, trace)
