import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from scring.chart import (FChar, Replacement, apply_replacement, compute_chart,
                          decide_virtual, derived_monomials, f_char, filtration_index,
                          filtration_pair, fully_covered, images_of, is_admissible,
                          minimal_covering, neighbour_subwords, overlap, validate_chart)
from scring.oracle import exhaustive_virtual
from scring.relations import Tri
from scring.words import concat

from conftest import explicit_system, glued, promotion_gadget


def brute_chart(U, sys):
    """Maximal M-intervals by walking every start in the graph letter by letter."""
    g = sys.family.graph
    spans = []
    for i in range(len(U)):
        alive = set(range(g.n_vertices))
        j = i
        while j < len(U) and alive:
            alive = {g.succ[v][U[j]] for v in alive if U[j] in g.succ[v]}
            if alive:
                j += 1
        spans.append((i, j))
    spans = [s for s in spans if s[1] > s[0]]
    return sorted(s for s in set(spans)
                  if not any(t != s and t[0] <= s[0] and s[1] <= t[1] for t in spans))


def brute_cover(ch):
    occ = [o.span for o in ch.occurrences]
    if not occ:
        return 0
    union = set().union(*(range(s, e) for s, e in occ))
    for k in range(1, len(occ) + 1):
        for sub in itertools.combinations(occ, k):
            if set().union(*(range(s, e) for s, e in sub)) == union:
                return k


def brute_f(U, sys):
    ch = compute_chart(U, sys)
    flags = [exhaustive_virtual(o, ch, sys) for o in ch.occurrences]
    assert Tri.UNDECIDED not in flags
    return FChar(brute_cover(ch), flags.count(Tri.YES))


@pytest.fixture(scope="module")
def vwv(tri):
    v, w = tri.names["v"], tri.names["w"]
    return v + w + v


# ------------------------------------------------------------------ charts
def test_chart_of_single_term(group, tri):
    for s, word in ((group, group.names["R"]), (tri, tri.names["v"])):
        ch = compute_chart(word, s)
        assert [o.span for o in ch.occurrences] == [(0, len(word))]
        assert ch.occurrences[0].member == (s.lambda_(word) >= s.tau)
    gs, U, span = promotion_gadget(9, True, False)
    c = U[:9]
    ch = compute_chart(c, gs)
    assert [o.span for o in ch.occurrences] == [(0, 9)] and not ch.occurrences[0].member


def test_empty_chart():
    s = explicit_system(["1*x.x - 1*y.y"], ["x", "y", "z"], declared=False)
    assert compute_chart((3, 3), s).occurrences == []


def test_vwv_chart_matches_brute_force(tri, vwv):
    ch = compute_chart(vwv, tri)
    validate_chart(ch, tri)
    assert [o.span for o in ch.occurrences] == brute_chart(vwv, tri)
    for a, b in zip(ch.occurrences, ch.occurrences[1:]):
        s, e = overlap(a, b)
        assert tri.is_small_piece(vwv[s:e])


def test_minimal_covering_examples(group):
    s = explicit_system(["1*x1.x2.x3.x4 - 1*y1", "1*x3.x4.x5.x6 - 1*y2",
                         "1*x5.x6.x7.x8 - 1*y3"],
                        [f"x{i}" for i in range(1, 9)] + ["y1", "y2", "y3"], declared=False)
    U = tuple(range(1, 9))
    ch = compute_chart(U, s)
    assert [o.span for o in ch.occurrences] == [(0, 4), (2, 6), (4, 8)]
    assert [o.span for o in fully_covered(ch)] == [(2, 6)]
    assert minimal_covering(U, ch) == brute_cover(ch) == 2
    assert minimal_covering((), compute_chart((), group)) == 0
    R = group.names["R"]
    assert minimal_covering(R, compute_chart(R, group)) == 1


# ------------------------------------------------------------- replacements
def test_images_of_separated_unchanged():
    s, U, span = promotion_gadget(9, True, False)
    z = (s.alphabet.letter("f3"), s.alphabet.letter("f5"))   # blocks any merge
    W = U[:9] + z + U[9:]
    ch = compute_chart(W, s)
    c = ch.find(0, 9)
    b = [o for o in ch.occurrences if o.word == U[9:]][0]
    assert b.start > c.end
    sub = tuple(s.alphabet.letter(n) for n in ["d0", "d1", "d2", "d3", "d4", "d5", "d6", "d7", "p"])
    imgs = images_of(Replacement(W, c, sub), b, s)
    assert len(imgs) == 1 and imgs[0].word == b.word


def test_images_of_cancelled_region():
    s = explicit_system(["1*t0.t1.t2.t3.t4.t5.t6.t7.t8 - 1*k", "1*u0.u1 - 1*k"],
                        [f"t{i}" for i in range(9)] + ["u0", "u1", "k"])
    a = s.alphabet
    u = (a.letter("u0"), a.letter("u1"))
    t = tuple(a.letter(f"t{i}") for i in range(9))
    U = u + t + (-u[1], -u[0])
    ch = compute_chart(U, s)
    target = ch.find(2, 11)
    b = ch.find(0, 2)
    assert apply_replacement(U, 2, 11, ()).word == ()
    assert images_of(Replacement(U, target, ()), b, s) == []
    assert images_of(Replacement(U, target, ()), target, s) == []


def test_single_image_by_rebuild():
    s, U, span = promotion_gadget(9, True, False)
    ch = compute_chart(U, s)
    c, b = ch.find(0, 9), ch.find(*span)
    sub = s.family.incident(c.word, 9)[0]
    imgs = images_of(Replacement(U, c, sub), b, s)
    rebuilt = concat(sub, U[9:])
    spans = [o.span for o in compute_chart(rebuilt, s).occurrences]
    assert len(imgs) == 1
    assert imgs[0].span in spans
    assert imgs[0].word[-9:] == b.word   # the surviving part of b sits inside the image
    assert imgs[0].lam == 10


def test_admissible_thresholds():
    s = explicit_system(["1*g0.g1.g2.g3.g4.g5.g6 - 1*h"], [f"g{i}" for i in range(7)] + ["h"])
    U = tuple(range(1, 8))
    ch = compute_chart(U, s)
    t = ch.occurrences[0]
    assert t.lam == s.tau - 3
    assert not is_admissible(Replacement(U, t, (8,)), s)
    gs, GU, span = promotion_gadget(9, True, False)
    gch = compute_chart(GU, gs)
    assert not is_admissible(Replacement(GU, gch.find(0, 9), ()), gs)
    sub = gs.family.incident(GU[:9], 9)[0]
    assert is_admissible(Replacement(GU, gch.find(0, 9), sub), gs)


def test_covered_substitute_not_admissible():
    names = [f"a{i}" for i in range(9)] + ["l0", "l1", "l2", "l3", "r0", "r1", "r2", "r3",
                                          "k0", "k1"]
    s = explicit_system(["1*a0.a1.a2.a3.a4.a5.a6.a7.a8 - 1*k0.k1",
                         "1*l0.l1.l2.l3.k0 - 1*r0", "1*k1.r0.r1.r2.r3 - 1*l0"], names)
    a = s.alphabet
    L = tuple(a.letter(n) for n in ["l0", "l1", "l2", "l3"])
    A = tuple(a.letter(f"a{i}") for i in range(9))
    R = tuple(a.letter(n) for n in ["r0", "r1", "r2", "r3"])
    U = L + A + R
    ch = compute_chart(U, s)
    target = ch.find(4, 13)
    sub = (a.letter("k0"), a.letter("k1"))
    rep = Replacement(U, target, sub)
    left_img = images_of(rep, ch.find(0, 4), s)
    right_img = images_of(rep, ch.find(13, 17), s)
    covered = set()
    for o in left_img + right_img:
        covered |= set(range(o.start, o.end))
    assert {4, 5} <= covered            # the substitute sits at 4..6 in the new word
    assert not is_admissible(rep, s)


# --------------------------------------------------------------- neighbours
def test_neighbour_subwords_alone():
    s, U, span = promotion_gadget(9, False, True)
    b = compute_chart(U[:9], s).occurrences[0]
    t, i, m = neighbour_subwords(b, compute_chart(U[:9], s), s)
    assert (t.start, t.end) == (i.start, i.end) == (m.start, m.end) == b.span


def test_neighbour_subwords_left_overlap():
    names = [f"c{i}" for i in range(8)] + ["q"] + [f"b{i}" for i in range(9)] + ["k"]
    s = explicit_system(["1*c0.c1.c2.c3.c4.c5.c6.c7.q - 1*k",
                         "1*q.b0.b1.b2.b3.b4.b5.b6.b7.b8 - 1*k"], names)
    U = tuple(range(1, 19))
    ch = compute_chart(U, s)
    c, b = ch.find(0, 9), ch.find(8, 18)
    assert c.lam >= s.tau - 3
    t, i, m = neighbour_subwords(b, ch, s)
    assert t.start == c.end == 9
    assert (i.start, i.end) == b.span
    assert (m.start, m.end) == (9, 18)


def test_neighbour_subwords_vwv(tri, vwv):
    ch = compute_chart(vwv, tri)
    hi = tri.tau - 3
    for b in ch.occurrences:
        if b.lam < 3:
            continue
        t, i, m = neighbour_subwords(b, ch, tri)
        lefts = [c.end for c in ch.occurrences
                 if c.start < b.start and c.end >= b.start and c.lam >= hi]
        rights = [c.start for c in ch.occurrences
                  if c.start > b.start and c.start <= b.end and c.lam >= hi]
        assert t.start == max(lefts + [b.start])
        assert i.end == min(rights + [b.end])
        assert (m.start, m.end) == (t.start, max(t.start, i.end))


# ---------------------------------------------------------- virtual members
def test_decide_virtual_thresholds(group):
    R = group.names["R"]
    ch = compute_chart(R, group)
    assert decide_virtual(ch.occurrences[0], ch, group) is Tri.YES
    s = explicit_system(["1*g0.g1.g2.g3.g4.g5.g6 - 1*h"], [f"g{i}" for i in range(7)] + ["h"])
    U = tuple(range(1, 8))
    ch = compute_chart(U, s)
    assert ch.occurrences[0].lam == s.tau - 3
    assert decide_virtual(ch.occurrences[0], ch, s) is Tri.NO


def test_decide_virtual_promotion():
    s, U, span = promotion_gadget(9, True, False)
    ch = compute_chart(U, s)
    b = ch.find(*span)
    assert b.lam == s.tau - 1
    assert decide_virtual(b, ch, s, depth=1) is Tri.YES
    assert exhaustive_virtual(b, ch, s, depth_cap=1) is Tri.YES


def test_decide_virtual_two_sided_promotion():
    # one replacement adds at most one piece, so tau - 2 needs both sides
    s, U, span = promotion_gadget(8, True, True)
    ch = compute_chart(U, s)
    b = ch.find(*span)
    assert b.lam == s.tau - 2
    assert decide_virtual(b, ch, s, depth=1) is Tri.UNDECIDED
    assert decide_virtual(b, ch, s, depth=2) is Tri.YES
    assert exhaustive_virtual(b, ch, s, depth_cap=2) is Tri.YES


def test_f_char_examples(group, tri, vwv):
    assert f_char((), group) == FChar(0, 0)
    assert f_char(group.names["R"], group) == FChar(1, 1)
    assert f_char(vwv, tri) == brute_f(vwv, tri)


# --------------------------------------------------------------- filtration
def test_filtration_examples():
    assert filtration_index(FChar(0, 0)) == 0
    assert filtration_index(FChar(1, 0)) == 1
    assert filtration_index(FChar(2, 1)) == 4
    assert [filtration_pair(n) for n in range(5)] == [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1)]
    with pytest.raises(ValueError):
        FChar(1, 2)


def test_filtration_round_trip():
    for n in range(101):
        assert filtration_index(filtration_pair(n)) == n


# --------------------------------------------------------- derived monomials
def test_derived_without_virtual_members(tri):
    x = tri.alphabet.letter("x")
    U = (x,) * 4
    d = derived_monomials(U, tri)
    assert set(d.items) == {U}
    assert set(derived_monomials((), tri).items) == {()}


def test_derived_contains_turn(group):
    R = group.names["R"]
    d = derived_monomials(R, group, max_size=20)
    assert () in d.items
    f0 = d.items[R]
    assert all(f is None or f <= f0 for f in d.items.values())


def test_derived_f_monotone_gadget():
    s, U, span = promotion_gadget(9, True, False)
    d = derived_monomials(U, s)
    f0 = d.items[U]
    assert len(d.items) > 1
    for Z, f in d.items.items():
        assert f is not None and f <= f0


# --------------------------------------------------------------- properties
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["demo-group", "demo-trinomial"]))
def test_chart_structure_random(seed, name):
    from scring.families import demo_system
    s = demo_system(name)
    U = glued(s, random.Random(seed))
    ch = compute_chart(U, s)
    validate_chart(ch, s)
    for a, b in zip(ch.occurrences, ch.occurrences[1:]):
        lo, hi = overlap(a, b)
        if lo < hi:
            assert s.is_small_piece(U[lo:hi])
    for o in fully_covered(ch):
        assert s.variant(measure_mode="standard").lambda_(o.word) <= 2
    assert minimal_covering(U, ch) == brute_cover(ch)
