import random

import pytest
from hypothesis import strategies as st

from scring.families import demo_system
from scring.words import reduce_letters


@pytest.fixture(scope="session")
def group():
    return demo_system("demo-group")


@pytest.fixture(scope="session")
def tri():
    return demo_system("demo-trinomial")


def letters(n_gens):
    gens = list(range(1, n_gens + 1))
    return st.sampled_from(gens + [-g for g in gens])


def words(n_gens=3, max_size=12):
    """Reduced words over n_gens generators."""
    return st.lists(letters(n_gens), max_size=max_size).map(reduce_letters)


def random_word(rng: random.Random, n_gens: int, length: int):
    out = []
    pool = [g for g in range(1, n_gens + 1)] + [-g for g in range(1, n_gens + 1)]
    while len(out) < length:
        a = rng.choice(pool)
        if out and out[-1] == -a:
            continue
        out.append(a)
    return tuple(out)


def glued(sys, rng, parts=(2, 3), lo=20, hi=300):
    """A reduced word made of random M fragments glued end to end."""
    U = ()
    for _ in range(rng.randint(*parts)):
        _, _, w = sys.family.random_path(rng, rng.randint(lo, hi))
        if U and w and U[-1] == -w[0]:
            continue
        U = U + w
    return U


# ---------------------------------------------------------------- gadgets
from scring.polynomials import QQ, parse_polynomial  # noqa: E402
from scring.relations import ExplicitFamily, RelationSystem  # noqa: E402
from scring.words import Alphabet  # noqa: E402


class DeclaredPieces(ExplicitFamily):
    """Explicit family whose small pieces are declared: the single letters of M."""

    def is_small_piece(self, c):
        return len(c) <= 1 and (not c or c in self.subwords)


def explicit_system(texts, names, tau=10, declared=True):
    alpha = Alphabet(names)
    rels = [parse_polynomial(t, alpha, QQ) for t in texts]
    fam = (DeclaredPieces if declared else ExplicitFamily)(rels, QQ)
    return RelationSystem(alpha, QQ, fam, tau)


def promotion_gadget(n_b=8, left=True, right=True):
    """A band occurrence b = b0..b{n_b-1} whose neighbours c (left) and e
    (right) each have an incident monomial that extends b by one letter.

    Returns (system, U, span of b).  With single-letter pieces Lambda is the
    length, so b reaches n_b + left + right after both replacements."""
    bs = [f"b{i}" for i in range(n_b)]
    cs = [f"c{i}" for i in range(9)]
    ds = [f"d{i}" for i in range(8)]
    es = [f"e{i}" for i in range(9)]
    fs = [f"f{i}" for i in range(8)]
    dot = ".".join
    host = (["p"] if left else []) + bs + (["s"] if right else [])
    texts = [f"1*{dot(host)} - 1*{dot(cs[:1] + es[:1])}"]
    if left:
        texts.append(f"1*{dot(cs)} - 1*{dot(ds + ['p'])}")
    if right:
        texts.append(f"1*{dot(es)} - 1*{dot(['s'] + fs)}")
    sys = explicit_system(texts, ["p", "s"] + bs + cs + ds + es + fs)
    a = sys.alphabet
    U = (tuple(a.letter(n) for n in cs) if left else ()) + tuple(a.letter(n) for n in bs) + \
        (tuple(a.letter(n) for n in es) if right else ())
    start = 9 if left else 0
    return sys, U, (start, start + n_b)


# ------------------------------------------------------- acceptance report
ACCEPTANCE: dict = {}


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
