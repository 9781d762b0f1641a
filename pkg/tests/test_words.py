import pytest
from hypothesis import given

from scring.words import (ONE, Alphabet, concat, deglex_key, format_word, inverse,
                          is_reduced, occurrences_of, parse_word, power, primitive_root,
                          rotate, split)

from conftest import words

A = Alphabet(["x", "y", "z"])
x, y, z = 1, 2, 3


def w(text):
    return parse_word(text, A)


def test_concat_examples():
    assert concat((x,), (-x,)) == ONE
    assert concat((x, y), (-y, x)) == (x, x)
    assert concat(w("x.y^-1"), ONE) == w("x.y^-1")


def test_inverse_examples():
    assert inverse(ONE) == ONE
    assert inverse(w("x.y^-1")) == w("y.x^-1")


@pytest.mark.parametrize("pattern,host,starts", [
    ("x", "x.x.x", [0, 1, 2]),
    ("x.y", "y.x", []),
    ("x.y.x", "x.y.x.y.x", [0, 2]),
])
def test_occurrences_examples(pattern, host, starts):
    assert [o.start for o in occurrences_of(w(pattern), w(host))] == starts


def test_split_examples():
    assert split(w("x.y"), 0) == (ONE, w("x.y"))
    assert split(w("x.y"), 2) == (w("x.y"), ONE)
    assert split(w("x.y.z"), 1) == (w("x"), w("y.z"))
    with pytest.raises(IndexError):
        split(w("x"), 2)


def test_text_round_trip_and_rejection():
    assert format_word(w("x.y^-1.x"), A) == "x.y^-1.x"
    assert w("1") == ONE
    with pytest.raises(ValueError):
        w("x.x^-1")
    assert parse_word("x.x^-1.y", A, auto_reduce=True) == (y,)
    with pytest.raises(ValueError):
        w("q")


def test_alphabet_rejects_bad_names():
    for names in ([], ["x", "x"], ["1"], ["a.b"], ["a^"]):
        with pytest.raises(ValueError):
            Alphabet(names)


def test_deglex_length_then_letters():
    assert deglex_key(w("x.x")) > deglex_key(w("z"))
    assert deglex_key(w("x")) < deglex_key(w("x^-1")) < deglex_key(w("y"))


def test_power_rotate_root():
    assert power(w("x.y"), 3) == w("x.y.x.y.x.y")
    assert power(w("x.y"), -1) == w("y^-1.x^-1")
    assert rotate(w("x.y.z"), 1) == w("y.z.x")
    assert primitive_root(w("x.y.x.y")) == (w("x.y"), 2)


@given(words(), words(), words())
def test_concat_associative(a, b, c):
    assert concat(concat(a, b), c) == concat(a, concat(b, c))


@given(words())
def test_inverse_cancels(a):
    assert concat(a, inverse(a)) == ONE
    assert concat(inverse(a), a) == ONE
    assert inverse(inverse(a)) == a


@given(words(), words())
def test_results_reduced(a, b):
    assert is_reduced(concat(a, b))
    assert is_reduced(inverse(a))


@given(words(n_gens=2, max_size=4), words(n_gens=2, max_size=14))
def test_occurrences_complete(p, h):
    if not p:
        return
    brute = [i for i in range(len(h) - len(p) + 1) if h[i:i + len(p)] == p]
    assert [o.start for o in occurrences_of(p, h)] == brute
