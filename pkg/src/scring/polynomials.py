"""Exact coefficient fields and polynomials over the group algebra."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .words import (ONE, Alphabet, Word, concat, deglex_key, format_word, inverse,
                    is_reduced, parse_word, reduce_letters)


class Field:
    """Either GF(2) or the rationals.  Elements are ints (GF(2)) or Fractions."""

    def __init__(self, name: str):
        if name not in ("gf2", "rational"):
            raise ValueError(f"unsupported field {name!r}")
        self.name = name

    def __repr__(self):
        return f"Field({self.name!r})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.name == self.name

    def __hash__(self):
        return hash(self.name)

    @property
    def is_gf2(self) -> bool:
        return self.name == "gf2"

    def coerce(self, x):
        if self.is_gf2:
            if isinstance(x, Fraction):
                if x.denominator % 2 == 0:
                    raise ValueError(f"{x} has no image in GF(2)")
                x = x.numerator
            return int(x) % 2
        return Fraction(x)

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def add(self, a, b):
        return (a + b) % 2 if self.is_gf2 else a + b

    def neg(self, a):
        return a % 2 if self.is_gf2 else -a

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        return (a * b) % 2 if self.is_gf2 else a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 if self.is_gf2 else 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def nonzero_elements(self, limit: int = 5) -> list:
        if self.is_gf2:
            return [1]
        base = [Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-3, 5)]
        return base[:limit]

    def parse(self, text: str):
        text = text.strip()
        if not re.fullmatch(r"-?\d+(/\d+)?", text):
            raise ValueError(f"bad coefficient {text!r}")
        return self.coerce(Fraction(text))

    def format(self, a) -> str:
        if self.is_gf2:
            return str(int(a))
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"


GF2 = Field("gf2")
QQ = Field("rational")


class Polynomial:
    """Finite sum of reduced words with nonzero coefficients."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms: Mapping[Word, object] | Iterable = ()):
        self.field = field
        self.terms: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            self._add_term(tuple(w), field.coerce(c))

    def _add_term(self, w: Word, c) -> None:
        new = self.field.add(self.terms.get(w, self.field.zero()), c)
        if new == 0:
            self.terms.pop(w, None)
        else:
            self.terms[w] = new

    @classmethod
    def monomial(cls, field: Field, w: Word, c=1) -> "Polynomial":
        return cls(field, {w: c})

    def copy(self) -> "Polynomial":
        p = Polynomial(self.field)
        p.terms = dict(self.terms)
        return p

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.sorted_words())

    def __contains__(self, w) -> bool:
        return w in self.terms

    def coeff(self, w: Word):
        return self.terms.get(w, self.field.zero())

    def sorted_words(self) -> list[Word]:
        return sorted(self.terms, key=deglex_key, reverse=True)

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.field == other.field
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = self.copy()
        for w, c in other.terms.items():
            out._add_term(w, c)
        return out

    def __neg__(self) -> "Polynomial":
        return self.scale(self.field.neg(self.field.one()))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        c = self.field.coerce(c)
        out = Polynomial(self.field)
        if c == 0:
            return out
        out.terms = {w: self.field.mul(a, c) for w, a in self.terms.items()}
        return out

    def shift(self, left: Word = ONE, right: Word = ONE) -> "Polynomial":
        """left·p·right with cancellation in every monomial."""
        out = Polynomial(self.field)
        for w, c in self.terms.items():
            out._add_term(concat(concat(left, w), right), c)
        return out

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = Polynomial(self.field)
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                out._add_term(concat(a, b), self.field.mul(c, d))
        return out

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def format(self, alphabet: Alphabet) -> str:
        return format_polynomial(self, alphabet)

    def __repr__(self):
        return f"Polynomial({self.field.name}, {self.terms!r})"


_TERM = re.compile(r"\s*([+-]?)\s*([^*\s]+)\s*\*\s*([^\s+]+|1)\s*")


def parse_polynomial(text: str, alphabet: Alphabet, field: Field,
                     auto_reduce: bool = False,
                     names: Mapping[str, Word] | None = None) -> Polynomial:
    """Parse ``<coeff>*<word> [(+|-) <coeff>*<word>]...``.

    ``names`` optionally maps symbolic names (for instance ``R``) to words; a
    word token may then use them as dot-separated factors.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    if text == "0":
        return Polynomial(field)
    pos = 0
    out = Polynomial(field)
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        sign, coeff_text, word_text = m.groups()
        if not first and not sign:
            raise ValueError(f"missing '+' or '-' near {text[pos:]!r}")
        coeff = field.parse(coeff_text)
        if sign == "-":
            coeff = field.neg(coeff)
        word = _parse_word_with_names(word_text, alphabet, auto_reduce, names)
        out._add_term(word, coeff)
        pos = m.end()
        first = False
    return out


def _parse_word_with_names(text, alphabet, auto_reduce, names):
    if not names:
        return parse_word(text, alphabet, auto_reduce)
    letters = []
    symbolic = False
    for token in text.split("."):
        base, inv = (token[:-3], True) if token.endswith("^-1") else (token, False)
        if base in names and base not in alphabet.index:
            w = names[base]
            letters.extend(inverse(w) if inv else w)
            symbolic = True
        elif token != "1":
            letters.extend(parse_word(token, alphabet))
    if not is_reduced(letters):
        # products of named words reduce freely at the junctions
        if not (auto_reduce or symbolic):
            raise ValueError(f"word {text!r} is not reduced")
        return reduce_letters(letters)
    return tuple(letters)


def format_polynomial(p: Polynomial, alphabet: Alphabet) -> str:
    if p.is_zero():
        return "0"
    field = p.field
    parts = []
    for i, w in enumerate(p.sorted_words()):
        c = p.terms[w]
        text = field.format(c)
        if i == 0:
            parts.append(f"{text}*{format_word(w, alphabet)}")
        elif text.startswith("-"):
            parts.append(f" - {text[1:]}*{format_word(w, alphabet)}")
        else:
            parts.append(f" + {text}*{format_word(w, alphabet)}")
    return "".join(parts)
