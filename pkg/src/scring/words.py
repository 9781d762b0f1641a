"""Reduced words in a free group.

A letter is a nonzero int: generator index ``g`` is stored as ``g + 1`` and
its inverse as ``-(g + 1)``.  A word is a tuple of letters with no adjacent
inverse pair; the empty tuple is the monomial 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

Word = tuple
ONE: Word = ()


class Letter(NamedTuple):
    generator: int
    sign: int

    def encode(self) -> int:
        return (self.generator + 1) * self.sign


def decode(letter: int) -> Letter:
    return Letter(abs(letter) - 1, 1 if letter > 0 else -1)


class Alphabet:
    """Ordered generator names."""

    def __init__(self, names: Sequence[str]):
        names = list(names)
        if not names:
            raise ValueError("alphabet needs at least one generator")
        for name in names:
            if not name or any(ch.isspace() for ch in name) or "^" in name or "." in name:
                raise ValueError(f"invalid generator name {name!r}")
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        if "1" in names:
            raise ValueError("'1' is reserved for the empty word")
        self.names = tuple(names)
        self.index = {name: i for i, name in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Alphabet({list(self.names)!r})"

    def letters(self) -> list[int]:
        out = []
        for g in range(len(self.names)):
            out += [g + 1, -(g + 1)]
        return out

    def letter(self, name: str, sign: int = 1) -> int:
        return (self.index[name] + 1) * sign

    def word(self, text: str, auto_reduce: bool = False) -> Word:
        return parse_word(text, self, auto_reduce)

    def format(self, w: Word) -> str:
        return format_word(w, self)


def is_reduced(w: Sequence[int]) -> bool:
    for a, b in zip(w, w[1:]):
        if a == -b:
            return False
    return all(isinstance(a, int) and a != 0 for a in w)


def reduce_letters(letters: Iterable[int]) -> Word:
    out: list[int] = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def cancellation_length(a: Word, b: Word) -> int:
    """Number of letters of ``a`` cancelled against ``b`` in a·b."""
    k = 0
    n = min(len(a), len(b))
    while k < n and a[len(a) - 1 - k] == -b[k]:
        k += 1
    return k


def concat(a: Word, b: Word) -> Word:
    k = cancellation_length(a, b)
    return a[:len(a) - k] + b[k:]


def concat_many(*words: Word) -> Word:
    out = ONE
    for w in words:
        out = concat(out, w)
    return out


def inverse(a: Word) -> Word:
    return tuple(-x for x in reversed(a))


def split(u: Word, i: int) -> tuple[Word, Word]:
    if not 0 <= i <= len(u):
        raise IndexError(f"split index {i} out of range for length {len(u)}")
    return u[:i], u[i:]


def power(a: Word, n: int) -> Word:
    base = a if n >= 0 else inverse(a)
    out = ONE
    for _ in range(abs(n)):
        out = concat(out, base)
    return out


def rotate(a: Word, k: int) -> Word:
    if not a:
        return a
    k %= len(a)
    return a[k:] + a[:k]


def is_cyclically_reduced(a: Word) -> bool:
    return is_reduced(a) and (len(a) < 2 or a[0] != -a[-1])


def cyclic_shifts(a: Word) -> list[Word]:
    return [rotate(a, k) for k in range(len(a))]


def primitive_root(a: Word) -> tuple[Word, int]:
    """Shortest ``r`` with ``a == r**k``; returns ``(r, k)``."""
    n = len(a)
    for d in range(1, n + 1):
        if n % d == 0 and a[:d] * (n // d) == a:
            return a[:d], n // d
    return a, 1


def is_subword(small: Word, big: Word) -> bool:
    if not small:
        return True
    m = len(small)
    return any(big[i:i + m] == small for i in range(len(big) - m + 1))


def letter_rank(a: int) -> int:
    return 2 * (abs(a) - 1) + (0 if a > 0 else 1)


def deglex_key(w: Word) -> tuple:
    """Length first, then letters by (generator index, sign with + before -)."""
    return (len(w), tuple(letter_rank(a) for a in w))


@dataclass(frozen=True)
class Occurrence:
    host: Word
    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 0 or self.start + self.length > len(self.host):
            raise ValueError("occurrence out of range")

    @property
    def end(self) -> int:
        return self.start + self.length

    @property
    def word(self) -> Word:
        return self.host[self.start:self.end]

    def contains(self, other: "Occurrence") -> bool:
        return self.start <= other.start and other.end <= self.end


def occurrences_of(pattern: Word, host: Word) -> list[Occurrence]:
    if not pattern:
        raise ValueError("empty pattern")
    m = len(pattern)
    return [Occurrence(host, i, m) for i in range(len(host) - m + 1)
            if host[i:i + m] == pattern]


def parse_word(text: str, alphabet: Alphabet, auto_reduce: bool = False) -> Word:
    text = text.strip()
    if text == "1":
        return ONE
    if not text:
        raise ValueError("empty word text; use '1' for the identity")
    letters = []
    for token in text.split("."):
        sign = 1
        name = token
        if token.endswith("^-1"):
            sign = -1
            name = token[:-3]
        if name not in alphabet.index:
            raise ValueError(f"unknown generator {name!r} in {text!r}")
        letters.append(alphabet.letter(name, sign))
    if not is_reduced(letters):
        if not auto_reduce:
            raise ValueError(f"word {text!r} is not reduced")
        return reduce_letters(letters)
    return tuple(letters)


def format_word(w: Word, alphabet: Alphabet) -> str:
    if not w:
        return "1"
    parts = []
    for a in w:
        name = alphabet.names[abs(a) - 1]
        parts.append(name if a > 0 else name + "^-1")
    return ".".join(parts)
