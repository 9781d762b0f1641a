"""Line-based presentation files and the named demo presets."""
from __future__ import annotations

from pathlib import Path

from .config import Caps, DEFAULT_CAPS
from .families import (PRESETS, GroupPresentation, TrinomialParams, demo_group_presentation,
                       demo_system, demo_trinomial_params, make_group_system,
                       make_trinomial_system)
from .polynomials import GF2, QQ, Field, parse_polynomial
from .relations import ExplicitFamily, RelationSystem
from .words import Alphabet, format_word, parse_word


class PresentationError(ValueError):
    pass


def parse_presentation(text: str, caps: Caps = DEFAULT_CAPS, auto_reduce: bool = False,
                       tau_override: int | None = None) -> RelationSystem:
    field: Field | None = None
    alphabet: Alphabet | None = None
    tau = None
    relations = []
    family = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "field":
                if rest not in ("gf2", "rational"):
                    raise PresentationError(f"unknown field {rest!r}")
                field = GF2 if rest == "gf2" else QQ
            elif head == "generators":
                alphabet = Alphabet(rest.split())
            elif head == "tau":
                tau = int(rest)
            elif head == "relation":
                relations.append(rest)
            elif head == "family":
                family = rest
            else:
                raise PresentationError(f"unknown directive {head!r}")
        except PresentationError as e:
            raise PresentationError(f"line {n}: {e}") from None
        except ValueError as e:
            raise PresentationError(f"line {n}: {e}") from None
    if field is None:
        raise PresentationError("missing 'field' line")
    if alphabet is None:
        raise PresentationError("missing 'generators' line")
    if family and relations:
        raise PresentationError("a file holds either relations or one family")
    if tau_override is not None:
        tau = tau_override
    if family:
        kind, _, args = family.partition(" ")
        if kind == "group":
            words = [parse_word(t, alphabet, auto_reduce) for t in args.split()]
            sys = make_group_system(GroupPresentation(alphabet, words), field, caps)
        elif kind == "trinomial":
            kv = dict(part.split("=", 1) for part in args.split())
            try:
                w = parse_word(kv["w"], alphabet, auto_reduce)
                n1, n2 = int(kv["n1"]), int(kv["n2"])
            except KeyError as e:
                raise PresentationError(f"trinomial family needs {e.args[0]}=") from None
            x, y = _pick_xy(alphabet, w)
            sys = make_trinomial_system(TrinomialParams(alphabet, w, n1, n2, x, y),
                                        field, caps)
        else:
            raise PresentationError(f"unknown family kind {kind!r}")
        if tau is not None and tau != sys.tau:
            raise PresentationError(f"tau {tau} disagrees with the derived value {sys.tau}")
        return sys
    if tau is None:
        raise PresentationError("explicit families need a 'tau' line")
    polys = [parse_polynomial(r, alphabet, field, auto_reduce) for r in relations]
    return RelationSystem(alphabet, field, ExplicitFamily(polys, field), tau, caps=caps)


def _pick_xy(alphabet: Alphabet, w) -> tuple[int, int]:
    names = alphabet.names
    if "x" in names and "y" in names:
        return alphabet.letter("x"), alphabet.letter("y")
    used = {abs(a) for a in w}
    free = [alphabet.letter(n) for n in names if alphabet.letter(n) not in used]
    if len(free) < 2:
        raise PresentationError("need two generators outside w for x and y")
    return free[0], free[1]


def preset_text(name: str) -> str:
    if name == "demo-group":
        pres = demo_group_presentation()
        return ("# single relator: product of a^i b for i = 4..26\n"
                "field rational\ngenerators a b\n"
                f"family group {format_word(pres.relators[0], pres.alphabet)}\n")
    if name == "demo-trinomial":
        p = demo_trinomial_params()
        return ("# two-loop trinomial family\nfield rational\ngenerators x y z t\n"
                f"family trinomial w={format_word(p.w, p.alphabet)} n1={p.n1} n2={p.n2}\n")
    raise KeyError(name)


def load_system(source: str, caps: Caps = DEFAULT_CAPS, auto_reduce: bool = False,
                tau_override: int | None = None) -> RelationSystem:
    """A preset name or a path to a presentation file."""
    if source in PRESETS:
        sys = demo_system(source, caps=caps)
        if tau_override is not None and tau_override != sys.tau:
            raise PresentationError(f"tau {tau_override} disagrees with the derived value {sys.tau}")
        return sys
    path = Path(source)
    if not path.exists():
        raise PresentationError(f"no preset or file named {source!r}")
    sys = parse_presentation(path.read_text(encoding="utf-8"), caps, auto_reduce, tau_override)
    sys.label = str(path)
    return sys
