"""Hard caps shared by the deciders and the oracles.

Every bounded search in the package reads its limits from one ``Caps``
record so that a run can be reproduced from its configuration alone.
Oracles refuse inputs beyond their caps instead of truncating.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Caps:
    exhaustive_lambda_letters: int = 24
    virtual_depth: int = 2
    virtual_candidates: int = 12  # incident substitutes tried per occurrence
    virtual_states: int = 400  # states explored by one virtual search
    incident_cap: int = 400  # incident monomials listed per query
    rep_iterations: int = 8  # slot-minimisation rounds for class representatives
    rep_candidates: int = 24  # substitutes tried per slot and round
    n_cap: int = 3  # highest relator power walked by path enumeration
    closure_steps: int = 3  # additive-closure rounds for explicit families
    closure_len: int = 12
    greedy_candidates: int = 2000
    branch_cap: int = 64  # live branches in all-branches mode

    def with_(self, **kw) -> "Caps":
        return replace(self, **kw)


DEFAULT_CAPS = Caps()
