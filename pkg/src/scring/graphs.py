"""Folded labelled graphs built from loops at base vertices.

Every component is a bouquet of cycles glued at one base vertex.  Words
readable along reduced paths are exactly the labels the families treat as
monomials; the graph answers membership, path counting, path enumeration and
loop exponents.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .words import ONE, Word, concat, deglex_key, inverse


@dataclass(frozen=True)
class Reading:
    start: int
    end: int
    weights: tuple  # signed traversal count of each loop's closing edge


class LoopGraph:
    def __init__(self, n_letters: int):
        self.n_letters = n_letters
        self.n_vertices = 0
        self.succ: dict[int, dict[int, int]] = {}  # vertex -> letter -> vertex
        self.loops: list[Word] = []
        self.loop_base: list[int] = []
        self.loop_vertices: list[list[int]] = []  # vertex at each offset
        self.components: list[list[int]] = []  # loop indices per component
        self.base_of_component: list[int] = []
        self.position: dict[int, tuple[int, int]] = {}  # vertex -> (loop, offset)
        self.component_of: dict[int, int] = {}
        self.closing: dict[tuple[int, int], tuple[int, int]] = {}
        self._next = None
        self._first = None

    # construction -----------------------------------------------------
    def _new_vertex(self) -> int:
        v = self.n_vertices
        self.n_vertices += 1
        self.succ[v] = {}
        return v

    def _add_edge(self, u: int, letter: int, v: int) -> None:
        for src, lab, dst in ((u, letter, v), (v, -letter, u)):
            if lab in self.succ[src] and self.succ[src][lab] != dst:
                raise ValueError("loops do not give a folded graph")
            self.succ[src][lab] = dst

    def add_component(self, loops: Sequence[Word]) -> int:
        comp = len(self.components)
        base = self._new_vertex()
        self.base_of_component.append(base)
        self.component_of[base] = comp
        self.position[base] = (-1, 0)
        indices = []
        for loop in loops:
            if not loop:
                raise ValueError("empty loop")
            i = len(self.loops)
            self.loops.append(tuple(loop))
            self.loop_base.append(base)
            verts = [base]
            for k in range(1, len(loop)):
                v = self._new_vertex()
                self.position[v] = (i, k)
                self.component_of[v] = comp
                verts.append(v)
            verts.append(base)
            for k, a in enumerate(loop):
                self._add_edge(verts[k], a, verts[k + 1])
            self.closing[(verts[-2], loop[-1])] = (i, 1)
            self.closing[(base, -loop[-1])] = (i, -1)
            self.loop_vertices.append(verts[:-1])
            indices.append(i)
        self.components.append(indices)
        self._next = None
        self._first = None
        return base

    # numpy transition tables -------------------------------------------
    @property
    def next_table(self) -> dict[int, np.ndarray]:
        if self._next is None:
            n = self.n_vertices
            table = {}
            for g in range(1, self.n_letters + 1):
                for a in (g, -g):
                    arr = np.full(n + 1, n, dtype=np.int64)
                    for v in range(n):
                        if a in self.succ[v]:
                            arr[v] = self.succ[v][a]
                    table[a] = arr
            self._next = table
        return self._next

    # reading -----------------------------------------------------------
    def walk(self, start: int, word: Word) -> Reading | None:
        weights = [0] * len(self.loops)
        v = start
        for a in word:
            u = self.succ[v].get(a)
            if u is None:
                return None
            self._count(v, a, u, weights)
            v = u
        return Reading(start, v, tuple(weights))

    def _count(self, v: int, a: int, u: int, weights: list) -> None:
        hit = self.closing.get((v, a))
        if hit is not None:
            weights[hit[0]] += hit[1]

    def starts(self, word: Word) -> list[int]:
        if not word:
            return list(range(self.n_vertices))
        succ = self.succ
        alive = []
        for v0 in self._with_out(word[0]):
            v = v0
            for a in word:
                v = succ[v].get(a)
                if v is None:
                    break
            else:
                alive.append(v0)
        return alive

    def _with_out(self, a: int) -> list[int]:
        if self._first is None:
            self._first = {}
            for v in range(self.n_vertices):
                for lab in self.succ[v]:
                    self._first.setdefault(lab, []).append(v)
        return self._first.get(a, [])

    def count_paths(self, word: Word) -> int:
        return len(self.starts(word))

    def readings(self, word: Word) -> list[Reading]:
        out = []
        for s in self.starts(word):
            r = self.walk(s, word)
            if r is not None:
                out.append(r)
        return out

    def is_label(self, word: Word) -> bool:
        return bool(self.starts(word))

    def reach_table(self, word: Word) -> tuple[np.ndarray, np.ndarray]:
        """For every position i: longest readable prefix of word[i:], and the
        longest prefix readable from at least two vertices."""
        n = len(word)
        nv = self.n_vertices
        nxt = self.next_table
        longest = np.zeros(n + 1, dtype=np.int64)
        second = np.zeros(n + 1, dtype=np.int64)
        cur = np.zeros(nv + 1, dtype=np.int64)
        cur[nv] = -1
        for i in range(n - 1, -1, -1):
            cur = 1 + cur[nxt[word[i]]]
            cur[nv] = -1
            if nv >= 2:
                top = np.partition(cur[:nv], nv - 2)[nv - 2:]
                longest[i] = top.max()
                second[i] = top.min()
            else:
                longest[i] = cur[0]
        return longest, second

    # routes and path enumeration ---------------------------------------
    def route_from_base(self, v: int) -> Word:
        i, k = self.position[v]
        return ONE if i < 0 else self.loops[i][:k]

    def base(self, v: int) -> int:
        return self.base_of_component[self.component_of[v]]

    def loop_word(self, g: Sequence[int]) -> Word:
        out = ONE
        for a in g:
            loop = self.loops[abs(a) - 1]
            out = concat(out, loop if a > 0 else inverse(loop))
        return out

    def _exits(self, v: int) -> list[tuple[Word, int, int]]:
        """Ways to walk from v to its base without passing the base earlier:
        (label, loop index, direction +1 through the closing edge or -1)."""
        i, k = self.position[v]
        if i < 0:
            return [(ONE, -1, 0)]
        loop = self.loops[i]
        return [(loop[k:], i, 1), (inverse(loop[:k]), i, -1)]

    def _entries(self, v: int) -> list[tuple[Word, int, int]]:
        i, k = self.position[v]
        if i < 0:
            return [(ONE, -1, 0)]
        loop = self.loops[i]
        return [(loop[:k], i, 1), (inverse(loop[k:]), i, -1)]

    def loop_words(self, comp: int, budget: int, cap: int) -> list[tuple]:
        """Reduced words over the component's loops with total loop length at
        most ``budget``, cheapest first, at most ``cap`` of them."""
        letters = []
        for i in self.components[comp]:
            letters += [i + 1, -(i + 1)]
        cost = {a: len(self.loops[abs(a) - 1]) for a in letters}
        out = []
        heap = [(0, ())]
        while heap and len(out) < cap:
            c, g = heapq.heappop(heap)
            out.append(g)
            for a in letters:
                if g and g[-1] == -a:
                    continue
                nc = c + cost[a]
                if nc <= budget:
                    heapq.heappush(heap, (nc, g + (a,)))
        return out

    def paths(self, start: int, end: int, max_len: int, cap: int = 4000) -> list[Word]:
        """Labels of reduced paths from start to end with at most max_len
        letters, sorted by deglex."""
        comp = self.component_of[start]
        if self.component_of[end] != comp:
            return []
        found = set()
        si, sk = self.position[start]
        ei, ek = self.position[end]
        # paths never touching the base
        if si >= 0 and si == ei:
            if ek > sk and ek - sk <= max_len:
                found.add(self.loops[si][sk:ek])
            elif ek < sk and sk - ek <= max_len:
                found.add(inverse(self.loops[si][ek:sk]))
            elif ek == sk:
                found.add(ONE)
        if start == end and si < 0:
            found.add(ONE)
        exits = self._exits(start)
        entries = self._entries(end)
        min_ex = min(len(e[0]) for e in exits)
        min_en = min(len(e[0]) for e in entries)
        budget = max_len - min_ex - min_en
        if budget >= 0:
            for g in self.loop_words(comp, budget, cap):
                middle = self.loop_word(g)
                for ex, _, _ in exits:
                    for en, _, _ in entries:
                        total = len(ex) + len(middle) + len(en)
                        if total > max_len:
                            continue
                        w = ex + middle + en
                        if _reduced(w) and w:
                            found.add(w)
                        elif not w and start == end:
                            found.add(ONE)
        return sorted(found, key=deglex_key)


def _reduced(w: Word) -> bool:
    return all(a != -b for a, b in zip(w, w[1:]))
