"""Exhaustive extension sweeps: does every filling of a window hit a forbidden pattern?

``certify(patterns, p, n)`` answers whether every pattern on
``support(p) ∪ ball(n)`` that agrees with ``p`` contains an occurrence of one
of ``patterns``.  Two routes compute the same answer:

* on Z, a left-to-right sweep over an Aho-Corasick automaton of the forbidden
  words; the live set holds automaton states, so pruned fillings are never
  materialised;
* on any group, depth-first backtracking over the window cells with every
  placement of every forbidden pattern compiled into a constraint.

Cost is counted in *units*: one unit is one test of whether a forbidden
pattern occurrence ends at a given cell (automaton route) or one placed
constraint check (backtracking route).  Reading the forbidden list itself is
charged by the caller, one unit per cell the first time a prober reaches it.

Gapped forbidden patterns are expanded with a hole marker in each gap, and
cells outside the window step the automaton on that marker, so a gap may hang
over the window edge exactly as in the occurrence definition.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .grid import BudgetExceeded, Pattern, _placements, extension_region

_HOLE = object()


@dataclass(frozen=True)
class ProbeResult:
    certified: bool
    units: int
    skipped: bool = False


class LineAutomaton:
    """Aho-Corasick automaton over contiguous Z words; gappy patterns are expanded."""

    def __init__(self, patterns: Sequence[Pattern], alphabet: Sequence, expand_cap: int = 1 << 16):
        words: list[tuple] = []
        trivial = False
        for p in patterns:
            if not p.items:
                trivial = True
            else:
                words.extend(contiguous_fillings(p, tuple(alphabet), expand_cap))
        self._build(words, alphabet, trivial)

    @classmethod
    def from_words(cls, words: Sequence[tuple], alphabet: Sequence, trivial: bool = False) -> "LineAutomaton":
        self = cls.__new__(cls)
        self._build(words, alphabet, trivial)
        return self

    def _build(self, words, alphabet, trivial: bool) -> None:
        self.alphabet = tuple(alphabet)
        self.goto: list[dict] = [{}]
        self.fail: list[int] = [0]
        self.bad: list[bool] = [False]
        self.trivial = trivial  # the empty pattern is forbidden
        self._memo: dict = {}
        for w in words:
            self._add(w)
        self._link()

    def _add(self, w: tuple) -> None:
        s = 0
        for a in w:
            nxt = self.goto[s].get(a)
            if nxt is None:
                nxt = len(self.goto)
                self.goto[s][a] = nxt
                self.goto.append({})
                self.fail.append(0)
                self.bad.append(False)
            s = nxt
        self.bad[s] = True

    def _link(self) -> None:
        q = deque()
        for s in self.goto[0].values():
            q.append(s)
        while q:
            r = q.popleft()
            for a, s in self.goto[r].items():
                q.append(s)
                f = self.fail[r]
                while f and a not in self.goto[f]:
                    f = self.fail[f]
                self.fail[s] = self.goto[f].get(a, 0) if self.goto[f].get(a, 0) != s else 0
                self.bad[s] = self.bad[s] or self.bad[self.fail[s]]

    def step(self, s: int, a) -> int:
        key = (s, a)
        nxt = self._memo.get(key)
        if nxt is None:
            t = s
            while t and a not in self.goto[t]:
                t = self.fail[t]
            nxt = self.goto[t].get(a, 0)
            self._memo[key] = nxt
        return nxt


def contiguous_fillings(p: Pattern, alphabet: tuple, cap: int = 1 << 16) -> list[tuple]:
    """The words obtained by filling the gaps of a Z pattern in every way.

    A gap may also hold the hole marker, so an occurrence whose gaps fall on
    cells outside the sweep window is still recognised.
    """
    items = p.items
    span = items[-1][0] - items[0][0] + 1
    if span == len(items):
        return [tuple(a for _, a in items)]
    q = p.normalized()
    cells = q.cells
    gaps = [i for i in range(span) if i not in cells]
    if (len(alphabet) + 1) ** len(gaps) > cap:
        raise BudgetExceeded(f"gappy forbidden pattern {q} expands past {cap} words")
    out = []
    for fill in itertools.product(alphabet + (_HOLE,), repeat=len(gaps)):
        c = dict(cells)
        c.update(zip(gaps, fill))
        out.append(tuple(c[i] for i in range(span)))
    return out


def certify_line(auto: LineAutomaton, p: Pattern, n: int, state_cap: int) -> ProbeResult:
    if auto.trivial:
        return ProbeResult(True, 1)
    cells = p.cells
    region = set(cells)
    region.update(range(-n, n + 1))
    lo, hi = min(region), max(region)
    alphabet = auto.alphabet
    bad = auto.bad
    stepf = auto.step
    live = {0}
    units = 0
    for j in range(lo, hi + 1):
        if j in cells:
            choices = (cells[j],)
        elif j in region:
            choices = alphabet
        else:
            # a hole: only a gap of a forbidden pattern may sit here
            units += len(live)
            live = {stepf(s, _HOLE) for s in live}
            continue
        nxt = set()
        for s in live:
            for a in choices:
                units += 1
                t = stepf(s, a)
                if not bad[t]:
                    nxt.add(t)
        live = nxt
        if not live:
            return ProbeResult(True, units)
        if len(live) > state_cap:
            return ProbeResult(False, units, skipped=True)
    return ProbeResult(False, max(units, 1))


def certify_generic(patterns: Sequence[Pattern], p: Pattern, n: int, cap: int) -> ProbeResult:
    if any(not f.items for f in patterns):
        return ProbeResult(True, 1)
    group = p.group
    region = extension_region(p, n)
    fixed = p.cells
    free = [k for k in region if k not in fixed]
    if len(p.alphabet) ** len(free) > cap:
        return ProbeResult(False, 0, skipped=True)
    order = [k for k in region if k in fixed] + free
    index = {k: i for i, k in enumerate(order)}
    rset = set(region)
    by_last: list[list] = [[] for _ in order]
    mul = group.mul
    for f in patterns:
        fs = f.support
        for g in _placements(group, fs, rset):
            idx = tuple(index[mul(g, k)] for k in fs)
            by_last[max(idx)].append((idx, tuple(a for _, a in f.items)))
    choices = [(fixed[k],) if k in fixed else p.alphabet for k in order]
    assign: list = [None] * len(order)
    units = 0

    def dead(i: int) -> bool:
        nonlocal units
        for idx, letters in by_last[i]:
            units += 1
            if all(assign[c] == a for c, a in zip(idx, letters)):
                return True
        return False

    # iterative depth-first search
    if not order:
        return ProbeResult(False, 1)
    pos = [0] * len(order)
    i = 0
    while i >= 0:
        if pos[i] >= len(choices[i]):
            pos[i] = 0
            i -= 1
            if i >= 0:
                pos[i] += 1
            continue
        assign[i] = choices[i][pos[i]]
        if dead(i):
            pos[i] += 1
            continue
        if i == len(order) - 1:
            return ProbeResult(False, max(units, 1))
        i += 1
    return ProbeResult(True, max(units, 1))
