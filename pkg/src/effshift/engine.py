"""Language decisions from a co-language enumeration, and the product/union reductions.

``decide_pattern`` answers ``p in L(X)?`` for a shift X that is minimal for
the property its refuter describes.  Two semi-procedures race:

* the No arm probes ``p`` itself against the presentation;
* the Yes arm forbids ``p`` and waits for the refuter to reject the smaller
  shift.  By minimality, removing ``p`` destroys the property exactly when
  ``p`` occurred in X.

Minimality is the caller's promise; nothing here can check it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .grid import InputError, Pattern, Z, ball_keys, enumerate_patterns, format_pattern
from .properties import Refutation, RefutationRun, Refuter, replay_refutation
from .streams import (Certificate, Enumeration, ForbiddenPresentation, Outcome, PatternProbe, Verdict, forbid_pattern,
                      verify_certificate, DEFAULT_T_STEP)

MINIMALITY_CONTRACT = ("verdicts assume the presented shift is minimal for the chosen property; "
                       "this is not checked")


class DecisionRun:
    """Resumable race between the No arm and the Yes arm for one pattern.

    The arm with less spend moves next (No arm on ties), one atomic step at a
    time, so both arms receive equal shares up to one step.  The trace lists
    ``(arm, units)`` for every step taken.
    """

    def __init__(self, F: ForbiddenPresentation, refuter: Refuter, p: Pattern,
                 t_step: int = DEFAULT_T_STEP, cap: int | None = None):
        if p.group != F.group or tuple(p.alphabet) != tuple(F.alphabet):
            raise InputError("pattern does not match the presentation")
        self.presentation = F
        self.refuter = refuter
        self.pattern = p
        self.no_arm = PatternProbe(F, p, t_step, cap)
        self.reduced = forbid_pattern(F, p)
        self.yes_arm = RefutationRun(refuter, self.reduced, t_step, cap)
        self.trace: list[tuple[str, int]] = []
        self.outcome = Outcome.EXHAUSTED

    @property
    def spent(self) -> int:
        return self.no_arm.spent + self.yes_arm.spent

    @property
    def resolved(self) -> bool:
        return self.outcome is not Outcome.EXHAUSTED

    def advance(self, budget: int) -> Verdict:
        target = self.spent + budget
        while not self.resolved and self.spent < target:
            if self.no_arm.spent <= self.yes_arm.spent:
                self.trace.append(("no", self.no_arm.advance()))
                if self.no_arm.certificate is not None:
                    self.outcome = Outcome.NO
            else:
                self.trace.append(("yes", self.yes_arm.advance(1)))
                if self.yes_arm.refuted:
                    self.outcome = Outcome.YES
        return self.verdict()

    def certificate(self):
        if self.outcome is Outcome.NO:
            return {"kind": "colanguage", **self.no_arm.certificate.to_json()}
        if self.outcome is Outcome.YES:
            return {"kind": "refutation", "pattern": format_pattern(self.pattern),
                    "refuter": self.refuter.spec(), **self.yes_arm.result.to_json()}
        return None

    def verdict(self) -> Verdict:
        return Verdict(self.outcome, self.certificate(), self.spent,
                       [{"arm": a, "units": u} for a, u in self.trace])


def decide_pattern(F: ForbiddenPresentation, refuter: Refuter, p: Pattern, budget: int,
                   t_step: int = DEFAULT_T_STEP, cap: int | None = None) -> Verdict:
    """Three-valued answer to ``p in L(X)`` within ``budget`` units (see module docs)."""
    return DecisionRun(F, refuter, p, t_step, cap).advance(budget)


def replay_decision(F: ForbiddenPresentation, refuter: Refuter, cert: dict) -> bool:
    """Re-verify a certificate from :meth:`DecisionRun.certificate` without any budget."""
    from .grid import parse_pattern
    kind = cert.get("kind")
    if kind == "colanguage":
        return verify_certificate(F, Certificate.from_json(cert, F.group, F.alphabet))
    if kind == "refutation":
        p = parse_pattern(cert["pattern"], F.alphabet, F.group)
        reduced = forbid_pattern(F, p)
        wits = [Certificate.from_json(w, F.group, F.alphabet) for w in cert.get("witnesses", [])]
        ref = Refutation(cert["reason"], _decode_detail(cert.get("detail", {})), wits, cert.get("consumed", 0))
        return replay_refutation(refuter, reduced, ref)
    raise InputError(f"unknown certificate kind {kind!r}")


def _decode_detail(d: dict) -> dict:
    return dict(d)


@dataclass
class LanguageEnumeration:
    members: list[Pattern] = field(default_factory=list)
    nonmembers: list[Pattern] = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)  # candidate index -> Verdict
    candidates: list[Pattern] = field(default_factory=list)
    spent: int = 0

    def unresolved(self) -> list[Pattern]:
        return [p for i, p in enumerate(self.candidates)
                if i not in self.verdicts or self.verdicts[i].outcome is Outcome.EXHAUSTED]


def enumerate_language(F: ForbiddenPresentation, refuter: Refuter, budget: int, limit: int | None = None,
                       base_budget: int = 256, candidates: Iterable[Pattern] | None = None,
                       t_step: int = DEFAULT_T_STEP, cap: int | None = None) -> LanguageEnumeration:
    """Split candidate patterns into language members and non-members.

    Round ``r`` admits candidate ``r`` and gives each unresolved candidate
    ``i <= r`` a further ``base_budget * 2**(r - i)`` units, so every candidate's
    allowance keeps doubling.  Stops after ``budget`` units in total, or once the
    first ``limit`` candidates are all resolved.
    """
    source = iter(candidates) if candidates is not None else enumerate_patterns(F.group, F.alphabet)
    out = LanguageEnumeration()
    runs: list[DecisionRun] = []
    drained = False
    for r in itertools.count():
        if not drained and (limit is None or len(runs) < limit):
            p = next(source, None)
            if p is None:
                drained = True
            else:
                out.candidates.append(p)
                runs.append(DecisionRun(F, refuter, p, t_step, cap))
        open_runs = [i for i, run in enumerate(runs) if not run.resolved]
        if not open_runs and (drained or (limit is not None and len(runs) >= limit)):
            break
        for i in open_runs:
            if out.spent >= budget:
                break
            run = runs[i]
            before = run.spent
            v = run.advance(min(base_budget << min(r - i, 40), budget - out.spent))
            out.spent += run.spent - before
            if run.resolved:
                (out.members if v.outcome is Outcome.YES else out.nonmembers).append(run.pattern)
        if out.spent >= budget:
            break
    for i, run in enumerate(runs):
        out.verdicts[i] = run.verdict()
    return out


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------

class ProductCoLanguage(Enumeration):
    """Project the co-language of ``X x Y`` to one factor.

    A pattern ``p`` over the chosen factor is emitted once every pairing of
    ``p`` with a pattern over the other factor on the same support has been
    emitted by the product stream.
    """

    def __init__(self, co_xy: Enumeration, side: str, left_alphabet: Sequence, right_alphabet: Sequence,
                 chunk: int = 64):
        if side not in ("left", "right"):
            raise InputError("side must be 'left' or 'right'")
        self.source_stream = co_xy
        self.side = side
        self.alphabet = tuple(left_alphabet if side == "left" else right_alphabet)
        self.other = tuple(right_alphabet if side == "left" else left_alphabet)
        self.chunk = chunk
        self.pairings: dict[Pattern, set] = {}
        super().__init__(self._run())

    def _project(self, q: Pattern) -> tuple[Pattern, tuple]:
        k = 0 if self.side == "left" else 1
        mine = {g: a[k] for g, a in q.items}
        theirs = tuple(a[1 - k] for _, a in q.items)
        return Pattern.from_cells(q.group, self.alphabet, mine), theirs

    def _run(self):
        seen = 0
        while not self.source_stream.finished:
            before = self.source_stream.spent
            self.source_stream.step(self.chunk)
            cost = self.source_stream.spent - before
            out = []
            for item in self.source_stream.emitted[seen:]:
                q = item.pattern if isinstance(item, Certificate) else item
                p, other = self._project(q)
                got = self.pairings.setdefault(p, set())
                if len(got) == len(self.other) ** len(p.items):
                    continue
                got.add(other)
                if len(got) == len(self.other) ** len(p.items):
                    out.append(p)
            seen = len(self.source_stream.emitted)
            yield cost, out


def product_co_language(co_xy: Enumeration, side: str, left_alphabet: Sequence,
                        right_alphabet: Sequence) -> ProductCoLanguage:
    return ProductCoLanguage(co_xy, side, left_alphabet, right_alphabet)


# ---------------------------------------------------------------------------
# Disjoint unions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NotSeparated:
    """Both languages share a pattern on ``ball(n_max)``: no radius found in the searched range."""

    n_max: int


def _ball_patterns(group, alphabet, n):
    keys = ball_keys(group, n)
    for letters in itertools.product(alphabet, repeat=len(keys)):
        yield Pattern.from_cells(group, alphabet, dict(zip(keys, letters)))


def disjoint_separation_radius(memb_x: Callable[[Pattern], bool], memb_y: Callable[[Pattern], bool],
                               alphabet: Sequence, n_max: int, group=Z) -> int | NotSeparated:
    """Smallest ``N <= n_max`` with no ``ball(n)`` pattern accepted by both oracles for ``N < n <= n_max``."""
    alphabet = tuple(alphabet)
    last_common = None
    for n in range(n_max + 1):
        if any(memb_x(p) and memb_y(p) for p in _ball_patterns(group, alphabet, n)):
            last_common = n
    if last_common == n_max:
        return NotSeparated(n_max)
    return 0 if last_common is None else last_common


def separating_predicate(memb_x: Callable[[Pattern], bool], memb_y: Callable[[Pattern], bool],
                         radius: int) -> Callable[[Pattern], bool]:
    """Decidable set of patterns absent from X that covers everything in L(Y) but not L(X).

    With separation radius ``N`` no ``ball(N+1)`` pattern lies in both
    languages.  A pattern that fits inside a translate of ``ball(N+1)`` is
    judged directly by ``memb_x``; a larger pattern is included when some
    translate of ``ball(N+1)`` inside its support carries a pattern of L(Y),
    which then cannot occur in X.  Only Z is supported.
    """
    width = 2 * (radius + 1) + 1

    def pred(p: Pattern) -> bool:
        if p.group != Z:
            raise InputError("separating predicate is implemented on Z")
        if not p.items:
            return not memb_x(p)
        lo, hi = p.span()
        if hi - lo + 1 <= width:
            return not memb_x(p)
        cells = p.cells
        for s in range(lo, hi - width + 2):
            if all(j in cells for j in range(s, s + width)):
                sub = Pattern.from_word(p.alphabet, [cells[j] for j in range(s, s + width)])
                if memb_y(sub):
                    return True
        return False

    return pred


class UnionCoLanguage(Enumeration):
    """``L^c(X u Y)`` plus the separating set, which together make up ``L^c(X)``.

    Steps alternate between one chunk of the union's co-language stream and
    one candidate from :func:`enumerate_patterns` tested against the predicate.
    """

    def __init__(self, co_union: Enumeration, in_separating_set: Callable[[Pattern], bool], group, alphabet,
                 chunk: int = 64, candidates: Iterable[Pattern] | None = None):
        self.source_stream = co_union
        self.predicate = in_separating_set
        self.chunk = chunk
        self.candidates = iter(candidates) if candidates is not None else enumerate_patterns(group, alphabet)
        self._seen: set[Pattern] = set()
        super().__init__(self._run())

    def _run(self):
        consumed = 0
        cands_left = True
        while cands_left or not self.source_stream.finished:
            out = []
            cost = 0
            if not self.source_stream.finished:
                before = self.source_stream.spent
                self.source_stream.step(self.chunk)
                cost += self.source_stream.spent - before
                for item in self.source_stream.emitted[consumed:]:
                    q = item.pattern if isinstance(item, Certificate) else item
                    if q not in self._seen:
                        self._seen.add(q)
                        out.append(q)
                consumed = len(self.source_stream.emitted)
            p = next(self.candidates, None)
            if p is None:
                cands_left = False
            else:
                cost += 1
                if p not in self._seen and self.predicate(p):
                    self._seen.add(p)
                    out.append(p)
            yield cost, out


def union_co_language(co_union: Enumeration, in_separating_set: Callable[[Pattern], bool], group=Z,
                      alphabet: Sequence = ("0", "1"), **kw) -> UnionCoLanguage:
    return UnionCoLanguage(co_union, in_separating_set, group, tuple(alphabet), **kw)
