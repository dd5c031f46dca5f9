"""Refuters: folds over a co-language stream that halt exactly when a shift lacks a property.

A refuter only ever reads patterns certified *not* to appear in the shift, so
a refutation is a finite, replayable argument.  Every refuter also refutes the
empty shift; :class:`RefutationRun` wires that in by probing the empty pattern
alongside the stream.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .grid import InputError, Pattern, Z, occurs_in, parse_pattern
from .streams import (ApproxReal, Certificate, CoLanguage, Enumeration, ForbiddenPresentation, PatternProbe,
                      builtin_real, co_language, compare_log_ratio, extension_cap, verify_certificate,
                      DEFAULT_T_STEP)

DEFAULT_ENTROPY_LENGTH = 12


@dataclass
class Refutation:
    """Why a refuter halted: ``reason`` plus the stream items that justify it."""

    reason: str
    detail: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)  # Certificates (or bare patterns for raw streams)
    consumed: int = 0

    def to_json(self) -> dict:
        from .grid import format_pattern
        wit = [w.to_json() if isinstance(w, Certificate) else {"pattern": format_pattern(w)} for w in self.witnesses]
        return {"reason": self.reason, "detail": _jsonable(self.detail), "witnesses": wit, "consumed": self.consumed}


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Pattern):
        from .grid import format_pattern
        return format_pattern(x)
    return x


class Refuter:
    """Base fold.  Subclasses implement ``_consume`` and ``check``."""

    name = "refuter"
    z_only = False

    def __init__(self):
        self.patterns: list[Pattern] = []
        self.items: list = []

    def params(self) -> dict:
        return {}

    def spec(self) -> dict:
        return {"name": self.name, "params": _jsonable(self.params())}

    @property
    def label(self) -> str:
        return self.name

    def fresh(self) -> "Refuter":
        return type(self)(**self._init_args())

    def _init_args(self) -> dict:
        return {}

    def consume(self, item) -> None:
        p = item.pattern if isinstance(item, Certificate) else item
        self.items.append(item)
        self.patterns.append(p)
        self._consume(len(self.patterns) - 1, p)

    def _consume(self, idx: int, p: Pattern) -> None:
        pass

    def check(self) -> Refutation | None:
        return None

    def replays(self, items: Sequence, detail: dict) -> bool:
        """Does folding exactly ``items`` into a fresh copy reproduce a refutation?"""
        r = self.fresh()
        for it in items:
            r.consume(it)
        return r.check() is not None


class NonemptyRefuter(Refuter):
    """Refutes only the empty shift; the emptiness arm of the run does the work."""

    name = "nonempty"


class ContainsPatternsRefuter(Refuter):
    """Refutes when some required pattern is certified absent.

    An emitted pattern occurring inside a required one also suffices: languages
    are factorial, so the required pattern is then absent too.
    """

    name = "contains"

    def __init__(self, patterns: Sequence[Pattern]):
        super().__init__()
        self.required = list(patterns)
        if not self.required:
            raise InputError("contains needs at least one pattern")
        self.hit: tuple[int, int] | None = None

    def _init_args(self):
        return {"patterns": self.required}

    def params(self):
        return {"patterns": self.required}

    def _consume(self, idx, p):
        if self.hit is not None:
            return
        for j, r in enumerate(self.required):
            if r.group == p.group and occurs_in(p, r):
                self.hit = (idx, j)
                return

    def check(self):
        if self.hit is None:
            return None
        idx, j = self.hit
        return Refutation("absent", {"required": self.required[j], "emitted": self.patterns[idx]},
                          [self.items[idx]], len(self.patterns))


class CylinderRefuter(ContainsPatternsRefuter):
    name = "cylinder"

    def __init__(self, pattern: Pattern):
        super().__init__([pattern])

    def _init_args(self):
        return {"pattern": self.required[0]}

    def params(self):
        return {"pattern": self.required[0]}


def _word_cells(p: Pattern) -> tuple[int, tuple]:
    q = p.normalized()
    return q.items[-1][0] + 1, q.items


class EntropyAtLeastRefuter(Refuter):
    """Refutes ``h(Y) >= q`` once some surviving-word count satisfies ``log2(N_n)/n < q``.

    ``N_n`` counts length-``n`` words containing no consumed pattern; it bounds
    the true word count from above, and ``log2(N_n)/n`` bounds the entropy.
    Lengths ``1..max_length`` are examined; ``q`` is read through its lower
    approximants, one further approximant per check.
    """

    name = "entropy"
    z_only = True

    def __init__(self, q: ApproxReal, max_length: int = DEFAULT_ENTROPY_LENGTH):
        super().__init__()
        if q.direction not in ("left", "two-sided"):
            raise InputError("entropy target must be left-approximable")
        self.q = q
        self.max_length = max_length
        self.by_span: dict[int, list] = {}
        self.q_index = 0
        self._dirty = True
        self._counts: list[int] = []

    def _init_args(self):
        return {"q": self.q, "max_length": self.max_length}

    def params(self):
        return {"q": self.q.name, "maxLength": self.max_length}

    def _consume(self, idx, p):
        if p.group != Z:
            raise InputError("entropy refuter needs G = Z")
        if not p.items:
            self.by_span.setdefault(0, []).append((idx, ()))
            self._dirty = True
            return
        span, cells = _word_cells(p)
        if span > self.max_length:
            return
        # a pattern containing a kept one removes no further words
        q = p.normalized()
        for lst in self.by_span.values():
            for j, _ in lst:
                if occurs_in(self.patterns[j], q):
                    return
        self.by_span.setdefault(span, []).append((idx, cells))
        self._dirty = True

    def counts(self) -> list[int]:
        """``N_1 .. N_max_length`` over the consumed prefix."""
        if not self._dirty:
            return self._counts
        if 0 in self.by_span:
            self._counts = [0] * self.max_length
            self._dirty = False
            return self._counts
        alphabet = self.patterns[0].alphabet if self.patterns else ()
        solid: list[set] = [set() for _ in range(self.max_length)]
        gappy: list[list] = [[] for _ in range(self.max_length)]
        for span, lst in self.by_span.items():
            for _, cells in lst:
                if len(cells) == span:
                    solid[span - 1].add(tuple(a for _, a in cells))
                else:
                    gappy[span - 1].append(cells)
        counts = [0] * self.max_length
        w: list = []

        def ok() -> bool:
            j = len(w) - 1
            for back in range(min(j + 1, self.max_length)):
                start = j - back
                if solid[back] and tuple(w[start:]) in solid[back]:
                    return False
                for cells in gappy[back]:
                    if all(w[start + o] == a for o, a in cells):
                        return False
            return True

        def dfs():
            for a in alphabet:
                w.append(a)
                if ok():
                    counts[len(w) - 1] += 1
                    if len(w) < self.max_length:
                        dfs()
                w.pop()

        if alphabet:
            dfs()
        else:
            counts = [None] * self.max_length
        self._counts = counts
        self._dirty = False
        return counts

    def _test(self, counts, a: Fraction):
        for n, N in enumerate(counts, start=1):
            if N is None:
                return None
            if N == 0 or compare_log_ratio(N, n, a) < 0:
                return n, N
        return None

    def check(self):
        if not self.patterns:
            return None
        a = self.q.lower(self.q_index)
        self.q_index += 1
        hit = self._test(self.counts(), a)
        if hit is None:
            return None
        n, N = hit
        wit = [self.items[i] for span, lst in sorted(self.by_span.items()) if span <= n for i, _ in lst]
        return Refutation("entropy", {"n": n, "N": N, "q": a, "qIndex": self.q_index - 1}, wit,
                          len(self.patterns))

    def replays(self, items, detail):
        r = self.fresh()
        for it in items:
            r.consume(it)
        a = self.q.lower(int(detail.get("qIndex", 0)))
        return r._test(r.counts(), a) is not None


def lyndon_words(alphabet: Sequence, max_len: int) -> list[tuple]:
    """Lyndon words (primitive necklace representatives) of length <= max_len, Duval's order."""
    k = len(alphabet)
    out = []
    if k == 0 or max_len < 1:
        return out
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(alphabet[i] for i in w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
    return out


def full_shift_per(k: int, i_max: int) -> list[int]:
    """Points of least period <= i in the full k-shift, i = 1..i_max."""
    least = [0] * (i_max + 1)
    for d in range(1, i_max + 1):
        least[d] = k ** d - sum(least[e] for e in range(1, d) if d % e == 0)
    out, acc = [], 0
    for d in range(1, i_max + 1):
        acc += least[d]
        out.append(acc)
    return out


def occurs_cyclically(p: Pattern, u: tuple) -> bool:
    """Does ``p`` occur in the periodic configuration ``u^infinity``?"""
    if not p.items:
        return True
    span, cells = _word_cells(p)
    d = len(u)
    reps = -(-(span + d) // d)
    big = u * reps
    return any(all(big[s + o] == a for o, a in cells) for s in range(d))


class PeriodsAtLeastRefuter(Refuter):
    """Refutes ``Per_i(Y) >= ref(i) for all i <= i_max``.

    Candidates are Lyndon words; one of primitive length ``d`` stands for its
    ``d`` periodic points and dies when a consumed pattern occurs in it.
    """

    name = "periods"
    z_only = True

    def __init__(self, ref: Sequence[int] | Callable[[int], int], i_max: int | None = None,
                 alphabet: Sequence = ("0", "1")):
        super().__init__()
        if callable(ref):
            if i_max is None:
                raise InputError("callable ref needs i_max")
            ref = [ref(i) for i in range(1, i_max + 1)]
        ref = [int(x) for x in ref]
        i_max = len(ref) if i_max is None else i_max
        if len(ref) < i_max:
            raise InputError("ref shorter than i_max")
        self.ref = ref[:i_max]
        self.i_max = i_max
        self.alphabet = tuple(alphabet)
        if any(b < a for a, b in zip(self.ref, self.ref[1:])):
            raise InputError("ref must be nondecreasing")
        full = full_shift_per(len(self.alphabet), i_max)
        for i, (r, f) in enumerate(zip(self.ref, full), start=1):
            if r > f:
                raise InputError(f"ref({i}) = {r} exceeds the full-shift count {f}")
        self.candidates = lyndon_words(self.alphabet, i_max)
        self.killer: list[int | None] = [None] * len(self.candidates)

    def _init_args(self):
        return {"ref": self.ref, "i_max": self.i_max, "alphabet": self.alphabet}

    def params(self):
        return {"ref": self.ref, "iMax": self.i_max}

    def _consume(self, idx, p):
        if p.group != Z:
            raise InputError("periods refuter needs G = Z")
        for c, u in enumerate(self.candidates):
            if self.killer[c] is None and occurs_cyclically(p, u):
                self.killer[c] = idx

    def survivors(self) -> list[int]:
        out = [0] * self.i_max
        for u, k in zip(self.candidates, self.killer):
            if k is None:
                out[len(u) - 1] += len(u)
        return list(itertools.accumulate(out))

    def check(self):
        surv = self.survivors()
        for i, (s, r) in enumerate(zip(surv, self.ref), start=1):
            if s < r:
                idx = sorted({k for u, k in zip(self.candidates, self.killer) if k is not None and len(u) <= i})
                return Refutation("periods", {"i": i, "survivors": s, "ref": r},
                                  [self.items[j] for j in idx], len(self.patterns))
        return None


class IntersectRefuter(Refuter):
    """Refutes when either arm refutes; both arms read the same stream."""

    name = "intersect"

    def __init__(self, a: Refuter, b: Refuter):
        super().__init__()
        self.a, self.b = a.fresh(), b.fresh()
        self.z_only = a.z_only or b.z_only

    def _init_args(self):
        return {"a": self.a, "b": self.b}

    def params(self):
        return {"a": self.a.spec(), "b": self.b.spec()}

    @property
    def label(self):
        return f"intersect({self.a.label},{self.b.label})"

    def consume(self, item):
        super().consume(item)
        self.a.consume(item)
        self.b.consume(item)

    def check(self):
        for side, r in (("a", self.a), ("b", self.b)):
            res = r.check()
            if res is not None:
                res.detail = {"arm": side, **res.detail}
                return res
        return None

    def replays(self, items, detail):
        arm = self.a if detail.get("arm") == "a" else self.b
        inner = {k: v for k, v in detail.items() if k != "arm"}
        return arm.replays(items, inner)


@dataclass
class Sigma2Property:
    """A uniform union of refutable properties, with the caller's choice of index.

    Whether the shift is minimal for the selected member cannot be checked; the
    index is supplied by whoever asserts it.
    """

    members: Callable[[int], Refuter]
    selected: int = 0

    def refuter(self) -> Refuter:
        return self.members(self.selected)


# ---------------------------------------------------------------------------
# Running a refuter against a presentation
# ---------------------------------------------------------------------------

def _stream_emptiness(patterns: Sequence[Pattern], state: dict) -> list[int] | None:
    """Detect emptiness from the stream alone: the empty pattern, or every word of one length."""
    for idx in range(state.get("seen", 0), len(patterns)):
        p = patterns[idx]
        if not p.items:
            state["hit"] = [idx]
            break
        if p.group == Z and p.is_word():
            w = p.normalized().as_word()
            state.setdefault("words", {}).setdefault(len(w), {}).setdefault(w, idx)
            lst = state["words"][len(w)]
            if len(lst) == len(p.alphabet) ** len(w):
                state["hit"] = sorted(lst.values())
                break
    state["seen"] = len(patterns)
    return state.get("hit")


class RefutationRun:
    """Resumable refutation attempt.

    Given a presentation, two arms alternate (cheaper arm first): the co-language
    stream folded into the refuter, and a direct probe of the empty pattern.
    Given a bare enumeration of patterns or certificates, only the fold runs and
    emptiness is read off the stream.
    """

    def __init__(self, refuter: Refuter, source: ForbiddenPresentation | Enumeration,
                 t_step: int = DEFAULT_T_STEP, cap: int | None = None, chunk: int = 64):
        self.refuter = refuter.fresh()
        self.chunk = chunk
        if isinstance(source, ForbiddenPresentation):
            if self.refuter.z_only and source.group != Z:
                raise InputError(f"{refuter.name} refuter needs G = Z")
            self.presentation = source
            self.stream = co_language(source, t_step, cap)
            self.empty_probe = PatternProbe(source, Pattern.empty(source.group, source.alphabet), t_step, cap)
        else:
            self.presentation = None
            self.stream = source
            self.empty_probe = None
        self.fed = 0
        self.spent = 0
        self.result: Refutation | None = None
        self._empty_state: dict = {}

    @property
    def refuted(self) -> bool:
        return self.result is not None

    def advance(self, budget: int) -> int:
        """Spend at least ``budget`` units (whole steps) unless refuted first; return units spent."""
        start = self.spent
        while self.result is None and self.spent - start < budget:
            if self.stream.finished and self.empty_probe is None:
                break
            probe = self.empty_probe
            if probe is not None and probe.spent <= self.stream.spent:
                self.spent += probe.advance()
                if probe.certificate is not None:
                    self.result = Refutation("empty", {"radius": probe.certificate.radius},
                                             [probe.certificate], self.fed)
                continue
            if self.stream.finished:
                # finite stream exhausted: only the emptiness probe remains
                if probe is None:
                    break
                self.spent += probe.advance()
                if probe.certificate is not None:
                    self.result = Refutation("empty", {"radius": probe.certificate.radius},
                                             [probe.certificate], self.fed)
                continue
            before = self.stream.spent
            self.stream.step(self.chunk)
            self.spent += self.stream.spent - before
            self._feed()
        return self.spent - start

    def _feed(self) -> None:
        em = self.stream.emitted
        if self.fed == len(em):
            return
        for item in em[self.fed:]:
            self.refuter.consume(item)
        self.fed = len(em)
        hit = _stream_emptiness(self.refuter.patterns, self._empty_state)
        if hit is not None:
            self.result = Refutation("empty", {"fromStream": True}, [self.refuter.items[i] for i in hit], self.fed)
            return
        self.result = self.refuter.check()


def run_refuter(refuter: Refuter, source: ForbiddenPresentation | Enumeration, budget: int,
                **kw) -> RefutationRun:
    run = RefutationRun(refuter, source, **kw)
    run.advance(budget)
    return run


def replay_refutation(refuter: Refuter, F: ForbiddenPresentation, ref: Refutation) -> bool:
    """Budget-free check of a refutation: every witness certificate re-verifies
    against ``F`` and the witnesses alone reproduce the halt."""
    for w in ref.witnesses:
        if not isinstance(w, Certificate) or not verify_certificate(F, w):
            return False
    if ref.reason == "empty":
        if ref.detail.get("fromStream"):
            return _stream_emptiness([w.pattern for w in ref.witnesses], {}) is not None
        return len(ref.witnesses) == 1 and not ref.witnesses[0].pattern.items
    return refuter.replays(ref.witnesses, ref.detail)


# ---------------------------------------------------------------------------
# Construction by name
# ---------------------------------------------------------------------------

REFUTER_NAMES = ("nonempty", "entropy", "periods", "contains", "cylinder", "intersect")


def refuter_from_spec(name: str, params: dict | None, alphabet: Sequence, group=Z) -> Refuter:
    """Build a refuter from its CLI name and JSON parameters."""
    params = dict(params or {})

    def pat(text):
        return parse_pattern(text, alphabet, group)

    if name == "nonempty":
        return NonemptyRefuter()
    if name == "entropy":
        q = params.get("q", "0")
        return EntropyAtLeastRefuter(builtin_real(str(q)), int(params.get("maxLength", DEFAULT_ENTROPY_LENGTH)))
    if name == "periods":
        if "ref" not in params:
            raise InputError('periods needs {"ref": [...]}')
        return PeriodsAtLeastRefuter(params["ref"], params.get("iMax"), alphabet)
    if name == "contains":
        ps = params.get("patterns")
        if not ps:
            raise InputError('contains needs {"patterns": [...]}')
        return ContainsPatternsRefuter([pat(x) for x in ps])
    if name == "cylinder":
        return CylinderRefuter(pat(params.get("pattern", "{}")))
    if name == "intersect":
        a, b = params.get("a"), params.get("b")
        if not a or not b:
            raise InputError('intersect needs {"a": {...}, "b": {...}}')
        return IntersectRefuter(refuter_from_spec(a["name"], a.get("params"), alphabet, group),
                                refuter_from_spec(b["name"], b.get("params"), alphabet, group))
    raise InputError(f"unknown property {name!r}; available: {', '.join(REFUTER_NAMES)}")
