"""Budgeted enumerations, forbidden-pattern presentations and the co-language prober.

Everything that would run forever in the computability-theoretic reading is
driven here by an explicit budget.  The budget unit is one containment test
as counted by :mod:`effshift.exhaust`; in addition each prober pays one unit
per cell of forbidden pattern the first time it reads that far into the
presentation.
"""
from __future__ import annotations

import bisect
import enum
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Sequence

from .exhaust import LineAutomaton, ProbeResult, certify_generic, certify_line, contiguous_fillings
from .grid import (DEFAULT_EXTENSION_CAP, GroupSpec, InputError, Pattern,
                   enumerate_patterns, format_pattern, parse_pattern)

DEFAULT_T_STEP = 16


def extension_cap() -> int:
    """Extension cap, overridable through ``EFFSHIFT_EXTENSION_CAP``."""
    raw = os.environ.get("EFFSHIFT_EXTENSION_CAP")
    return int(raw) if raw else DEFAULT_EXTENSION_CAP


class LazySeq:
    """Memoised prefix of a (possibly infinite) iterator."""

    def __init__(self, it: Iterable):
        self._it = iter(it)
        self._items: list = []
        self.finished = False

    def _fill(self, n: int) -> None:
        while not self.finished and len(self._items) < n:
            try:
                self._items.append(next(self._it))
            except StopIteration:
                self.finished = True

    def prefix(self, n: int) -> list:
        self._fill(n)
        return self._items[:n]

    def __getitem__(self, i: int):
        self._fill(i + 1)
        return self._items[i]

    def available(self, n: int) -> int:
        """``min(n, total length)``."""
        self._fill(n)
        return min(n, len(self._items))


class Enumeration:
    """Deterministic stateful producer driven by ``step(budget)``.

    ``source`` yields ``(cost, items)`` chunks.  A chunk is atomic: ``step``
    keeps pulling chunks until the units spent in this call reach ``budget``,
    so emissions always form a prefix of one fixed infinite schedule and are
    never retracted.
    """

    def __init__(self, source: Iterator[tuple[int, list]]):
        self._source = source
        self.emitted: list = []
        self.spent = 0
        self.finished = False

    def step(self, budget: int) -> list:
        new: list = []
        used = 0
        while used < budget and not self.finished:
            try:
                cost, items = next(self._source)
            except StopIteration:
                self.finished = True
                break
            cost = max(cost, 1)
            used += cost
            self.spent += cost
            new.extend(items)
        self.emitted.extend(new)
        return new

    def run_until(self, predicate: Callable[[], bool], budget: int, chunk: int = 1) -> bool:
        """Step in small chunks until ``predicate()`` holds or ``budget`` is spent."""
        start = self.spent
        while not predicate():
            if self.finished or self.spent - start >= budget:
                return False
            self.step(chunk)
        return True


def list_enumeration(items: Iterable) -> Enumeration:
    """Enumeration emitting one item per unit."""
    return Enumeration(((1, [x]) for x in items))


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

class ForbiddenPresentation:
    """A shift given by group, alphabet and an enumeration of forbidden patterns.

    ``forbidden`` is a zero-argument callable returning a fresh iterator of
    patterns, or a finite sequence (which marks an SFT).
    """

    def __init__(self, group: GroupSpec, alphabet: Sequence, forbidden: Callable[[], Iterable[Pattern]] | Sequence[Pattern],
                 label: str = ""):
        self.group = group
        self.alphabet = tuple(alphabet)
        self.label = label
        if callable(forbidden):
            self._factory = forbidden
            self.finite = False
        else:
            fixed = list(forbidden)
            self._factory = lambda: iter(fixed)
            self.finite = True
        self._seq = LazySeq(self._checked(self._factory()))
        self._cells: list[int] = [0]
        self._max_span: list[int] = [0]
        self._words: list[list[tuple]] = []
        self._autos: dict[tuple, LineAutomaton] = {}

    def _checked(self, it):
        for p in it:
            if p.group != self.group or (set(p.cells.values()) - set(self.alphabet)):
                raise InputError(f"forbidden pattern {p} is not over ({self.group.name}, {self.alphabet})")
            yield Pattern(self.group, self.alphabet, p.items)

    def forbidden_prefix(self, t: int) -> list[Pattern]:
        return self._seq.prefix(t)

    def available(self, t: int) -> int:
        return self._seq.available(t)

    def prefix_within_cells(self, cells: int) -> int:
        """Longest prefix (at least one pattern, when any exist) holding at most ``cells`` cells."""
        while self._cells[-1] <= cells:
            t = len(self._cells)
            if self.available(t) < t:
                break
            self.prefix_cells(t)
        t = bisect.bisect_right(self._cells, cells) - 1
        return self.available(max(t, 1))

    def prefix_cells(self, t: int) -> int:
        """Total number of cells in the first ``t`` forbidden patterns."""
        t = self.available(t)
        while len(self._cells) <= t:
            self._cells.append(self._cells[-1] + max(len(self._seq[len(self._cells) - 1].items), 1))
        return self._cells[t]

    def _seq_iter(self) -> Iterator[Pattern]:
        i = 0
        while True:
            chunk = self._seq.prefix(i + 64)
            if len(chunk) <= i:
                return
            yield from chunk[i:]
            i = len(chunk)

    def patterns(self) -> Iterator[Pattern]:
        """The forbidden patterns in order (shares the memoised prefix)."""
        return self._seq_iter()

    def forbidden_enumeration(self) -> Enumeration:
        return list_enumeration(self._checked(self._factory()))

    def _span_upto(self, t: int) -> int:
        """Largest span among the first ``t`` patterns (Z only)."""
        pats = self.forbidden_prefix(t)
        while len(self._max_span) <= len(pats):
            p = pats[len(self._max_span) - 1]
            span = p.items[-1][0] - p.items[0][0] + 1 if p.items else 0
            self._max_span.append(max(self._max_span[-1], span))
        return self._max_span[len(pats)]

    def automaton(self, t: int, max_span: int | None = None) -> LineAutomaton:
        """Automaton of the first ``t`` patterns, keeping only those of span <= ``max_span``."""
        t = self.available(t)
        if max_span is not None and max_span >= self._span_upto(t):
            max_span = None
        key = (t, max_span)
        auto = self._autos.get(key)
        if auto is None:
            pats = self.forbidden_prefix(t)
            while len(self._words) < t:
                p = pats[len(self._words)]
                self._words.append(contiguous_fillings(p, self.alphabet) if p.items else [])
            words = []
            trivial = False
            for p, ws in zip(pats, self._words):
                if not p.items:
                    trivial = True
                elif max_span is None or len(ws[0]) <= max_span:
                    words.extend(ws)
            auto = LineAutomaton.from_words(words, self.alphabet, trivial)
            if len(self._autos) > 15:
                self._autos.pop(next(iter(self._autos)))
            self._autos[key] = auto
        return auto

    def __repr__(self) -> str:
        return f"ForbiddenPresentation({self.label or '?'}, {self.group.name}, {self.alphabet})"


def forbid_pattern(F: ForbiddenPresentation, p: Pattern) -> ForbiddenPresentation:
    """Presentation of F's shift with every occurrence of ``p`` removed: ``p`` first, then F's stream."""
    if p.group != F.group:
        raise InputError("pattern and presentation live on different groups")
    p = Pattern(F.group, F.alphabet, p.items)

    def gen():
        yield p
        yield from F._seq_iter()

    out = ForbiddenPresentation(F.group, F.alphabet, gen, label=f"{F.label}-[{format_pattern(p)}]")
    out.finite = F.finite
    return out


# ---------------------------------------------------------------------------
# Certificates and verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """Co-language witness: every extension of ``pattern`` to ``ball(radius)``
    contains one of the first ``prefix_len`` forbidden patterns."""

    pattern: Pattern
    radius: int
    prefix_len: int
    budget_used: int = 0

    def to_json(self) -> dict:
        return {"pattern": format_pattern(self.pattern), "radius": self.radius,
                "prefixLen": self.prefix_len, "budgetUsed": self.budget_used}

    @classmethod
    def from_json(cls, d: dict, group: GroupSpec, alphabet: Sequence) -> "Certificate":
        try:
            return cls(parse_pattern(d["pattern"], alphabet, group), int(d["radius"]),
                       int(d["prefixLen"]), int(d.get("budgetUsed", 0)))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed certificate: {e}") from None


class Outcome(str, enum.Enum):
    YES = "yes"
    NO = "no"
    EXHAUSTED = "exhausted"


@dataclass
class Verdict:
    outcome: Outcome
    certificate: Any = None
    budget_used: int = 0
    trace: list = field(default_factory=list)

    def to_json(self, with_trace: bool = False) -> dict:
        cert = self.certificate
        if hasattr(cert, "to_json"):
            cert = cert.to_json()
        out = {"verdict": self.outcome.value, "certificate": cert, "budgetUsed": self.budget_used}
        if with_trace:
            out["trace"] = self.trace
        return out


def certify(F: ForbiddenPresentation, p: Pattern, n: int, t: int, cap: int | None = None) -> ProbeResult:
    """Probe ``p`` at radius ``n`` against the first ``t`` forbidden patterns of ``F``."""
    cap = extension_cap() if cap is None else cap
    t = F.available(t)
    if F.group.family == "Z":
        keys = [k for k, _ in p.items]
        width = max(keys + [n]) - min(keys + [-n]) + 1
        return certify_line(F.automaton(t, width), p, n, cap)
    return certify_generic(F.forbidden_prefix(t), p, n, cap)


class PrefixReader:
    """Charges one unit per forbidden cell the first time a caller reads that deep."""

    def __init__(self, F: "ForbiddenPresentation"):
        self.F = F
        self.read = 0

    def charge(self, t: int) -> int:
        t = self.F.available(t)
        if t <= self.read:
            return 0
        cost = self.F.prefix_cells(t) - self.F.prefix_cells(self.read)
        self.read = t
        return cost


def verify_certificate(F: ForbiddenPresentation, cert: Certificate, cap: int | None = None) -> bool:
    """Budget-free replay: re-run the exhaustion the certificate records."""
    if cert.prefix_len > F.available(cert.prefix_len):
        return False
    res = certify(F, cert.pattern, cert.radius, cert.prefix_len, cap)
    return res.certified and not res.skipped


def cells_for_pass(k: int, t_step: int = DEFAULT_T_STEP) -> int:
    """Forbidden-prefix cell allowance in pass ``k``: ``t_step`` times the largest power of two <= k."""
    return t_step << (k.bit_length() - 1)


class CoLanguage(Enumeration):
    """Enumeration of co-language patterns derived from a presentation.

    Candidates come from :func:`enumerate_patterns`.  In pass ``k = 1, 2, ...``
    candidate ``i`` is probed at radius ``n`` whenever ``k = (i + 1) * 2**n``,
    against the longest forbidden prefix holding at most ``cells_for_pass(k)``
    cells.  Every candidate is thus probed at every radius with an unbounded
    prefix, and each pass costs O(log k) probes.  Items are :class:`Certificate` objects.
    """

    def __init__(self, F: ForbiddenPresentation, t_step: int = DEFAULT_T_STEP, cap: int | None = None,
                 candidates: Iterable[Pattern] | None = None):
        self.presentation = F
        self.t_step = t_step
        self.cap = extension_cap() if cap is None else cap
        self.candidates = LazySeq(candidates if candidates is not None else enumerate_patterns(F.group, F.alphabet))
        self.done: set[int] = set()
        self.skipped = 0
        self.reader = PrefixReader(F)
        super().__init__(self._schedule())

    def _schedule(self):
        F = self.presentation
        for k in itertools.count(1):
            if self.candidates.finished and len(self.done) == self.candidates.available(k):
                return  # a finite candidate list, fully certified
            t = F.prefix_within_cells(cells_for_pass(k, self.t_step))
            n = 0
            probed = False
            while k % (1 << n) == 0:
                i = (k >> n) - 1
                n_here = n
                n += 1
                if i in self.done or self.candidates.available(i + 1) <= i:
                    continue
                probed = True
                p = self.candidates[i]
                used_t = F.available(t)
                res = certify(F, p, n_here, used_t, self.cap)
                units = res.units + self.reader.charge(used_t)
                if res.skipped:
                    self.skipped += 1
                if res.certified:
                    self.done.add(i)
                    yield units, [Certificate(p, n_here, used_t, self.spent + max(units, 1))]
                else:
                    yield units, []
            if not probed:
                yield 1, []  # an idle pass still costs its bookkeeping

    def patterns(self) -> list[Pattern]:
        return [c.pattern for c in self.emitted]

    def trace_lines(self) -> Iterator[str]:
        for c in self.emitted:
            yield json.dumps(c.to_json(), sort_keys=True)


def co_language(F: ForbiddenPresentation, t_step: int = DEFAULT_T_STEP, cap: int | None = None,
                candidates: Iterable[Pattern] | None = None) -> CoLanguage:
    return CoLanguage(F, t_step, cap, candidates)


class PatternProbe:
    """Focused co-language probe of one pattern: round ``j`` tries radius ``j``
    with the longest forbidden prefix of at most ``t_step * 2**j`` cells.  Resumable; ``certificate`` is set on success."""

    def __init__(self, F: ForbiddenPresentation, p: Pattern, t_step: int = DEFAULT_T_STEP, cap: int | None = None):
        self.F = F
        self.pattern = p
        self.t_step = t_step
        self.cap = extension_cap() if cap is None else cap
        self.round = 0
        self.spent = 0
        self.certificate: Certificate | None = None
        self._stalled = False
        self.reader = PrefixReader(F)

    def advance(self) -> int:
        """Run one round; returns units spent."""
        if self.certificate is not None or self._stalled:
            return 0
        n = self.round
        want = self.F.prefix_within_cells(self.t_step << n)
        t = self.F.available(want)
        res = certify(self.F, self.pattern, n, t, self.cap)
        units = max(res.units + self.reader.charge(t), 1)
        self.spent += units
        self.round += 1
        if res.certified:
            self.certificate = Certificate(self.pattern, n, t, self.spent)
        return units


def emptiness_certificate(F: ForbiddenPresentation, budget: int, t_step: int = DEFAULT_T_STEP,
                          cap: int | None = None) -> Verdict:
    """Yes when every pattern on some ``ball(n)`` is certified by a forbidden prefix.

    This is the probe of the empty pattern, so the certificate records an empty
    pattern.  Never returns No: emptiness is only semi-decidable.
    """
    probe = PatternProbe(F, Pattern.empty(F.group, F.alphabet), t_step, cap)
    while probe.spent < budget:
        probe.advance()
        if probe.certificate is not None:
            return Verdict(Outcome.YES, probe.certificate, probe.spent)
    return Verdict(Outcome.EXHAUSTED, None, probe.spent)


# ---------------------------------------------------------------------------
# Exact arithmetic
# ---------------------------------------------------------------------------

def compare_log_ratio(N: int, n: int, q: Fraction | int) -> int:
    """Sign of ``log2(N)/n - q`` as -1, 0 or 1.

    Clear cases are settled in floating point with a wide safety margin; near
    ties fall back to comparing ``N**b`` with ``2**(a*n)`` exactly.
    """
    if N < 1 or n < 1:
        raise ValueError("need N >= 1 and n >= 1")
    q = Fraction(q)
    try:
        x, qf = math.log2(N) / n, float(q)
        gap = x - qf
        if abs(gap) > 1e-12 * max(1.0, abs(x), abs(qf)):
            return 1 if gap > 0 else -1
    except OverflowError:
        pass
    a, b = q.numerator, q.denominator
    e = a * n
    if e >= 0:
        lhs, rhs = N ** b, 1 << e
    else:
        lhs, rhs = (N ** b) << -e, 1
    return (lhs > rhs) - (lhs < rhs)


def floor_log2_ratio(N: int, num: int, den: int) -> Fraction:
    """Largest multiple of ``1/den`` that is <= log2(N)/num."""
    if N < 1:
        raise ValueError("N >= 1")
    k = math.floor(math.log2(N) * den / num)
    while compare_log_ratio(N, num, Fraction(k, den)) < 0:
        k -= 1
    while compare_log_ratio(N, num, Fraction(k + 1, den)) >= 0:
        k += 1
    return Fraction(k, den)


def ceil_log2_ratio(N: int, num: int, den: int) -> Fraction:
    """Smallest multiple of ``1/den`` that is >= log2(N)/num."""
    if N < 1:
        raise ValueError("N >= 1")
    k = math.ceil(math.log2(N) * den / num)
    while compare_log_ratio(N, num, Fraction(k, den)) > 0:
        k += 1
    while compare_log_ratio(N, num, Fraction(k - 1, den)) <= 0:
        k -= 1
    return Fraction(k, den)


# ---------------------------------------------------------------------------
# Approximable reals
# ---------------------------------------------------------------------------

class ApproxReal:
    """A real given by a directed stream of rationals.

    ``direction`` is ``"left"`` (nondecreasing lower bounds), ``"right"``
    (nonincreasing upper bounds) or ``"two-sided"`` (enclosing intervals).
    ``lower(k)`` / ``upper(k)`` return the k-th bound; two-sided reals offer both.
    """

    def __init__(self, direction: str, lower: Callable[[int], Fraction] | None = None,
                 upper: Callable[[int], Fraction] | None = None, exact: Fraction | None = None, name: str = ""):
        if direction not in ("left", "right", "two-sided"):
            raise InputError(f"bad direction {direction!r}")
        if direction in ("left", "two-sided") and lower is None:
            raise InputError("left stream required")
        if direction in ("right", "two-sided") and upper is None:
            raise InputError("right stream required")
        self.direction = direction
        self._lower = lower
        self._upper = upper
        self.exact = exact
        self.name = name

    def lower(self, k: int) -> Fraction:
        if self._lower is None:
            raise InputError(f"{self.name or 'real'} has no lower approximations")
        return self._lower(k)

    def upper(self, k: int) -> Fraction:
        if self._upper is None:
            raise InputError(f"{self.name or 'real'} has no upper approximations")
        return self._upper(k)

    def stream(self) -> Iterator[Fraction]:
        f = self._lower if self.direction != "right" else self._upper
        return (f(k) for k in itertools.count())

    @classmethod
    def from_file(cls, path: str) -> "ApproxReal":
        """Load ``{"direction": ..., "values": ["p/q", ...]}``; the last value repeats."""
        with open(path) as fh:
            d = json.load(fh)
        vals = [Fraction(v) for v in d["values"]]
        if not vals:
            raise InputError("empty rational stream")
        direction = d.get("direction", "left")
        sign = 1 if direction == "left" else -1
        if any(sign * (b - a) < 0 for a, b in zip(vals, vals[1:])):
            raise InputError(f"stream is not monotone for direction {direction!r}")
        f = lambda k: vals[min(k, len(vals) - 1)]
        if direction == "left":
            return cls("left", lower=f, name=path)
        if direction == "right":
            return cls("right", upper=f, name=path)
        raise InputError("file streams must be left or right")


def rational(r: Fraction | int | str) -> ApproxReal:
    r = Fraction(r)
    return ApproxReal("two-sided", lower=lambda k: r, upper=lambda k: r, exact=r, name=str(r))


def _fib(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def golden_ratio_conjugate() -> ApproxReal:
    """(sqrt 5 - 1)/2 via continued-fraction convergents F_{k+2}/F_{k+3}: 1/2, 2/3, 3/5, ..."""

    def conv(k):
        return Fraction(_fib(k + 2), _fib(k + 3))

    # even-indexed convergents lie below, odd-indexed above
    return ApproxReal("two-sided", lower=lambda k: conv(2 * k), upper=lambda k: conv(2 * k + 1),
                      name="goldenRatioConjugate")


def convergents_golden_ratio_conjugate() -> Iterator[Fraction]:
    for k in itertools.count():
        yield Fraction(_fib(k + 2), _fib(k + 3))


def log_golden_mean() -> ApproxReal:
    """Left approximation of log2(phi) from golden-mean word counts.

    With ``N_n = F_{n+2}`` words of length n and gluing gap 1,
    ``log2(N_n)/(n+1)`` is a lower bound for the entropy; the k-th term is the
    running maximum of these bounds rounded down to multiples of ``1/(16 n)``.
    """
    cache: list[Fraction] = []

    def lower(k: int) -> Fraction:
        while len(cache) <= k:
            n = len(cache) + 1
            b = floor_log2_ratio(_fib(n + 2), n + 1, 16 * n)
            cache.append(max(b, cache[-1]) if cache else b)
        return cache[k]

    return ApproxReal("left", lower=lower, name="logGoldenMean")


def builtin_real(name: str) -> ApproxReal:
    """``rational(p/q)``, ``goldenRatioConjugate`` or ``logGoldenMean``."""
    if name.startswith("rational(") and name.endswith(")"):
        return rational(name[len("rational("):-1])
    if name == "goldenRatioConjugate":
        return golden_ratio_conjugate()
    if name == "logGoldenMean":
        return log_golden_mean()
    try:
        return rational(name)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"unknown real {name!r}") from None


def log2_float(N: int, n: int) -> float:
    """Presentation-only decimal of log2(N)/n."""
    return math.log2(N) / n if N > 0 else float("-inf")
