"""Quantities read off a Z-shift's language: word counts, entropy brackets,
periodic-point counts, slope and window estimates, and a shift-invariance check.

All comparisons involving logarithms are exact (big-integer powers).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .grid import GroupSpec, InputError, Pattern, Z, ball_keys, translate
from .properties import full_shift_per, lyndon_words
from .streams import Certificate, Enumeration, ceil_log2_ratio, compare_log_ratio, floor_log2_ratio

WordOracle = Callable[[tuple], bool]


def _word_oracle(oracle) -> tuple[WordOracle, tuple]:
    """Accept a zoo shift or a ``(word_oracle, alphabet)`` pair."""
    if hasattr(oracle, "accepts_word"):
        return oracle.accepts_word, tuple(oracle.alphabet)
    fn, alphabet = oracle
    return fn, tuple(alphabet)


def accepted_words(oracle, n: int) -> Iterable[tuple]:
    """Accepted words of length ``n`` in lexicographic order, pruning rejected prefixes."""
    fn, alphabet = _word_oracle(oracle)
    if n == 0:
        if fn(()):
            yield ()
        return
    stack = [()]
    while stack:
        w = stack.pop()
        if len(w) == n:
            yield w
            continue
        for a in reversed(alphabet):
            v = w + (a,)
            if fn(v):
                stack.append(v)


def complexity_count(oracle, n: int) -> int:
    """Number of accepted words of length ``n``."""
    return sum(1 for _ in accepted_words(oracle, n))


def complexity_table(oracle, max_n: int) -> list[tuple[int, int]]:
    return [(n, complexity_count(oracle, n)) for n in range(1, max_n + 1)]


# ---------------------------------------------------------------------------
# Entropy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyInterval:
    """``[log2(N)/(n+k), log2(N)/n]``, kept symbolically as ``(N, n, k)``.

    For a strongly irreducible Z-shift with gluing gap ``k`` and ``N`` words of
    length ``n``, concatenating blocks gives ``N_{m(n+k)} >= N^m``, hence the
    lower end; subadditivity gives the upper end.
    """

    N: int
    n: int
    k: int

    def __post_init__(self):
        if self.N < 1 or self.n < 1 or self.k < 0:
            raise InputError("need N >= 1, n >= 1, k >= 0")

    def contains(self, x: Fraction) -> bool:
        x = Fraction(x)
        return compare_log_ratio(self.N, self.n + self.k, x) <= 0 <= compare_log_ratio(self.N, self.n, x)

    def contains_log2_of(self, lo: Fraction, hi: Fraction) -> bool:
        """Certify ``log2(y)`` lies inside for every ``y`` in ``[lo, hi]`` (``lo > 0``).

        Holds when ``lo**(n+k) >= N`` and ``hi**n <= N``, checked on integers.
        """
        lo, hi = Fraction(lo), Fraction(hi)
        if lo <= 0 or lo > hi:
            raise InputError("need 0 < lo <= hi")
        m = self.n + self.k
        return (lo.numerator ** m >= self.N * lo.denominator ** m
                and hi.numerator ** self.n <= self.N * hi.denominator ** self.n)

    def width_at_most(self, w: Fraction) -> bool:
        """``log2(N) * k / (n (n+k)) <= w``, exactly."""
        w = Fraction(w)
        if self.k == 0 or self.N == 1:
            return w >= 0
        return compare_log_ratio(self.N, 1, w * self.n * (self.n + self.k) / self.k) <= 0

    def rational_bounds(self, den: int = 1 << 20) -> tuple[Fraction, Fraction]:
        """Outward-rounded rational enclosure with denominator ``den``."""
        return floor_log2_ratio(self.N, self.n + self.k, den), ceil_log2_ratio(self.N, self.n, den)

    def decimal(self) -> tuple[float, float]:
        """Presentation-only floats."""
        b = math.log2(self.N)
        return b / (self.n + self.k), b / self.n


def entropy_interval_si(N: int, n: int, k: int) -> EntropyInterval:
    return EntropyInterval(N, n, k)


def gluing_constant_sturmian(alpha) -> int:
    """``ceil(2 / alpha)`` for ``0 < alpha <= 1``."""
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise InputError("need 0 < alpha <= 1")
    return math.ceil(2 / alpha)


# ---------------------------------------------------------------------------
# Periodic points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerVector:
    """``counts[i-1]`` = number of periodic points with least period <= i."""

    counts: tuple[int, ...]

    @property
    def i_max(self) -> int:
        return len(self.counts)

    def __getitem__(self, i: int) -> int:
        return self.counts[i - 1]


def per_vector_brute(oracle, i_max: int, check_length: int | None = None) -> PerVector:
    """Necklace census: ``u^inf`` counts ``|u|`` points when all its length-``check_length``
    factors are accepted (default ``2 * i_max``; exact for shifts of smaller window)."""
    fn, alphabet = _word_oracle(oracle)
    L = check_length or 2 * i_max
    least = [0] * (i_max + 1)
    for u in lyndon_words(alphabet, i_max):
        d = len(u)
        big = u * (L // d + 2)
        if all(fn(big[s:s + L]) for s in range(d)):
            least[d] += d
    return PerVector(tuple(itertools.accumulate(least[1:])))


def _mobius(n: int) -> int:
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    return -res if m > 1 else res


def transition_matrix(alphabet: Sequence, forbidden: Iterable[Sequence]) -> np.ndarray:
    """0/1 transition matrix of a nearest-neighbour SFT (forbidden words of length <= 2)."""
    alphabet = tuple(alphabet)
    idx = {a: i for i, a in enumerate(alphabet)}
    M = np.ones((len(alphabet), len(alphabet)), dtype=object)
    for f in forbidden:
        f = tuple(f)
        if len(f) == 1:
            M[idx[f[0]], :] = 0
            M[:, idx[f[0]]] = 0
        elif len(f) == 2:
            M[idx[f[0]], idx[f[1]]] = 0
        else:
            raise InputError("transfer counting needs a nearest-neighbour SFT")
    return M


def per_vector_transfer(shift, i_max: int) -> PerVector:
    """``trace(M^d)`` counts points of period dividing ``d``; Moebius inversion gives least periods."""
    meta = getattr(shift, "metadata", {})
    if "forbidden_words" not in meta:
        raise InputError("transfer counting needs an SFT")
    M = transition_matrix(shift.alphabet, meta["forbidden_words"])
    fixed = [0]
    P = np.identity(len(shift.alphabet), dtype=object)
    for _ in range(i_max):
        P = P.dot(M)
        fixed.append(int(np.trace(P)))
    least = [0] + [sum(_mobius(d // e) * fixed[e] for e in range(1, d + 1) if d % e == 0)
                   for d in range(1, i_max + 1)]
    return PerVector(tuple(itertools.accumulate(least[1:])))


def full_shift_per_vector(k: int, i_max: int) -> PerVector:
    return PerVector(tuple(full_shift_per(k, i_max)))


# ---------------------------------------------------------------------------
# Slope and window recovery
# ---------------------------------------------------------------------------

def max_ones(oracle, n: int, one="1") -> int | None:
    """Largest number of ``one`` letters in an accepted length-``n`` word (None if none)."""
    fn, alphabet = _word_oracle(oracle)
    best = -1
    stack = [((), 0)]
    while stack:
        w, c = stack.pop()
        if c + (n - len(w)) <= best:
            continue
        if len(w) == n:
            best = max(best, c)
            continue
        for a in sorted(alphabet, key=lambda a: a == one):
            v = w + (a,)
            if fn(v):
                stack.append((v, c + (a == one)))
    return None if best < 0 else best


def recover_slope_max(oracle, n: int) -> tuple[int, tuple[Fraction, Fraction]]:
    """Measured maximum ``m`` and the slope range it certifies.

    In ``X_[0, alpha]`` the whole word obeys ``#1 <= ceil(alpha n)``, so
    ``m <= ceil(alpha n)`` and ``alpha > (m - 1)/n``; the reported range is
    ``[max(0, (m-1)/n), m/n]`` whenever ``m`` equals that ceiling, which the
    tests check against the oracle.
    """
    m = max_ones(oracle, n)
    if m is None:
        raise InputError("no accepted word of that length")
    return m, (max(Fraction(0), Fraction(m - 1, n)), Fraction(m, n))


def admissible_range(w: Sequence, one="1", width: Fraction = Fraction(1, 2)) -> tuple[Fraction, Fraction]:
    """Open interval of ``alpha`` for which every subword of ``w`` satisfies
    ``floor(alpha l) <= #1 <= ceil((alpha + width) l)``."""
    bits = [1 if a == one else 0 for a in w]
    pre = [0]
    for b in bits:
        pre.append(pre[-1] + b)
    lo, hi = None, None
    n = len(bits)
    for L in range(1, n + 1):
        counts = [pre[i + L] - pre[i] for i in range(n - L + 1)]
        a = Fraction(max(counts) - 1, L) - width
        b = Fraction(min(counts) + 1, L)
        lo = a if lo is None or a > lo else lo
        hi = b if hi is None or b < hi else hi
    return lo, hi


@dataclass(frozen=True)
class WindowBounds:
    """Closed hull of the slopes not yet excluded; ``None`` ends mean unbounded."""

    lo: Fraction | None
    hi: Fraction | None
    consumed: int

    @property
    def width(self) -> Fraction | None:
        return None if self.lo is None or self.hi is None else self.hi - self.lo

    def contains(self, x) -> bool:
        x = Fraction(x)
        return (self.lo is None or self.lo <= x) and (self.hi is None or x <= self.hi)


def _hull_after_removal(lo: Fraction, hi: Fraction, holes: list[tuple[Fraction, Fraction]]):
    x = lo
    moved = True
    while moved:
        moved = False
        for a, b in holes:
            if a < x < b:
                x, moved = b, True
    y = hi
    moved = True
    while moved:
        moved = False
        for a, b in holes:
            if a < y < b:
                y, moved = a, True
    return x, y


def recover_window(stream, budget: int, width: Fraction = Fraction(1, 2), one="1") -> WindowBounds:
    """Locate ``alpha`` for the window shift ``X_[alpha, alpha + width]`` from its co-language.

    Each consumed word ``w`` excludes the open range of ``alpha`` where ``w``
    meets every subword bound, since a word of the language meets them.  The
    result is the hull of what remains of ``[0, 1 - width]``.

    ``stream`` is an :class:`Enumeration` (run for ``budget`` units) or any
    iterable of patterns or certificates (``budget`` items are read).
    """
    if isinstance(stream, Enumeration):
        stream.step(budget)
        items = list(stream.emitted)
    else:
        items = list(itertools.islice(iter(stream), budget))
    holes = []
    used = 0
    for it in items:
        p = it.pattern if isinstance(it, Certificate) else it
        used += 1
        if p.group != Z or not p.items or not p.is_word():
            continue
        a, b = admissible_range(p.normalized().as_word(), one, width)
        if a < b:
            holes.append((a, b))
    if used == 0:
        return WindowBounds(None, None, 0)
    lo, hi = _hull_after_removal(Fraction(0), 1 - Fraction(width), holes)
    if lo > hi:
        raise InputError("stream excludes every slope: not a window shift of this width")
    return WindowBounds(lo, hi, used)


# ---------------------------------------------------------------------------
# Shift invariance
# ---------------------------------------------------------------------------

def invariance_check(oracle: Callable[[Pattern], bool], n: int, alphabet: Sequence = ("0", "1"),
                     group: GroupSpec = Z) -> list[tuple[Pattern, object]]:
    """Pairs ``(p, g)`` with ``p`` on ``ball(n)`` accepted but ``g p`` rejected, over generators ``g``."""
    alphabet = tuple(alphabet)
    gens = group.generators()
    out = []
    for m in range(n + 1):
        keys = ball_keys(group, m)
        for letters in itertools.product(alphabet, repeat=len(keys)):
            p = Pattern.from_cells(group, alphabet, dict(zip(keys, letters)))
            if not oracle(p):
                continue
            for g in gens:
                if not oracle(translate(g, p)):
                    out.append((p, g))
    return out
