"""Concrete Z-shifts carrying both a forbidden-pattern presentation and an exact oracle.

The oracle decides membership in the language; it is the ground truth that
every engine, refuter and reduction is tested against.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .grid import InputError, Pattern, Z, parse_alphabet
from .streams import ApproxReal, ForbiddenPresentation, rational

_GAP_FILL_CAP = 1 << 16
_STALL_LIMIT = 10_000


class UnsupportedError(InputError):
    """The requested operation is not available for this shift."""


@dataclass(eq=False)
class ZooShift:
    label: str
    alphabet: tuple
    presentation: ForbiddenPresentation
    word_oracle: Callable[[tuple], bool] | None
    tags: frozenset = frozenset()
    metadata: dict = field(default_factory=dict)

    group = Z

    def accepts_word(self, w: Sequence) -> bool:
        if self.word_oracle is None:
            raise UnsupportedError(f"{self.label} has no exact oracle")
        return self.word_oracle(tuple(w))

    def accepts(self, p: Pattern) -> bool:
        """Does ``p`` appear in some configuration of the shift?"""
        if self.word_oracle is None:
            raise UnsupportedError(f"{self.label} has no exact oracle")
        if p.group != Z:
            raise UnsupportedError("zoo shifts live on Z")
        if not p.items:
            return self.word_oracle(())
        if p.is_word():
            return self.word_oracle(p.as_word())
        lo, hi = p.span()
        cells = p.cells
        gaps = [i for i in range(lo, hi + 1) if i not in cells]
        if len(self.alphabet) ** len(gaps) > _GAP_FILL_CAP:
            raise UnsupportedError("too many gap fillings")
        for fill in itertools.product(self.alphabet, repeat=len(gaps)):
            c = dict(cells)
            c.update(zip(gaps, fill))
            if self.word_oracle(tuple(c[i] for i in range(lo, hi + 1))):
                return True
        return False

    __call__ = accepts

    def words(self, n: int) -> Iterator[tuple]:
        """Accepted words of length n in lexicographic order (depth-first, pruned by factoriality)."""
        if n == 0:
            if self.accepts_word(()):
                yield ()
            return
        stack = [()]
        while stack:
            w = stack.pop()
            if len(w) == n:
                yield w
                continue
            for a in reversed(self.alphabet):
                v = w + (a,)
                if self.accepts_word(v):
                    stack.append(v)


def _as_word(x, alphabet) -> tuple:
    if isinstance(x, Pattern):
        return x.normalized().as_word()
    if isinstance(x, str) and all(isinstance(a, str) and len(a) == 1 for a in alphabet):
        return tuple(x)
    return tuple(x)


def _contains_any(w: tuple, forb: Sequence[tuple]) -> bool:
    for f in forb:
        L = len(f)
        for i in range(len(w) - L + 1):
            if w[i:i + L] == f:
                return True
    return False


def _length_order_rejects(alphabet: tuple, oracle: Callable[[tuple], bool]) -> Iterator[Pattern]:
    stall = 0
    for L in itertools.count(1):
        found = False
        for w in itertools.product(alphabet, repeat=L):
            if not oracle(w):
                found = True
                yield Pattern.from_word(alphabet, w)
        stall = 0 if found else stall + 1
        if stall > 64 and len(alphabet) ** L > _STALL_LIMIT:
            return


# ---------------------------------------------------------------------------
# Shifts of finite type
# ---------------------------------------------------------------------------

def sft(forbidden: Iterable, alphabet: Sequence | str = "01", label: str = "") -> ZooShift:
    """Z-SFT from forbidden words; the oracle is bi-infinite extendability in the De Bruijn graph."""
    alphabet = parse_alphabet(alphabet)
    forb = [_as_word(f, alphabet) for f in forbidden]
    for f in forb:
        if not f:
            raise InputError("the empty word cannot be forbidden")
        if set(f) - set(alphabet):
            raise InputError(f"forbidden word {f} not over {alphabet}")
    w = max((len(f) for f in forb), default=1)
    m = max(w - 1, 1)
    verts = [v for v in itertools.product(alphabet, repeat=m) if not _contains_any(v, forb)]
    vset = set(verts)
    succ = {v: [v[1:] + (a,) for a in alphabet
                if v[1:] + (a,) in vset and not _contains_any(v + (a,), forb)] for v in verts}
    alive = set(verts)
    changed = True
    while changed:
        changed = False
        indeg = {v: 0 for v in alive}
        for v in alive:
            for u in succ[v]:
                if u in alive:
                    indeg[u] += 1
        for v in list(alive):
            if indeg[v] == 0 or not any(u in alive for u in succ[v]):
                alive.discard(v)
                changed = True
    short = {v[:k] for v in alive for k in range(m + 1)}
    edge_ok = {(v, u) for v in alive for u in succ[v] if u in alive}

    @lru_cache(maxsize=1 << 16)
    def oracle(x: tuple) -> bool:
        # every essential vertex has a predecessor, so factors of vertices are prefixes of vertices
        if len(x) < m:
            return x in short
        prev = x[:m]
        if prev not in alive:
            return False
        for i in range(1, len(x) - m + 1):
            cur = x[i:i + m]
            if (prev, cur) not in edge_ok:
                return False
            prev = cur
        return True

    pats = [Pattern.from_word(alphabet, f) for f in forb]
    pres = ForbiddenPresentation(Z, alphabet, pats, label=label or "sft")
    tags = {"sft"}
    if w <= 2:
        tags.add("nn")
    return ZooShift(label or "sft", alphabet, pres, oracle, frozenset(tags),
                    {"forbidden_words": forb, "window": w})


def full_shift(alphabet: Sequence | str = "01") -> ZooShift:
    z = sft([], alphabet, label=f"full:{''.join(map(str, parse_alphabet(alphabet)))}")
    z.tags = z.tags | {"period-dense", "entropy-minimal"}
    return z


def golden_mean() -> ZooShift:
    z = sft(["11"], "01", label="golden-mean")
    z.tags = z.tags | {"period-dense", "entropy-minimal"}
    z.metadata.update(per=[1, 3, 6, 10], distinguishing=["11"])
    return z


def empty_sft() -> ZooShift:
    return sft(["00", "01", "10", "11"], "01", label="empty")


# ---------------------------------------------------------------------------
# Sturmian windows
# ---------------------------------------------------------------------------

def _to_real(x, direction: str) -> ApproxReal:
    if isinstance(x, ApproxReal):
        if x.direction not in (direction, "two-sided"):
            raise InputError(f"need a {direction} approximable real, got {x.direction}")
        return x
    return rational(Fraction(x))


def window_ok(w: Sequence, lo: Fraction, hi: Fraction, one="1") -> bool:
    """Every subword u satisfies floor(lo*|u|) <= #1(u) <= ceil(hi*|u|)."""
    ones = [1 if a == one else 0 for a in w]
    n = len(ones)
    pre = [0]
    for b in ones:
        pre.append(pre[-1] + b)
    for L in range(1, n + 1):
        fl = math.floor(lo * L)
        cl = math.ceil(hi * L)
        for i in range(n - L + 1):
            c = pre[i + L] - pre[i]
            if c < fl or c > cl:
                return False
    return True


def sturmian_window(alpha_lo, beta_hi, label: str = "") -> ZooShift:
    """The window shift forbidding every length-n word whose number of ones lies
    outside ``[floor(alpha*n), ceil(beta*n)]``.

    ``alpha_lo`` must be left-approximable and ``beta_hi`` right-approximable
    (rationals are both).  Only rational endpoints get an exact oracle.
    """
    lo = _to_real(alpha_lo, "left")
    hi = _to_real(beta_hi, "right")
    alphabet = ("0", "1")
    exact = lo.exact is not None and hi.exact is not None
    if exact and lo.exact > hi.exact:
        raise InputError("need alpha <= beta")
    vacuous = exact and lo.exact <= 0 and hi.exact >= 1

    def gen():
        low_cut: dict[int, int] = {}
        high_cut: dict[int, int] = {}
        stall = 0
        for s in itertools.count():
            a_s, b_s = lo.lower(s), hi.upper(s)
            produced = False
            for n in range(1, s + 2):
                old_lo = low_cut.get(n, 0)
                old_hi = high_cut.get(n, n)
                new_lo = max(old_lo, min(math.floor(a_s * n), n + 1))
                new_hi = min(old_hi, max(math.ceil(b_s * n), -1))
                counts = list(range(old_lo, min(new_lo, n + 1)))
                counts += list(range(max(new_hi + 1, 0), old_hi + 1)) if new_hi < old_hi else []
                low_cut[n], high_cut[n] = new_lo, new_hi
                batch = []
                for c in sorted(set(counts)):
                    for pos in itertools.combinations(range(n), c):
                        w = ["0"] * n
                        for i in pos:
                            w[i] = "1"
                        batch.append(tuple(w))
                for w in sorted(batch):
                    produced = True
                    yield Pattern.from_word(alphabet, w)
            stall = 0 if produced else stall + 1
            if stall > _STALL_LIMIT:
                return

    name = label or f"sturmian:{lo.name},{hi.name}"
    pres = ForbiddenPresentation(Z, alphabet, [] if vacuous else gen, label=name)
    oracle = None
    if exact:
        a, b = lo.exact, hi.exact

        @lru_cache(maxsize=1 << 18)
        def oracle(x: tuple) -> bool:
            return window_ok(x, a, b)

    meta = {"alpha": lo.exact, "beta": hi.exact}
    return ZooShift(name, alphabet, pres, oracle, frozenset({"sturmian-window"}), meta)


# ---------------------------------------------------------------------------
# Substitutions
# ---------------------------------------------------------------------------

def _subst_matrix(sigma: dict, alphabet: tuple) -> np.ndarray:
    idx = {a: i for i, a in enumerate(alphabet)}
    M = np.zeros((len(alphabet), len(alphabet)), dtype=np.int64)
    for a, img in sigma.items():
        for b in img:
            M[idx[b], idx[a]] += 1
    return M


def is_primitive(sigma: dict, alphabet: tuple) -> bool:
    M = (_subst_matrix(sigma, alphabet) > 0).astype(np.int64)
    k = len(alphabet)
    P = M.copy()
    for _ in range((k - 1) ** 2 + 1):
        if (P > 0).all():
            return True
        P = ((P @ M) > 0).astype(np.int64)
    return bool((P > 0).all())


def apply_substitution(sigma: dict, w: Sequence) -> tuple:
    out: list = []
    for a in w:
        out.extend(sigma[a])
    return tuple(out)


def substitution_shift(sigma: dict, label: str = "") -> ZooShift:
    """Shift generated by a primitive substitution ``letter -> word``.

    The length-l language is read off ``tau^m(a0)`` at the first ``m`` where its
    set of length-l factors agrees with that of ``tau^(m+1)(a0)``; ``tau`` is a
    power of ``sigma`` fixing the first letter of ``a0``, so the iterates are
    prefixes of one another.
    """
    sigma = {a: tuple(v) for a, v in sigma.items()}
    alphabet = tuple(sigma)
    for img in sigma.values():
        if not img or set(img) - set(alphabet):
            raise InputError("substitution images must be nonempty words over the alphabet")
    if not is_primitive(sigma, alphabet):
        raise InputError("substitution is not primitive")
    # find a0 and a power P with tau = sigma^P and tau(a0) starting with a0
    a0, P = None, None
    for a in alphabet:
        b = a
        for p in range(1, len(alphabet) + 1):
            b = sigma[b][0]
            if b == a:
                a0, P = a, p
                break
        if a0 is not None:
            break

    def tau(w):
        for _ in range(P):
            w = apply_substitution(sigma, w)
        return w

    iterates = [(a0,)]
    lang: dict[int, frozenset] = {}

    def factors(w, L):
        return frozenset(w[i:i + L] for i in range(len(w) - L + 1))

    def language(L: int) -> frozenset:
        if L in lang:
            return lang[L]
        m = 0
        while True:
            while len(iterates) <= m + 1:
                nxt = tau(iterates[-1])
                if len(nxt) == len(iterates[-1]) and len(alphabet) == 1 and len(nxt) < L + 1:
                    nxt = nxt * 2  # unary: iterate by doubling
                iterates.append(nxt)
            if len(iterates[m]) >= L:
                cur, nxt = factors(iterates[m], L), factors(iterates[m + 1], L)
                if cur == nxt:
                    lang[L] = cur
                    return cur
            m += 1

    def oracle(x: tuple) -> bool:
        if not x:
            return True
        return x in language(len(x))

    if len(alphabet) == 1:
        pres = ForbiddenPresentation(Z, alphabet, [], label=label or "substitution")
    else:
        pres = ForbiddenPresentation(Z, alphabet, lambda: _length_order_rejects(alphabet, oracle),
                                     label=label or "substitution")
    return ZooShift(label or "substitution", alphabet, pres, oracle, frozenset({"minimal", "substitution"}),
                    {"sigma": sigma, "language": language})


def fibonacci() -> ZooShift:
    z = substitution_shift({"0": "01", "1": "0"}, label="fibonacci")
    z.tags = z.tags | {"sturmian"}
    return z


def thue_morse() -> ZooShift:
    return substitution_shift({"0": "01", "1": "10"}, label="thue-morse")


# ---------------------------------------------------------------------------
# Orbits, single-one, products, unions
# ---------------------------------------------------------------------------

def periodic_orbit(w: Sequence | str, alphabet: Sequence | str = "01", label: str = "") -> ZooShift:
    alphabet = parse_alphabet(alphabet)
    w = tuple(w)
    if not w:
        raise InputError("orbit word must be nonempty")
    if set(w) - set(alphabet):
        raise InputError("orbit word not over alphabet")
    d = len(w)

    def oracle(x: tuple) -> bool:
        big = w * (len(x) // d + 2)
        L = len(x)
        return any(big[i:i + L] == x for i in range(d))

    name = label or f"orbit:{''.join(map(str, w))}"
    if len(alphabet) == 1:
        pres = ForbiddenPresentation(Z, alphabet, [], label=name)
    else:
        pres = ForbiddenPresentation(Z, alphabet, lambda: _length_order_rejects(alphabet, oracle), label=name)
    return ZooShift(name, alphabet, pres, oracle, frozenset({"periodic", "minimal"}), {"word": w})


def single_one() -> ZooShift:
    alphabet = ("0", "1")

    def gen():
        for k in itertools.count():
            yield Pattern.from_word(alphabet, ("1",) + ("0",) * k + ("1",))

    def oracle(x: tuple) -> bool:
        return x.count("1") <= 1

    pres = ForbiddenPresentation(Z, alphabet, gen, label="single-one")
    return ZooShift("single-one", alphabet, pres, oracle, frozenset({"quasi-minimal"}),
                    {"distinguishing": ["1"]})


def _split(x: tuple) -> tuple[tuple, tuple]:
    return tuple(a for a, _ in x), tuple(b for _, b in x)


def product_shift(X: ZooShift, Y: ZooShift) -> ZooShift:
    alphabet = tuple((a, b) for a in X.alphabet for b in Y.alphabet)

    def lifts(p: Pattern, side: int):
        fills = Y.alphabet if side == 0 else X.alphabet
        keys = p.support
        for q in itertools.product(fills, repeat=len(keys)):
            if side == 0:
                cells = {k: (p.cells[k], b) for k, b in zip(keys, q)}
            else:
                cells = {k: (a, p.cells[k]) for k, a in zip(keys, q)}
            yield Pattern.from_cells(Z, alphabet, cells)

    def gen():
        ix = X.presentation._seq_iter()
        iy = Y.presentation._seq_iter()
        live = [(ix, 0), (iy, 1)]
        while live:
            for it, side in list(live):
                p = next(it, None)
                if p is None:
                    live.remove((it, side))
                    continue
                yield from lifts(p, side)

    name = f"product:{X.label},{Y.label}"
    if X.presentation.finite and Y.presentation.finite:
        pres = ForbiddenPresentation(Z, alphabet, list(gen()), label=name)
    else:
        pres = ForbiddenPresentation(Z, alphabet, gen, label=name)
    oracle = None
    if X.word_oracle is not None and Y.word_oracle is not None:
        def oracle(x: tuple) -> bool:
            u, v = _split(x)
            return X.word_oracle(u) and Y.word_oracle(v)
    return ZooShift(name, alphabet, pres, oracle, frozenset({"product"}), {"factors": (X, Y)})


def union_shift(X: ZooShift, Y: ZooShift) -> ZooShift:
    """Union of two shifts over one alphabet; presented by the words both oracles reject."""
    if X.alphabet != Y.alphabet:
        raise InputError("union needs a common alphabet")

    def oracle(x: tuple) -> bool:
        return X.word_oracle(x) or Y.word_oracle(x)

    name = f"union:{X.label},{Y.label}"
    pres = ForbiddenPresentation(Z, X.alphabet, lambda: _length_order_rejects(X.alphabet, oracle), label=name)
    return ZooShift(name, X.alphabet, pres, oracle, frozenset({"union"}), {"parts": (X, Y)})


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

REGISTRY_HELP = ["full", "full:<letters>", "golden-mean", "empty", "sft:<file.json>", "sturmian:<alo>,<bhi>",
                 "fibonacci", "thue-morse", "orbit:<word>", "single-one", "product:<a>,<b>"]


def _parse_real(text: str, direction: str) -> ApproxReal:
    from .streams import builtin_real
    r = builtin_real(text)
    if r.direction not in (direction, "two-sided"):
        raise InputError(f"{text} is not {direction}-approximable")
    return r


def from_name(name: str) -> ZooShift:
    """Look a shift up by its registry name."""
    name = name.strip()
    simple = {"full": lambda: full_shift("01"), "golden-mean": golden_mean, "empty": empty_sft,
              "fibonacci": fibonacci, "thue-morse": thue_morse, "single-one": single_one}
    if name in simple:
        return simple[name]()
    kind, _, arg = name.partition(":")
    if kind == "full" and arg:
        return full_shift(arg)
    if kind == "orbit" and arg:
        return periodic_orbit(arg)
    if kind == "sturmian" and "," in arg:
        a, b = arg.split(",", 1)
        return sturmian_window(_parse_real(a, "left"), _parse_real(b, "right"), label=name)
    if kind == "sft" and arg:
        with open(arg) as fh:
            d = json.load(fh)
        return sft(d["forbidden"], d.get("alphabet", "01"), label=name)
    if kind == "product" and arg:
        # split at the first comma that leaves two valid names
        for i, ch in enumerate(arg):
            if ch != ",":
                continue
            try:
                return product_shift(from_name(arg[:i]), from_name(arg[i + 1:]))
            except InputError:
                continue
    raise InputError(f"unknown shift {name!r}; available: {', '.join(REGISTRY_HELP)}")


def catalogue() -> list[ZooShift]:
    """Every zoo shift with an exact oracle, as used by the global soundness sweep."""
    return [full_shift("01"), golden_mean(), empty_sft(), sft(["01", "10"], "01", label="constant-pair"),
            sft(["00", "11"], "01", label="alternating"), sft(["aa", "bc", "cb"], "abc", label="nn-abc"),
            fibonacci(), thue_morse(), periodic_orbit("01"), periodic_orbit("1"), periodic_orbit("001"),
            single_one(), sturmian_window(0, Fraction(1, 2), label="sturmian:0,1/2"),
            sturmian_window(Fraction(1, 3), Fraction(1, 3), label="sturmian:1/3,1/3"),
            sturmian_window(Fraction(1, 4), Fraction(3, 4), label="sturmian:1/4,3/4"),
            product_shift(golden_mean(), full_shift("ab"))]
