"""Finitely generated groups, metric balls and finite patterns.

Three group families are built in: ``Z``, ``Z^d`` and the free group ``F_k``.
Group elements are stored by a canonical hashable *key*:

* ``Z``: an ``int``
* ``Z^d``: a ``tuple`` of ``d`` ints
* ``F_k``: a freely reduced ``tuple`` of nonzero ints, ``+i`` for generator
  ``i`` and ``-i`` for its inverse (generators numbered from 1)

All three normal forms are geodesic for the standard symmetric generating
set, so the word length ``|g|_S`` is read directly off the key.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Iterator, Mapping, Sequence

Key = Any
Letter = Any

_AXES = "xyzuvw"
_FREE = "abcdefgh"


class InputError(ValueError):
    """Malformed user input: unknown generator symbol, letter or pattern text."""


class BudgetExceeded(RuntimeError):
    """An exhaustive sweep would exceed the configured extension cap."""


@dataclass(frozen=True)
class GroupSpec:
    family: str  # "Z", "Zd" or "free"
    rank: int = 1

    def __post_init__(self):
        if self.family not in ("Z", "Zd", "free"):
            raise InputError(f"unknown group family {self.family!r}")
        if self.family == "Z" and self.rank != 1:
            raise InputError("Z has rank 1")
        if self.family == "Zd" and not 1 <= self.rank <= len(_AXES):
            raise InputError(f"Z^d supported for 1 <= d <= {len(_AXES)}")
        if self.family == "free" and not 1 <= self.rank <= len(_FREE):
            raise InputError(f"free groups supported up to rank {len(_FREE)}")

    # -- naming ------------------------------------------------------------
    @property
    def name(self) -> str:
        if self.family == "Z":
            return "Z"
        if self.family == "Zd":
            return f"Z^{self.rank}"
        return f"F{self.rank}"

    @property
    def symbols(self) -> tuple[str, ...]:
        """Generator symbols in their fixed order: each generator then its inverse."""
        return _symbols(self)

    def inverse_symbol(self, s: str) -> str:
        syms = self.symbols
        i = syms.index(s)
        return syms[i ^ 1]

    # -- group law ---------------------------------------------------------
    @property
    def identity(self) -> Key:
        if self.family == "Z":
            return 0
        if self.family == "Zd":
            return (0,) * self.rank
        return ()

    def mul(self, g: Key, h: Key) -> Key:
        if self.family == "Z":
            return g + h
        if self.family == "Zd":
            return tuple(a + b for a, b in zip(g, h))
        out = list(g)
        for x in h:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def inv(self, g: Key) -> Key:
        if self.family == "Z":
            return -g
        if self.family == "Zd":
            return tuple(-a for a in g)
        return tuple(-x for x in reversed(g))

    def length(self, g: Key) -> int:
        if self.family == "Z":
            return abs(g)
        if self.family == "Zd":
            return sum(abs(a) for a in g)
        return len(g)

    def generator_key(self, s: str) -> Key:
        i = self.symbols.index(s)
        sign = -1 if i % 2 else 1
        axis = i // 2
        if self.family == "Z":
            return sign
        if self.family == "Zd":
            v = [0] * self.rank
            v[axis] = sign
            return tuple(v)
        return (sign * (axis + 1),)

    def generators(self) -> list["GroupElement"]:
        return [GroupElement(self, self.generator_key(s)) for s in self.symbols]

    def canonical_word(self, g: Key) -> tuple[str, ...]:
        syms = self.symbols
        if self.family == "Z":
            return (syms[0],) * g if g >= 0 else (syms[1],) * -g
        if self.family == "Zd":
            out: list[str] = []
            for axis, a in enumerate(g):
                out.extend([syms[2 * axis + (a < 0)]] * abs(a))
            return tuple(out)
        return tuple(syms[2 * (abs(x) - 1) + (x < 0)] for x in g)

    def order_key(self, g: Key) -> tuple:
        """Deterministic total order: word length, then lexicographic canonical word."""
        idx = _symbol_index(self)
        return (self.length(g), tuple(idx[s] for s in self.canonical_word(g)))

    def element(self, g: Key) -> "GroupElement":
        return GroupElement(self, g)


@lru_cache(maxsize=None)
def _symbols(spec: GroupSpec) -> tuple[str, ...]:
    if spec.family == "Z":
        return ("+1", "-1")
    names = _AXES if spec.family == "Zd" else _FREE
    out = []
    for c in names[: spec.rank]:
        out += [c, c + "^-1"]
    return tuple(out)


@lru_cache(maxsize=None)
def _symbol_index(spec: GroupSpec) -> dict[str, int]:
    return {s: i for i, s in enumerate(_symbols(spec))}


Z = GroupSpec("Z")


def Zd(d: int) -> GroupSpec:
    return GroupSpec("Zd", d)


def free_group(k: int) -> GroupSpec:
    return GroupSpec("free", k)


def group_from_name(name: str) -> GroupSpec:
    if name == "Z":
        return Z
    if name.startswith("Z^"):
        return Zd(int(name[2:]))
    if name.startswith("F") and name[1:].isdigit():
        return free_group(int(name[1:]))
    raise InputError(f"unknown group {name!r}")


@dataclass(frozen=True)
class GroupElement:
    spec: GroupSpec
    key: Key

    @property
    def word(self) -> tuple[str, ...]:
        return self.spec.canonical_word(self.key)

    @property
    def length(self) -> int:
        return self.spec.length(self.key)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.spec, self.spec.mul(self.key, other.key))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.spec, self.spec.inv(self.key))

    def __str__(self) -> str:
        return " ".join(self.word) or "e"


def _clean_symbol(s: str) -> str:
    return s.replace("−", "-").replace("⁻¹", "^-1")


def normalize(spec: GroupSpec, word: Iterable[str] | str) -> GroupElement:
    """Evaluate a word over the generators and return its canonical element.

    ``word`` is a sequence of symbols or a whitespace separated string,
    e.g. ``"x y x^-1"``.  Unicode minus and superscript inverses are accepted.
    """
    if isinstance(word, str):
        word = word.split()
    idx = _symbol_index(spec)
    g = spec.identity
    for raw in word:
        s = _clean_symbol(raw)
        if s == "e":
            continue
        if s not in idx:
            raise InputError(f"unknown generator symbol {raw!r} for {spec.name}")
        g = spec.mul(g, spec.generator_key(s))
    return GroupElement(spec, g)


@lru_cache(maxsize=256)
def _ball_keys(spec: GroupSpec, n: int) -> tuple:
    if n == 0:
        return (spec.identity,)
    inner = _ball_keys(spec, n - 1)
    seen = set(inner)
    gens = [spec.generator_key(s) for s in spec.symbols]
    shell = []
    for g in inner:
        if spec.length(g) != n - 1:
            continue
        for s in gens:
            h = spec.mul(g, s)
            if h not in seen:
                seen.add(h)
                shell.append(h)
    shell.sort(key=spec.order_key)
    return inner + tuple(shell)


def ball_keys(spec: GroupSpec, n: int) -> tuple:
    """Keys of ``ball(spec, n)`` in ball order."""
    if n < 0:
        raise InputError("radius must be nonnegative")
    return _ball_keys(spec, n)


def ball(spec: GroupSpec, n: int) -> list[GroupElement]:
    """Elements with ``|g|_S <= n``, ordered by length then canonical word."""
    return [GroupElement(spec, k) for k in ball_keys(spec, n)]


# ---------------------------------------------------------------------------
# Alphabets and letters
# ---------------------------------------------------------------------------

def letter_token(a: Letter) -> str:
    if isinstance(a, tuple):
        return "/".join(letter_token(x) for x in a)
    return str(a)


def parse_alphabet(text: str | Sequence) -> tuple:
    """``"01"`` or ``"0,1"`` or a sequence of letters -> tuple of letters."""
    if not isinstance(text, str):
        return tuple(text)
    if "," in text:
        return tuple(t.strip() for t in text.split(",") if t.strip())
    return tuple(text)


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    """Finite map from group elements (by key) to letters of ``alphabet``."""

    group: GroupSpec
    alphabet: tuple
    items: tuple  # ((key, letter), ...) sorted by key

    @classmethod
    def from_cells(cls, group: GroupSpec, alphabet: Sequence, cells: Mapping[Key, Letter]) -> "Pattern":
        alphabet = tuple(alphabet)
        allowed = set(alphabet)
        for a in cells.values():
            if a not in allowed:
                raise InputError(f"letter {a!r} not in alphabet {alphabet!r}")
        return cls(group, alphabet, tuple(sorted(cells.items(), key=lambda kv: kv[0])))

    @classmethod
    def from_word(cls, alphabet: Sequence, letters: Sequence, start: int = 0) -> "Pattern":
        """Word pattern on Z with support ``{start, ..., start+len-1}``."""
        return cls.from_cells(Z, alphabet, {start + i: a for i, a in enumerate(letters)})

    @classmethod
    def empty(cls, group: GroupSpec, alphabet: Sequence) -> "Pattern":
        return cls(group, tuple(alphabet), ())

    @property
    def cells(self) -> dict:
        return dict(self.items)

    @property
    def support(self) -> tuple:
        return tuple(k for k, _ in self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, key: Key) -> Letter:
        return self.cells[key]

    def span(self) -> tuple[int, int]:
        """Bounding interval of a Z pattern."""
        if self.group.family != "Z" or not self.items:
            raise ValueError("span is defined for nonempty Z patterns")
        return self.items[0][0], self.items[-1][0]

    def is_word(self) -> bool:
        if self.group.family != "Z" or not self.items:
            return False
        lo, hi = self.span()
        return hi - lo + 1 == len(self.items)

    def as_word(self) -> tuple:
        """Letters of a contiguous Z pattern (any offset)."""
        if not self.is_word():
            raise ValueError("not a contiguous Z pattern")
        return tuple(a for _, a in self.items)

    def normalized(self) -> "Pattern":
        """Z pattern translated so its leftmost cell sits at 0."""
        if not self.items:
            return self
        lo = self.items[0][0]
        return Pattern(self.group, self.alphabet, tuple((k - lo, a) for k, a in self.items))

    def restrict(self, keys: Iterable[Key]) -> "Pattern":
        keep = set(keys)
        return Pattern(self.group, self.alphabet, tuple(kv for kv in self.items if kv[0] in keep))

    def __str__(self) -> str:
        return format_pattern(self)


def word(text: str | Sequence, alphabet: Sequence = "01") -> Pattern:
    """Shorthand for a Z word pattern at offset 0 over a single-character alphabet."""
    return Pattern.from_word(tuple(alphabet), tuple(text))


def translate(g: GroupElement | Key, p: Pattern) -> Pattern:
    """Shift ``p`` by ``g``: the result has value ``p(h)`` at ``g*h``."""
    gk = g.key if isinstance(g, GroupElement) else g
    mul = p.group.mul
    return Pattern(p.group, p.alphabet,
                   tuple(sorted(((mul(gk, k), a) for k, a in p.items), key=lambda kv: kv[0])))


def _placements(group: GroupSpec, small: Sequence[Key], big: set) -> Iterator[Key]:
    """Keys g with g*small ⊆ big."""
    if not small:
        yield group.identity
        return
    if group.family == "Z":
        lo, hi = min(small), max(small)
        blo, bhi = min(big), max(big)
        for g in range(blo - lo, bhi - hi + 1):
            if all(g + k in big for k in small):
                yield g
        return
    h0 = small[0]
    h0i = group.inv(h0)
    for r in sorted(big, key=group.order_key):
        g = group.mul(r, h0i)
        if all(group.mul(g, k) in big for k in small):
            yield g


def occurs_in(p: Pattern, q: Pattern) -> bool:
    """True when some translate of ``p`` fits inside ``q`` and agrees with it."""
    if not p.items:
        return True
    qc = q.cells
    if not qc:
        return False
    mul = p.group.mul
    for g in _placements(p.group, p.support, set(qc)):
        if all(qc[mul(g, k)] == a for k, a in p.items):
            return True
    return False


def extension_region(p: Pattern, n: int) -> list:
    """support(p) ∪ ball(n), in a deterministic order."""
    region = set(p.support) | set(ball_keys(p.group, n))
    return sorted(region, key=p.group.order_key)


DEFAULT_EXTENSION_CAP = 1 << 22


def extensions(p: Pattern, n: int, cap: int = DEFAULT_EXTENSION_CAP) -> list[Pattern]:
    """Every filling of ``support(p) ∪ ball(n)`` that agrees with ``p``.

    Raises :class:`BudgetExceeded` when the number of fillings exceeds ``cap``.
    """
    cells = p.cells
    region = extension_region(p, n)
    free = [k for k in region if k not in cells]
    count = len(p.alphabet) ** len(free)
    if count > cap:
        raise BudgetExceeded(f"{count} extensions exceed cap {cap}")
    out = []
    for fill in itertools.product(p.alphabet, repeat=len(free)):
        c = dict(cells)
        c.update(zip(free, fill))
        out.append(Pattern(p.group, p.alphabet, tuple(sorted(c.items(), key=lambda kv: kv[0]))))
    return out


def enumerate_patterns(group: GroupSpec, alphabet: Sequence, shape: str | None = None) -> Iterator[Pattern]:
    """Unbounded deterministic enumeration of patterns without repetition.

    ``shape="ball"`` emits every pattern supported on some ``ball(n)``, ordered
    by ``n`` then lexicographically (cells in ball order, letters in alphabet
    order).  ``shape="word"`` (Z only) emits the words on ``{0, ..., L-1}`` for
    ``L = 1, 2, ...``; this is the default on Z because every Z pattern with an
    interval support is a translate of one of them.
    """
    alphabet = tuple(alphabet)
    if shape is None:
        shape = "word" if group.family == "Z" else "ball"
    if shape == "word":
        if group.family != "Z":
            raise InputError("word enumeration is only defined on Z")
        for L in itertools.count(1):
            for letters in itertools.product(alphabet, repeat=L):
                yield Pattern(group, alphabet, tuple(enumerate(letters)))
        return
    if shape != "ball":
        raise InputError(f"unknown shape {shape!r}")
    for n in itertools.count(0):
        keys = ball_keys(group, n)
        order = sorted(range(len(keys)), key=lambda i: keys[i] if group.family == "Z" else group.order_key(keys[i]))
        for letters in itertools.product(alphabet, repeat=len(keys)):
            cells = {keys[i]: letters[j] for j, i in enumerate(order)}
            yield Pattern(group, alphabet, tuple(sorted(cells.items(), key=lambda kv: kv[0])))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def format_pattern(p: Pattern) -> str:
    """Words on ``{0..n-1}`` print as the word; everything else as ``word:letter`` entries."""
    if p.group.family == "Z" and p.items and p.is_word() and p.items[0][0] == 0:
        toks = [letter_token(a) for a in p.as_word()]
        return "".join(toks) if all(len(t) == 1 for t in toks) else " ".join(toks)
    if not p.items:
        return "{}"
    entries = []
    for k, a in p.items:
        w = " ".join(p.group.canonical_word(k)) or "e"
        entries.append(f"{w}:{letter_token(a)}")
    return "; ".join(entries)


def parse_pattern(text: str, alphabet: Sequence, group: GroupSpec = Z) -> Pattern:
    """Inverse of :func:`format_pattern`."""
    alphabet = tuple(alphabet)
    lookup = {letter_token(a): a for a in alphabet}
    text = text.strip()
    if text == "{}":
        return Pattern.empty(group, alphabet)
    if ":" not in text:
        if group.family != "Z":
            raise InputError("bare words are only allowed on Z")
        toks = text.split() if " " in text else list(text)
        try:
            letters = [lookup[t] for t in toks]
        except KeyError as e:
            raise InputError(f"letter {e.args[0]!r} not in alphabet") from None
        return Pattern.from_word(alphabet, letters)
    cells = {}
    for entry in text.split(";"):
        entry = entry.strip()
        if not entry:
            continue
        w, _, tok = entry.rpartition(":")
        if tok.strip() not in lookup:
            raise InputError(f"letter {tok.strip()!r} not in alphabet")
        g = normalize(group, w)
        if g.key in cells:
            raise InputError(f"cell {w!r} given twice")
        cells[g.key] = lookup[tok.strip()]
    return Pattern.from_cells(group, alphabet, cells)
