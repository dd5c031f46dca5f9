import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from effshift.grid import InputError, Pattern, Z, word
from effshift.zoo import (apply_substitution, catalogue, fibonacci, from_name, full_shift, golden_mean,
                          periodic_orbit, product_shift, sft, single_one, sturmian_window, substitution_shift,
                          thue_morse, union_shift, window_ok)


def words(alphabet, L):
    return itertools.product(alphabet, repeat=L)


def counts(z, n_max):
    return [sum(1 for _ in z.words(n)) for n in range(1, n_max + 1)]


# --- SFTs -------------------------------------------------------------------

def extends_both_ways(w, forbidden, alphabet, reach):
    """Independent SFT oracle: w extends by ``reach`` letters on each side avoiding every forbidden word.

    With ``reach`` at least the number of De Bruijn vertices, a surviving path
    revisits a vertex, so it closes into a bi-infinite configuration.
    """
    def clean(u):
        s = "".join(u)
        return not any(f in s for f in forbidden)
    if not clean(w):
        return False
    left = [()]
    for _ in range(reach):
        left = [(a,) + u for u in left for a in alphabet if clean((a,) + u + tuple(w[:3]))]
        if not left:
            return False
    right = [()]
    for _ in range(reach):
        right = [u + (a,) for u in right for a in alphabet if clean(tuple(w[-3:]) + u + (a,))]
        if not right:
            return False
    # fixed window <= 3 so only the junctions need checking
    return any(clean(l + tuple(w) + r) for l in left for r in right)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.text("01", min_size=1, max_size=3), min_size=1, max_size=4))
def test_sft_oracle_against_extension_search(forbidden):
    z = sft(forbidden, "01")
    reach = 2 ** 3 + 1
    for L in range(1, 6):
        for w in words("01", L):
            assert z.accepts_word(w) == extends_both_ways(w, forbidden, "01", reach), (forbidden, w)


def test_golden_mean_counts_are_fibonacci():
    assert counts(golden_mean(), 8) == [2, 3, 5, 8, 13, 21, 34, 55]
    z = golden_mean()
    assert not z.accepts(word("11")) and z.accepts(word("10101"))


def test_empty_and_full():
    assert counts(from_name("empty"), 3) == [0, 0, 0]
    assert counts(full_shift("abc"), 3) == [3, 9, 27]


# --- window shifts ----------------------------------------------------------

def test_window_examples():
    half = sturmian_window(0, Fraction(1, 2))
    assert not half.accepts(word("11"))
    assert half.accepts(word("0101"))
    third = sturmian_window(Fraction(1, 3), Fraction(1, 3))
    assert not third.accepts(word("000"))


@pytest.mark.parametrize("alpha", [Fraction(1, 4), Fraction(1, 3), Fraction(2, 5)])
def test_window_local_admissibility_matches_extendability(alpha):
    """Every locally admissible word extends to a much longer locally admissible word."""
    lo, hi = alpha, alpha + Fraction(1, 2)

    def grows(u, steps):
        if steps == 0:
            return True
        return any(window_ok(v, lo, hi) and grows(v, steps - 1)
                   for v in ((a,) + u + (b,) for a in "01" for b in "01"))

    for L in range(1, 9):
        for w in words("01", L):
            if window_ok(w, lo, hi):
                assert grows(w, 6), w


def test_window_presentation_rejects_exactly_the_oracle_rejects():
    z = sturmian_window(Fraction(1, 3), Fraction(5, 6))
    listed = set()
    for p in itertools.islice(z.presentation.patterns(), 400):
        assert not z.accepts(p)
        listed.add(p.as_word())
    # every rejected word of length <= 5 contains a listed word
    for L in range(1, 6):
        for w in words("01", L):
            if not z.accepts_word(w):
                assert any(w[i:i + len(f)] == f for f in listed for i in range(L - len(f) + 1))


def test_vacuous_window_is_full():
    assert sturmian_window(0, 1).presentation.finite
    assert counts(sturmian_window(0, 1), 4) == [2, 4, 8, 16]


# --- substitutions ----------------------------------------------------------

def factor_language(sigma, L):
    """Independent route: close the legal 2-letter words under sigma, then read
    length-L factors from sigma^k of each of them."""
    legal = set()
    for img in sigma.values():
        legal |= {tuple(img[i:i + 2]) for i in range(len(img) - 1)}
    while True:
        new = set(legal)
        for u in legal:
            v = apply_substitution(sigma, u)
            new |= {v[i:i + 2] for i in range(len(v) - 1)}
        if new == legal:
            break
        legal = new
    out = set()
    for u in legal:
        v = u
        while min(len(apply_substitution(sigma, a)) for a in sigma) and len(v) < 2 * L + 4:
            v = apply_substitution(sigma, v)
        for _ in range(2):
            v = apply_substitution(sigma, v)
        out |= {v[i:i + L] for i in range(len(v) - L + 1)}
    return out


@pytest.mark.parametrize("sigma", [{"0": "01", "1": "0"}, {"0": "01", "1": "10"}, {"0": "01", "1": "02", "2": "0"},
                                   {"a": "aab", "b": "ba"}])
def test_substitution_oracle_matches_factor_closure(sigma):
    z = substitution_shift(sigma)
    sig = {a: tuple(v) for a, v in sigma.items()}
    for L in range(1, 8):
        expect = factor_language(sig, L)
        got = {w for w in words(z.alphabet, L) if z.accepts_word(w)}
        assert got == expect, L


def test_fibonacci_examples():
    z = fibonacci()
    assert not z.accepts(word("11")) and z.accepts(word("00")) and not z.accepts(word("000"))
    assert counts(z, 6) == [2, 3, 4, 5, 6, 7]
    assert counts(z, 15) == [n + 1 for n in range(1, 16)]


def test_unary_substitution_is_a_fixed_point():
    z = substitution_shift({"0": "00"})
    assert z.accepts_word("0000") and counts(z, 3) == [1, 1, 1]


def test_non_primitive_rejected():
    with pytest.raises(InputError):
        substitution_shift({"0": "00", "1": "11"})


def test_thue_morse_is_cube_free():
    z = thue_morse()
    assert not z.accepts_word("000") and not z.accepts_word("010101") and z.accepts_word("0110")


# --- orbits, single-one, products, unions ----------------------------------

def test_orbits_and_single_one():
    z = periodic_orbit("01")
    assert counts(z, 4) == [2, 2, 2, 2]
    assert not z.accepts_word("00")
    s = single_one()
    assert s.accepts(word("1")) and s.accepts(word("0001000")) and not s.accepts(word("101"))
    assert counts(s, 5) == [n + 1 for n in range(1, 6)]


def test_product_counts_multiply():
    P = product_shift(golden_mean(), full_shift("ab"))
    assert counts(P, 2)[1] == 3 * 4
    assert counts(P, 4)[3] == 8 * 16


def test_union_oracle():
    U = union_shift(golden_mean(), periodic_orbit("1"))
    assert U.accepts_word("1111") and U.accepts_word("0100") and not U.accepts_word("0110")


def test_registry():
    assert from_name("fibonacci").label == "fibonacci"
    assert from_name("product:golden-mean,full:ab").accepts_word(((("0", "a"), ("1", "b"))))
    assert from_name("sturmian:1/4,3/4").accepts_word("0101")
    with pytest.raises(InputError, match="available"):
        from_name("no-such-shift")


def test_gap_patterns_use_fillings():
    z = golden_mean()
    assert z.accepts(Pattern.from_cells(Z, "01", {0: "1", 2: "1"}))
    assert not fibonacci().accepts(Pattern.from_cells(Z, "01", {0: "1", 2: "1", 4: "1"}))


# --- oracle laws across the zoo ---------------------------------------------

@pytest.mark.parametrize("z", catalogue(), ids=lambda z: z.label)
def test_oracles_are_factorial_and_extendable(z):
    for L in range(1, 6):
        for w in words(z.alphabet, L):
            if not z.accepts_word(w):
                continue
            assert z.accepts_word(w[1:]) and z.accepts_word(w[:-1])
            assert any(z.accepts_word((a,) + w) for a in z.alphabet)
            assert any(z.accepts_word(w + (a,)) for a in z.alphabet)


@pytest.mark.parametrize("z", catalogue(), ids=lambda z: z.label)
def test_presentations_only_forbid_rejected_words(z):
    for p in itertools.islice(z.presentation.patterns(), 60):
        assert not z.accepts(p)
