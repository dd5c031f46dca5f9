import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from effshift.exhaust import LineAutomaton, certify_generic, certify_line
from effshift.grid import Pattern, Z, Zd, extensions, format_pattern, occurs_in, word
from effshift.streams import (Certificate, ForbiddenPresentation, Outcome, PatternProbe, ApproxReal, builtin_real,
                              cells_for_pass, co_language, compare_log_ratio, convergents_golden_ratio_conjugate,
                              emptiness_certificate, forbid_pattern, golden_ratio_conjugate, list_enumeration,
                              log_golden_mean, rational, verify_certificate)
from effshift.zoo import full_shift, golden_mean, sturmian_window


def sft_presentation(*words, alphabet="01"):
    return ForbiddenPresentation(Z, alphabet, [word(w, alphabet) for w in words])


def brute_certified(forbidden, p, n):
    """Independent oracle: every extension to ball(n) contains a forbidden pattern."""
    return all(any(occurs_in(f, e) for f in forbidden) for e in extensions(p, n))


# --- exhaustion back ends ---------------------------------------------------

gap_patterns = st.dictionaries(st.integers(0, 3), st.sampled_from("01"), min_size=1, max_size=3)


@settings(max_examples=120, deadline=None)
@given(st.lists(gap_patterns, min_size=1, max_size=4),
       st.dictionaries(st.integers(-2, 2), st.sampled_from("01"), max_size=3),
       st.integers(0, 3))
def test_line_automaton_agrees_with_generic_search(forb_cells, p_cells, n):
    forbidden = [Pattern.from_cells(Z, "01", c) for c in forb_cells]
    p = Pattern.from_cells(Z, "01", p_cells)
    line = certify_line(LineAutomaton(forbidden, "01"), p, n, 1 << 16)
    generic = certify_generic(forbidden, p, n, 1 << 16)
    assert line.certified == generic.certified == brute_certified(forbidden, p, n)


def test_generic_search_on_z2():
    # all four vertical dominoes forbidden: Z^2 admits no configuration
    g = Zd(2)
    up = (0, 1)
    forb = [Pattern.from_cells(g, "01", {(0, 0): a, up: b}) for a in "01" for b in "01"]
    empty = Pattern.empty(g, "01")
    assert certify_generic(forb, empty, 1, 1 << 16).certified
    assert not certify_generic(forb[:2], empty, 1, 1 << 16).certified


# --- co-language examples ---------------------------------------------------

def test_gap_pattern_is_emitted():
    F = sft_presentation("01", "10")
    gap = Pattern.from_cells(Z, "01", {0: "0", 2: "1"})
    co = co_language(F, candidates=[gap, word("00")])
    co.step(10_000)
    assert co.patterns() == [gap]
    cert = co.emitted[0]
    assert verify_certificate(F, cert)


def test_window_presentation_emits_110():
    z = sturmian_window(0, Fraction(1, 2))
    co = co_language(z.presentation, candidates=[word("110"), word("0101")])
    co.step(50_000)
    assert word("110") in co.patterns()
    assert word("0101") not in co.patterns()


def test_forbidding_one_eventually_emits_every_word_with_a_one():
    F = sft_presentation("1")
    co = co_language(F)
    targets = {word("".join(w)) for L in range(1, 5) for w in itertools.product("01", repeat=L) if "1" in w}
    assert co.run_until(lambda: targets <= set(co.patterns()), 200_000, chunk=64)
    assert not any("1" not in format_pattern(p) for p in co.patterns())


def test_golden_mean_plus_zero_is_empty():
    F = forbid_pattern(golden_mean().presentation, word("0"))
    v = emptiness_certificate(F, 10_000)
    assert v.outcome is Outcome.YES
    # brute force: no length-2 word avoids both "11" and "0"
    assert not any("11" not in w and "0" not in w for w in map("".join, itertools.product("01", repeat=2)))


@pytest.mark.parametrize("words", [("0", "1"), ("00", "01", "10", "11")])
def test_emptiness_yes(words):
    assert emptiness_certificate(sft_presentation(*words), 10_000).outcome is Outcome.YES


def test_emptiness_never_claims_a_nonempty_shift():
    v = emptiness_certificate(golden_mean().presentation, 20_000)
    assert v.outcome is Outcome.EXHAUSTED and v.certificate is None


def test_pattern_probe_rounds_grow_radius():
    probe = PatternProbe(golden_mean().presentation, word("0"))
    for _ in range(6):
        probe.advance()
    assert probe.certificate is None and probe.round == 6
    probe = PatternProbe(golden_mean().presentation, word("0110"))
    probe.advance()
    assert probe.certificate is not None and probe.certificate.radius == 0


def test_cells_for_pass_is_doubling():
    assert [cells_for_pass(k, 16) for k in (1, 2, 3, 4, 7, 8)] == [16, 32, 32, 64, 64, 128]


# --- soundness and monotonicity ---------------------------------------------

def test_emissions_are_rejected_by_oracle_and_monotone():
    z = golden_mean()
    co = co_language(z.presentation)
    snapshots = []
    for _ in range(5):
        co.step(2_000)
        snapshots.append(list(co.patterns()))
    for a, b in zip(snapshots, snapshots[1:]):
        assert b[:len(a)] == a
    assert snapshots[-1]
    assert not any(z.accepts(p) for p in snapshots[-1])


def test_co_language_is_deterministic():
    def run():
        co = co_language(sturmian_window(Fraction(1, 3), Fraction(2, 3)).presentation)
        co.step(5_000)
        return [c.to_json() for c in co.emitted]
    assert run() == run()


# --- certificates -----------------------------------------------------------

def test_certificate_round_trip_and_tamper():
    F = golden_mean().presentation
    probe = PatternProbe(F, word("11"))
    probe.advance()
    cert = probe.certificate
    again = Certificate.from_json(cert.to_json(), Z, "01")
    assert again == cert and verify_certificate(F, again)
    # a certificate claiming a prefix that does not exist is rejected
    assert not verify_certificate(F, Certificate(cert.pattern, cert.radius, cert.prefix_len + 5))
    # "0" is in the language, so no certificate for it can verify
    assert not verify_certificate(F, Certificate(word("0"), 2, 1))


def test_tampered_prefix_length_rejected():
    F = forbid_pattern(golden_mean().presentation, word("0"))
    v = emptiness_certificate(F, 10_000)
    cert = v.certificate
    assert verify_certificate(F, cert)
    assert not verify_certificate(F, Certificate(cert.pattern, cert.radius, cert.prefix_len - 1))


def test_enumeration_step_is_prefix_closed():
    e = list_enumeration(range(10))
    assert e.step(3) == [0, 1, 2]
    assert e.step(100) == list(range(3, 10))
    assert e.finished and e.step(5) == []


# --- exact arithmetic -------------------------------------------------------

def test_compare_log_ratio_examples():
    assert compare_log_ratio(4, 2, 1) == 0
    assert compare_log_ratio(3, 1, Fraction(3, 2)) == 1  # 9 > 8
    # 2584**10 vs 2**(7*16): oracle with explicit big integers
    expect = (2584 ** 10 > 2 ** 112) - (2584 ** 10 < 2 ** 112)
    assert compare_log_ratio(2584, 16, Fraction(7, 10)) == expect


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10 ** 6), st.integers(1, 40), st.fractions(min_value=-3, max_value=30, max_denominator=50))
def test_compare_log_ratio_against_integer_powers(N, n, q):
    a, b = q.numerator, q.denominator
    lhs, rhs = N ** b, Fraction(2) ** (a * n)
    assert compare_log_ratio(N, n, q) == (lhs > rhs) - (lhs < rhs)


def test_golden_ratio_conjugate_convergents():
    conv = list(itertools.islice(convergents_golden_ratio_conjugate(), 4))
    assert conv == [Fraction(1, 2), Fraction(2, 3), Fraction(3, 5), Fraction(5, 8)]
    r = golden_ratio_conjugate()
    for k in range(1, 12):
        lo, hi = r.lower(k), r.upper(k)
        # phi - 1 is the positive root of x^2 + x - 1
        assert lo * lo + lo - 1 <= 0 <= hi * hi + hi - 1


def test_log_golden_mean_stream():
    xs = list(itertools.islice(log_golden_mean().stream(), 25))
    assert xs == sorted(xs)
    assert all(x < Fraction(7, 10) for x in xs)
    r = log_golden_mean()
    assert r.lower(300) > Fraction(69, 100)
    # every term stays below log2(N_n)/n, an upper bound for the entropy (N_n = F_{n+2})
    fib = [0, 1]
    while len(fib) < 60:
        fib.append(fib[-1] + fib[-2])
    for x in xs + [r.lower(300)]:
        assert compare_log_ratio(fib[52], 50, x) > 0


def test_builtin_reals():
    assert builtin_real("rational(1/3)").lower(3) == Fraction(1, 3)
    assert builtin_real("2/5").upper(1) == Fraction(2, 5)
    assert isinstance(builtin_real("logGoldenMean"), ApproxReal)
    assert rational(Fraction(1, 2)).direction == "two-sided"
