import itertools

import pytest

from effshift.analytics import per_vector_transfer
from effshift.engine import (DecisionRun, NotSeparated, decide_pattern, disjoint_separation_radius,
                             enumerate_language, product_co_language, replay_decision, separating_predicate,
                             union_co_language)
from effshift.grid import InputError, Pattern, Z, word
from effshift.properties import ContainsPatternsRefuter, NonemptyRefuter, PeriodsAtLeastRefuter
from effshift.streams import Outcome, co_language
from effshift.zoo import fibonacci, full_shift, golden_mean, periodic_orbit, product_shift, single_one, union_shift


def decided(F, refuter, text, budget=1_000_000):
    v = decide_pattern(F, refuter, word(text), budget)
    if v.outcome is not Outcome.EXHAUSTED:
        assert replay_decision(F, refuter, v.certificate)
    return v.outcome


def golden_periods(i_max=8):
    return PeriodsAtLeastRefuter(list(per_vector_transfer(golden_mean(), i_max).counts))


# --- decisions --------------------------------------------------------------

def test_golden_mean_periods_examples():
    F = golden_mean().presentation
    r = PeriodsAtLeastRefuter([1, 3, 6, 10])
    assert decided(F, r, "10") is Outcome.YES
    assert decided(F, r, "11") is Outcome.NO


def test_fibonacci_nonempty_examples():
    F = fibonacci().presentation
    assert decided(F, NonemptyRefuter(), "11") is Outcome.NO
    assert decided(F, NonemptyRefuter(), "00") is Outcome.YES


def test_single_one_contains():
    F = single_one().presentation
    r = ContainsPatternsRefuter([word("1")])
    assert decided(F, r, "1") is Outcome.YES
    assert decided(F, r, "101") is Outcome.NO


def test_unresolvable_word_stays_exhausted():
    # "00001" lies in the golden mean but in no periodic point of period <= 4
    F = golden_mean().presentation
    v = decide_pattern(F, PeriodsAtLeastRefuter([1, 3, 6, 10]), word("00001"), 50_000)
    assert v.outcome is Outcome.EXHAUSTED and v.certificate is None


def test_arms_share_budget_fairly():
    run = DecisionRun(golden_mean().presentation, PeriodsAtLeastRefuter([1, 3, 6, 10]), word("00001"))
    run.advance(30_000)
    arms = {a for a, _ in run.trace}
    assert arms == {"no", "yes"}
    biggest = max(u for _, u in run.trace)
    assert abs(run.no_arm.spent - run.yes_arm.spent) <= biggest


def test_decisions_are_deterministic_and_resumable():
    F = fibonacci().presentation
    a = decide_pattern(F, NonemptyRefuter(), word("0010"), 400_000)
    run = DecisionRun(F, NonemptyRefuter(), word("0010"))
    while not run.resolved:
        run.advance(1_000)
    assert run.verdict().outcome == a.outcome
    assert run.certificate() == a.certificate


def test_verdict_monotone_under_budget_doubling():
    F = golden_mean().presentation
    r = golden_periods()
    for text in ("0", "1010", "0110", "00100"):
        seen = None
        for b in (500, 1_000, 2_000, 4_000, 8_000, 16_000, 32_000):
            out = decide_pattern(F, r, word(text), b).outcome
            if seen is not None:
                assert out == seen
            elif out is not Outcome.EXHAUSTED:
                seen = out
        assert seen is not None


def test_mismatched_pattern_rejected():
    with pytest.raises(InputError):
        decide_pattern(golden_mean().presentation, NonemptyRefuter(), word("ab", "ab"), 10)


def test_tampered_certificate_fails_replay():
    F = golden_mean().presentation
    v = decide_pattern(F, PeriodsAtLeastRefuter([1, 3, 6, 10]), word("11"), 10_000)
    cert = dict(v.certificate)
    cert["prefixLen"] = 0
    assert not replay_decision(F, PeriodsAtLeastRefuter([1, 3, 6, 10]), cert)
    cert = dict(v.certificate, pattern="10")
    assert not replay_decision(F, PeriodsAtLeastRefuter([1, 3, 6, 10]), cert)


# --- enumeration ------------------------------------------------------------

def test_enumerate_golden_mean_words():
    z = golden_mean()
    cands = [word("".join(w)) for L in range(1, 6) for w in itertools.product("01", repeat=L)]
    res = enumerate_language(z.presentation, golden_periods(), 5_000_000, candidates=cands)
    assert not res.unresolved()
    by_len = [sum(1 for p in res.members if len(p) == L) for L in range(1, 6)]
    assert by_len == [2, 3, 5, 8, 13]
    assert all(z.accepts(p) for p in res.members)
    assert not any(z.accepts(p) for p in res.nonmembers)


def test_enumerate_single_one():
    cands = [word(t) for t in ("1", "0", "101", "0100")]
    res = enumerate_language(single_one().presentation, ContainsPatternsRefuter([word("1")]), 500_000,
                             candidates=cands)
    assert word("1") in res.members and word("101") in res.nonmembers


# --- product reduction ------------------------------------------------------

def test_product_emits_11_after_all_pairings():
    X, Y = golden_mean(), full_shift("ab")
    P = product_shift(X, Y)
    proj = product_co_language(co_language(P.presentation), "left", X.alphabet, Y.alphabet)
    target = word("11")
    assert proj.run_until(lambda: target in proj.emitted, 200_000, chunk=256)
    pairs = proj.pairings[target]
    assert len(pairs) == 4


def test_product_side_validation():
    with pytest.raises(InputError):
        product_co_language(co_language(golden_mean().presentation), "middle", "01", "ab")


# --- union reduction --------------------------------------------------------

def test_separation_radius_examples():
    gm, ones, zeros = golden_mean(), periodic_orbit("1"), periodic_orbit("0")
    assert disjoint_separation_radius(gm.accepts, ones.accepts, "01", 4) == 0
    assert disjoint_separation_radius(zeros.accepts, ones.accepts, "01", 4) == 0
    assert disjoint_separation_radius(gm.accepts, full_shift().accepts, "01", 3) == NotSeparated(3)


def test_separating_predicate_examples():
    gm, ones = golden_mean(), periodic_orbit("1")
    pred = separating_predicate(gm.accepts, ones.accepts, 0)
    assert not pred(word("1"))
    assert pred(word("11"))
    assert not pred(word("10"))
    assert pred(word("11111"))
    assert not pred(word("10100"))


def test_separating_predicate_is_exactly_the_gap_on_short_words():
    gm, ones = golden_mean(), periodic_orbit("1")
    pred = separating_predicate(gm.accepts, ones.accepts, 0)
    for L in range(1, 9):
        for w in itertools.product("01", repeat=L):
            p = word("".join(w))
            if pred(p):
                assert not gm.accepts(p)
            if ones.accepts(p) and not gm.accepts(p):
                assert pred(p)


def test_union_stream_examples():
    X, Y = golden_mean(), periodic_orbit("1")
    U = union_shift(X, Y)
    pred = separating_predicate(X.accepts, Y.accepts, 0)
    stream = union_co_language(co_language(U.presentation), pred)
    stream.step(100_000)
    emitted = set(stream.emitted)
    assert word("11") in emitted
    assert word("00") not in emitted
    assert not any(X.accepts(p) for p in emitted)
