from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symqm.trace_algebra import (ANNIHILATE, CREATE, TraceExpr, TraceWord, UnsupportedReduction,
                                 cayley_hamilton_reduce, commutator, fierz_contract, normal_order,
                                 vacuum_expectation)
from symqm.trace_algebra.words import canonical_rotation, word_text

letters = st.lists(st.sampled_from([CREATE, ANNIHILATE]), min_size=1, max_size=6).map(tuple)


@given(letters, st.integers(0, 5))
def test_canonical_rotation_is_rotation_invariant(w, k):
    k %= len(w)
    assert canonical_rotation(w) == canonical_rotation(w[k:] + w[:k])


@given(letters)
def test_word_text_round_trip(w):
    tw = TraceWord(w)
    assert TraceWord.parse(str(tw)) == tw
    assert tw.dagger().dagger() == tw
    assert tw.n_create + tw.n_annihilate == len(w)


def test_word_text_run_length():
    assert word_text((CREATE, CREATE, ANNIHILATE)) == "A2a1"
    assert TraceWord.parse("Aa") == TraceWord.parse("A1a1")
    assert TraceWord.creation(3).is_creation


def test_empty_word_rejected():
    with pytest.raises(ValueError):
        TraceWord(())


@pytest.mark.parametrize("text", ["(A2)", "3/2*(A2)(a1)", "(A2)(A3) - 1/3*(A5)", "4 + 2*(A1a1) + (A2)(a2)"])
def test_expression_text_round_trip(text):
    e = TraceExpr.parse(text, 3)
    assert TraceExpr.parse(str(e), 3) == e


def test_short_traces_vanish_or_give_rank():
    assert TraceExpr.parse("(A1)", 4) == TraceExpr.zero(4)
    assert TraceExpr.from_words([()], 4) == TraceExpr.identity(4, 4)


def test_normal_order_example():
    assert str(TraceExpr.parse("(a2)(A2)", 3).normal_order()) == "4 + 2*(A1a1) + (A2)(a2)"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_vacuum_expectation_of_aa_adagger2(n):
    assert vacuum_expectation(TraceExpr.parse("(a2)(A2)", n)) == Fraction(n * n - 1, 2)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_known_commutators(n):
    got = commutator(TraceExpr.parse("(A2a1)", n), TraceExpr.parse("(A3)", n))
    want = TraceExpr.parse("3/2*(A4)", n) - TraceExpr.parse("(A2)(A2)", n) * Fraction(3, 2 * n)
    assert got == want
    assert commutator(TraceExpr.parse("(A1a1)", n), TraceExpr.parse("(A3)", n)) == TraceExpr.parse("3/2*(A3)", n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_number_operator_counts_quanta(n):
    num = TraceExpr.parse("2*(A1a1)", n)  # (a^dagger a) = 1/2 sum_A a+_A a_A
    for k in range(2, 6):
        x = TraceExpr.creation_brick(k, n)
        assert commutator(num, x) == x * k


small_exprs = st.sampled_from(["(A2)", "(a2)", "(A1a1)", "(A3)", "(a3)", "(A2a1)", "(A1a2)"])


@settings(max_examples=25, deadline=None)
@given(small_exprs, small_exprs, small_exprs)
def test_jacobi_identity(x, y, z):
    n = 3
    a, b, c = (TraceExpr.parse(t, n) for t in (x, y, z))
    total = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
             + commutator(c, commutator(a, b)))
    assert total == TraceExpr.zero(n)


@settings(max_examples=25, deadline=None)
@given(small_exprs, small_exprs)
def test_commutator_dagger(x, y):
    n = 4
    a, b = TraceExpr.parse(x, n), TraceExpr.parse(y, n)
    assert commutator(a, b).dagger() == commutator(b.dagger(), a.dagger())
    assert commutator(a, b) == -1 * commutator(b, a)


def test_normal_order_idempotent():
    e = TraceExpr.parse("(a2)(A3)(a1A2)", 3)
    once = normal_order(e)
    assert once.is_normal_ordered()
    assert normal_order(once) == once


def test_fierz_same_word():
    n = 3
    w = TraceWord.parse("A1a1")  # canonical rotation (A, a)
    assert fierz_contract(w, None, (1, 0), n) == TraceExpr.identity(n, Fraction(n * n - 1, 2))


def test_fierz_different_words_single_letters_vanish():
    n = 3
    assert fierz_contract(TraceWord.parse("a1"), TraceWord.parse("A1"), (0, 0), n) == TraceExpr.zero(n)


def test_fierz_errors():
    w = TraceWord.parse("A1a1")
    with pytest.raises(IndexError):
        fierz_contract(w, None, (5, 0), 3)
    with pytest.raises(ValueError):
        fierz_contract(w, None, (0, 1), 3)


@pytest.mark.parametrize("n,text,want", [
    (2, "(A3)", "0"),
    (2, "(A4)", "1/2*(A2)(A2)"),
    (2, "(A6)", "1/4*(A2)(A2)(A2)"),
    (3, "(A4)", "1/2*(A2)(A2)"),
    (3, "(A5)", "5/6*(A2)(A3)"),
    (4, "(A6)", "-1/8*(A2)(A2)(A2) + 3/4*(A2)(A4) + 1/3*(A3)(A3)"),
])
def test_cayley_hamilton_examples(n, text, want):
    assert cayley_hamilton_reduce(TraceExpr.parse(text, n)) == TraceExpr.parse(want, n)


def test_cayley_hamilton_rejects_long_mixed_traces():
    with pytest.raises(UnsupportedReduction):
        cayley_hamilton_reduce(TraceExpr.parse("(A3a1)", 3))


def _random_traceless(n, rng):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return m - np.trace(m) / n * np.eye(n)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cayley_hamilton_numerically(n, rng):
    x = _random_traceless(n, rng)
    tr = {k: np.trace(np.linalg.matrix_power(x, k)) for k in range(0, 2 * n + 3)}
    for k in range(n + 1, 2 * n + 3):
        red = cayley_hamilton_reduce(TraceExpr.creation_brick(k, n))
        val = 0
        for mono in red.monomials():
            term = complex(mono.coeff)
            for w in mono.traces:
                term *= tr[len(w)]
            val += term
        assert abs(val - tr[k]) <= 1e-9 * max(1.0, abs(tr[k]))
