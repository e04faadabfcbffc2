import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from indic_mteval.perturb import (
    Lexicon,
    PerturbType,
    admissible_types,
    affected_count,
    perturb_multiple,
    perturb_once,
    perturb_words,
)

LEX = Lexicon({"big": ["large", "huge"], "cat": ["feline"]})
words_strategy = st.lists(st.sampled_from("a b c d e f g big cat".split()), min_size=1, max_size=40)


def _half_up(n):
    from decimal import ROUND_HALF_UP, Decimal

    return int((Decimal(n) / 5).quantize(Decimal(1), rounding=ROUND_HALF_UP))


@pytest.mark.parametrize("n, k", [(1, 1), (2, 1), (3, 1), (5, 1), (7, 1), (8, 2), (10, 2), (12, 2), (13, 3), (100, 20)])
def test_affected_count(n, k):
    assert affected_count(n) == k


def test_affected_count_matches_decimal():
    for n in range(1, 2000):
        assert affected_count(n) == max(1, _half_up(n))


def test_examples():
    ten = "one two three four five six seven eight nine ten".split()
    rng = random.Random(0)
    out, pos = perturb_words(ten, PerturbType.DELETION, rng)
    assert len(out) == 8 and len(pos) == 2
    out, pos = perturb_words("a b c".split(), PerturbType.SUBSTITUTION, rng)
    assert len(pos) == 1


def test_multiple_deletion_then_insertion():
    ten = "one two three four five six seven eight nine ten".split()
    rng = random.Random(1)
    mid, _ = perturb_words(ten, PerturbType.DELETION, rng)
    out, ins = perturb_words(mid, PerturbType.INSERTION, rng)
    assert (len(mid), len(out), len(ins)) == (8, 10, 2)


def test_admissible():
    assert PerturbType.SYNONYM not in admissible_types(10)
    assert PerturbType.SYNONYM in admissible_types(10, LEX)
    assert PerturbType.DELETION not in admissible_types(1)
    with pytest.raises(ValueError):
        perturb_words(["a"], PerturbType.DELETION, random.Random(0))
    with pytest.raises(ValueError):
        perturb_once("   ")
    with pytest.raises(ValueError):
        perturb_multiple("")


@settings(max_examples=300)
@given(words_strategy, st.sampled_from(list(PerturbType)), st.integers(0, 10**6))
def test_length_deltas(words, kind, seed):
    if kind is PerturbType.DELETION and affected_count(len(words)) >= len(words):
        return
    lex = LEX if kind is PerturbType.SYNONYM else None
    out, pos = perturb_words(words, kind, random.Random(seed), lex)
    k = affected_count(len(words))
    assert len(pos) == k == len(set(pos))
    delta = {PerturbType.INSERTION: k, PerturbType.DELETION: -k}.get(kind, 0)
    assert len(out) == len(words) + delta
    if kind in (PerturbType.INSERTION, PerturbType.DELETION):
        assert out != words
    if kind is PerturbType.SUBSTITUTION and len(set(words)) >= 2:
        assert all(out[i] != words[i] for i in pos)
        assert sum(a != b for a, b in zip(out, words)) == k


def test_synonym_uses_lexicon_and_tops_up():
    words = "big a b c d e f g h i".split()  # k = 2, one covered word
    out, pos = perturb_words(words, PerturbType.SYNONYM, random.Random(0), LEX)
    assert out[0] in {"large", "huge"} and len(pos) == 2
    assert sum(a != b for a, b in zip(out, words)) == 2


def test_deterministic():
    s = "the quick brown fox jumps over the lazy dog today"
    assert perturb_once(s, LEX, seed=5) == perturb_once(s, LEX, seed=5)
    assert perturb_multiple(s, LEX, seed="x") == perturb_multiple(s, LEX, seed="x")


@settings(max_examples=200)
@given(words_strategy.filter(lambda w: len(w) >= 2), st.integers(0, 10**6))
def test_multiple_distinct_and_lengths(words, seed):
    out, (t1, t2) = perturb_multiple(" ".join(words), LEX, seed=seed)
    assert t1 is not t2
    n = len(words)
    k1 = affected_count(n)
    mid = n + {PerturbType.INSERTION: k1, PerturbType.DELETION: -k1}.get(t1, 0)
    k2 = affected_count(mid)
    final = mid + {PerturbType.INSERTION: k2, PerturbType.DELETION: -k2}.get(t2, 0)
    assert len(out.split()) == final


@pytest.mark.parametrize("lexicon", [None, LEX])
def test_type_distribution_uniform(lexicon):
    s = "big cat a b c d e f g h"
    draws = Counter(perturb_once(s, lexicon, seed=i)[1] for i in range(10_000))
    kinds = admissible_types(10, lexicon)
    assert set(draws) == set(kinds)
    assert chisquare([draws[k] for k in kinds]).pvalue > 0.001


def test_pair_distribution_uniform():
    s = "big cat a b c d e f g h"
    draws = Counter(perturb_multiple(s, LEX, seed=i)[1] for i in range(12_000))
    assert len(draws) == 12
    assert chisquare(list(draws.values())).pvalue > 0.001
