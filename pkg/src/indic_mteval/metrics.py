"""Sentence-level BLEU, TER and chrF.

All three split words on Unicode whitespace and apply no other tokenization.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from typing import Sequence

BLEU_ORDER = 4
CHRF_ORDER = 6
CHRF_BETA = 2.0
MAX_SHIFT_SIZE = 10


def _ngrams(tokens: Sequence, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_bleu(hyp: str, ref: str, max_order: int = BLEU_ORDER) -> float:
    """Smoothed sentence BLEU in [0, 1].

    Orders longer than the hypothesis are left out of the geometric mean.
    A zero match count at order ``n >= 2`` is replaced by ``1 / (2^k * total)``
    where ``k`` counts the zero orders seen so far, this one included. No
    unigram match gives 0.
    """
    h, r = hyp.split(), ref.split()
    if not r:
        raise ValueError("reference must not be empty")
    if not h:
        return 0.0
    log_sum, orders, zeros = 0.0, 0, 0
    for n in range(1, max_order + 1):
        hyp_counts = _ngrams(h, n)
        total = sum(hyp_counts.values())
        if total == 0:
            break
        ref_counts = _ngrams(r, n)
        matches = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
        if matches == 0:
            if n == 1:
                return 0.0
            zeros += 1
            precision = 1.0 / (2**zeros * total)
        else:
            precision = matches / total
        log_sum += math.log(precision)
        orders += 1
    bp = 1.0 if len(h) >= len(r) else math.exp(1.0 - len(r) / len(h))
    return bp * math.exp(log_sum / orders)


def word_levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, y in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y))
        prev = cur
    return prev[-1]


def _shift_candidates(h: tuple, r: tuple):
    """Yield (block length, origin, destination, shifted hypothesis).

    Only blocks that occur somewhere in the reference are moved, and only to
    the reference offset of an occurrence (or that offset minus the block
    length, to account for the removal).
    """
    ref_starts: dict[tuple, list[int]] = {}
    for L in range(1, min(MAX_SHIFT_SIZE, len(r)) + 1):
        for j in range(len(r) - L + 1):
            ref_starts.setdefault(r[j : j + L], []).append(j)
    for i in range(len(h)):
        for L in range(1, min(MAX_SHIFT_SIZE, len(h) - i) + 1):
            block = h[i : i + L]
            starts = ref_starts.get(block)
            if starts is None:
                break
            rest = h[:i] + h[i + L :]
            dests = set()
            for j in starts:
                if j == i:
                    continue
                for d in (j, j - L):
                    if 0 <= d <= len(rest) and d != i:
                        dests.add(d)
            for d in sorted(dests):
                yield L, i, d, rest[:d] + block + rest[d:]


def ter_edits(hyp: Sequence[str], ref: Sequence[str]) -> tuple[int, int]:
    """Greedy TER alignment; return (number of shifts, remaining edit distance).

    Each round applies the shift that lowers the word edit distance the most,
    preferring longer blocks, then the leftmost origin, then the leftmost
    destination. The search stops when no shift lowers the distance.
    """
    r = tuple(ref)

    @lru_cache(maxsize=None)
    def dist(words: tuple) -> int:
        return word_levenshtein(words, r)

    h = tuple(hyp)
    shifts = 0
    best_ed = dist(h)
    while best_ed > 0:
        best = None
        for L, i, d, cand in _shift_candidates(h, r):
            gain = best_ed - dist(cand)
            if gain <= 0:
                continue
            rank = (gain, L, -i, -d)
            if best is None or rank > best[0]:
                best = (rank, cand)
        if best is None:
            break
        h = best[1]
        best_ed = dist(h)
        shifts += 1
    return shifts, best_ed


def ter(hyp: str, ref: str) -> float:
    """Translation edit rate: (shifts + word edits) / reference length. Lower is better."""
    h, r = hyp.split(), ref.split()
    if not r:
        raise ValueError("reference must not be empty")
    if not h:
        return 1.0
    shifts, edits = ter_edits(h, r)
    return (shifts + edits) / len(r)


def _char_ngrams(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def chrf(hyp: str, ref: str, beta: float = CHRF_BETA, max_order: int = CHRF_ORDER) -> float:
    """Character n-gram F-score in [0, 100], whitespace removed.

    Precision and recall are averaged over the orders for which both strings
    have at least one n-gram, then combined with weight ``beta`` on recall.
    """
    h, r = "".join(hyp.split()), "".join(ref.split())
    if not r:
        raise ValueError("reference must not be empty")
    if not h:
        return 0.0
    prec = rec = 0.0
    orders = 0
    for n in range(1, max_order + 1):
        hc, rc = _char_ngrams(h, n), _char_ngrams(r, n)
        h_total, r_total = sum(hc.values()), sum(rc.values())
        if h_total == 0 or r_total == 0:
            continue
        matches = sum((hc & rc).values())
        prec += matches / h_total
        rec += matches / r_total
        orders += 1
    if orders == 0:
        return 0.0
    prec /= orders
    rec /= orders
    if prec + rec == 0:
        return 0.0
    b2 = beta * beta
    return 100.0 * (1 + b2) * prec * rec / (b2 * prec + rec)


SURFACE_METRICS = {"bleu": sentence_bleu, "ter": ter, "chrf2": chrf}


def score_segment(hyp: str, ref: str, negate_ter: bool = False) -> dict[str, float]:
    scores = {name: fn(hyp, ref) for name, fn in SURFACE_METRICS.items()}
    if negate_ter:
        scores["ter"] = -scores["ter"]
    return scores
