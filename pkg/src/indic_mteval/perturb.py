"""Synthetic degradation of reference translations.

Four word-level operations, each touching ``k = max(1, round_half_up(0.2 n))``
words of an ``n``-word sentence:

insertion
    insert ``k`` words drawn from the sentence's own vocabulary
substitution
    replace ``k`` words by different in-sentence words
deletion
    remove ``k`` words
synonym
    replace ``k`` words by lexicon synonyms, topping up with substitution
    when fewer than ``k`` words have entries
"""

from __future__ import annotations

import itertools
import random
from enum import Enum
from typing import Mapping, Sequence


class PerturbType(str, Enum):
    INSERTION = "insertion"
    SUBSTITUTION = "substitution"
    DELETION = "deletion"
    SYNONYM = "synonym"


class Lexicon:
    """Exact-match synonym table for one language."""

    def __init__(self, entries: Mapping[str, Sequence[str]]):
        self._entries = {}
        for word, syns in entries.items():
            syns = [s for s in dict.fromkeys(syns) if s != word]
            if not syns:
                raise ValueError(f"empty synonym list for {word!r}")
            self._entries[word] = syns

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, word: str) -> bool:
        return word in self._entries

    def synonyms(self, word: str) -> list[str]:
        return list(self._entries.get(word, ()))


def affected_count(n: int) -> int:
    """``max(1, round_half_up(n / 5))`` in exact integer arithmetic."""
    return max(1, (2 * n + 5) // 10)


def _rng(seed: int | str | random.Random) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def admissible_types(n_words: int, lexicon: Lexicon | None = None) -> list[PerturbType]:
    kinds = [PerturbType.INSERTION, PerturbType.SUBSTITUTION]
    if affected_count(n_words) < n_words:
        kinds.append(PerturbType.DELETION)
    if lexicon is not None and len(lexicon):
        kinds.append(PerturbType.SYNONYM)
    return kinds


def _substitute(words: list[str], positions: Sequence[int], vocab: list[str], rng: random.Random) -> None:
    for i in positions:
        choices = [w for w in vocab if w != words[i]]
        if choices:
            words[i] = rng.choice(choices)


def perturb_words(
    words: Sequence[str],
    kind: PerturbType,
    rng: random.Random,
    lexicon: Lexicon | None = None,
) -> tuple[list[str], list[int]]:
    """Apply one operation; return the new words and the affected positions.

    Positions index the input for substitution, synonym and deletion, and
    the output for insertion.
    """
    if not words:
        raise ValueError("cannot perturb an empty sentence")
    kind = PerturbType(kind)
    words = list(words)
    n = len(words)
    k = affected_count(n)
    vocab = sorted(set(words))

    if kind is PerturbType.DELETION:
        if k >= n:
            raise ValueError(f"deleting {k} of {n} words would empty the sentence")
        gone = sorted(rng.sample(range(n), k))
        drop = set(gone)
        return [w for i, w in enumerate(words) if i not in drop], gone

    if kind is PerturbType.INSERTION:
        inserted: list[int] = []
        for _ in range(k):
            pos = rng.randint(0, len(words))
            words.insert(pos, rng.choice(vocab))
            inserted = [p + 1 if p >= pos else p for p in inserted] + [pos]
        return words, sorted(inserted)

    if kind is PerturbType.SUBSTITUTION:
        positions = sorted(rng.sample(range(n), k))
        _substitute(words, positions, vocab, rng)
        return words, positions

    if lexicon is None:
        raise ValueError("synonym replacement needs a lexicon")
    covered = [i for i, w in enumerate(words) if w in lexicon]
    chosen = sorted(rng.sample(covered, min(k, len(covered))))
    for i in chosen:
        words[i] = rng.choice(lexicon.synonyms(words[i]))
    rest = [i for i in range(n) if i not in set(chosen)]
    topup = sorted(rng.sample(rest, k - len(chosen)))
    _substitute(words, topup, vocab, rng)
    return words, sorted(chosen + topup)


def perturb_once(
    sentence: str, lexicon: Lexicon | None = None, seed: int | str | random.Random = 0
) -> tuple[str, PerturbType]:
    words = sentence.split()
    if not words:
        raise ValueError("cannot perturb an empty sentence")
    rng = _rng(seed)
    kind = rng.choice(admissible_types(len(words), lexicon))
    out, _ = perturb_words(words, kind, rng, lexicon)
    return " ".join(out), kind


def perturb_multiple(
    sentence: str, lexicon: Lexicon | None = None, seed: int | str | random.Random = 0
) -> tuple[str, tuple[PerturbType, PerturbType]]:
    """Apply two distinct operations in a random order.

    The second operation's ``k`` is computed on the intermediate sentence.
    """
    words = sentence.split()
    if not words:
        raise ValueError("cannot perturb an empty sentence")
    rng = _rng(seed)
    first, second = rng.choice(list(itertools.permutations(admissible_types(len(words), lexicon), 2)))
    words, _ = perturb_words(words, first, rng, lexicon)
    words, _ = perturb_words(words, second, rng, lexicon)
    return " ".join(words), (first, second)
