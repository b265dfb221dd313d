"""Flesch-Kincaid grade level.

Words are maximal runs of letters and apostrophes that contain at least one
letter. A sentence ends at ``.``, ``!`` or ``?`` (or end of text) and counts
only if it holds a word. Syllables are vowel groups over ``aeiouy``, less one
for a trailing ``e``, never below one per word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

DEFAULT_THRESHOLD = Fraction(8)

_RUN = re.compile(r"(?:[^\W\d_]|')+", re.UNICODE)
_SENTENCE_END = re.compile(r"[.!?]")
_VOWELS = re.compile(r"[aeiouy]+")


class ReadabilityError(ValueError):
    pass


@dataclass(frozen=True)
class ReadabilityCounts:
    words: int
    sentences: int
    syllables: int


def _words(text: str) -> list[str]:
    return [w for w in _RUN.findall(text) if any(ch.isalpha() for ch in w)]


def syllables(word: str) -> int:
    w = word.lower()
    count = len(_VOWELS.findall(w))
    if w.endswith("e"):
        count -= 1
    return max(count, 1)


def readability_counts(text: str) -> ReadabilityCounts:
    words = _words(text)
    segments = _SENTENCE_END.split(text)
    sentences = sum(1 for seg in segments if _words(seg))
    return ReadabilityCounts(len(words), sentences, sum(syllables(w) for w in words))


def grade_fraction(text: str) -> Fraction:
    """Exact grade; raises :class:`ReadabilityError` when the text has no words."""
    counts = readability_counts(text)
    if counts.words == 0:
        raise ReadabilityError("text has no words" if text.strip() else "empty text")
    return (
        Fraction(39, 100) * Fraction(counts.words, counts.sentences)
        + Fraction(118, 10) * Fraction(counts.syllables, counts.words)
        - Fraction(1559, 100)
    )


def readability_grade(text: str) -> float:
    return float(grade_fraction(text))


def meets_threshold(text: str, threshold: Fraction | float = DEFAULT_THRESHOLD) -> bool:
    """Inclusive: a grade equal to the threshold passes."""
    return grade_fraction(text) <= Fraction(threshold)
