from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import FIXTURES
from ssiconform.conformance.readability import (
    ReadabilityCounts,
    ReadabilityError,
    grade_fraction,
    meets_threshold,
    readability_counts,
    readability_grade,
    syllables,
)

# counts done by hand: words, sentences, vowel groups per word
HAND_COUNTED = [
    ("short_sentence", (5, 1, 5), -1.84),
    ("single_letter", (1, 1, 1), -3.4),
    ("two_sentences", (7, 2, 7), -2.425),
    ("polysyllabic", (5, 1, 11), 12.32),
    ("contractions", (5, 2, 6), -0.455),
]


def fixture_text(name):
    return (FIXTURES / "readability" / f"{name}.txt").read_text(encoding="utf-8")


@pytest.mark.parametrize("name, counts, grade", HAND_COUNTED)
def test_fixture_texts(name, counts, grade):
    text = fixture_text(name)
    assert readability_counts(text) == ReadabilityCounts(*counts)
    assert readability_grade(text) == pytest.approx(grade, abs=0.01)


@pytest.mark.parametrize("word, n", [
    ("cat", 1), ("see", 1), ("cake", 1), ("made", 1), ("the", 1), ("water", 2),
    ("consent", 2), ("required", 3), ("before", 2), ("processing", 3), ("worry", 2),
    ("you're", 1), ("rhythm", 1), ("be", 1), ("queue", 1),
])
def test_syllables(word, n):
    assert syllables(word) == n


def test_grade_is_exact():
    assert grade_fraction("I can see the cat.") == Fraction(-46, 25)


def test_text_without_terminator_is_one_sentence():
    assert readability_counts("just words here").sentences == 1


def test_digits_and_symbols_are_not_words():
    assert readability_counts("Pay 100 $ now!").words == 2


def test_no_words_raises():
    with pytest.raises(ReadabilityError):
        grade_fraction("... 123 !")


@pytest.mark.parametrize("name, passes", [
    ("grade_exact_8", True), ("grade_under_8", True), ("grade_over_8", False),
])
def test_threshold_is_inclusive(name, passes):
    from conftest import load_trace

    text = load_trace(f"fr18_{name}").events[1].attr("text")
    assert meets_threshold(text) is passes


def test_exact_boundary_text_is_exactly_eight():
    from conftest import load_trace

    text = load_trace("fr18_grade_exact_8").events[1].attr("text")
    assert readability_counts(text) == ReadabilityCounts(68, 3, 85)
    assert grade_fraction(text) == 8
