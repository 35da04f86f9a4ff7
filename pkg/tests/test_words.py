from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from apfree.words import (
    BinaryWord, Progression, WordFormatError, completes_ap, find_subsequence_shift,
    format_word, is_k_ap_free, is_subsequence, longest_ap, longest_ap_mask,
    one_positions, parse_word, shift_word,
)
from oracles import brute_longest_ap, ones, word_value

bits = st.lists(st.integers(0, 1), min_size=1, max_size=40).map(tuple)


def test_parse_and_format_roundtrip():
    w = parse_word("0.1011")
    assert w.digits == (1, 0, 1, 1)
    assert parse_word("1011") == w
    assert format_word(w) == "1011"
    assert format_word(w, prefix=True) == "0.1011"


@pytest.mark.parametrize("text,pos", [("10a1", 3), ("0.12", 4), ("", 1), ("0.", 3)])
def test_parse_errors_name_position(text, pos):
    with pytest.raises(WordFormatError, match=f"position {pos}"):
        parse_word(text)


def test_word_rejects_bad_digits():
    with pytest.raises(ValueError):
        BinaryWord((0, 2))
    with pytest.raises(ValueError):
        BinaryWord(())


@given(bits)
def test_encodings_agree(d):
    w = BinaryWord(d)
    assert w.value == word_value(d)
    assert BinaryWord.from_int(w.as_int, w.length) == w
    assert BinaryWord.from_value(w.value, w.length) == w
    assert BinaryWord.from_positions(one_positions(w), w.length) == w
    assert w.position_mask == sum(1 << (p - 1) for p in one_positions(w))


def test_from_value_rejects_non_dyadic():
    with pytest.raises(ValueError):
        BinaryWord.from_value(Fraction(1, 3), 8)


def test_longest_ap_exhaustive_small():
    for N in range(1, 13):
        for d in product((0, 1), repeat=N):
            w = BinaryWord(d)
            L, start, gap = brute_longest_ap(ones(d))
            assert longest_ap_mask(w.position_mask) == (L, start, gap), d


@given(bits)
def test_longest_ap_matches_oracle(d):
    w = BinaryWord(d)
    L, prog = longest_ap(w)
    exp = brute_longest_ap(ones(d))
    assert L == exp[0]
    if L:
        assert (prog.start, prog.gap) == exp[1:]
        assert set(prog.positions) <= set(one_positions(w))


def test_longest_ap_examples():
    assert longest_ap(parse_word("0000")) == (0, None)
    assert longest_ap(parse_word("0100")) == (1, Progression(2, 1, 1))
    assert longest_ap(parse_word("1010101")) == (4, Progression(1, 2, 4))
    assert is_k_ap_free(parse_word("1101"), 3)
    assert not is_k_ap_free(parse_word("1110"), 3)


@given(st.sets(st.integers(1, 30), max_size=12), st.integers(3, 5))
def test_completes_ap(positions, k):
    p = max(positions, default=0) + 1 + (len(positions) % 3)
    before = brute_longest_ap(positions)[0]
    # a new k-AP ending at p exists iff it was absent before and present after
    after = brute_longest_ap(positions | {p})
    grew = any(
        all(p - t * d in positions for t in range(1, k)) for d in range(1, p)
    )
    assert completes_ap(sorted(positions), p, k) == grew
    if before < k and after[0] >= k:
        assert grew


def test_completes_ap_rejects_inner_position():
    with pytest.raises(ValueError):
        completes_ap([1, 5], 3, 3)


def test_shift_word():
    w = parse_word("110101")
    assert str(shift_word(w, 2)) == "0101"
    assert shift_word(w, 0) == w
    assert shift_word(w, 6) == BinaryWord((0,))
    assert shift_word(w, 2).value == (w.value * 4) % 1
    with pytest.raises(ValueError):
        shift_word(w, 7)


def test_subsequence():
    x = parse_word("1101")
    assert is_subsequence(parse_word("0110"), x, 1)
    assert not is_subsequence(parse_word("1101"), x, 1)
    assert is_subsequence(x, x, 0)
    assert find_subsequence_shift(parse_word("0011"), x) == 2
    assert find_subsequence_shift(parse_word("0000"), x) == 0
    assert find_subsequence_shift(parse_word("1111"), x) is None


@given(bits, bits, st.integers(0, 5))
def test_subsequence_inherits_ap_freedom(dx, dy, shift):
    x, y = BinaryWord(dx), BinaryWord(dy)
    if is_subsequence(y, x, shift):
        assert longest_ap(y)[0] <= longest_ap(x)[0]
