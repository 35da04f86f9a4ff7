import json
from itertools import product

import pytest
from hypothesis import given, strategies as st

from apfree.dyadic import (
    add_mod1, block_sums, check_carry_locality, classify_sum_ones, digit_and,
    digit_or, empirical_W, multiply, one_blocks, product_ap_search, sr_decompose,
)
from apfree.enumeration import enumerate_k_ap_free
from apfree.words import BinaryWord, longest_ap, parse_word
from oracles import brute_longest_ap, ones, word_value


def pair(n_max=24):
    return st.integers(1, n_max).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(0, 1), min_size=n, max_size=n).map(tuple),
            st.lists(st.integers(0, 1), min_size=n, max_size=n).map(tuple),
        )
    )


@given(pair())
def test_add_and_multiply_match_fractions(p):
    x, y = BinaryWord(p[0]), BinaryWord(p[1])
    assert add_mod1(x, y).value == (word_value(p[0]) + word_value(p[1])) % 1
    prod = multiply(x, y)
    assert prod.length == 2 * x.length
    assert prod.value == word_value(p[0]) * word_value(p[1])


def test_worked_sum():
    assert str(add_mod1(parse_word("0111110"), parse_word("0001010"))) == "1001000"


def test_length_mismatch():
    with pytest.raises(ValueError):
        add_mod1(parse_word("01"), parse_word("011"))


@given(pair())
def test_sr_decomposition_invariants(p):
    x, y = BinaryWord(p[0]), BinaryWord(p[1])
    dec = sr_decompose(x, y)
    assert dec.invariant_failures() == []
    assert dec.s == digit_or(x, y)
    assert dec.r == digit_and(x, y)
    assert check_carry_locality(dec)
    assert 0 not in classify_sum_ones(dec).values()


def test_sr_example():
    dec = sr_decompose(parse_word("0110"), parse_word("0011"))
    assert (str(dec.s), str(dec.r), str(dec.sum)) == ("0111", "0010", "1001")
    assert classify_sum_ones(dec) == {1: 3, 4: 1}
    assert one_blocks(dec.s) == [(2, 4)]
    assert block_sums(dec) == [(2, 4, 0b1001)]


def test_invariant_failures_detect_tampering():
    dec = sr_decompose(parse_word("0110"), parse_word("0011"))
    bad = type(dec)(dec.x, dec.y, dec.r, dec.s, dec.sum)
    assert bad.invariant_failures()


def test_one_blocks():
    assert one_blocks(parse_word("1101110")) == [(1, 2), (4, 6)]
    assert one_blocks(parse_word("0000")) == []
    assert one_blocks(parse_word("0011")) == [(3, 4)]


def _brute_w(i, j, N):
    xs = [w for w in enumerate_k_ap_free(N, i)]
    ys = [w for w in enumerate_k_ap_free(N, j)]
    return 1 + max(brute_longest_ap(ones(add_mod1(x, y).digits))[0] for x in xs for y in ys)


@pytest.mark.parametrize("i,j,N", [(3, 3, 6), (3, 4, 7), (4, 3, 5)])
def test_empirical_w_matches_brute_force(i, j, N):
    cert = empirical_W(i, j, N)
    assert cert.exhaustive
    assert cert.w_emp == _brute_w(i, j, N)
    x, y = cert.witness_pair
    assert longest_ap(add_mod1(x, y))[0] == cert.w_emp - 1


def test_empirical_w_frozen_depth_12():
    cert = empirical_W(3, 3, 12)
    assert cert.w_emp == 9
    assert [str(w) for w in cert.witness_pair] == ["110011000001", "001100110000"]
    assert json.loads(cert.to_json())["exhaustive"] is True


def test_pair_budget_cut_is_deterministic():
    a = empirical_W(3, 3, 8, budget=500, threads=1)
    b = empirical_W(3, 3, 8, budget=500, threads=3)
    assert not a.exhaustive
    assert a.to_json() == b.to_json()
    with pytest.raises(ValueError):
        empirical_W(3, 3, 8, budget=0)


def test_product_search_frozen():
    rep = product_ap_search(3, 8)
    assert rep.exhaustive and rep.pairs_scanned == 106 * 106
    assert rep.max_L == 10
    assert [str(w) for w in rep.witness_pair] == ["10100110", "10010100"]
    assert (rep.ap_witness.start, rep.ap_witness.gap, rep.ap_witness.terms) == (4, 1, 10)
    assert sum(rep.histogram.values()) == rep.pairs_scanned


def test_product_search_small_brute():
    N = 5
    ws = list(enumerate_k_ap_free(N, 3))
    exp = max(brute_longest_ap(ones(multiply(x, y).digits))[0] for x, y in product(ws, ws))
    assert product_ap_search(3, N).max_L == exp
