from itertools import product

import pytest

from apfree.errors import BudgetExceeded
from apfree.vdw import (
    Coloring, certificate_json, find_valid_coloring, union_ap_bound_check,
    vdw_certificate, vdw_number, verify_coloring,
)
from apfree.words import Progression
from oracles import brute_longest_ap, brute_vdw, brute_vdw_colorable


@pytest.mark.parametrize("lengths", [(2, 2), (3, 2), (2, 3), (2, 2, 2), (3, 3), (4, 2), (2, 4)])
def test_vdw_matches_brute_force(lengths):
    assert vdw_number(lengths) == brute_vdw(lengths, 12)


# brute force over all colorings; slower but independent
@pytest.mark.slow
@pytest.mark.parametrize("lengths,exp", [((3, 3, 2), 14), ((4, 3), 18)])
def test_vdw_larger_brute(lengths, exp):
    assert vdw_number(lengths) == exp
    assert brute_vdw_colorable(lengths, exp - 1)


def test_vdw_frozen_values():
    assert vdw_number((3, 3, 3)) == 27
    assert vdw_number((4, 4)) == 35


def test_cap_and_certificate():
    assert vdw_number((3, 3), cap=8) is None
    cert = vdw_certificate((3, 3), cap=8)
    assert cert["n"] == "exceeds cap" and cert["certificate"] is None
    cert = vdw_certificate((3, 2))
    assert cert == {"lengths": [3, 2], "cap": 40, "n": 6, "certificate": "11211"}
    assert certificate_json(cert) == '{"cap": 40, "certificate": "11211", "lengths": [3, 2], "n": 6}'


def test_least_coloring_is_lexicographically_first():
    for lengths in [(3, 2), (2, 3), (3, 3)]:
        n = vdw_number(lengths) - 1
        got = find_valid_coloring(lengths, n)
        exp = next(
            c for c in product(range(1, len(lengths) + 1), repeat=n)
            if verify_coloring(Coloring(c), lengths) and (c[0] == 1 or lengths[0] != lengths[c[0] - 1])
        )
        assert got.colors == exp
    assert find_valid_coloring((3, 3), 9) is None


def test_threads_do_not_change_result():
    assert vdw_certificate((3, 3, 2), threads=1) == vdw_certificate((3, 3, 2), threads=4)


def test_verify_coloring_against_oracle():
    for c in product((1, 2), repeat=7):
        col = Coloring(c)
        classes = col.classes(2)
        exp = brute_longest_ap(classes[0])[0] < 3 and brute_longest_ap(classes[1])[0] < 3
        assert verify_coloring(col, (3, 3)) == exp
    assert not verify_coloring(Coloring((1, 3)), (2, 2))


def test_budget():
    with pytest.raises(BudgetExceeded) as exc:
        vdw_number((4, 4), budget=1000)
    assert "longest_valid_so_far" in exc.value.partial


def test_bad_lengths():
    with pytest.raises(ValueError):
        vdw_number((1, 3))
    with pytest.raises(ValueError):
        vdw_number(())


def test_union_check():
    assert union_ap_bound_check([{1, 2}, {3}], (3, 2), 3) == (False, Progression(1, 1, 3))
    assert union_ap_bound_check([{1, 2}, {4}], (3, 2), 3) == (True, None)
    with pytest.raises(ValueError, match="set 1"):
        union_ap_bound_check([{1, 2, 3}, {5}], (3, 2), 4)
    with pytest.raises(ValueError):
        union_ap_bound_check([{1}], (3, 2), 4)
