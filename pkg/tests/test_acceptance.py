"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also collected in the terminal summary.
"""

import math
import random
import time
from fractions import Fraction
from itertools import combinations

from apfree.cli import main
from apfree.density import (
    banach_to_upper_transform, burst_sequence, default_tail_start, density_report,
    upper_to_lower_transform,
)
from apfree.dyadic import (
    add_mod1, check_carry_locality, classify_sum_ones, digit_and, digit_or,
    empirical_W, product_ap_search, sr_decompose,
)
from apfree.enumeration import (
    ap_free_values, count_k_ap_free, count_low_weight, entropy_bound, eps_grid,
)
from apfree.grids import box_count, grid_of_F, grid_of_mask, iterate_grids
from apfree.vdw import find_valid_coloring, vdw_number, verify_coloring
from apfree.words import (
    BinaryWord, is_subsequence, longest_ap, longest_ap_mask, parse_word, shift_word,
)
from oracles import brute_vdw_colorable


def _words(N):
    return [BinaryWord.from_int(v, N) for v in range(1 << N)]


def test_ac01_oracle_counting(record_criterion):
    t0 = time.perf_counter()
    bad = []
    for N in range(1, 17):
        # longest AP once per word, then filter for every k
        Ls = [longest_ap_mask(int(format(v, f"0{N}b")[::-1], 2))[0] for v in range(1 << N)]
        for k in (3, 4, 5):
            naive = sum(1 for L in Ls if L < k)
            if count_k_ap_free(N, k) != naive:
                bad.append((N, k))
    elapsed = time.perf_counter() - t0
    ok = not bad and count_k_ap_free(4, 3) == 13 and elapsed < 60
    record_criterion("AC1 oracle counting", ok,
                     f"mismatches={bad} count(4,3)={count_k_ap_free(4, 3)} time={elapsed:.1f}s (<60s)")
    assert ok


def test_ac02_worked_sum(record_criterion, capsys):
    rc = main(["sum", "add", "0111110", "0001010"])
    out = capsys.readouterr().out
    dec = sr_decompose(parse_word("0111110"), parse_word("0001010"))
    fails = dec.invariant_failures()
    ok = rc == 0 and out == "1001000\n" and not fails
    record_criterion("AC2 worked sum", ok, f"cli={out.strip()!r} invariant_failures={fails}")
    assert ok


def test_ac03_or_and_identity(record_criterion):
    t0 = time.perf_counter()
    failures = pairs = 0
    for N in range(1, 11):
        ws = _words(N)
        for x in ws:
            for y in ws:
                pairs += 1
                if add_mod1(x, y) != add_mod1(digit_or(x, y), digit_and(x, y)):
                    failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30
    record_criterion("AC3 OR/AND identity", ok,
                     f"pairs={pairs} failures={failures} time={elapsed:.1f}s (<30s)")
    assert ok


def test_ac04_carry_trichotomy(record_criterion):
    t0 = time.perf_counter()
    unclassified = nonlocal_ = ones = pairs = 0
    for N in range(1, 11):
        ws = _words(N)
        for x in ws:
            for y in ws:
                pairs += 1
                dec = sr_decompose(x, y)
                types = classify_sum_ones(dec)
                ones += len(types)
                unclassified += sum(1 for t in types.values() if t == 0)
                if not check_carry_locality(dec):
                    nonlocal_ += 1
    elapsed = time.perf_counter() - t0
    ok = unclassified == 0 and nonlocal_ == 0
    record_criterion("AC4 carry trichotomy", ok,
                     f"pairs={pairs} sum_ones={ones} unclassified={unclassified} "
                     f"carry_nonlocal={nonlocal_} time={elapsed:.1f}s")
    assert ok


def test_ac05_vdw(record_criterion):
    t0 = time.perf_counter()
    details, ok = [], True
    for lengths, exp in (((2, 2), 3), ((3, 2), 6), ((3, 3), 9)):
        n = vdw_number(lengths)
        cert = find_valid_coloring(lengths, n - 1)
        refuted = find_valid_coloring(lengths, n) is None
        # independent refutation over every coloring of [1, n]
        brute_refuted = not brute_vdw_colorable(lengths, n)
        good = (n == exp and cert is not None and verify_coloring(cert, lengths)
                and refuted and brute_refuted)
        ok &= good
        details.append(f"{lengths}={n} cert={cert}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 10
    record_criterion("AC5 van der Waerden", ok, f"{'; '.join(details)} time={elapsed:.2f}s (<10s)")
    assert ok


def test_ac06_grid_bridge(record_criterion):
    bad = [(n, k) for k in (3, 4) for n in range(1, 15)
           if box_count(grid_of_F(k, n)) != count_k_ap_free(n, k)]
    record_criterion("AC6 grid/enumeration bridge", not bad, f"n<=14, k in (3,4), mismatches={bad}")
    assert not bad


def test_ac07_period_two_mask(record_criterion):
    bad = []
    for t in range(1, 13):
        c = box_count(grid_of_mask("10" * t))
        # log2 is exact for a power of two
        exact = c == 1 << t and Fraction(c.bit_length() - 1, 2 * t) == Fraction(1, 2)
        if not exact or math.log2(c) / (2 * t) != 0.5:
            bad.append(t)
    record_criterion("AC7 period-2 mask dimension", not bad, f"t<=12, failures={bad}")
    assert not bad


def test_ac08_entropy_bound(record_criterion):
    violations = []
    for N in (8, 16, 32, 64):
        for eps in eps_grid():
            m = math.floor(eps * N)
            if count_low_weight(N, m) > entropy_bound(N, eps):
                violations.append((N, str(eps)))
    record_criterion("AC8 entropy bound", not violations, f"40 cases, violations={violations}")
    assert not violations


def test_ac09_iterated_sums(record_criterion):
    A = grid_of_F(3, 12)
    cov = [g.coverage for _, g in iterate_grids(A, 4)]
    mono = all(a <= b for a, b in zip(cov, cov[1:]))
    ok = 0 in A and mono and cov[1] > cov[0]
    record_criterion("AC9 iterated-sum monotonicity", ok,
                     "coverage t=1..4: " + ", ".join(str(c) for c in cov))
    assert ok


def test_ac10_density_transforms(record_criterion):
    A = burst_sequence(10**5)
    b1 = banach_to_upper_transform(A, 0.9, 2)
    b2 = banach_to_upper_transform(A, 0.9, 2)
    u1 = upper_to_lower_transform(A, 0.9)
    u2 = upper_to_lower_transform(A, 0.9)
    c_hat = density_report(A, default_tail_start(A.horizon)).upper_est
    need_b = Fraction(9, 10) * Fraction(1, 2) * Fraction(4, 5) - Fraction(1, b1.first_length)
    need_u = Fraction(9, 10) * c_hat / 3 - Fraction(1, u1.first_length)
    ok = (u1.reference == c_hat and b1.measured >= need_b and u1.measured >= need_u
          and b1.log_json() == b2.log_json() and u1.log_json() == u2.log_json())
    record_criterion(
        "AC10 density transforms", ok,
        f"upper(B)={float(b1.measured):.4f}>={float(need_b):.4f} "
        f"lower(B)={float(u1.measured):.4f}>={float(need_u):.4f} replay_identical="
        f"{b1.log_json() == b2.log_json() and u1.log_json() == u2.log_json()}")
    assert ok


def test_ac11_product_search_determinism(record_criterion):
    t0 = time.perf_counter()
    r1 = product_ap_search(3, 8, threads=1).to_json()
    r1b = product_ap_search(3, 8, threads=1).to_json()
    r8 = product_ap_search(3, 8, threads=8).to_json()
    elapsed = time.perf_counter() - t0
    rep = product_ap_search(3, 8, threads=1)
    ok = rep.exhaustive and r1 == r1b == r8 and elapsed < 120
    record_criterion("AC11 product search determinism", ok,
                     f"max_L={rep.max_L} witness={[str(w) for w in rep.witness_pair]} "
                     f"identical={r1 == r1b == r8} time={elapsed:.2f}s (<120s)")
    assert ok


def test_ac12_finite_depth_closure(record_criterion):
    N = 12
    cert = empirical_W(3, 3, N)
    ws = [BinaryWord.from_int(v, N) for v in ap_free_values(N, 3)]
    rng = random.Random(20240101)
    sum_bad = 0
    for _ in range(1000):
        x, y = rng.choice(ws), rng.choice(ws)
        if not longest_ap(add_mod1(x, y))[0] < cert.w_emp + 1:
            sum_bad += 1
    shift_bad = sub_bad = subs = 0
    for x in ws:
        for t in range(N + 1):
            if longest_ap(shift_word(x, t))[0] >= 3:
                shift_bad += 1
        ones = [i for i, d in enumerate(x.digits, 1) if d]
        for shift in range(N):
            placed = [p + shift for p in ones if p + shift <= N]
            for r in range(len(placed) + 1):
                for keep in combinations(placed, r):
                    y = BinaryWord.from_positions(keep, N)
                    subs += 1
                    if not is_subsequence(y, x, shift) or longest_ap(y)[0] >= 3:
                        sub_bad += 1
    ok = sum_bad == 0 and shift_bad == 0 and sub_bad == 0 and len(ws) == 705
    record_criterion("AC12 finite-depth closure", ok,
                     f"w_emp={cert.w_emp} sum_violations={sum_bad}/1000 words={len(ws)} "
                     f"shift_violations={shift_bad} subsequences={subs} violations={sub_bad}")
    assert ok
