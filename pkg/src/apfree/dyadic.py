"""Fixed-length dyadic arithmetic on words, carry analysis and pair searches.

All words in one operation share a length ``N`` and denote multiples of
``2**-N`` in [0, 1).  Addition wraps modulo 1 (the carry out of position 1 is
dropped); multiplication is exact and returns ``2N`` digits.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from apfree._parallel import run_shards
from apfree.enumeration import ap_free_values, default_node_budget
from apfree.words import BinaryWord, Progression, longest_ap_mask


def _same_length(x: BinaryWord, y: BinaryWord):
    if x.length != y.length:
        raise ValueError(f"length mismatch: {x.length} vs {y.length}")
    return x.length


def add_mod1(x: BinaryWord, y: BinaryWord) -> BinaryWord:
    N = _same_length(x, y)
    return BinaryWord.from_int((x.as_int + y.as_int) & ((1 << N) - 1), N)


def multiply(x: BinaryWord, y: BinaryWord) -> BinaryWord:
    N = _same_length(x, y)
    return BinaryWord.from_int(x.as_int * y.as_int, 2 * N)


def digit_or(x: BinaryWord, y: BinaryWord) -> BinaryWord:
    return BinaryWord.from_int(x.as_int | y.as_int, _same_length(x, y))


def digit_and(x: BinaryWord, y: BinaryWord) -> BinaryWord:
    return BinaryWord.from_int(x.as_int & y.as_int, _same_length(x, y))


@dataclass(frozen=True)
class SumDecomposition:
    x: BinaryWord
    y: BinaryWord
    s: BinaryWord
    r: BinaryWord
    sum: BinaryWord

    def invariant_failures(self) -> list:
        """Names of the structural invariants this decomposition violates."""
        bad = []
        for i, (a, b, s, r) in enumerate(zip(self.x.digits, self.y.digits, self.s.digits, self.r.digits), 1):
            if s != (1 if (a ^ b) or (a and b) else 0):
                bad.append(f"s rule at {i}")
            if r != (0 if (a == 0 and b == 1) else b):
                bad.append(f"r rule at {i}")
            if s and not (a or b):
                bad.append(f"s provenance at {i}")
            if r and not b:
                bad.append(f"r provenance at {i}")
            if r and not s:
                bad.append(f"r outside s at {i}")
        if self.sum != add_mod1(self.s, self.r):
            bad.append("sum != s + r")
        if self.sum != add_mod1(self.x, self.y):
            bad.append("sum != x + y")
        return bad


def sr_decompose(x: BinaryWord, y: BinaryWord) -> SumDecomposition:
    """Split ``x + y`` into ``s + r`` with the ones of ``x`` placed into the zeros of ``y`` first."""
    _same_length(x, y)
    pairs = tuple(zip(x.digits, y.digits))
    s = BinaryWord(tuple(1 if a ^ b else a for a, b in pairs))
    r = BinaryWord(tuple(0 if (a == 0 and b == 1) else b for a, b in pairs))
    return SumDecomposition(x, y, s, r, add_mod1(s, r))


def one_blocks(w: BinaryWord) -> list:
    """Maximal runs of ones as ``(first, last)`` 1-based positions."""
    blocks, start = [], None
    for i, d in enumerate(w.digits, 1):
        if d and start is None:
            start = i
        elif not d and start is not None:
            blocks.append((start, i - 1))
            start = None
    if start is not None:
        blocks.append((start, w.length))
    return blocks


def block_sums(dec: SumDecomposition) -> list:
    """Per block of ``s``: ``(first, last, contribution)`` where contribution is
    the value of ``s + r`` restricted to that block (a value, not wrapped)."""
    N = dec.s.length
    r_val = dec.r.as_int
    out = []
    for a, b in one_blocks(dec.s):
        # digits a..b occupy bits N-b .. N-a of the value
        width = b - a + 1
        low = N - b
        block_mask = ((1 << width) - 1) << low
        out.append((a, b, block_mask + (r_val & block_mask)))
    return out


def check_carry_locality(dec: SumDecomposition) -> bool:
    """Adding ``r`` to a block of ones of ``s`` touches only that block and the
    zero just left of it, and blocks never interfere."""
    N = dec.s.length
    if dec.r.as_int & ~dec.s.as_int:
        return False
    total = 0
    touched = 0
    for a, b, contrib in block_sums(dec):
        allowed = ((1 << (b - a + 2)) - 1) << (N - b)  # positions a-1 .. b
        if contrib & ~allowed:
            return False
        if contrib & touched:
            return False
        touched |= allowed
        total |= contrib
    return (total & ((1 << N) - 1)) == dec.sum.as_int


def classify_sum_ones(dec: SumDecomposition) -> dict:
    """Classify every 1 of the sum.

    1: a 1 of ``s`` at the same position; 2: a 1 of ``r`` at the same
    position (and not already type 1); 3: a new 1 sitting just left of a block
    of ones of ``s``.  Anything else maps to 0 (unclassified).
    """
    s, r = dec.s.digits, dec.r.digits
    N = len(s)
    out = {}
    for i, d in enumerate(dec.sum.digits, 1):
        if not d:
            continue
        if s[i - 1]:
            out[i] = 1
        elif r[i - 1]:
            out[i] = 2
        elif i < N and s[i]:
            out[i] = 3
        else:
            out[i] = 0
    return out


@lru_cache(maxsize=1 << 16)
def _longest_of_value(v: int, length: int) -> tuple:
    mask = int(format(v, f"0{length}b")[::-1], 2) if v else 0
    return longest_ap_mask(mask)


def longest_of_value(v: int, length: int) -> int:
    return _longest_of_value(v, length)[0]


@dataclass
class WCertificate:
    i: int
    j: int
    depth: int
    w_emp: int
    witness_pair: tuple
    exhaustive: bool

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "depth": self.depth,
            "w_emp": self.w_emp,
            "witness_pair": [str(w) for w in self.witness_pair],
            "exhaustive": self.exhaustive,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class SearchReport:
    kind: str
    params: dict
    exhaustive: bool
    pairs_scanned: int
    max_L: int
    witness_pair: tuple
    ap_witness: Progression = None
    histogram: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        ap = self.ap_witness
        return {
            "kind": self.kind,
            "params": self.params,
            "exhaustive": self.exhaustive,
            "pairs_scanned": self.pairs_scanned,
            "max_L": self.max_L,
            "witness_pair": None if self.witness_pair is None else [str(w) for w in self.witness_pair],
            "ap_witness": None if ap is None else {"start": ap.start, "gap": ap.gap, "terms": ap.terms},
            "histogram": {str(L): n for L, n in sorted(self.histogram.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _scan_rows(args):
    """Scan rows ``xs[lo:hi]`` against all of ``ys``; return (best, best_ix, hist, scanned)."""
    op, N, xs, ys, limit = args
    mod = (1 << N) - 1
    best, best_at = -1, None
    hist = Counter()
    scanned = 0
    out_len = N if op == "add" else 2 * N
    for xi, xv in xs:
        for yi, yv in enumerate(ys):
            if scanned >= limit:
                return best, best_at, dict(hist), scanned
            z = (xv + yv) & mod if op == "add" else xv * yv
            L = _longest_of_value(z, out_len)[0]
            hist[L] += 1
            scanned += 1
            if L > best:
                best, best_at = L, (xi, yi)
    return best, best_at, dict(hist), scanned


def _pair_scan(op, N, xs, ys, budget, threads, rows_per_shard=16):
    """Scan ``xs x ys`` in lexicographic (x, y) order, stopping after ``budget`` pairs.

    The shard layout and per-shard limits depend only on ``budget`` and the
    inputs, never on ``threads``.
    """
    if budget < 1:
        raise ValueError("pair budget must be >= 1")
    indexed = list(enumerate(xs))
    shards, remaining = [], budget
    for lo in range(0, len(indexed), rows_per_shard):
        if remaining <= 0:
            break
        rows = indexed[lo:lo + rows_per_shard]
        take = min(remaining, len(rows) * len(ys))
        shards.append((op, N, rows, ys, take))
        remaining -= take
    results = run_shards(_scan_rows, shards, threads)
    best, best_at, hist, scanned = -1, None, Counter(), 0
    for b, at, h, sc in results:
        hist.update(h)
        scanned += sc
        if b > best:
            best, best_at = b, at
    return best, best_at, dict(hist), scanned


def empirical_W(i: int, j: int, N: int, budget: int = None, threads: int = None) -> WCertificate:
    """Smallest W such that every scanned sum ``x + y mod 1`` is W-AP-free,
    with ``x`` an ``i``-AP-free and ``y`` a ``j``-AP-free word of length ``N``."""
    if i < 3 or j < 3:
        raise ValueError("i and j must be >= 3")
    if N < 1:
        raise ValueError("N must be >= 1")
    budget = default_node_budget() if budget is None else budget
    xs, ys = ap_free_values(N, i), ap_free_values(N, j)
    total = len(xs) * len(ys)
    best, at, _, scanned = _pair_scan("add", N, xs, ys, budget, threads)
    pair = (BinaryWord.from_int(xs[at[0]], N), BinaryWord.from_int(ys[at[1]], N))
    return WCertificate(i, j, N, best + 1, pair, scanned == total)


def product_ap_search(k: int, N: int, budget: int = None, threads: int = None) -> SearchReport:
    """Longest AP in the exact products of pairs of k-AP-free words."""
    if k < 3:
        raise ValueError("k must be >= 3")
    budget = default_node_budget() if budget is None else budget
    xs = ap_free_values(N, k)
    total = len(xs) * len(xs)
    best, at, hist, scanned = _pair_scan("mul", N, xs, xs, budget, threads)
    x, y = BinaryWord.from_int(xs[at[0]], N), BinaryWord.from_int(xs[at[1]], N)
    L, start, gap = _longest_of_value(xs[at[0]] * xs[at[1]], 2 * N)
    ap = Progression(start, gap, L) if L else None
    return SearchReport(
        kind="product_ap_search",
        params={"k": k, "N": N, "budget": budget},
        exhaustive=scanned == total,
        pairs_scanned=scanned,
        max_L=best,
        witness_pair=(x, y),
        ap_witness=ap,
        histogram=hist,
    )
