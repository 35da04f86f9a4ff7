"""Counting and enumerating k-AP-free words by pruned depth-first search.

Digits are placed left to right, trying 1 before 0, so streams come out in
descending lexicographic order (the all-ones word first when it qualifies).
A 1 at position ``p`` is rejected exactly when it would close a ``k``-term
progression ending at ``p``; no other pruning is needed because any
progression is detected at its last term.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache

from apfree._parallel import run_shards
from apfree._util import as_fraction
from apfree.errors import BudgetExceeded
from apfree.words import BinaryWord, parse_word

DEFAULT_NODE_BUDGET = 10**9
SHARD_DIGITS = 8


def default_node_budget() -> int:
    return int(os.environ.get("APFREE_NODE_BUDGET", DEFAULT_NODE_BUDGET))


@lru_cache(maxsize=None)
def _closing_masks(N: int, k: int) -> tuple:
    """``masks[p]``: position masks of ``{p-d, ..., p-(k-1)d}`` for every gap d."""
    masks = [()] * (N + 2)
    for p in range(1, N + 1):
        ms = []
        for d in range(1, (p - 1) // (k - 1) + 1):
            m = 0
            for t in range(1, k):
                m |= 1 << (p - t * d - 1)
            ms.append(m)
        masks[p] = tuple(ms)
    return tuple(masks)


def _closes(mask, masks_at_p):
    for m in masks_at_p:
        if mask & m == m:
            return True
    return False


class _Abort(Exception):
    pass


def _check_args(N, k):
    if N < 1:
        raise ValueError("N must be >= 1")
    if k < 3:
        raise ValueError("k must be >= 3")


def _prefix_state(prefix, N, k):
    """Position mask and value of ``prefix``, or None if it already holds a k-AP."""
    if isinstance(prefix, str):
        prefix = parse_word(prefix)
    digits = prefix.digits if prefix is not None else ()
    if len(digits) > N:
        raise ValueError(f"prefix longer than N={N}")
    masks = _closing_masks(N, k)
    mask = val = 0
    for p, d in enumerate(digits, 1):
        if d:
            if _closes(mask, masks[p]):
                return None
            mask |= 1 << (p - 1)
        val = (val << 1) | d
    return mask, val, len(digits)


class _Walker:
    """One depth-first traversal below a fixed prefix, with a node cap."""

    def __init__(self, N, k, budget):
        self.N = N
        self.masks = _closing_masks(N, k)
        self.budget = budget
        self.nodes = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _Abort

    def count(self, pos, mask):
        self._tick()
        if pos > self.N:
            return 1
        total = 0
        if not _closes(mask, self.masks[pos]):
            total += self.count(pos + 1, mask | (1 << (pos - 1)))
        return total + self.count(pos + 1, mask)

    def values(self, pos, mask, val):
        self._tick()
        if pos > self.N:
            yield val
            return
        if not _closes(mask, self.masks[pos]):
            yield from self.values(pos + 1, mask | (1 << (pos - 1)), (val << 1) | 1)
        yield from self.values(pos + 1, mask, val << 1)

    def max_ones(self, pos, mask, val, ones, best):
        """Return ``(m, value)`` of the first word beating ``best[0]`` ones."""
        self._tick()
        if ones + (self.N - pos + 1) <= best[0]:
            return
        if pos > self.N:
            best[0], best[1] = ones, val
            return
        if not _closes(mask, self.masks[pos]):
            self.max_ones(pos + 1, mask | (1 << (pos - 1)), (val << 1) | 1, ones + 1, best)
        self.max_ones(pos + 1, mask, val << 1, ones, best)


def shard_prefixes(N: int, k: int, digits: int = SHARD_DIGITS) -> list:
    """AP-free prefixes of length ``min(digits, N)`` in stream order."""
    p = min(digits, N)
    w = _Walker(p, k, float("inf"))
    return [BinaryWord.from_int(v, p) for v in w.values(1, 0, 0)]


def _count_shard(args):
    N, k, prefix, budget = args
    state = _prefix_state(prefix, N, k)
    if state is None:
        return 0, 0, True
    mask, _, plen = state
    w = _Walker(N, k, budget)
    try:
        c = w.count(plen + 1, mask)
    except _Abort:
        return 0, w.nodes, False
    return c, w.nodes, True


def count_k_ap_free(N: int, k: int, budget: int = None, threads: int = None) -> int:
    """Number of length-``N`` words whose one-positions contain no ``k``-AP."""
    _check_args(N, k)
    budget = default_node_budget() if budget is None else budget
    prefixes = shard_prefixes(N, k)
    results = run_shards(_count_shard, [(N, k, p, budget) for p in prefixes], threads)
    nodes = sum(r[1] for r in results)
    if nodes > budget or not all(r[2] for r in results):
        done = [r for r in results if r[2]]
        raise BudgetExceeded(
            f"count_k_ap_free(N={N}, k={k}) exceeded node budget {budget}",
            nodes=nodes,
            partial={
                "count_so_far": sum(r[0] for r in done),
                "shards_done": len(done),
                "shards_total": len(results),
            },
        )
    return sum(r[0] for r in results)


def enumerate_k_ap_free(N: int, k: int, prefix=None, budget: int = None):
    """Yield every k-AP-free word of length ``N`` in descending lexicographic order.

    With ``prefix`` the stream is restricted to (and restarts at) words
    beginning with that prefix; concatenating the streams of
    :func:`shard_prefixes` reproduces the full stream.
    """
    for v in enumerate_values(N, k, prefix, budget):
        yield BinaryWord.from_int(v, N)


def enumerate_values(N: int, k: int, prefix=None, budget: int = None):
    """Like :func:`enumerate_k_ap_free` but yields integer values."""
    _check_args(N, k)
    budget = default_node_budget() if budget is None else budget
    state = _prefix_state(prefix, N, k)
    if state is None:
        return
    mask, val, plen = state
    w = _Walker(N, k, budget)
    try:
        yield from w.values(plen + 1, mask, val)
    except _Abort:
        raise BudgetExceeded(
            f"enumeration of F_{k} words of length {N} exceeded node budget {budget}",
            nodes=w.nodes,
        ) from None


@lru_cache(maxsize=64)
def ap_free_values(N: int, k: int) -> tuple:
    """Cached tuple of all k-AP-free values of length ``N`` in stream order."""
    return tuple(enumerate_values(N, k))


def _max_ones_shard(args):
    N, k, prefix, budget = args
    state = _prefix_state(prefix, N, k)
    if state is None:
        return -1, None, 0, True
    mask, val, plen = state
    w = _Walker(N, k, budget)
    best = [-1, None]
    try:
        w.max_ones(plen + 1, mask, val, bin(mask).count("1"), best)
    except _Abort:
        return best[0], best[1], w.nodes, False
    return best[0], best[1], w.nodes, True


def max_ones_k_ap_free(N: int, k: int, budget: int = None, threads: int = None) -> tuple:
    """Largest number of ones in a k-AP-free word of length ``N``.

    Returns ``(m, witness)`` where the witness is the first extremal word in
    stream order.
    """
    _check_args(N, k)
    budget = default_node_budget() if budget is None else budget
    prefixes = shard_prefixes(N, k)
    results = run_shards(_max_ones_shard, [(N, k, p, budget) for p in prefixes], threads)
    nodes = sum(r[2] for r in results)
    best_m, best_v = -1, None
    for m, v, _, _ in results:
        if m > best_m:
            best_m, best_v = m, v
    if nodes > budget or not all(r[3] for r in results):
        raise BudgetExceeded(
            f"max_ones_k_ap_free(N={N}, k={k}) exceeded node budget {budget}",
            nodes=nodes,
            partial={"best_so_far": best_m, "witness": None if best_v is None else str(BinaryWord.from_int(best_v, N))},
        )
    return best_m, BinaryWord.from_int(best_v, N)


def count_low_weight(N: int, m: int) -> int:
    """Number of length-``N`` words with at most ``m`` ones."""
    if not 0 <= m <= N:
        raise ValueError(f"need 0 <= m <= N, got m={m}, N={N}")
    return sum(math.comb(N, j) for j in range(m + 1))


def binary_entropy(eps, prec: int = 60) -> Decimal:
    eps = as_fraction(eps)
    with localcontext() as ctx:
        ctx.prec = prec
        e = Decimal(eps.numerator) / Decimal(eps.denominator)
        if e == 1 or e == 0:
            return Decimal(0)
        f = 1 - e
        return -(e * e.ln() + f * f.ln()) / Decimal(2).ln()


def entropy_bound(N: int, eps, prec: int = 60) -> Decimal:
    """``2**(N * H2(eps))``, an upper bound on ``count_low_weight(N, floor(eps*N))``.

    Equal to ``exp(-D(eps) N) 2**N`` with ``D(eps) = log 2 + eps log eps +
    (1-eps) log(1-eps)`` in natural logarithms.
    """
    eps = as_fraction(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
    if eps == Fraction(1, 2):
        return Decimal(2) ** N
    with localcontext() as ctx:
        ctx.prec = prec
        h = binary_entropy(eps, prec + 10)
        return (Decimal(N) * h * Decimal(2).ln()).exp()


def eps_grid():
    """The comparator grid 0.05, 0.10, ..., 0.50 as exact fractions."""
    return [Fraction(i, 20) for i in range(1, 11)]


@dataclass
class CountRow:
    N: int
    count: int

    @property
    def log2_count_over_N(self) -> float:
        return math.log2(self.count) / self.N


@dataclass
class CountTable:
    k: int
    rows: list = field(default_factory=list)

    def to_csv(self, digits: int = 12) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["N", "count", "log2_count_over_N"])
        for r in self.rows:
            wr.writerow([r.N, str(r.count), f"{r.log2_count_over_N:.{digits}f}"])
        return buf.getvalue()

    def to_jsonl(self, digits: int = 12) -> str:
        return "".join(
            json.dumps(
                {
                    "k": self.k,
                    "N": r.N,
                    "count": str(r.count),
                    "log2_count_over_N": f"{r.log2_count_over_N:.{digits}f}",
                }
            )
            + "\n"
            for r in self.rows
        )


def box_dim_estimate(k: int, N_list, budget: int = None, threads: int = None) -> CountTable:
    """Depth-N box-count exponents ``log2(#F_k cells at depth N) / N``."""
    N_list = list(N_list)
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly ascending")
    table = CountTable(k)
    for N in N_list:
        try:
            c = count_k_ap_free(N, k, budget=budget, threads=threads)
        except BudgetExceeded as exc:
            raise BudgetExceeded(str(exc), nodes=exc.nodes, partial=table) from None
        table.rows.append(CountRow(N, c))
    return table
