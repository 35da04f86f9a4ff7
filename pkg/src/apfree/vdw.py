"""Mixed van der Waerden numbers by backtracking, with coloring certificates.

``vdw_number((k_1, ..., k_r))`` is the least ``n`` such that every coloring
of ``[1, n]`` with colors ``1..r`` puts a ``k_c``-term progression inside some
color class ``c``.  Colorings are built left to right, colors tried in
ascending order, so the first complete coloring found is the
lexicographically least one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

from apfree._parallel import run_shards
from apfree.enumeration import default_node_budget
from apfree.errors import BudgetExceeded
from apfree.words import Progression, longest_ap_mask

DEFAULT_CAP = 40
SHARD_POSITIONS = 4


@dataclass(frozen=True)
class Coloring:
    colors: tuple

    @property
    def n(self) -> int:
        return len(self.colors)

    def __str__(self):
        return "".join(str(c) for c in self.colors)

    def classes(self, r: int) -> list:
        return [[t for t, c in enumerate(self.colors, 1) if c == col] for col in range(1, r + 1)]


def _check_lengths(lengths):
    lengths = tuple(int(k) for k in lengths)
    if not lengths:
        raise ValueError("need at least one color")
    if any(k < 2 for k in lengths):
        raise ValueError(f"every length must be >= 2, got {lengths}")
    return lengths


@lru_cache(maxsize=None)
def _closing(cap: int, k: int) -> tuple:
    out = [()] * (cap + 2)
    for p in range(1, cap + 1):
        out[p] = tuple(
            sum(1 << (p - t * d - 1) for t in range(1, k))
            for d in range(1, (p - 1) // (k - 1) + 1)
        )
    return tuple(out)


def _first_colors(lengths):
    """Colors allowed at position 1: the lowest color of each length class.

    Swapping two colors with equal length maps valid colorings to valid
    colorings, so position 1 needs only one representative per class.
    """
    seen, out = set(), []
    for c, k in enumerate(lengths, 1):
        if k not in seen:
            seen.add(k)
            out.append(c)
    return out


class _Search:
    def __init__(self, lengths, limit, budget):
        self.lengths = lengths
        self.limit = limit
        self.closing = [_closing(limit, k) for k in lengths]
        self.budget = budget
        self.nodes = 0
        self.best_depth = 0
        self.best_colors = None
        self.found = None

    def fits(self, masks, pos, c):
        m = masks[c - 1]
        for cm in self.closing[c - 1][pos]:
            if m & cm == cm:
                return False
        return True

    def run(self, prefix):
        """Depth-first search below ``prefix``; stop at the first coloring of
        length ``limit``.  Returns False if ``prefix`` itself is invalid."""
        masks = [0] * len(self.lengths)
        for pos, c in enumerate(prefix, 1):
            if not self.fits(masks, pos, c):
                self._record(prefix[:pos - 1])
                return False
            masks[c - 1] |= 1 << (pos - 1)
        colors = list(prefix)
        self._record(colors)
        self._dfs(len(prefix) + 1, masks, colors)
        return True

    def _record(self, colors):
        if len(colors) > self.best_depth:
            self.best_depth = len(colors)
            self.best_colors = tuple(colors)

    def _dfs(self, pos, masks, colors):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded("vdw search exceeded node budget", nodes=self.nodes)
        if pos > self.limit:
            self.found = tuple(colors)
            return True
        choices = _first_colors(self.lengths) if pos == 1 else range(1, len(self.lengths) + 1)
        for c in choices:
            if self.fits(masks, pos, c):
                masks[c - 1] |= 1 << (pos - 1)
                colors.append(c)
                self._record(colors)
                if self._dfs(pos + 1, masks, colors):
                    return True
                colors.pop()
                masks[c - 1] &= ~(1 << (pos - 1))
        return False


def _shard_prefixes(lengths, limit):
    depth = min(SHARD_POSITIONS, limit)
    r = len(lengths)
    out = [[c] for c in _first_colors(lengths)]
    for _ in range(depth - 1):
        out = [p + [c] for p in out for c in range(1, r + 1)]
    return [tuple(p) for p in out]


def _run_shard(args):
    lengths, limit, prefix, budget = args
    s = _Search(lengths, limit, budget)
    try:
        ok = s.run(prefix)
    except BudgetExceeded:
        return {"ok": True, "complete": False, "nodes": s.nodes, "best": s.best_depth,
                "found": None, "best_colors": s.best_colors}
    return {"ok": ok, "complete": True, "nodes": s.nodes, "best": s.best_depth,
            "found": s.found, "best_colors": s.best_colors}


def _sharded(lengths, limit, budget, threads):
    """Run the search over fixed shards; return shard results in order."""
    prefixes = _shard_prefixes(lengths, limit)
    results = run_shards(_run_shard, [(lengths, limit, p, budget) for p in prefixes], threads)
    nodes = sum(r["nodes"] for r in results)
    if nodes > budget or not all(r["complete"] for r in results):
        raise BudgetExceeded(
            f"vdw search for {lengths} up to {limit} exceeded node budget {budget}",
            nodes=nodes,
            partial={"longest_valid_so_far": max(r["best"] for r in results)},
        )
    return results


def find_valid_coloring(lengths, n: int, budget: int = None, threads: int = None):
    """Lexicographically least valid coloring of ``[1, n]``, or None."""
    lengths = _check_lengths(lengths)
    if n < 1:
        raise ValueError("n must be >= 1")
    budget = default_node_budget() if budget is None else budget
    for r in _sharded(lengths, n, budget, threads):
        if r["found"] is not None:
            col = Coloring(r["found"])
            if not verify_coloring(col, lengths):
                raise AssertionError(f"search produced an invalid coloring {col}")
            return col
    return None


def vdw_number(lengths, cap: int = DEFAULT_CAP, budget: int = None, threads: int = None):
    """Least ``n <= cap`` with no valid coloring of ``[1, n]``; None if it exceeds ``cap``.

    A single exhaustive search to depth ``cap`` finds the longest valid
    coloring; the answer is one more than its length.
    """
    lengths = _check_lengths(lengths)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    budget = default_node_budget() if budget is None else budget
    results = _sharded(lengths, cap, budget, threads)
    if any(r["found"] is not None for r in results):
        return None
    return max(r["best"] for r in results) + 1


def vdw_certificate(lengths, cap: int = DEFAULT_CAP, budget: int = None, threads: int = None) -> dict:
    """``vdw_number`` together with the least valid coloring at ``n - 1``."""
    lengths = _check_lengths(lengths)
    n = vdw_number(lengths, cap, budget, threads)
    out = {"lengths": list(lengths), "cap": cap, "n": n, "certificate": None}
    if n is None:
        out["n"] = "exceeds cap"
        return out
    col = find_valid_coloring(lengths, n - 1, budget, threads) if n > 1 else None
    out["certificate"] = None if col is None else str(col)
    return out


def verify_coloring(coloring: Coloring, lengths) -> bool:
    """Independent check: scan every AP of ``[1, n]`` for a monochromatic one."""
    lengths = _check_lengths(lengths)
    n = coloring.n
    if any(not 1 <= c <= len(lengths) for c in coloring.colors):
        return False
    for a in range(1, n + 1):
        c = coloring.colors[a - 1]
        k = lengths[c - 1]
        for d in range(1, n):
            last = a + (k - 1) * d
            if last > n:
                break
            if all(coloring.colors[a + t * d - 1] == c for t in range(k)):
                return False
    return True


def _longest_in_set(positions):
    mask = 0
    for p in positions:
        if p < 1:
            raise ValueError(f"positions must be >= 1, got {p}")
        mask |= 1 << (p - 1)
    return longest_ap_mask(mask)


def union_ap_bound_check(sets, lengths, L: int) -> tuple:
    """Check that the union of ``sets`` has no ``L``-term AP.

    Each ``sets[c]`` must itself avoid ``lengths[c]``-term APs; a violation
    raises ValueError naming the set and its progression.  Returns
    ``(holds, witness)`` where ``witness`` is an ``L``-term AP in the union
    when one exists.
    """
    lengths = _check_lengths(lengths)
    if len(sets) != len(lengths):
        raise ValueError("need one length per set")
    for c, (A, k) in enumerate(zip(sets, lengths), 1):
        Lc, start, gap = _longest_in_set(A)
        if Lc >= k:
            raise ValueError(
                f"set {c} contains a {k}-term AP: start {start}, gap {gap} "
                f"({Progression(start, gap, Lc).positions[:k]})"
            )
    union = set().union(*map(set, sets))
    Lu, start, gap = _longest_in_set(union)
    if Lu >= L:
        return False, Progression(start, gap, L)
    return True, None


def certificate_json(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True)
