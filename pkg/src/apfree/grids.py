"""Depth-n dyadic cell sets over [0, 1) (and [0, 2) for real-line sums).

A :class:`DyadicGrid` is a membership bitset: bit ``m`` set means the cell
``[m * 2**-n, (m + 1) * 2**-n)`` belongs to the set.  Every set operation here
returns an *outer* approximation, so a grid always contains the set it
stands for; small coverage or short runs are therefore evidence in the safe
direction.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from apfree.enumeration import enumerate_values
from apfree.errors import BudgetExceeded
from apfree.words import BinaryWord

DEFAULT_DEPTH_BUDGET = 24
DEFAULT_PRODUCT_DEPTH_BUDGET = 12


def default_depth_budget() -> int:
    return int(os.environ.get("APFREE_DEPTH_BUDGET", DEFAULT_DEPTH_BUDGET))


def _check_depth(n, budget):
    budget = default_depth_budget() if budget is None else budget
    if n > budget:
        raise BudgetExceeded(f"depth {n} exceeds depth budget {budget}")


@dataclass(frozen=True)
class DyadicGrid:
    depth: int
    bits: int
    ncells: int = None  # defaults to 2**depth; scaled sums use 2**(depth+1)

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.ncells is None:
            object.__setattr__(self, "ncells", 1 << self.depth)
        if self.bits < 0 or self.bits >> self.ncells:
            raise ValueError("membership bits outside the grid")

    @classmethod
    def from_cells(cls, depth, cells, ncells=None):
        ncells = (1 << depth) if ncells is None else ncells
        arr = np.zeros(ncells, dtype=bool)
        idx = np.fromiter(cells, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= ncells):
            raise ValueError("cell index outside the grid")
        arr[idx] = True
        return cls.from_array(depth, arr)

    @classmethod
    def from_array(cls, depth, arr):
        arr = np.asarray(arr, dtype=bool)
        packed = np.packbits(arr, bitorder="little")
        return cls(depth, int.from_bytes(packed.tobytes(), "little"), len(arr))

    @classmethod
    def full(cls, depth):
        return cls(depth, (1 << (1 << depth)) - 1)

    def to_array(self) -> np.ndarray:
        nbytes = (self.ncells + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.ncells].astype(bool)

    def __contains__(self, m):
        return 0 <= m < self.ncells and (self.bits >> m) & 1 == 1

    def cells(self) -> list:
        return np.flatnonzero(self.to_array()).tolist()

    @property
    def count(self) -> int:
        return self.bits.bit_count()

    @property
    def coverage(self) -> Fraction:
        """Fraction of [0, 1) covered (cells have width ``2**-depth``)."""
        return Fraction(self.count, 1 << self.depth)

    def ranges(self) -> list:
        """Member cells as half-open ``[start, stop)`` index ranges."""
        arr = self.to_array().astype(np.int8)
        edges = np.diff(np.concatenate(([0], arr, [0])))
        starts = np.flatnonzero(edges == 1)
        stops = np.flatnonzero(edges == -1)
        return [[int(a), int(b)] for a, b in zip(starts, stops)]

    def to_json(self) -> str:
        return json.dumps(
            {"depth": self.depth, "ncells": self.ncells, "count": self.count, "ranges": self.ranges()},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        depth = obj["depth"]
        ncells = obj.get("ncells", 1 << depth)
        bits = 0
        for a, b in obj["ranges"]:
            bits |= ((1 << (b - a)) - 1) << a
        grid = cls(depth, bits, ncells)
        if "count" in obj and obj["count"] != grid.count:
            raise ValueError("count header disagrees with ranges")
        return grid


def grid_of_F(k: int, n: int, depth_budget: int = None) -> DyadicGrid:
    """Cells of depth ``n`` meeting F_k: those whose index word is k-AP-free."""
    if k < 3:
        raise ValueError("k must be >= 3")
    _check_depth(n, depth_budget)
    return DyadicGrid.from_cells(n, enumerate_values(n, k))


def grid_of_mask(pattern) -> DyadicGrid:
    """Prefix cells of E_S for the digit-freedom mask ``pattern``.

    Cell ``m`` is a member iff every digit of ``m`` is 0 where the mask is 0.
    """
    if isinstance(pattern, str):
        pattern = BinaryWord(tuple(int(c) for c in pattern))
    n = pattern.length
    free = pattern.as_int
    # enumerate submasks of ``free``
    cells, sub = [], free
    while True:
        cells.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & free
    return DyadicGrid.from_cells(n, cells)


def _same_depth(A, B):
    if A.depth != B.depth:
        raise ValueError(f"depth mismatch: {A.depth} vs {B.depth}")
    if A.ncells != 1 << A.depth or B.ncells != 1 << B.depth:
        raise ValueError("operation needs grids over [0, 1)")
    return A.depth


def _rotl(bits, s, size, full):
    s %= size
    return ((bits << s) | (bits >> (size - s))) & full if s else bits


def sumset_mod1(A: DyadicGrid, B: DyadicGrid) -> DyadicGrid:
    """Outer approximation of ``A + B mod 1``: each member pair ``(a, b)``
    marks cells ``a + b`` and ``a + b + 1`` (mod ``2**n``)."""
    n = _same_depth(A, B)
    size = 1 << n
    full = (1 << size) - 1
    if A.count < B.count:
        A, B = B, A
    acc = 0
    for b in B.cells():
        acc |= _rotl(A.bits, b, size, full)
    acc |= _rotl(acc, 1, size, full)
    return DyadicGrid(n, acc)


def iterate_grids(A: DyadicGrid, terms: int):
    """Yield ``(t, tA)`` for ``t = 1..terms`` with ``tA`` the iterated sumset."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    cur = A
    yield 1, cur
    for t in range(2, terms + 1):
        cur = sumset_mod1(cur, A)
        yield t, cur


def iterate_sum(A: DyadicGrid, terms: int) -> list:
    return [(t, g.coverage) for t, g in iterate_grids(A, terms)]


def _spread(bits, width):
    """OR of ``bits << s`` for ``s`` in ``range(width)``."""
    out, have = bits, 1
    while have < width:
        step = min(have, width - have)
        out |= out << step
        have += step
    return out


def scaled_sum(A: DyadicGrid, x: BinaryWord, B: DyadicGrid) -> DyadicGrid:
    """Outer approximation of ``A + x*B`` in the reals, on ``2**(n+1)`` cells covering [0, 2)."""
    n = _same_depth(A, B)
    xn, L = x.as_int, x.length
    ncells = 1 << (n + 1)
    acc = 0
    for b in B.cells():
        # interval in cell units: [a + x*b, a + 1 + x*(b+1))
        lo = (xn * b) >> L
        hi_num = (1 << L) + xn * (b + 1)
        hi = -(-hi_num >> L)  # ceil
        acc |= _spread(A.bits << lo, hi - lo)
    acc &= (1 << ncells) - 1
    return DyadicGrid(n, acc, ncells)


def product_grid(A: DyadicGrid, B: DyadicGrid, depth_budget: int = None) -> DyadicGrid:
    """Outer approximation of ``{a*b}`` at depth ``2n``: a member pair marks
    every cell overlapping ``[a*b, (a+1)*(b+1)) * 2**-2n``."""
    n = _same_depth(A, B)
    budget = DEFAULT_PRODUCT_DEPTH_BUDGET if depth_budget is None else depth_budget
    if n > budget:
        raise BudgetExceeded(f"product depth {n} exceeds budget {budget}")
    size = 1 << (2 * n)
    diff = np.zeros(size + 1, dtype=np.int64)
    a = np.asarray(A.cells(), dtype=np.int64)
    bs = np.asarray(B.cells(), dtype=np.int64)
    if a.size and bs.size:
        chunk = max(1, (1 << 22) // a.size)
        for lo in range(0, bs.size, chunk):
            b = bs[lo:lo + chunk]
            start = np.multiply.outer(a, b).ravel()
            stop = np.multiply.outer(a + 1, b + 1).ravel()
            diff += np.bincount(start, minlength=size + 1)
            diff -= np.bincount(stop, minlength=size + 1)
    member = np.cumsum(diff[:-1]) > 0
    return DyadicGrid.from_array(2 * n, member)


def coarsen(A: DyadicGrid, depth: int) -> DyadicGrid:
    """Cells of depth ``depth`` that contain at least one member of ``A``."""
    if A.ncells != 1 << A.depth or depth > A.depth:
        raise ValueError("can only coarsen a [0, 1) grid to a smaller depth")
    arr = A.to_array().reshape(1 << depth, -1).any(axis=1)
    return DyadicGrid.from_array(depth, arr)


def longest_full_run(A: DyadicGrid) -> tuple:
    """Longest run of consecutive member cells, no wraparound: ``(length, start)``."""
    best, start = 0, 0
    for a, b in A.ranges():
        if b - a > best:
            best, start = b - a, a
    return best, start


def box_count(A: DyadicGrid) -> int:
    return A.count


def e_plus_ee_probe(k: int, n: int) -> dict:
    """Coverage and longest run of ``F_k + F_k F_k (mod 1)`` at depth ``n``."""
    F = grid_of_F(k, n)
    prod = coarsen(product_grid(F, F), n)
    total = sumset_mod1(F, prod)
    run, start = longest_full_run(total)
    return {
        "k": k,
        "depth": n,
        "count": total.count,
        "coverage": float(total.coverage),
        "longest_run": run,
        "run_start": start,
    }


def scaled_sum_scan(A: DyadicGrid, B: DyadicGrid, xs) -> list:
    """Rows ``(x, coverage, longest_run)`` of ``A + x*B`` for each word ``x``.

    Coverage is measured relative to [0, 1), so it can reach 2.
    """
    rows = []
    for x in xs:
        g = scaled_sum(A, x, B)
        rows.append((x, g.coverage, longest_full_run(g)[0]))
    return rows
