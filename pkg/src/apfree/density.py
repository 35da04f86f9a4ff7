"""Finite-horizon density estimates and the Banach -> upper -> lower
density reductions.

Everything is exact: densities are :class:`~fractions.Fraction` values and
window searches compare integers.  ``limsup``/``liminf`` over an infinite
tail are replaced by ``max``/``min`` over ``n`` in ``[tail_start, horizon]``.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from apfree._util import as_fraction
from apfree.words import Progression, longest_ap_mask


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class IntSeq:
    elements: tuple
    horizon: int

    def __post_init__(self):
        els = tuple(int(a) for a in self.elements)
        object.__setattr__(self, "elements", els)
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        for prev, cur in zip(els, els[1:]):
            if cur <= prev:
                raise ValueError(f"elements must be strictly increasing ({prev} then {cur})")
        if els and (els[0] < 1 or els[-1] > self.horizon):
            raise ValueError(f"elements must lie in [1, {self.horizon}]")

    @classmethod
    def from_predicate(cls, pred, horizon):
        return cls(tuple(n for n in range(1, horizon + 1) if pred(n)), horizon)

    def prefix_counts(self) -> np.ndarray:
        """``S[n] = A(n)`` for ``n = 0..horizon``."""
        ind = np.zeros(self.horizon + 1, dtype=np.int64)
        if self.elements:
            ind[np.asarray(self.elements, dtype=np.int64)] = 1
        return np.cumsum(ind)

    def restrict(self, lo, hi) -> tuple:
        i = bisect.bisect_left(self.elements, lo)
        j = bisect.bisect_right(self.elements, hi)
        return self.elements[i:j]


def parse_intseq(text: str, horizon: int = None) -> IntSeq:
    """Read newline-separated integers or b-file rows ``index value``.

    Blank lines and ``#`` comments are skipped.  The horizon defaults to the
    largest element.
    """
    vals = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) > 2:
            raise ValueError(f"line {lineno}: expected 1 or 2 columns, got {len(parts)}")
        try:
            vals.append(int(parts[-1]))
        except ValueError:
            raise ValueError(f"line {lineno}: not an integer: {parts[-1]!r}") from None
    if horizon is None:
        horizon = max(vals) if vals else 1
    return IntSeq(tuple(vals), horizon)


def counting(A: IntSeq, n: int) -> int:
    if not 1 <= n <= A.horizon:
        raise ValueError(f"n={n} outside observation window [1, {A.horizon}]")
    return bisect.bisect_right(A.elements, n)


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


@dataclass
class DensityReport:
    horizon: int
    tail_start: int
    prefix_ratios: list
    upper_est: Fraction
    upper_at: int
    lower_est: Fraction
    lower_at: int
    banach_est: Fraction
    banach_window: int
    banach_offset: int

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "tail_start": self.tail_start,
            "prefix_ratios": [[n, _frac_str(r)] for n, r in self.prefix_ratios],
            "upper_est": _frac_str(self.upper_est),
            "upper_at": self.upper_at,
            "lower_est": _frac_str(self.lower_est),
            "lower_at": self.lower_at,
            "banach_est": _frac_str(self.banach_est),
            "banach_window": self.banach_window,
            "banach_offset": self.banach_offset,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _extreme_prefix_ratio(S, lo, hi, want_max):
    """Exact max (or min) of ``S[n]/n`` over ``n`` in ``[lo, hi]``; first index wins."""
    best_num, best_den = int(S[lo]), lo
    for n in range(lo + 1, hi + 1):
        s = int(S[n])
        lhs, rhs = s * best_den, best_num * n
        if (lhs > rhs) if want_max else (lhs < rhs):
            best_num, best_den = s, n
    return Fraction(best_num, best_den), best_den


def _first_window_at_least(S, thr: Fraction, min_len: int):
    """Lowest offset ``M`` (then shortest length ``k >= min_len``) with
    ``(S[M+k-1] - S[M-1]) / k >= thr``; None if there is none."""
    H = len(S) - 1
    if min_len > H:
        return None
    g = thr.denominator * S - thr.numerator * np.arange(H + 1, dtype=np.int64)
    sufmax = np.maximum.accumulate(g[::-1])[::-1]
    i_idx = np.arange(0, H - min_len + 1)
    ok = sufmax[i_idx + min_len] >= g[i_idx]
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    i = int(hits[0])
    j = i + min_len + int(np.flatnonzero(g[i + min_len:] >= g[i])[0])
    return i + 1, j - i


def max_window_density(S, min_len: int) -> tuple:
    """Exact ``max (S[j]-S[i])/(j-i)`` over ``j - i >= min_len`` with its
    lowest-offset, then shortest, witness ``(density, k, M)``.

    Dinkelbach iteration: each round jumps to the best pair under the current
    ratio, which strictly increases the ratio until no pair beats it.
    """
    H = len(S) - 1
    if not 1 <= min_len <= H:
        raise ValueError(f"window length {min_len} outside [1, {H}]")
    alpha = Fraction(int(S[min_len] - S[0]), min_len)
    idx = np.arange(H + 1, dtype=np.int64)
    while True:
        g = alpha.denominator * S - alpha.numerator * idx
        sufmax = np.maximum.accumulate(g[::-1])[::-1]
        gains = sufmax[min_len:] - g[: H - min_len + 1]
        i = int(np.argmax(gains))
        if gains[i] <= 0:
            break
        j = i + min_len + int(np.argmax(g[i + min_len:]))
        alpha = Fraction(int(S[j] - S[i]), j - i)
    M, k = _first_window_at_least(S, alpha, min_len)
    return alpha, k, M


def density_report(A: IntSeq, tail_start: int, samples: int = 32) -> DensityReport:
    H = A.horizon
    if not 1 <= tail_start <= H:
        raise ValueError(f"tail_start must lie in [1, {H}]")
    S = A.prefix_counts()
    upper, up_at = _extreme_prefix_ratio(S, tail_start, H, True)
    lower, lo_at = _extreme_prefix_ratio(S, tail_start, H, False)
    banach, k, M = max_window_density(S, tail_start)
    grid = {tail_start, H}
    if H > tail_start:
        ratio = H / tail_start
        grid.update(min(H, round(tail_start * ratio ** (i / samples))) for i in range(samples + 1))
    prefix = [(n, Fraction(int(S[n]), n)) for n in sorted(grid)]
    rep = DensityReport(H, tail_start, prefix, upper, up_at, lower, lo_at, banach, k, M)
    assert rep.lower_est <= rep.upper_est <= rep.banach_est
    return rep


def default_tail_start(horizon: int) -> int:
    return max(1, math.isqrt(horizon))


@dataclass
class TransformResult:
    B: IntSeq
    log: list
    target: Fraction
    guarantee: Fraction
    measured: Fraction
    first_length: int
    reference: Fraction
    stopped: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def guarantee_met(self) -> bool:
        return self.measured >= self.guarantee - Fraction(1, self.first_length)

    def to_dict(self) -> dict:
        return {
            "reference_density": _frac_str(self.reference),
            "window_threshold": _frac_str(self.target),
            "guarantee": _frac_str(self.guarantee),
            "measured": _frac_str(self.measured),
            "first_length": self.first_length,
            "guarantee_met": self.guarantee_met,
            "horizon": self.B.horizon,
            "size": len(self.B.elements),
            "stopped": self.stopped,
            "log": self.log,
            **self.extra,
        }

    def log_json(self) -> str:
        return json.dumps(self.log, sort_keys=True)


def _pack(A: IntSeq, windows):
    """Concatenate ``A`` restricted to each ``(start, length)`` window."""
    out, offset, log = [], 0, []
    for start, length in windows:
        part = A.restrict(start, start + length - 1)
        out.extend(a - start + offset + 1 for a in part)
        offset += length
        log.append({"k": start, "N": length, "w": offset, "count": len(part)})
    return IntSeq(tuple(out), offset), log


def banach_to_upper_transform(A: IntSeq, rho, M, tail_start: int = None) -> TransformResult:
    """Pack dense windows of geometrically growing length side by side.

    Windows ``[k_i, k_i + N_i - 1]`` of density at least ``rho * alpha``
    (``alpha`` the Banach estimate over windows of length >= ``tail_start``)
    are chosen first-fit by offset, then length, with ``N_{i+1} > M N_i``;
    window ``i`` lands on ``[w_{i-1} + 1, w_i]`` with ``w_i = N_1 + ... + N_i``.
    """
    rho, M = as_fraction(rho), as_fraction(M)
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if M <= 1:
        raise ValueError("M must exceed 1")
    if not A.elements:
        raise ValueError("A must be nonempty")
    tail_start = default_tail_start(A.horizon) if tail_start is None else tail_start
    S = A.prefix_counts()
    alpha, _, _ = max_window_density(S, tail_start)
    thr = rho * alpha
    windows, min_len = [], tail_start
    while True:
        hit = _first_window_at_least(S, thr, min_len)
        if hit is None:
            break
        windows.append(hit)
        min_len = math.floor(M * hit[1]) + 1
    if not windows:
        raise TransformError(
            f"no window of length >= {tail_start} reaches density {thr} (rho={rho}, alpha={alpha})"
        )
    B, log = _pack(A, windows)
    N1 = windows[0][1]
    measured = density_report(B, min(N1, B.horizon)).upper_est
    return TransformResult(
        B=B,
        log=log,
        target=thr,
        guarantee=rho * (M - 1) / M * alpha,
        measured=measured,
        first_length=N1,
        reference=alpha,
        stopped=f"no window of length >= {min_len} within horizon {A.horizon}",
        extra={"rho": _frac_str(rho), "M": _frac_str(M)},
    )


def upper_to_lower_transform(A: IntSeq, rho, tail_start: int = None) -> TransformResult:
    """Chain a dense prefix ``[1, N_1]`` with later intervals, each twice as
    long as the one before and of density at least ``rho * c`` (``c`` the
    upper density estimate), and concatenate their contents."""
    rho = as_fraction(rho)
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if not A.elements:
        raise ValueError("A must be nonempty")
    H = A.horizon
    tail_start = default_tail_start(H) if tail_start is None else tail_start
    S = A.prefix_counts()
    c, _ = _extreme_prefix_ratio(S, tail_start, H, True)
    thr = rho * c
    N1 = next(n for n in range(tail_start, H + 1) if S[n] * thr.denominator >= thr.numerator * n)
    windows = [(1, N1)]
    end, length = N1, N1
    while True:
        length *= 2
        if end + length > H:
            stopped = f"doubling chain stops at {len(windows)} intervals: next length {length} passes horizon {H}"
            break
        sub = S[end:] - S[end]
        hit = _first_exact_window(sub, thr, length)
        if hit is None:
            stopped = f"doubling chain stops at {len(windows)} intervals: no interval of length {length} after {end}"
            break
        start = end + hit
        windows.append((start, length))
        end = start + length - 1
    B, log = _pack(A, windows)
    measured = density_report(B, min(N1, B.horizon)).lower_est
    return TransformResult(
        B=B,
        log=log,
        target=thr,
        guarantee=thr / 3,
        measured=measured,
        first_length=N1,
        reference=c,
        stopped=stopped,
        extra={"rho": _frac_str(rho), "chain_length": len(windows)},
    )


def _first_exact_window(S, thr: Fraction, length: int):
    """Lowest 1-based offset of a window of exactly ``length`` with density >= thr."""
    if length > len(S) - 1:
        return None
    sums = S[length:] - S[:-length]
    ok = np.flatnonzero(sums * thr.denominator >= thr.numerator * length)
    return int(ok[0]) + 1 if ok.size else None


def longest_ap_of_seq(A: IntSeq) -> tuple:
    mask = 0
    for a in A.elements:
        mask |= 1 << (a - 1)
    L, start, gap = longest_ap_mask(mask)
    return L, (Progression(start, gap, L) if L else None)


def periodic(pattern: str, horizon: int) -> IntSeq:
    """Elements ``n`` with ``pattern[(n - 1) % len(pattern)] == '1'``."""
    p = len(pattern)
    return IntSeq.from_predicate(lambda n: pattern[(n - 1) % p] == "1", horizon)


def burst_sequence(horizon: int, first: int = 64, ratio: int = 2, fill: float = 0.5,
                   pattern: str = "11110") -> IntSeq:
    """Blocks at starts ``first * ratio**j`` of length ``fill * start``,
    filled periodically with ``pattern`` (density 4/5 by default)."""
    els, start = [], first
    p = len(pattern)
    while start <= horizon:
        stop = min(horizon, start + int(fill * start) - 1)
        els.extend(n for n in range(start, stop + 1) if pattern[(n - start) % p] == "1")
        start *= ratio
    return IntSeq(tuple(els), horizon)
