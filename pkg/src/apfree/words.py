"""Finite binary words and arithmetic progressions among their one-positions.

A word ``d_1 d_2 ... d_N`` (most significant digit first) denotes the dyadic
rational ``sum(d_i * 2**-i)`` in [0, 1).  Position ``i`` is 1-based.

Two integer encodings are used internally:

* the *value* ``v = sum(d_i * 2**(N - i))``, so the word denotes ``v / 2**N``;
* the *position mask* with bit ``i - 1`` set iff ``d_i == 1``.

The position mask is the natural one for progression checks because
``p, p + d, p + 2d`` map to bits ``p-1, p-1+d, ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from fractions import Fraction
from typing import Iterable, Optional, Sequence


_DIGITS = frozenset((0, 1))


class WordFormatError(ValueError):
    pass


@dataclass(frozen=True)
class BinaryWord:
    digits: tuple

    def __post_init__(self):
        if len(self.digits) < 1:
            raise ValueError("a word needs at least one digit")
        if not _DIGITS.issuperset(self.digits):
            bad = next(i for i, d in enumerate(self.digits, 1) if d not in _DIGITS)
            raise ValueError(f"digit {bad} is {self.digits[bad - 1]!r}, expected 0 or 1")

    @classmethod
    def from_int(cls, value: int, length: int) -> "BinaryWord":
        """Word of ``length`` digits denoting ``value / 2**length``."""
        if cls is BinaryWord:
            return _word_from_int(value, length)
        return cls(_word_from_int(value, length).digits)

    @classmethod
    def from_positions(cls, positions: Iterable[int], length: int) -> "BinaryWord":
        digits = [0] * length
        for p in positions:
            if not 1 <= p <= length:
                raise ValueError(f"position {p} outside [1, {length}]")
            digits[p - 1] = 1
        return cls(tuple(digits))

    @classmethod
    def from_value(cls, value: Fraction, length: int) -> "BinaryWord":
        """Inverse of :attr:`value` for dyadic rationals with at most ``length`` digits."""
        value = Fraction(value)
        scaled = value * (1 << length)
        if scaled.denominator != 1:
            raise ValueError(f"{value} is not representable with {length} binary digits")
        return cls.from_int(int(scaled), length)

    @classmethod
    def zeros(cls, length: int) -> "BinaryWord":
        return cls((0,) * length)

    @property
    def length(self) -> int:
        return len(self.digits)

    def __len__(self):
        return len(self.digits)

    def __str__(self):
        return "".join(map(str, self.digits))

    @cached_property
    def as_int(self) -> int:
        return int(str(self), 2)

    @property
    def value(self) -> Fraction:
        return Fraction(self.as_int, 1 << self.length)

    @cached_property
    def position_mask(self) -> int:
        return int(str(self)[::-1], 2)


@lru_cache(maxsize=1 << 16)
def _word_from_int(value: int, length: int) -> BinaryWord:
    # words are immutable, so sharing instances is safe
    if length < 1:
        raise ValueError("length must be >= 1")
    if not 0 <= value < (1 << length):
        raise ValueError(f"value {value} does not fit in {length} digits")
    return BinaryWord(tuple(map(int, format(value, f"0{length}b"))))


@dataclass(frozen=True)
class Progression:
    start: int
    gap: int
    terms: int

    def __post_init__(self):
        if self.start < 1 or self.gap < 1 or self.terms < 1:
            raise ValueError(f"invalid progression {self}")

    @property
    def positions(self) -> tuple:
        return tuple(self.start + t * self.gap for t in range(self.terms))

    @property
    def last(self) -> int:
        return self.start + (self.terms - 1) * self.gap


def parse_word(text: str) -> BinaryWord:
    """Parse ``"0.1011"`` or ``"1011"`` into a word.

    Errors name the offending character position within ``text``.
    """
    body, offset = text, 0
    if text.startswith("0."):
        body, offset = text[2:], 2
    if not body:
        raise WordFormatError(f"empty word at position {offset + 1} of {text!r}")
    for i, ch in enumerate(body):
        if ch not in "01":
            raise WordFormatError(
                f"illegal character {ch!r} at position {offset + i + 1} of {text!r}"
            )
    return BinaryWord(tuple(1 if ch == "1" else 0 for ch in body))


def one_positions(w: BinaryWord) -> tuple:
    return tuple(i for i, d in enumerate(w.digits, 1) if d)


def longest_ap_mask(mask: int) -> tuple:
    """Longest AP among the set bits of ``mask`` (bit ``b`` = position ``b + 1``).

    Returns ``(L, start, gap)``; ties prefer the smallest start, then the
    smallest gap.  ``(0, None, None)`` for an empty mask and ``(1, p, 1)``
    for a single bit.
    """
    if mask == 0:
        return 0, None, None
    lo = (mask & -mask).bit_length() - 1
    if mask & (mask - 1) == 0:
        return 1, lo + 1, 1
    span = mask.bit_length() - 1 - lo
    best_len, best_start, best_gap = 1, lo + 1, 1
    d = 1
    # a chain of best_len terms with gap d needs (best_len - 1) * d <= span
    while (best_len - 1) * d <= span:
        chain, length = mask, 1
        while True:
            nxt = chain & (mask >> (length * d))
            if not nxt:
                break
            chain, length = nxt, length + 1
        start = (chain & -chain).bit_length()
        if length > best_len or (length == best_len and start < best_start):
            best_len, best_start, best_gap = length, start, d
        d += 1
    return best_len, best_start, best_gap


def longest_ap(w: BinaryWord) -> tuple:
    """Return ``(L, witness)`` for the longest AP of one-positions of ``w``."""
    length, start, gap = longest_ap_mask(w.position_mask)
    if length == 0:
        return 0, None
    return length, Progression(start, gap, length)


def is_k_ap_free(w: BinaryWord, k: int) -> bool:
    return longest_ap(w)[0] < k


def completes_ap(positions: Sequence[int], p: int, k: int) -> bool:
    """True iff ``positions + [p]`` has a ``k``-term AP whose last term is ``p``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if positions and p <= max(positions):
        raise ValueError(f"p={p} must exceed max(positions)={max(positions)}")
    if k == 1:
        return True
    present = set(positions)
    for d in range(1, (p - 1) // (k - 1) + 1):
        if all(p - t * d in present for t in range(1, k)):
            return True
    return False


def shift_word(w: BinaryWord, t: int) -> BinaryWord:
    """Drop the first ``t`` digits, i.e. multiply by ``2**t`` modulo 1."""
    if t < 0 or t > w.length:
        raise ValueError(f"shift {t} outside [0, {w.length}]")
    if t == w.length:
        return BinaryWord((0,))
    return BinaryWord(w.digits[t:])


def is_subsequence(y: BinaryWord, x: BinaryWord, shift: int) -> bool:
    """Is ``y`` a binary subsequence of ``x`` at offset ``shift``?

    Every one of ``y`` must sit exactly ``shift`` places to the right of a
    one of ``x``; in particular ``y_j == 0`` for ``j <= shift``.
    """
    if shift < 0:
        raise ValueError("shift must be >= 0")
    for j, d in enumerate(y.digits, 1):
        if not d:
            continue
        i = j - shift
        if i < 1 or i > x.length or not x.digits[i - 1]:
            return False
    return True


def find_subsequence_shift(y: BinaryWord, x: BinaryWord) -> Optional[int]:
    """Smallest ``shift`` in ``[0, len(y)]`` making ``y`` a subsequence of ``x``."""
    for shift in range(y.length + 1):
        if is_subsequence(y, x, shift):
            return shift
    return None


def format_word(w: BinaryWord, prefix: bool = False) -> str:
    return ("0." if prefix else "") + str(w)
