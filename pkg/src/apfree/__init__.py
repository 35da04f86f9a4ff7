"""Finite-depth experiments on binary words whose one-positions avoid
long arithmetic progressions."""

from apfree.errors import BudgetExceeded
from apfree.words import (
    BinaryWord,
    Progression,
    completes_ap,
    is_k_ap_free,
    is_subsequence,
    longest_ap,
    one_positions,
    parse_word,
    shift_word,
)

__all__ = [
    "BinaryWord",
    "BudgetExceeded",
    "Progression",
    "completes_ap",
    "is_k_ap_free",
    "is_subsequence",
    "longest_ap",
    "one_positions",
    "parse_word",
    "shift_word",
]

__version__ = "0.1.0"
