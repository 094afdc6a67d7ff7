"""Counting zero-sum subsequences by length.

``N_k(X)`` is the number of sub-multisets of X (counted with position
multiplicity, i.e. as subsets of the flattened word) having length k and sum 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from ._kernel import LengthKernel, Translator
from .errors import BudgetExceeded
from .lengths import LengthSet, as_length_set
from .sequences import GSequence, subsequence_remove

DEFAULT_WORK_BUDGET = 10**9


@lru_cache(maxsize=64)
def translator_for(radices: tuple[int, ...]) -> Translator:
    return Translator(radices)


@dataclass(frozen=True)
class ZeroSumProfile:
    counts: tuple[int, ...]
    mode: str = "exact"
    modulus: int | None = None

    @property
    def length(self) -> int:
        return len(self.counts) - 1

    def __getitem__(self, k: int) -> int:
        """N_k, with N_k = 0 for k < 0 or k > |X|."""
        if 0 <= k < len(self.counts):
            return self.counts[k]
        return 0

    def reduce(self, m: int) -> ZeroSumProfile:
        return ZeroSumProfile(tuple(c % m for c in self.counts), "mod", m)

    def to_dict(self) -> dict:
        return {"length": self.length, "mode": self.mode, "modulus": self.modulus, "counts": list(self.counts)}


def profile(X: GSequence, mode: str = "exact", modulus: int | None = None, budget: int = DEFAULT_WORK_BUDGET) -> ZeroSumProfile:
    """All counts N_0(X), ..., N_|X|(X).

    One DP pass per element of the flattened word over the table
    ``dp[k, x]`` = number of subsequences of length k with sum x.
    ``mode="mod"`` keeps residues modulo ``modulus``.
    """
    if mode not in ("exact", "mod"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "mod" and (modulus is None or modulus < 1):
        raise ValueError("modular mode needs a positive modulus")
    G = X.group
    L = X.length
    work = L * G.order * (L + 1)
    if work > budget:
        raise BudgetExceeded(f"profile needs {work} cell updates, budget is {budget}")

    # exact counts are bounded by 2^L, so int64 is safe below 63 elements
    if mode == "mod" or L < 63:
        dtype = np.int64
    else:
        dtype = object
    dp = np.zeros((L + 1, G.order), dtype=dtype)
    dp[0, 0] = 1
    add = G.add_table
    for step, g in enumerate(X.indices()):
        shifted = dp[: step + 1].copy()
        dp[1 : step + 2, add[:, g]] += shifted
        if mode == "mod":
            dp[1 : step + 2] %= modulus
    counts = dp[:, 0]
    if mode == "mod":
        return ZeroSumProfile(tuple(int(c) % modulus for c in counts), "mod", modulus)
    return ZeroSumProfile(tuple(int(c) for c in counts), "exact", None)


def profile_without(X: GSequence, removed: GSequence, mode: str = "exact", modulus: int | None = None, budget: int = DEFAULT_WORK_BUDGET) -> ZeroSumProfile:
    return profile(subsequence_remove(X, removed), mode, modulus, budget)


def has_zero_sum_with_length_in(X: GSequence, L: LengthSet | Iterable[int] | str) -> bool:
    """Early-exit test on the reachable (sum, length) bitset table."""
    lengths = as_length_set(L)
    if X.length == 0:
        return False
    kernel = LengthKernel(translator_for(X.group.factors or (1,)), lengths)
    state = kernel.initial()
    for g in X.indices():
        state = kernel.extend(state, g)
        if kernel.hits(state):
            return True
    return False


def brute_force_profile(X: GSequence) -> tuple[int, ...]:
    """Reference counts from all 2^|X| subsets of the flattened word (|X| <= 20)."""
    G = X.group
    word = X.indices()
    L = len(word)
    if L > 20:
        raise BudgetExceeded("brute force is limited to 20 elements")
    masks = np.arange(1 << L, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(L)) & 1
    sizes = bits.sum(axis=1)
    if G.rank == 0:
        return tuple(np.bincount(sizes, minlength=L + 1).tolist())
    coords = G.coord_array[word] if L else np.zeros((0, G.rank), dtype=np.int64)
    sums = (bits @ coords) % np.asarray(G.factors)
    zero = ~sums.any(axis=1)
    return tuple(int(c) for c in np.bincount(sizes[zero], minlength=L + 1))
