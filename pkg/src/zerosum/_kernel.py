"""Bitset kernel: subsets of a finite abelian group packed into Python ints.

Bit ``x`` of an int stands for the element with mixed-radix index ``x``.
Translating a set by ``g`` is a product of per-coordinate block rotations,
each costing two masks and two shifts.
"""

from __future__ import annotations

import math
from typing import Sequence

from .lengths import LengthSet


class Translator:
    def __init__(self, radices: Sequence[int]):
        self.radices = tuple(radices)
        self.order = math.prod(self.radices)
        self.full = (1 << self.order) - 1
        weights, w = [], 1
        for n in self.radices:
            weights.append(w)
            w *= n
        self.weights = tuple(weights)

        coords = [self._coords(x) for x in range(self.order)]
        # rot[i][d] = (lo, up, hi, down) for shifting coordinate i by d
        rot = []
        for i, (n, w) in enumerate(zip(self.radices, self.weights)):
            table = [None]
            for d in range(1, n):
                lo = hi = 0
                for x in range(self.order):
                    if coords[x][i] < n - d:
                        lo |= 1 << x
                    else:
                        hi |= 1 << x
                table.append((lo, d * w, hi, (n - d) * w))
            rot.append(table)
        self.ops: list[tuple[tuple[int, int, int, int], ...]] = []
        for x in range(self.order):
            self.ops.append(tuple(rot[i][c] for i, c in enumerate(coords[x]) if c))
        self.neg = [self._index([-c % n for c, n in zip(coords[x], self.radices)]) for x in range(self.order)]
        # ge[i]: all indices >= i
        self.ge = [self.full ^ ((1 << i) - 1) for i in range(self.order + 1)]

    def _coords(self, x: int) -> list[int]:
        out = []
        for n in self.radices:
            x, c = divmod(x, n)
            out.append(c)
        return out

    def _index(self, coords: Sequence[int]) -> int:
        return sum(c * w for c, w in zip(coords, self.weights))

    def translate(self, bits: int, g: int) -> int:
        for lo, up, hi, down in self.ops[g]:
            bits = ((bits & lo) << up) | ((bits & hi) >> down)
        return bits

    def negate(self, bits: int) -> int:
        out = 0
        neg = self.neg
        while bits:
            low = bits & -bits
            out |= 1 << neg[low.bit_length() - 1]
            bits ^= low
        return out


class LengthKernel:
    """Reachable (sum, length class) table for nonempty subsequences.

    ``state[c]`` is the bitset of sums of nonempty subsequences whose length
    falls in class c (see :meth:`LengthSet.tracking`).
    """

    def __init__(self, translator: Translator, lengths: LengthSet):
        self.tr = translator
        self.lengths = lengths
        mode, classes, forbidden = lengths.tracking()
        self.mode = mode
        self.classes = classes
        self.forbidden = tuple(sorted(forbidden))
        if mode == "mod":
            self.step = [(c + 1) % classes for c in range(classes)]
            self.single = 1 % classes
        else:
            self.step = [c + 1 if c + 1 < classes else None for c in range(classes)]
            self.single = 0
        self.moves = tuple((c, t) for c, t in enumerate(self.step) if t is not None)
        self.feeders = tuple(c for c, t in self.moves if t in forbidden)
        self.single_forbidden = self.single in forbidden

    def initial(self) -> tuple[int, ...]:
        return (0,) * self.classes

    def extend(self, state: Sequence[int], g: int) -> list[int]:
        tr = self.tr
        new = list(state)
        for c, t in self.moves:
            src = state[c]
            if src:
                new[t] |= tr.translate(src, g)
        new[self.single] |= 1 << g
        return new

    def extend_pair(self, state: Sequence[int], neg: Sequence[int], g: int) -> tuple[list[int], list[int]]:
        """Extend the table and its pointwise negation together."""
        tr = self.tr
        ng = tr.neg[g]
        new = list(state)
        nneg = list(neg)
        for c, t in self.moves:
            src = state[c]
            if src:
                new[t] |= tr.translate(src, g)
                nneg[t] |= tr.translate(neg[c], ng)
        new[self.single] |= 1 << g
        nneg[self.single] |= 1 << ng
        return new, nneg

    def dead_mask(self, neg: Sequence[int]) -> int:
        """Elements whose addition would create a forbidden zero-sum."""
        m = 1 if self.single_forbidden else 0
        for c in self.feeders:
            m |= neg[c]
        return m

    def hits(self, state: Sequence[int]) -> bool:
        return any(state[c] & 1 for c in self.forbidden)
