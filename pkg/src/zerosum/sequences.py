"""Sequences over a group, i.e. finite multisets of elements.

A :class:`GSequence` stores ``(element index, multiplicity)`` pairs sorted by
index, so two sequences with the same elements compare equal regardless of
the order in which they were written.

Text format, one sequence per line, with a header naming the group::

    # group: C3*C3
    (1,0)^3 (2,2)
    -

``-`` is the empty sequence.  Blank lines and other ``#`` lines are ignored.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapExceeded, NotASubsequence, OutOfRange, RankMismatch, SpecParseError
from .groups import FiniteAbelianGroup, GroupElement, parse_group

DEFAULT_ENUMERATION_CAP = 10**7


@dataclass(frozen=True)
class GSequence:
    group: FiniteAbelianGroup
    items: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        prev = -1
        for idx, mult in self.items:
            if idx <= prev:
                raise ValueError("element indices must be strictly increasing")
            if mult < 1:
                raise ValueError("multiplicities must be positive")
            if not 0 <= idx < self.group.order:
                raise OutOfRange(f"element index {idx} outside the group")
            prev = idx

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_indices(cls, group: FiniteAbelianGroup, indices: Iterable[int]) -> GSequence:
        counts = Counter(int(i) for i in indices)
        return cls(group, tuple(sorted(counts.items())))

    @classmethod
    def from_elements(cls, group: FiniteAbelianGroup, elements: Iterable[GroupElement | Sequence[int]]) -> GSequence:
        idx = []
        for g in elements:
            if not isinstance(g, GroupElement):
                g = group.element(*g)
            idx.append(group.index_of(g))
        return cls.from_indices(group, idx)

    @classmethod
    def empty(cls, group: FiniteAbelianGroup) -> GSequence:
        return cls(group, ())

    # -- queries ----------------------------------------------------------------

    @property
    def length(self) -> int:
        return sum(m for _, m in self.items)

    def __len__(self) -> int:
        return self.length

    def indices(self) -> list[int]:
        """Flattened nondecreasing index word."""
        return [i for i, m in self.items for _ in range(m)]

    def elements(self) -> list[GroupElement]:
        return [self.group.element_at(i) for i in self.indices()]

    def multiplicity(self, index: int) -> int:
        return dict(self.items).get(index, 0)

    def divides(self, other: GSequence) -> bool:
        """True iff ``self | other`` as multisets."""
        mine = dict(other.items)
        return all(mine.get(i, 0) >= m for i, m in self.items)

    def sum(self) -> GroupElement:
        return seq_sum(self)

    def __mul__(self, other: GSequence) -> GSequence:
        if other.group != self.group:
            raise RankMismatch("sequences live in different groups")
        c = Counter(dict(self.items))
        c.update(dict(other.items))
        return GSequence(self.group, tuple(sorted(c.items())))

    def __str__(self) -> str:
        return format_sequence(self)


def seq_sum(S: GSequence) -> GroupElement:
    G = S.group
    total = [0] * G.rank
    for idx, mult in S.items:
        for k, c in enumerate(G.element_at(idx).coords):
            total[k] += mult * c
    return G.element(*total) if G.rank else G.identity


def subsequence_remove(S: GSequence, T: GSequence) -> GSequence:
    """Return ``S * T^{-1}``; raises NotASubsequence unless ``T | S``."""
    if T.group != S.group or not T.divides(S):
        raise NotASubsequence("T does not divide S")
    left = dict(S.items)
    for i, m in T.items:
        left[i] -= m
    return GSequence(S.group, tuple(sorted((i, m) for i, m in left.items() if m)))


def sample_uniform(G: FiniteAbelianGroup, length: int, rng_seed) -> GSequence:
    """i.i.d. uniform elements; ``rng_seed`` is anything numpy accepts as a seed, or a Generator."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return GSequence.from_indices(G, rng.integers(0, G.order, size=length).tolist())


def multiset_count(group_order: int, length: int) -> int:
    return math.comb(group_order + length - 1, length)


def enumerate_multisets(
    G: FiniteAbelianGroup,
    length: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    first: range | None = None,
) -> Iterator[GSequence]:
    """Every multiset of the given size once, in lex order of the index word.

    ``first`` restricts the smallest element index, which splits the space
    into disjoint prefix ranges.
    """
    total = multiset_count(G.order, length)
    if total > cap:
        raise CapExceeded(f"{total} multisets of size {length} over {G.canonical()} exceed cap {cap}", required=total)
    if length == 0:
        if first is None:
            yield GSequence.empty(G)
        return
    starts = range(G.order) if first is None else first
    for s in starts:
        for rest in itertools.combinations_with_replacement(range(s, G.order), length - 1):
            yield GSequence.from_indices(G, (s, *rest))


# -- text format ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"^\(([-\d,]*)\)(?:\^(\d+))?$")


def format_element(g: GroupElement) -> str:
    return "(" + ",".join(str(c) for c in g.coords) + ")"


def format_sequence(S: GSequence) -> str:
    if not S.items:
        return "-"
    parts = []
    for idx, mult in S.items:
        tok = format_element(S.group.element_at(idx))
        parts.append(tok if mult == 1 else f"{tok}^{mult}")
    return " ".join(parts)


def parse_sequence(G: FiniteAbelianGroup, line: str) -> GSequence:
    line = line.strip()
    if line == "-":
        return GSequence.empty(G)
    counts: Counter[int] = Counter()
    for tok in line.split():
        m = _TOKEN_RE.match(tok)
        if not m:
            raise SpecParseError(f"bad sequence token {tok!r}")
        coords = [int(c) for c in m.group(1).split(",")] if m.group(1) else []
        mult = int(m.group(2)) if m.group(2) else 1
        if len(coords) != G.rank:
            raise RankMismatch(f"token {tok!r} does not have rank {G.rank}")
        if mult < 1:
            raise SpecParseError(f"multiplicity must be positive in {tok!r}")
        counts[G.index_of(G.element(*coords))] += mult
    return GSequence(G, tuple(sorted(counts.items())))


def dumps_sequences(G: FiniteAbelianGroup, seqs: Iterable[GSequence]) -> str:
    lines = [f"# group: {G.canonical()}"]
    lines.extend(format_sequence(S) for S in seqs)
    return "\n".join(lines) + "\n"


def loads_sequences(text: str, group: FiniteAbelianGroup | None = None) -> tuple[FiniteAbelianGroup, list[GSequence]]:
    G = group
    seqs = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"^#\s*group:\s*(\S+)\s*$", line)
            if m:
                declared = parse_group(m.group(1))
                if G is not None and declared != G:
                    raise SpecParseError(f"file declares {declared}, expected {G}")
                G = declared
            continue
        if G is None:
            raise SpecParseError("sequence line before '# group:' header")
        seqs.append(parse_sequence(G, line))
    if G is None:
        raise SpecParseError("missing '# group:' header")
    return G, seqs


def write_sequence_file(path: str | Path, G: FiniteAbelianGroup, seqs: Iterable[GSequence]) -> None:
    Path(path).write_text(dumps_sequences(G, seqs))


def read_sequence_file(path: str | Path) -> tuple[FiniteAbelianGroup, list[GSequence]]:
    return loads_sequences(Path(path).read_text())
