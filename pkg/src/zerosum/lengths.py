"""Sets of admissible zero-sum lengths ``L`` and their descriptors."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BadJ, SpecParseError

KINDS = ("all", "interval", "interval_plus_N", "singleton", "explicit")


@dataclass(frozen=True)
class LengthSet:
    """A subset of the positive integers.

    ``interval`` is ``[j, n]``.  ``interval_plus_N`` is ``[j, n] + nN_0``: the
    lengths k >= 1 whose residue mod n, read in ``[1, n]``, is at least j.
    """

    kind: str
    j: int | None = None
    n: int | None = None
    values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown length-set kind {self.kind!r}")
        if self.kind in ("interval", "interval_plus_N"):
            if self.j is None or self.n is None or not 1 <= self.j <= self.n:
                raise BadJ(f"need 1 <= j <= n, got j={self.j}, n={self.n}")
        if self.kind in ("singleton", "explicit"):
            vals = tuple(sorted(set(int(v) for v in self.values)))
            if not vals or vals[0] < 1:
                raise ValueError("explicit length sets must be nonempty sets of positive integers")
            if self.kind == "singleton" and len(vals) != 1:
                raise ValueError("singleton needs exactly one value")
            object.__setattr__(self, "values", vals)

    # -- constructors ------------------------------------------------------------

    @classmethod
    def all(cls) -> LengthSet:
        return cls("all")

    @classmethod
    def interval(cls, j: int, n: int) -> LengthSet:
        return cls("interval", j=j, n=n)

    @classmethod
    def interval_plus_N(cls, j: int, n: int) -> LengthSet:
        return cls("interval_plus_N", j=j, n=n)

    @classmethod
    def singleton(cls, n: int) -> LengthSet:
        return cls("singleton", values=(n,))

    @classmethod
    def explicit(cls, values) -> LengthSet:
        return cls("explicit", values=tuple(values))

    # -- membership ----------------------------------------------------------------

    def __contains__(self, k: int) -> bool:
        if k < 1:
            return False
        if self.kind == "all":
            return True
        if self.kind == "interval":
            return self.j <= k <= self.n
        if self.kind == "interval_plus_N":
            return (k - 1) % self.n + 1 >= self.j
        return k in self.values

    def max_length(self) -> int | None:
        """Largest member, or None when the set is infinite."""
        if self.kind == "interval":
            return self.n
        if self.kind in ("singleton", "explicit"):
            return self.values[-1]
        return None

    def tracking(self) -> tuple[str, int, frozenset[int]]:
        """How the search tracks subsequence lengths.

        Returns ``(mode, classes, forbidden)``.  In ``"mod"`` mode class c holds
        lengths congruent to c modulo ``classes``; in ``"exact"`` mode class c
        holds length c+1 and longer subsequences are irrelevant.
        """
        if self.kind == "all":
            return "mod", 1, frozenset({0})
        if self.kind == "interval_plus_N":
            n = self.n
            return "mod", n, frozenset(r for r in range(n) if (r - 1) % n + 1 >= self.j)
        m = self.max_length()
        return "exact", m, frozenset(k - 1 for k in range(1, m + 1) if k in self)

    def descriptor(self) -> str:
        if self.kind == "all":
            return "N"
        if self.kind == "interval":
            return f"[{self.j},{self.n}]"
        if self.kind == "interval_plus_N":
            return f"[{self.j},{self.n}]+N"
        return "{" + ",".join(str(v) for v in self.values) + "}"

    def __str__(self) -> str:
        return self.descriptor()


_DESC_INTERVAL = re.compile(r"^\[(\d+),(\d+)\](\+N)?$")
_DESC_SET = re.compile(r"^\{(\d+(?:,\d+)*)\}$")


def parse_length_set(text: str) -> LengthSet:
    text = text.strip()
    if text == "N":
        return LengthSet.all()
    m = _DESC_INTERVAL.match(text)
    if m:
        j, n = int(m.group(1)), int(m.group(2))
        return LengthSet.interval_plus_N(j, n) if m.group(3) else LengthSet.interval(j, n)
    m = _DESC_SET.match(text)
    if m:
        vals = [int(v) for v in m.group(1).split(",")]
        return LengthSet.singleton(vals[0]) if len(vals) == 1 else LengthSet.explicit(vals)
    raise SpecParseError(f"cannot parse length set {text!r}")


def as_length_set(L) -> LengthSet:
    """Accept a LengthSet, a descriptor string, or a finite iterable of ints."""
    if isinstance(L, LengthSet):
        return L
    if isinstance(L, str):
        return parse_length_set(L)
    vals = tuple(L)
    return LengthSet.singleton(vals[0]) if len(set(vals)) == 1 else LengthSet.explicit(vals)
