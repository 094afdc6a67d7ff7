"""Finite abelian groups in invariant-factor form, and closed-form p-group data.

Elements are residue vectors ``(c_1, ..., c_r)`` with ``0 <= c_i < n_i``.  Every
element also has an integer index in ``[0, |G|)`` given by the little-endian
mixed-radix encoding ``c_1 + n_1*c_2 + n_1*n_2*c_3 + ...``; index 0 is the
identity.  Search kernels and dynamic programs work on indices only.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import BadFactor, ChainViolation, NotAPGroup, OutOfRange, RankMismatch, SpecParseError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power_base(n: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``n == p**e`` and ``e >= 1``, or None."""
    if n < 2:
        return None
    p = 2
    while p * p <= n and n % p:
        p += 1
    if n % p:
        p = n
    e = 0
    m = n
    while m % p == 0:
        m //= p
        e += 1
    return (p, e) if m == 1 else None


@dataclass(frozen=True)
class GroupElement:
    coords: tuple[int, ...]

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``C_{n_1} + ... + C_{n_r}`` with ``n_1 | n_2 | ... | n_r``.

    The factor chain is validated, never normalized.  The empty chain is the
    trivial group.
    """

    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(int(n) for n in self.factors))
        for n in self.factors:
            if n < 2:
                raise BadFactor(f"invariant factor {n} is < 2")
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise ChainViolation(f"{a} does not divide {b}")

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    def canonical(self) -> str:
        if not self.factors:
            return "C1"
        return "*".join(f"C{n}" for n in self.factors)

    def __str__(self) -> str:
        return self.canonical()

    # -- elements -----------------------------------------------------------

    @property
    def identity(self) -> GroupElement:
        return GroupElement((0,) * self.rank)

    def element(self, *coords: int) -> GroupElement:
        """Build an element from raw integers, reducing each modulo its factor."""
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        if len(coords) != self.rank:
            raise RankMismatch(f"expected {self.rank} coordinates, got {len(coords)}")
        return GroupElement(tuple(c % n for c, n in zip(coords, self.factors)))

    def check(self, g: GroupElement) -> None:
        if len(g.coords) != self.rank:
            raise RankMismatch(f"element {g} does not have rank {self.rank}")
        for c, n in zip(g.coords, self.factors):
            if not 0 <= c < n:
                raise OutOfRange(f"coordinate {c} not reduced modulo {n}")

    def add(self, g: GroupElement, h: GroupElement) -> GroupElement:
        if len(g.coords) != self.rank or len(h.coords) != self.rank:
            raise RankMismatch("element rank does not match the group")
        return GroupElement(tuple((x + y) % n for x, y, n in zip(g.coords, h.coords, self.factors)))

    def neg(self, g: GroupElement) -> GroupElement:
        return GroupElement(tuple(-x % n for x, n in zip(g.coords, self.factors)))

    def scale(self, k: int, g: GroupElement) -> GroupElement:
        return GroupElement(tuple(k * x % n for x, n in zip(g.coords, self.factors)))

    def element_order(self, g: GroupElement) -> int:
        """Least ``k >= 1`` with ``k*g = 0``: the lcm of the coordinate orders."""
        k = 1
        for x, n in zip(g.coords, self.factors):
            k = math.lcm(k, n // math.gcd(x, n))
        return k

    @cached_property
    def weights(self) -> tuple[int, ...]:
        w, out = 1, []
        for n in self.factors:
            out.append(w)
            w *= n
        return tuple(out)

    def index_of(self, g: GroupElement) -> int:
        self.check(g)
        return sum(c * w for c, w in zip(g.coords, self.weights))

    def element_at(self, index: int) -> GroupElement:
        if not 0 <= index < self.order:
            raise OutOfRange(f"index {index} outside [0, {self.order})")
        coords = []
        for n in self.factors:
            index, c = divmod(index, n)
            coords.append(c)
        return GroupElement(tuple(coords))

    def elements(self) -> Iterator[GroupElement]:
        for i in range(self.order):
            yield self.element_at(i)

    # -- index-level tables used by the dynamic programs -----------------------

    @cached_property
    def coord_array(self) -> np.ndarray:
        """``(|G|, r)`` array of coordinates, row i = element_at(i)."""
        idx = np.arange(self.order)
        cols = []
        for n in self.factors:
            idx, c = np.divmod(idx, n)
            cols.append(c)
        if not cols:
            return np.zeros((1, 0), dtype=np.int64)
        return np.stack(cols, axis=1).astype(np.int64)

    def _encode(self, coords: np.ndarray) -> np.ndarray:
        f = np.asarray(self.factors, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.int64)
        return ((coords % f) * w).sum(axis=-1)

    @cached_property
    def add_table(self) -> np.ndarray:
        """``add_table[x, y]`` is the index of ``element_at(x) + element_at(y)``."""
        c = self.coord_array
        if self.rank == 0:
            return np.zeros((1, 1), dtype=np.int64)
        return self._encode(c[:, None, :] + c[None, :, :])

    @cached_property
    def neg_table(self) -> np.ndarray:
        if self.rank == 0:
            return np.zeros(1, dtype=np.int64)
        return self._encode(-self.coord_array)


def make_group(factors: Sequence[int]) -> FiniteAbelianGroup:
    """Validated constructor: raises BadFactor / ChainViolation."""
    return FiniteAbelianGroup(tuple(factors))


def add(g: GroupElement, h: GroupElement, G: FiniteAbelianGroup) -> GroupElement:
    return G.add(g, h)


def element_order(g: GroupElement, G: FiniteAbelianGroup) -> int:
    return G.element_order(g)


def index_of(g: GroupElement, G: FiniteAbelianGroup) -> int:
    return G.index_of(g)


def element_at(i: int, G: FiniteAbelianGroup) -> GroupElement:
    return G.element_at(i)


# -- p-groups ------------------------------------------------------------------


@dataclass(frozen=True)
class PGroupSpec:
    """``C_{p^{a_1}} + ... + C_{p^{a_r}}`` given by the prime and its exponents."""

    p: int
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponents", tuple(sorted(int(a) for a in self.exponents)))
        if not is_prime(self.p):
            raise BadFactor(f"{self.p} is not prime")
        if any(a < 1 for a in self.exponents):
            raise BadFactor("p-group exponents must be positive")

    def to_group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(tuple(self.p**a for a in self.exponents))

    @property
    def exponent(self) -> int:
        return self.p ** max(self.exponents, default=0)

    @property
    def order(self) -> int:
        return self.p ** sum(self.exponents)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    def canonical(self) -> str:
        return f"p={self.p};a=" + ",".join(str(a) for a in self.exponents)

    def __str__(self) -> str:
        return self.canonical()


def as_pgroup(G: FiniteAbelianGroup) -> PGroupSpec:
    """Recover the p-group spec of G, or raise NotAPGroup."""
    if not G.factors:
        raise NotAPGroup("the trivial group is not treated as a p-group")
    bases = [prime_power_base(n) for n in G.factors]
    if any(b is None for b in bases) or len({b[0] for b in bases}) != 1:
        raise NotAPGroup(f"{G.canonical()} is not a p-group")
    return PGroupSpec(bases[0][0], tuple(b[1] for b in bases))


def davenport_formula(spec: PGroupSpec) -> int:
    """Olson/Kruyswijk value ``sum(p^a_i - 1) + 1``."""
    return sum(spec.p**a - 1 for a in spec.exponents) + 1


def is_power_of(x: int, p: int) -> bool:
    if x < 1:
        return False
    while x % p == 0:
        x //= p
    return x == 1


def prime_powers_up_to(p: int, bound: int) -> list[int]:
    """All ``p^k`` (k >= 0) not exceeding bound, increasing."""
    out, q = [], 1
    while q <= bound:
        out.append(q)
        q *= p
    return out


@dataclass(frozen=True)
class Classification:
    spec: PGroupSpec
    davenport: int
    exponent: int
    deficiency: int
    rank_two_like: bool
    prime_power: int | None
    exact_value: bool
    admissible_prime_powers: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "group": self.spec.to_group().canonical(),
            "spec": self.spec.canonical(),
            "D": self.davenport,
            "exp": self.exponent,
            "c": self.deficiency,
            "rank_two_like": self.rank_two_like,
            "prime_power": self.prime_power,
            "admissible_prime_powers": list(self.admissible_prime_powers),
            "exact_value": self.exact_value,
        }


def classify_rank_two_like(spec: PGroupSpec) -> Classification:
    """Deficiency ``c = 2 exp(G) - D(G)`` and the derived applicability flags.

    ``prime_power`` is the largest ``p^k <= min(exp, c)``; ``exact_value`` is set
    when p is odd and c itself is a power of p not exceeding exp, which is the
    situation where the EGZ constant is pinned to ``2D - 1``.
    """
    D = davenport_formula(spec)
    n = spec.exponent
    c = 2 * n - D
    powers = tuple(prime_powers_up_to(spec.p, min(n, c))) if c >= 1 else ()
    return Classification(
        spec=spec,
        davenport=D,
        exponent=n,
        deficiency=c,
        rank_two_like=c >= 1,
        prime_power=powers[-1] if powers else None,
        exact_value=spec.p >= 3 and 1 <= c <= n and is_power_of(c, spec.p),
        admissible_prime_powers=powers,
    )


# -- spec strings --------------------------------------------------------------

_CYCLIC_RE = re.compile(r"^C(\d+)(\*C(\d+))*$")
_PSPEC_RE = re.compile(r"^p=(\d+);a=(\d+(?:,\d+)*)$")


def parse_group(text: str) -> FiniteAbelianGroup:
    """Parse either grammar and return the concrete group.

    ``C<n>(*C<n>)*`` lists invariant factors (``C1`` alone is the trivial
    group); ``p=<p>;a=<a_1>,...,<a_r>`` is a p-group spec.
    """
    text = text.strip()
    if text == "C1":
        return FiniteAbelianGroup(())
    if _CYCLIC_RE.match(text):
        return make_group([int(part[1:]) for part in text.split("*")])
    if _PSPEC_RE.match(text):
        return parse_pgroup(text).to_group()
    raise SpecParseError(f"cannot parse group spec {text!r}")


def parse_pgroup(text: str) -> PGroupSpec:
    """Parse a p-group from either grammar (factors must be powers of one prime)."""
    text = text.strip()
    m = _PSPEC_RE.match(text)
    if m:
        return PGroupSpec(int(m.group(1)), tuple(int(a) for a in m.group(2).split(",")))
    return as_pgroup(parse_group(text))


def format_group(G: FiniteAbelianGroup | PGroupSpec) -> str:
    return G.canonical()
