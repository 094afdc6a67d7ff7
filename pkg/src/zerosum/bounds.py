"""Rule-driven bounds for D, eta, s and interval constants of ``H + C_a``.

H is a finite abelian p-group and a is coprime to p.  Each rule in
:data:`RULES` is one record: the invariant it constrains, whether it gives a
lower bound, an upper bound or an exact value, a hypothesis predicate and a
formula.  :func:`bound_report` applies every rule whose hypothesis holds and
records the result under the rule's provenance tag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import BadJ, GcdViolation
from .groups import FiniteAbelianGroup, PGroupSpec, davenport_formula, is_power_of, prime_powers_up_to
from .lengths import LengthSet

KINDS = ("lower", "upper", "exact")
INVARIANTS = ("D", "eta", "s")


def compose(H: PGroupSpec, a: int) -> FiniteAbelianGroup:
    """Invariant-factor form of ``H + C_a`` (a coprime to p merges into the top factor)."""
    factors = [H.p**e for e in H.exponents]
    factors[-1] *= a
    return FiniteAbelianGroup(tuple(factors))


@dataclass(frozen=True)
class Entry:
    invariant: str
    kind: str
    value: int
    provenance: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "provenance": self.provenance, "detail": self.detail}


@dataclass
class Summary:
    lower: int | None
    upper: int | None
    exact: int | None
    consistent: bool

    @property
    def value(self) -> int | None:
        """Exact value, or the common value when the bounds meet."""
        if self.exact is not None:
            return self.exact
        if self.lower is not None and self.lower == self.upper:
            return self.lower
        return None

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact, "value": self.value, "consistent": self.consistent}


def summarize(entries: list[Entry]) -> Summary:
    lowers = [e.value for e in entries if e.kind in ("lower", "exact")]
    uppers = [e.value for e in entries if e.kind in ("upper", "exact")]
    exacts = {e.value for e in entries if e.kind == "exact"}
    lo = max(lowers) if lowers else None
    hi = min(uppers) if uppers else None
    ok = (lo is None or hi is None or lo <= hi) and len(exacts) <= 1
    exact = next(iter(exacts)) if len(exacts) == 1 else None
    if exact is not None:
        ok = ok and lo == exact == hi
    return Summary(lo, hi, exact, ok)


@dataclass
class Context:
    """Everything a rule may look at, plus the summaries of invariants already processed."""

    H: PGroupSpec
    a: int
    j: int | None
    G: FiniteAbelianGroup
    p: int
    n: int  # exp(H)
    N: int  # exp(G) = a n
    DH: int
    D: int | None  # D(G) when known
    c: int  # 2 exp(H) - D(H)
    pks: tuple[int, ...]  # admissible prime powers p^k <= min(n, c)
    sH_upper: int | None = None
    done: dict[str, Summary] = field(default_factory=dict)

    @property
    def pk(self) -> int | None:
        return self.pks[-1] if self.pks else None

    @property
    def rank_two(self) -> tuple[int, int] | None:
        f = self.G.factors
        if len(f) > 2:
            return None
        return (f[0], f[1]) if len(f) == 2 else (1, f[0])

    def lower(self, inv: str) -> int | None:
        s = self.done.get(inv)
        return s.lower if s else None

    def upper(self, inv: str) -> int | None:
        s = self.done.get(inv)
        return s.upper if s else None


def interval_key(j: int, N: int) -> str:
    return f"s[{j},{N}]"


@dataclass(frozen=True)
class Rule:
    id: str
    tag: str
    invariant: str  # "D", "eta", "s" or "interval"
    kind: str
    hypothesis: Callable[[Context], bool]
    formula: Callable[[Context], int]
    detail: Callable[[Context], str] = lambda ctx: ""

    @property
    def provenance(self) -> str:
        return f"{self.id}:{self.tag}"


def _odd_c(ctx: Context) -> int:
    if ctx.c % 2 != 1:
        raise AssertionError(f"deficiency c={ctx.c} is even; the (c-1)/2 bound needs odd c")
    return (ctx.c - 1) // 2


def _pk_detail(ctx: Context) -> str:
    return "p^k=" + str(ctx.pk) + "; admissible " + ",".join(str(q) for q in ctx.pks)


RULES: tuple[Rule, ...] = (
    # Davenport constant
    Rule("R4", "olson", "D", "exact", lambda c: c.a == 1, lambda c: c.DH),
    Rule("R4", "coprime-extension", "D", "exact", lambda c: c.a > 1 and c.DH <= 2 * c.n - 1, lambda c: c.DH + c.n * (c.a - 1)),
    Rule("R3", "rank-two", "D", "exact", lambda c: c.rank_two is not None, lambda c: c.rank_two[0] + c.rank_two[1] - 1),
    # eta
    Rule("R1", "eta>=D", "eta", "lower", lambda c: c.D is not None, lambda c: c.D),
    Rule("R2", "eta>=2D-n", "eta", "lower", lambda c: c.a == 1, lambda c: 2 * c.DH - c.n),
    Rule("R3", "rank-two", "eta", "exact", lambda c: c.rank_two is not None, lambda c: 2 * c.rank_two[0] + c.rank_two[1] - 2),
    Rule("R6", "eta=2D-n", "eta", "exact", lambda c: c.a == 1 and c.DH <= 2 * c.n - 1, lambda c: 2 * c.DH - c.n),
    # s
    Rule("R1", "s>=D+n-1", "s", "lower", lambda c: c.D is not None, lambda c: c.D + c.N - 1),
    Rule("R1", "s>=eta+n-1", "s", "lower", lambda c: c.lower("eta") is not None, lambda c: c.lower("eta") + c.N - 1),
    Rule("R2", "s>=2D-1", "s", "lower", lambda c: c.a == 1, lambda c: 2 * c.DH - 1),
    Rule("R3", "rank-two", "s", "exact", lambda c: c.rank_two is not None, lambda c: 2 * c.rank_two[0] + 2 * c.rank_two[1] - 3),
    Rule("R5", "s<=D+2n-2", "s", "upper", lambda c: c.a == 1 and c.p >= 3 and c.DH <= 2 * c.n - 1, lambda c: c.DH + 2 * c.n - 2),
    Rule("R7", "s<=D+2n-pk-1", "s", "upper", lambda c: c.a == 1 and c.p >= 3 and c.pk is not None, lambda c: c.DH + 2 * c.n - c.pk - 1, _pk_detail),
    Rule("R8", "exact-2D-1", "s", "exact", lambda c: c.a == 1 and c.p >= 3 and 1 <= c.c <= c.n and is_power_of(c.c, c.p), lambda c: 2 * c.DH - 1, lambda c: f"c={c.c}"),
    Rule("R9", "s<=D+2n-p-1", "s", "upper", lambda c: c.a == 1 and c.p >= 3 and c.DH < 2 * c.n - 1, lambda c: c.DH + 2 * c.n - c.p - 1),
    Rule("R10", "s<=D(H)+2N-pk-1", "s", "upper", lambda c: c.p >= 3 and c.pk is not None, lambda c: c.DH + 2 * c.N - c.pk - 1, _pk_detail),
    Rule("R11", "exact-2D-1", "s", "exact", lambda c: c.p >= 3 and 1 <= c.c <= c.n and is_power_of(c.c, c.p), lambda c: 2 * c.D - 1, lambda c: f"c={c.c}"),
    Rule("R12", "s<=D+2n-(c-1)/2-2", "s", "upper", lambda c: c.a == 1 and c.p >= 3 and 1 <= c.c <= c.n, lambda c: c.DH + 2 * c.n - _odd_c(c) - 2, lambda c: f"c={c.c}"),
    Rule("R13", "s>=2(D(K)-1)+2N-1", "s", "lower", lambda c: True, lambda c: 2 * (c.DH - c.n) + 2 * c.N - 1, lambda c: f"D(K)={c.DH - c.n + 1}"),
    Rule("R15", "quotient", "s", "upper", lambda c: c.a > 1 and c.sH_upper is not None, lambda c: (2 * c.a - 2) * c.n + c.sH_upper, lambda c: f"s(H)<={c.sH_upper}"),
    # s over [j, N]
    Rule("R14", "chain", "interval", "lower", lambda c: c.j is not None and c.lower("eta") is not None, lambda c: c.lower("eta") + c.j - 1),
    Rule("R14", "chain", "interval", "upper", lambda c: c.j is not None and c.upper("s") is not None, lambda c: c.upper("s") - c.N + c.j),
    Rule("R14", "coprime-lower", "interval", "lower", lambda c: c.j is not None and c.p >= 3 and c.pk is not None, lambda c: 2 * c.D - c.N + c.j - 1),
    Rule("R14", "coprime-upper", "interval", "upper", lambda c: c.j is not None and c.p >= 3 and c.pk is not None, lambda c: c.DH + c.N - c.pk + c.j - 1, _pk_detail),
    Rule(
        "R14",
        "coprime-exact",
        "interval",
        "exact",
        lambda c: c.j is not None and c.p >= 3 and 1 <= c.c <= c.n and is_power_of(c.c, c.p),
        lambda c: 2 * c.D - c.N + c.j - 1,
    ),
)


@dataclass
class BoundReport:
    group: FiniteAbelianGroup
    H: PGroupSpec
    a: int
    j: int | None
    entries: dict[str, list[Entry]]
    summaries: dict[str, Summary]

    @property
    def consistent(self) -> bool:
        return all(s.consistent for s in self.summaries.values())

    def invariants(self) -> list[str]:
        return list(self.entries)

    def rule_ids(self) -> set[str]:
        return {e.provenance.split(":")[0] for es in self.entries.values() for e in es}

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "group": self.group.canonical(),
            "decomposition": {"H": self.H.canonical(), "a": self.a},
            "j": self.j,
            "invariants": {
                inv: {"entries": [e.to_dict() for e in self.entries[inv]], **self.summaries[inv].to_dict()} for inv in self.entries
            },
            "consistent": self.consistent,
        }

    def rows(self) -> list[dict]:
        """Flat projection, one row per entry (for CSV)."""
        out = []
        for inv, es in self.entries.items():
            for e in es:
                out.append({"group": self.group.canonical(), "invariant": inv, **e.to_dict()})
        return out


def bound_report(H: PGroupSpec, a: int = 1, j: int | None = None) -> BoundReport:
    """Apply every rule in :data:`RULES` whose hypothesis holds for ``H + C_a``."""
    if a < 1 or math.gcd(a, H.p) != 1:
        raise GcdViolation(f"a={a} must be a positive integer coprime to p={H.p}")
    if not H.exponents:
        raise GcdViolation("H must be a nontrivial p-group")
    n = H.exponent
    N = a * n
    if j is not None and not 1 <= j <= N:
        raise BadJ(f"j={j} outside [1, {N}]")
    DH = davenport_formula(H)
    c = 2 * n - DH
    ctx = Context(
        H=H,
        a=a,
        j=j,
        G=compose(H, a),
        p=H.p,
        n=n,
        N=N,
        DH=DH,
        D=None,
        c=c,
        pks=tuple(prime_powers_up_to(H.p, min(n, c))) if c >= 1 else (),
    )
    if a > 1:
        ctx.sH_upper = bound_report(H, 1).summaries["s"].upper

    entries: dict[str, list[Entry]] = {}
    for inv in ("D", "eta", "s", "interval"):
        if inv == "interval" and j is None:
            continue
        name = interval_key(j, N) if inv == "interval" else inv
        found = []
        for rule in RULES:
            if rule.invariant == inv and rule.hypothesis(ctx):
                found.append(Entry(name, rule.kind, rule.formula(ctx), rule.provenance, rule.detail(ctx)))
        entries[name] = found
        ctx.done[name] = summarize(found)
        if inv == "D":
            ctx.D = ctx.done["D"].exact
    summaries = {name: summarize(es) for name, es in entries.items()}
    return BoundReport(ctx.G, H, a, j, entries, summaries)


# -- cross-validation -------------------------------------------------------------------


def lengths_for(invariant: str, N: int) -> LengthSet:
    if invariant == "D":
        return LengthSet.all()
    if invariant == "eta":
        return LengthSet.interval(1, N)
    if invariant == "s":
        return LengthSet.singleton(N)
    j = int(invariant[2:].split(",")[0])
    return LengthSet.interval(j, N)


@dataclass
class Check:
    invariant: str
    cached: int | None
    lower: int | None
    upper: int | None
    exact: int | None
    status: str  # consistent | mismatch | unchecked

    def to_dict(self) -> dict:
        return {"invariant": self.invariant, "cached": self.cached, "lower": self.lower, "upper": self.upper, "exact": self.exact, "status": self.status}


@dataclass
class ConsistencyResult:
    group: str
    checks: list[Check]

    @property
    def mismatches(self) -> list[Check]:
        return [c for c in self.checks if c.status == "mismatch"]

    @property
    def status(self) -> str:
        if self.mismatches:
            return "mismatch"
        if all(c.status == "unchecked" for c in self.checks):
            return "unchecked"
        return "consistent"

    def to_dict(self) -> dict:
        return {"group": self.group, "status": self.status, "checks": [c.to_dict() for c in self.checks]}


def _cached_value(report: BoundReport, invariant: str, cache) -> int | None:
    if isinstance(cache, Mapping):
        return cache.get(invariant)
    result = cache.lookup(report.group, lengths_for(invariant, report.group.exponent))
    return None if result is None else result.value


def cross_validate(report: BoundReport, cache) -> ConsistencyResult:
    """Compare each summary with exhaustively computed values.

    ``cache`` is either an :class:`~zerosum.cache.InvariantCache` or a plain
    mapping from invariant name (``"D"``, ``"eta"``, ``"s"``, ``"s[j,N]"``) to value.
    """
    checks = []
    for inv, summ in report.summaries.items():
        v = _cached_value(report, inv, cache)
        if v is None:
            status = "unchecked"
        else:
            inside = (summ.lower is None or summ.lower <= v) and (summ.upper is None or v <= summ.upper)
            status = "consistent" if inside and summ.exact in (None, v) else "mismatch"
        checks.append(Check(inv, v, summ.lower, summ.upper, summ.exact, status))
    return ConsistencyResult(report.group.canonical(), checks)
