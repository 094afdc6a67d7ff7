"""Executable checks of the zero-sum congruences over finite abelian p-groups.

Every checker validates its hypotheses, computes the left-hand side of one
identity from the zero-sum profile of its input, and returns the residue mod p
(or the pair of residues / boolean an identity compares).  :func:`fuzz` drives
a checker over random admissible inputs and collects violations.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BadWindow,
    HypothesisViolation,
    InadmissibleGroup,
    NotAPGroup,
    PreconditionViolation,
    PremiseNotMet,
    TooManyVariables,
    WindowViolation,
)
from .groups import (
    FiniteAbelianGroup,
    GroupElement,
    PGroupSpec,
    as_pgroup,
    davenport_formula,
    is_power_of,
    is_prime,
    prime_powers_up_to,
)
from ._kernel import LengthKernel
from .lengths import LengthSet
from .sequences import GSequence, enumerate_multisets, format_sequence
from .zscount import ZeroSumProfile, has_zero_sum_with_length_in, profile, translator_for

DEFAULT_MAX_ATTEMPTS = 10**5
DEFAULT_MAX_VARIABLES = 24


@dataclass(frozen=True)
class PData:
    p: int
    n: int
    D: int


def pgroup_data(G: FiniteAbelianGroup) -> PData:
    spec = as_pgroup(G)
    return PData(spec.p, spec.exponent, davenport_formula(spec))


def _in_window(t: int, lo: int, hi: int, what: str) -> None:
    if not lo <= t <= hi:
        raise WindowViolation(f"{what}: length {t} outside [{lo}, {hi}]")


def _mod_profile(J: GSequence, p: int, prof: ZeroSumProfile | None) -> ZeroSumProfile:
    if prof is None:
        return profile(J, "mod", p)
    return prof if prof.mode == "mod" and prof.modulus == p else prof.reduce(p)


def _binom_sum(N: ZeroSumProfile, gamma: int, top: int) -> int:
    """sum_{i=0..gamma} C(gamma, i) N_{top - i}."""
    return sum(math.comb(gamma, i) * N[top - i] for i in range(gamma + 1))


# -- Baker-Schmidt parity ---------------------------------------------------------


@dataclass(frozen=True)
class Equation:
    """``c_1 x_1 + ... + c_s x_s + b = 0`` in ``group``."""

    group: FiniteAbelianGroup
    coeffs: tuple[GroupElement, ...]
    constant: GroupElement


@dataclass(frozen=True)
class LinearSystem:
    num_vars: int
    equations: tuple[Equation, ...]

    def __post_init__(self) -> None:
        primes = set()
        for eq in self.equations:
            if len(eq.coeffs) != self.num_vars:
                raise ValueError("every coefficient list must have num_vars entries")
            primes.add(as_pgroup(eq.group).p)
        if len(primes) > 1:
            raise NotAPGroup("all equations must live in p-groups for the same prime")

    @property
    def prime(self) -> int:
        return as_pgroup(self.equations[0].group).p

    def threshold(self) -> int:
        """Smallest variable count for which the parity congruence is guaranteed (degree 1)."""
        return sum(davenport_formula(as_pgroup(eq.group)) - 1 for eq in self.equations) + 1


def baker_schmidt_parity(system: LinearSystem, max_vars: int = DEFAULT_MAX_VARIABLES) -> tuple[int, int]:
    """Even- and odd-weight 0/1 solution counts ``(A, B)`` by direct enumeration."""
    s = system.num_vars
    if s > max_vars:
        raise TooManyVariables(f"{s} variables exceed the enumeration bound {max_vars}")
    low = min(s, 16)
    high = s - low
    masks = np.arange(1 << low, dtype=np.int64)
    low_bits = (masks[:, None] >> np.arange(low)) & 1
    low_weight = low_bits.sum(axis=1)
    per_eq = []
    for eq in system.equations:
        G = eq.group
        f = np.asarray(G.factors, dtype=np.int64)
        C = np.array([c.coords for c in eq.coeffs], dtype=np.int64).reshape(s, G.rank)
        base = (low_bits @ C[:low] + np.asarray(eq.constant.coords, dtype=np.int64)) % f
        per_eq.append((f, C[low:], base))
    A = B = 0
    for h in range(1 << high):
        hb = np.array([(h >> i) & 1 for i in range(high)], dtype=np.int64)
        ok = np.ones(len(masks), dtype=bool)
        for f, Chigh, base in per_eq:
            vals = (base + hb @ Chigh) % f if high else base
            ok &= ~vals.any(axis=1)
        w = low_weight[ok] + int(hb.sum())
        odd = int((w & 1).sum())
        B += odd
        A += int(ok.sum()) - odd
    return A, B


def check_baker_schmidt(system: LinearSystem) -> tuple[int, int, bool]:
    """``(A, B, applies)``; when ``applies`` the theory says A - B = 0 mod p."""
    A, B = baker_schmidt_parity(system)
    return A, B, system.num_vars >= system.threshold()


def random_pgroup(p: int, max_order: int, rng: np.random.Generator) -> FiniteAbelianGroup:
    """Uniform choice among p-groups of order <= max_order (as sorted exponent lists)."""
    top = int(math.log(max_order, p) + 1e-9)
    options = [part for total in range(1, top + 1) for part in _partitions(total)]
    part = options[rng.integers(len(options))]
    return PGroupSpec(p, tuple(part)).to_group()


def _partitions(total: int, largest: int | None = None) -> list[tuple[int, ...]]:
    largest = total if largest is None else largest
    if total == 0:
        return [()]
    out = []
    for first in range(min(total, largest), 0, -1):
        out.extend(tuple(sorted((first, *rest))) for rest in _partitions(total - first, first))
    return out


def random_linear_system(p: int, rng: np.random.Generator, max_order: int = 27, max_vars: int = 20, at_threshold: bool = True) -> LinearSystem:
    """Random degree-1 system over p-groups; ``at_threshold`` keeps s >= threshold."""
    while True:
        num_eq = int(rng.integers(1, 4))
        groups = [random_pgroup(p, max_order, rng) for _ in range(num_eq)]
        thr = sum(davenport_formula(as_pgroup(G)) - 1 for G in groups) + 1
        if at_threshold and thr > max_vars:
            continue
        s = int(rng.integers(thr, max_vars + 1)) if at_threshold else int(rng.integers(1, max_vars + 1))
        eqs = []
        for G in groups:
            coeffs = tuple(G.element_at(int(i)) for i in rng.integers(0, G.order, size=s))
            eqs.append(Equation(G, coeffs, G.element_at(int(rng.integers(G.order)))))
        return LinearSystem(s, tuple(eqs))


# -- master congruence and its instances --------------------------------------------


def minimal_k(t: int, gamma: int, beta: int, n: int) -> int:
    """Least k >= 2 with ``t <= k n - 1 - gamma - beta``."""
    return max(2, -(-(t + gamma + beta + 1) // n))


def check_master_congruence(J: GSequence, gamma: int, beta: int, k: int, prof: ZeroSumProfile | None = None) -> int:
    """Residue of ``sum_{j<k} (-1)^j sum_i C(gamma,i) N_{jn-i-beta}(J)`` mod p."""
    d = pgroup_data(J.group)
    if gamma < 0 or beta < 0 or k < 2:
        raise HypothesisViolation("need gamma >= 0, beta >= 0, k >= 2")
    _in_window(J.length, d.D + d.n - 1 - gamma, k * d.n - 1 - gamma - beta, "master congruence")
    N = _mod_profile(J, d.p, prof)
    total = sum((-1) ** j * _binom_sum(N, gamma, j * d.n - beta) for j in range(k))
    return total % d.p


CONGRUENCE_VARIANTS = ("three", "three-shifted", "four", "four-shifted")


def check_alternating_sum(J: GSequence, variant: str, gamma: int = 0, beta: int = 0, prof: ZeroSumProfile | None = None) -> int:
    """The four short alternating identities (three or four blocks of N).

    three: ``1 - sum C(g,i) N_{n-i} + sum C(g,i) N_{2n-i}``, length in [D+n-1-g, 3n-1-g]
    three-shifted: ``sum C(g,i) N_{n-i-b} - sum C(g,i) N_{2n-i-b}``, b >= 1, length in [D+n-1-g, 3n-1-g-b]
    four: ``1 - N_n + N_2n - N_3n``, length in [D+n-1, 4n-1]
    four-shifted: ``N_{n-b} - N_{2n-b} + N_{3n-b}``, b >= 1, length in [D+n-1, 4n-1-b]
    """
    d = pgroup_data(J.group)
    n, D, t = d.n, d.D, J.length
    if variant == "three":
        if gamma < 0:
            raise HypothesisViolation("gamma must be >= 0")
        _in_window(t, D + n - 1 - gamma, 3 * n - 1 - gamma, "three alternating sum")
        N = _mod_profile(J, d.p, prof)
        lhs = 1 - _binom_sum(N, gamma, n) + _binom_sum(N, gamma, 2 * n)
    elif variant == "three-shifted":
        if gamma < 0 or beta < 1:
            raise HypothesisViolation("need gamma >= 0 and beta >= 1")
        _in_window(t, D + n - 1 - gamma, 3 * n - 1 - gamma - beta, "three-shifted alternating sum")
        N = _mod_profile(J, d.p, prof)
        lhs = _binom_sum(N, gamma, n - beta) - _binom_sum(N, gamma, 2 * n - beta)
    elif variant == "four":
        _in_window(t, D + n - 1, 4 * n - 1, "four alternating sum")
        N = _mod_profile(J, d.p, prof)
        lhs = 1 - N[n] + N[2 * n] - N[3 * n]
    elif variant == "four-shifted":
        if beta < 1:
            raise HypothesisViolation("beta must be >= 1")
        _in_window(t, D + n - 1, 4 * n - 1 - beta, "four-shifted alternating sum")
        N = _mod_profile(J, d.p, prof)
        lhs = N[n - beta] - N[2 * n - beta] + N[3 * n - beta]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return lhs % d.p


def check_egz_implication(J: GSequence, prof: ZeroSumProfile | None = None) -> tuple[int, int]:
    """``(N_n mod p, N_2n mod p)``; if the first is 0 the second must be p - 1."""
    d = pgroup_data(J.group)
    _in_window(J.length, d.D + d.n - 1, 3 * d.n - 1, "N_n / N_2n implication")
    N = _mod_profile(J, d.p, prof)
    return N[d.n] % d.p, N[2 * d.n] % d.p


def egz_implication_holds(res: tuple[int, int], p: int) -> bool:
    n_res, twon_res = res
    return n_res != 0 or twon_res == p - 1


# -- binomials ----------------------------------------------------------------------


def lucas_binom(m, k, p: int):
    """``C(m, k) mod p`` as the product of digit binomials in base p.

    ``m`` and ``k`` may be integer numpy arrays (broadcast together), in which
    case an array of residues is returned.
    """
    if isinstance(m, np.ndarray) or isinstance(k, np.ndarray):
        return _lucas_array(np.asarray(m, dtype=np.int64), np.asarray(k, dtype=np.int64), p)
    if m < 0 or k < 0:
        raise ValueError("m and k must be nonnegative")
    out = 1
    while m or k:
        m, mi = divmod(m, p)
        k, ki = divmod(k, p)
        if ki > mi:
            return 0
        out = out * math.comb(mi, ki) % p
    return out % p


def _lucas_array(m: np.ndarray, k: np.ndarray, p: int) -> np.ndarray:
    if (m < 0).any() or (k < 0).any():
        raise ValueError("m and k must be nonnegative")
    digits = np.array([[math.comb(i, j) % p for j in range(p)] for i in range(p)], dtype=np.int64)
    m, k = np.broadcast_arrays(m, k)
    m, k = m.copy(), k.copy()
    out = np.ones(m.shape, dtype=np.int64)
    while (m | k).any():
        out = out * digits[m % p, k % p] % p
        m //= p
        k //= p
    return out


def check_binomial_residue(h: int, n: int, a: int, p: int) -> int:
    """``C(hn + a, n) mod p`` from the exact big-integer binomial; expected ``h mod p``."""
    if not is_prime(p):
        raise BadWindow(f"{p} is not prime")
    if not is_power_of(n, p):
        raise BadWindow(f"n={n} is not a power of {p}")
    if not 0 <= a <= n - 1:
        raise BadWindow(f"a={a} outside [0, {n - 1}]")
    if h < 1:
        raise BadWindow("h must be positive")
    return math.comb(h * n + a, n) % p


# -- lemmas with hypotheses on D(G) ---------------------------------------------------


def check_lifted_congruence(X: GSequence, gamma: int, prof: ZeroSumProfile | None = None) -> int:
    """Residue of ``3 - 2 sum C(g,i) N_{n-i}(X) + sum C(g,i) N_{2n-i}(X)``.

    Needs ``0 <= gamma <= n-1``, ``n+1+gamma <= D <= 2n`` and
    ``|X| in [D+2n-1-gamma, 4n-1-gamma]``.
    """
    d = pgroup_data(X.group)
    n, D = d.n, d.D
    if not 0 <= gamma <= n - 1 or not n + 1 + gamma <= D <= 2 * n:
        raise HypothesisViolation(f"need 0 <= gamma <= n-1 and n+1+gamma <= D <= 2n (gamma={gamma}, n={n}, D={D})")
    _in_window(X.length, D + 2 * n - 1 - gamma, 4 * n - 1 - gamma, "lifted congruence")
    N = _mod_profile(X, d.p, prof)
    return (3 - 2 * _binom_sum(N, gamma, n) + _binom_sum(N, gamma, 2 * n)) % d.p


def check_small_davenport(X: GSequence, pk: int, prof: ZeroSumProfile | None = None) -> int:
    """Residue of ``2 - 2 N_{n-pk}(X) + N_{2n-pk}(X)`` when ``N_n(X) = 0``.

    Needs a power ``pk`` of p with ``1 <= pk <= n``, ``n+1 <= D <= n+pk``, and
    ``|X| in [D+2n-1-pk, 3n-1]``.
    """
    d = pgroup_data(X.group)
    n, D = d.n, d.D
    if not (is_power_of(pk, d.p) and 1 <= pk <= n and n + 1 <= D <= n + pk):
        raise HypothesisViolation(f"need a power pk of p in [1, n] with n+1 <= D <= n+pk (pk={pk}, n={n}, D={D})")
    _in_window(X.length, D + 2 * n - 1 - pk, 3 * n - 1, "small-Davenport congruence")
    if has_zero_sum_with_length_in(X, LengthSet.singleton(n)):
        raise PremiseNotMet("N_n(X) != 0")
    N = _mod_profile(X, d.p, prof)
    return (2 - 2 * N[n - pk] + N[2 * n - pk]) % d.p


def check_abc_symmetry(J: GSequence, alpha: int, prof: ZeroSumProfile | None = None) -> tuple[int, int]:
    """``(N_{n-alpha} mod p, N_{3n-alpha} mod p)``; equal when ``N_n(J) = 0``.

    Needs ``1 <= alpha <= min(n, 2n+1-D)`` and ``|J| in [D+2n-alpha-1, 4n-alpha-1]``.
    """
    d = pgroup_data(J.group)
    n, D = d.n, d.D
    if not (1 <= alpha <= n and alpha <= 2 * n + 1 - D):
        raise HypothesisViolation(f"need 1 <= alpha <= min(n, 2n+1-D) (alpha={alpha}, n={n}, D={D})")
    _in_window(J.length, D + 2 * n - alpha - 1, 4 * n - alpha - 1, "ABC symmetry")
    if has_zero_sum_with_length_in(J, LengthSet.singleton(n)):
        raise PremiseNotMet("N_n(J) != 0")
    N = _mod_profile(J, d.p, prof)
    return N[n - alpha] % d.p, N[3 * n - alpha] % d.p


def check_dubiner(J: GSequence) -> bool:
    """A zero-sum J of length 3n over a group with D <= 2n has a zero-sum n-subsequence."""
    d = pgroup_data(J.group)
    if d.D > 2 * d.n:
        raise PreconditionViolation(f"D={d.D} exceeds 2n={2 * d.n}")
    if J.length != 3 * d.n:
        raise PreconditionViolation(f"length {J.length} != 3n={3 * d.n}")
    if any(J.sum().coords):
        raise PreconditionViolation("J is not a zero-sum sequence")
    return has_zero_sum_with_length_in(J, LengthSet.singleton(d.n))


# -- structural conjecture --------------------------------------------------------------


def has_nested_zero_sum(S: GSequence, total: int, inner: range) -> bool:
    """True iff S has a zero-sum T of length ``total`` containing a zero-sum U with ``|U| in inner``.

    Equivalently, S has disjoint zero-sum U and V with ``|U| = u`` in inner and
    ``|V| = total - u``.  Runs a reachability DP over ``G + G`` indexed by
    ``(|U|, |V|)``.
    """
    inner = [u for u in inner if 1 <= u < total]
    if not inner:
        return False
    G = S.group
    order = G.order
    tr = translator_for((G.factors or (1,)) * 2)
    umax = max(inner)
    vmax = total - min(inner)
    # table[a][b]: bitset over G+G of (sum U, sum V) with |U| = a, |V| = b
    table = [[0] * (vmax + 1) for _ in range(umax + 1)]
    table[0][0] = 1
    for g in S.indices():
        gu, gv = g, g * order
        old = [row[:] for row in table]
        for a in range(umax + 1):
            for b in range(vmax + 1):
                if a and old[a - 1][b]:
                    table[a][b] |= tr.translate(old[a - 1][b], gu)
                if b and old[a][b - 1]:
                    table[a][b] |= tr.translate(old[a][b - 1], gv)
        if any(table[u][total - u] & 1 for u in inner):
            return True
    return False


def check_structure_conjecture(S: GSequence, ell: int) -> str:
    """Which disjunct holds: ``"i"``, ``"ii"``, ``"both"`` or ``"neither"``.

    (i) a zero-sum subsequence of length n; (ii) a zero-sum subsequence of
    length 2n containing a zero-sum subsequence with length in
    ``[2n-1-D+ell, n-1]``.
    """
    d = pgroup_data(S.group)
    n, D = d.n, d.D
    if D > 2 * n - 1:
        raise PreconditionViolation(f"D={D} exceeds 2n-1")
    if not 1 <= ell <= D + 1 - n:
        raise PreconditionViolation(f"ell={ell} outside [1, {D + 1 - n}]")
    if S.length < D + n - 2 + ell:
        raise PreconditionViolation(f"length {S.length} below {D + n - 2 + ell}")
    first = has_zero_sum_with_length_in(S, LengthSet.singleton(n))
    second = has_nested_zero_sum(S, 2 * n, range(2 * n - 1 - D + ell, n))
    if first and second:
        return "both"
    return "i" if first else ("ii" if second else "neither")


# -- fuzzing -------------------------------------------------------------------------


@dataclass(frozen=True)
class Option:
    """One admissible parameter choice with its length window."""

    params: tuple[tuple[str, int], ...]
    lo: int
    hi: int

    def as_dict(self) -> dict:
        return dict(self.params)


@dataclass(frozen=True)
class Identity:
    id: str
    description: str
    options: Callable[[PData], list[Option]]
    evaluate: Callable[[GSequence, dict, PData, ZeroSumProfile | None], tuple[bool, object]]
    premise: str | None = None  # None, "n_free" (N_n = 0) or "zero_sum"
    proposal: str = "uniform"
    needs_profile: bool = True
    outcome: Callable[[object], str] | None = None  # optional tally label per checked input


def _opt(lo: int, hi: int, **params) -> list[Option]:
    if lo < 0 or lo > hi:
        return []
    return [Option(tuple(sorted(params.items())), lo, hi)]


def _opts_master(d: PData) -> list[Option]:
    out = []
    for gamma in range(4):
        for beta in range(4):
            for k in range(2, 5):
                out += _opt(d.D + d.n - 1 - gamma, k * d.n - 1 - gamma - beta, gamma=gamma, beta=beta, k=k)
    return out


def _eval_master(J, prm, d, prof):
    r = check_master_congruence(J, prm["gamma"], prm["beta"], prm["k"], prof)
    return r == 0, r


def _opts_variant(variant: str):
    def opts(d: PData) -> list[Option]:
        n, D = d.n, d.D
        out = []
        if variant == "three":
            for g in range(4):
                out += _opt(D + n - 1 - g, 3 * n - 1 - g, gamma=g)
        elif variant == "three-shifted":
            for g in range(4):
                for b in range(1, 4):
                    out += _opt(D + n - 1 - g, 3 * n - 1 - g - b, gamma=g, beta=b)
        elif variant == "four":
            out += _opt(D + n - 1, 4 * n - 1)
        else:
            for b in range(1, 4):
                out += _opt(D + n - 1, 4 * n - 1 - b, beta=b)
        return out

    return opts


def _eval_variant(variant: str):
    def ev(J, prm, d, prof):
        r = check_alternating_sum(J, variant, prm.get("gamma", 0), prm.get("beta", 0), prof)
        return r == 0, r

    return ev


def _opts_n_free(d: PData) -> list[Option]:
    return _opt(d.D + d.n - 1, 3 * d.n - 1)


def _eval_n_free(J, prm, d, prof):
    res = check_egz_implication(J, prof)
    return egz_implication_holds(res, d.p), list(res)


def _opts_lifted(d: PData) -> list[Option]:
    out = []
    for g in range(d.n):
        if d.n + 1 + g <= d.D <= 2 * d.n:
            out += _opt(d.D + 2 * d.n - 1 - g, 4 * d.n - 1 - g, gamma=g)
    return out


def _eval_lifted(X, prm, d, prof):
    r = check_lifted_congruence(X, prm["gamma"], prof)
    return r == 0, r


def _opts_small_d(d: PData) -> list[Option]:
    out = []
    for pk in prime_powers_up_to(d.p, d.n):
        if d.n + 1 <= d.D <= d.n + pk:
            out += _opt(d.D + 2 * d.n - 1 - pk, 3 * d.n - 1, pk=pk)
    return out


def _eval_small_d(X, prm, d, prof):
    r = check_small_davenport(X, prm["pk"], prof)
    return r == 0, r


def _opts_abc(d: PData) -> list[Option]:
    out = []
    for a in range(1, min(d.n, 2 * d.n + 1 - d.D) + 1):
        out += _opt(d.D + 2 * d.n - a - 1, 4 * d.n - a - 1, alpha=a)
    return out


def _eval_abc(J, prm, d, prof):
    lhs, rhs = check_abc_symmetry(J, prm["alpha"], prof)
    return lhs == rhs, [lhs, rhs]


def _opts_dubiner(d: PData) -> list[Option]:
    return _opt(3 * d.n, 3 * d.n) if d.D <= 2 * d.n else []


def _eval_dubiner(J, prm, d, prof):
    ok = check_dubiner(J)
    return ok, ok


def _opts_nested(d: PData) -> list[Option]:
    out = []
    if d.D <= 2 * d.n - 1:
        for ell in range(1, d.D + 2 - d.n):
            lo = d.D + d.n - 2 + ell
            out += _opt(lo, lo + d.n - 1, ell=ell)
    return out


def _eval_nested(S, prm, d, prof):
    outcome = check_structure_conjecture(S, prm["ell"])
    return outcome != "neither", outcome


IDENTITIES: dict[str, Identity] = {
    "master": Identity("master", "alternating binomial-weighted sum of N_{jn-i-beta}", _opts_master, _eval_master),
    "three-block": Identity("three-block", "1 - sum C N_{n-i} + sum C N_{2n-i}", _opts_variant("three"), _eval_variant("three")),
    "three-block-shifted": Identity("three-block-shifted", "sum C N_{n-i-beta} - sum C N_{2n-i-beta}", _opts_variant("three-shifted"), _eval_variant("three-shifted")),
    "four-block": Identity("four-block", "1 - N_n + N_2n - N_3n", _opts_variant("four"), _eval_variant("four")),
    "four-block-shifted": Identity("four-block-shifted", "N_{n-beta} - N_{2n-beta} + N_{3n-beta}", _opts_variant("four-shifted"), _eval_variant("four-shifted")),
    "n-free-2n": Identity("n-free-2n", "N_n = 0 mod p implies N_2n = -1 mod p", _opts_n_free, _eval_n_free, outcome=lambda r: "antecedent" if r[0] == 0 else "vacuous"),
    "lifted": Identity("lifted", "3 - 2 sum C N_{n-i} + sum C N_{2n-i}", _opts_lifted, _eval_lifted),
    "small-davenport": Identity("small-davenport", "2 - 2 N_{n-pk} + N_{2n-pk} given N_n = 0", _opts_small_d, _eval_small_d, premise="n_free", proposal="n_free"),
    "abc-symmetry": Identity("abc-symmetry", "N_{n-alpha} = N_{3n-alpha} given N_n = 0", _opts_abc, _eval_abc, premise="n_free", proposal="n_free"),
    "dubiner": Identity("dubiner", "zero-sum of length 3n has a zero-sum n-subsequence", _opts_dubiner, _eval_dubiner, premise="zero_sum", needs_profile=False),
    "nested-zero-sum": Identity("nested-zero-sum", "length-n zero-sum or nested 2n zero-sum", _opts_nested, _eval_nested, proposal="mixed", needs_profile=False, outcome=str),
}

SCALAR_IDENTITIES = ("lucas", "binomial-residue", "baker-schmidt")


def identity_ids() -> list[str]:
    return list(IDENTITIES) + list(SCALAR_IDENTITIES)


def _clip_n_free(opts: list[Option], G: FiniteAbelianGroup) -> list[Option]:
    """Drop lengths >= an upper bound for s(G): no sequence that long is free of length-n zero-sums."""
    from .bounds import bound_report

    upper = bound_report(as_pgroup(G)).summaries["s"].upper
    if upper is None:
        return opts
    return [Option(o.params, o.lo, min(o.hi, upper - 1)) for o in opts if o.lo <= upper - 1]


def admissible_options(identity: str, G: FiniteAbelianGroup, fixed: dict | None = None) -> list[Option]:
    try:
        d = pgroup_data(G)
    except NotAPGroup as exc:
        raise InadmissibleGroup(str(exc)) from exc
    opts = IDENTITIES[identity].options(d)
    if IDENTITIES[identity].premise == "n_free":
        opts = _clip_n_free(opts, G)
    if fixed:
        opts = [o for o in opts if all(o.as_dict().get(k) == v for k, v in fixed.items())]
    if not opts:
        raise InadmissibleGroup(f"{identity} has no admissible window on {G.canonical()}")
    return opts


def sample_bounded(G: FiniteAbelianGroup, length: int, cap: int, rng: np.random.Generator) -> GSequence:
    """Random sequence with every multiplicity at most ``cap``.

    A random support of size m is drawn, each support element gets ``cap``
    copies, and ``length`` items are drawn without replacement from that pool.
    """
    cap = max(cap, 1)
    m_lo = max(1, -(-length // cap))
    if m_lo > G.order:
        return GSequence.from_indices(G, rng.integers(0, G.order, size=length).tolist())
    m = int(rng.integers(m_lo, min(G.order, max(length, 1)) + 1))
    support = rng.choice(G.order, size=m, replace=False)
    pool = np.repeat(support, cap)
    return GSequence.from_indices(G, rng.choice(pool, size=length, replace=False).tolist())


def grow_n_free(G: FiniteAbelianGroup, length: int, n: int, rng: np.random.Generator, repeat: float = 0.0) -> GSequence | None:
    """Random sequence built one element at a time, never creating a zero-sum of length n.

    Each step picks, with probability ``repeat``, an element already used
    (when one is still allowed) and otherwise a uniform allowed element.
    Returns None if no element is allowed before ``length`` is reached.
    Long n-free sequences have few distinct elements, so a high ``repeat``
    reaches them far more often than plain uniform growth.
    """
    kernel = LengthKernel(translator_for(G.factors or (1,)), LengthSet.singleton(n))
    full = kernel.tr.full
    state = neg = kernel.initial()
    word: list[int] = []
    used: list[int] = []
    for _ in range(length):
        cand = full & ~kernel.dead_mask(neg)
        if not cand:
            return None
        again = [g for g in used if (cand >> g) & 1]
        if again and rng.random() < repeat:
            g = again[int(rng.integers(len(again)))]
        else:
            options = [i for i in range(G.order) if (cand >> i) & 1]
            g = options[int(rng.integers(len(options)))]
            if g not in used:
                used.append(g)
        state, neg = kernel.extend_pair(state, neg, g)
        word.append(g)
    return GSequence.from_indices(G, word)


def _propose(G: FiniteAbelianGroup, length: int, kind: str, d: PData, rng: np.random.Generator) -> GSequence | None:
    """Draw a candidate input.

    ``uniform``: i.i.d. uniform elements.  ``mixed``: uniform or bounded
    multiplicity (at most n-1 copies) with equal odds.  ``n_free``: 60% of the
    draws come from :func:`grow_n_free` with a repeat bias drawn from
    [0.5, 0.95], 20% bounded multiplicity, 20% uniform.
    """
    u = rng.random()
    if kind == "n_free":
        if u < 0.6:
            return grow_n_free(G, length, d.n, rng, float(rng.uniform(0.5, 0.95)))
        if u < 0.8:
            return sample_bounded(G, length, d.n - 1, rng)
    elif kind == "mixed" and u < 0.5:
        return sample_bounded(G, length, d.n - 1, rng)
    return GSequence.from_indices(G, rng.integers(0, G.order, size=length).tolist())


def _propose_zero_sum(G: FiniteAbelianGroup, length: int, rng: np.random.Generator) -> GSequence:
    """Uniform over length-tuples with sum 0: last entry is minus the sum of the rest."""
    head = rng.integers(0, G.order, size=length - 1).tolist()
    s = 0
    for g in head:
        s = int(G.add_table[s, g])
    return GSequence.from_indices(G, head + [int(G.neg_table[s])])


@dataclass
class Violation:
    trial: int
    params: dict
    sequence: str
    lhs: object
    kind: str = "identity"

    def to_dict(self) -> dict:
        return {"trial": self.trial, "params": self.params, "sequence": self.sequence, "lhs": self.lhs, "kind": self.kind}


@dataclass
class CongruenceReport:
    identity: str
    group: str
    trials: int
    seed: int | None
    checked: int = 0
    skipped: int = 0
    attempts: int = 0
    exact_rechecks: int = 0
    violations: list[Violation] = field(default_factory=list)
    status: str = "ok"
    outcomes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def skip_rate(self) -> float:
        return self.skipped / self.trials if self.trials else 0.0

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "identity": self.identity,
            "group": self.group,
            "trials": self.trials,
            "seed": self.seed,
            "checked": self.checked,
            "skipped": self.skipped,
            "skip_rate": round(self.skip_rate, 6),
            "attempts": self.attempts,
            "exact_rechecks": self.exact_rechecks,
            "outcomes": dict(sorted(self.outcomes.items())),
            "violations": [v.to_dict() for v in self.violations],
            "status": self.status,
            "pass": self.passed,
        }


@dataclass
class _TrialResult:
    trial: int
    checked: bool
    attempts: int
    exact: bool = False
    violation: Violation | None = None
    outcome: str | None = None


def _run_trial(identity: Identity, G: FiniteAbelianGroup, d: PData, opts: list[Option], seed: int, t: int, max_attempts: int, exact_fraction: float) -> _TrialResult:
    rng = np.random.default_rng([seed, t])
    for attempt in range(1, max_attempts + 1):
        opt = opts[int(rng.integers(len(opts)))]
        length = int(rng.integers(opt.lo, opt.hi + 1))
        if identity.premise == "zero_sum":
            X = _propose_zero_sum(G, length, rng)
        else:
            X = _propose(G, length, identity.proposal, d, rng)
            if X is None:
                continue
        if identity.premise == "n_free" and has_zero_sum_with_length_in(X, LengthSet.singleton(d.n)):
            continue
        prm = opt.as_dict()
        prof = profile(X, "mod", d.p) if identity.needs_profile else None
        ok, lhs = identity.evaluate(X, prm, d, prof)
        res = _TrialResult(t, True, attempt, outcome=identity.outcome(lhs) if identity.outcome else None)
        if not ok:
            res.violation = Violation(t, prm, format_sequence(X), lhs)
        if identity.needs_profile and rng.random() < exact_fraction:
            res.exact = True
            ok2, lhs2 = identity.evaluate(X, prm, d, profile(X, "exact"))
            if (ok2, lhs2) != (ok, lhs) and res.violation is None:
                res.violation = Violation(t, prm, format_sequence(X), [lhs, lhs2], kind="exact_mismatch")
        return res
    return _TrialResult(t, False, max_attempts)


def _run_chunk(args) -> list[_TrialResult]:
    identity_id, factors, fixed, seed, ts, max_attempts, exact_fraction = args
    G = FiniteAbelianGroup(factors)
    identity = IDENTITIES[identity_id]
    d = pgroup_data(G)
    opts = admissible_options(identity_id, G, fixed)
    return [_run_trial(identity, G, d, opts, seed, t, max_attempts, exact_fraction) for t in ts]


def fuzz(
    identity: str,
    G: FiniteAbelianGroup,
    trials: int,
    seed: int,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    exact_fraction: float = 0.01,
    fixed: dict | None = None,
    threads: int = 1,
) -> CongruenceReport:
    """Run one identity on ``trials`` random admissible inputs.

    Trial t uses its own generator seeded by ``(seed, t)``, so the report does
    not depend on ``threads``.  Premise-conditioned identities resample up to
    ``max_attempts`` times per trial; a trial that never meets its premise is
    counted as skipped.  If the very first trial is skipped the run stops with
    status ``rejection_budget_exhausted``.
    """
    if identity in SCALAR_IDENTITIES:
        return _fuzz_scalar(identity, G, trials, seed)
    if identity not in IDENTITIES:
        raise KeyError(f"unknown identity {identity!r}")
    admissible_options(identity, G, fixed)
    report = CongruenceReport(identity, G.canonical(), trials, seed)
    if trials <= 0:
        return report
    results = _run_chunk((identity, G.factors, fixed, seed, [0], max_attempts, exact_fraction))
    if results[0].checked or trials == 1:
        rest = list(range(1, trials))
        if threads <= 1 or len(rest) < 2:
            results += _run_chunk((identity, G.factors, fixed, seed, rest, max_attempts, exact_fraction))
        else:
            chunks = [rest[i::threads] for i in range(threads)]
            with ProcessPoolExecutor(max_workers=threads) as pool:
                for part in pool.map(_run_chunk, [(identity, G.factors, fixed, seed, c, max_attempts, exact_fraction) for c in chunks]):
                    results += part
            results.sort(key=lambda r: r.trial)
    for r in results:
        report.attempts += r.attempts
        if r.checked:
            report.checked += 1
        if r.exact:
            report.exact_rechecks += 1
        if r.violation is not None:
            report.violations.append(r.violation)
        if r.outcome is not None:
            report.outcomes[r.outcome] = report.outcomes.get(r.outcome, 0) + 1
    report.skipped = trials - report.checked
    if not results[0].checked:
        report.status = "rejection_budget_exhausted"
    return report


def _fuzz_scalar(identity: str, G: FiniteAbelianGroup, trials: int, seed: int) -> CongruenceReport:
    try:
        p = as_pgroup(G).p
    except NotAPGroup as exc:
        raise InadmissibleGroup(str(exc)) from exc
    report = CongruenceReport(identity, G.canonical(), trials, seed)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        if identity == "lucas":
            m, k = (int(x) for x in rng.integers(0, p**6, size=2))
            got, want = lucas_binom(m, k, p), math.comb(m, k) % p
            prm, ok, lhs = {"m": m, "k": k, "p": p}, got == want, [got, want]
        elif identity == "binomial-residue":
            n = p ** int(rng.integers(1, 4))
            h = int(rng.integers(1, 7))
            a = int(rng.integers(0, n))
            r = check_binomial_residue(h, n, a, p)
            prm, ok, lhs = {"h": h, "n": n, "a": a}, r == h % p, r
        else:
            system = random_linear_system(p, rng)
            A, B, applies = check_baker_schmidt(system)
            prm, ok, lhs = {"s": system.num_vars, "threshold": system.threshold()}, (A - B) % p == 0, [A, B]
        report.checked += 1
        report.attempts += 1
        if not ok:
            report.violations.append(Violation(t, prm, "", lhs))
    return report


def exhaustive(identity: str, G: FiniteAbelianGroup, length: int, params: dict | None = None, cap: int = 10**7) -> CongruenceReport:
    """Run a checker on every multiset of the given length (premise failures are skipped)."""
    ident = IDENTITIES[identity]
    d = pgroup_data(G)
    prm = dict(params or {})
    report = CongruenceReport(identity, G.canonical(), 0, None)
    for X in enumerate_multisets(G, length, cap=cap):
        report.trials += 1
        if ident.premise == "zero_sum" and any(X.sum().coords):
            continue
        if ident.premise == "n_free" and has_zero_sum_with_length_in(X, LengthSet.singleton(d.n)):
            continue
        prof = profile(X, "mod", d.p) if ident.needs_profile else None
        ok, lhs = ident.evaluate(X, prm, d, prof)
        report.checked += 1
        if ident.outcome is not None:
            label = ident.outcome(lhs)
            report.outcomes[label] = report.outcomes.get(label, 0) + 1
        if not ok:
            report.violations.append(Violation(report.trials - 1, prm, format_sequence(X), lhs))
    report.attempts = report.trials
    report.skipped = report.trials - report.checked
    return report
