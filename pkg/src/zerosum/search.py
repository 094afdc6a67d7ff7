"""Exhaustive computation of ``s_L(G)`` with witness certificates.

The avoiding property (no zero-sum subsequence with length in L) is inherited
by sub-multisets, so the avoiding multisets form a tree under extension of
nondecreasing index words.  A depth-first walk of that tree finds the largest
avoiding multiset M, and then ``s_L(G) = |M| + 1``: M is the lower-bound
witness and the exhausted tree is the proof that every multiset of size
``|M| + 1`` has a zero-sum with length in L.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._kernel import LengthKernel
from .errors import BadJ, CapExceeded
from .groups import FiniteAbelianGroup, parse_group
from .lengths import LengthSet, as_length_set, parse_length_set
from .sequences import GSequence, parse_sequence, format_sequence
from .zscount import profile, translator_for, has_zero_sum_with_length_in

DEFAULT_NODE_BUDGET = 10**8


def default_cap(G: FiniteAbelianGroup) -> int:
    return 4 * G.exponent + 2 * G.order


def invariant_name(G: FiniteAbelianGroup, L: LengthSet) -> str:
    n = G.exponent
    if L.kind == "all":
        return "D"
    if L.kind == "interval" and L.n == n:
        return "eta" if L.j == 1 else ("s" if L.j == n else f"s{L.descriptor()}")
    if L.kind == "singleton" and L.values == (n,):
        return "s"
    return f"s{L.descriptor()}"


@dataclass
class InvariantResult:
    invariant: str
    group: FiniteAbelianGroup
    lengths: LengthSet
    value: int | None
    cap: int
    witness: GSequence | None
    nodes: int = 0
    wall_time: float = 0.0
    exhaustive: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.value is not None

    @property
    def status(self) -> str:
        return "exact" if self.found else "not_found_within_cap"

    def key(self) -> str:
        return f"{self.group.canonical()}|{self.lengths.descriptor()}"

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "invariant": self.invariant,
            "group": self.group.canonical(),
            "lengths": self.lengths.descriptor(),
            "status": self.status,
            "value": self.value,
            "cap": self.cap,
            "witness": format_sequence(self.witness) if self.witness is not None else None,
            "witness_length": self.witness.length if self.witness is not None else None,
            "exhaustive": self.exhaustive,
            "nodes": self.nodes,
        }
        if timing:
            d["wall_time"] = round(self.wall_time, 6)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> InvariantResult:
        G = parse_group(d["group"])
        w = d.get("witness")
        return cls(
            invariant=d["invariant"],
            group=G,
            lengths=parse_length_set(d["lengths"]),
            value=d["value"],
            cap=d["cap"],
            witness=parse_sequence(G, w) if w is not None else None,
            nodes=d.get("nodes", 0),
            wall_time=d.get("wall_time", 0.0),
            exhaustive=d.get("exhaustive", True),
        )


class _CapHit(Exception):
    pass


@dataclass
class _Outcome:
    best: int
    word: list[int]
    nodes: int
    capped: bool


def _walk(
    kernel: LengthKernel,
    cap: int,
    budget: int,
    state,
    neg,
    word: list[int],
    progress: Callable[[int], None] | None = None,
) -> _Outcome:
    """DFS over avoiding nondecreasing words extending ``word``."""
    tr = kernel.tr
    ge = tr.ge
    dead_mask = kernel.dead_mask
    extend_pair = kernel.extend_pair
    best = [len(word), list(word)]
    nodes = 0

    def rec(state, neg, last, depth):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise CapExceeded(f"node budget {budget} exhausted", required=None)
        if progress is not None and not nodes & 0xFFFFF:
            progress(nodes)
        if depth > best[0]:
            best[0] = depth
            best[1] = list(word)
        if depth >= cap:
            raise _CapHit
        cand = ge[last] & ~dead_mask(neg)
        while cand:
            low = cand & -cand
            g = low.bit_length() - 1
            cand ^= low
            ns, nn = extend_pair(state, neg, g)
            word.append(g)
            rec(ns, nn, g, depth + 1)
            word.pop()

    last = word[-1] if word else 0
    try:
        rec(state, neg, last, len(word))
    except _CapHit:
        return _Outcome(best[0], best[1], nodes, True)
    return _Outcome(best[0], best[1], nodes, False)


def _walk_fast_all(kernel: LengthKernel, cap: int, budget: int, state, neg, word, progress=None) -> _Outcome:
    """Specialization of :func:`_walk` for L = N (one length class).

    Branch and bound: appending g to a zero-sum-free S adds at least one new
    subset sum (otherwise the sums would be closed under +g and contain 0),
    so at most ``|G| - 1 - |sums(S)|`` more elements fit.  Subtrees that
    cannot beat the deepest word found so far are skipped.
    """
    tr = kernel.tr
    ge = tr.ge
    ops = tr.ops
    negidx = tr.neg
    room = tr.order - 1
    best = [len(word), list(word)]
    nodes = 0

    def rec(s, ns, last, depth):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise CapExceeded(f"node budget {budget} exhausted", required=None)
        if progress is not None and not nodes & 0xFFFFF:
            progress(nodes)
        if depth > best[0]:
            best[0] = depth
            best[1] = list(word)
        if depth >= cap:
            raise _CapHit
        if depth + room - s.bit_count() <= best[0]:
            return
        cand = ge[last] & ~(ns | 1)
        while cand:
            low = cand & -cand
            g = low.bit_length() - 1
            cand ^= low
            t = s
            for lo, up, hi, down in ops[g]:
                t = ((t & lo) << up) | ((t & hi) >> down)
            ng = negidx[g]
            u = ns
            for lo, up, hi, down in ops[ng]:
                u = ((u & lo) << up) | ((u & hi) >> down)
            word.append(g)
            rec(s | t | low, ns | u | (1 << ng), g, depth + 1)
            word.pop()

    last = word[-1] if word else 0
    try:
        rec(state[0], neg[0], last, len(word))
    except _CapHit:
        return _Outcome(best[0], best[1], nodes, True)
    return _Outcome(best[0], best[1], nodes, False)


def _subtree(args) -> _Outcome:
    radices, desc, cap, budget, first = args
    kernel = LengthKernel(translator_for(radices), parse_length_set(desc))
    state, neg = kernel.extend_pair(kernel.initial(), kernel.initial(), first)
    walker = _walk_fast_all if kernel.classes == 1 and kernel.mode == "mod" else _walk
    return walker(kernel, cap, budget, state, neg, [first])


def compute_s_L(
    G: FiniteAbelianGroup,
    L,
    cap: int | None = None,
    budget: int = DEFAULT_NODE_BUDGET,
    threads: int = 1,
    progress: Callable[[int], None] | None = None,
    invariant: str | None = None,
) -> InvariantResult:
    """Smallest l <= cap such that every multiset of size l has a zero-sum with length in L.

    Returns ``value=None`` (not found within cap) when an avoiding multiset of
    size ``cap`` exists; that multiset is then the witness.  Raises
    CapExceeded once more than ``budget`` tree nodes are visited.
    """
    L = as_length_set(L)
    if cap is None:
        cap = default_cap(G)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    t0 = time.perf_counter()
    kernel = LengthKernel(translator_for(G.factors or (1,)), L)
    walker = _walk_fast_all if kernel.classes == 1 and kernel.mode == "mod" else _walk
    empty = kernel.initial()

    if threads <= 1:
        out = walker(kernel, cap, budget, empty, empty, [], progress)
    else:
        roots = [g for g in range(G.order) if not (kernel.dead_mask(empty) >> g) & 1]
        jobs = [(G.factors or (1,), L.descriptor(), cap, budget, g) for g in roots]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_subtree, jobs))
        nodes = 1 + sum(p.nodes for p in parts)
        if nodes > budget:
            raise CapExceeded(f"node budget {budget} exhausted", required=None)
        capped = [p for p in parts if p.capped]
        pool_parts = capped or parts
        # earliest subtree wins ties, matching the serial DFS order
        top = max(p.best for p in pool_parts) if pool_parts else 0
        chosen = next((p for p in pool_parts if p.best == top), None)
        out = _Outcome(top, chosen.word if chosen else [], nodes, bool(capped))

    witness = GSequence.from_indices(G, out.word)
    value = None if out.capped else out.best + 1
    return InvariantResult(
        invariant=invariant or invariant_name(G, L),
        group=G,
        lengths=L,
        value=value,
        cap=cap,
        witness=witness,
        nodes=out.nodes,
        wall_time=time.perf_counter() - t0,
    )


def compute_davenport(G: FiniteAbelianGroup, cap: int | None = None, **kw) -> InvariantResult:
    return compute_s_L(G, LengthSet.all(), cap, **kw)


def compute_eta(G: FiniteAbelianGroup, cap: int | None = None, **kw) -> InvariantResult:
    return compute_s_L(G, LengthSet.interval(1, G.exponent), cap, **kw)


def compute_egz(G: FiniteAbelianGroup, cap: int | None = None, **kw) -> InvariantResult:
    return compute_s_L(G, LengthSet.singleton(G.exponent), cap, **kw)


def _check_j(G: FiniteAbelianGroup, j: int) -> None:
    if not 1 <= j <= G.exponent:
        raise BadJ(f"j={j} outside [1, {G.exponent}]")


def compute_s_interval(G: FiniteAbelianGroup, j: int, cap: int | None = None, **kw) -> InvariantResult:
    _check_j(G, j)
    return compute_s_L(G, LengthSet.interval(j, G.exponent), cap, **kw)


def compute_s_interval_plus_N(G: FiniteAbelianGroup, j: int, cap: int | None = None, **kw) -> InvariantResult:
    _check_j(G, j)
    return compute_s_L(G, LengthSet.interval_plus_N(j, G.exponent), cap, **kw)


def verify_witness(result: InvariantResult) -> bool:
    """Re-check the certificate with the counting DP.

    The witness must have length ``value - 1`` (or ``cap`` when nothing was
    found) and no zero-sum subsequence with length in L.
    """
    W = result.witness
    if W is None or W.group != result.group:
        return False
    expected = result.cap if result.value is None else result.value - 1
    if W.length != expected:
        return False
    counts = profile(W).counts
    return not any(counts[k] for k in range(1, W.length + 1) if k in result.lengths)


@dataclass
class SampleResult:
    group: FiniteAbelianGroup
    lengths: LengthSet
    length: int
    samples: int
    seed: int
    counterexample: GSequence | None

    def to_dict(self) -> dict:
        return {
            "group": self.group.canonical(),
            "lengths": self.lengths.descriptor(),
            "length": self.length,
            "samples": self.samples,
            "seed": self.seed,
            "status": "counterexample_found" if self.counterexample is not None else "no_counterexample_in_samples",
            "counterexample": format_sequence(self.counterexample) if self.counterexample is not None else None,
        }


def sample_probe(G: FiniteAbelianGroup, L, length: int, samples: int, seed: int) -> SampleResult:
    """Low-confidence check at one length: look for an avoiding sequence by sampling.

    Never certifies a value; finding nothing only means none of the sampled
    sequences avoid L.
    """
    L = as_length_set(L)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        X = GSequence.from_indices(G, rng.integers(0, G.order, size=length).tolist())
        if not has_zero_sum_with_length_in(X, L):
            return SampleResult(G, L, length, samples, seed, X)
    return SampleResult(G, L, length, samples, seed, None)
