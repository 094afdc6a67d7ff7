from __future__ import annotations

import pytest
from oracles import avoids, naive_s_L, pgroups_up_to

from zerosum.errors import BadJ, CapExceeded
from zerosum.groups import davenport_formula, make_group
from zerosum.lengths import LengthSet
from zerosum.search import (
    InvariantResult,
    compute_davenport,
    compute_egz,
    compute_eta,
    compute_s_interval,
    compute_s_interval_plus_N,
    compute_s_L,
    sample_probe,
    verify_witness,
)
from zerosum.sequences import GSequence

C3 = make_group([3])
C33 = make_group([3, 3])
C22 = make_group([2, 2])

# budget for the Davenport-vs-formula sweep; groups that need more are skipped
SWEEP_BUDGET = 2 * 10**6


def test_compute_s_L_examples():
    assert compute_s_L(C33, LengthSet.singleton(3)).value == 9
    assert compute_s_L(C33, LengthSet.interval(1, 3)).value == 7
    assert compute_s_L(C33, LengthSet.all()).value == 5
    assert compute_s_L(C22, LengthSet.singleton(2)).value == 5
    r = compute_s_L(C3, LengthSet.singleton(1), cap=10)
    assert r.value is None and r.status == "not_found_within_cap"
    assert r.witness.length == 10 and verify_witness(r)


def test_davenport_examples():
    r = compute_davenport(C33)
    assert r.value == 5 and r.witness.length == 4 and verify_witness(r)
    r = compute_davenport(make_group([5]))
    assert r.value == 5 and r.witness.indices() == [1, 1, 1, 1]
    assert compute_davenport(make_group([3, 9])).value == 11


def test_interval_examples():
    assert [compute_s_interval(C33, j).value for j in (1, 2, 3)] == [7, 8, 9]
    assert [compute_s_interval_plus_N(C33, j).value for j in (1, 2, 3)] == [5, 6, 7]
    with pytest.raises(BadJ):
        compute_s_interval(C33, 0)
    with pytest.raises(BadJ):
        compute_s_interval_plus_N(C33, 4)


def test_verify_witness_tampering():
    r = compute_davenport(C33)
    assert verify_witness(r)
    g = r.witness.indices()[0]
    inverse = C33.index_of(C33.neg(C33.element_at(g)))
    tampered = InvariantResult(r.invariant, C33, r.lengths, r.value + 2, r.cap, r.witness * GSequence.from_indices(C33, [g, inverse]))
    assert not verify_witness(tampered)
    eta = compute_eta(C33)
    with_zero = GSequence.from_indices(C33, [0] + eta.witness.indices()[1:])
    assert not verify_witness(InvariantResult(eta.invariant, C33, eta.lengths, eta.value, eta.cap, with_zero))
    short = GSequence.from_indices(C33, eta.witness.indices()[1:])
    assert not verify_witness(InvariantResult(eta.invariant, C33, eta.lengths, eta.value, eta.cap, short))
    assert not verify_witness(InvariantResult(eta.invariant, C33, eta.lengths, eta.value, eta.cap, None))


ORACLE_CASES = [
    ("C2", "N"), ("C3", "N"), ("C4", "N"), ("C2*C2", "N"), ("C5", "N"), ("C6", "N"), ("C3*C3", "N"),
    ("C3", "{3}"), ("C4", "{4}"), ("C2*C2", "{2}"), ("C5", "{5}"), ("C4", "{2,4}"), ("C6", "{3,6}"),
    ("C3", "[1,3]"), ("C4", "[2,4]"), ("C2*C2", "[1,2]"), ("C2*C4", "[1,4]"), ("C3*C3", "[1,3]"),
    ("C4", "[2,4]+N"), ("C3", "[2,3]+N"), ("C2*C2", "[2,2]+N"), ("C5", "{2,3}"),
]


@pytest.mark.parametrize("spec,desc", ORACLE_CASES)
def test_search_matches_naive_enumeration(spec, desc):
    from zerosum.groups import parse_group
    from zerosum.lengths import parse_length_set

    G = parse_group(spec)
    L = parse_length_set(desc)
    r = compute_s_L(G, L, cap=12)
    assert r.value == naive_s_L(G, L, 12)
    assert verify_witness(r)
    assert avoids(G, r.witness.indices(), L)


def test_monotone_in_length_set():
    G = make_group([2, 4])
    n = G.exponent
    sets = [
        LengthSet.singleton(n),
        LengthSet.explicit([2, 4]),
        LengthSet.interval(2, n),
        LengthSet.interval(1, n),
        LengthSet.interval_plus_N(2, n),
        LengthSet.all(),
    ]
    values = {L.descriptor(): compute_s_L(G, L).value for L in sets}
    for A in sets:
        for B in sets:
            if all(k in B for k in range(1, 40) if k in A):
                assert values[B.descriptor()] <= values[A.descriptor()]


@pytest.mark.parametrize("G", [C33, C22], ids=lambda G: G.canonical())
def test_interval_chain_strictly_increasing(G):
    vals = [compute_s_interval(G, j).value for j in range(1, G.exponent + 1)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[0] == compute_eta(G).value and vals[-1] == compute_egz(G).value


@pytest.mark.parametrize("spec", ["C2", "C3", "C4", "C5", "C2*C2", "C2*C4", "C3*C3", "C2*C2*C2", "C6", "C7"])
def test_chain_and_gao(spec):
    from zerosum.groups import parse_group

    G = parse_group(spec)
    n = G.exponent
    D, eta, s = compute_davenport(G).value, compute_eta(G).value, compute_egz(G).value
    assert 2 * n - 1 <= D + n - 1 <= eta + n - 1 <= s
    assert s == eta + n - 1


def test_determinism_and_threads():
    a = compute_eta(make_group([2, 4]))
    b = compute_eta(make_group([2, 4]))
    c = compute_eta(make_group([2, 4]), threads=2)
    assert a.value == b.value == c.value
    assert a.witness == b.witness == c.witness
    d1 = compute_davenport(make_group([3, 9]))
    d2 = compute_davenport(make_group([3, 9]), threads=2)
    assert (d1.value, d1.witness) == (d2.value, d2.witness)


def test_budget_exhaustion():
    with pytest.raises(CapExceeded):
        compute_egz(C33, budget=50)
    with pytest.raises(CapExceeded):
        compute_egz(C33, budget=50, threads=2)


def test_result_round_trip():
    r = compute_egz(C33)
    back = InvariantResult.from_dict(r.to_dict())
    assert back.to_dict() == r.to_dict()
    assert back.key() == "C3*C3|{3}"


def test_sample_probe():
    none = sample_probe(C33, LengthSet.singleton(3), 9, 200, 1)
    assert none.counterexample is None
    some = sample_probe(C33, LengthSet.singleton(3), 4, 200, 1)
    assert some.counterexample is not None and avoids(C33, some.counterexample.indices(), {3})
    assert sample_probe(C33, LengthSet.singleton(3), 7, 50, 9).to_dict() == sample_probe(C33, LengthSet.singleton(3), 7, 50, 9).to_dict()


@pytest.mark.slow
def test_davenport_matches_formula_within_budget():
    """Every p-group of order <= 81; groups that exhaust the sweep budget are skipped."""
    checked, skipped = [], []
    for spec in pgroups_up_to(81):
        G = spec.to_group()
        try:
            r = compute_davenport(G, budget=SWEEP_BUDGET)
        except CapExceeded:
            skipped.append(G.canonical())
            continue
        assert r.value == davenport_formula(spec), G.canonical()
        assert verify_witness(r)
        checked.append(G.canonical())
    assert len(checked) >= 25
    for name in ("C64", "C81", "C49", "C32", "C2*C16", "C3*C9", "C3*C3*C3", "C5*C5"):
        assert name in checked
