"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the PASS/FAIL lines are
written straight to the terminal so they show up without ``-s``.
"""

from __future__ import annotations

import math
import os
import time

import numpy as np
import pytest
from oracles import pgroups_up_to

from zerosum.bounds import bound_report, interval_key
from zerosum.congruences import (
    IDENTITIES,
    Equation,
    LinearSystem,
    baker_schmidt_parity,
    check_binomial_residue,
    exhaustive,
    fuzz,
    lucas_binom,
    random_linear_system,
)
from zerosum.errors import InadmissibleGroup
from zerosum.groups import PGroupSpec, davenport_formula, make_group, parse_group
from zerosum.search import (
    compute_davenport,
    compute_egz,
    compute_eta,
    compute_s_interval,
    compute_s_interval_plus_N,
    verify_witness,
)

THREADS = os.cpu_count() or 1

FUZZ_GROUPS = ("C3*C3", "C3*C9", "C5*C5", "C3*C3*C3")
FUZZ_IDENTITIES = (
    "master",
    "three-block",
    "three-block-shifted",
    "four-block",
    "four-block-shifted",
    "n-free-2n",
    "lifted",
    "small-davenport",
    "abc-symmetry",
    "dubiner",
)


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str, started: float, budget_s: float) -> None:
        elapsed = time.perf_counter() - started
        in_time = elapsed <= budget_s
        status = "PASS" if ok and in_time else "FAIL"
        with capsys.disabled():
            print(f"\n{status} criterion {number}: {detail} [{elapsed:.1f}s of {budget_s:.0f}s]")
        assert ok, detail
        assert in_time, f"took {elapsed:.1f}s, budget {budget_s:.0f}s"

    return emit


def test_criterion_01_small_group_values(verdict):
    t0 = time.perf_counter()
    expected = {"C3": (5, 3, 3), "C5": (9, 5, 5), "C2*C2": (5, 4, 3), "C3*C3": (9, 7, 5)}
    got = {}
    ok = True
    for spec, want in expected.items():
        G = parse_group(spec)
        results = (compute_egz(G), compute_eta(G), compute_davenport(G))
        got[spec] = tuple(r.value for r in results)
        ok &= got[spec] == want and all(verify_witness(r) for r in results)
    verdict(1, ok, f"(s, eta, D) = {got}", t0, 120)


def test_criterion_02_davenport_vs_formula(verdict):
    t0 = time.perf_counter()
    groups = list(pgroups_up_to(27))
    bad = []
    for spec in groups:
        r = compute_davenport(spec.to_group())
        if r.value != davenport_formula(spec) or not verify_witness(r):
            bad.append(spec.to_group().canonical())
    names = ", ".join(s.to_group().canonical() for s in groups)
    verdict(2, not bad, f"{len(groups)} p-groups of order <= 27 exhaustive ({names}); mismatches: {bad}", t0, 1800)


def test_criterion_03_interval_plus_N(verdict):
    t0 = time.perf_counter()
    G = make_group([3, 3])
    vals = [compute_s_interval_plus_N(G, j).value for j in (1, 2, 3)]
    verdict(3, vals == [5, 6, 7], f"s_[j,3]+N(C3+C3) for j=1,2,3 = {vals}", t0, 60)


def test_criterion_04_interval_chain(verdict):
    t0 = time.perf_counter()
    G = make_group([3, 3])
    H = PGroupSpec(3, (1, 1))
    vals, brackets = [], []
    for j in (1, 2, 3):
        vals.append(compute_s_interval(G, j).value)
        summ = bound_report(H, j=j).summaries[interval_key(j, 3)]
        brackets.append((summ.lower, summ.upper))
    inside = all(lo <= v <= hi for v, (lo, hi) in zip(vals, brackets))
    strict = all(a < b for a, b in zip(vals, vals[1:]))
    verdict(4, vals == [7, 8, 9] and strict and inside, f"s_[j,3](C3+C3) = {vals}, brackets {brackets}", t0, 300)


def test_criterion_05_congruence_suite(verdict):
    t0 = time.perf_counter()
    trials = 10**4
    lines, violations, ran = [], 0, 0
    for spec in FUZZ_GROUPS:
        G = parse_group(spec)
        for ident in FUZZ_IDENTITIES:
            try:
                r = fuzz(ident, G, trials, seed=2024, threads=THREADS)
            except InadmissibleGroup:
                lines.append(f"{spec}/{ident}: inadmissible")
                continue
            ran += 1
            violations += len(r.violations)
            extra = f" skip={r.skip_rate:.4f} attempts/trial={r.attempts / trials:.1f}" if IDENTITIES[ident].premise else ""
            lines.append(f"{spec}/{ident}: {r.checked} checked, {len(r.violations)} violations{extra} ({r.status})")
    detail = f"{ran} identity/group runs x {trials} trials, {violations} violations\n    " + "\n    ".join(lines)
    verdict(5, violations == 0 and ran > 0, detail, t0, 1200)


def test_criterion_06_exhaustive_n_free_2n(verdict):
    t0 = time.perf_counter()
    G = make_group([3, 3])
    sizes = {}
    bad = 0
    antecedent = 0
    for length in (7, 8):
        r = exhaustive("n-free-2n", G, length)
        sizes[length] = r.checked
        bad += len(r.violations)
        antecedent += r.outcomes.get("antecedent", 0)
    ok = sizes == {7: math.comb(15, 7), 8: math.comb(16, 8)} and bad == 0
    verdict(6, ok, f"multisets checked {sizes}, N_3 = 0 mod 3 in {antecedent}, violations {bad}", t0, 300)


def test_criterion_07_lucas_and_binomial_residue(verdict):
    t0 = time.perf_counter()
    mismatches = 0
    for p in (2, 3, 5):
        size = p**6
        ks = np.arange(size, dtype=np.int64)
        row = np.zeros(size, dtype=np.int64)
        row[0] = 1
        for m in range(size):
            if m:
                # Pascal's rule, reduced mod p
                row[1:] = (row[1:] + row[:-1]) % p
            mismatches += int((lucas_binom(m, ks, p) != row).sum())
    rng = np.random.default_rng(7)
    for m, k in rng.integers(0, 5**6, size=(2000, 2)):
        mismatches += lucas_binom(int(m), int(k), 5) != math.comb(int(m), int(k)) % 5
    residue_bad = [
        (h, n, a)
        for n in (3, 9, 27)
        for h in range(1, 7)
        for a in range(n)
        if check_binomial_residue(h, n, a, 3) != h % 3
    ]
    ok = mismatches == 0 and not residue_bad
    verdict(7, ok, f"Lucas mismatches over m,k < p^6 (p=2,3,5): {mismatches}; binomial residue failures: {len(residue_bad)}", t0, 120)


def test_criterion_08_baker_schmidt(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(31)
    bad = 0
    for i in range(200):
        p = (2, 3, 5)[i % 3]
        system = random_linear_system(p, rng, max_order=27, max_vars=20)
        assert system.threshold() <= system.num_vars <= 20
        A, B = baker_schmidt_parity(system)
        bad += (A - B) % p != 0
    C3 = make_group([3])
    one = C3.element(1)
    tight = baker_schmidt_parity(LinearSystem(2, (Equation(C3, (one, one), C3.identity),)))
    at = baker_schmidt_parity(LinearSystem(3, (Equation(C3, (one, one, one), C3.identity),)))
    ok = bad == 0 and tight == (1, 0) and at == (1, 1)
    verdict(8, ok, f"200 threshold systems, {bad} parity failures; below threshold (s=2) A,B = {tight}, at threshold {at}", t0, 60)


def test_criterion_09_bounds_engine(verdict):
    t0 = time.perf_counter()
    H = PGroupSpec(3, (1, 1, 1, 2))
    r1 = bound_report(H)
    r2 = bound_report(H, a=2)
    regress = (
        r1.summaries["s"].exact == 29
        and r1.summaries["eta"].exact == 21
        and r2.summaries["s"].exact == 47
    )
    reports = inconsistent = 0
    for p in (3, 5):
        for spec in pgroups_up_to(3**6):
            if spec.p != p:
                continue
            for a in (1, 2, 4):
                for j in [None, *range(1, a * spec.exponent + 1)]:
                    reports += 1
                    inconsistent += not bound_report(spec, a, j).consistent
    ok = regress and inconsistent == 0
    detail = f"C3^3+C9: s={r1.summaries['s'].exact}, eta={r1.summaries['eta'].exact}; a=2: s={r2.summaries['s'].exact}; {reports} reports, {inconsistent} inconsistent"
    verdict(9, ok, detail, t0, 60)


def test_criterion_10_structure_disjunction(verdict):
    t0 = time.perf_counter()
    ex = exhaustive("nested-zero-sum", make_group([3, 3]), 7, {"ell": 1})
    fz = fuzz("nested-zero-sum", make_group([3, 9]), 1000, seed=2024, fixed={"ell": 1}, threads=THREADS)
    neither = ex.outcomes.get("neither", 0) + fz.outcomes.get("neither", 0)
    ok = neither == 0 and ex.checked == math.comb(15, 7) and fz.checked == 1000 and ex.passed and fz.passed
    verdict(10, ok, f"C3+C3 |S|=7 exhaustive {dict(ex.outcomes)}; C3+C9 1000 samples {dict(fz.outcomes)}; neither = {neither}", t0, 600)
