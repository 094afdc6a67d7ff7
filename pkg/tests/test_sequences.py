from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerosum.errors import CapExceeded, NotASubsequence, SpecParseError
from zerosum.groups import make_group
from zerosum.sequences import (
    GSequence,
    dumps_sequences,
    enumerate_multisets,
    format_sequence,
    loads_sequences,
    parse_sequence,
    read_sequence_file,
    sample_uniform,
    seq_sum,
    subsequence_remove,
    write_sequence_file,
)

C3 = make_group([3])
C33 = make_group([3, 3])


def test_seq_sum_examples():
    assert seq_sum(GSequence.empty(C33)).coords == (0, 0)
    assert seq_sum(GSequence.from_elements(C33, [(1, 0)] * 3)).coords == (0, 0)
    assert seq_sum(GSequence.from_elements(C33, [(1, 2), (2, 2)])).coords == (0, 1)


def test_subsequence_remove_examples():
    g, h = (1, 0), (0, 1)
    S = GSequence.from_elements(C33, [g, g, g, h])
    assert subsequence_remove(S, S).length == 0
    assert subsequence_remove(S, GSequence.from_elements(C33, [g])) == GSequence.from_elements(C33, [g, g, h])
    with pytest.raises(NotASubsequence):
        subsequence_remove(S, GSequence.from_elements(C33, [h, h]))


def test_sample_uniform_examples():
    assert sample_uniform(C33, 0, 5).length == 0
    assert sample_uniform(C33, 20, 42) == sample_uniform(C33, 20, 42)


def test_sample_uniform_frequencies():
    S = sample_uniform(C3, 10**5, 2024)
    p = 1 / 3
    sigma = math.sqrt(10**5 * p * (1 - p))
    for idx in range(3):
        assert abs(S.multiplicity(idx) - 10**5 * p) < 5 * sigma


def test_enumerate_examples():
    assert sum(1 for _ in enumerate_multisets(C3, 2)) == 6
    assert sum(1 for _ in enumerate_multisets(C33, 8)) == 12870
    with pytest.raises(CapExceeded) as info:
        list(enumerate_multisets(C33, 8, cap=100))
    assert info.value.required == 12870


def test_enumerate_counts_and_order():
    for factors in [(2,), (3,), (4,), (2, 2), (5,), (6,), (7,), (2, 4), (8,), (3, 3), (9,)]:
        G = make_group(list(factors))
        for ell in range(7):
            words = [tuple(S.indices()) for S in enumerate_multisets(G, ell)]
            assert len(words) == math.comb(G.order + ell - 1, ell)
            assert len(set(words)) == len(words)
            assert words == sorted(words)


def test_enumerate_prefix_split_is_a_partition():
    whole = [S.items for S in enumerate_multisets(C33, 4)]
    parts = [S.items for s in range(9) for S in enumerate_multisets(C33, 4, first=range(s, s + 1))]
    assert parts == whole


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 26), max_size=15), st.randoms(use_true_random=False))
def test_sum_is_order_independent_and_additive(word, rnd):
    G = make_group([3, 9])
    S = GSequence.from_indices(G, word)
    shuffled = list(word)
    rnd.shuffle(shuffled)
    assert seq_sum(GSequence.from_indices(G, shuffled)) == seq_sum(S)
    T = GSequence.from_indices(G, shuffled[: len(shuffled) // 2])
    assert T.divides(S)
    rest = subsequence_remove(S, T)
    assert G.add(seq_sum(T), seq_sum(rest)) == seq_sum(S)
    assert S.length == T.length + rest.length


def test_text_format_round_trip(tmp_path):
    G = make_group([3, 9])
    seqs = [sample_uniform(G, n, n) for n in (0, 1, 5, 12)]
    text = dumps_sequences(G, seqs)
    assert text.splitlines()[0] == "# group: C3*C9"
    G2, back = loads_sequences(text)
    assert G2 == G and back == seqs
    path = tmp_path / "w.txt"
    write_sequence_file(path, G, seqs)
    assert read_sequence_file(path) == (G, seqs)


def test_text_format_multiplicity_suffix():
    S = parse_sequence(C33, "(1,0)^3 (2,2)")
    assert S.length == 4 and S.multiplicity(1) == 3
    assert format_sequence(S) == "(1,0)^3 (2,2)"
    assert parse_sequence(C33, "(1,0) (2,2) (1,0)^2") == S
    with pytest.raises(SpecParseError):
        parse_sequence(C33, "(1,0)^0")
    with pytest.raises(SpecParseError):
        parse_sequence(C33, "1,0")


def test_sample_accepts_generator():
    a = sample_uniform(C33, 10, np.random.default_rng(3))
    b = sample_uniform(C33, 10, np.random.default_rng(3))
    assert a == b
