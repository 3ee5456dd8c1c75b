import itertools
import random

import numpy as np
import pytest

from graphcodes.double import decode_double, double_parity_code
from graphcodes.errors import NotSystematicError
from graphcodes.field import Matrix, field
from graphcodes.framework import (
    GraphCodeSpec,
    encode_systematic,
    erased_columns_independent,
    is_codeword,
    metrics,
    oracle_decode,
    random_codeword,
    syndrome,
    verify_exhaustive,
)
from graphcodes.graphs import LabeledGraph, edge_at, edge_index, num_edges
from graphcodes.single import decode_single, single_parity_code
from graphcodes.triple import triple_code


def test_syndrome_zero_graph():
    spec = single_parity_code(4)
    assert not syndrome(spec, LabeledGraph(4, spec.gf)).any()
    assert is_codeword(spec, LabeledGraph(4, spec.gf))


def test_syndrome_single_edge_is_column():
    spec = double_parity_code(7)
    for e in [(0, 0), (4, 2), (6, 5)]:
        g = LabeledGraph(7, spec.gf)
        g.set_label(*e, 1)
        assert np.array_equal(syndrome(spec, g), spec.h.a[:, edge_index(*e)])


def test_encoder_output_is_codeword():
    rng = random.Random(0)
    for spec in (single_parity_code(5), double_parity_code(7), triple_code(7)):
        g = random_codeword(spec, rng)
        assert is_codeword(spec, g)


def test_oracle_no_erasures_identity():
    spec = single_parity_code(5)
    g = LabeledGraph(5, spec.gf, [1, 0, 1, 0, 1, 0] + [0] * (num_edges(5) - 6))
    rep = oracle_decode(spec, g)
    assert rep.ok and rep.graph == g


def test_oracle_round_trip_double():
    spec = double_parity_code(7)
    rng = random.Random(1)
    for _ in range(5):
        g = random_codeword(spec, rng)
        for pair in itertools.combinations(range(7), 2):
            rep = oracle_decode(spec, g.erase_nodes(pair))
            assert rep.ok and rep.graph == g


def test_oracle_three_failures_underdetermined():
    spec = double_parity_code(7)
    g = random_codeword(spec, random.Random(2))
    rep = oracle_decode(spec, g.erase_nodes({0, 2, 5}))
    assert not rep.ok and rep.reason == "underdetermined"


def test_oracle_inconsistent():
    spec = single_parity_code(4)
    g = LabeledGraph(4, spec.gf)
    g.set_label(0, 0, 1)  # not a codeword; the erased column misses row 0
    rep = oracle_decode(spec, g.erase_edges([(3, 3)]))
    assert not rep.ok and rep.reason == "inconsistent"


def test_encode_systematic_worked_example():
    spec = single_parity_code(3)
    g = encode_systematic(spec, {(0, 0): 1, (1, 0): 0, (1, 1): 1})
    assert g.label(2, 0) == 1 and g.label(2, 1) == 1 and g.label(2, 2) == 0
    assert is_codeword(spec, g)
    rep = oracle_decode(spec, g.erase_nodes({2}))
    assert rep.ok and rep.graph == g


def test_encode_systematic_zero_info():
    spec = double_parity_code(5)
    assert encode_systematic(spec, [0] * num_edges(3)) == LabeledGraph(5, spec.gf)


def test_encode_systematic_info_passthrough():
    rng = random.Random(3)
    spec = triple_code(7)
    info = [rng.randrange(spec.gf.q) for _ in range(num_edges(4))]
    g = encode_systematic(spec, info)
    for k, v in enumerate(info):
        assert g.label(*edge_at(k)) == v


def test_encode_systematic_validations():
    spec = single_parity_code(4)
    with pytest.raises(ValueError):
        encode_systematic(spec, [0, 0])
    with pytest.raises(ValueError):
        encode_systematic(spec, {(3, 0): 1})


def test_not_systematic():
    gf = field(2)
    n = 3
    h = np.zeros((2, num_edges(n)), dtype=np.int64)
    h[0, edge_index(2, 2)] = 1
    h[1, edge_index(2, 2)] = 1  # redundancy columns rank 1 < 2 rows of unknowns
    spec = GraphCodeSpec(n, gf, Matrix(gf, h), k_info=2)
    with pytest.raises(NotSystematicError):
        encode_systematic(spec, [0, 0, 0])


def test_metrics_examples():
    m = metrics(double_parity_code(11), 2)
    assert m.redundancy == 21 and m.gap == 0 and m.q == 2
    m = metrics(triple_code(10), 3)
    assert m.redundancy == 27 and m.gap == 0
    m = metrics(single_parity_code(5), 1)
    assert m.redundancy == 5 and m.gap == 0
    from fractions import Fraction

    assert m.rate == Fraction(10, 15)


def test_advertised_dimensions():
    for n in (5, 7, 11):
        assert double_parity_code(n).dimension == (n - 1) * (n - 2) // 2
        assert single_parity_code(n).dimension == num_edges(n - 1)
    for n, q in ((7, 8), (10, 11)):
        assert triple_code(n, field(q)).dimension == (n - 2) * (n - 3) // 2


def test_linearity_random_combinations():
    rng = random.Random(4)
    for spec in (single_parity_code(6), double_parity_code(7), triple_code(7)):
        for _ in range(40):
            g1 = random_codeword(spec, rng)
            g2 = random_codeword(spec, rng)
            a, b = rng.randrange(spec.gf.q), rng.randrange(spec.gf.q)
            assert is_codeword(spec, g1.scaled(a) + g2.scaled(b))


def test_decode_matches_rank_predicate():
    cases = [
        (double_parity_code(7), 3),
        (double_parity_code(11), 3),
        (single_parity_code(6), 2),
        (triple_code(7), 3),
    ]
    rng = random.Random(5)
    for spec, max_f in cases:
        g = random_codeword(spec, rng)
        for r in range(1, max_f + 1):
            for failed in itertools.combinations(range(spec.n), r):
                pred = erased_columns_independent(spec, failed)
                rep = oracle_decode(spec, g.erase_nodes(failed))
                assert rep.ok == pred
                if rep.ok:
                    assert rep.graph == g


def test_verify_exhaustive_double_ok():
    rep = verify_exhaustive(double_parity_code(7), 2, trials=3, decoder=decode_double)
    assert rep["patterns_total"] == 21 and rep["patterns_ok"] == 21
    assert rep["failures"] == []
    assert set(rep) >= {"family", "n", "q", "rho", "patterns_total", "patterns_ok", "failures", "elapsed_ms"}


def test_verify_exhaustive_three_failures_all_fail():
    rep = verify_exhaustive(double_parity_code(7), 3, trials=1)
    assert rep["patterns_ok"] == 0
    assert all(f["reason"] == "underdetermined" for f in rep["failures"])


def test_verify_exhaustive_single():
    rep = verify_exhaustive(single_parity_code(6), 1, trials=3, decoder=decode_single)
    assert rep["patterns_ok"] == rep["patterns_total"] == 6


def test_verify_exhaustive_deterministic():
    a = verify_exhaustive(double_parity_code(5), 2, trials=3, seed=11)
    b = verify_exhaustive(double_parity_code(5), 2, trials=3, seed=11)
    a.pop("elapsed_ms")
    b.pop("elapsed_ms")
    assert a == b


def test_verify_exhaustive_parallel_matches_serial():
    serial = verify_exhaustive(double_parity_code(5), 2, trials=2, seed=7)
    parallel = verify_exhaustive(double_parity_code(5), 2, trials=2, seed=7, jobs=2)
    serial.pop("elapsed_ms")
    parallel.pop("elapsed_ms")
    assert serial == parallel


def test_random_codeword_nullspace_path():
    spec = double_parity_code(5)
    anon = GraphCodeSpec(spec.n, spec.gf, spec.h)  # no k_info: nullspace sampling
    g = random_codeword(anon, random.Random(8))
    assert is_codeword(anon, g)


def test_decode_report_graph_consistency():
    spec = double_parity_code(5)
    g = random_codeword(spec, random.Random(9))
    rep = oracle_decode(spec, g.erase_nodes({1, 2}))
    assert rep.ok
    assert not rep.graph.has_erasures
    assert not syndrome(spec, rep.graph).any()
    assert sorted(p.edge for p in rep.provenance) == sorted(g.erase_nodes({1, 2}).erased_edges())
