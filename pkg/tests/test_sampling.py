from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randcol.errors import InputError
from randcol.graphs import Graph
from randcol.sampling import (
    RngStream,
    complement_split,
    coupled_subgraphs,
    edge_uniforms,
    partition_split,
    sample_subgraph,
    second_round_rate,
    subgraph_from_uniforms,
    two_round_sample,
)


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


# --- stream behaviour -------------------------------------------------------


def test_streams_are_deterministic():
    s = RngStream(42).child("edges", 3)
    a = s.uniforms(100)
    b = RngStream(42).child("edges", 3).uniforms(100)
    assert np.array_equal(a, b)


def test_child_paths_do_not_collide():
    s = RngStream(7)
    keys = {
        s.key(),
        s.child("a").key(),
        s.child("b").key(),
        s.child("a", "b").key(),
        s.child("ab").key(),
        s.child(1).key(),
        s.child("1").key(),
    }
    # "1" the string and 1 the int hash identically by design; all else distinct
    assert len(keys) == 6


def test_uniform_at_matches_uniforms():
    s = RngStream(5).child("x")
    u = s.uniforms(50)
    picked = s.uniform_at([3, 17, 49])
    assert np.array_equal(picked, u[[3, 17, 49]])


def test_uniforms_range_and_moments():
    u = RngStream(2024).child("stats").uniforms(100_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.005
    assert abs(u.var() - 1 / 12) < 0.005
    # crude KS statistic against the uniform cdf
    ks = np.abs(np.sort(u) - (np.arange(1, len(u) + 1) / len(u))).max()
    assert ks < 0.01


def test_generator_reproducible():
    g1 = RngStream(9).child("perm").generator()
    g2 = RngStream(9).child("perm").generator()
    assert np.array_equal(g1.permutation(20), g2.permutation(20))


def test_bad_label_rejected():
    with pytest.raises(InputError):
        RngStream(1).child(3.5)


# --- p-subgraphs -------------------------------------------------------------


def test_sample_extremes():
    g = complete_graph(8)
    s = RngStream(11).child("edges")
    assert sample_subgraph(g, 0.0, s).m == 0
    assert sample_subgraph(g, 1.0, s) == g


def test_sample_is_deterministic_and_purpose_scoped():
    g = complete_graph(10)
    a = sample_subgraph(g, 0.4, RngStream(3).child("edges"))
    b = sample_subgraph(g, 0.4, RngStream(3).child("edges"))
    c = sample_subgraph(g, 0.4, RngStream(3).child("other"))
    assert a == b
    assert a != c


def test_sample_rate_matches_p():
    g = complete_graph(60)
    sub = sample_subgraph(g, 0.3, RngStream(17).child("edges"))
    assert abs(sub.m / g.m - 0.3) < 0.05


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 1), st.floats(0, 1))
def test_coupling_is_monotone(seed, p1, p2):
    p1, p2 = sorted((p1, p2))
    g = complete_graph(9)
    u = edge_uniforms(g, RngStream(seed).child("edges"))
    low = subgraph_from_uniforms(g, u, p1)
    high = subgraph_from_uniforms(g, u, p2)
    assert set(low.edges) <= set(high.edges)


def test_coupled_family_is_nested():
    g = complete_graph(12)
    ps = [0.1, 0.25, 0.5, 0.75, 1.0]
    subs = coupled_subgraphs(g, ps, RngStream(23).child("edges"))
    for small, big in zip(subs, subs[1:]):
        assert set(small.edges) <= set(big.edges)
    assert subs[-1] == g


def test_bad_probability_rejected():
    g = complete_graph(4)
    with pytest.raises(InputError):
        sample_subgraph(g, 1.5, RngStream(0))
    with pytest.raises(InputError):
        subgraph_from_uniforms(g, np.zeros(2), 0.5)


# --- splits ------------------------------------------------------------------


def test_partition_split_is_a_partition():
    g = complete_graph(20)
    parts = partition_split(g, 3, RngStream(5).child("split"))
    assert sum(h.m for h in parts) == g.m
    union = set()
    for h in parts:
        assert union.isdisjoint(h.edges)
        union.update(h.edges)
    assert union == set(g.edges)


def test_complement_split_halves():
    g = complete_graph(40)
    a, b = complement_split(g, RngStream(6).child("split"))
    assert a.m + b.m == g.m
    assert set(a.edges).isdisjoint(b.edges)
    assert abs(a.m / g.m - 0.5) < 0.05


# --- two-round deletion -------------------------------------------------------


def test_second_round_rate_exact():
    assert second_round_rate(Fraction(0)) == Fraction(1, 2)
    assert second_round_rate(Fraction(1, 2)) == Fraction(0)
    for a in (Fraction(1, 10), Fraction(1, 9), Fraction(1, 6), Fraction(2, 5)):
        b = second_round_rate(a)
        assert (1 - a) * (1 - b) == Fraction(1, 2)
    with pytest.raises(InputError):
        second_round_rate(Fraction(3, 5))


def test_two_round_bookkeeping():
    g = complete_graph(30)
    out = two_round_sample(g, Fraction(1, 6), RngStream(99).child("rounds"))
    r1, r2 = set(out.round1_deleted), set(out.round2_deleted)
    assert r1.isdisjoint(r2)
    assert r2 <= set(out.round2_hit)
    assert set(out.round2_hit) - r1 == r2
    surv = out.survivors()
    assert surv.m == g.m - len(r1) - len(r2)
    assert set(surv.edges).isdisjoint(g.edges[i] for i in r1 | r2)
    assert out.round1_survivors().m == g.m - len(r1)


def test_two_round_survival_is_half():
    g = complete_graph(80)  # m = 3160
    out = two_round_sample(g, Fraction(1, 9), RngStream(4).child("rounds"))
    assert abs(out.survivors().m / g.m - 0.5) < 0.04


def test_two_round_zero_first_rate():
    g = complete_graph(20)
    out = two_round_sample(g, 0, RngStream(8).child("rounds"))
    assert out.round1_deleted == ()
    assert out.survivors() == out.round2_only_survivors()
