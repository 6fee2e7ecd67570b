import numpy as np
import pytest

from randcol.errors import InputError
from randcol.graphs import DiGraph, Graph
from randcol.sampling import RngStream
from randcol.spectral import (
    alon_milman_lower_bound,
    directed_boundary_size,
    second_eigenvalue,
    verify_alon_milman,
    verify_vertex_expansion,
)


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph(10, outer + inner + spokes)


def circulant(n, offsets):
    edges = set()
    for i in range(n):
        for off in offsets:
            j = (i + off) % n
            if i != j:
                edges.add((min(i, j), max(i, j)))
    return Graph(n, sorted(edges))


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_digraph(n, shift=0):
    arcs = [(i + shift, j + shift) for i in range(n) for j in range(n) if i != j]
    return arcs


def circulant_digraph(n, offsets):
    return DiGraph(n, [(i, (i + off) % n) for i in range(n) for off in offsets])


# --- second eigenvalue -------------------------------------------------------


def test_known_spectra_dense():
    assert abs(second_eigenvalue(petersen(), 3).lambda2 - 1.0) < 1e-9
    assert abs(second_eigenvalue(circulant(6, [1]), 2).lambda2 - 1.0) < 1e-9
    assert abs(second_eigenvalue(complete_graph(4), 3).lambda2 + 1.0) < 1e-9


def test_power_iteration_matches_dense():
    for g, d in [
        (petersen(), 3),
        (circulant(6, [1]), 2),
        (complete_graph(4), 3),
        (circulant(60, [1, 2, 5]), 6),
        (circulant(200, [1, 2, 5]), 6),
    ]:
        dense = second_eigenvalue(g, d).lambda2
        power = second_eigenvalue(g, d, dense_cutoff=0).lambda2
        assert abs(dense - power) < 1e-7, (g, dense, power)


def test_certificate_fields():
    cert = second_eigenvalue(petersen(), 3, girth_checked=5)
    assert cert.d == 3
    assert cert.tolerance == 1e-9
    assert cert.girth_checked == 5
    assert cert.lambda2 < cert.d


def test_input_errors():
    with pytest.raises(InputError):
        second_eigenvalue(Graph(3, [(0, 1)]), 1)  # not regular
    with pytest.raises(InputError):
        second_eigenvalue(petersen(), 4)  # wrong degree
    two_triangles = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    with pytest.raises(InputError):
        second_eigenvalue(two_triangles, 2)  # disconnected
    with pytest.raises(InputError):
        second_eigenvalue(petersen(), 3, tolerance=0)


# --- spectral boundary bound ---------------------------------------------------


def test_lower_bound_arithmetic():
    assert alon_milman_lower_bound(3, -1.0, 1, 4) == pytest.approx(3.0)
    assert alon_milman_lower_bound(2, 1.0, 3, 6) == pytest.approx(1.5)
    assert alon_milman_lower_bound(3, 1.0, 0, 10) == 0.0
    with pytest.raises(InputError):
        alon_milman_lower_bound(3, 1.0, 11, 10)


def test_verify_exhaustive_small_graphs():
    for g in [complete_graph(4), circulant(6, [1]), petersen(), circulant(12, [1, 6])]:
        rep = verify_alon_milman(g)
        assert rep.mode == "exhaustive"
        assert rep.violations == ()
        assert rep.tightest_ratio >= 1 - 1e-6
        assert rep.n_checked == 2 ** g.n


def test_verify_k4_tight_at_singletons():
    rep = verify_alon_milman(complete_graph(4))
    assert rep.tightest_ratio == pytest.approx(1.0, abs=1e-6)
    assert len(rep.witness) in (1, 3)  # bound symmetric in S vs complement


def test_verify_sampled_mode():
    g = circulant(24, [1, 3])
    rep = verify_alon_milman(g, samples=500, stream=RngStream(5).child("am"))
    assert rep.mode == "sampled"
    assert rep.samples == 500
    assert rep.violations == ()
    assert rep.tightest_ratio >= 1 - 1e-6


def test_verify_rejects_irregular():
    with pytest.raises(InputError):
        verify_alon_milman(Graph(3, [(0, 1)]))


# --- directed vertex expansion --------------------------------------------------


def test_expansion_rejects_one_regular():
    with pytest.raises(InputError):
        verify_vertex_expansion(circulant_digraph(6, [1]))


def test_expansion_complete_triangle():
    h = DiGraph(3, complete_digraph(3))
    cert = verify_vertex_expansion(h)
    assert cert.mode == "exhaustive"
    assert cert.c3_hat == pytest.approx(1.0)


def test_expansion_disconnected_halves():
    arcs = complete_digraph(3) + complete_digraph(3, shift=3)
    cert = verify_vertex_expansion(DiGraph(6, arcs))
    assert cert.c3_hat == 0.0
    assert len(cert.witness) == 3
    assert directed_boundary_size(DiGraph(6, arcs), cert.witness) == 0


def test_expansion_strongly_connected_positive():
    h = circulant_digraph(12, [1, 3])
    cert = verify_vertex_expansion(h)
    assert cert.mode == "exhaustive"
    assert cert.c3_hat > 0
    w = cert.witness
    assert directed_boundary_size(h, w) / min(len(w), h.n - len(w)) == cert.c3_hat


def test_expansion_sampled_mode():
    h = circulant_digraph(24, [1, 5])
    cert = verify_vertex_expansion(h, samples=400, stream=RngStream(9).child("vx"))
    assert cert.mode == "sampled"
    assert cert.samples == 400
    assert cert.c3_hat > 0
    w = cert.witness
    assert directed_boundary_size(h, w) / min(len(w), h.n - len(w)) == cert.c3_hat
