import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetaforge.graph import (BipartiteGraph, blowup, complete_bipartite, count_paths_upto,
                              even_cycle, find_bad_pairs, from_edges, induced_subgraph,
                              is_exact_blowup, is_path, locate, loop_erase, path_counts_from,
                              paths_between, project_to_supergraph, quotient, random_bipartite,
                              remove_bad_pairs, simplify, theta_graph, union_multigraph)
from thetaforge.io import read_edgelist, write_edgelist

from oracles import blowup_edges, count_paths_upto_bruteforce, simple_paths_by_permutation


def test_k33_path_count():
    g = complete_bipartite(3, 3)
    # one direct edge plus 2*2 paths of length 3
    assert count_paths_upto(g, 0, 3, 3) == 5
    assert count_paths_upto(g, 0, 1, 2) == 3


def test_even_cycle_paths():
    g = even_cycle(6)
    assert g.num_edges == 6
    assert all(d == 2 for d in g.degrees())
    # antipodal vertices of C6 are joined by two paths of length 3
    assert len(paths_between(g, 0, 4, 3, exact=True)) == 2


def test_paths_between_validates():
    g = complete_bipartite(3, 4)
    pl = paths_between(g, 0, 1, 4)
    pl.validate(g, max_len=4)
    assert len(pl) == count_paths_upto(g, 0, 1, 4)
    with pytest.raises(ValueError):
        paths_between(g, 0, 0, 2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), p=st.floats(0.2, 0.8), max_len=st.integers(1, 4))
def test_path_counts_match_permutation_oracle(seed, p, max_len):
    rng = np.random.default_rng(seed)
    g = random_bipartite(4, 4, p, rng)
    for x in range(g.n):
        counts = path_counts_from(g, x, max_len)
        for y in range(g.n):
            if y == x:
                continue
            assert counts.get(y, 0) == count_paths_upto_bruteforce(g.edges(), g.n, x, y, max_len)


def test_weighted_counts_multiply():
    g = BipartiteGraph(1, 2, [(0, 1), (0, 2)], [3, 2])
    assert count_paths_upto(g, 1, 2, 2) == 6
    assert count_paths_upto(g, 1, 2, 2, weighted=False) == 1


def test_bad_pairs_threshold():
    g = complete_bipartite(2, 5)
    bad = find_bad_pairs(g, 5, 2)
    assert bad == {(0, 1)}
    assert find_bad_pairs(g, 6, 2) == set()
    assert find_bad_pairs(g, 5, 2, cross_only=True) == set()


def test_remove_bad_pairs_and_origin():
    g = complete_bipartite(3, 3)
    h, lost = remove_bad_pairs(g, [(0, 3)])
    assert h.n == 4 and lost == 5
    assert sorted(h.origin.tolist()) == [1, 2, 4, 5]
    h2 = induced_subgraph(h, [0, 2, 3])
    assert all(h2.origin[i] == h.origin[j] for i, j in enumerate([0, 2, 3]))
    assert remove_bad_pairs(g, [])[0] is g


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), m=st.integers(1, 4))
def test_blowup_matches_oracle(seed, m):
    g = random_bipartite(3, 4, 0.5, np.random.default_rng(seed))
    b = blowup(g, m)
    assert set(b.edges()) == blowup_edges(g.edges(), m)
    assert b.num_edges == m * m * g.num_edges
    assert b.n == m * g.n
    assert is_exact_blowup(b)
    assert quotient(b).same_edges(g)


def test_blowup_rejects():
    g = complete_bipartite(2, 2)
    with pytest.raises(ValueError):
        blowup(g, 0)
    with pytest.raises(ValueError):
        blowup(g, 10, max_vertices=20)


def test_damaged_blowup_is_not_exact():
    b = blowup(complete_bipartite(2, 2), 2)
    keep = [e for e in b.edges() if e != b.edges()[0]]
    damaged = BipartiteGraph(b.left_count, b.right_count, keep, supervertex=b.supervertex)
    assert not is_exact_blowup(damaged)


def test_projection_is_path_in_base():
    base = even_cycle(6)
    b = blowup(base, 3)
    for x in range(0, b.n, 4):
        for y in range(b.n):
            if y == x:
                continue
            for p in paths_between(b, x, y, 3).paths:
                walk, erased = project_to_supergraph(b, p)
                assert all(base.has_edge(u, v) for u, v in zip(walk, walk[1:]))
                assert is_path(base, erased)


def test_projection_multiplicity_bound():
    # a base path with an internal vertex lifts to at most m^(internal) paths per endpoint pair
    base = complete_bipartite(2, 3)
    m = 2
    b = blowup(base, m)
    x = 0
    lifts = {}
    for y in range(b.n):
        if y == x:
            continue
        for p in paths_between(b, x, y, 3).paths:
            _, erased = project_to_supergraph(b, p)
            if len(erased) >= 3 and len(p) == len(erased):
                lifts[(y, erased)] = lifts.get((y, erased), 0) + 1
    assert lifts
    for (y, erased), c in lifts.items():
        assert c <= m ** (len(erased) - 2)


def test_loop_erase():
    assert loop_erase([1, 2, 3, 2, 4]) == (1, 2, 4)
    assert loop_erase([1, 2, 1]) == (1,)
    assert loop_erase([5, 6, 7]) == (5, 6, 7)
    assert loop_erase([1, 2, 3, 4, 2, 5, 1, 6]) == (1, 6)


def test_union_and_simplify():
    a = BipartiteGraph(2, 2, [(0, 2), (1, 3)])
    b = BipartiteGraph(2, 2, [(0, 2), (0, 3)])
    u = union_multigraph([a, b])
    assert u.total_multiplicity == 4
    assert u.multiplicity(0, 2) == 2
    assert u.tags(0, 2) == (0, 1)
    assert u.tags(0, 3) == (1,)
    s, M = simplify(u)
    assert M == 1 and s.num_edges == 3 and s.total_multiplicity == 3
    with pytest.raises(ValueError):
        union_multigraph([a, BipartiteGraph(2, 3)])


def test_constructor_rejects_bad_input():
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(0, 1)])
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(0, 2), (2, 0)])
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(0, 2)], [0])


def test_edgelist_roundtrip(tmp_path):
    g = union_multigraph([complete_bipartite(2, 3), BipartiteGraph(2, 3, [(0, 2)])])
    g = g.with_meta(ell=2, q=5, seed=[1, 2])
    path = tmp_path / "g.txt"
    write_edgelist(g, path, {"t": 4})
    h = read_edgelist(path)
    assert h.same_edges(g)
    assert h.edge_multiplicities() == g.edge_multiplicities()
    assert h.meta["t"] == 4 and h.meta["seed"] == [1, 2]


def test_edgelist_requires_sides(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n")
    with pytest.raises(ValueError):
        read_edgelist(path)


def test_from_edges():
    g = from_edges([(0, 1), (1, 2), (2, 3), (3, 0)])
    assert g.num_edges == 4 and g.left_count == 2
    with pytest.raises(ValueError):
        from_edges([(0, 1), (1, 2), (2, 0)])


@pytest.mark.parametrize("ell,t", [(2, 3), (3, 4), (4, 2), (5, 3)])
def test_theta_graph_shape(ell, t):
    g = theta_graph(ell, t)
    assert g.n == 2 + t * (ell - 1)
    assert g.num_edges == t * ell
    x, y = locate(g, 0), locate(g, 1)
    assert g.degree(x) == g.degree(y) == t
    exact = paths_between(g, x, y, ell, exact=True)
    assert len(exact) == t
    assert sorted(simple_paths_by_permutation(g.edges(), g.n, x, y, ell)) == sorted(exact.paths)
