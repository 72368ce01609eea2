import numpy as np
import pytest

from thetaforge.construct import (ConstructionParams, build_clean_graph, build_even_construction,
                                  build_odd_construction, constituent_seed, default_d_poly,
                                  estimate_T, estimate_T_details, generate, graph_T_quantile,
                                  integer_root_floor, random_algebraic_graph)
from thetaforge.ffield import field
from thetaforge.graph import (BipartiteGraph, blowup, complete_bipartite, find_bad_pairs,
                              paths_between, project_to_supergraph, quotient)
from thetaforge.mpoly import PolynomialSystem, evaluate_system


def test_default_degree():
    assert default_d_poly(2) == 8
    assert default_d_poly(3) == 18
    with pytest.raises(ValueError):
        default_d_poly(4)


def test_rejects_ell_one():
    with pytest.raises(ValueError):
        random_algebraic_graph(1, 3)
    with pytest.raises(ValueError):
        ConstructionParams(ell=1, t=3, q=3)


def test_generation_is_deterministic():
    a = random_algebraic_graph(2, 5, seed=11)
    b = random_algebraic_graph(2, 5, seed=11)
    c = random_algebraic_graph(2, 5, seed=12)
    assert a.same_edges(b)
    assert not a.same_edges(c)


def test_edges_are_common_zeros():
    g, system = generate(2, field(5), 8, seed=3)
    labels = g.labels.tolist()
    side = g.left_count
    edges = set(g.edges())
    for u in range(0, side, 3):
        for v in range(side, g.n, 2):
            assert evaluate_system(system, labels[u], labels[v]) == ((u, v) in edges)


def test_sidecar_reproduces_graph(tmp_path):
    path = tmp_path / "g.poly.json"
    g = random_algebraic_graph(2, 7, seed=5, sidecar=path)
    system = PolynomialSystem.load(path)
    g2, _ = generate(2, system.spec, system.d_poly, system.seed)
    assert g.same_edges(g2)


def test_vertex_cap():
    with pytest.raises(ValueError):
        random_algebraic_graph(3, 5, max_vertices=100)


def test_constituent_seeds_distinct():
    assert constituent_seed(4, 0) == 4
    assert constituent_seed(4, 2) == [4, 2]


def test_integer_root_floor():
    for x in range(1, 2000):
        for ell in (2, 3):
            h = integer_root_floor(x, ell)
            assert h**ell <= x < (h + 1) ** ell


def test_clean_graph_budget_54():
    g, rep = build_clean_graph(3, 54, T_eff=10, seed=0)
    assert rep["q"] == 3
    assert rep["vertices_before"] == 54
    assert rep["removal_verified"]
    assert find_bad_pairs(g, 10, 3) == set()


def test_clean_graph_removes_bad_pairs():
    g, rep = build_clean_graph(2, None, T_eff=2, seed=1, q=5)
    assert rep["bad_pairs"] > 0
    assert rep["vertices"] < rep["vertices_before"]
    assert find_bad_pairs(g, 2, 2) == set()
    # origin points back into the generated graph
    g0 = random_algebraic_graph(2, 5, seed=1)
    for u, v in g.edges():
        assert g0.has_edge(int(g.origin[u]), int(g.origin[v]))


def test_odd_construction_m_one_is_base():
    params = ConstructionParams(ell=3, t=11, q=3, T_eff=10, seed=2)
    g, rep = build_odd_construction(params)
    base, _ = build_clean_graph(3, None, 10, seed=2, q=3)
    assert rep["m"] == 1
    assert g.same_edges(base)


def test_odd_construction_blowup_size():
    params = ConstructionParams(ell=3, t=7, q=3, T_eff=2, seed=0)
    g, rep = build_odd_construction(params)
    base, _ = build_clean_graph(3, None, 2, seed=0, q=3)
    assert rep["m"] == 3
    assert rep["construction_vertices"] == 162
    assert g.n == 3 * base.n
    assert g.num_edges == 9 * base.num_edges
    assert rep["blowup_identity"]
    assert quotient(g).same_edges(base)


def test_odd_construction_errors():
    with pytest.raises(ValueError):
        build_odd_construction(ConstructionParams(ell=2, t=5, q=3, T_eff=2))
    with pytest.raises(ValueError):
        build_odd_construction(ConstructionParams(ell=3, t=5, q=3, T_eff=10))


def test_even_construction_h_one_is_clean_graph():
    params = ConstructionParams(ell=2, t=3, q=5, T_eff=2, seed=4)
    g, rep = build_even_construction(params)
    base, _ = build_clean_graph(2, None, 2, seed=4, q=5)
    assert rep["h"] == 1 and rep["multiple_edges_M"] == 0
    assert g.num_edges == base.num_edges
    assert g.n == base.n


def test_even_union_edges_and_M():
    q, h = 7, 2
    totals = []
    for seed in range(12):
        _, rep = build_even_construction(ConstructionParams(ell=2, t=12, q=q, T_eff=3, seed=seed))
        assert rep["h"] == h
        assert rep["M_at_most_n"]
        totals.append(rep["edges_multigraph"])
    # each of h graphs: q^4 pairs with p = 1/q
    pairs, p = q**4, 1 / q
    sigma = np.sqrt(h * pairs * p * (1 - p) / len(totals))
    assert abs(np.mean(totals) - h * q**3) < 3 * sigma


def test_even_construction_free_of_scaled_bad_pairs():
    g, rep = build_even_construction(ConstructionParams(ell=2, t=12, q=5, T_eff=3, seed=1,
                                                        count_in_union=False))
    assert find_bad_pairs(g, rep["threshold"], 2) == set()
    with pytest.raises(ValueError):
        build_even_construction(ConstructionParams(ell=3, t=12, q=3, T_eff=3))


def test_estimate_T_on_known_graphs():
    g = complete_bipartite(2, 7)
    # the two left vertices share 7 paths of length 2; every other pair has one
    assert graph_T_quantile(g, 2, quantile=1.0) == 7
    assert graph_T_quantile(BipartiteGraph(3, 3), 2) == 0


def test_estimate_T_stable_and_positive():
    d = estimate_T_details(3, 3, num_seeds=5)
    assert d["T"] == max(d["per_seed"]) >= 1
    assert estimate_T(3, 3, num_seeds=5) == d["T"]
    assert d["large_cutoff"] is None
    assert estimate_T_details(2, 7, num_seeds=3)["large_cutoff"] == 3.5


def test_blowup_lifts_match_base_paths():
    # lifts of base paths between distinct supervertices: m^(internal vertices) each
    base, _ = build_clean_graph(3, None, 4, seed=3, q=3)
    m = 2
    g = blowup(base, m)
    sv = g.supervertex
    x = 0
    for y in range(1, g.n, 7):
        X, Y = int(sv[x]), int(sv[y])
        if X == Y:
            continue
        lifted = 0
        for p in paths_between(g, x, y, 3).paths:
            walk, erased = project_to_supergraph(g, p)
            lifted += walk == erased
        want = sum(m ** (len(p) - 2) for p in paths_between(base, X, Y, 3).paths)
        assert lifted == want
