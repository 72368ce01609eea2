"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v``; the summary section at the end
lists every criterion with the measured numbers.
"""

import math

import numpy as np
import pytest

from thetaforge.cli import run_bench
from thetaforge.construct import (ConstructionParams, build_odd_construction, estimate_T,
                                  random_algebraic_graph)
from thetaforge.explore import (compute_bad_set, compute_constants, explore_step,
                                linear_path_counts_dfs, r_value, run_certifier,
                                start_exploration)
from thetaforge.ffield import field
from thetaforge.graph import BipartiteGraph, blowup, complete_bipartite, random_bipartite
from thetaforge.mpoly import enumerate_monomials, evaluate, sample_polynomial
from thetaforge.theta import brute_force_theta_oracle, contains_theta, is_valid_witness

from oracles import blowup_edges, catalan_by_recurrence


def _random_host(rng, max_vertices, p_range=(0.1, 0.35)):
    left = int(rng.integers(1, max_vertices // 2 + 1))
    right = int(rng.integers(1, max_vertices - left + 1))
    return random_bipartite(left, right, float(rng.uniform(*p_range)), rng)


def test_edge_density(acceptance):
    seeds = 30
    lines, ok = [], True
    for ell, q in [(2, 3), (2, 5), (2, 7), (3, 3)]:
        counts = [random_algebraic_graph(ell, q, seed=s).num_edges for s in range(seeds)]
        p = q ** -(ell - 1)
        sigma = math.sqrt(q ** (2 * ell) * p * (1 - p) / seeds)
        dev = abs(np.mean(counts) - q ** (ell + 1)) / sigma
        ok &= dev <= 3
        lines.append(f"l={ell},q={q}: mean={np.mean(counts):.1f} vs {q ** (ell + 1)} ({dev:.2f} sd)")
    acceptance(ok, "; ".join(lines))
    assert ok


def test_joint_vanishing(acceptance):
    samples = 20000
    lines, ok = [], True
    for q in (5, 7):
        spec = field(q)
        for m in (2, 3):
            basis = enumerate_monomials(2, m - 1)
            rng = np.random.default_rng([q, m])
            hits = 0
            for _ in range(samples):
                flat = rng.choice(q * q, size=m, replace=False)
                pts = [(int(v) // q, int(v) % q) for v in flat]
                f = sample_polynomial(basis, spec, rng)
                hits += all(evaluate(f, pt) == 0 for pt in pts)
            p = q ** -m
            sigma = math.sqrt(p * (1 - p) / samples)
            dev = abs(hits / samples - p) / sigma
            ok &= dev <= 3
            lines.append(f"q={q},m={m}: {hits / samples:.5f} vs {p:.5f} ({dev:.2f} sd)")
    acceptance(ok, "; ".join(lines))
    assert ok


def test_blowup_identity(acceptance):
    rng = np.random.default_rng(2024)
    bad = 0
    for _ in range(100):
        g = _random_host(rng, 16, (0.2, 0.7))
        m = int(rng.integers(1, 6))
        b = blowup(g, m)
        if b.num_edges != m * m * g.num_edges or set(b.edges()) != blowup_edges(g.edges(), m):
            bad += 1
    acceptance(bad == 0, f"{100 - bad}/100 instances exact")
    assert bad == 0


def test_theta_oracle_equivalence(acceptance):
    rng = np.random.default_rng(7)
    checked = mismatches = 0
    while checked < 500:
        g = _random_host(rng, 12, (0.2, 0.6))
        ell = int(rng.choice([2, 3, 4]))
        t = int(rng.integers(1, 5))
        try:
            want = brute_force_theta_oracle(g, ell, t)
        except ValueError:
            continue  # too many candidates for exhaustive enumeration
        checked += 1
        got = contains_theta(g, ell, t)
        full = contains_theta(g, ell, t, full_maxima=True)
        same_max = ({k: v for k, v in want.pair_maxima.items() if v}
                    == {k: v for k, v in full.pair_maxima.items() if v})
        if got.found != want.found or not got.exact or not same_max:
            mismatches += 1
    hand = {
        "K33": contains_theta(complete_bipartite(3, 3), 3, 2, full_maxima=True).max_packing(),
        "K44": contains_theta(complete_bipartite(4, 4), 3, 3, full_maxima=True).max_packing(),
    }
    k2t = all(contains_theta(complete_bipartite(2, t), 2, t).found
              and contains_theta(complete_bipartite(2, t), 2, t + 1).free for t in range(2, 9))
    ok = mismatches == 0 and hand == {"K33": 2, "K44": 3} and k2t
    acceptance(ok, f"{checked} graphs, {mismatches} mismatches; {hand}; K2t={k2t}")
    assert ok


def test_odd_construction_freeness(acceptance):
    ell, q = 3, 3
    T = estimate_T(ell, q)
    lines, ok = [], True
    for m in (2, 3):
        t = T * m + 1
        g, rep = build_odd_construction(ConstructionParams(ell=ell, t=t, q=q, T_eff=T, seed=0))
        res = contains_theta(g, ell, t)
        full = contains_theta(g, ell, t, full_maxima=True)
        good = (rep["m"] == m and res.free and full.free and full.max_packing() <= T * m)
        ok &= good
        lines.append(f"m={m},t={t}: {g.n} vertices, {g.num_edges} edges, "
                     f"max packing {full.max_packing()} <= {T * m}, free={res.free}")
    acceptance(ok, f"T_eff={T}; " + "; ".join(lines))
    assert ok


def test_density_trend(acceptance):
    qs = [3, 5, 7, 9, 11, 13]
    seeds = 10
    xs, ys = [], []
    for q in qs:
        edges = [random_algebraic_graph(2, q, seed=s).num_edges for s in range(seeds)]
        xs.append(math.log(2 * q * q))
        ys.append(math.log(np.mean(edges)))
    slope = float(np.polyfit(xs, ys, 1)[0])
    ok = abs(slope - 1.5) <= 0.15
    acceptance(ok, f"slope={slope:.3f}")
    assert ok


def test_catalan_machinery(acceptance):
    bad = []
    for ell in range(1, 6):
        for t in range(1, 11):
            R = [r_value(ell, t, m) for m in range(9)]
            for m in range(1, 9):
                conv = sum(R[u] * R[m - 1 - u] for u in range(m))
                if conv * 2 * ell * t != R[m] or R[m] > (8 * ell * t) ** m:
                    bad.append((ell, t, m))
                if R[m] != (2 * ell * t) ** m * catalan_by_recurrence(m):
                    bad.append((ell, t, m, "closed form"))
    acceptance(not bad, f"{len(bad)} failures over m<=8, ell<=5, t<=10")
    assert not bad


def _tables_agree(state):
    for i in range(state.stage + 1):
        for j in range(i + 1, state.stage + 1):
            ref = linear_path_counts_dfs(state.g, state.layers, i, j)
            M = state.P[(i, j)]
            for r, u in enumerate(state.layers[i].tolist()):
                for c, v in enumerate(state.layers[j].tolist()):
                    if int(M[r, c]) != ref.get((u, v), 0):
                        return False
    return True


def test_explorer_consistency(acceptance):
    rng = np.random.default_rng(99)
    hosts = dp_bad = struct_bad = 0
    free_hosts = bound_bad = 0
    while hosts < 200:
        g = _random_host(rng, 50, (0.05, 0.2))
        root = int(np.argmax(g.degrees()))
        if g.degree(root) == 0:
            continue
        hosts += 1
        ell = int(rng.choice([2, 3, 4]))
        t = int(rng.choice([2, 3]))
        consts = compute_constants(ell, t)
        state = start_exploration(g, root, ell, t)
        dp_bad += not _tables_agree(state)
        while state.stage < ell:
            rec = explore_step(state, consts)
            dp_bad += not _tables_agree(state)
            struct_bad += not all(rec["checks"][p]["ok"] for p in ("P1", "P2", "disjoint"))
        if contains_theta(g, ell, t).free:
            free_hosts += 1
            final = compute_bad_set(state, consts)
            cert = run_certifier(g, ell, t)
            bound_bad += not (final.bound_ok and cert.certificate["bad_set_bound_ok"])
    ok = dp_bad == 0 and struct_bad == 0 and bound_bad == 0
    acceptance(ok, f"{hosts} hosts: dp mismatches={dp_bad}, structural={struct_bad}; "
                   f"bound failures={bound_bad} on {free_hosts} theta-free hosts")
    assert ok


def _planted_host(rng, ell, t, s):
    left, right = s + int(rng.integers(0, 12)), s - 1 + int(rng.integers(0, 12))
    base = random_bipartite(left, right, 0.05, rng)
    A = rng.choice(left, s, replace=False)
    B = rng.choice(right, s - 1, replace=False) + left
    edges = set(base.edges()) | {(int(a), int(b)) for a in A for b in B}
    return BipartiteGraph(left, right, sorted(edges))


def test_embedding_soundness(acceptance):
    rng = np.random.default_rng(5)
    configs = [(3, 2, 14), (2, 3, 13), (4, 2, 17), (2, 2, 9), (3, 3, 19)]
    planted_found = planted_invalid = 0
    for n in range(50):
        ell, t, s = configs[n % len(configs)]
        g = _planted_host(rng, ell, t, s)
        res = run_certifier(g, ell, t)
        if res.witness is not None:
            planted_found += 1
            planted_invalid += not is_valid_witness(g, res.witness, ell, t)
    free = false_hits = 0
    while free < 500:
        g = _random_host(rng, 16, (0.15, 0.45))
        ell = int(rng.choice([2, 3, 4]))
        t = int(rng.choice([2, 3]))
        if not contains_theta(g, ell, t).free or g.num_edges == 0:
            continue
        free += 1
        false_hits += run_certifier(g, ell, t).witness is not None
    ok = planted_invalid == 0 and false_hits == 0
    acceptance(ok, f"planted: {planted_found}/50 witnesses, {planted_invalid} invalid; "
                   f"theta-free: {false_hits} witnesses on {free} hosts")
    assert ok
    assert planted_found > 0


def test_bench_report(acceptance):
    res = run_bench(seed=0, estimate_seeds=5)
    parts = [f"{r['construction']} l={r['ell']} q={r['q']} t={r['t']}: "
             f"upper={r['ratio_upper']:.3f} even_lower={r['ratio_even_lower']:.3f}"
             for r in res["rows"]]
    acceptance(True, "(report only) " + "; ".join(parts))
    assert len(res["rows"]) == 5
