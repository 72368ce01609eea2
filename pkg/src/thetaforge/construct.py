"""Construction pipelines: random algebraic graphs, blowups and unions.

* :func:`random_algebraic_graph` -- parts U = V = F_q^ell, ``uv`` is an edge
  when all ell - 1 random polynomials vanish at ``(u, v)``.
* :func:`build_clean_graph` -- pick the largest prime power with
  ``2 q^ell <= n``, generate, then delete both endpoints of every T-bad pair.
* :func:`build_odd_construction` -- m-blowup of the above with
  ``m = (t - 1) // T``; for odd ell this is Theta_{ell,t}-free.
* :func:`build_even_construction` -- union of h samples, simplified, with
  ``T h^ell``-bad pairs removed.

The bad-pair threshold T is a runtime parameter. :func:`estimate_T` gives an
empirical value from path-count quantiles.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import asdict, dataclass

import numpy as np

from .ffield import FieldSpec, field, largest_prime_power_with
from .graph import (DEFAULT_MAX_VERTICES, BipartiteGraph, all_pair_counts, blowup,
                    find_bad_pairs, induced_subgraph, remove_bad_pairs, simplify,
                    union_multigraph)
from .mpoly import (DEFAULT_MAX_COEFFS, DEFAULT_MAX_GRID, PolynomialSystem,
                    enumerate_monomials, sample_system, vanishing_grid)

log = logging.getLogger(__name__)

DEFAULT_QUANTILE = 0.999


def default_d_poly(ell: int) -> int:
    """2 ell^2, refused for ell >= 4 where the basis no longer fits in memory."""
    if ell >= 4:
        raise ValueError(
            f"default degree 2*ell^2 = {2 * ell * ell} is infeasible for ell={ell}; "
            "pass d_poly explicitly")
    return 2 * ell * ell


def constituent_seed(seed, i: int):
    """Seed for the i-th graph of a union; graph 0 reuses ``seed`` itself."""
    return seed if i == 0 else [seed, i]


def integer_root_floor(x: float, ell: int) -> int:
    h = max(0, int(x ** (1.0 / ell)))
    while (h + 1) ** ell <= x:
        h += 1
    while h > 0 and h**ell > x:
        h -= 1
    return h


@dataclass
class ConstructionParams:
    ell: int
    t: int
    n: int | None = None
    T_eff: int | None = None
    d_poly: int | None = None
    h: int | None = None
    m: int | None = None
    seed: int = 0
    q: int | None = None
    max_vertices: int = DEFAULT_MAX_VERTICES
    cross_only: bool = False
    count_in_union: bool = True
    estimate_seeds: int = 10

    def __post_init__(self):
        if self.ell < 2:
            raise ValueError("ell must be at least 2")
        if self.t < 2:
            raise ValueError("t must be at least 2")
        if self.n is None and self.q is None:
            raise ValueError("give a vertex budget n or a field order q")

    def blowup_factor(self, T_eff: int) -> int:
        return (self.t - 1) // T_eff

    def union_size(self, T_eff: int) -> int:
        return max(1, integer_root_floor(self.t / T_eff, self.ell))


def coordinate_labels(spec: FieldSpec, ell: int) -> np.ndarray:
    side = np.array(list(itertools.product(range(spec.q), repeat=ell)), dtype=np.int64)
    return np.concatenate([side, side])


def graph_from_system(system: PolynomialSystem, max_vertices: int = DEFAULT_MAX_VERTICES,
                      max_grid: int = DEFAULT_MAX_GRID) -> BipartiteGraph:
    spec, ell = system.spec, system.ell
    side = spec.q**ell
    if 2 * side > max_vertices:
        raise ValueError(f"random algebraic graph would have {2 * side} vertices, cap is {max_vertices}")
    mask = vanishing_grid(system, max_grid)
    us, vs = np.nonzero(mask)
    meta = {"construction": "random_algebraic", "ell": ell, "q": spec.q,
            "d_poly": system.d_poly, "seed": system.seed}
    return BipartiteGraph(side, side, zip(us.tolist(), (vs + side).tolist()),
                          labels=coordinate_labels(spec, ell), meta=meta)


def generate(ell: int, spec: FieldSpec | int, d_poly: int | None = None, seed=0,
             max_vertices: int = DEFAULT_MAX_VERTICES, max_coeffs: int = DEFAULT_MAX_COEFFS,
             basis=None) -> tuple[BipartiteGraph, PolynomialSystem]:
    """Sample a polynomial system and build its graph."""
    if ell < 2:
        raise ValueError("ell must be at least 2 (ell - 1 polynomials)")
    if isinstance(spec, int):
        spec = field(spec)
    if d_poly is None:
        d_poly = default_d_poly(ell)
    if 2 * spec.q**ell > max_vertices:
        raise ValueError(f"2*q^ell = {2 * spec.q**ell} vertices exceeds cap {max_vertices}")
    system = sample_system(ell, spec, d_poly, seed, basis=basis, max_coeffs=max_coeffs)
    return graph_from_system(system, max_vertices), system


def random_algebraic_graph(ell: int, spec: FieldSpec | int, d_poly: int | None = None, seed=0,
                           max_vertices: int = DEFAULT_MAX_VERTICES,
                           max_coeffs: int = DEFAULT_MAX_COEFFS, basis=None,
                           sidecar=None) -> BipartiteGraph:
    g, system = generate(ell, spec, d_poly, seed, max_vertices, max_coeffs, basis)
    if sidecar is not None:
        system.save(sidecar)
    return g


def graph_T_quantile(g: BipartiteGraph, max_len: int, quantile: float = DEFAULT_QUANTILE,
                     large_cutoff: float | None = None) -> int:
    """High quantile of per-pair path counts (pairs with at least one path).

    Pairs whose count exceeds ``large_cutoff`` are left out. Returns 0 when
    no pair is joined by a path.
    """
    counts = [c for _, _, c in all_pair_counts(g, max_len)
              if large_cutoff is None or c <= large_cutoff]
    if not counts:
        return 0
    return int(np.quantile(np.asarray(counts), quantile, method="higher"))


def large_branch_cutoff(q: int) -> float | None:
    # the (T, q/2) gap only exists once q/2 clears the bulk of small counts
    return q / 2 if q >= 5 else None


def estimate_T_details(ell: int, q: int, d_poly: int | None = None, num_seeds: int = 10,
                       quantile: float = DEFAULT_QUANTILE, exclude_large: bool = True,
                       seeds=None) -> dict:
    if num_seeds < 1:
        raise ValueError("need at least one seed")
    spec = field(q)
    d_poly = default_d_poly(ell) if d_poly is None else d_poly
    basis = enumerate_monomials(2 * ell, d_poly)
    cutoff = large_branch_cutoff(q) if exclude_large else None
    seeds = list(range(num_seeds)) if seeds is None else list(seeds)
    per_seed = []
    for s in seeds:
        g = random_algebraic_graph(ell, spec, d_poly, s, basis=basis)
        per_seed.append(graph_T_quantile(g, ell, quantile, cutoff))
    return {"T": max(per_seed), "min": min(per_seed), "max": max(per_seed),
            "per_seed": per_seed, "quantile": quantile, "large_cutoff": cutoff,
            "seeds": seeds, "ell": ell, "q": q, "d_poly": d_poly}


def estimate_T(ell: int, q: int, d_poly: int | None = None, num_seeds: int = 10,
               quantile: float = DEFAULT_QUANTILE, exclude_large: bool = True) -> int:
    """Empirical stand-in for the bad-pair constant T.

    Maximum over seeds of the ``quantile`` of per-pair counts of paths of
    length <= ell, ignoring counts above q/2 when q >= 5.
    """
    return estimate_T_details(ell, q, d_poly, num_seeds, quantile, exclude_large)["T"]


def _rescan(g: BipartiteGraph, threshold: int, ell: int, cross_only: bool) -> None:
    leftover = find_bad_pairs(g, threshold, ell, cross_only=cross_only)
    if leftover:
        raise RuntimeError(f"{len(leftover)} bad pairs survive removal")


def build_clean_graph(ell: int, n: int | None, T_eff: int | None, seed=0,
                      d_poly: int | None = None, q: int | None = None,
                      cross_only: bool = False, estimate_seeds: int = 10,
                      max_vertices: int = DEFAULT_MAX_VERTICES) -> tuple[BipartiteGraph, dict]:
    """Random algebraic graph with every T_eff-bad pair deleted."""
    spec = field(q) if q is not None else largest_prime_power_with(n, ell)
    if n is None:
        n = 2 * spec.q**ell
    d_poly = default_d_poly(ell) if d_poly is None else d_poly
    estimated = T_eff is None
    if estimated:
        T_eff = estimate_T(ell, spec.q, d_poly, estimate_seeds)
    if T_eff < 1:
        raise ValueError("T_eff must be positive")
    g0 = random_algebraic_graph(ell, spec, d_poly, seed, max_vertices=max_vertices)
    bad = find_bad_pairs(g0, T_eff, ell, cross_only=cross_only)
    g1, removed = remove_bad_pairs(g0, bad)
    _rescan(g1, T_eff, ell, cross_only)
    g1 = g1.with_meta(construction="clean_base", T_eff=T_eff)
    expo = 1 + 1 / ell
    report = {
        "construction": "clean_base",
        "ell": ell, "n": n, "q": spec.q, "d_poly": d_poly, "seed": seed,
        "T_eff": T_eff, "T_estimated": estimated, "cross_only": cross_only,
        "vertices_before": g0.n, "edges_before": g0.num_edges,
        "expected_edges": spec.q ** (ell + 1),
        "bad_pairs": len(bad),
        "vertices_removed": g0.n - g1.n, "edges_removed": removed,
        "vertices": g1.n, "edges": g1.num_edges,
        "quarter_bound": 0.25 * n**expo,
        "density_vs_n": g1.num_edges / n**expo,
        "removal_verified": True,
    }
    return g1, report


def build_odd_construction(params: ConstructionParams) -> tuple[BipartiteGraph, dict]:
    """m-blowup of a graph without T_eff-bad pairs, m = (t - 1) // T_eff."""
    ell, t = params.ell, params.t
    if ell < 3 or ell % 2 == 0:
        raise ValueError("odd construction needs odd ell >= 3")
    d_poly = default_d_poly(ell) if params.d_poly is None else params.d_poly
    T_eff = params.T_eff
    if T_eff is None:
        if params.q is None:
            raise ValueError("estimating T_eff needs q, or pass T_eff")
        T_eff = estimate_T(ell, params.q, d_poly, params.estimate_seeds)
    m = params.m if params.m is not None else params.blowup_factor(T_eff)
    if m < 1:
        raise ValueError(f"blowup factor is 0: need t > T_eff (t={t}, T_eff={T_eff})")
    if params.q is not None:
        spec = field(params.q)
    else:
        spec = largest_prime_power_with(params.n // m, ell)
    if spec.q**ell * m > params.max_vertices:
        raise ValueError(f"q^ell * m = {spec.q**ell * m} exceeds vertex cap {params.max_vertices}")
    base, base_report = build_clean_graph(
        ell, params.n // m if params.n else None, T_eff, params.seed, d_poly, spec.q,
        params.cross_only)
    g = blowup(base, m, max_vertices=max(params.max_vertices, base.n * m))
    g = g.with_meta(construction="odd_blowup", t=t, m=m, T_eff=T_eff)
    n_out = g.n
    report = {
        "construction": "odd_blowup",
        "ell": ell, "t": t, "T_eff": T_eff, "m": m, "q": spec.q, "seed": params.seed,
        "n_budget": params.n,
        "construction_vertices": m * 2 * spec.q**ell,
        "vertices": n_out, "edges": g.num_edges,
        "base": base_report,
        "blowup_identity": g.num_edges == m * m * base.num_edges,
        "density_ratio_upper": _ratio(g.num_edges, t ** (1 - 1 / ell), n_out, ell),
        "density_ratio_even_lower": _ratio(g.num_edges, t ** (1 / ell), n_out, ell),
        "params": asdict(params),
    }
    return g, report


def _ratio(edges, t_factor, n, ell):
    return edges / (t_factor * n ** (1 + 1 / ell)) if n else 0.0


def build_even_construction(params: ConstructionParams) -> tuple[BipartiteGraph, dict]:
    """Union of h random algebraic graphs, simplified, (T h^ell)-bad pairs removed.

    Path counts for the bad-pair test run on the union with multiplicity
    unless ``params.count_in_union`` is False.
    """
    ell, t = params.ell, params.t
    if ell % 2:
        raise ValueError("even construction needs even ell")
    d_poly = default_d_poly(ell) if params.d_poly is None else params.d_poly
    spec = field(params.q) if params.q is not None else largest_prime_power_with(params.n, ell)
    T_eff = params.T_eff
    if T_eff is None:
        T_eff = estimate_T(ell, spec.q, d_poly, params.estimate_seeds)
    h = params.h if params.h is not None else params.union_size(T_eff)
    if h < 1:
        raise ValueError("h must be at least 1")
    basis = enumerate_monomials(2 * ell, d_poly)
    parts = [random_algebraic_graph(ell, spec, d_poly, constituent_seed(params.seed, i),
                                    max_vertices=params.max_vertices, basis=basis)
             for i in range(h)]
    union = union_multigraph(parts)
    threshold = T_eff * h**ell
    simple, excess = simplify(union)
    if params.count_in_union:
        bad = find_bad_pairs(union, threshold, ell, cross_only=params.cross_only)
    else:
        bad = find_bad_pairs(simple, threshold, ell, cross_only=params.cross_only)
    union_kept, _ = remove_bad_pairs(union, bad)
    result, _ = simplify(union_kept)
    _rescan(union_kept if params.count_in_union else result, threshold, ell, params.cross_only)
    result = result.with_meta(construction="even_union", t=t, h=h, T_eff=T_eff,
                              seed=params.seed)
    n = 2 * spec.q**ell if params.n is None else params.n
    report = {
        "construction": "even_union",
        "ell": ell, "t": t, "T_eff": T_eff, "h": h, "q": spec.q, "seed": params.seed,
        "threshold": threshold, "count_in_union": params.count_in_union,
        "n_budget": params.n,
        "edges_multigraph": union.total_multiplicity,
        "expected_edges_multigraph": h * spec.q ** (ell + 1),
        "multiple_edges_M": excess,
        "M_at_most_n": excess <= 2 * spec.q**ell,
        "edges_simple": simple.num_edges,
        "bad_pairs": len(bad),
        "edges_removed": simple.num_edges - result.num_edges,
        "vertices": result.n, "edges": result.num_edges,
        "density_ratio_even_lower": _ratio(result.num_edges, t ** (1 / ell), result.n, ell),
        "density_ratio_upper": _ratio(result.num_edges, t ** (1 - 1 / ell), result.n, ell),
        "params": asdict(params),
    }
    if not report["M_at_most_n"]:
        log.warning("multiple-edge count M=%d exceeds n=%d", excess, 2 * spec.q**ell)
    return result, report


__all__ = [
    "ConstructionParams", "build_even_construction", "build_odd_construction",
    "build_clean_graph", "constituent_seed", "default_d_poly", "estimate_T",
    "estimate_T_details", "generate", "graph_T_quantile", "graph_from_system",
    "induced_subgraph", "random_algebraic_graph",
]
