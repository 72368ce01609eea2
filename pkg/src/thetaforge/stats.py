"""Monte Carlo statistics on unions of random algebraic graphs.

A path e_1 ... e_r in a union of h tagged graphs has *type* (i_1, ..., i_r)
when e_j belongs to constituent graph i_j. Type indices are 0-based, the
same numbers the union stores as edge tags. An edge shared by several
constituents lets one vertex path carry several types.
"""

from __future__ import annotations

import csv
import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .construct import constituent_seed, default_d_poly, random_algebraic_graph
from .ffield import field
from .graph import BipartiteGraph, find_bad_pairs, union_multigraph
from .mpoly import enumerate_monomials


@dataclass(frozen=True)
class PathType:
    indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if not self.indices:
            raise ValueError("a path type needs at least one edge")
        if min(self.indices) < 0:
            raise ValueError("type indices are 0-based constituent numbers")

    @property
    def r(self) -> int:
        return len(self.indices)

    def check(self, ell: int, h: int | None = None) -> None:
        if self.r > ell:
            raise ValueError(f"type of length {self.r} exceeds ell={ell}")
        if h is not None and max(self.indices) >= h:
            raise ValueError(f"type index out of range for h={h}")


def all_types(r: int, h: int):
    return (PathType(t) for t in itertools.product(range(h), repeat=r))


def edge_tag_list(g: BipartiteGraph, u: int, v: int) -> tuple:
    tags = g.tags(u, v)
    return tags if tags else (0,) * g.multiplicity(u, v)


def count_typed_paths(g: BipartiteGraph, x: int, y: int, ptype, ell: int | None = None) -> int:
    """Simple x-y paths whose j-th edge lies in constituent ``ptype.indices[j]``."""
    if not isinstance(ptype, PathType):
        ptype = PathType(ptype)
    if ell is not None:
        ptype.check(ell)
    if x == y:
        raise ValueError("endpoints must differ")
    want = ptype.indices
    r = len(want)
    onpath = {x}
    total = 0

    def dfs(v, j):
        nonlocal total
        for u in g.neighbors(v):
            if u in onpath or want[j] not in edge_tag_list(g, v, u):
                continue
            if j + 1 == r:
                total += u == y
            else:
                onpath.add(u)
                dfs(u, j + 1)
                onpath.discard(u)

    dfs(x, 0)
    return total


def typed_profile(g: BipartiteGraph, x: int, max_len: int) -> dict:
    """``{(y, type_tuple): count}`` over all simple paths from ``x`` of length <= max_len."""
    out = defaultdict(int)
    onpath = {x}

    def dfs(v, seqs):
        # seqs: Counter of tag sequences realised by the current vertex path
        for u in g.neighbors(v):
            if u in onpath:
                continue
            tags = Counter(edge_tag_list(g, v, u))
            nxt = Counter()
            for s, c in seqs.items():
                for tg, w in tags.items():
                    nxt[s + (tg,)] += c * w
            for s, c in nxt.items():
                out[(u, s)] += c
            if len(next(iter(nxt))) < max_len:
                onpath.add(u)
                dfs(u, nxt)
                onpath.discard(u)

    dfs(x, Counter({(): 1}))
    return dict(out)


def union_sample(ell: int, q: int, h: int, seed, d_poly: int | None = None, basis=None):
    d_poly = default_d_poly(ell) if d_poly is None else d_poly
    spec = field(q)
    basis = basis or enumerate_monomials(2 * ell, d_poly)
    parts = [random_algebraic_graph(ell, spec, d_poly, constituent_seed(seed, i), basis=basis)
             for i in range(h)]
    return union_multigraph(parts)


def _mean_stderr(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if len(arr) < 2:
        return float(arr.mean()) if len(arr) else 0.0, 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(len(arr)))


def estimate_bad_pair_expectation(ell: int, q: int, h: int, T_eff: int, num_seeds: int,
                                  d_poly: int | None = None, seed=0) -> dict:
    """Mean number of (T_eff * h^ell)-bad pairs in the union, counted with multiplicity."""
    if num_seeds < 10:
        raise ValueError("need at least 10 seeds")
    d_poly = default_d_poly(ell) if d_poly is None else d_poly
    basis = enumerate_monomials(2 * ell, d_poly)
    threshold = T_eff * h**ell
    rows = []
    for s in range(num_seeds):
        g = union_sample(ell, q, h, [seed, s], d_poly, basis)
        rows.append({"ell": ell, "q": q, "h": h, "seed": s, "threshold": threshold,
                     "edges": g.total_multiplicity,
                     "bad_pairs": len(find_bad_pairs(g, threshold, ell))})
    mean, err = _mean_stderr([r["bad_pairs"] for r in rows])
    return {"ell": ell, "q": q, "h": h, "T_eff": T_eff, "threshold": threshold,
            "mean": mean, "stderr": err, "rows": rows,
            "pair_bound": (2 * q**ell) ** 2}


def _admissible_pairs(side: int, r: int) -> int:
    # unordered pairs x < y on the sides a length-r path can join
    return side * side if r % 2 else side * (side - 1)


def dichotomy_histogram(g: BipartiteGraph, ell: int, q: int, h: int = 1,
                        T_probe: int = 3) -> dict:
    """Histogram of per-pair, per-type path counts |S_I| for one (union) graph.

    Keys of ``by_length[r]`` are counts; zeros are filled in from the number
    of admissible (pair, type) slots. Counts strictly between ``T_probe`` and
    q/2 fall in the forbidden middle band.
    """
    side = g.left_count
    by_len = {r: Counter() for r in range(1, ell + 1)}
    for x in range(g.n):
        for (y, s), c in typed_profile(g, x, ell).items():
            if y > x:
                by_len[len(s)][c] += 1
    half = q / 2
    out = {"ell": ell, "q": q, "h": h, "T_probe": T_probe, "by_length": {}}
    middle = large = nonzero = 0
    for r, hist in by_len.items():
        slots = _admissible_pairs(side, r) * h**r
        hist[0] = slots - sum(hist.values())
        out["by_length"][r] = dict(sorted(hist.items()))
        for c, n in hist.items():
            if c == 0:
                continue
            nonzero += n
            if T_probe < c < half:
                middle += n
            elif c >= half:
                large += n
    out.update(nonzero=nonzero, middle=middle, large=large,
               middle_fraction=middle / nonzero if nonzero else 0.0,
               large_fraction=large / nonzero if nonzero else 0.0,
               flagged=middle > 0)
    return out


def merge_histograms(results: list[dict]) -> dict:
    first = results[0]
    merged = {r: Counter() for r in first["by_length"]}
    for res in results:
        for r, hist in res["by_length"].items():
            merged[r].update(hist)
    keys = ("nonzero", "middle", "large")
    tot = {k: sum(res[k] for res in results) for k in keys}
    return {"ell": first["ell"], "q": first["q"], "h": first["h"], "T_probe": first["T_probe"],
            "seeds": len(results),
            "by_length": {r: dict(sorted(c.items())) for r, c in merged.items()},
            **tot,
            "middle_fraction": tot["middle"] / tot["nonzero"] if tot["nonzero"] else 0.0,
            "large_fraction": tot["large"] / tot["nonzero"] if tot["nonzero"] else 0.0,
            "flagged": tot["middle"] > 0}


def dichotomy_scan(ell: int, q: int, seeds, T_probe: int = 3, h: int = 1,
                   d_poly: int | None = None) -> dict:
    """Pooled |S_I| histogram over ``seeds`` with middle-band occupancy."""
    if q < 5:
        raise ValueError("the small/large split needs q >= 5")
    d_poly = default_d_poly(ell) if d_poly is None else d_poly
    basis = enumerate_monomials(2 * ell, d_poly)
    per_seed = [dichotomy_histogram(union_sample(ell, q, h, s, d_poly, basis), ell, q, h, T_probe)
                for s in seeds]
    out = merge_histograms(per_seed)
    out["rows"] = [{"ell": ell, "q": q, "h": h, "seed": s, "nonzero": res["nonzero"],
                    "middle": res["middle"], "large": res["large"]}
                   for s, res in zip(seeds, per_seed)]
    return out


def moment_scan(ell: int, q: int, num_seeds: int = 10, pairs_per_seed: int = 200, seed=0,
                d_poly: int | None = None) -> dict:
    """Mean of |S_I|^(2 ell) per path length r on sampled pairs (single graph, h = 1).

    Pairs are drawn uniformly among those whose sides suit r. The reference
    value 2 ell^2 is compared with mean + 3 standard errors.
    """
    d_poly = default_d_poly(ell) if d_poly is None else d_poly
    basis = enumerate_monomials(2 * ell, d_poly)
    power = 2 * ell
    samples = {r: [] for r in range(1, ell + 1)}
    side = q**ell
    for s in range(num_seeds):
        g = random_algebraic_graph(ell, field(q), d_poly, [seed, s], basis=basis)
        rng = np.random.default_rng([seed, s, 1])
        for r in range(1, ell + 1):
            xs = rng.integers(0, g.n, size=pairs_per_seed)
            for x in xs.tolist():
                other = (x >= side) != (r % 2 == 1)  # right side when True
                y = int(rng.integers(0, side)) + (side if other else 0)
                while y == x:
                    y = int(rng.integers(0, side)) + (side if other else 0)
                c = count_typed_paths(g, x, y, (0,) * r)
                samples[r].append(c**power)
    out = {"ell": ell, "q": q, "power": power, "reference": 2 * ell * ell, "by_length": {}}
    for r, vals in samples.items():
        mean, err = _mean_stderr(vals)
        out["by_length"][r] = {"mean": mean, "stderr": err, "samples": len(vals),
                               "within_reference": mean <= 2 * ell * ell + 3 * err}
    out["within_reference"] = all(v["within_reference"] for v in out["by_length"].values())
    return out


def write_csv(rows: list[dict], path) -> None:
    if not rows:
        Path(path).write_text("")
        return
    fields = list(rows[0])
    for r in rows[1:]:
        fields += [k for k in r if k not in fields]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
