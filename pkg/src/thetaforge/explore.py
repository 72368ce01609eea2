"""Layered exploration certifier and theta embedding.

Starting from a root the host is explored in layers L_0 = {r}, L_1, ...,
L_ell. A path v_i v_{i+1} ... v_j with v_s in L_s is *linear*; P(v_i, v_j)
counts them. Table ``P[(i, j)]`` holds these counts for all of L_i x L_j and
is extended one layer at a time by a matrix product.

At each stage vertices of the newest layer reached by too many linear paths
(threshold R_m, Catalan weighted) are moved to a bad set together with those
having too many neighbours in the previous bad set. Each time such an
overload is found, :func:`embed_theta` tries to turn it into an explicit
Theta_{ell,t}. Every witness is checked by an independent validator before
it is returned.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .graph import BipartiteGraph, from_edges, induced_subgraph
from .theta import ThetaWitness, validate_witness

log = logging.getLogger(__name__)

DEFAULT_MAX_LINEAR_PATHS = 2 * 10**5
DEFAULT_EMBED_ATTEMPTS = 20


def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


def r_value(ell: int, t: int, m: int) -> int:
    """(2 ell)^m Catalan(m) t^m."""
    return (2 * ell) ** m * catalan(m) * t**m


@dataclass(frozen=True)
class Constants:
    """Thresholds used by the explorer. ``tau[0]`` and ``eta[0]`` are 0 placeholders."""

    ell: int
    t: int
    Delta: int
    R: tuple
    tau: tuple
    eta: tuple

    def r(self, m: int) -> int:
        return self.R[m] if m < len(self.R) else r_value(self.ell, self.t, m)

    def to_dict(self) -> dict:
        return {"ell": self.ell, "t": self.t, "Delta": self.Delta, "R": list(self.R),
                "tau": list(self.tau[1:]), "eta": list(self.eta[1:])}


def compute_constants(ell: int, t: int) -> Constants:
    if ell < 2 or t < 2:
        raise ValueError("need ell >= 2 and t >= 2")
    Delta = (20 * ell) ** (2 * ell)
    R = tuple(r_value(ell, t, m) for m in range(ell))
    tau = tuple(2 * ell * t * sum((i + 1) * Delta**i for i in range(j)) for j in range(ell))
    eta = tuple(sum((Delta + 1) * R[i] + 2 * (i + 1) * ell * t * Delta**i + tau[i]
                    for i in range(k - 1))
                for k in range(ell + 1))
    return Constants(ell, t, Delta, R, tau, eta)


# degree regularisation

def bipartize(n: int, edges) -> tuple[BipartiteGraph, int]:
    """Greedy max cut followed by single-vertex flips; keeps at least half the edges.

    Returns the bipartite graph (``origin`` maps back) and the number of
    edges dropped.
    """
    edges = [(int(u), int(v)) for u, v in edges if u != v]
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    side = [-1] * n
    for v in range(n):
        same = [0, 0]
        for u in adj[v]:
            if side[u] >= 0:
                same[side[u]] += 1
        side[v] = 0 if same[0] <= same[1] else 1
    improved = True
    while improved:
        improved = False
        for v in range(n):
            same = sum(1 for u in adj[v] if side[u] == side[v])
            if 2 * same > len(adj[v]):
                side[v] ^= 1
                improved = True
    kept = [(u, v) for u, v in edges if side[u] != side[v]]
    left = [v for v in range(n) if side[v] == 0]
    right = [v for v in range(n) if side[v] == 1]
    new_id = {v: i for i, v in enumerate(left + right)}
    g = BipartiteGraph(len(left), len(right), [(new_id[u], new_id[v]) for u, v in kept],
                       origin=left + right)
    return g, len(edges) - len(kept)


def as_bipartite(host) -> BipartiteGraph:
    """Accept a BipartiteGraph or an ``(n, edges)`` pair; reject odd cycles."""
    if isinstance(host, BipartiteGraph):
        return host
    n, edges = host
    return from_edges(edges, n)


def _peel(g: BipartiteGraph, threshold: int) -> BipartiteGraph:
    alive = np.ones(g.n, dtype=bool)
    deg = g.degrees().astype(np.int64)
    stack = [v for v in range(g.n) if deg[v] < threshold]
    for v in stack:
        alive[v] = False
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            if alive[u]:
                deg[u] -= 1
                if deg[u] < threshold:
                    alive[u] = False
                    stack.append(u)
    return induced_subgraph(g, np.nonzero(alive)[0].tolist())


@dataclass
class Regularized:
    graph: BipartiteGraph
    d_min: int
    d_max: int
    ok: bool
    failure: str | None
    report: dict


def regularize_degrees(host, ell: int, c: float | None = None, threshold: int | None = None,
                       Delta: int | None = None) -> Regularized:
    """Bipartize, peel low degrees, then trim degrees above ``Delta * min``.

    Peeling uses ``threshold`` or ceil(average degree / 2) of the bipartite
    graph, which cannot empty it. Failures (empty result, unmet edge-count
    precondition for the given ``c``) are reported, not raised.
    """
    if isinstance(host, BipartiteGraph):
        g, dropped = host, 0
        n0, e0 = host.n, host.num_edges
    else:
        n0, edges = host
        edges = list(edges)
        e0 = len(edges)
        g, dropped = bipartize(n0, edges)
    if n0 == 0:
        raise ValueError("empty host")
    Delta = (20 * ell) ** (2 * ell) if Delta is None else Delta
    avg = 2 * g.num_edges / g.n if g.n else 0.0
    thr = max(1, math.ceil(avg / 2)) if threshold is None else threshold
    report = {"input_vertices": n0, "input_edges": e0, "edges_dropped_by_cut": dropped,
              "average_degree": avg, "peel_threshold": thr, "Delta": Delta, "trim_rounds": 0}
    precondition = None
    if c is not None:
        need = 6 * ell * c * n0 ** (1 + 1 / ell)
        precondition = e0 >= need
        report["edge_precondition"] = {"c": c, "needed": need, "met": precondition}
    else:
        report["implied_c"] = e0 / (6 * ell * n0 ** (1 + 1 / ell))
    cur = _peel(g, thr)
    while cur.num_edges:
        degs = cur.degrees()
        lo = int(degs.min())
        high = np.nonzero(degs > Delta * lo)[0]
        if len(high) == 0:
            break
        report["trim_rounds"] += 1
        keep = np.setdiff1d(np.arange(cur.n), high)
        cur = _peel(induced_subgraph(cur, keep.tolist()), thr)
    if cur.num_edges == 0:
        report["output_vertices"] = 0
        return Regularized(cur, 0, 0, False, "peeling left no edges", report)
    degs = cur.degrees()
    d_min, d_max = int(degs.min()), int(degs.max())
    report.update(output_vertices=cur.n, output_edges=cur.num_edges, d_min=d_min, d_max=d_max)
    failure = None if precondition in (None, True) else "edge-count precondition unmet"
    return Regularized(cur, d_min, d_max, failure is None, failure, report)


# exploration

@dataclass
class ExplorationState:
    g: BipartiteGraph
    ell: int
    t: int
    root: int
    d: int
    max_degree: int
    layers: list = field(default_factory=list)
    bad: list = field(default_factory=list)  # bad[j - 1] is B_j
    P: dict = field(default_factory=dict)
    layer_of: np.ndarray | None = None
    bad_of: np.ndarray | None = None
    dtype: object = np.int64

    @property
    def stage(self) -> int:
        return len(self.layers) - 1

    def unexplored(self) -> np.ndarray:
        return np.nonzero((self.layer_of < 0) & (self.bad_of < 0))[0]

    def row(self, i: int) -> dict:
        return {int(v): r for r, v in enumerate(self.layers[i])}

    def count(self, i: int, u: int, j: int, v: int) -> int:
        if i == j:
            return int(u == v)
        return int(self.P[(i, j)][self.row(i)[u], self.row(j)[v]])

    def paths_from_root(self, k: int) -> int:
        if k == 0:
            return 1
        return int(self.P[(0, k)].sum())

    def children(self, v: int) -> list[int]:
        i = int(self.layer_of[v])
        return [u for u in self.g.neighbors(v) if self.layer_of[u] == i + 1]

    def parents(self, v: int) -> list[int]:
        i = int(self.layer_of[v])
        return [u for u in self.g.neighbors(v) if i > 0 and self.layer_of[u] == i - 1]


def _adjacency_block(g: BipartiteGraph, rows, cols, dtype) -> np.ndarray:
    col = {int(v): c for c, v in enumerate(cols)}
    A = np.zeros((len(rows), len(cols)), dtype=dtype)
    for r, v in enumerate(rows):
        for u in g.neighbors(int(v)):
            c = col.get(u)
            if c is not None:
                A[r, c] = 1
    return A


def _extend_tables(state: ExplorationState) -> None:
    k = state.stage
    A = _adjacency_block(state.g, state.layers[k - 1], state.layers[k], state.dtype)
    state.P[(k - 1, k)] = A
    for i in range(k - 1):
        state.P[(i, k)] = state.P[(i, k - 1)] @ A


def _set_layer(state: ExplorationState, k: int, verts) -> None:
    verts = np.array(sorted(int(v) for v in verts), dtype=np.int64)
    if k < len(state.layers):
        state.layer_of[state.layers[k]] = -1
        state.layers[k] = verts
    else:
        state.layers.append(verts)
    state.layer_of[verts] = k


def start_exploration(g: BipartiteGraph, root: int, ell: int, t: int,
                      d: int | None = None) -> ExplorationState:
    degs = g.degrees()
    max_deg = int(degs.max()) if g.n else 0
    # worst-case count is max_deg^ell; switch to Python ints if that may overflow
    dtype = np.int64 if max(max_deg, 1) ** ell < 2**62 else object
    state = ExplorationState(g, ell, t, int(root), int(degs.min()) if d is None else d, max_deg,
                             layer_of=np.full(g.n, -1, dtype=np.int64),
                             bad_of=np.full(g.n, -1, dtype=np.int64), dtype=dtype)
    _set_layer(state, 0, [root])
    _set_layer(state, 1, g.neighbors(root))
    _extend_tables(state)
    return state


def linear_path_counts_dfs(g: BipartiteGraph, layers, i: int, j: int) -> dict:
    """P(v_i, v_j) by walking explicit linear paths; reference for the tables."""
    member = {}
    for s, layer in enumerate(layers):
        for v in layer:
            member[int(v)] = s
    out = defaultdict(int)

    def walk(start, v, s):
        if s == j:
            out[(start, v)] += 1
            return
        for u in g.neighbors(v):
            if member.get(u) == s + 1:
                walk(start, u, s + 1)

    for v in layers[i]:
        walk(int(v), int(v), i)
    return dict(out)


@dataclass
class BadSet:
    k: int
    members: list
    levels: dict  # i -> sorted list B'_i
    by_anchor: dict  # (i, anchor) -> sorted list B'(anchor)
    paths_from_root: int
    level_paths: dict
    bound: int
    bound_ok: bool
    matches_definition: bool

    def to_dict(self) -> dict:
        return {"k": self.k, "size": len(self.members),
                "level_sizes": {str(i): len(v) for i, v in sorted(self.levels.items())},
                "paths_from_root": self.paths_from_root,
                "level_paths_from_root": {str(i): c for i, c in sorted(self.level_paths.items())},
                "bound": self.bound, "bound_ok": self.bound_ok,
                "matches_definition": self.matches_definition}


def compute_bad_set(state: ExplorationState, consts: Constants, k: int | None = None) -> BadSet:
    """Newest-layer vertices reached too often from an earlier layer.

    Levels run from i = k - 1 down to 1; level i looks at anchors in L_{i-1}
    with threshold R_{k-i} and skips vertices already taken by a later level.
    """
    k = state.stage if k is None else k
    Lk = state.layers[k]
    taken = np.zeros(len(Lk), dtype=bool)
    levels, by_anchor, level_paths = {}, {}, {}
    root_row = state.P[(0, k)][0] if k >= 1 else None
    for i in range(k - 1, 0, -1):
        M = state.P[(i - 1, k)]
        over = (M > consts.r(k - i)) & ~taken
        level = np.zeros(len(Lk), dtype=bool)
        for r in np.nonzero(over.any(axis=1))[0]:
            cols = np.nonzero(over[r])[0]
            by_anchor[(i, int(state.layers[i - 1][r]))] = [int(v) for v in Lk[cols]]
            level[cols] = True
        levels[i] = [int(v) for v in Lk[level]]
        level_paths[i] = int(root_row[level].sum())
        taken |= level
    # direct reading: some earlier layer vertex with P(v_i, v_k) > R_{k-i-1}
    direct = np.zeros(len(Lk), dtype=bool)
    for i in range(k):
        M = state.P[(i, k)]
        direct |= (M > consts.r(k - i - 1)).any(axis=0)
    members = [int(v) for v in Lk[taken]]
    p_root = int(root_row[taken].sum()) if k >= 1 else 0
    bound = 2 * k * consts.ell * consts.t * (consts.Delta * state.d) ** (k - 1)
    return BadSet(k, members, levels, by_anchor, p_root, level_paths, bound, p_root <= bound,
                  bool((direct == taken).all()))


@dataclass
class EmbedResult:
    witness: ThetaWitness | None
    part: str
    reason: str
    hypotheses: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"success": self.witness is not None, "part": self.part, "reason": self.reason,
                "hypotheses": self.hypotheses, "stats": self.stats,
                "witness": self.witness.to_dict() if self.witness else None}


def _linear_paths(state: ExplorationState, A, B, i: int, k: int, cap: int) -> list:
    targets = set(B)
    out = []

    def walk(path, s):
        v = path[-1]
        if s == k:
            if v in targets:
                out.append(tuple(path))
                if len(out) > cap:
                    raise OverflowError
            return
        for u in state.g.neighbors(v):
            if state.layer_of[u] == s + 1:
                path.append(u)
                walk(path, s + 1)
                path.pop()

    for a in sorted(A):
        walk([a], i)
    return out


def _spider(H: dict, root: int, legs: int, length: int) -> list | None:
    """``legs`` vertex-disjoint paths of ``length`` edges out of ``root``, greedily."""
    used = {root}
    out = []
    for _ in range(legs):
        leg = [root]
        for _ in range(length):
            nxt = next((u for u in H[leg[-1]] if u not in used), None)
            if nxt is None:
                return None
            leg.append(nxt)
            used.add(nxt)
        out.append(leg)
    return out


def embed_theta(state: ExplorationState, consts: Constants, anchor: int, A, B,
                k: int | None = None, max_paths: int = DEFAULT_MAX_LINEAR_PATHS) -> EmbedResult:
    """Try to build Theta_{ell,t} from many linear paths between ``A`` and ``B``.

    ``A`` holds children of ``anchor`` (in layer i), ``B`` lies in layer k.
    The path families are trimmed until every b keeps more than R_{k-i}/2
    paths and every prefix extends to at least ell*t paths. Then ell*t
    disjoint paths are fixed per b, a spider with t legs of length
    ell - k + i - 1 is grown in the bipartite graph between the last inner
    layer and the surviving b's, and each leg is joined back to A.
    """
    ell, t = consts.ell, consts.t
    lt = ell * t
    k = state.stage if k is None else k
    i = int(state.layer_of[anchor]) + 1
    A, B = sorted(set(int(a) for a in A)), sorted(set(int(b) for b in B))
    if not (1 <= i < k) or not A or not B:
        return EmbedResult(None, "input", "empty A or B, or anchor not before layer k")
    if any(state.layer_of[a] != i or not state.g.has_edge(anchor, a) for a in A):
        return EmbedResult(None, "input", "A must be children of the anchor")
    if any(state.layer_of[b] != k for b in B):
        return EmbedResult(None, "input", "B must lie in the newest layer")
    try:
        paths = _linear_paths(state, A, B, i, k, max_paths)
    except OverflowError:
        return EmbedResult(None, "input", f"more than {max_paths} linear paths")
    total = len(paths)
    Rki = consts.r(k - i)
    Dd = consts.Delta * state.d
    hyp = {"P_AB": total, "A": len(A), "B": len(B),
           "lower_A": 2 * lt * Dd ** (k - i - 1), "lower_B": Rki}
    hyp["per_A_ok"] = total > hyp["lower_A"] * len(A)
    hyp["per_B_ok"] = total > Rki * len(B)
    hyp["hold"] = hyp["per_A_ok"] and hyp["per_B_ok"]
    stats = {"i": i, "k": k, "anchor": anchor}

    # part 1: trimming
    live = set(paths)
    alive_b = set(B)
    removed_b = removed_prefix = 0
    prefixes_cut = 0
    changed = True
    while changed:
        changed = False
        per_b = defaultdict(list)
        for p in live:
            per_b[p[-1]].append(p)
        for b in sorted(alive_b):
            if 2 * len(per_b[b]) <= Rki:
                alive_b.discard(b)
                removed_b += len(per_b[b])
                live.difference_update(per_b[b])
                changed = True
        by_prefix = defaultdict(list)
        for p in live:
            by_prefix[p[:-1]].append(p)
        for pre, group in by_prefix.items():
            if len(group) < lt:
                live.difference_update(group)
                removed_prefix += len(group)
                prefixes_cut += 1
                changed = True
    stats.update(removed_by_b=removed_b, removed_by_prefix=removed_prefix,
                 prefixes_cut=prefixes_cut, surviving_b=len(alive_b), surviving_paths=len(live))
    guard = [removed_b <= len(B) * Rki / 2,
             removed_prefix <= prefixes_cut * (lt - 1)]
    if state.max_degree <= Dd:
        guard.append(prefixes_cut <= Dd ** (k - i - 1) * len(A))
    if hyp["hold"]:
        guard.append(removed_b + removed_prefix < total)
        guard.append(bool(alive_b))
    if not all(guard):
        return EmbedResult(None, "part1", "removal accounting guard failed", hyp, stats)
    if not alive_b:
        return EmbedResult(None, "part1", "trimming removed every b", hyp, stats)

    # part 2: ell*t disjoint paths into each surviving b
    per_b = defaultdict(list)
    for p in sorted(live):
        per_b[p[-1]].append(p)
    fans = {}
    cap = _exact_ratio(Rki, 2 * lt)
    worst = 0
    for b in sorted(alive_b):
        chosen, used = [], set()
        for p in per_b[b]:
            inner = set(p[:-1])
            hits = sum(1 for q in per_b[b] if inner & set(q[:-1]))
            worst = max(worst, hits)
            if hits > cap:
                stats["intersection_count"] = hits
                return EmbedResult(None, "part2", "intersection count above R/(2 ell t)", hyp, stats)
            if not inner & used:
                chosen.append(p)
                used |= inner
                if len(chosen) == lt:
                    break
        if len(chosen) < lt:
            return EmbedResult(None, "part2", f"only {len(chosen)} disjoint paths into {b}",
                               hyp, stats)
        fans[b] = chosen
    stats["max_intersections"] = worst

    # part 3: spider in H, then join legs back to A
    leg_len = ell - k + i - 1
    stats["spider_leg"] = leg_len
    if leg_len == 0:
        b = min(fans)
        legs = [[b] for _ in range(t)]
        ends = [b] * t
    else:
        S = sorted({p[-2] for p in live})
        Bs = sorted(alive_b)
        Sset, Bset = set(S), set(Bs)
        H = {v: [u for u in state.g.neighbors(v) if u in (Bset if v in Sset else Sset)]
             for v in S + Bs}
        low = min(len(nb) for nb in H.values())
        stats["H_min_degree"] = low
        if low < lt:
            return EmbedResult(None, "part3", f"H has minimum degree {low} < {lt}", hyp, stats)
        roots = Bs if leg_len % 2 == 0 else S
        legs = None
        for u in roots:
            legs = _spider(H, u, t, leg_len)
            if legs is not None:
                break
        if legs is None:
            return EmbedResult(None, "part3", "greedy spider embedding failed", hyp, stats)
        ends = [leg[-1] for leg in legs]
    blocked = {v for leg in legs for v in leg}
    theta_paths = []
    for leg, b in zip(legs, ends):
        pick = next((p for p in fans[b] if not (set(p[:-1]) & blocked)), None)
        if pick is None:
            return EmbedResult(None, "part3", f"no free path from {b} back to A", hyp, stats)
        blocked |= set(pick[:-1])
        # leg runs centre -> b; walk it backwards after reaching b
        theta_paths.append((anchor,) + pick + tuple(leg[-2::-1]))
    w = ThetaWitness(anchor, legs[0][0], tuple(theta_paths))
    try:
        validate_witness(state.g, w, ell, t)
    except ValueError as err:
        return EmbedResult(None, "validate", str(err), hyp, stats)
    return EmbedResult(w, "done", "embedded", hyp, stats)


def _exact_ratio(num: int, den: int):
    """num / den as an int when exact, else a float."""
    return num // den if num % den == 0 else num / den


# stage transitions and property checks

def check_properties(state: ExplorationState, consts: Constants) -> dict:
    """P1..P6 plus disjointness at the current stage. ``None`` means vacuous."""
    k = state.stage
    g, d = state.g, state.d
    out = {}
    out["P1"] = {"ok": len(state.layers[0]) == 1 and int(state.layers[0][0]) == state.root}
    orphans = [int(v) for s in range(1, k + 1) for v in state.layers[s]
               if not any(state.layer_of[u] == s - 1 for u in g.neighbors(int(v)))]
    out["P2"] = {"ok": not orphans, "violators": orphans[:10]}
    seen = np.zeros(g.n, dtype=np.int64)
    for s in state.layers + state.bad:
        seen[s] += 1
    out["disjoint"] = {"ok": bool((seen <= 1).all())}
    irregular = []
    for i in range(k):
        for j in range(i + 1, k):
            M = state.P[(i, j)]
            if M.size and int(M.max()) > consts.r(j - i - 1):
                irregular.append([i, j])
    out["P3"] = {"ok": not irregular, "irregular_pairs": irregular}
    big = [j for j in range(1, k) if len(state.bad[j - 1]) > consts.tau[j] * d ** (j - 1)]
    out["P4"] = {"ok": not big, "violating_levels": big}
    paths = state.paths_from_root(k)
    eta = consts.eta[k]
    if d > eta:
        lower = d ** (k - 1) * (d - eta)
        out["P5"] = {"ok": paths >= lower, "paths": paths, "lower": lower}
    else:
        out["P5"] = {"ok": None, "paths": paths, "reason": "d <= eta_k"}
    U = state.unexplored()
    in_U = np.zeros(g.n, dtype=bool)
    in_U[U] = True
    Bprev = np.zeros(g.n, dtype=bool)
    if k >= 2:
        Bprev[state.bad[k - 2]] = True
    short = []
    for v in state.layers[k]:
        cnt = sum(1 for u in g.neighbors(int(v))
                  if state.layer_of[u] == k - 1 or Bprev[u] or in_U[u])
        if cnt < d:
            short.append(int(v))
    for v in U:
        cnt = sum(1 for u in g.neighbors(int(v)) if state.layer_of[u] == k or in_U[u])
        if cnt < d:
            short.append(int(v))
    out["P6"] = {"ok": not short, "violators": short[:10]}
    return out


def _attempt_embeddings(state, consts, bad: BadSet, max_attempts: int) -> tuple[list, ThetaWitness | None]:
    attempts = []
    for (i, anchor), members in sorted(bad.by_anchor.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
        if len(attempts) >= max_attempts:
            break
        A = state.children(anchor)
        res = embed_theta(state, consts, anchor, A, members, bad.k)
        attempts.append(res.to_dict())
        if res.witness is not None:
            return attempts, res.witness
    return attempts, None


def explore_step(state: ExplorationState, consts: Constants, embed: bool = True,
                 max_attempts: int = DEFAULT_EMBED_ATTEMPTS) -> dict:
    """Move from stage k to k + 1 in place and return the stage record."""
    k = state.stage
    if k >= state.ell:
        raise ValueError("exploration already at the final stage")
    bad = compute_bad_set(state, consts, k)
    attempts, witness = ([], None)
    if embed and bad.members:
        attempts, witness = _attempt_embeddings(state, consts, bad, max_attempts)
    bprime = set(bad.members)
    bsecond = []
    if k >= 2:
        prev = np.zeros(state.g.n, dtype=bool)
        prev[state.bad[k - 2]] = True
        limit = consts.Delta * consts.r(k - 1)
        for v in state.layers[k]:
            v = int(v)
            if v not in bprime and sum(1 for u in state.g.neighbors(v) if prev[u]) >= limit:
                bsecond.append(v)
    Bk = np.array(sorted(bprime | set(bsecond)), dtype=np.int64)
    gone = set(Bk.tolist())
    survivors = [int(v) for v in state.layers[k] if int(v) not in gone]
    keep_cols = np.isin(state.layers[k], survivors)
    for i in range(k):
        state.P[(i, k)] = state.P[(i, k)][:, keep_cols]
    _set_layer(state, k, survivors)
    state.bad.append(Bk)
    state.bad_of[Bk] = k
    U = state.unexplored()
    in_U = np.zeros(state.g.n, dtype=bool)
    in_U[U] = True
    nxt = sorted({u for v in survivors for u in state.g.neighbors(v) if in_U[u]})
    _set_layer(state, k + 1, nxt)
    _extend_tables(state)
    record = {"from_stage": k, "B_prime": bad.to_dict(), "B_double_prime": len(bsecond),
              "B_size": len(Bk), "layer_sizes": [len(L) for L in state.layers],
              "paths_from_root": state.paths_from_root(k + 1),
              "checks": check_properties(state, consts),
              "embedding_attempts": attempts}
    if witness is not None:
        record["witness"] = witness
    return record


def pick_root(g: BipartiteGraph, policy="auto") -> int:
    if policy in (None, "auto"):
        degs = g.degrees()
        return int(np.argmax(degs))  # first maximum, i.e. smallest id on ties
    root = int(policy)
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range")
    return root


def component_of(g: BipartiteGraph, root: int) -> list[int]:
    seen = {root}
    queue = [root]
    for v in queue:
        for u in g.neighbors(v):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return sorted(seen)


@dataclass
class CertifierResult:
    certificate: dict
    witness: ThetaWitness | None
    state: ExplorationState | None


def _verdict(d, eta, paths_lower, upper):
    if d <= eta:
        return "vacuous"
    return "contradiction" if paths_lower > upper else "consistent"


def run_certifier(host, ell: int, t: int, root="auto", d: int | None = None,
                  embed: bool = True, max_attempts: int = DEFAULT_EMBED_ATTEMPTS) -> CertifierResult:
    """Run all ell stages from ``root`` and collect a JSON-ready certificate.

    The host is cut down to the root's component and ``d`` defaults to the
    minimum degree there. Witnesses are reported in the host's own ids.
    """
    g0 = as_bipartite(host)
    consts = compute_constants(ell, t)
    r0 = pick_root(g0, root)
    comp = component_of(g0, r0)
    g = induced_subgraph(g0, comp)
    r = comp.index(r0)
    cert = {"ell": ell, "t": t, "root": r0, "root_policy": str(root),
            "component_vertices": g.n, "component_edges": g.num_edges,
            "constants": consts.to_dict(), "stages": [], "witness": None}
    if g.num_edges == 0:
        cert.update(d=0, max_degree=0, final={"verdict": "vacuous", "reason": "isolated root"})
        return CertifierResult(cert, None, None)
    state = start_exploration(g, r, ell, t, d)
    cert.update(d=state.d, max_degree=state.max_degree)
    cert["stages"].append({"stage": 1, "layer_sizes": [1, len(state.layers[1])],
                           "paths_from_root": state.paths_from_root(1),
                           "checks": check_properties(state, consts)})
    witness = None
    while state.stage < ell:
        rec = explore_step(state, consts, embed and witness is None, max_attempts)
        rec["stage"] = state.stage
        witness = witness or rec.pop("witness", None)
        cert["stages"].append(rec)
        if len(state.layers[-1]) == 0:
            cert["exhausted_at"] = state.stage
            break
    k = state.stage
    final_bad = compute_bad_set(state, consts, k)
    final_attempts = []
    if embed and witness is None and final_bad.members:
        final_attempts, witness = _attempt_embeddings(state, consts, final_bad, max_attempts)
    eta = consts.eta[k]
    lower = state.d ** (k - 1) * (state.d - eta)
    observed = state.paths_from_root(k)
    upper = len(state.layers[k]) * consts.r(k - 1)
    cert["final"] = {
        "stage": k, "B_prime": final_bad.to_dict(), "embedding_attempts": final_attempts,
        "paths_from_root": observed, "lower_bound": lower if state.d > eta else None,
        "upper_bound": upper, "layer_size": len(state.layers[k]),
        "verdict": _verdict(state.d, eta, lower, upper),
    }
    cert["bad_set_bound_ok"] = all(s["B_prime"]["bound_ok"] for s in cert["stages"] if "B_prime" in s) \
        and final_bad.bound_ok
    cert["structural_ok"] = all(s["checks"][p]["ok"] for s in cert["stages"]
                                for p in ("P1", "P2", "disjoint"))
    if witness is not None:
        mapped = ThetaWitness(comp[witness.x], comp[witness.y],
                              tuple(tuple(comp[v] for v in p) for p in witness.paths))
        validate_witness(g0, mapped, ell, t)
        witness = mapped
        cert["witness"] = witness.to_dict()
    return CertifierResult(cert, witness, state)
