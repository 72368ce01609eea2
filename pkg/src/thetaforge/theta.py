"""Exact Theta_{ell,t} detection.

For a pair (x, y) all simple paths of length exactly ell are candidates; two
candidates conflict when they share an internal vertex. The largest set of
pairwise compatible candidates is found by branch-and-bound. Paths at the same
position through the same vertex form a clique, so the number of distinct
vertices seen at any one position bounds the packing from above.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .graph import BipartiteGraph

DEFAULT_MAX_CANDIDATES = 10**5
DEFAULT_NODE_BUDGET = 10**6
ORACLE_MAX_VERTICES = 12
ORACLE_MAX_CANDIDATES = 20


class CandidateCapExceeded(RuntimeError):
    def __init__(self, x, y, cap):
        super().__init__(f"pair ({x}, {y}) has more than {cap} candidate paths")
        self.x, self.y, self.cap = x, y, cap


@dataclass(frozen=True)
class ThetaWitness:
    x: int
    y: int
    paths: tuple

    @property
    def t(self) -> int:
        return len(self.paths)

    @property
    def ell(self) -> int:
        return len(self.paths[0]) - 1 if self.paths else 0

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "ell": self.ell, "t": self.t,
                "paths": [list(p) for p in self.paths]}


def validate_witness(g: BipartiteGraph, w: ThetaWitness, ell: int | None = None,
                     t: int | None = None) -> None:
    """Raise ValueError unless ``w`` is a genuine theta subgraph of ``g``."""
    if w.x == w.y:
        raise ValueError("endpoints coincide")
    if t is not None and len(w.paths) < t:
        raise ValueError(f"only {len(w.paths)} paths, need {t}")
    if not w.paths:
        raise ValueError("no paths")
    used = set()
    for p in w.paths:
        if p[0] != w.x or p[-1] != w.y:
            raise ValueError(f"path {p} does not join {w.x} and {w.y}")
        if ell is not None and len(p) - 1 != ell:
            raise ValueError(f"path {p} has length {len(p) - 1}, want {ell}")
        if len(set(p)) != len(p):
            raise ValueError(f"path {p} repeats a vertex")
        for a, b in zip(p, p[1:]):
            if not g.has_edge(a, b):
                raise ValueError(f"{a}-{b} is not an edge")
        inner = set(p[1:-1])
        if inner & used:
            raise ValueError(f"path {p} meets an earlier path internally")
        used |= inner
    lengths = {len(p) for p in w.paths}
    if len(lengths) != 1:
        raise ValueError("paths differ in length")


def is_valid_witness(g, w, ell=None, t=None) -> bool:
    try:
        validate_witness(g, w, ell, t)
    except ValueError:
        return False
    return True


@dataclass
class PackingInstance:
    x: int
    y: int
    ell: int
    paths: list = field(default_factory=list)
    conflicts: list = field(default_factory=list)  # bitmask per candidate

    def __len__(self):
        return len(self.paths)

    def conflict_pairs(self) -> set:
        out = set()
        for i, mask in enumerate(self.conflicts):
            j = 0
            while mask:
                if mask & 1:
                    out.add((i, j))
                mask >>= 1
                j += 1
        return out

    def groups(self) -> list[list[int]]:
        """Per internal position, bitmasks of candidates through each vertex."""
        out = []
        for pos in range(1, self.ell):
            by_vertex = defaultdict(int)
            for i, p in enumerate(self.paths):
                by_vertex[p[pos]] |= 1 << i
            out.append(sorted(by_vertex.values()))
        return out


def _build_conflicts(paths) -> list[int]:
    through = defaultdict(int)
    for i, p in enumerate(paths):
        for v in p[1:-1]:
            through[v] |= 1 << i
    masks = []
    for i, p in enumerate(paths):
        m = 0
        for v in p[1:-1]:
            m |= through[v]
        masks.append(m & ~(1 << i))
    return masks


def _distances_to(g: BipartiteGraph, y: int, limit: int) -> dict[int, int]:
    dist = {y: 0}
    frontier = [y]
    for d in range(1, limit + 1):
        nxt = []
        for v in frontier:
            for u in g.neighbors(v):
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


def enumerate_exact_paths(g: BipartiteGraph, x: int, y: int, ell: int,
                          max_candidates: int = DEFAULT_MAX_CANDIDATES) -> PackingInstance:
    """All simple x-y paths with exactly ``ell`` edges, plus their conflicts."""
    if x == y:
        raise ValueError("endpoints must differ")
    if ell < 1:
        raise ValueError("ell must be positive")
    inst = PackingInstance(x, y, ell)
    if g.same_side(x, y) != (ell % 2 == 0):
        return inst
    dist = _distances_to(g, y, ell)
    if dist.get(x, ell + 1) > ell:
        return inst
    stack = [x]
    onpath = {x, y}
    paths = inst.paths

    def dfs(v, left):
        # left = edges still to place after v
        if left == 1:
            if g.has_edge(v, y):
                paths.append(tuple(stack) + (y,))
                if len(paths) > max_candidates:
                    raise CandidateCapExceeded(x, y, max_candidates)
            return
        for u in g.neighbors(v):
            if u in onpath or dist.get(u, ell + 1) > left - 1:
                continue
            onpath.add(u)
            stack.append(u)
            dfs(u, left - 1)
            stack.pop()
            onpath.discard(u)

    dfs(x, ell)
    inst.conflicts = _build_conflicts(paths)
    return inst


@dataclass
class PackingResult:
    size: int
    chosen: list
    exact: bool
    nodes: int

    def paths(self, inst: PackingInstance) -> list:
        return [inst.paths[i] for i in self.chosen]


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _greedy(inst: PackingInstance) -> list[int]:
    order = sorted(range(len(inst)), key=lambda i: (bin(inst.conflicts[i]).count("1"), i))
    chosen, blocked = [], 0
    for i in order:
        if not blocked >> i & 1:
            chosen.append(i)
            blocked |= inst.conflicts[i] | (1 << i)
    return chosen


def max_disjoint_packing(inst: PackingInstance, node_budget: int = DEFAULT_NODE_BUDGET,
                         target: int | None = None) -> PackingResult:
    """Largest set of internally disjoint candidates.

    With ``target`` the search stops as soon as a packing of that size is
    found; the result is then exact as a yes-answer. When the node budget runs
    out the best packing so far is returned with ``exact=False``.
    """
    n = len(inst)
    if n == 0:
        return PackingResult(0, [], True, 0)
    best = _greedy(inst)
    if inst.ell <= 1 or (target is not None and len(best) >= target):
        return PackingResult(len(best), best, True, 0)
    groups = inst.groups()
    conflicts = inst.conflicts
    state = {"best": best, "nodes": 0, "stop": False}

    def bound(avail):
        lo, pick = None, None
        for pos_groups in groups:
            live = [m & avail for m in pos_groups]
            live = [m for m in live if m]
            if lo is None or len(live) < lo:
                lo, pick = len(live), live
        return lo, pick

    def search(avail, chosen):
        if state["stop"]:
            return
        state["nodes"] += 1
        if state["nodes"] > node_budget:
            state["stop"] = "budget"
            return
        if not avail:
            if len(chosen) > len(state["best"]):
                state["best"] = list(chosen)
                if target is not None and len(chosen) >= target:
                    state["stop"] = "target"
            return
        ub, live = bound(avail)
        if len(chosen) + ub <= len(state["best"]):
            return
        # branch on the busiest vertex at the tightest position
        clique = max(live, key=lambda m: (bin(m).count("1"), -m))
        for i in _bits(clique):
            chosen.append(i)
            search(avail & ~conflicts[i] & ~(1 << i) & ~clique, chosen)
            chosen.pop()
            if state["stop"]:
                return
        search(avail & ~clique, chosen)

    search((1 << n) - 1, [])
    best = sorted(state["best"])
    exact = state["stop"] != "budget"
    return PackingResult(len(best), best, exact, state["nodes"])


def packing_number(g: BipartiteGraph, x: int, y: int, ell: int) -> int:
    return max_disjoint_packing(enumerate_exact_paths(g, x, y, ell)).size


@dataclass
class ThetaResult:
    ell: int
    t: int
    witness: ThetaWitness | None = None
    exact: bool = True
    pair_maxima: dict = field(default_factory=dict)
    inconclusive: list = field(default_factory=list)
    pairs_scanned: int = 0
    pairs_pruned: int = 0
    pruned_bound: int = 0
    seconds: float = 0.0

    @property
    def found(self) -> bool:
        return self.witness is not None

    @property
    def free(self) -> bool:
        return self.witness is None and self.exact

    def histogram(self) -> dict:
        return dict(sorted(Counter(self.pair_maxima.values()).items()))

    def max_packing(self) -> int:
        return max(self.pair_maxima.values(), default=0)

    def certificate(self) -> dict:
        return {
            "ell": self.ell, "t": self.t,
            "verdict": "theta" if self.found else ("free" if self.exact else "inconclusive"),
            "exact": self.exact,
            "witness": self.witness.to_dict() if self.witness else None,
            "pairs_scanned": self.pairs_scanned,
            "pairs_pruned": self.pairs_pruned,
            "pruned_candidate_bound": self.pruned_bound,
            "pair_maxima_histogram": {str(k): v for k, v in self.histogram().items()},
            "max_packing": self.max_packing(),
            "inconclusive": self.inconclusive,
            "seconds": round(self.seconds, 3),
        }


def exact_length_counts(g: BipartiteGraph, x: int, ell: int) -> dict[int, int]:
    """Number of simple paths of exactly ``ell`` edges from ``x`` to each vertex."""
    counts = defaultdict(int)
    onpath = bytearray(g.n)
    onpath[x] = 1
    adj = g._adj

    def dfs(v, left):
        for u in adj[v]:
            if onpath[u]:
                continue
            if left == 1:
                counts[u] += 1
            else:
                onpath[u] = 1
                dfs(u, left - 1)
                onpath[u] = 0

    dfs(x, ell)
    return counts


def contains_theta(g: BipartiteGraph, ell: int, t: int,
                   max_candidates: int = DEFAULT_MAX_CANDIDATES,
                   node_budget: int = DEFAULT_NODE_BUDGET,
                   full_maxima: bool = False) -> ThetaResult:
    """Search every admissible pair for ``t`` internally disjoint length-``ell`` paths.

    Pairs with fewer than ``t`` candidates (or an endpoint of degree < t) are
    skipped unless ``full_maxima``; they cannot host the theta. Remaining
    pairs go in descending candidate count order.
    """
    if ell < 1 or t < 1:
        raise ValueError("need ell >= 1 and t >= 1")
    start = time.perf_counter()
    res = ThetaResult(ell, t)
    degs = g.degrees()
    pairs = []
    for x in range(g.n):
        if degs[x] == 0 or (degs[x] < t and not full_maxima):
            continue
        for y, c in exact_length_counts(g, x, ell).items():
            if y <= x:
                continue
            if full_maxima or (c >= t and degs[y] >= t):
                pairs.append((-c, x, y))
            else:
                res.pairs_pruned += 1
                res.pruned_bound = max(res.pruned_bound, min(c, int(degs[x]), int(degs[y])))
    pairs.sort()
    for _, x, y in pairs:
        res.pairs_scanned += 1
        try:
            inst = enumerate_exact_paths(g, x, y, ell, max_candidates)
        except CandidateCapExceeded as err:
            res.exact = False
            res.inconclusive.append({"pair": [x, y], "reason": str(err)})
            continue
        pk = max_disjoint_packing(inst, node_budget, target=None if full_maxima else t)
        res.pair_maxima[(x, y)] = pk.size
        if not pk.exact:
            res.exact = False
            res.inconclusive.append({"pair": [x, y], "reason": "node budget exhausted",
                                     "lower_bound": pk.size})
        if pk.size >= t and res.witness is None:
            w = ThetaWitness(x, y, tuple(pk.paths(inst)[:t]))
            validate_witness(g, w, ell, t)
            res.witness = w
            if not full_maxima:
                break
    res.seconds = time.perf_counter() - start
    return res


def brute_force_theta_oracle(g: BipartiteGraph, ell: int, t: int) -> ThetaResult:
    """Reference answer by exhaustive enumeration, for tiny graphs only.

    Candidates come from all ordered choices of ``ell - 1`` internal vertices;
    the packing number is the largest subset size whose members are pairwise
    internally disjoint, tried in increasing size.
    """
    if g.n > ORACLE_MAX_VERTICES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_VERTICES} vertices")
    res = ThetaResult(ell, t)
    edges = set(g.edges())
    adjacent = lambda a, b: (min(a, b), max(a, b)) in edges
    for x, y in itertools.combinations(range(g.n), 2):
        others = [v for v in range(g.n) if v not in (x, y)]
        cands = []
        for inner in itertools.permutations(others, ell - 1):
            seq = (x,) + inner + (y,)
            if all(adjacent(a, b) for a, b in zip(seq, seq[1:])):
                cands.append(seq)
        if len(cands) > ORACLE_MAX_CANDIDATES:
            raise ValueError(f"pair ({x}, {y}) has {len(cands)} candidates, oracle cap is "
                             f"{ORACLE_MAX_CANDIDATES}")
        res.pairs_scanned += 1
        best = ()
        # feasibility is monotone in subset size, so stop at the first failure
        for size in range(1, len(cands) + 1):
            hit = None
            for combo in itertools.combinations(cands, size):
                inner_sets = [set(p[1:-1]) for p in combo]
                if sum(map(len, inner_sets)) == len(set().union(*inner_sets)):
                    hit = combo
                    break
            if hit is None:
                break
            best = hit
        res.pair_maxima[(x, y)] = len(best)
        if len(best) >= t and res.witness is None:
            res.witness = ThetaWitness(x, y, tuple(best[:t]))
    return res
