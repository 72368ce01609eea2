"""Bipartite (multi)graphs: path counting, bad pairs, blowups and unions.

Vertices are dense integer ids. The left part is ``0 .. left_count - 1`` and
the right part follows it. Per-vertex neighbour tuples are sorted. Edge
multiplicity is optional; when present a path's weight is the product of the
multiplicities of its edges.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAX_VERTICES = 10**5


class BipartiteGraph:
    """Immutable bipartite graph with optional multiplicities and provenance.

    ``labels`` holds one coordinate tuple per vertex (or None),
    ``supervertex`` maps each vertex of a blowup to its quotient vertex,
    ``origin`` records the vertex id in the graph this one was cut from, and
    ``edge_tags`` lists, per edge, which constituent graphs of a union carry it.
    """

    def __init__(self, left_count: int, right_count: int, edges: Iterable[tuple[int, int]] = (),
                 mult: Iterable[int] | None = None, labels=None, supervertex=None,
                 origin=None, edge_tags=None, meta: dict | None = None):
        if left_count < 0 or right_count < 0:
            raise ValueError("part sizes must be non-negative")
        self.left_count = int(left_count)
        self.right_count = int(right_count)
        n = self.left_count + self.right_count
        edge_list = []
        for u, v in edges:
            u, v = int(u), int(v)
            if u > v:
                u, v = v, u
            if not (0 <= u < self.left_count <= v < n):
                raise ValueError(f"edge ({u}, {v}) does not join the two parts")
            edge_list.append((u, v))
        mult_list = None if mult is None else [int(w) for w in mult]
        tag_list = None if edge_tags is None else [tuple(t) for t in edge_tags]
        if mult_list is not None and len(mult_list) != len(edge_list):
            raise ValueError("multiplicity list does not match edge list")
        if tag_list is not None and len(tag_list) != len(edge_list):
            raise ValueError("edge tag list does not match edge list")
        order = sorted(range(len(edge_list)), key=edge_list.__getitem__)
        self._edges = [edge_list[i] for i in order]
        if len(set(self._edges)) != len(self._edges):
            raise ValueError("duplicate edges; pass multiplicities instead")
        if mult_list is not None:
            mult_list = [mult_list[i] for i in order]
            if any(w < 1 for w in mult_list):
                raise ValueError("multiplicities must be >= 1")
            if all(w == 1 for w in mult_list):
                mult_list = None
        self._mult = mult_list
        self._tags = None if tag_list is None else [tag_list[i] for i in order]
        self._index = {e: i for i, e in enumerate(self._edges)}

        nbrs = [[] for _ in range(n)]
        wts = [[] for _ in range(n)] if self._mult is not None else None
        for i, (u, v) in enumerate(self._edges):
            nbrs[u].append(v)
            nbrs[v].append(u)
            if wts is not None:
                wts[u].append(self._mult[i])
                wts[v].append(self._mult[i])
        if wts is None:
            self._adj = tuple(tuple(sorted(a)) for a in nbrs)
            self._adj_w = None
        else:
            adj, adj_w = [], []
            for a, w in zip(nbrs, wts):
                pairs = sorted(zip(a, w))
                adj.append(tuple(x for x, _ in pairs))
                adj_w.append(tuple(y for _, y in pairs))
            self._adj, self._adj_w = tuple(adj), tuple(adj_w)

        self.labels = None if labels is None else np.asarray(labels)
        self.supervertex = None if supervertex is None else np.asarray(supervertex, dtype=np.int64)
        self.origin = None if origin is None else np.asarray(origin, dtype=np.int64)
        for name in ("labels", "supervertex", "origin"):
            arr = getattr(self, name)
            if arr is not None:
                if len(arr) != n:
                    raise ValueError(f"{name} must have one entry per vertex")
                arr.setflags(write=False)
        self.meta = dict(meta or {})

    # basic queries

    @property
    def n(self) -> int:
        return self.left_count + self.right_count

    def __len__(self):
        return self.n

    def __repr__(self):
        kind = "multigraph" if self.is_multigraph else "graph"
        return (f"BipartiteGraph({kind}, sides={self.left_count},{self.right_count}, "
                f"edges={self.num_edges})")

    @property
    def is_multigraph(self) -> bool:
        return self._mult is not None

    @property
    def num_edges(self) -> int:
        """Number of distinct edges."""
        return len(self._edges)

    @property
    def total_multiplicity(self) -> int:
        return len(self._edges) if self._mult is None else sum(self._mult)

    def edges(self) -> list[tuple[int, int]]:
        return list(self._edges)

    def edge_multiplicities(self) -> list[int]:
        return [1] * len(self._edges) if self._mult is None else list(self._mult)

    def edge_tags(self) -> list[tuple[int, ...]] | None:
        return None if self._tags is None else list(self._tags)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._index

    def multiplicity(self, u: int, v: int) -> int:
        i = self._index.get((min(u, v), max(u, v)))
        if i is None:
            return 0
        return 1 if self._mult is None else self._mult[i]

    def tags(self, u: int, v: int) -> tuple[int, ...]:
        i = self._index.get((min(u, v), max(u, v)))
        if i is None or self._tags is None:
            return ()
        return self._tags[i]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=np.int64)

    def is_left(self, v: int) -> bool:
        return v < self.left_count

    def side(self, v: int) -> int:
        return 0 if v < self.left_count else 1

    def same_side(self, u: int, v: int) -> bool:
        return (u < self.left_count) == (v < self.left_count)

    def to_dense(self, weighted: bool = True) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for (u, v), w in zip(self._edges, self.edge_multiplicities()):
            a[u, v] = a[v, u] = w if weighted else 1
        return a

    def same_edges(self, other: BipartiteGraph) -> bool:
        return (self.left_count == other.left_count and self.right_count == other.right_count
                and self._edges == other._edges
                and self.edge_multiplicities() == other.edge_multiplicities())

    def with_meta(self, **updates) -> BipartiteGraph:
        meta = dict(self.meta)
        meta.update(updates)
        return BipartiteGraph(self.left_count, self.right_count, self._edges, self._mult,
                              self.labels, self.supervertex, self.origin, self._tags, meta)


@dataclass
class PathList:
    x: int
    y: int
    paths: list[tuple[int, ...]] = field(default_factory=list)

    def __len__(self):
        return len(self.paths)

    def validate(self, g: BipartiteGraph, max_len: int | None = None, exact: bool = False) -> None:
        for p in self.paths:
            if p[0] != self.x or p[-1] != self.y:
                raise AssertionError(f"{p} does not run from {self.x} to {self.y}")
            if not is_path(g, p):
                raise AssertionError(f"{p} is not a path")
            length = len(p) - 1
            if max_len is not None and (length > max_len or (exact and length != max_len)):
                raise AssertionError(f"{p} has length {length}")


def is_path(g: BipartiteGraph, seq: Sequence[int]) -> bool:
    if len(seq) < 1 or len(set(seq)) != len(seq):
        return False
    return all(g.has_edge(a, b) for a, b in zip(seq, seq[1:]))


def _check_parity(g: BipartiteGraph, x: int, y: int, length: int) -> None:
    assert (length % 2 == 0) == g.same_side(x, y), "bipartite parity violated"


def path_counts_from(g: BipartiteGraph, x: int, max_len: int, weighted: bool = True) -> dict[int, int]:
    """Simple paths of length 1..max_len from ``x``, summed per endpoint.

    With ``weighted`` a path on a multigraph counts the product of its edge
    multiplicities.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    adj = g._adj
    adj_w = g._adj_w if weighted else None
    counts: dict[int, int] = defaultdict(int)
    onpath = bytearray(g.n)
    onpath[x] = 1

    def dfs(v, depth, w):
        # depth = edges on the current path from x to v
        nbrs = adj[v]
        for i in range(len(nbrs)):
            u = nbrs[i]
            if onpath[u]:
                continue
            uw = w * adj_w[v][i] if adj_w is not None else w
            counts[u] += uw
            if depth + 1 < max_len:
                onpath[u] = 1
                dfs(u, depth + 1, uw)
                onpath[u] = 0

    dfs(x, 0, 1)
    return counts


def count_paths_upto(g: BipartiteGraph, x: int, y: int, max_len: int, weighted: bool = True) -> int:
    """Number of simple x-y paths of length at most ``max_len``."""
    if x == y:
        raise ValueError("endpoints must differ")
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    return path_counts_from(g, x, max_len, weighted).get(y, 0)


def paths_between(g: BipartiteGraph, x: int, y: int, max_len: int, exact: bool = False) -> PathList:
    """Enumerate simple x-y paths of length <= max_len (or == max_len with ``exact``)."""
    if x == y:
        raise ValueError("endpoints must differ")
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    adj = g._adj
    out = PathList(x, y)
    onpath = bytearray(g.n)
    stack = [x]
    onpath[x] = 1

    def dfs(v):
        depth = len(stack) - 1
        for u in adj[v]:
            if onpath[u]:
                continue
            if u == y:
                if not exact or depth + 1 == max_len:
                    _check_parity(g, x, y, depth + 1)
                    out.paths.append(tuple(stack) + (y,))
                continue
            if depth + 1 < max_len:
                onpath[u] = 1
                stack.append(u)
                dfs(u)
                stack.pop()
                onpath[u] = 0

    dfs(x)
    return out


def all_pair_counts(g: BipartiteGraph, max_len: int, weighted: bool = True,
                    sources: Iterable[int] | None = None):
    """Yield ``(x, y, count)`` for x < y with at least one path of length <= max_len.

    When ``sources`` is given only pairs with an endpoint among them are
    produced (each pair once, keyed by its source).
    """
    if sources is None:
        for x in range(g.n):
            for y, c in path_counts_from(g, x, max_len, weighted).items():
                if y > x:
                    yield x, y, c
    else:
        seen = set()
        for x in sources:
            for y, c in path_counts_from(g, x, max_len, weighted).items():
                key = (min(x, y), max(x, y))
                if key not in seen:
                    seen.add(key)
                    yield key[0], key[1], c


def find_bad_pairs(g: BipartiteGraph, threshold: int, max_len: int, cross_only: bool = False,
                   weighted: bool = True, sample_sources: int | None = None,
                   seed=None) -> set[tuple[int, int]]:
    """Pairs ``(x, y)``, x < y, joined by at least ``threshold`` paths of length <= max_len.

    ``sample_sources`` restricts the scan to that many random source vertices
    (seeded), for graphs too large for a full scan.
    """
    sources = None
    if sample_sources is not None and sample_sources < g.n:
        rng = np.random.default_rng(seed)
        sources = sorted(rng.choice(g.n, size=sample_sources, replace=False).tolist())
    bad = set()
    for x, y, c in all_pair_counts(g, max_len, weighted, sources):
        if c >= threshold and not (cross_only and g.same_side(x, y)):
            bad.add((x, y))
    return bad


def induced_subgraph(g: BipartiteGraph, keep: Iterable[int]) -> BipartiteGraph:
    """Subgraph induced on ``keep``; ids are renumbered, ``origin`` tracks the old ones."""
    keep = sorted(set(int(v) for v in keep))
    left = [v for v in keep if v < g.left_count]
    right = [v for v in keep if v >= g.left_count]
    order = left + right
    new_id = {v: i for i, v in enumerate(order)}
    edges, mult, tags = [], [], []
    mults = g.edge_multiplicities()
    for i, (u, v) in enumerate(g._edges):
        if u in new_id and v in new_id:
            edges.append((new_id[u], new_id[v]))
            mult.append(mults[i])
            if g._tags is not None:
                tags.append(g._tags[i])
    idx = np.array(order, dtype=np.int64)
    origin = idx if g.origin is None else g.origin[idx]
    return BipartiteGraph(
        len(left), len(right), edges, mult,
        labels=None if g.labels is None else g.labels[idx],
        supervertex=None if g.supervertex is None else g.supervertex[idx],
        origin=origin,
        edge_tags=tags if g._tags is not None else None,
        meta=g.meta)


def remove_bad_pairs(g: BipartiteGraph, pairs: Iterable[tuple[int, int]]) -> tuple[BipartiteGraph, int]:
    """Delete both endpoints of every pair. Returns the graph and the number of edges lost."""
    doomed = set()
    for x, y in pairs:
        doomed.add(int(x))
        doomed.add(int(y))
    if not doomed:
        return g, 0
    h = induced_subgraph(g, (v for v in range(g.n) if v not in doomed))
    return h, g.num_edges - h.num_edges


def blowup(g: BipartiteGraph, m: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> BipartiteGraph:
    """Replace each vertex by ``m`` independent copies and each edge by K_{m,m}.

    Copy ``c`` of vertex ``v`` gets id ``v*m + c``, which keeps the left part first.
    """
    if m < 1:
        raise ValueError("blowup factor must be >= 1")
    if g.n * m > max_vertices:
        raise ValueError(f"blowup would have {g.n * m} vertices, cap is {max_vertices}")
    edges, mult = [], []
    for (u, v), w in zip(g._edges, g.edge_multiplicities()):
        for a in range(m):
            for b in range(m):
                edges.append((u * m + a, v * m + b))
                mult.append(w)
    sv = np.repeat(np.arange(g.n, dtype=np.int64), m)
    labels = None if g.labels is None else np.repeat(g.labels, m, axis=0)
    meta = dict(g.meta)
    meta["blowup_m"] = m
    return BipartiteGraph(g.left_count * m, g.right_count * m, edges, mult,
                          labels=labels, supervertex=sv, meta=meta)


def quotient(g: BipartiteGraph) -> BipartiteGraph:
    """Collapse each supervertex class to one vertex (requires an exact blowup)."""
    if g.supervertex is None:
        raise ValueError("graph has no supervertex map")
    sv = g.supervertex.tolist()
    left_sv = sorted({sv[v] for v in range(g.left_count)})
    right_sv = sorted({sv[v] for v in range(g.left_count, g.n)})
    if set(left_sv) & set(right_sv):
        raise ValueError("a supervertex spans both parts")
    new_id = {s: i for i, s in enumerate(left_sv + right_sv)}
    blocks = Counter()
    weight = {}
    for (u, v), w in zip(g._edges, g.edge_multiplicities()):
        key = (new_id[sv[u]], new_id[sv[v]])
        blocks[key] += 1
        if weight.setdefault(key, w) != w:
            raise ValueError("multiplicities differ inside one block")
    sizes = Counter(sv)
    inv = {i: s for s, i in new_id.items()}
    for (a, b), cnt in blocks.items():
        if cnt != sizes[inv[a]] * sizes[inv[b]]:
            raise ValueError("not an exact blowup: incomplete block")
    keys = sorted(blocks)
    return BipartiteGraph(len(left_sv), len(right_sv), keys, [weight[k] for k in keys],
                          meta=g.meta)


def is_exact_blowup(g: BipartiteGraph) -> bool:
    try:
        quotient(g)
    except ValueError:
        return False
    return True


def union_multigraph(graphs: Sequence[BipartiteGraph]) -> BipartiteGraph:
    """Multiplicity-preserving union of graphs on a common vertex set.

    Each edge carries the tuple of indices of the graphs containing it.
    """
    if not graphs:
        raise ValueError("need at least one graph")
    first = graphs[0]
    for h in graphs[1:]:
        if (h.left_count, h.right_count) != (first.left_count, first.right_count):
            raise ValueError("graphs must share one vertex set")
    tags = defaultdict(list)
    for i, h in enumerate(graphs):
        for e, w in zip(h._edges, h.edge_multiplicities()):
            tags[e].extend([i] * w)
    keys = sorted(tags)
    meta = dict(first.meta)
    meta["union_of"] = len(graphs)
    return BipartiteGraph(first.left_count, first.right_count, keys,
                          [len(tags[k]) for k in keys], labels=first.labels,
                          edge_tags=[tuple(tags[k]) for k in keys], meta=meta)


def simplify(g: BipartiteGraph) -> tuple[BipartiteGraph, int]:
    """Collapse multiplicities to 1. Returns the simple graph and the excess slots M."""
    excess = g.total_multiplicity - g.num_edges
    h = BipartiteGraph(g.left_count, g.right_count, g._edges, None, labels=g.labels,
                       supervertex=g.supervertex, origin=g.origin, edge_tags=g._tags,
                       meta=g.meta)
    return h, excess


def loop_erase(walk: Sequence[int]) -> tuple[int, ...]:
    """Chronological loop erasure of a walk."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in walk:
        if v in pos:
            cut = pos[v] + 1
            for u in out[cut:]:
                del pos[u]
            del out[cut:]
        else:
            pos[v] = len(out)
            out.append(v)
    return tuple(out)


def project_to_supergraph(g: BipartiteGraph, path: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Map a path of a blowup to its quotient walk and the loop-erased quotient path."""
    if g.supervertex is None:
        raise ValueError("graph has no supervertex map")
    if not is_path(g, path):
        raise ValueError(f"{tuple(path)} is not a path in the graph")
    walk = tuple(int(g.supervertex[v]) for v in path)
    return walk, loop_erase(walk)


def graph_report(g: BipartiteGraph) -> dict:
    hist = Counter(g.edge_multiplicities())
    degs = g.degrees()
    return {
        "sides": [g.left_count, g.right_count],
        "vertices": g.n,
        "edges": g.num_edges,
        "total_multiplicity": g.total_multiplicity,
        "multiplicity_histogram": {str(k): v for k, v in sorted(hist.items())},
        "min_degree": int(degs.min()) if g.n else 0,
        "max_degree": int(degs.max()) if g.n else 0,
        "provenance": _jsonable(g.meta),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def complete_bipartite(a: int, b: int) -> BipartiteGraph:
    return BipartiteGraph(a, b, [(u, a + v) for u in range(a) for v in range(b)])


def even_cycle(length: int) -> BipartiteGraph:
    """C_length on alternating sides; cycle order is 0, L, 1, L+1, ..."""
    if length < 4 or length % 2:
        raise ValueError("even cycle needs even length >= 4")
    half = length // 2
    edges = []
    for i in range(half):
        edges.append((i, half + i))
        edges.append((half + i, (i + 1) % half))
    return BipartiteGraph(half, half, edges)


def random_bipartite(left: int, right: int, p: float, rng: np.random.Generator) -> BipartiteGraph:
    mask = rng.random((left, right)) < p
    us, vs = np.nonzero(mask)
    return BipartiteGraph(left, right, zip(us.tolist(), (vs + left).tolist()))


def two_colouring(n: int, edges: Iterable[tuple[int, int]]) -> list[int] | None:
    """Side (0/1) per vertex via BFS, or None when some cycle is odd."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    side = [-1] * n
    for s in range(n):
        if side[s] >= 0:
            continue
        side[s] = 0
        queue = [s]
        for v in queue:
            for u in adj[v]:
                if side[u] < 0:
                    side[u] = 1 - side[v]
                    queue.append(u)
                elif side[u] == side[v]:
                    return None
    return side


def from_edges(edges: Iterable[tuple[int, int]], n: int | None = None) -> BipartiteGraph:
    """Bipartite graph from an arbitrary edge list on ids ``0..n-1``.

    Sides come from a BFS 2-colouring (each component's smallest id goes
    left). ``origin`` maps new ids back to the given ones.
    """
    edges = [(int(u), int(v)) for u, v in edges]
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    side = two_colouring(n, edges)
    if side is None:
        raise ValueError("graph is not bipartite")
    left = [v for v in range(n) if side[v] == 0]
    right = [v for v in range(n) if side[v] == 1]
    new_id = {v: i for i, v in enumerate(left + right)}
    return BipartiteGraph(len(left), len(right), [(new_id[u], new_id[v]) for u, v in edges],
                          origin=left + right)


def theta_graph(ell: int, t: int) -> BipartiteGraph:
    """Two hubs joined by ``t`` internally disjoint paths of length ``ell``.

    Before relabelling the hubs are 0 and 1; use ``origin`` to find them.
    """
    if ell < 1 or t < 1:
        raise ValueError("need ell >= 1 and t >= 1")
    if ell == 1 and t > 1:
        raise ValueError("ell = 1 admits a single path in a simple graph")
    edges, nxt = [], 2
    for _ in range(t):
        seq = [0] + list(range(nxt, nxt + ell - 1)) + [1]
        nxt += ell - 1
        edges.extend(zip(seq, seq[1:]))
    return from_edges(edges, nxt)


def locate(g: BipartiteGraph, original: int) -> int:
    """Current id of the vertex whose ``origin`` is ``original``."""
    hits = np.nonzero(g.origin == original)[0]
    if len(hits) != 1:
        raise KeyError(original)
    return int(hits[0])
