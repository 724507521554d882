"""Forest packing by matroid union, the spanning-tree packing certificate,
and the normalisation recursion that reduces a feasible input to cores.

A core is a connected graph that carries k edge-disjoint spanning trees
plus a leftover forest; cores are what the solver works on.  Where a
connected piece has no k spanning trees, the defect-minimising vertex
partition splits it, the contracted quotient packs into k forests with
nothing left over, and the recursion descends into the parts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arboricity import fractional_arboricity
from .core import (Decomposition, InfeasibleDensity, InternalCheckError,
                   MultiGraph, Params, _DSU)


@dataclass
class ForestPacking:
    forests: list[set[int]]
    leftover: set[int]

    @property
    def packed_size(self) -> int:
        return sum(len(f) for f in self.forests)


@dataclass
class PartitionCertificate:
    """Vertex partition whose crossing-edge count defeats k spanning trees."""

    parts: list[frozenset]
    crossing: int
    defect: int


class _UnionState:
    """Working state for graphic matroid union over classes 0..k-1."""

    def __init__(self, g: MultiGraph, k: int):
        self.g = g
        self.k = k
        self.assign = [-2] * g.m  # -2 unassigned, else class index

    def forest_edges(self, c: int) -> list[int]:
        return [e for e, a in enumerate(self.assign) if a == c]

    def _circuit(self, c: int, eid: int) -> list[int] | None:
        """Edges of class c on the path joining eid's endpoints, or None if
        eid is independent of class c."""
        g = self.g
        u, v = g.edges[eid]
        nbr: dict[int, list[tuple[int, int]]] = {}
        for e in self.forest_edges(c):
            a, b = g.edges[e]
            nbr.setdefault(a, []).append((e, b))
            nbr.setdefault(b, []).append((e, a))
        prev: dict[int, tuple[int, int]] = {u: (-1, -1)}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                path = []
                y = v
                while y != u:
                    e, z = prev[y]
                    path.append(e)
                    y = z
                return path
            for e, y in nbr.get(x, ()):
                if y not in prev:
                    prev[y] = (e, x)
                    stack.append(y)
        return None

    def try_insert(self, e0: int, allowed: list[int]) -> bool:
        """Shortest exchange-path augmentation inserting e0, if possible."""
        parent: dict[int, int] = {e0: -1}
        queue = [e0]
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            for c in allowed:
                circ = self._circuit(c, x)
                if circ is None:
                    # cascade: x enters c, each ancestor takes its child's slot
                    y = x
                    while y != -1:
                        prev_class = self.assign[y]
                        self.assign[y] = c
                        y = parent[y]
                        c = prev_class
                    return True
                for f in circ:
                    if f not in parent:
                        parent[f] = x
                        queue.append(f)
        return False

    def reachable_from_unassigned(self, allowed: list[int]) -> set[int]:
        """Closure of the non-augmentable elements in the exchange digraph."""
        seeds = [e for e, a in enumerate(self.assign) if a == -2]
        seen = set(seeds)
        queue = list(seeds)
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            for c in allowed:
                circ = self._circuit(c, x)
                if circ is None:
                    raise InternalCheckError("augmentable element left behind")
                for f in circ:
                    if f not in seen:
                        seen.add(f)
                        queue.append(f)
        return seen


def pack_k_forests(g: MultiGraph, k: int) -> ForestPacking:
    """Maximum-cardinality union of k edge-disjoint forests."""
    if k < 1:
        raise ValueError("k must be positive")
    st = _UnionState(g, k)
    allowed = list(range(k))
    leftover = set()
    for e in range(g.m):
        st.assign[e] = -2
        if not st.try_insert(e, allowed):
            leftover.add(e)
    forests = [set(st.forest_edges(c)) for c in range(k)]
    packing = ForestPacking(forests, leftover)
    packing._state = st  # kept for certificate recovery
    return packing


def union_rank_by_enumeration(g: MultiGraph, k: int) -> int:
    """min over A of |E - A| + k*r(A); test oracle for tiny graphs."""
    from itertools import combinations
    best = g.m
    edges = list(range(g.m))
    for size in range(0, g.m + 1):
        for subset in combinations(edges, size):
            dsu = _DSU(g.n)
            rank = 0
            for e in subset:
                u, v = g.edges[e]
                if dsu.union(u, v):
                    rank += 1
            best = min(best, g.m - size + k * rank)
    return best


def _connected(g: MultiGraph) -> bool:
    if g.n == 0:
        return True
    seen = [False] * g.n
    seen[0] = True
    q = [0]
    for x in q:
        for _, y in g.adj[x]:
            if not seen[y]:
                seen[y] = True
                q.append(y)
    return all(seen)


def _components(g: MultiGraph) -> list[list[int]]:
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        q = [s]
        for x in q:
            for _, y in g.adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    q.append(y)
        out.append(sorted(comp))
    return out


def tnw_violating_partition(g: MultiGraph, k: int) -> PartitionCertificate | None:
    """None iff g packs k edge-disjoint spanning trees; otherwise the
    defect-minimising vertex partition, recovered from the closure of the
    final non-augmentable packing state."""
    if not _connected(g):
        raise ValueError("input must be connected")
    packing = pack_k_forests(g, k)
    target = k * (g.n - 1)
    if packing.packed_size == target:
        return None
    st: _UnionState = packing._state
    a_set = st.reachable_from_unassigned(list(range(k)))
    dsu = _DSU(g.n)
    for e in a_set:
        u, v = g.edges[e]
        dsu.union(u, v)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(dsu.find(v), []).append(v)
    parts = [frozenset(vs) for vs in groups.values()]
    part_of = {}
    for i, p in enumerate(parts):
        for v in p:
            part_of[v] = i
    crossing = sum(1 for u, v in g.edges if part_of[u] != part_of[v])
    defect = crossing - k * (len(parts) - 1)
    if defect >= 0 or defect != packing.packed_size - target:
        raise InternalCheckError("partition recovery lost the rank minimiser")
    return PartitionCertificate(parts=sorted(parts, key=min), crossing=crossing,
                                defect=defect)


def spanning_trees_plus_forest(g: MultiGraph, k: int) -> tuple[list[set[int]], set[int]]:
    """Partition E into k spanning trees and a leftover forest.

    Requires that g packs into k+1 forests and carries k edge-disjoint
    spanning trees; raises InfeasibleDensity when even k+1 forests do not
    suffice.  Packs into k+1 classes, then moves class-k edges into the
    first k classes until those hold k*(n-1) edges.
    """
    full = pack_k_forests(g, k + 1)
    if full.leftover:
        gamma, witness = fractional_arboricity(g)
        raise InfeasibleDensity(witness)
    st: _UnionState = full._state
    target = k * (g.n - 1)
    blues = list(range(k))

    def blue_size():
        return sum(1 for a in st.assign if 0 <= a < k)

    while blue_size() < target:
        moved = False
        for e in range(g.m):
            if st.assign[e] != k:
                continue
            st.assign[e] = -2
            if st.try_insert(e, blues):
                moved = True
                break
            st.assign[e] = k
        if not moved:
            raise InternalCheckError("spanning-tree rebalance stalled")
    trees = [set(st.forest_edges(c)) for c in range(k)]
    red = set(st.forest_edges(k))
    for t in trees:
        if len(t) != g.n - 1:
            raise InternalCheckError("rebalanced class is not spanning")
    return trees, red


@dataclass
class CoreTask:
    """A standalone core plus the vertex/edge maps back into the input."""

    core: MultiGraph
    vertices_g: list[int]          # core vertex index -> input vertex
    g_eid: list[int]               # core edge id -> input edge id
    dec0: Decomposition


@dataclass
class NormalizedProblem:
    g: MultiGraph
    k: int
    cores: list[CoreTask]
    base_forests: list[set[int]]   # input edge ids handled at split nodes

    def glue(self, core_results: list[tuple[list[set[int]], set[int]]]):
        """Assemble k+1 edge classes of the input graph.

        core_results[i] is (trees, red) in core-local edge ids for
        self.cores[i]; the returned classes are input edge-id sets, with
        the special forest last.
        """
        if len(core_results) != len(self.cores):
            raise ValueError("one result per core required")
        forests = [set(s) for s in self.base_forests]
        special: set[int] = set()
        for task, (trees, red) in zip(self.cores, core_results):
            if len(trees) != self.k:
                raise ValueError("core result has wrong tree count")
            for b, es in enumerate(trees):
                forests[b].update(task.g_eid[e] for e in es)
            special.update(task.g_eid[e] for e in red)
        classes = forests + [special]
        covered = set()
        for cl in classes:
            if covered & cl:
                raise InternalCheckError("glued classes overlap")
            covered |= cl
        if covered != set(range(self.g.m)):
            raise InternalCheckError("glued classes do not cover the input")
        for i, cl in enumerate(classes):
            dsu = _DSU(self.g.n)
            for e in cl:
                u, v = self.g.edges[e]
                if not dsu.union(u, v):
                    raise InternalCheckError(f"glued class {i} has a cycle")
        return classes


def _induced(g: MultiGraph, vertices: list[int]) -> tuple[MultiGraph, list[int]]:
    index = {v: i for i, v in enumerate(vertices)}
    eids = []
    edges = []
    for eid, (u, v) in enumerate(g.edges):
        if u in index and v in index:
            eids.append(eid)
            edges.append((index[u], index[v]))
    return MultiGraph(len(vertices), edges), eids


def _contract(g: MultiGraph, parts: list[frozenset]) -> tuple[MultiGraph, list[int]]:
    part_of = {}
    for i, p in enumerate(parts):
        for v in p:
            part_of[v] = i
    eids = []
    edges = []
    for eid, (u, v) in enumerate(g.edges):
        if part_of[u] != part_of[v]:
            eids.append(eid)
            edges.append((part_of[u], part_of[v]))
    return MultiGraph(len(parts), edges), eids


def normalize(g: MultiGraph, params: Params) -> NormalizedProblem:
    """Recursive reduction of g to solver cores plus pre-packed glue forests.

    Every recursive call strictly decreases the vertex count; red edges of
    the eventual output never cross a part boundary.
    """
    k = params.k
    cores: list[CoreTask] = []
    base_forests: list[set[int]] = [set() for _ in range(k)]

    def rec(vertices: list[int]):
        sub, emap = _induced(g, vertices)
        if sub.n <= 1 or sub.m == 0:
            if sub.m:
                raise InternalCheckError("edges on a single vertex")
            return
        comps = _components(sub)
        if len(comps) > 1:
            for comp in comps:
                rec([vertices[i] for i in comp])
            return
        cert = tnw_violating_partition(sub, k)
        if cert is None:
            try:
                trees, red = spanning_trees_plus_forest(sub, k)
            except InfeasibleDensity as exc:
                w = exc.witness
                lifted = frozenset(vertices[i] for i in w.vertices)
                raise InfeasibleDensity(
                    type(w)(lifted, w.edge_count, w.density)) from None
            dec0 = Decomposition.from_edge_classes(sub, k, 0, trees, red)
            cores.append(CoreTask(core=sub, vertices_g=list(vertices),
                                  g_eid=emap, dec0=dec0))
            return
        quotient, ceids = _contract(sub, cert.parts)
        qpack = pack_k_forests(quotient, k)
        if qpack.leftover:
            raise InternalCheckError("contracted quotient denser than k forests")
        for b, es in enumerate(qpack.forests):
            base_forests[b].update(emap[ceids[e]] for e in es)
        for part in cert.parts:
            rec([vertices[i] for i in sorted(part)])

    rec(list(range(g.n)))
    return NormalizedProblem(g=g, k=k, cores=cores, base_forests=base_forests)
