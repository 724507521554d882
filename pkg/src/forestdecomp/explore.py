"""Exploration subgraph, legal orders and the auxiliary tree.

The exploration subgraph is the closure of the root under red adjacency
and blue out-arcs.  A legal order lists its red components starting at
the oversize component, each later component witnessed by a blue arc from
an earlier one; its size sequence is the secondary solver potential.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (Decomposition, InternalCheckError, MultiGraph, Params,
                   RedComp, RedComponents, red_components)

INF = 10 ** 9  # order position for vertices outside the exploration subgraph


@dataclass
class Exploration:
    vertices: frozenset
    blue_arc_count: int
    red_edge_count: int


def build_exploration(dec: Decomposition) -> Exploration:
    """Closure of the root under red edges and each vertex's k out-arcs."""
    g = dec.g
    red_nbr: list[list[int]] = [[] for _ in range(g.n)]
    for eid in dec.red_edges():
        u, v = g.edges[eid]
        red_nbr[u].append(v)
        red_nbr[v].append(u)
    seen = [False] * g.n
    seen[dec.root] = True
    queue = [dec.root]
    for x in queue:
        for b in range(dec.k):
            p = dec.parent_v[b][x]
            if p != -1 and not seen[p]:
                seen[p] = True
                queue.append(p)
        for y in red_nbr[x]:
            if not seen[y]:
                seen[y] = True
                queue.append(y)
    w = frozenset(v for v in range(g.n) if seen[v])
    blue = sum(1 for b in range(dec.k) for v in w
               if v != dec.root and dec.parent_v[b][v] in w)
    if blue != dec.k * (len(w) - 1):
        raise InternalCheckError("exploration closure lost blue arcs")
    er = sum(1 for eid in dec.red_edges()
             if g.edges[eid][0] in w and g.edges[eid][1] in w)
    return Exploration(vertices=w, blue_arc_count=blue, red_edge_count=er)


@dataclass
class Witness:
    tail: int
    head: int
    eid: int
    tree: int


class LegalOrder:
    """Ordered red components of an exploration subgraph.

    comps[0] is the designated oversize component; witness[j] is the fixed
    witnessing arc of comps[j] (None at position 0).  aux_parent realises
    the auxiliary tree: red edges inside components plus witnessing arcs,
    rooted at the decomposition root.
    """

    __slots__ = ("comps", "witness", "pos_of_vertex", "aux_parent", "root")

    def __init__(self, comps, witness, pos_of_vertex, aux_parent, root):
        self.comps = comps
        self.witness = witness
        self.pos_of_vertex = pos_of_vertex
        self.aux_parent = aux_parent
        self.root = root

    def pos(self, v: int) -> int:
        return self.pos_of_vertex.get(v, INF)

    def sizes(self) -> list[int]:
        return [c.size for c in self.comps]

    def comp_at(self, v: int) -> RedComp:
        return self.comps[self.pos(v)]

    def is_aux_ancestor(self, anc: int, v: int) -> bool:
        """True iff anc lies on v's auxiliary-tree path to the root
        (v counts as its own ancestor)."""
        x = v
        while x is not None:
            if x == anc:
                return True
            x = self.aux_parent.get(x)
        return False

    def aux_red_parent(self, v: int) -> int | None:
        """v's auxiliary parent when joined by a red edge, else None."""
        p = self.aux_parent.get(v)
        if p is None:
            return None
        if self.pos(p) != self.pos(v):
            return None  # witnessing arc, blue
        return p

    def encode_sizes(self) -> str:
        return ",".join(str(s) for s in self.sizes()) if self.comps else "-"


def _blue_out_arcs(dec: Decomposition, vertices: frozenset):
    """All blue arcs (tail, head, eid, tree) inside the exploration set,
    sorted by edge id."""
    out = []
    for v in vertices:
        for b in range(dec.k):
            p = dec.parent_v[b][v]
            if p != -1:
                out.append((dec.parent_e[b][v], v, p, b))
    out.sort()
    return [Witness(tail=t, head=h, eid=e, tree=b) for e, t, h, b in out]


def _order_from_prefix(dec: Decomposition, explo: Exploration,
                       comps: RedComponents,
                       prefix: list[tuple[RedComp, Witness | None]]) -> LegalOrder:
    """Complete a seeded component prefix to a full legal order by
    breadth-first search over blue arcs, smallest edge id first."""
    inside = [c for c in comps.comps if next(iter(c.vertices)) in explo.vertices]
    by_vertexset = {c.vertices: c for c in inside}
    ordered: list[RedComp] = []
    witness: list[Witness | None] = []
    placed: set[frozenset] = set()
    pos_of_vertex: dict[int, int] = {}

    def place(comp: RedComp, w: Witness | None):
        for v in comp.vertices:
            pos_of_vertex[v] = len(ordered)
        ordered.append(comp)
        witness.append(w)
        placed.add(comp.vertices)

    for comp, w in prefix:
        cur = by_vertexset.get(comp.vertices)
        if cur is None or cur.edges != comp.edges:
            raise InternalCheckError("order prefix component vanished")
        if w is not None:
            if not dec.has_blue_arc(w.tail, w.head, w.eid):
                raise InternalCheckError("order prefix witnessing arc vanished")
            if pos_of_vertex.get(w.tail) is None:
                raise InternalCheckError("witnessing arc tail not placed earlier")
            if w.head not in cur.vertices:
                raise InternalCheckError("witnessing arc head left its component")
        place(cur, w)

    arcs_of_comp: dict[frozenset, list[Witness]] = {c.vertices: [] for c in inside}
    for w in _blue_out_arcs(dec, explo.vertices):
        if w.head in explo.vertices:
            arcs_of_comp[comps.of_vertex(w.tail).vertices].append(w)

    scan = 0
    while scan < len(ordered):
        comp = ordered[scan]
        for w in arcs_of_comp[comp.vertices]:
            head_comp = comps.of_vertex(w.head)
            if head_comp.vertices not in placed:
                place(head_comp, w)
        scan += 1
    if len(ordered) != len(inside):
        raise InternalCheckError("exploration component unreachable in order")

    aux_parent: dict[int, int | None] = {dec.root: None}
    for idx, comp in enumerate(ordered):
        w = witness[idx]
        entry = dec.root if idx == 0 else w.head
        if idx > 0:
            aux_parent[entry] = w.tail
        nbr: dict[int, list[int]] = {}
        g = dec.g
        for eid in comp.edges:
            a, b = g.edges[eid]
            nbr.setdefault(a, []).append(b)
            nbr.setdefault(b, []).append(a)
        seen = {entry}
        q = [entry]
        for x in q:
            for y in sorted(nbr.get(x, ())):
                if y not in seen:
                    seen.add(y)
                    aux_parent[y] = x
                    q.append(y)
        if seen != set(comp.vertices):
            raise InternalCheckError("auxiliary tree failed to span a component")
    return LegalOrder(ordered, witness, pos_of_vertex, aux_parent, dec.root)


def build_legal_order(dec: Decomposition, explo: Exploration,
                      comps: RedComponents | None = None) -> LegalOrder:
    """Deterministic breadth-first legal order from the root's component."""
    if comps is None:
        comps = red_components(dec)
    start = comps.of_vertex(dec.root)
    return _order_from_prefix(dec, explo, comps, [(start, None)])


def rebuild_order_with_prefix(dec: Decomposition, explo: Exploration,
                              prefix: list[tuple[RedComp, Witness | None]]) -> LegalOrder:
    return _order_from_prefix(dec, explo, red_components(dec), prefix)


def choose_root(dec: Decomposition, comp: RedComp, params: Params) -> int:
    """Pick the centre vertex of an oversize red component.

    beta(v) is the minimum, over red edges e at v, of the edge count of
    v's side of the component minus e; the maximiser satisfies
    beta(r) >= ell + 1 whenever the component has more than d_prime edges.
    Ties break on the smallest vertex id.
    """
    if comp.size < params.d_prime + 1:
        raise ValueError("component below the oversize bound")
    g = dec.g
    nbr: dict[int, list[tuple[int, int]]] = {v: [] for v in comp.vertices}
    for eid in comp.edges:
        a, b = g.edges[eid]
        nbr[a].append((eid, b))
        nbr[b].append((eid, a))

    def side_edges(v: int, cut: int) -> int:
        seen = {v}
        q = [v]
        cnt = 0
        for x in q:
            for eid, y in nbr[x]:
                if eid == cut:
                    continue
                cnt += 1 if y not in seen else 0
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        return cnt

    best_v, best_beta = -1, -1
    for v in sorted(comp.vertices):
        beta = min((side_edges(v, eid) for eid, _ in nbr[v]), default=comp.size)
        if beta > best_beta:
            best_v, best_beta = v, beta
    if best_beta < params.ell + 1:
        raise InternalCheckError("no centre vertex with the guaranteed margin")
    return best_v


def brute_force_beta(g: MultiGraph, comp: RedComp, v: int) -> int:
    """Independent beta computation for tests: enumerate each incident red
    edge, split the component, count the v side."""
    sizes = []
    for eid in comp.edges:
        a, b = g.edges[eid]
        if v not in (a, b):
            continue
        seen = {v}
        q = [v]
        cnt = 0
        for x in q:
            for e2 in comp.edges:
                if e2 == eid:
                    continue
                p, r = g.edges[e2]
                for s, t in ((p, r), (r, p)):
                    if s == x and t not in seen:
                        seen.add(t)
                        q.append(t)
        cnt = sum(1 for e2 in comp.edges if e2 != eid
                  and g.edges[e2][0] in seen and g.edges[e2][1] in seen)
        sizes.append(cnt)
    return min(sizes, default=comp.size)
