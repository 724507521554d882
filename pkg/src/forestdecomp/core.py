"""Multigraph representation, decomposition state and the residue potential.

A decomposition colours every edge either "blue" (it belongs to one of k
rooted directed spanning trees, arcs pointing towards the root) or "red"
(it belongs to an undirected forest).  The residue vector counts red
components by size, largest size first, and is the primary component of
the solver's termination potential.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

RED = -1


class ForestDecompError(Exception):
    pass


class ParseError(ForestDecompError):
    pass


class InternalCheckError(ForestDecompError):
    """An invariant the algorithm relies on failed; carries a state dump."""

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump or {}


class InfeasibleDensity(ForestDecompError):
    """Raised when the input is discovered to be denser than the threshold."""

    def __init__(self, witness):
        super().__init__("density threshold exceeded")
        self.witness = witness


class MultiGraph:
    """Loop-free multigraph with dense edge ids 0..m-1.

    Immutable after construction; parallel edges are distinct ids.
    """

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: list[tuple[int, int]]):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = n
        self.edges = [(int(u), int(v)) for u, v in edges]
        for eid, (u, v) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {eid} endpoint out of range")
            if u == v:
                raise ValueError(f"edge {eid} is a loop")
        self.adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(self.edges):
            self.adj[u].append((eid, v))
            self.adj[v].append((eid, u))

    @property
    def m(self) -> int:
        return len(self.edges)

    def other(self, eid: int, v: int) -> int:
        u, w = self.edges[eid]
        if v == u:
            return w
        if v == w:
            return u
        raise ValueError(f"vertex {v} not an endpoint of edge {eid}")

    def induced_edge_count(self, vertices) -> int:
        vs = set(vertices)
        return sum(1 for u, v in self.edges if u in vs and v in vs)

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Params:
    """Derived decomposition parameters for target (k, d).

    ell is the largest size of a "small" red component and d_prime the
    proven bound on the special forest's component sizes.
    """

    k: int
    d: int
    ell: int
    d_prime: int

    @property
    def threshold(self) -> Fraction:
        # k + d/(d+k+1), the density bound the input must respect
        return Fraction(self.k * (self.d + self.k + 1) + self.d, self.d + self.k + 1)


def _ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def compute_params(k: int, d: int) -> Params:
    """Evaluate ell and d_prime for (k, d) in exact arithmetic."""
    if k < 1 or d < 1:
        raise ValueError("k and d must be positive integers")
    ell = (d - 1) // (k + 1)
    assert ell == _ceil_fraction(Fraction(d, k + 1)) - 1
    slack = Fraction(k * ell, 1) * (Fraction(d, k + 1) - Fraction(ell + 1, 2))
    d_prime = d + _ceil_fraction(slack)
    if not (2 * ell + 1 <= d <= d_prime):
        raise InternalCheckError(f"parameter sanity failed for k={k} d={d}")
    # coarse quadratic bound on the extra edges
    if Fraction(d_prime) > Fraction(d) + Fraction(k, 2) * Fraction(d, k + 1) ** 2:
        raise InternalCheckError(f"d_prime out of proven range for k={k} d={d}")
    return Params(k=k, d=d, ell=ell, d_prime=d_prime)


class Decomposition:
    """k rooted directed spanning trees plus a red forest over one graph.

    parent_v[b][v] / parent_e[b][v] give vertex v's out-arc in tree b
    (-1 at the root).  tree_of[eid] is the tree index or RED.
    """

    __slots__ = ("g", "k", "root", "tree_of", "parent_v", "parent_e")

    def __init__(self, g: MultiGraph, k: int, root: int, tree_of: list[int],
                 parent_v: list[list[int]], parent_e: list[list[int]]):
        self.g = g
        self.k = k
        self.root = root
        self.tree_of = tree_of
        self.parent_v = parent_v
        self.parent_e = parent_e

    @classmethod
    def from_edge_classes(cls, g: MultiGraph, k: int, root: int,
                          trees: list[set[int]], red: set[int]) -> "Decomposition":
        """Orient k spanning-tree edge sets towards root and attach the red set."""
        tree_of = [RED] * g.m
        for b, es in enumerate(trees):
            for eid in es:
                tree_of[eid] = b
        for eid in red:
            if tree_of[eid] != RED:
                raise ValueError("edge assigned both blue and red")
        if sum(len(es) for es in trees) + len(red) != g.m:
            raise ValueError("edge classes do not partition the edge set")
        parent_v = [[-1] * g.n for _ in range(k)]
        parent_e = [[-1] * g.n for _ in range(k)]
        for b, es in enumerate(trees):
            nbr: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
            for eid in es:
                u, v = g.edges[eid]
                nbr[u].append((eid, v))
                nbr[v].append((eid, u))
            seen = [False] * g.n
            seen[root] = True
            stack = [root]
            while stack:
                x = stack.pop()
                for eid, y in nbr[x]:
                    if not seen[y]:
                        seen[y] = True
                        parent_v[b][y] = x
                        parent_e[b][y] = eid
                        stack.append(y)
            if not all(seen):
                raise ValueError(f"tree {b} does not span the graph")
        return cls(g, k, root, tree_of, parent_v, parent_e)

    def copy(self) -> "Decomposition":
        return Decomposition(self.g, self.k, self.root, list(self.tree_of),
                             [list(row) for row in self.parent_v],
                             [list(row) for row in self.parent_e])

    def red_edges(self) -> set[int]:
        return {eid for eid, t in enumerate(self.tree_of) if t == RED}

    def blue_edges(self, b: int) -> set[int]:
        return {eid for eid, t in enumerate(self.tree_of) if t == b}

    def is_descendant(self, b: int, x: int, u: int) -> bool:
        """True iff walking tree-b parents from x reaches u (x counts)."""
        v = x
        while v != -1:
            if v == u:
                return True
            v = self.parent_v[b][v]
        return False

    def blue_path_up(self, b: int, x: int):
        """Vertices on the tree-b path from x to the root, x included."""
        v = x
        while v != -1:
            yield v
            v = self.parent_v[b][v]

    def children_lists(self, b: int) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in range(self.g.n)]
        for v in range(self.g.n):
            p = self.parent_v[b][v]
            if p != -1:
                ch[p].append(v)
        return ch

    def rerooted(self, r_new: int) -> "Decomposition":
        """Same edge colouring, all parent maps reoriented towards r_new."""
        if not (0 <= r_new < self.g.n):
            raise ValueError("root out of range")
        trees = [self.blue_edges(b) for b in range(self.k)]
        return Decomposition.from_edge_classes(self.g, self.k, r_new, trees,
                                               self.red_edges())

    def has_blue_arc(self, tail: int, head: int, eid: int) -> bool:
        b = self.tree_of[eid]
        if b == RED:
            return False
        return self.parent_e[b][tail] == eid and self.parent_v[b][tail] == head


def decomposition_violations(dec: Decomposition) -> list[str]:
    """Structural check: partition, spanning rooted trees, red forest."""
    g = dec.g
    out = []
    for b in range(dec.k):
        es = dec.blue_edges(b)
        if len(es) != g.n - 1:
            out.append(f"tree {b} has {len(es)} edges, expected {g.n - 1}")
        if dec.parent_v[b][dec.root] != -1:
            out.append(f"tree {b} root has a parent")
        seen_edges = set()
        for v in range(g.n):
            if v == dec.root:
                continue
            eid = dec.parent_e[b][v]
            p = dec.parent_v[b][v]
            if eid == -1 or p == -1:
                out.append(f"tree {b} vertex {v} missing parent")
                continue
            if eid not in es or dec.g.other(eid, v) != p:
                out.append(f"tree {b} vertex {v} has inconsistent parent arc")
            seen_edges.add(eid)
        if seen_edges != es:
            out.append(f"tree {b} parent arcs do not match its edge set")
        # acyclicity / rootedness of the parent map
        state = [0] * g.n
        for v in range(g.n):
            path = []
            x = v
            while x != -1 and state[x] == 0:
                state[x] = 1
                path.append(x)
                x = dec.parent_v[b][x]
            if x != -1 and state[x] == 1:
                out.append(f"tree {b} has a parent cycle through {x}")
                break
            for y in path:
                state[y] = 2
    dsu = _DSU(g.n)
    for eid in dec.red_edges():
        u, v = g.edges[eid]
        if not dsu.union(u, v):
            out.append(f"red edge {eid} closes a cycle")
    return out


class _DSU:
    __slots__ = ("parent", "size")

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True)
class RedComp:
    vertices: frozenset
    edges: frozenset

    @property
    def size(self) -> int:
        return len(self.edges)

    def __contains__(self, v: int) -> bool:
        return v in self.vertices


class RedComponents:
    """Red components of a decomposition with a vertex -> component index."""

    __slots__ = ("comps", "comp_of")

    def __init__(self, comps: list[RedComp], comp_of: list[int]):
        self.comps = comps
        self.comp_of = comp_of

    def of_vertex(self, v: int) -> RedComp:
        return self.comps[self.comp_of[v]]


def red_components(dec: Decomposition) -> RedComponents:
    g = dec.g
    nbr: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for eid in dec.red_edges():
        u, v = g.edges[eid]
        nbr[u].append((eid, v))
        nbr[v].append((eid, u))
    comp_of = [-1] * g.n
    comps: list[RedComp] = []
    for start in range(g.n):
        if comp_of[start] != -1:
            continue
        idx = len(comps)
        vs = [start]
        es = set()
        comp_of[start] = idx
        stack = [start]
        while stack:
            x = stack.pop()
            for eid, y in nbr[x]:
                es.add(eid)
                if comp_of[y] == -1:
                    comp_of[y] = idx
                    vs.append(y)
                    stack.append(y)
        comp = RedComp(frozenset(vs), frozenset(es))
        if comp.size != len(vs) - 1:
            raise InternalCheckError("red component is not a tree")
        comps.append(comp)
    return RedComponents(comps, comp_of)


class ResidueVector:
    """Counts of red components per size above d_prime, compared from the
    largest size downwards."""

    __slots__ = ("counts", "d_prime")

    def __init__(self, counts: dict[int, int], d_prime: int):
        self.counts = {s: c for s, c in counts.items() if c}
        self.d_prime = d_prime

    def is_zero(self) -> bool:
        return not self.counts

    def as_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items(), reverse=True)

    def __eq__(self, other):
        return self.counts == other.counts

    def __lt__(self, other):
        for size in sorted(set(self.counts) | set(other.counts), reverse=True):
            a = self.counts.get(size, 0)
            b = other.counts.get(size, 0)
            if a != b:
                return a < b
        return False

    def __le__(self, other):
        return self == other or self < other

    def __repr__(self):
        return "ResidueVector(%s)" % (self.as_pairs(),)

    def encode(self) -> str:
        if not self.counts:
            return "-"
        return ",".join(f"{s}:{c}" for s, c in self.as_pairs())


def residue(dec: Decomposition, params: Params) -> ResidueVector:
    comps = red_components(dec)
    counts: dict[int, int] = {}
    for c in comps.comps:
        if c.size > params.d_prime:
            counts[c.size] = counts.get(c.size, 0) + 1
    return ResidueVector(counts, params.d_prime)


def residue_of_sizes(sizes, params: Params) -> ResidueVector:
    counts: dict[int, int] = {}
    for s in sizes:
        if s > params.d_prime:
            counts[s] = counts.get(s, 0) + 1
    return ResidueVector(counts, params.d_prime)


def sigma_less(a: list[int], b: list[int]) -> bool:
    """Lexicographic order on legal-order size sequences, zero padded."""
    n = max(len(a), len(b))
    pa = a + [0] * (n - len(a))
    pb = b + [0] * (n - len(b))
    return pa < pb


def potential_decreased(rho0: ResidueVector, sigma0: list[int],
                        rho1: ResidueVector, sigma1: list[int]) -> bool:
    if rho1 < rho0:
        return True
    if rho0 < rho1:
        return False
    return sigma_less(sigma1, sigma0)
