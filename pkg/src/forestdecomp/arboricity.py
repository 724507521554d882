"""Exact fractional arboricity via a min-cut densest-subgraph oracle.

All densities are Fractions; nothing here touches floating point.  The
brute-force enumeration is kept alongside as an independent test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import MultiGraph


@dataclass(frozen=True)
class DensityWitness:
    vertices: frozenset
    edge_count: int
    density: Fraction

    def verify(self, g: MultiGraph) -> bool:
        if len(self.vertices) < 2:
            return False
        cnt = g.induced_edge_count(self.vertices)
        return cnt == self.edge_count and \
            self.density == Fraction(cnt, len(self.vertices) - 1)


class _Dinic:
    """Integer max-flow, small graphs only."""

    def __init__(self, n):
        self.n = n
        self.head = [[] for _ in range(n)]
        self.to = []
        self.cap = []

    def add(self, u, v, c):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def maxflow(self, s, t):
        flow = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            q = [s]
            for u in q:
                for i in self.head[u]:
                    if self.cap[i] > 0 and level[self.to[i]] < 0:
                        level[self.to[i]] = level[u] + 1
                        q.append(self.to[i])
            if level[t] < 0:
                return flow
            it = [0] * self.n

            def dfs(u, f):
                if u == t:
                    return f
                while it[u] < len(self.head[u]):
                    i = self.head[u][it[u]]
                    v = self.to[i]
                    if self.cap[i] > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(f, self.cap[i]))
                        if got:
                            self.cap[i] -= got
                            self.cap[i ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, 1 << 62)
                if not pushed:
                    break
                flow += pushed

    def source_side(self, s):
        seen = [False] * self.n
        seen[s] = True
        q = [s]
        for u in q:
            for i in self.head[u]:
                if self.cap[i] > 0 and not seen[self.to[i]]:
                    seen[self.to[i]] = True
                    q.append(self.to[i])
        return seen


def exceeds_density(g: MultiGraph, threshold: Fraction) -> DensityWitness | None:
    """Find an induced subgraph H with e(H)/(v(H)-1) > threshold, if any.

    Maximises q*e(H) - p*(v(H)-1) for threshold p/q by a cut construction:
    a source feeds each edge node with capacity q, edge nodes feed their
    endpoints, vertices drain to the sink with capacity p.  The "-1" is
    restored exactly by forcing one anchor vertex into H and trying every
    anchor.
    """
    if g.n < 2:
        raise ValueError("need at least 2 vertices")
    if threshold.denominator <= 0:
        raise ValueError("threshold must have positive denominator")
    p, q = threshold.numerator, threshold.denominator
    if p < 0:
        p, q = 0, 1
    m, n = g.m, g.n
    if m == 0:
        return None
    big = q * m + p * n + 1
    best: DensityWitness | None = None
    for anchor in range(n):
        net = _Dinic(2 + m + n)
        s, t = 0, 1

        def vnode(v):
            return 2 + m + v

        for eid, (u, v) in enumerate(g.edges):
            net.add(s, 2 + eid, q)
            net.add(2 + eid, vnode(u), big)
            net.add(2 + eid, vnode(v), big)
        for v in range(n):
            net.add(vnode(v), t, p)
        net.add(s, vnode(anchor), big)
        cut = net.maxflow(s, t)
        # max over H containing anchor of q*e(H) - p*(v(H)-1)
        value = q * m - cut + p
        if value > 0:
            side = net.source_side(s)
            vs = frozenset(v for v in range(n) if side[vnode(v)])
            cnt = g.induced_edge_count(vs)
            w = DensityWitness(vs, cnt, Fraction(cnt, len(vs) - 1))
            if not w.verify(g) or w.density <= threshold:
                raise AssertionError("cut oracle produced an invalid witness")
            if best is None or w.density > best.density:
                best = w
    return best


def fractional_arboricity(g: MultiGraph) -> tuple[Fraction, DensityWitness]:
    """Exact max of e(H)/(v(H)-1), with an attaining witness.

    Iterates the cut oracle Dinkelbach style; attainable densities have
    denominator at most v(G)-1 so the strictly increasing sequence of
    exact rationals terminates.
    """
    if g.m == 0:
        raise ValueError("fractional arboricity of an edgeless graph")
    u, v = g.edges[0]
    witness = DensityWitness(frozenset((u, v)),
                             g.induced_edge_count((u, v)),
                             Fraction(g.induced_edge_count((u, v)), 1))
    gamma = witness.density
    while True:
        better = exceeds_density(g, gamma)
        if better is None:
            return gamma, witness
        gamma, witness = better.density, better


def brute_force_gamma(g: MultiGraph) -> Fraction:
    """Enumerate every vertex subset of size >= 2; test oracle only."""
    if g.n > 20:
        raise ValueError("brute force limited to 20 vertices")
    if g.m == 0:
        raise ValueError("edgeless graph")
    best = Fraction(0)
    for size in range(2, g.n + 1):
        for subset in combinations(range(g.n), size):
            cnt = g.induced_edge_count(subset)
            val = Fraction(cnt, size - 1)
            if val > best:
                best = val
    return best
