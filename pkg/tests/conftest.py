"""Shared builders for the test suite."""

from __future__ import annotations

import random

import pytest

from forestdecomp import MultiGraph
from forestdecomp.core import Decomposition


def graph(n, pairs):
    return MultiGraph(n, list(pairs))


def k4():
    return graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def triangle():
    return graph(3, [(0, 1), (1, 2), (0, 2)])


def path_graph(n):
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def two_triangles_bridge():
    return graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def build_decomposition(n, k, red_pairs, blue_parent_maps, root=0):
    """Assemble a decomposition from red vertex pairs and per-tree parent
    dicts {vertex: parent}; returns (graph, decomposition)."""
    edges = []
    red = set()
    trees = [set() for _ in range(k)]
    for u, v in red_pairs:
        edges.append((u, v))
        red.add(len(edges) - 1)
    for b, parents in enumerate(blue_parent_maps):
        for v, p in sorted(parents.items()):
            edges.append((v, p))
            trees[b].add(len(edges) - 1)
    g = MultiGraph(n, edges)
    dec = Decomposition.from_edge_classes(g, k, root, trees, red)
    return g, dec


def random_solver_state(rng: random.Random, n, k, extra_red):
    """k random spanning trees towards vertex 0 plus a random red forest."""
    edges = []
    trees = []
    for _ in range(k):
        order = list(range(1, n))
        rng.shuffle(order)
        ranked = [0]
        t = set()
        for v in order:
            p = rng.choice(ranked)
            edges.append((v, p))
            t.add(len(edges) - 1)
            ranked.append(v)
        trees.append(t)
    red = set()
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tries = 0
    while len(red) < extra_red and tries < 300:
        tries += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v or find(u) == find(v):
            continue
        parent[find(u)] = find(v)
        edges.append((u, v))
        red.add(len(edges) - 1)
    g = MultiGraph(n, edges)
    return g, Decomposition.from_edge_classes(g, k, 0, trees, red)


SUBCASE_RED = [(i, i + 1) for i in range(8)] \
    + [(i, i + 1) for i in range(9, 16)] \
    + [(17, 18), (18, 19), (20, 21), (21, 22)]


def subcase_state(extra_parents, lp=2):
    """The drive skeleton used by the augment subcase tests: an oversize
    root path 0..8, a parent path K = 9..16 and two 2-edge children hanging
    off tails 9 and 16 through tree 0."""
    from forestdecomp import compute_params
    from forestdecomp.explore import build_exploration, build_legal_order
    from forestdecomp.states import make_drive_context, init_valid_state

    parents = {1: 9, 9: 17, 16: 20, 17: 0, 20: 0}
    for v in range(2, 9):
        parents[v] = 0
    for v in (18, 19, 21, 22):
        parents[v] = 0
    parents.update(extra_parents)
    g, dec = build_decomposition(23, 1, SUBCASE_RED, [parents])
    params = compute_params(1, 5)
    explo = build_exploration(dec)
    order = build_legal_order(dec, explo)
    kpos = next(j for j, c in enumerate(order.comps) if 9 in c.vertices)
    ctx = make_drive_context(dec, order, kpos, 0, lp, params)
    return ctx, init_valid_state(ctx), params


@pytest.fixture
def rng():
    return random.Random(20240817)
