import pytest

from forestdecomp import (InfeasibleDensity, MultiGraph, brute_force_gamma,
                          compute_params, normalize, pack_k_forests,
                          spanning_trees_plus_forest, tnw_violating_partition,
                          verify_partition)
from forestdecomp.core import _DSU
from forestdecomp.instances import GenSpec, generate
from forestdecomp.packing import union_rank_by_enumeration

from conftest import k4, triangle, two_triangles_bridge


def blobs_and_bridge():
    return generate(GenSpec("blob-bridge"))


def test_pack_examples():
    p = pack_k_forests(k4(), 2)
    assert p.packed_size == 6 and not p.leftover
    assert all(len(f) == 3 for f in p.forests)

    p = pack_k_forests(triangle(), 1)
    assert p.packed_size == 2 and len(p.leftover) == 1

    p = pack_k_forests(two_triangles_bridge(), 2)
    assert p.packed_size == 7 and not p.leftover
    assert brute_force_gamma(two_triangles_bridge()) <= 2


def test_pack_matches_rank_formula(rng):
    for _ in range(60):
        n = rng.randrange(2, 6)
        m = rng.randrange(0, 8)
        edges = []
        while len(edges) < m:
            u, v = rng.randrange(n), rng.randrange(n)
            if u != v:
                edges.append((u, v))
        g = MultiGraph(n, edges)
        for k in (1, 2):
            assert pack_k_forests(g, k).packed_size == \
                union_rank_by_enumeration(g, k)


def _partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1:]
        yield [[first]] + sub


def _min_defect(g, k):
    best = None
    for parts in _partitions(list(range(g.n))):
        if len(parts) < 2:
            continue
        part_of = {}
        for i, p in enumerate(parts):
            for v in p:
                part_of[v] = i
        crossing = sum(1 for u, v in g.edges if part_of[u] != part_of[v])
        defect = crossing - k * (len(parts) - 1)
        if best is None or defect < best:
            best = defect
    return best


def test_tnw_examples():
    assert tnw_violating_partition(k4(), 2) is None

    cert = tnw_violating_partition(blobs_and_bridge(), 2)
    assert cert is not None
    assert sorted(sorted(p) for p in cert.parts) == [[0, 1, 2, 3], [4, 5, 6, 7]]
    assert cert.crossing == 1 and cert.defect == -1

    tree = MultiGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    assert tnw_violating_partition(tree, 1) is None

    with pytest.raises(ValueError):
        tnw_violating_partition(MultiGraph(4, [(0, 1), (2, 3)]), 1)


def test_tnw_defect_is_minimal(rng):
    for _ in range(40):
        n = rng.randrange(3, 7)
        edges = [(i, rng.randrange(i)) for i in range(1, n)]
        for _ in range(rng.randrange(0, 6)):
            u, v = rng.randrange(n), rng.randrange(n)
            if u != v:
                edges.append((u, v))
        g = MultiGraph(n, edges)
        for k in (1, 2):
            cert = tnw_violating_partition(g, k)
            minimum = _min_defect(g, k)
            if cert is None:
                assert minimum >= 0
            else:
                assert cert.defect == minimum < 0


def test_spanning_trees_plus_forest_rebalances():
    # a spanning tree can dodge the triangle entirely, stranding a red cycle
    # unless the packing is rebalanced
    edges = [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5), (3, 4), (4, 5)]
    g = MultiGraph(6, edges)
    assert brute_force_gamma(g) < 2
    trees, red = spanning_trees_plus_forest(g, 1)
    assert len(trees) == 1 and len(trees[0]) == 5
    dsu = _DSU(g.n)
    for eid in red:
        u, v = g.edges[eid]
        assert dsu.union(u, v)


def test_spanning_trees_plus_forest_raises_when_too_dense():
    dense = MultiGraph(2, [(0, 1)] * 5)
    with pytest.raises(InfeasibleDensity):
        spanning_trees_plus_forest(dense, 1)


def test_normalize_sparse_input_packs_without_special_edges():
    # gamma = 3/2 <= k = 2: everything lands in the k base forests
    params = compute_params(2, 2)
    g = two_triangles_bridge()
    problem = normalize(g, params)
    results = [([task.dec0.blue_edges(b) for b in range(2)],
                task.dec0.red_edges()) for task in problem.cores]
    classes = problem.glue(results)
    report = verify_partition(g, params, classes)
    assert report.ok, report.to_lines()
    assert not classes[-1]


def test_normalize_blob_bridge():
    params = compute_params(2, 2)
    g = blobs_and_bridge()
    problem = normalize(g, params)
    assert len(problem.cores) == 2
    bridge = next(eid for eid, (u, v) in enumerate(g.edges)
                  if {u, v} == {0, 4})
    assert any(bridge in f for f in problem.base_forests)
    for task in problem.cores:
        assert task.core.n == 4
        assert len(task.dec0.red_edges()) == 1
    results = [([task.dec0.blue_edges(b) for b in range(2)],
                task.dec0.red_edges()) for task in problem.cores]
    classes = problem.glue(results)
    report = verify_partition(g, params, classes)
    assert report.ok, report.to_lines()


def test_normalize_single_core_identity_glue():
    # a graph with k spanning trees normalizes to one core whose glued
    # classes are exactly the core's own classes
    params = compute_params(2, 2)
    g = k4()
    problem = normalize(g, params)
    assert len(problem.cores) == 1 and all(not f for f in problem.base_forests)
    task = problem.cores[0]
    trees = [task.dec0.blue_edges(b) for b in range(2)]
    classes = problem.glue([(trees, task.dec0.red_edges())])
    assert classes[:2] == [set(t) for t in trees]
    assert classes[2] == task.dec0.red_edges()


def test_normalize_disconnected_splits():
    params = compute_params(1, 2)
    g = MultiGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    problem = normalize(g, params)
    assert len(problem.cores) == 2
    assert all(not f for f in problem.base_forests)


def test_normalize_propagates_density_witness():
    params = compute_params(1, 1)
    dense = MultiGraph(3, [(0, 1), (1, 2), (0, 2), (0, 1), (1, 2), (0, 2)])
    with pytest.raises(InfeasibleDensity) as err:
        normalize(dense, params)
    assert len(err.value.witness.vertices) >= 2
