import random

import pytest

from forestdecomp import (InternalCheckError, MultiGraph, brute_force_gamma,
                          compute_params, run_decompose, solve_core,
                          verify_certificate, verify_partition)
from forestdecomp.core import (Decomposition, red_components,
                               residue_of_sizes, sigma_less)
from forestdecomp.instances import GenSpec, generate, filter_feasible

from conftest import build_decomposition, random_solver_state


def chord_instance():
    params = compute_params(1, 1)
    edges = [(i, i + 1) for i in range(9)] + [(0, 3), (3, 6)]
    g = MultiGraph(10, edges)
    dec = Decomposition.from_edge_classes(g, 1, 0, [set(range(9))], {9, 10})
    return params, g, dec


def test_solver_trivial_when_nothing_oversize():
    params = compute_params(1, 4)  # d_prime = 5
    g, dec = build_decomposition(4, 1, [(1, 2), (2, 3)], [{1: 0, 2: 0, 3: 0}])
    res = solve_core(g, dec, params)
    assert res.succeeded and res.moves == 0
    assert res.dec.red_edges() == dec.red_edges()


def test_solver_fixes_chord_instance():
    params, g, dec = chord_instance()
    res = solve_core(g, dec, params)
    assert res.succeeded and res.moves >= 1
    comps = red_components(res.dec)
    assert max(c.size for c in comps.comps) <= params.d_prime
    rep = verify_partition(g, params,
                           [res.dec.blue_edges(0), res.dec.red_edges()])
    assert rep.ok


def _parse_rho(field):
    if field == "-":
        return {}
    return {int(p.split(":")[0]): int(p.split(":")[1])
            for p in field.split(",")}


def test_trace_pairs_strictly_decrease():
    params, g, dec = chord_instance()
    res = solve_core(g, dec, params)
    assert res.trace_rows
    for row in res.trace_rows:
        kind, rb, ra, sb, sa = row.split("\t")
        rho_b = residue_of_sizes([], params)
        rho_b.counts = _parse_rho(rb)
        rho_a = residue_of_sizes([], params)
        rho_a.counts = _parse_rho(ra)
        sig_b = [] if sb == "-" else [int(x) for x in sb.split(",")]
        sig_a = [] if sa == "-" else [int(x) for x in sa.split(",")]
        assert rho_a < rho_b or (rho_a == rho_b and sigma_less(sig_a, sig_b))


def test_solver_randomised_states():
    kinds = {}
    certs = successes = 0
    for seed in range(250):
        rng = random.Random(seed)
        k = rng.choice([1, 1, 2])
        d = rng.choice([1, 2, 3, 4])
        params = compute_params(k, d)
        n = rng.randrange(6, 12)
        g, dec = random_solver_state(rng, n, k, rng.randrange(2, 6))
        res = solve_core(g, dec, params)
        if res.succeeded:
            successes += 1
            classes = [res.dec.blue_edges(b) for b in range(k)] \
                + [res.dec.red_edges()]
            assert verify_partition(g, params, classes).ok
        else:
            certs += 1
            assert verify_certificate(g, params, res.certificate)
            assert brute_force_gamma(g) > params.threshold
        for row in res.trace_rows:
            kinds[row.split("\t")[0]] = kinds.get(row.split("\t")[0], 0) + 1
    assert successes > 100
    assert "m1" in kinds or "m2" in kinds


def test_iteration_cap_dumps_state():
    params, g, dec = chord_instance()
    with pytest.raises(InternalCheckError) as err:
        solve_core(g, dec, params, max_iters=0)
    assert "tree_of" in err.value.dump


def test_certificate_on_dense_core():
    # K4 decomposes into a spanning tree plus a red forest, but its density
    # beats the k=1, d=1 threshold: the solver must emit a certificate
    params = compute_params(1, 1)
    g = MultiGraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    tree = {0, 3, 5}   # the path 0-1-2-3
    red = {1, 2, 4}
    dec = Decomposition.from_edge_classes(g, 1, 0, [tree], red)
    res = solve_core(g, dec, params)
    assert not res.succeeded
    assert verify_certificate(g, params, res.certificate)


def test_run_decompose_forest_input():
    params = compute_params(3, 5)
    g = MultiGraph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
    out = run_decompose(g, params)
    assert out.succeeded
    assert verify_partition(g, params, out.classes).ok


def test_run_decompose_infeasible_returns_certificate():
    params = compute_params(1, 1)
    g = MultiGraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    out = run_decompose(g, params)
    assert not out.succeeded
    assert verify_certificate(g, params, out.certificate)
    assert out.certificate.vertices == frozenset(range(4))


def test_run_decompose_degenerate_inputs():
    params = compute_params(1, 1)
    empty = MultiGraph(0, [])
    out = run_decompose(empty, params)
    assert out.succeeded and all(not c for c in out.classes)
    single = MultiGraph(1, [])
    out = run_decompose(single, compute_params(2, 3))
    assert out.succeeded
    assert verify_partition(single, compute_params(2, 3), out.classes).ok


def test_run_decompose_blob_bridge():
    params = compute_params(2, 2)
    g = generate(GenSpec("blob-bridge"))
    assert filter_feasible(g, params)
    out = run_decompose(g, params)
    assert out.succeeded
    report = verify_partition(g, params, out.classes)
    assert report.ok, report.to_lines()
