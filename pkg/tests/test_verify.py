from forestdecomp import (MultiGraph, compute_params,
                          run_decompose, verify_certificate, verify_partition)
from forestdecomp.core import Decomposition
from forestdecomp.explore import build_exploration, build_legal_order
from forestdecomp.instances import GenSpec, generate
from forestdecomp.solver import solve_core
from forestdecomp.verify import DensityCertificate, density_diagnostics

from conftest import build_decomposition, k4, path_graph


def test_partition_accepts_pipeline_output():
    params = compute_params(1, 2)
    g = generate(GenSpec("random-multigraph", n=8, m=9, seed=5))
    out = run_decompose(g, params)
    if out.succeeded:
        assert verify_partition(g, params, out.classes).ok


def test_partition_flags_cycle():
    params = compute_params(1, 1)
    g = MultiGraph(3, [(0, 1), (1, 2), (0, 2)])
    report = verify_partition(g, params, [{0, 1, 2}, set()])
    assert any(v.check == "class-cycle" for v in report.violations)


def test_partition_flags_oversized_special_component():
    params = compute_params(1, 1)  # d_prime = 1
    g = path_graph(4)
    report = verify_partition(g, params, [set(), {0, 1, 2}])
    assert any(v.check == "special-component-size" for v in report.violations)


def test_partition_flags_duplicates_and_missing():
    params = compute_params(1, 1)
    g = path_graph(3)
    report = verify_partition(g, params, [{0, 1}, {1}])
    checks = {v.check for v in report.violations}
    assert "edge-duplicated" in checks


def test_certificate_integer_arithmetic():
    params = compute_params(1, 1)  # threshold 4/3
    g = k4()
    assert verify_certificate(g, params, DensityCertificate(
        vertices=frozenset(range(4)), edge_count=6, k=1, d=1))
    # miscounted edges are rejected
    assert not verify_certificate(g, params, DensityCertificate(
        vertices=frozenset(range(4)), edge_count=5, k=1, d=1))
    # forests never qualify
    forest = path_graph(5)
    assert not verify_certificate(forest, params, frozenset(range(5)))
    # too-small vertex sets never qualify
    assert not verify_certificate(g, params, frozenset({0}))


def test_certificate_matches_brute_force(rng):
    for seed in range(60):
        g = generate(GenSpec("random-multigraph", n=6, m=11, seed=seed + 900))
        params = compute_params(1, 2)
        accepted = verify_certificate(g, params, frozenset(range(g.n)))
        from fractions import Fraction
        dens = Fraction(g.m, g.n - 1)
        assert accepted == (dens > params.threshold)


def test_density_diagnostics_accepts_stuck_state():
    params = compute_params(1, 1)
    g = k4()
    dec = Decomposition.from_edge_classes(g, 1, 0, [{0, 3, 5}], {1, 2, 4})
    res = solve_core(g, dec, params)
    assert not res.succeeded
    assert verify_certificate(g, params, res.certificate)


def test_density_diagnostics_hand_arithmetic():
    # k=1, d=4: K holds 4 edges and one 1-edge child, so the aggregate is
    # (4+1)/(5+2) = 5/7 >= 4/6 and the parent/child sum 4+1 hits d_prime
    # exactly; no move applies and the whole state certifies itself
    params = compute_params(1, 4)
    assert params.d_prime == 5
    red = [(i, i + 1) for i in range(6)] \
        + [(7, 8), (8, 9), (9, 10), (10, 11)] + [(12, 13)]
    parents = {1: 7, 8: 12}
    for v in list(range(2, 7)) + [7, 9, 10, 11, 12, 13]:
        parents[v] = 0
    g, dec = build_decomposition(14, 1, red, [parents])
    explo = build_exploration(dec)
    order = build_legal_order(dec, explo)
    report, cert = density_diagnostics(g, params, dec, explo, order)
    assert report.ok, report.to_lines()
    assert cert is not None and verify_certificate(g, params, cert)
    res = solve_core(g, dec, params)
    assert not res.succeeded and res.moves == 0
    assert res.certificate.vertices == frozenset(range(14))


def test_density_diagnostics_flags_small_parent():
    # a legal-order state that is nowhere near moveless: a small component
    # with a small child must be flagged
    params = compute_params(1, 4)  # ell = 1
    red = [(0, 1), (2, 3), (4, 5)]
    g, dec = build_decomposition(6, 1, red, [{1: 2, 2: 0, 3: 4, 4: 0, 5: 0}])
    explo = build_exploration(dec)
    order = build_legal_order(dec, explo)
    report, cert = density_diagnostics(g, params, dec, explo, order)
    assert cert is None
    checks = {v.check for v in report.violations}
    assert "small-parent-small" in checks
    assert "root-not-oversize" in checks
