"""Built-in oracle suites for the selftest subcommand.

Small and fast: every check compares an implementation against an
independent brute-force computation.
"""

from __future__ import annotations

from .arboricity import brute_force_gamma, exceeds_density, fractional_arboricity
from .core import compute_params
from .instances import (GenSpec, filter_feasible, generate, parse_edge_list,
                        write_edge_list)
from .packing import pack_k_forests, union_rank_by_enumeration


def run_selftest(seed: int = 2024) -> list[str]:
    failures: list[str] = []

    for k in range(1, 5):
        for d in range(1, 21):
            p = compute_params(k, d)
            if not (2 * p.ell + 1 <= d <= p.d_prime):
                failures.append(f"params k={k} d={d}")

    for i in range(40):
        g = generate(GenSpec("random-multigraph", n=7, m=11, seed=seed + i))
        if g.m == 0:
            continue
        gamma, witness = fractional_arboricity(g)
        if gamma != brute_force_gamma(g):
            failures.append(f"gamma mismatch seed={seed + i}")
        if not witness.verify(g):
            failures.append(f"witness broken seed={seed + i}")
        if exceeds_density(g, gamma) is not None:
            failures.append(f"gamma not maximal seed={seed + i}")

    for i in range(25):
        g = generate(GenSpec("random-multigraph", n=5, m=6, seed=seed + 100 + i))
        for k in (1, 2):
            packing = pack_k_forests(g, k)
            if packing.packed_size != union_rank_by_enumeration(g, k):
                failures.append(f"pack size wrong seed={seed + 100 + i} k={k}")

    g = generate(GenSpec("random-multigraph", n=6, m=9, seed=seed))
    if parse_edge_list(write_edge_list(g)).edges != g.edges:
        failures.append("edge list round trip")

    p = compute_params(1, 2)
    forest = generate(GenSpec("forest-plus-noise", n=9, m=8, seed=seed))
    if forest.m and not filter_feasible(forest, p) \
            and brute_force_gamma(forest) <= p.threshold:
        failures.append("feasibility filter")
    return failures
