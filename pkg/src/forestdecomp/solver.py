"""The core potential-descent loop.

While some red component exceeds d_prime edges the solver picks the
largest one, roots the blue trees at its centre, orders the exploration
subgraph's components, and applies the cheapest applicable move:

  m1  recolour along a minimal special path at a witnessing arc whose
      parent/child sizes sum below d_prime,
  m2  split a small child off the root component,
  m3  run the child-splitting drive on a component with too many small
      children through one tree.

Every accepted move strictly decreases (residue vector, legal-order size
sequence); when no move applies the exploration subgraph itself is denser
than the threshold and is returned as a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (Decomposition, InternalCheckError, Params,
                   decomposition_violations, potential_decreased,
                   red_components, residue, sigma_less)
from .explore import build_exploration, build_legal_order, choose_root, \
    rebuild_order_with_prefix
from .paths import apply_special_path, find_minimal_special_path, \
    split_root_child
from .states import drive_and_finish, small_children_of
from .verify import DensityCertificate, density_diagnostics


@dataclass
class SolveResult:
    dec: Decomposition | None
    certificate: DensityCertificate | None
    moves: int
    op_counts: dict[str, int] = field(default_factory=dict)
    trace_rows: list[str] = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return self.dec is not None


def _pick_oversize(comps, d_prime):
    over = [c for c in comps if c.size > d_prime]
    if not over:
        return None
    return min(over, key=lambda c: (-c.size, min(c.vertices)))


def solve_core(core, dec0: Decomposition, params: Params, *, checked=True,
               max_iters=None, on_mutation=None) -> SolveResult:
    """Drive the decomposition of one core below the component bound.

    dec0 must be k rooted spanning trees plus a red forest on core.  The
    result either holds the final decomposition or a density certificate
    for the exploration subgraph that blocked progress.
    """
    dec = dec0.copy()
    cap = max_iters if max_iters is not None else 10 * max(core.m, 1) * max(core.n, 1)
    counts: dict[str, int] = {}
    rows: list[str] = []
    moves = 0

    def bump(kind, n=1):
        counts[kind] = counts.get(kind, 0) + n

    def note(kind, dec_after):
        if on_mutation is not None:
            on_mutation(kind, dec_after)

    explo = order = None
    while True:
        comps = red_components(dec)
        rstar = _pick_oversize(comps.comps, params.d_prime)
        if rstar is None:
            return SolveResult(dec=dec, certificate=None, moves=moves,
                               op_counts=counts, trace_rows=rows)
        if moves >= cap:
            raise InternalCheckError(
                "iteration cap exceeded", dump=_state_dump(dec, params))
        if order is None:
            r = choose_root(dec, rstar, params)
            dec = dec.rerooted(r)
            explo = build_exploration(dec)
            order = build_legal_order(dec, explo)

        rho0 = residue(dec, params)
        sigma0 = order.sizes()

        move = _find_move(dec, explo, order, params)
        if move is None:
            report, cert = density_diagnostics(dec.g, params, dec, explo, order)
            if not report.ok:
                raise InternalCheckError("stuck state fails the density bounds",
                                         dump={"report": report.to_lines()})
            return SolveResult(dec=None, certificate=cert, moves=moves,
                               op_counts=counts, trace_rows=rows)

        kind = move[0]
        repair = None
        if kind == "m1":
            _, j, w, path = move
            applied = apply_special_path(dec, order, path, params, checked=checked)
            dec = applied.dec
            bump("apply_special_path")
            note("apply_special_path", dec)
            repair = (path.i0, applied.v_minus1, order.witness[path.i0])
        elif kind == "m2":
            _, j = move
            dec = split_root_child(dec, order, j, params, checked=checked)
            bump("split_root_child")
            bump("edge_exchange")
            note("split_root_child", dec)
        else:
            _, j, b, lp = move
            outcome = drive_and_finish(dec, order, j, b, lp, params,
                                       checked=checked)
            dec = outcome.dec
            bump("main_augment", len(outcome.augments))
            bump("edge_exchange", len(outcome.augments))
            if outcome.kind == "special":
                bump("apply_special_path")
            note("drive_and_finish", dec)
            repair = (outcome.prefix_len, outcome.entry_vertex,
                      outcome.entry_witness)

        moves += 1
        rho1 = residue(dec, params)
        if rho0 < rho1:
            raise InternalCheckError("residue vector increased",
                                     dump=_state_dump(dec, params))
        if rho1 < rho0:
            comps1 = red_components(dec)
            if _pick_oversize(comps1.comps, params.d_prime) is None:
                order = explo = None
                sigma1: list[int] = []
            else:
                rstar1 = _pick_oversize(comps1.comps, params.d_prime)
                r1 = choose_root(dec, rstar1, params)
                dec = dec.rerooted(r1)
                explo = build_exploration(dec)
                order = build_legal_order(dec, explo)
                sigma1 = order.sizes()
        else:
            if repair is None:
                raise InternalCheckError("plateau move without an order repair")
            prefix_len, entry_vertex, entry_witness = repair
            if prefix_len < 1:
                raise InternalCheckError("plateau repair at the root position")
            prefix = [(order.comps[t], order.witness[t]) for t in range(prefix_len)]
            comps1 = red_components(dec)
            entry_comp = comps1.comps[comps1.comp_of[entry_vertex]]
            prefix.append((entry_comp, entry_witness))
            explo = build_exploration(dec)
            order = rebuild_order_with_prefix(dec, explo, prefix)
            sigma1 = order.sizes()
            if not sigma_less(sigma1, sigma0):
                raise InternalCheckError("legal order failed to shrink",
                                         dump=_state_dump(dec, params))
        if checked and not potential_decreased(rho0, sigma0, rho1, sigma1):
            raise InternalCheckError("potential failed to decrease")
        rows.append("\t".join([
            kind, rho0.encode(), rho1.encode(),
            ",".join(map(str, sigma0)) if sigma0 else "-",
            ",".join(map(str, sigma1)) if sigma1 else "-",
        ]))


def _find_move(dec, explo, order, params):
    for j in range(1, len(order.comps)):
        w = order.witness[j]
        parent = order.comp_at(w.tail)
        child = order.comps[j]
        if parent.size + child.size < params.d_prime:
            path = find_minimal_special_path(dec, explo, order, w)
            if path is None:
                raise InternalCheckError("witnessing arc admits no special path")
            return ("m1", j, w, path)
    rstar = order.comps[0]
    for j in range(1, len(order.comps)):
        w = order.witness[j]
        if order.comps[j].size <= params.ell and w.tail in rstar.vertices:
            return ("m2", j)
    for j in range(1, len(order.comps)):
        K = order.comps[j]
        if K.size <= params.ell:
            continue
        alpha = max(params.d_prime - K.size, 0)
        for b in range(dec.k):
            for lp in range(params.ell + 1):
                if alpha > lp:
                    continue
                kids = small_children_of(order, j, b, lp)
                if len(kids) >= lp - alpha + 2:
                    return ("m3", j, b, lp)
    return None


def _state_dump(dec, params):
    return {
        "k": params.k, "d": params.d, "d_prime": params.d_prime,
        "root": dec.root,
        "edges": list(dec.g.edges),
        "tree_of": list(dec.tree_of),
        "violations": decomposition_violations(dec),
    }


@dataclass
class DecomposeOutcome:
    classes: list[set[int]] | None        # k+1 edge classes, special last
    certificate: DensityCertificate | None
    trace_rows: list[str] = field(default_factory=list)
    op_counts: dict[str, int] = field(default_factory=dict)

    @property
    def succeeded(self) -> bool:
        return self.classes is not None


def run_decompose(g, params: Params, *, checked=True, max_iters=None,
                  on_mutation=None) -> DecomposeOutcome:
    """Full pipeline: density gate, normalisation, per-core solving, glue.

    Returns either k+1 verified edge classes of g (special forest last) or
    a density certificate when the input exceeds the threshold.
    """
    from .arboricity import fractional_arboricity
    from .packing import normalize
    from .verify import verify_partition

    if g.m > 0:
        gamma, witness = fractional_arboricity(g)
        if gamma > params.threshold:
            cert = DensityCertificate(vertices=witness.vertices,
                                      edge_count=witness.edge_count,
                                      k=params.k, d=params.d)
            return DecomposeOutcome(classes=None, certificate=cert)

    problem = normalize(g, params)
    rows: list[str] = []
    counts: dict[str, int] = {}
    results = []
    for task in problem.cores:
        res = solve_core(task.core, task.dec0, params, checked=checked,
                         max_iters=max_iters, on_mutation=on_mutation)
        if not res.succeeded:
            raise InternalCheckError(
                "solver found a dense region after the density gate",
                dump={"core_vertices": task.vertices_g})
        rows.extend(res.trace_rows)
        for key, n in res.op_counts.items():
            counts[key] = counts.get(key, 0) + n
        trees = [res.dec.blue_edges(b) for b in range(params.k)]
        results.append((trees, res.dec.red_edges()))
    classes = problem.glue(results)
    report = verify_partition(g, params, classes, special_index=-1)
    if not report.ok:
        raise InternalCheckError("glued output failed verification",
                                 dump={"report": report.to_lines()})
    return DecomposeOutcome(classes=classes, certificate=None,
                            trace_rows=rows, op_counts=counts)
