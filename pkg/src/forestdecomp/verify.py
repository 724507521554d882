"""Independent validation of outputs, intermediate states and certificates.

Everything here is a read-only check producing structured violation
reports; density arguments are evaluated as integer cross-multiplications.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import Decomposition, MultiGraph, Params, _DSU
from .explore import Exploration, LegalOrder
from .states import ValidState, small_children_of, state_violations


@dataclass(frozen=True)
class Violation:
    check: str
    subject: str
    data: tuple = ()

    def to_line(self) -> str:
        return "\t".join([self.check, self.subject] + [str(x) for x in self.data])


@dataclass
class Report:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, check, subject, *data):
        self.violations.append(Violation(check, str(subject), tuple(data)))

    def to_lines(self) -> list[str]:
        return [v.to_line() for v in self.violations]


@dataclass(frozen=True)
class DensityCertificate:
    """Vertex set whose induced density strictly exceeds k + d/(d+k+1)."""

    vertices: frozenset
    edge_count: int
    k: int
    d: int

    @property
    def threshold(self) -> Fraction:
        return Fraction(self.k * (self.d + self.k + 1) + self.d,
                        self.d + self.k + 1)


def verify_partition(g: MultiGraph, params: Params, forests,
                     special_index: int = -1) -> Report:
    """Check k+1 edge classes: partition of E, acyclic classes, and every
    component of the special class at most d_prime edges."""
    report = Report()
    classes = [set(f) for f in forests]
    if len(classes) != params.k + 1:
        report.add("class-count", len(classes), params.k + 1)
        return report
    special_index %= len(classes)
    seen: dict[int, int] = {}
    for i, cl in enumerate(classes):
        for eid in cl:
            if not (0 <= eid < g.m):
                report.add("edge-range", eid, i)
            elif eid in seen:
                report.add("edge-duplicated", eid, seen[eid], i)
            else:
                seen[eid] = i
    for eid in range(g.m):
        if eid not in seen:
            report.add("edge-missing", eid)
    for i, cl in enumerate(classes):
        dsu = _DSU(g.n)
        for eid in sorted(cl):
            if not (0 <= eid < g.m):
                continue
            u, v = g.edges[eid]
            if not dsu.union(u, v):
                report.add("class-cycle", i, eid)
    special = classes[special_index]
    dsu = _DSU(g.n)
    for eid in special:
        if 0 <= eid < g.m:
            u, v = g.edges[eid]
            dsu.union(u, v)
    sizes: dict[int, int] = {}
    for eid in special:
        if 0 <= eid < g.m:
            root = dsu.find(g.edges[eid][0])
            sizes[root] = sizes.get(root, 0) + 1
    for root, cnt in sorted(sizes.items()):
        if cnt > params.d_prime:
            report.add("special-component-size", root, cnt, params.d_prime)
    return report


def verify_certificate(g: MultiGraph, params: Params, cert) -> bool:
    """Recount induced edges and evaluate the strict density inequality in
    integers.  cert may be a DensityCertificate or a bare vertex set."""
    vertices = cert.vertices if hasattr(cert, "vertices") else frozenset(cert)
    if len(vertices) < 2:
        return False
    if any(not (0 <= v < g.n) for v in vertices):
        return False
    cnt = g.induced_edge_count(vertices)
    if hasattr(cert, "edge_count") and cert.edge_count != cnt:
        return False
    k, d = params.k, params.d
    return cnt * (d + k + 1) > (k * (d + k + 1) + d) * (len(vertices) - 1)


def check_valid_state(state: ValidState) -> Report:
    """Evaluate the nine drive-state conditions independently."""
    report = Report()
    for code, msg in state_violations(state):
        report.add(code, msg)
    return report


def density_diagnostics(g: MultiGraph, params: Params, dec: Decomposition,
                        explo: Exploration, order: LegalOrder):
    """Stuck-state bookkeeping: child counts and aggregate densities.

    Called when no move applies.  Verifies the per-component bounds that a
    moveless state must satisfy and, if they all hold, packages the
    exploration vertex set as a density certificate.  A violation means an
    applicable move was missed, so each carries the failing bound.
    """
    report = Report()
    k, d, ell, dp = params.k, params.d, params.ell, params.d_prime
    comps = order.comps
    t = len(comps)
    parent_pos = [None] * t
    for j in range(1, t):
        parent_pos[j] = order.pos(order.witness[j].tail)

    children: list[list[int]] = [[] for _ in range(t)]
    for j in range(1, t):
        children[parent_pos[j]].append(j)

    if comps[0].size <= dp:
        report.add("root-not-oversize", 0, comps[0].size, dp)

    for j in range(1, t):
        K = comps[parent_pos[j]]
        C = comps[j]
        if K.size + C.size < dp:
            report.add("parent-child-sum", j, K.size, C.size, dp)
        if C.size <= ell and K.size <= ell:
            report.add("small-parent-small", j, K.size, C.size)

    for c in children[0]:
        if comps[c].size <= ell:
            report.add("root-small-child", c, comps[c].size)

    for j in range(1, t):
        K = comps[j]
        if K.size <= ell:
            continue
        alpha = max(dp - K.size, 0)
        for b in range(dec.k):
            for lp in range(ell + 1):
                kids = small_children_of(order, j, b, lp)
                bound = max(lp - alpha + 1, 0)
                if len(kids) > bound:
                    report.add("child-count", j, b, lp, len(kids), bound)
        num = K.size + sum(comps[c].size for c in children[j]
                           if comps[c].size <= ell)
        den = (K.size + 1) + sum(comps[c].size + 1 for c in children[j]
                                 if comps[c].size <= ell)
        if Fraction(num, den) < Fraction(d, d + k + 1):
            report.add("component-density", j, num, den, d, d + k + 1)

    root_e = comps[0].size
    if not (Fraction(root_e, root_e + 1) > Fraction(dp, dp + 1)
            > Fraction(d, d + k + 1)):
        report.add("root-density", 0, root_e, dp)

    er = explo.red_edge_count
    vh = len(explo.vertices)
    if not er * (d + k + 1) > d * (vh - 1):
        report.add("global-density", 0, er, vh)

    if not report.ok:
        return report, None
    cert = DensityCertificate(vertices=frozenset(explo.vertices),
                              edge_count=g.induced_edge_count(explo.vertices),
                              k=k, d=d)
    if not verify_certificate(g, params, cert):
        report.add("certificate-self-check", 0)
        return report, None
    return report, cert
