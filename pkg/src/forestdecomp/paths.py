"""Decomposition mutations: edge exchange, root-child split, special paths.

A special path is a blue directed path ending at a designated arc between
two red components, starting strictly earlier in the legal order.
Augmenting along a minimal one recolours its terminal arc red and the
start's red auxiliary-parent edge blue, leaving every blue arc with an
early tail untouched; that prefix stability is what makes the legal-order
potential drop.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .core import (Decomposition, InternalCheckError, Params, RED, _DSU,
                   decomposition_violations, red_components, residue,
                   residue_of_sizes)
from .explore import Exploration, LegalOrder, Witness


def edge_exchange(dec: Decomposition, b: int, u: int, red_eid: int,
                  checked: bool = True) -> Decomposition:
    """Swap u's tree-b parent arc with a red edge at the cycle it closes.

    One endpoint of the red edge must be a tree-b descendant of u and the
    other must not; the path from the descendant endpoint up to u is
    reoriented so the result is again k rooted trees plus a red forest.
    """
    g = dec.g
    if u == dec.root:
        raise ValueError("root has no parent arc to exchange")
    if dec.tree_of[red_eid] != RED:
        raise ValueError("exchange partner is not red")
    p, q = g.edges[red_eid]
    p_desc = dec.is_descendant(b, p, u)
    q_desc = dec.is_descendant(b, q, u)
    if p_desc == q_desc:
        raise ValueError("red edge endpoints straddle the subtree incorrectly")
    v1, v2 = (p, q) if p_desc else (q, p)

    blue_eid = dec.parent_e[b][u]
    dsu = _DSU(g.n)
    for eid in dec.red_edges():
        if eid != red_eid:
            a, c = g.edges[eid]
            dsu.union(a, c)
    if dsu.find(u) == dsu.find(dec.parent_v[b][u]):
        raise ValueError("recolouring the blue arc would close a red cycle")

    out = dec.copy()
    out.tree_of[blue_eid] = RED
    out.tree_of[red_eid] = b
    chain = []
    x = v1
    while x != u:
        chain.append(x)
        x = dec.parent_v[b][x]
    chain.append(u)
    out.parent_v[b][v1] = v2
    out.parent_e[b][v1] = red_eid
    for i in range(1, len(chain)):
        out.parent_v[b][chain[i]] = chain[i - 1]
        out.parent_e[b][chain[i]] = dec.parent_e[b][chain[i - 1]]
    if checked:
        bad = decomposition_violations(out)
        if bad:
            raise InternalCheckError("edge exchange broke the decomposition",
                                     {"violations": bad})
    return out


def split_root_child(dec: Decomposition, order: LegalOrder, child_pos: int,
                     params: Params, checked: bool = True) -> Decomposition:
    """Detach a small child of the oversize root component.

    Walks the red path from the generating tail towards the root, finds the
    first vertex that is not a blue descendant of the tail, and exchanges
    the generating arc with the red edge crossed there.  The root side
    keeps at least ell+1 edges and the detached side stays strictly below
    the old component size, so the residue vector drops.
    """
    comp = order.comps[child_pos]
    w = order.witness[child_pos]
    if w is None:
        raise ValueError("the root component has no witnessing arc")
    if comp.size > params.ell:
        raise ValueError("child is not small")
    rstar = order.comps[0]
    if w.tail not in rstar.vertices:
        raise ValueError("witnessing arc does not come from the root component")
    b, x = w.tree, w.tail
    if dec.parent_e[b][x] != w.eid:
        raise ValueError("witnessing arc is no longer the tail's parent arc")

    g = dec.g
    nbr: dict[int, list[tuple[int, int]]] = {v: [] for v in rstar.vertices}
    for eid in rstar.edges:
        a, c = g.edges[eid]
        nbr[a].append((eid, c))
        nbr[c].append((eid, a))
    prev: dict[int, tuple[int, int]] = {x: (-1, -1)}
    queue = [x]
    for cur in queue:
        if cur == dec.root:
            break
        for eid, nxt in nbr[cur]:
            if nxt not in prev:
                prev[nxt] = (eid, cur)
                queue.append(nxt)
    path = []
    cur = dec.root
    while cur != x:
        eid, back = prev[cur]
        path.append((eid, cur))
        cur = back
    path.reverse()  # [(edge, vertex)] from x's red neighbour out to the root

    cut_eid = -1
    for eid, vertex in path:
        if not dec.is_descendant(b, vertex, x):
            cut_eid = eid
            break
    if cut_eid == -1:
        raise InternalCheckError("red path to the root stayed inside the subtree")

    e_rstar = rstar.size
    out = edge_exchange(dec, b, x, cut_eid, checked=checked)
    if checked:
        comps2 = red_components(out)
        r_side = comps2.of_vertex(dec.root).size
        x_side = comps2.of_vertex(x).size
        if r_side < params.ell + 1:
            raise InternalCheckError("root side lost the centre guarantee")
        if x_side >= e_rstar:
            raise InternalCheckError("detached side did not shrink")
    return out


@dataclass
class SpecialPath:
    vertices: list[int]                 # v_0 .. v_l, v_l the terminal head
    arcs: list[tuple[int, int]]         # (tree, eid) per consecutive arc
    v_minus1: int                       # red auxiliary parent of v_0
    v_minus1_eid: int
    i0: int                             # legal-order position of v_0
    terminal: Witness


def find_minimal_special_path(dec: Decomposition, explo: Exploration,
                              order: LegalOrder, terminal: Witness) -> SpecialPath | None:
    """Minimal special path ending at the given inter-component arc.

    Valid starts reach the terminal tail over blue arcs inside the
    exploration subgraph (never passing the terminal head), sit strictly
    earlier in the order than the head, are auxiliary ancestors of the
    tail when they share its component, and own a red auxiliary parent.
    Minimality: smallest order position, then auxiliary-ancestor-most,
    then smallest vertex id.
    """
    tail, head = terminal.tail, terminal.head
    if order.pos(tail) == order.pos(head):
        raise ValueError("terminal arc endpoints share a red component")
    if not dec.has_blue_arc(tail, head, terminal.eid):
        raise ValueError("terminal arc is not a current blue arc")

    children: list[list[int]] = [[] for _ in range(dec.g.n)]
    for v in explo.vertices:
        for b in range(dec.k):
            p = dec.parent_v[b][v]
            if p != -1 and p in explo.vertices:
                children[p].append(v)

    reach = {tail}
    stack = [tail]
    while stack:
        x = stack.pop()
        for c in children[x]:
            if c != head and c not in reach:
                reach.add(c)
                stack.append(c)

    head_pos = order.pos(head)
    tail_pos = order.pos(tail)
    cands = []
    for v in reach:
        pv = order.pos(v)
        if pv >= head_pos:
            continue
        if pv == tail_pos and not order.is_aux_ancestor(v, tail):
            continue
        if order.aux_red_parent(v) is None:
            continue
        cands.append(v)
    if not cands:
        return None
    best_pos = min(order.pos(v) for v in cands)
    pool = [v for v in cands if order.pos(v) == best_pos]
    pool = [v for v in pool
            if not any(u != v and order.is_aux_ancestor(u, v) for u in pool)]
    v0 = min(pool)

    # shortest blue path v0 -> tail avoiding the head, trees tried in order
    prev: dict[int, tuple[int, int, int]] = {v0: (-1, -1, -1)}
    queue = [v0]
    qi = 0
    while qi < len(queue) and tail not in prev:
        x = queue[qi]
        qi += 1
        for b in range(dec.k):
            p = dec.parent_v[b][x]
            if p == -1 or p == head or p not in explo.vertices or p in prev:
                continue
            prev[p] = (x, b, dec.parent_e[b][x])
            queue.append(p)
    if tail not in prev:
        raise InternalCheckError("reverse reachability disagreed with forward search")
    verts = [tail]
    arcs: list[tuple[int, int]] = []
    x = tail
    while x != v0:
        px, b, eid = prev[x]
        arcs.append((b, eid))
        verts.append(px)
        x = px
    verts.reverse()
    arcs.reverse()
    verts.append(head)
    arcs.append((terminal.tree, terminal.eid))

    vm1 = order.aux_red_parent(v0)
    vm1_eid = min(eid for eid in order.comp_at(v0).edges
                  if set(dec.g.edges[eid]) == {v0, vm1})
    return SpecialPath(vertices=verts, arcs=arcs, v_minus1=vm1,
                       v_minus1_eid=vm1_eid, i0=best_pos, terminal=terminal)


@dataclass
class ApplyOutcome:
    dec: Decomposition
    i0: int
    v_minus1: int
    items_ok: bool


def _early_arc_snapshot(dec: Decomposition, order: LegalOrder, i0: int):
    snap = []
    for b in range(dec.k):
        arcs = set()
        for v in range(dec.g.n):
            if order.pos(v) < i0 and dec.parent_v[b][v] != -1:
                arcs.add((v, dec.parent_v[b][v], dec.parent_e[b][v]))
        snap.append(arcs)
    return snap


def _segments(path: SpecialPath):
    segs = []
    lo = 0
    for i in range(1, len(path.arcs)):
        if path.arcs[i][0] != path.arcs[lo][0]:
            segs.append((path.arcs[lo][0], lo, i - 1))
            lo = i
    segs.append((path.arcs[lo][0], lo, len(path.arcs) - 1))
    return segs


def _shift_construction(dec: Decomposition, path: SpecialPath) -> Decomposition | None:
    """Move each segment's top arc into the next segment's tree.

    Validity of every touched tree is checked afterwards; returns None when
    the composite reattachment nests badly and the exact fallback must run.
    """
    out = dec.copy()
    verts, arcs = path.vertices, path.arcs
    segs = _segments(path)

    out.tree_of[path.v_minus1_eid] = segs[0][0]
    out.tree_of[arcs[-1][1]] = RED
    for j in range(1, len(segs)):
        prev_top_eid = arcs[segs[j - 1][2]][1]
        out.tree_of[prev_top_eid] = segs[j][0]

    for j, (tree, lo, hi) in enumerate(segs):
        if j == 0:
            out.parent_v[tree][verts[lo]] = path.v_minus1
            out.parent_e[tree][verts[lo]] = path.v_minus1_eid
        else:
            z_prev, e_prev = verts[segs[j - 1][2]], arcs[segs[j - 1][2]][1]
            out.parent_v[tree][verts[lo]] = z_prev
            out.parent_e[tree][verts[lo]] = e_prev
        for i in range(lo, hi):
            out.parent_v[tree][verts[i + 1]] = verts[i]
            out.parent_e[tree][verts[i + 1]] = arcs[i][1]

    if decomposition_violations(out):
        return None
    return out


class _RepackProblem:
    """Shared state for the exact special-path reassignment search."""

    def __init__(self, dec: Decomposition, order: LegalOrder, path: SpecialPath):
        self.dec = dec
        self.g = dec.g
        self.k = dec.k
        self.path = path
        self.terminal_eid = path.arcs[-1][1]
        self.v0 = path.vertices[0]
        self.frozen: list[list[tuple[int, int, int]]] = [[] for _ in range(dec.k)]
        self.frozen_eids: set[int] = set()
        for b in range(dec.k):
            for v in range(self.g.n):
                if order.pos(v) < path.i0 and dec.parent_v[b][v] != -1:
                    self.frozen[b].append((v, dec.parent_v[b][v],
                                           dec.parent_e[b][v]))
                    self.frozen_eids.add(dec.parent_e[b][v])
        blue = set(e for e in range(self.g.m) if dec.tree_of[e] != RED)
        blue.discard(self.terminal_eid)
        blue.add(path.v_minus1_eid)
        self.target_blue = blue
        self.red = set(range(self.g.m)) - blue
        path_verts = set(path.vertices) | {path.v_minus1}
        self.free = sorted(
            blue - self.frozen_eids - {path.v_minus1_eid},
            key=lambda e: (not (self.g.edges[e][0] in path_verts
                                or self.g.edges[e][1] in path_verts), e))
        first = path.arcs[0][0]
        self.tree_order = [first] + [b for b in range(dec.k) if b != first]

    def pinned_assignment(self, forced_tree: int) -> dict[int, int]:
        assign = {self.path.v_minus1_eid: forced_tree}
        for b in range(self.k):
            for _, _, eid in self.frozen[b]:
                assign[eid] = b
        return assign

    def finish(self, assign: dict[int, int]) -> Decomposition | None:
        """Materialise a candidate and hold it to the arc constraints."""
        trees = [set() for _ in range(self.k)]
        for eid, b in assign.items():
            trees[b].add(eid)
        try:
            cand = Decomposition.from_edge_classes(self.g, self.k,
                                                   self.dec.root, trees,
                                                   self.red)
        except ValueError:
            return None
        for b in range(self.k):
            for v, pv, pe in self.frozen[b]:
                if cand.parent_v[b][v] != pv or cand.parent_e[b][v] != pe:
                    return None
        b0 = assign[self.path.v_minus1_eid]
        if cand.parent_e[b0][self.v0] != self.path.v_minus1_eid:
            return None
        return cand


def _union_completion(prob: _RepackProblem, forced_tree: int) -> dict[int, int] | None:
    """Complete the pinned assignment to a full packing by augmenting paths
    that never displace a pinned element; membership-exact and fast."""
    g = prob.g
    assign = prob.pinned_assignment(forced_tree)
    pinned = set(assign)

    def circuit(b, eid, cur):
        u, v = g.edges[eid]
        nbr: dict[int, list[tuple[int, int]]] = {}
        for e2, bb in cur.items():
            if bb != b:
                continue
            a, c = g.edges[e2]
            nbr.setdefault(a, []).append((e2, c))
            nbr.setdefault(c, []).append((e2, a))
        prev = {u: (-1, -1)}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                out = []
                y = v
                while y != u:
                    e2, z = prev[y]
                    out.append(e2)
                    y = z
                return out
            for e2, y in nbr.get(x, ()):
                if y not in prev:
                    prev[y] = (e2, x)
                    stack.append(y)
        return None

    for eid in prob.free:
        parent = {eid: -1}
        queue = [eid]
        qi = 0
        done = False
        while qi < len(queue) and not done:
            x = queue[qi]
            qi += 1
            for b in range(prob.k):
                circ = circuit(b, x, assign)
                if circ is None:
                    y, tb = x, b
                    while y != -1:
                        prev_tree = assign.get(y)
                        assign[y] = tb
                        y = parent[y]
                        tb = prev_tree
                    done = True
                    break
                for f in circ:
                    if f not in parent and f not in pinned:
                        parent[f] = x
                        queue.append(f)
        if not done:
            return None
    return assign


def _pruned_dfs(prob: _RepackProblem, forced_tree: int, budget: list[int],
                shuffle=None) -> Decomposition | None:
    g = prob.g
    dsus = [_DSU(g.n) for _ in range(prob.k)]
    sizes = [0] * prob.k
    assign = prob.pinned_assignment(forced_tree)
    for eid, b in assign.items():
        u, v = g.edges[eid]
        if not dsus[b].union(u, v):
            return None
        sizes[b] += 1

    free = list(prob.free)
    if shuffle is not None:
        shuffle.shuffle(free)
    choice: dict[int, int] = {}

    def completable(idx) -> bool:
        pending = free[idx:]
        for b in range(prob.k):
            if sizes[b] == g.n - 1:
                continue
            probe = _DSU(g.n)
            parts = g.n
            for eid, bb in assign.items():
                if bb == b and probe.union(*g.edges[eid]):
                    parts -= 1
            for eid, bb in choice.items():
                if bb == b and probe.union(*g.edges[eid]):
                    parts -= 1
            for eid in pending:
                if probe.union(*g.edges[eid]):
                    parts -= 1
            if parts > 1:
                return False
        return True

    def dfs(idx: int) -> Decomposition | None:
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        if idx == len(free):
            full = dict(assign)
            full.update(choice)
            return prob.finish(full)
        eid = free[idx]
        u, v = g.edges[eid]
        cur = prob.dec.tree_of[eid]
        trees_order = list(range(prob.k))
        if 0 <= cur < prob.k:
            trees_order.remove(cur)
            trees_order.insert(0, cur)
        if shuffle is not None:
            shuffle.shuffle(trees_order)
        for b in trees_order:
            if sizes[b] >= g.n - 1 or dsus[b].find(u) == dsus[b].find(v):
                continue
            saved = [list(dsus[b].parent), list(dsus[b].size)]
            dsus[b].union(u, v)
            sizes[b] += 1
            choice[eid] = b
            if completable(idx + 1):
                got = dfs(idx + 1)
                if got is not None:
                    return got
            del choice[eid]
            sizes[b] -= 1
            dsus[b].parent, dsus[b].size = saved
        return None

    return dfs(0)


def _repack_construction(dec: Decomposition, order: LegalOrder,
                         path: SpecialPath) -> Decomposition:
    """Exact fallback for the special-path recolouring.

    Escalates: a matroid-union completion around the pinned arcs (fast,
    membership-exact, kept when the induced orientations line up), then a
    depth-first search over the unfrozen edges with completability
    pruning, then randomised restarts of that search.
    """
    import random as _random

    prob = _RepackProblem(dec, order, path)
    for b in prob.tree_order:
        assign = _union_completion(prob, b)
        if assign is not None:
            cand = prob.finish(assign)
            if cand is not None:
                return cand
    for b in prob.tree_order:
        budget = [100_000]
        cand = _pruned_dfs(prob, b, budget)
        if cand is not None:
            return cand
    rng = _random.Random(0xD1CE)
    for round_ in range(12):
        for b in prob.tree_order:
            budget = [40_000]
            cand = _pruned_dfs(prob, b, budget, shuffle=rng)
            if cand is not None:
                return cand
    raise InternalCheckError("special path repacking found no assignment",
                             {"path": path.vertices})


def apply_special_path(dec: Decomposition, order: LegalOrder, path: SpecialPath,
                       params: Params, checked: bool = True,
                       rho_budget=None) -> ApplyOutcome:
    """Recolour along a minimal special path.

    The terminal arc turns red, the start's red auxiliary-parent edge turns
    blue, all blue arcs whose tails precede the start's component stay
    fixed, and the undirected blue multiset changes by exactly that swap.
    The merge across the terminal arc must not raise the residue vector
    over rho_budget (the current residue when no budget is supplied; the
    child-splitting drive passes its start residue instead).
    """
    g = dec.g
    i0 = path.i0
    for v in path.vertices[:-1]:
        if order.pos(v) < i0:
            raise InternalCheckError("special path passes an early vertex")

    comps = red_components(dec)
    sizes = [c.size for c in comps.comps]
    t_tail = comps.comp_of[path.terminal.tail]
    t_head = comps.comp_of[path.terminal.head]
    merged = sizes[t_tail] + sizes[t_head] + 1
    sim = [s for i, s in enumerate(sizes) if i not in (t_tail, t_head)] + [merged]
    budget = rho_budget if rho_budget is not None else residue(dec, params)
    if budget < residue_of_sizes(sim, params):
        raise ValueError("merging across the terminal arc would raise the residue")

    early0 = _early_arc_snapshot(dec, order, i0)
    blue0 = Counter(e for e in range(g.m) if dec.tree_of[e] != RED)
    red0 = dec.red_edges()

    out = _shift_construction(dec, path)
    if out is None:
        out = _repack_construction(dec, order, path)

    if checked:
        _assert_special_path_items(dec, out, order, path, early0, blue0, red0)
    return ApplyOutcome(dec=out, i0=i0, v_minus1=path.v_minus1, items_ok=True)


def _assert_special_path_items(dec, out, order, path, early0, blue0, red0):
    g = dec.g
    terminal_eid = path.arcs[-1][1]
    want_red = (red0 - {path.v_minus1_eid}) | {terminal_eid}
    if out.red_edges() != want_red:
        raise InternalCheckError("red set mismatch after special path")
    b0 = out.tree_of[path.v_minus1_eid]
    if b0 == RED or out.parent_e[b0][path.vertices[0]] != path.v_minus1_eid \
            or out.parent_v[b0][path.vertices[0]] != path.v_minus1:
        raise InternalCheckError("start vertex not rehung on its red parent")
    early1 = _early_arc_snapshot(out, order, path.i0)
    if early1 != early0:
        raise InternalCheckError("an early-tailed blue arc moved")
    blue1 = Counter(e for e in range(g.m) if out.tree_of[e] != RED)
    delta = Counter(blue0)
    delta.subtract(blue1)
    delta = +delta if sum(delta.values()) >= 0 else delta
    changed = {e for e, c in (Counter(blue0) - Counter(blue1)).items() if c} \
        | {e for e, c in (Counter(blue1) - Counter(blue0)).items() if c}
    if changed != {terminal_eid, path.v_minus1_eid}:
        raise InternalCheckError("blue multiset changed beyond the swap")
    bad = decomposition_violations(out)
    if bad:
        raise InternalCheckError("special path broke the decomposition",
                                 {"violations": bad})
