"""The child-splitting drive: anchored intermediate states and their moves.

When a non-root component K generates several small children through one
tree, the drive performs edge exchanges that cut K apart so that every
surviving piece is linked to at most one child, keeping a nine-condition
invariant (C1..C9) over an anchored decomposition.  Each exchange strictly
shrinks the distinguished large piece; once it is gone the drive finishes
either by adopting the decomposition outright or through one final special
path at the anchor, and the legal-order potential drops.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (Decomposition, InternalCheckError, Params, RED, RedComp,
                   red_components, residue)
from .explore import LegalOrder, Witness, build_exploration, \
    rebuild_order_with_prefix
from .paths import apply_special_path, edge_exchange, find_minimal_special_path


@dataclass
class DriveContext:
    """Frozen snapshot of the decomposition and order at drive start."""

    params: Params
    dec_star: Decomposition
    order_star: LegalOrder
    K: RedComp
    K_pos: int
    b: int
    lp: int                            # child size bound, at most ell
    X: list[int]                       # generating tails in tree b
    xprime: dict[int, int]             # tail -> head of its generating arc
    gen_eid: dict[int, int]
    child_comp: dict[int, RedComp]
    I: int                             # min order position over pruned subtrees
    wK: int
    wK_witness: Witness
    alpha: int

    @property
    def iK(self) -> int:
        return self.K_pos

    @property
    def big_piece_floor(self) -> int:
        return max(self.params.d_prime, self.K.size) - self.lp


def pruned_subtree(dec: Decomposition, b: int, root: int, cut: set) -> list[int]:
    """Descendants of root in tree b, not descending through other cut
    vertices."""
    children = dec.children_lists(b)
    out = [root]
    stack = [root]
    while stack:
        v = stack.pop()
        for c in children[v]:
            if c in cut and c != root:
                continue
            out.append(c)
            stack.append(c)
    return out


def small_children_of(order: LegalOrder, K_pos: int, b: int, lp: int):
    """Children of the component at K_pos generated by tree b with at most
    lp edges, as (position, witness) pairs."""
    K = order.comps[K_pos]
    out = []
    for j in range(1, len(order.comps)):
        w = order.witness[j]
        if w is None or w.tree != b:
            continue
        if w.tail in K.vertices and order.comps[j].size <= lp:
            out.append((j, w))
    return out


def make_drive_context(dec: Decomposition, order: LegalOrder, K_pos: int,
                       b: int, lp: int, params: Params) -> DriveContext:
    if K_pos == 0:
        raise ValueError("the root component is never a drive target")
    K = order.comps[K_pos]
    if K.size <= params.ell:
        raise ValueError("drive target must not be small")
    if not (0 <= lp <= params.ell):
        raise ValueError("child bound out of range")
    kids = small_children_of(order, K_pos, b, lp)
    if not kids:
        raise ValueError("no qualifying children")
    X, xprime, gen_eid, child_comp = [], {}, {}, {}
    for j, w in kids:
        X.append(w.tail)
        xprime[w.tail] = w.head
        gen_eid[w.tail] = w.eid
        child_comp[w.tail] = order.comps[j]
    X.sort()
    if len(set(X)) != len(X):
        raise InternalCheckError("two children share a generating tail")
    cut = set(X)
    I = min(min(order.pos(v) for v in pruned_subtree(dec, b, x, cut))
            for x in X)
    wK_witness = order.witness[K_pos]
    alpha = max(params.d_prime - K.size, 0)
    return DriveContext(params=params, dec_star=dec.copy(), order_star=order,
                        K=K, K_pos=K_pos, b=b, lp=lp, X=X, xprime=xprime,
                        gen_eid=gen_eid, child_comp=child_comp, I=I,
                        wK=wK_witness.head, wK_witness=wK_witness, alpha=alpha)


class ValidState:
    """A decomposition mid-drive plus its anchor vertex."""

    def __init__(self, ctx: DriveContext, dec: Decomposition, anchor: int):
        self.ctx = ctx
        self.dec = dec
        self.anchor = anchor

    # -- derived sets, recomputed from scratch (desk scale) ----------------

    def pieces(self) -> list[RedComp]:
        """Components of the red forest restricted to K's vertex set."""
        g = self.dec.g
        kv = self.ctx.K.vertices
        nbr: dict[int, list[tuple[int, int]]] = {v: [] for v in kv}
        for eid in self.dec.red_edges():
            u, v = g.edges[eid]
            if u in kv and v in kv:
                nbr[u].append((eid, v))
                nbr[v].append((eid, u))
        seen = set()
        out = []
        for s in sorted(kv):
            if s in seen:
                continue
            vs, es = [s], set()
            seen.add(s)
            q = [s]
            for x in q:
                for eid, y in nbr[x]:
                    es.add(eid)
                    if y not in seen:
                        seen.add(y)
                        vs.append(y)
                        q.append(y)
            out.append(RedComp(frozenset(vs), frozenset(es)))
        return out

    def big_pieces(self) -> list[RedComp]:
        floor = self.ctx.big_piece_floor
        return [L for L in self.pieces() if L.size >= floor]

    def kprime(self) -> RedComp | None:
        big = self.big_pieces()
        if not big:
            return None
        return max(big, key=lambda c: (c.size, -min(c.vertices)))

    def gen_blue(self, x: int) -> bool:
        return self.dec.parent_e[self.ctx.b][x] == self.ctx.gen_eid[x]

    def gen_reversed(self, x: int) -> bool:
        xp = self.ctx.xprime[x]
        return self.dec.parent_e[self.ctx.b][xp] == self.ctx.gen_eid[x]

    def gen_red(self, x: int) -> bool:
        return self.dec.tree_of[self.ctx.gen_eid[x]] == RED

    def s_set(self) -> set[int]:
        kp = self.kprime()
        if kp is None:
            return set()
        return {x for x in self.ctx.X if x in kp.vertices and self.gen_blue(x)}

    def special_set(self) -> set[int]:
        ctx = self.ctx
        s = self.s_set()
        out = set()
        for v in ctx.X:
            if not self.gen_blue(v):
                continue
            sub = pruned_subtree(self.dec, ctx.b, v, s | {v})
            if ctx.I < ctx.iK:
                if min(ctx.order_star.pos(z) for z in sub) == ctx.I:
                    out.add(v)
            else:
                if ctx.wK in sub:
                    out.add(v)
        return out

    def anchor_is_special(self) -> bool:
        return self.anchor in self.special_set()

    def extender(self) -> int | None:
        kp = self.kprime()
        if kp is None:
            return None
        # unique on valid states (C4 and C7 force it); tolerate corrupt ones
        ts = [x for x in self.ctx.X if x in kp.vertices and self.gen_red(x)]
        return min(ts) if ts else None

    def u_vertex(self) -> int:
        t = self.extender()
        return t if t is not None else self.anchor

    def sbar(self) -> set[int]:
        s = self.s_set()
        return s | {self.anchor} if self.anchor_is_special() else s

    def sring(self) -> set[int]:
        s = self.s_set()
        return s - {self.anchor} if self.anchor_is_special() else s


def _full_comp_of(dec: Decomposition, v: int) -> RedComp:
    comps = red_components(dec)
    return comps.comps[comps.comp_of[v]]


def _prefix_ok(ctx: DriveContext, dec: Decomposition, upto: int) -> str | None:
    """Do the order positions 0..upto survive in dec, each witnessable from
    an earlier one?"""
    comps = red_components(dec)
    placed: set[int] = set()
    for j in range(upto + 1):
        old = ctx.order_star.comps[j]
        v0 = next(iter(old.vertices))
        cur = comps.comps[comps.comp_of[v0]]
        if cur.vertices != old.vertices or cur.edges != old.edges:
            return f"order prefix component {j} changed"
        if j > 0:
            found = False
            for u in placed:
                for b in range(dec.k):
                    p = dec.parent_v[b][u]
                    if p != -1 and p in old.vertices:
                        found = True
                        break
                if found:
                    break
            if not found:
                return f"order prefix component {j} lost all witnessing arcs"
        placed |= set(old.vertices)
    return None


def state_violations(st: ValidState) -> list[tuple[str, str]]:
    """Evaluate the nine drive invariants independently."""
    ctx, dec = st.ctx, st.dec
    out: list[tuple[str, str]] = []

    # C1: untouched components preserved; extra red edges confined to K
    star_comps = red_components(ctx.dec_star)
    cur_comps = red_components(dec)
    protected = {ctx.K.vertices} | {c.vertices for c in ctx.child_comp.values()}
    cur_by_vertex = {c.vertices: c for c in cur_comps.comps}
    for c in star_comps.comps:
        if c.vertices in protected:
            continue
        cur = cur_by_vertex.get(c.vertices)
        if cur is None or cur.edges != c.edges:
            out.append(("C1", f"component of {min(c.vertices)} changed"))
            break
    child_edges = set().union(*(c.edges for c in ctx.child_comp.values())) \
        if ctx.child_comp else set()
    if not child_edges <= dec.red_edges():
        out.append(("C1", "a child edge lost its red colour"))
    other_edges = set()
    for c in star_comps.comps:
        if c.vertices not in protected:
            other_edges |= set(c.edges)
    allowed = set(ctx.K.edges) | set(ctx.gen_eid.values()) | child_edges
    stray = dec.red_edges() - other_edges - allowed
    if stray:
        out.append(("C1", f"red edges outside the working region: {sorted(stray)}"))

    # C2a / C2b: early order prefix survives
    if ctx.I < ctx.iK:
        msg = _prefix_ok(ctx, dec, ctx.I)
        if msg:
            out.append(("C2a", msg))
    else:
        msg = _prefix_ok(ctx, dec, ctx.iK - 1)
        if msg:
            out.append(("C2b", msg))
        w = ctx.wK_witness
        if not dec.has_blue_arc(w.tail, w.head, w.eid):
            out.append(("C2b", "witnessing arc of K lost"))

    # C3: generating subtrees never reach earlier than at drive start
    cut = set(ctx.X)
    cur_min = min(min(ctx.order_star.pos(v)
                      for v in pruned_subtree(dec, ctx.b, x, cut))
                  for x in ctx.X)
    if cur_min < ctx.I:
        out.append(("C3", f"subtree minimum {cur_min} dropped below {ctx.I}"))

    # C4: one generating edge per component touching K
    gen_set = set(ctx.gen_eid.values())
    for c in cur_comps.comps:
        if c.vertices & ctx.K.vertices:
            inside = gen_set & set(c.edges)
            if len(inside) > 1:
                out.append(("C4", f"component of {min(c.vertices)} holds "
                                  f"{len(inside)} generating edges"))

    # the large piece must be unique for the rest to make sense
    if len(st.big_pieces()) > 1:
        out.append(("K'", "two pieces reached the large-piece floor"))

    # C5: no reversed generating arc inside the large piece
    kp = st.kprime()
    if kp is not None:
        for x in ctx.X:
            if x in kp.vertices and st.gen_reversed(x):
                out.append(("C5", f"generating arc of {x} reversed"))

    # C6a / C6b: the anchor is special exactly when possible
    specials = st.special_set()
    if specials:
        if st.anchor not in specials:
            out.append(("C6a", f"anchor {st.anchor} not special"))
    else:
        if ctx.I != ctx.iK or st.anchor != ctx.wK:
            out.append(("C6b", "anchorless state must sit at the witnessing head"))

    # C7: the anchor's component carries no generating edge
    acomp = _full_comp_of(dec, st.anchor)
    if gen_set & set(acomp.edges):
        out.append(("C7", "anchor component holds a generating edge"))

    # C8: the extension vertex lives in the large piece
    if kp is not None and st.u_vertex() not in kp.vertices:
        out.append(("C8", f"extension vertex {st.u_vertex()} outside the piece"))

    # C9: the extension vertex's blue path meets the special vertex first
    t = st.extender()
    if t is not None and t == st.u_vertex():
        sbar = st.sbar()
        vstar = st.anchor if st.anchor_is_special() else None
        for v in dec.blue_path_up(ctx.b, t):
            if v == t:
                continue
            if v in sbar:
                if v != vstar:
                    out.append(("C9", f"path from {t} hits {v} before the anchor"))
                break
    return out


def init_valid_state(ctx: DriveContext, checked: bool = True) -> ValidState:
    """Anchor selection at drive start."""
    dec = ctx.dec_star.copy()
    if ctx.I < ctx.iK:
        cut = set(ctx.X)
        best = min(ctx.X, key=lambda x: (
            min(ctx.order_star.pos(v) for v in pruned_subtree(dec, ctx.b, x, cut)),
            x))
        anchor = best
    else:
        st0 = ValidState(ctx, dec, ctx.X[0])
        specials = st0.special_set()
        anchor = min(specials) if specials else ctx.wK
    st = ValidState(ctx, dec, anchor)
    if checked:
        bad = state_violations(st)
        if bad:
            raise InternalCheckError("initial drive state invalid", {"violations": bad})
    return st


@dataclass
class AugmentInfo:
    subcase: str
    kprime_before: int
    kprime_after: int


def _first_of(dec: Decomposition, b: int, start: int, members) -> int | None:
    """First vertex of the blue parent walk from start lying in members."""
    for v in dec.blue_path_up(b, start):
        if v in members:
            return v
    return None


def _hits_before(dec: Decomposition, b: int, start: int, targets, stops) -> bool:
    for v in dec.blue_path_up(b, start):
        if v in targets:
            return True
        if v in stops:
            return False
    return False


def _red_path(g, comp: RedComp, a: int, z: int):
    """Vertex/edge path within a red component between two of its vertices."""
    nbr: dict[int, list[tuple[int, int]]] = {v: [] for v in comp.vertices}
    for eid in comp.edges:
        u, v = g.edges[eid]
        nbr[u].append((eid, v))
        nbr[v].append((eid, u))
    prev = {a: (-1, -1)}
    q = [a]
    for x in q:
        if x == z:
            break
        for eid, y in nbr[x]:
            if y not in prev:
                prev[y] = (eid, x)
                q.append(y)
    verts, eids = [z], []
    x = z
    while x != a:
        eid, p = prev[x]
        eids.append(eid)
        verts.append(p)
        x = p
    verts.reverse()
    eids.reverse()
    return verts, eids


def _comp_around(g, comp: RedComp, v: int, skip_eid: int) -> set[int]:
    """Vertices of v's side of the component after removing one edge."""
    nbr: dict[int, list[tuple[int, int]]] = {u: [] for u in comp.vertices}
    for eid in comp.edges:
        if eid == skip_eid:
            continue
        a, b = g.edges[eid]
        nbr[a].append((eid, b))
        nbr[b].append((eid, a))
    seen = {v}
    q = [v]
    for x in q:
        for _, y in nbr[x]:
            if y not in seen:
                seen.add(y)
                q.append(y)
    return seen


def main_augment(st: ValidState, checked: bool = True) -> tuple[ValidState, AugmentInfo]:
    """One exchange that strictly shrinks the large piece of K.

    Follows the four-way case split on the size of the detached side and on
    whether the reattachment vertex hangs below the pivot; the anchor moves
    only in the two descendant subcases.
    """
    ctx, dec = st.ctx, st.dec
    b, g = ctx.b, st.dec.g
    kp = st.kprime()
    sring = st.sring()
    if kp is None or not sring:
        raise ValueError("augment needs a large piece and a spare generator")
    a_special = st.anchor_is_special()
    vstar = st.anchor if a_special else None
    sbar = st.sbar()
    u = st.u_vertex()

    # Q: nearest-ancestor tree over sbar + root in tree b
    nodes = sbar | {dec.root}
    qparent: dict[int, int] = {}
    for v in sorted(nodes - {dec.root}):
        hit = _first_of(dec, b, dec.parent_v[b][v], nodes)
        if hit is None:
            raise InternalCheckError("generator detached from the root")
        qparent[v] = hit
    non_leaves = set(qparent.values())
    leaves = sorted(v for v in nodes - {dec.root} if v not in non_leaves)
    if a_special and leaves == [st.anchor]:
        x = qparent[st.anchor]
    else:
        pool = [v for v in leaves if v != st.anchor]
        if not pool:
            raise InternalCheckError("no usable generator leaf")
        x = pool[0]
    if x in (u, dec.root):
        raise InternalCheckError("leaf choice collided with the extension vertex")

    verts, eids = _red_path(g, kp, u, x)
    n = len(verts)

    chosen = None
    for i in range(1, n):
        li = _comp_around(g, kp, verts[i], eids[i - 1])
        stops = {dec.root} | ({vstar} if vstar is not None else set())
        if _hits_before(dec, b, verts[i], li & sring, stops):
            chosen = i
            break
    if chosen is None:
        raise InternalCheckError("no pivot index on the generator path")
    i = chosen
    v, vp = verts[i], verts[i - 1]
    cut_eid = eids[i - 1]
    l_side = _comp_around(g, kp, v, cut_eid)
    lp_side = _comp_around(g, kp, vp, cut_eid)
    lp_edges = sum(1 for e in kp.edges if e != cut_eid
                   and g.edges[e][0] in lp_side and g.edges[e][1] in lp_side)

    kp_before = kp.size
    if lp_edges <= ctx.big_piece_floor - 1:
        y = _first_of(dec, b, v, l_side & sring)
        if y is None:
            raise InternalCheckError("pivot lost its generator witness")
        if not dec.is_descendant(b, vp, y):
            dec2 = edge_exchange(dec, b, y, cut_eid, checked=checked)
            st2 = ValidState(ctx, dec2, st.anchor)
            subcase = "1.1"
        else:
            if not a_special or not dec.is_descendant(b, vp, st.anchor):
                raise InternalCheckError("descendant subcase without a special anchor")
            dec2 = edge_exchange(dec, b, st.anchor, cut_eid, checked=checked)
            st2 = ValidState(ctx, dec2, y)
            subcase = "1.2"
    else:
        j = None
        for jj in range(n - 1, 0, -1):
            if not dec.is_descendant(b, verts[jj - 1], x):
                j = jj
                break
            if vstar is not None and _visits_then(dec, b, verts[jj - 1], vstar, x):
                j = jj
                break
        if j is None:
            raise InternalCheckError("no reattachment index on the generator path")
        vbar, vbarp = verts[j], verts[j - 1]
        bar_eid = eids[j - 1]
        if not dec.is_descendant(b, vbarp, x):
            dec2 = edge_exchange(dec, b, x, bar_eid, checked=checked)
            st2 = ValidState(ctx, dec2, st.anchor)
            subcase = "2.1"
        else:
            if not a_special or not dec.is_descendant(b, vbarp, st.anchor):
                raise InternalCheckError("descendant subcase without a special anchor")
            dec2 = edge_exchange(dec, b, st.anchor, bar_eid, checked=checked)
            st2 = ValidState(ctx, dec2, x)
            subcase = "2.2"

    kp2 = st2.kprime()
    after = kp2.size if kp2 is not None else 0
    if kp2 is not None and kp2.size >= kp_before:
        raise InternalCheckError("large piece failed to shrink")
    if checked:
        bad = state_violations(st2)
        if bad:
            raise InternalCheckError("augment left an invalid state",
                                     {"violations": bad, "subcase": subcase})
    return st2, AugmentInfo(subcase=subcase, kprime_before=kp_before,
                            kprime_after=after)


def _visits_then(dec: Decomposition, b: int, start: int, first: int,
                 second: int) -> bool:
    seen_first = False
    for v in dec.blue_path_up(b, start):
        if v == first:
            seen_first = True
        elif v == second and seen_first:
            return True
    return False


@dataclass
class DriveOutcome:
    dec: Decomposition
    kind: str                      # "adopt" or "special"
    entry_vertex: int              # lives in the component slotted in
    entry_witness: Witness | None
    prefix_len: int
    augments: list[AugmentInfo] = field(default_factory=list)


def drive_and_finish(dec: Decomposition, order: LegalOrder, K_pos: int, b: int,
                     lp: int, params: Params, checked: bool = True) -> DriveOutcome:
    """Run the drive until the large piece is gone, then finish.

    Precondition: at least lp - alpha + 2 children of the target with at
    most lp edges are generated by tree b, and alpha <= lp.
    """
    ctx = make_drive_context(dec, order, K_pos, b, lp, params)
    if ctx.alpha > lp or len(ctx.X) < lp - ctx.alpha + 2:
        raise ValueError("drive threshold not met")
    st = init_valid_state(ctx, checked=checked)
    augments: list[AugmentInfo] = []
    while st.kprime() is not None:
        if not st.sring():
            raise InternalCheckError("drive stalled with a large piece left")
        st, info = main_augment(st, checked=checked)
        augments.append(info)

    if not st.anchor_is_special():
        if not (ctx.I == ctx.iK and st.anchor == ctx.wK):
            raise InternalCheckError("non-special finish in the wrong regime")
        w = ctx.wK_witness
        if not st.dec.has_blue_arc(w.tail, w.head, w.eid):
            raise InternalCheckError("witnessing arc lost before adoption")
        new_comp = _full_comp_of(st.dec, ctx.wK)
        if new_comp.size >= ctx.K.size:
            raise InternalCheckError("witnessing head component did not shrink")
        return DriveOutcome(dec=st.dec, kind="adopt", entry_vertex=ctx.wK,
                            entry_witness=w, prefix_len=ctx.iK,
                            augments=augments)

    vstar = st.anchor
    terminal = Witness(tail=vstar, head=ctx.xprime[vstar],
                       eid=ctx.gen_eid[vstar], tree=b)
    explo2 = build_exploration(st.dec)
    upto = ctx.I if ctx.I < ctx.iK else ctx.iK - 1
    prefix = [(order.comps[j], order.witness[j]) for j in range(upto + 1)]
    order2 = rebuild_order_with_prefix(st.dec, explo2, prefix)
    path = find_minimal_special_path(st.dec, explo2, order2, terminal)
    if path is None:
        raise InternalCheckError("finishing special path missing")
    bound = ctx.I if ctx.I < ctx.iK else ctx.I - 1
    if path.i0 > bound:
        raise InternalCheckError(
            f"finishing path starts at {path.i0}, beyond {bound}")
    applied = apply_special_path(st.dec, order2, path, params, checked=checked,
                                 rho_budget=residue(ctx.dec_star, params))
    entry_w = order2.witness[path.i0]
    return DriveOutcome(dec=applied.dec, kind="special",
                        entry_vertex=path.v_minus1, entry_witness=entry_w,
                        prefix_len=path.i0, augments=augments)
