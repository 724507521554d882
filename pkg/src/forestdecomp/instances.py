"""Instance generation and interchange formats.

Generators run on an explicit splitmix64 stream so the same spec always
yields the same graph on any platform.  The edge-list text format is the
canonical input everywhere: first line "n m", then one "u v" line per
edge, '#' comments ignored, duplicates meaning parallel edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import MultiGraph, ParseError, Params
from .arboricity import fractional_arboricity

MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit stream: state += 0x9E3779B97F4A7C15, then two
    xor-shift multiplies (0xBF58476D1CE4E5B9, 0x94D049BB133111EB)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        # rejection sampling keeps the draw unbiased
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (MASK64 + 1) - ((MASK64 + 1) % n)
        while True:
            x = self.next64()
            if x < limit:
                return x % n


FAMILIES = ("random-multigraph", "blob-bridge", "tight-children",
            "forest-plus-noise")


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int = 0
    m: int = 0
    k: int = 1
    d: int = 1
    seed: int = 0


def generate(spec: GenSpec) -> MultiGraph:
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown family {spec.family!r}")
    if spec.family == "random-multigraph":
        return _random_multigraph(spec.n, spec.m, spec.seed)
    if spec.family == "blob-bridge":
        return _blob_bridge()
    if spec.family == "tight-children":
        return _tight_children(spec.k, spec.d)
    return _forest_plus_noise(spec.n, spec.m, spec.seed)


def _random_multigraph(n: int, m: int, seed: int) -> MultiGraph:
    if n < 2 and m > 0:
        raise ValueError("need at least 2 vertices to place edges")
    rng = SplitMix64(seed)
    edges = []
    while len(edges) < m:
        u = rng.below(n)
        v = rng.below(n)
        if u != v:
            edges.append((u, v))
    return MultiGraph(n, edges)


def _blob_bridge() -> MultiGraph:
    """Two K4-plus-a-parallel-edge blobs joined by one bridge."""
    edges = []
    for base in (0, 4):
        vs = list(range(base, base + 4))
        for i in range(4):
            for j in range(i + 1, 4):
                edges.append((vs[i], vs[j]))
        edges.append((vs[0], vs[1]))
    edges.append((0, 4))
    return MultiGraph(8, edges)


def _forest_plus_noise(n: int, m: int, seed: int) -> MultiGraph:
    if n < 2 and m > 0:
        raise ValueError("need at least 2 vertices to place edges")
    rng = SplitMix64(seed)
    edges = []
    for v in range(1, n):
        if rng.below(4) < 3:  # three in four vertices attach to the forest
            edges.append((v, rng.below(v)))
        if len(edges) >= m:
            break
    while len(edges) < m:
        u, v = rng.below(n), rng.below(n)
        if u != v:
            edges.append((u, v))
    return MultiGraph(n, edges[:m])


@dataclass
class TightChildrenConfig:
    """An explicit decomposition holding a component at the drive threshold:
    an oversize root path, a parent path K of d_prime edges (alpha = 0) and
    small children hanging off K through tree 0."""

    graph: MultiGraph
    trees: list[set[int]]
    red: set[int]
    root: int
    k_vertices: list[int]
    tails: list[int]
    child_heads: list[int]


def tight_children_config(k: int, d: int, n_children: int | None = None,
                          child_size: int | None = None) -> TightChildrenConfig:
    from .core import compute_params
    params = compute_params(k, d)
    dp = params.d_prime
    if child_size is None:
        child_size = params.ell
    if n_children is None:
        n_children = params.ell + 2
    if not (0 <= child_size <= params.ell):
        raise ValueError("children must be small")
    if n_children > dp + 1:
        raise ValueError("not enough parent vertices for that many children")

    edges: list[tuple[int, int]] = []
    red: set[int] = set()
    blue0: dict[int, int] = {}  # vertex -> parent in tree 0

    def add(u, v) -> int:
        edges.append((u, v))
        return len(edges) - 1

    root = 0
    a = [root] + [1 + i for i in range(dp + 1)]          # oversize path
    for x, y in zip(a, a[1:]):
        red.add(add(x, y))
    base = dp + 2
    kv = [base + i for i in range(dp + 1)]               # K, a path of dp edges
    for x, y in zip(kv, kv[1:]):
        red.add(add(x, y))

    tails = [kv[0], kv[1]][:n_children]
    hi = dp
    while len(tails) < n_children:
        if kv[hi] not in tails:
            tails.append(kv[hi])
        hi -= 1

    nxt = kv[-1] + 1
    child_heads = []
    for t in tails:
        head = nxt
        child_heads.append(head)
        nxt += 1
        prev = head
        for _ in range(child_size):
            red.add(add(prev, nxt))
            prev = nxt
            nxt += 1
        blue0[t] = head
        for v in range(head, nxt):
            if v != t and v not in blue0:
                blue0[v] = root
    n = nxt

    blue0[a[1]] = kv[0]                                  # witnessing arc of K
    for v in a[2:]:
        blue0[v] = root
    router = kv[2] if dp >= 2 and kv[2] not in tails else None
    if router is not None and kv[dp] in tails:
        blue0[router] = kv[dp]
    for v in kv:
        if v not in blue0:
            blue0[v] = root

    tree0 = {add(v, p) for v, p in blue0.items()}
    trees = [tree0]
    for _ in range(1, k):
        trees.append({add(v, root) for v in range(1, n)})
    g = MultiGraph(n, edges)
    return TightChildrenConfig(graph=g, trees=trees, red=red, root=root,
                               k_vertices=kv, tails=tails,
                               child_heads=child_heads)


def _tight_children(k: int, d: int) -> MultiGraph:
    return tight_children_config(k, d).graph


def filter_feasible(g: MultiGraph, params: Params) -> bool:
    """True iff the exact density of every subgraph respects the threshold."""
    if g.m == 0:
        return True
    gamma, _ = fractional_arboricity(g)
    return gamma <= params.threshold


def parse_edge_list(text: str) -> MultiGraph:
    n = m = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'n m'")
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: expected integers") from None
            if n < 0 or m < 0:
                raise ParseError(f"line {lineno}: counts must be nonnegative")
            continue
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: expected integers") from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"line {lineno}: endpoint out of range")
        if u == v:
            raise ParseError(f"line {lineno}: loops are not allowed")
        edges.append((u, v))
    if n is None:
        raise ParseError("empty input")
    if m != len(edges):
        raise ParseError(f"header announced {m} edges, found {len(edges)}")
    return MultiGraph(n, edges)


def write_edge_list(g: MultiGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def result_to_json(params: Params, forests, special_index: int) -> str:
    payload = {
        "k": params.k,
        "d": params.d,
        "d_prime": params.d_prime,
        "forests": [sorted(f) for f in forests],
        "special_forest_index": special_index,
    }
    return json.dumps(payload, indent=None, sort_keys=True)


def certificate_to_json(params: Params, vertices) -> str:
    payload = {
        "k": params.k,
        "d": params.d,
        "d_prime": params.d_prime,
        "certificate": {"vertices": sorted(vertices)},
    }
    return json.dumps(payload, indent=None, sort_keys=True)


def result_from_json(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"result file is not JSON: {exc}") from None
    if "forests" not in data and "certificate" not in data:
        raise ParseError("result file holds neither forests nor a certificate")
    return data
