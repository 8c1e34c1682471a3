"""Named test families of posets and complexes, all with string labels."""

from __future__ import annotations

import itertools

import numpy as np

from .errors import BadParams
from .posets import Poset, build_poset
from .simplicial import SimplicialComplex, face_poset


def _set_label(items) -> str:
    return "{" + ",".join(str(v) for v in items) + "}"


def _from_leq(labels, leq) -> Poset:
    return Poset.from_relation(labels, leq)


def boolean(n: int) -> Poset:
    """Subsets of ``{1..n}`` under inclusion."""
    _need(n >= 0, "boolean needs n >= 0")
    subsets = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(1, n + 1), k)]
    labels = [_set_label(sorted(s)) for s in subsets]
    lookup = dict(zip(labels, subsets))
    return _from_leq(labels, lambda a, b: lookup[a] <= lookup[b])


def chain(n: int) -> Poset:
    """The chain ``0 < 1 < ... < n-1``."""
    _need(n >= 1, "chain needs n >= 1")
    labels = [str(i) for i in range(n)]
    return build_poset(labels, list(zip(labels, labels[1:])))


def diamond_m3() -> Poset:
    return build_poset(list("0abc1"), [("0", x) for x in "abc"] + [(x, "1") for x in "abc"])


def divisor(n: int) -> Poset:
    """Divisors of ``n`` ordered by divisibility."""
    _need(n >= 1, "divisor needs n >= 1")
    divs = [d for d in range(1, n + 1) if n % d == 0]
    return _from_leq([str(d) for d in divs], lambda a, b: int(b) % int(a) == 0)


def labelled_face_poset(K: SimplicialComplex) -> Poset:
    """``F(K)`` with faces relabelled as ``{a,b}`` strings."""
    p = face_poset(K).base
    labels = [K.label(f) for f in p.elements]
    return Poset(labels, p.le)


def empty_triangle_complex() -> SimplicialComplex:
    return SimplicialComplex("abc", [("a", "b"), ("b", "c"), ("a", "c")])


def empty_triangle() -> Poset:
    return labelled_face_poset(empty_triangle_complex())


def random_poset(rng: np.random.Generator, n: int, density: float = 0.4) -> Poset:
    """Random order on ``q0..q{n-1}`` from a random DAG on the natural order."""
    labels = [f"q{i}" for i in range(n)]
    covers = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return build_poset(labels, covers)


def down_set_lattice(q: Poset) -> Poset:
    """All down sets of ``q`` under inclusion (a distributive lattice)."""
    ideals = []
    n = len(q)
    for mask in range(1 << n):
        if all(q.down_mask[i] & ~mask == 0 for i in range(n) if mask >> i & 1):
            ideals.append(mask)
    labels = [_set_label(q.elements_of(m)) for m in ideals]
    lookup = dict(zip(labels, ideals))
    return _from_leq(labels, lambda a, b: lookup[a] & ~lookup[b] == 0)


def random_distributive(seed: int = 0, size: int = 12, max_tries: int = 1000) -> Poset:
    """Down-set lattice of a random poset, with at most ``size`` elements."""
    _need(size >= 1, "random-distributive needs size >= 1")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        n = int(rng.integers(0, 6))
        lat = down_set_lattice(random_poset(rng, n, float(rng.uniform(0.2, 0.8))))
        if len(lat) <= size:
            return lat
    raise BadParams(f"no distributive lattice with at most {size} elements found")


def random_complex(rng: np.random.Generator, n: int, p_edge: float = 0.6, p_fill: float = 0.5) -> SimplicialComplex:
    """Random complex on ``v0..v{n-1}``: random graph, each clique filled with probability ``p_fill``."""
    verts = [f"v{i}" for i in range(n)]
    edges = [e for e in itertools.combinations(verts, 2) if rng.random() < p_edge]
    adj = {v: set() for v in verts}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    faces = [(v,) for v in verts] + [tuple(e) for e in edges]
    for k in range(3, n + 1):
        for c in itertools.combinations(verts, k):
            if all(b in adj[a] for a, b in itertools.combinations(c, 2)):
                if all(tuple(f) in set(faces) for f in itertools.combinations(c, k - 1)) and rng.random() < p_fill:
                    faces.append(c)
    return SimplicialComplex(verts, faces)


def flag_completion(K: SimplicialComplex) -> SimplicialComplex:
    """The clique complex of the 1-skeleton of ``K``."""
    adj = K._adjacency
    cliques = []
    for k in range(1, len(K.vertices) + 1):
        for c in itertools.combinations(K.vertices, k):
            if all(b in adj[a] for a, b in itertools.combinations(c, 2)):
                cliques.append(c)
    return SimplicialComplex(K.vertices, cliques)


def noncrossing_partitions(n: int) -> list[tuple]:
    """Noncrossing partitions of ``{1..n}`` as tuples of sorted blocks."""
    out = []

    def crossing(blocks):
        for A, B in itertools.permutations(blocks, 2):
            for a, c in itertools.combinations(A, 2):
                for b, d in itertools.product(B, B):
                    if a < b < c < d:
                        return True
        return False

    def rec(i, blocks):
        if i > n:
            if not crossing(blocks):
                out.append(tuple(tuple(b) for b in sorted(blocks)))
            return
        for b in blocks:
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()

    rec(1, [])
    return out


def ncp(n: int) -> Poset:
    """``NPC_n``: noncrossing partitions under refinement (finer below coarser)."""
    _need(1 <= n <= 9, "ncp needs 1 <= n <= 9")
    parts = noncrossing_partitions(n)
    labels = ["|".join("".join(map(str, b)) for b in p) for p in parts]
    blocks = {lab: [set(b) for b in p] for lab, p in zip(labels, parts)}

    def refines(a, b):
        return all(any(x <= y for y in blocks[b]) for x in blocks[a])

    order = sorted(labels, key=lambda lab: (-len(blocks[lab]), lab))
    return _from_leq(order, refines)


FAMILIES = {
    "boolean": ("n",),
    "chain": ("n",),
    "empty-triangle": (),
    "diamond-m3": (),
    "divisor": ("n",),
    "random-distributive": ("seed", "size"),
    "ncp": ("n",),
}


def generate(family: str, **params) -> Poset:
    if family not in FAMILIES:
        raise BadParams(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    wanted = FAMILIES[family]
    extra = set(params) - set(wanted)
    if extra:
        raise BadParams(f"family {family!r} takes no parameters {sorted(extra)}")
    if family == "boolean":
        return boolean(_int(params, "n"))
    if family == "chain":
        return chain(_int(params, "n"))
    if family == "empty-triangle":
        return empty_triangle()
    if family == "diamond-m3":
        return diamond_m3()
    if family == "divisor":
        return divisor(_int(params, "n"))
    if family == "ncp":
        return ncp(_int(params, "n"))
    return random_distributive(_int(params, "seed", 0), _int(params, "size", 12))


def _int(params, key, default=None) -> int:
    v = params.get(key, default)
    if v is None:
        raise BadParams(f"missing parameter {key!r}")
    try:
        return int(v)
    except (TypeError, ValueError):
        raise BadParams(f"parameter {key!r} must be an integer, got {v!r}") from None


def _need(cond: bool, msg: str):
    if not cond:
        raise BadParams(msg)
