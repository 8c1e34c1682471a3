"""Abstract simplicial complexes, face posets and compatible vertex orders."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable

import numpy as np

from .errors import EmptyComplex, IncompatibleOrder, NotAFace, UnknownVertex
from .posets import Poset, Semilattice, Verdict, as_semilattice, build_poset


def _maximal(sets: Iterable[frozenset]) -> list[frozenset]:
    sets = sorted(set(sets), key=len, reverse=True)
    keep: list[frozenset] = []
    for s in sets:
        if not any(s <= t for t in keep):
            keep.append(s)
    return keep


class SimplicialComplex:
    """A finite abstract simplicial complex stored by its facets.

    ``SimplicialComplex([], [])`` is the empty complex (no faces at all);
    ``SimplicialComplex([], [[]])`` is the complex whose only face is the
    empty set.
    """

    def __init__(self, vertices: Iterable[Hashable], facets: Iterable[Iterable[Hashable]]):
        vertices = tuple(dict.fromkeys(vertices))
        facets = [frozenset(f) for f in facets]
        declared = set(vertices)
        extra = [v for f in facets for v in sorted(f - declared, key=repr)]
        self.vertices = vertices + tuple(dict.fromkeys(extra))
        covered = set().union(*facets) if facets else set()
        # isolated declared vertices become 0-faces
        facets += [frozenset([v]) for v in self.vertices if v not in covered]
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        self.facets = tuple(sorted(_maximal(facets), key=self._face_key))

    def _face_key(self, face):
        return (len(face), sorted(self._vindex[v] for v in face))

    # -- queries -------------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.facets

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and set(self.facets) == set(other.facets)

    def __hash__(self):
        return hash(frozenset(self.facets))

    def __repr__(self):
        shown = [sorted(f, key=self._vindex.get) for f in self.facets]
        return f"SimplicialComplex(facets={shown})"

    def __contains__(self, face) -> bool:
        return self.is_face(face)

    def is_face(self, face: Iterable) -> bool:
        face = frozenset(face)
        return any(face <= f for f in self.facets)

    def require_face(self, face: Iterable) -> frozenset:
        face = frozenset(face)
        if not self.is_face(face):
            raise NotAFace(f"{sorted(face, key=repr)} is not a face", witness=(face,))
        return face

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    def sort_vertices(self, face: Iterable) -> tuple:
        try:
            return tuple(sorted(face, key=self._vindex.__getitem__))
        except KeyError as exc:
            raise UnknownVertex(f"unknown vertex {exc.args[0]!r}") from None

    def faces(self) -> list[frozenset]:
        """Every face, including the empty face, sorted by size then vertex order."""
        out = set()
        for f in self.facets:
            for k in range(len(f) + 1):
                out.update(frozenset(c) for c in combinations(f, k))
        return sorted(out, key=self._face_key)

    def edges(self) -> set[frozenset]:
        return {frozenset(e) for f in self.facets for e in combinations(f, 2)}

    @cached_property
    def _adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for e in self.edges():
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def label(self, face: Iterable) -> str:
        """Canonical text label, e.g. ``{a,b}``."""
        return "{" + ",".join(str(v) for v in self.sort_vertices(face)) + "}"


def build_complex(facet_list: Iterable[Iterable[Hashable]], vertices: Iterable[Hashable] = ()) -> SimplicialComplex:
    return SimplicialComplex(vertices, facet_list)


def simplex(vertices: Iterable[Hashable]) -> SimplicialComplex:
    vertices = tuple(vertices)
    return SimplicialComplex(vertices, [vertices])


def link(K: SimplicialComplex, sigma: Iterable) -> SimplicialComplex:
    """``lk(sigma; K)``: faces disjoint from sigma whose union with it is a face."""
    sigma = K.require_face(sigma)
    pieces = [f - sigma for f in K.facets if sigma <= f]
    verts = [v for v in K.vertices if any(v in p for p in pieces)]
    return SimplicialComplex(verts, pieces)


def join_complex(K: SimplicialComplex, L: SimplicialComplex) -> SimplicialComplex:
    """``K * L`` with vertices tagged ``(1, v)`` and ``(2, w)``."""
    verts = [(1, v) for v in K.vertices] + [(2, w) for w in L.vertices]
    facets = [
        frozenset((1, v) for v in f) | frozenset((2, w) for w in g)
        for f in K.facets
        for g in L.facets
    ]
    return SimplicialComplex(verts, facets)


def is_flag(K: SimplicialComplex) -> Verdict:
    """Every clique of the 1-skeleton is a face.

    The witness is a smallest clique that is not a face, hence a minimal
    non-face all of whose pairs are edges.
    """
    adj = K._adjacency
    order = K._vindex
    # cliques of size k, grown one vertex at a time in canonical order
    level = [(v,) for v in K.vertices]
    while level:
        nxt = []
        for c in level:
            cand = set.intersection(*(adj[v] for v in c))
            for w in sorted(cand, key=order.__getitem__):
                if order[w] > order[c[-1]]:
                    nxt.append(c + (w,))
        for c in nxt:
            if len(c) >= 3 and not K.is_face(c):
                return Verdict(False, c)
        level = nxt
    return Verdict(True)


def face_poset(K: SimplicialComplex) -> Semilattice:
    """All faces of K (including the empty face) ordered by inclusion."""
    if K.is_empty:
        raise EmptyComplex("the empty complex has no face poset")
    faces = K.faces()
    n = len(faces)
    le = np.array([[a <= b for b in faces] for a in faces], dtype=bool).reshape(n, n)
    return as_semilattice(Poset(faces, le))


class OrderedComplex:
    """A simplicial complex with a compatible partial order on its vertices."""

    def __init__(self, complex: SimplicialComplex, vertex_order: Poset):
        if set(vertex_order.elements) != set(complex.vertices):
            raise IncompatibleOrder("vertex order must be defined on exactly V(K)")
        self.complex = complex
        self.vertex_order = vertex_order
        for f in complex.facets:
            closed = self._close(f)
            if not complex.is_face(closed):
                raise IncompatibleOrder(
                    f"closure of facet {complex.label(f)} is not a face", witness=(f,)
                )

    @classmethod
    def from_covers(cls, complex: SimplicialComplex, covers: Iterable = ()) -> "OrderedComplex":
        return cls(complex, build_poset(complex.vertices, covers))

    def _close(self, sigma: frozenset) -> frozenset:
        p = self.vertex_order
        mask = 0
        for v in sigma:
            mask |= p.down_mask[p.index(v)]
        return frozenset(p.elements_of(mask))

    def __repr__(self):
        return f"OrderedComplex({self.complex!r}, {len(self.vertex_order.covers())} order covers)"

    def is_down_set(self, sigma: Iterable) -> bool:
        sigma = frozenset(sigma)
        return self._close(sigma) == sigma

    def comparable_pairs(self) -> list[tuple]:
        """All ``(v, w)`` with ``v < w`` in the vertex order."""
        p = self.vertex_order
        return [(v, w) for v in p for w in p if p.lt(v, w)]


def closure(oc: OrderedComplex, sigma: Iterable) -> frozenset:
    """Smallest down set of the vertex order that contains ``sigma``."""
    sigma = frozenset(sigma)
    for v in sigma:
        if v not in oc.vertex_order:
            raise UnknownVertex(f"unknown vertex {v!r}", witness=(v,))
    return oc._close(sigma)


def down_faces(oc: OrderedComplex) -> Semilattice:
    """``DF(K)``: the induced subposet of ``F(K)`` on faces that are down sets."""
    faces = [f for f in oc.complex.faces() if oc.is_down_set(f)]
    n = len(faces)
    le = np.array([[a <= b for b in faces] for a in faces], dtype=bool).reshape(n, n)
    return as_semilattice(Poset(faces, le))
