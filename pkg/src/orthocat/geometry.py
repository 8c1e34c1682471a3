"""Coordinates on orthoscheme complexes and on the cubical cone ``CC(K)``.

A point of the geometric realization of a poset is a :class:`PLPoint`
(a chain with positive barycentric weights).  A point of ``CC(K)`` is an
:class:`EuclideanPoint` (finitely supported coordinates over ``V(K)``).
``embed_cc`` and ``extract_cc`` are the isometry between the orthoscheme
complex of ``F(K)`` and ``CC(K)`` and its staircase inverse.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import (
    NonPositiveLength,
    NotAChain,
    NotInComplex,
    PreconditionViolated,
    UnknownVertex,
)
from .posets import Poset
from .simplicial import OrderedComplex, SimplicialComplex

DEFAULT_TOL = 1e-9


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


@dataclass(frozen=True)
class PLPoint:
    """``sum t_i x_i`` over a strictly increasing chain with positive weights."""

    chain: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.chain) != len(self.weights):
            raise ValueError("chain and weights differ in length")
        if not self.chain:
            raise ValueError("a point needs a non-empty chain")
        if any(not w > 0 for w in self.weights):
            raise ValueError("weights must be positive (drop zeros first)")
        total = sum(self.weights)
        if abs(total - 1) > 1e-9:
            raise ValueError(f"weights sum to {total}, not 1")

    @classmethod
    def make(cls, poset: Poset, items: Mapping | Sequence, weights: Sequence | None = None) -> "PLPoint":
        """Canonical form: merge repeats, drop zero weights, sort the chain."""
        if weights is None:
            pairs = list(items.items())
        else:
            pairs = list(zip(items, weights))
        acc: dict = {}
        for x, w in pairs:
            poset.index(x)
            acc[x] = acc.get(x, 0) + w
        acc = {x: w for x, w in acc.items() if w != 0}
        if any(w < 0 for w in acc.values()):
            raise ValueError("negative barycentric weight")
        try:
            chain = poset.sorted_chain(acc)
        except ValueError:
            raise NotAChain(f"support {sorted(map(repr, acc))} is not a chain") from None
        return cls(chain, tuple(acc[x] for x in chain))

    @classmethod
    def vertex(cls, x: Hashable) -> "PLPoint":
        return cls((x,), (1,))

    def as_dict(self) -> dict:
        return dict(zip(self.chain, self.weights))


@dataclass(frozen=True)
class EuclideanPoint:
    """A finitely supported point of ``E^(V(K))``; zero coordinates are dropped."""

    coords: Mapping

    def __post_init__(self):
        object.__setattr__(self, "coords", {v: t for v, t in dict(self.coords).items() if t != 0})

    def __getitem__(self, v):
        return self.coords.get(v, 0)

    @property
    def support(self) -> frozenset:
        return frozenset(self.coords)

    def vector(self, order: Sequence) -> np.ndarray:
        extra = set(self.coords) - set(order)
        if extra:
            raise UnknownVertex(f"coordinates outside the vertex set: {sorted(map(repr, extra))}")
        return np.array([float(self[v]) for v in order])

    @classmethod
    def from_vector(cls, order: Sequence, vec) -> "EuclideanPoint":
        return cls({v: float(t) for v, t in zip(order, vec)})

    def distance(self, other: "EuclideanPoint") -> float:
        keys = set(self.coords) | set(other.coords)
        return math.sqrt(sum(float(self[v] - other[v]) ** 2 for v in keys))


def characteristic(sigma) -> EuclideanPoint:
    """``chi_sigma``: the cube vertex with coordinate 1 on ``sigma``."""
    return EuclideanPoint({v: 1 for v in sigma})


# -- orthoschemes ----------------------------------------------------------


@dataclass(frozen=True)
class OrthoschemeCell:
    """``O(l_1, ..., l_d)`` with its vertices labelled by chain elements."""

    lengths: tuple
    vertex_labels: tuple

    @property
    def dimension(self) -> int:
        return len(self.lengths)

    def vertices(self) -> np.ndarray:
        return orthoscheme_vertices(self.lengths) if self.lengths else np.zeros((1, 0))

    def local(self, weights: Sequence[float]) -> np.ndarray:
        """Cell coordinates of the barycentric combination ``weights``.

        Coordinate ``j`` is ``l_j`` times the total weight on vertices
        ``j, ..., d``.
        """
        w = np.asarray(weights, dtype=float)
        tail = np.cumsum(w[::-1])[::-1][1:]
        return np.asarray(self.lengths, dtype=float) * tail

    def distance(self, a: Sequence[float], b: Sequence[float]) -> float:
        return float(np.linalg.norm(self.local(a) - self.local(b)))

    def vertex_distance(self, i: int, j: int) -> float:
        i, j = sorted((i, j))
        return math.sqrt(sum(l * l for l in self.lengths[i:j]))


def orthoscheme_vertices(lengths: Sequence[float]) -> np.ndarray:
    """Rows ``v_0 .. v_d`` with ``v_i = sum_{j<=i} l_j e_j``."""
    lengths = np.asarray(lengths, dtype=float)
    if lengths.ndim != 1 or (lengths <= 0).any():
        raise NonPositiveLength(f"orthoscheme lengths must be positive, got {lengths.tolist()}")
    d = len(lengths)
    out = np.zeros((d + 1, d))
    for i in range(1, d + 1):
        out[i, :i] = lengths[:i]
    return out


def chain_cell(p: Poset, chain: Sequence, height=None) -> OrthoschemeCell:
    """Orthoscheme of a chain, with edge lengths ``sqrt(h(x_i) - h(x_{i-1}))``.

    ``height`` defaults to the canonical height; any strictly order preserving
    mapping or callable may be passed instead.
    """
    chain = tuple(chain)
    for x in chain:
        p.index(x)
    if not chain or not p.is_chain(chain):
        raise NotAChain(f"{chain!r} is not a strictly increasing chain")
    h = p.heights if height is None else height
    value = h.__getitem__ if hasattr(h, "__getitem__") else h
    diffs = [value(b) - value(a) for a, b in zip(chain, chain[1:])]
    if any(d <= 0 for d in diffs):
        raise NonPositiveLength("height function is not strictly increasing on the chain")
    return OrthoschemeCell(tuple(math.sqrt(d) for d in diffs), chain)


# -- cubical cone ------------------------------------------------------------


def in_cc(K: SimplicialComplex, q: EuclideanPoint, tol: float = DEFAULT_TOL) -> bool:
    for v in q.coords:
        if v not in K._vindex:
            return False
    support = [v for v, t in q.coords.items() if abs(t) > tol]
    if not K.is_face(support):
        return False
    return all(-tol <= t <= 1 + tol for t in q.coords.values())


def _require_cc(K, q, tol):
    if not in_cc(K, q, tol):
        raise NotInComplex("point is not in the cubical cone", witness=(q,))


def embed_cc(K: SimplicialComplex, p: PLPoint) -> EuclideanPoint:
    """``sum t_i sigma_i  ->  sum t_i chi_{sigma_i}``."""
    faces = [frozenset(s) for s in p.chain]
    for f in faces:
        if not K.is_face(f):
            raise NotAChain(f"{sorted(f, key=repr)} is not a face of K")
    if any(not a < b for a, b in zip(faces, faces[1:])):
        raise NotAChain("chain of faces is not strictly increasing")
    coords: dict = {}
    for f, t in zip(faces, p.weights):
        for v in f:
            coords[v] = coords.get(v, 0) + t
    return EuclideanPoint(coords)


def extract_cc(K: SimplicialComplex, q: EuclideanPoint, tol: float = DEFAULT_TOL) -> PLPoint:
    """Staircase inverse of :func:`embed_cc`.

    With levels ``1 = s_0 > s_1 > ... > s_{d+1} = 0`` taken from the
    coordinates, the chain is ``sigma_i = {v : t_v >= s_i}`` with weights
    ``s_i - s_{i+1}``.  ``sigma_0`` is the empty face whenever no coordinate
    equals 1.  Exact (int/Fraction) inputs are compared exactly; floats within
    ``tol`` of each other share a level.
    """
    _require_cc(K, q, tol)
    exact = _is_exact(q.coords.values())
    eps = 0 if exact else tol
    values = sorted((t for t in q.coords.values()), reverse=True)
    levels = [Fraction(1) if exact else 1.0]
    for t in values:
        if t >= levels[0] - eps:
            continue
        if t <= eps:
            break
        if levels[-1] - t > eps:
            levels.append(t)
    levels.append(Fraction(0) if exact else 0.0)

    def level_of(t):
        for i, s in enumerate(levels[:-1]):
            if t >= s - eps:
                return i
        return len(levels) - 1

    assigned = {v: level_of(t) for v, t in q.coords.items()}
    chain, weights = [], []
    for i in range(len(levels) - 1):
        sigma = frozenset(v for v, k in assigned.items() if k <= i)
        chain.append(sigma)
        weights.append(levels[i] - levels[i + 1])
    return PLPoint(tuple(chain), tuple(weights))


def in_down_region(oc: OrderedComplex, q: EuclideanPoint, tol: float = DEFAULT_TOL) -> bool:
    """``t_v >= t_w - tol`` for every ``v <= w`` in the vertex order."""
    _require_cc(oc.complex, q, tol)
    return all(q[v] >= q[w] - tol for v, w in oc.comparable_pairs())


def retract_coords(coords: Mapping, v, w) -> dict:
    """Nearest point of the half-space ``t_v >= t_w`` (any finitely supported vector)."""
    out = dict(coords)
    tv, tw = out.get(v, 0), out.get(w, 0)
    mid = (tv + tw) / 2
    out[v] = max(tv, mid)
    out[w] = min(tw, mid)
    return {k: t for k, t in out.items() if t != 0}


def retract_vw(oc: OrderedComplex, q: EuclideanPoint, v, w, tol: float = DEFAULT_TOL) -> EuclideanPoint:
    """Retraction of ``CC(K)`` onto ``{t_v >= t_w}`` for ``v < w``."""
    p = oc.vertex_order
    if v not in p or w not in p or not p.lt(v, w):
        raise PreconditionViolated(f"retraction needs {v!r} < {w!r} in the vertex order")
    _require_cc(oc.complex, q, tol)
    return EuclideanPoint(retract_coords(q.coords, v, w))


def cubical_link(K: SimplicialComplex, sigma) -> SimplicialComplex:
    """Combinatorial link of the cube vertex ``chi_sigma`` in ``CC(K)``.

    A face of the cube ``I^tau`` fixes some coordinates at 0, some at 1 and
    frees a set ``C``; it contains ``chi_sigma`` exactly when the coordinates
    fixed at 1 are ``sigma - C`` and ``sigma`` meets no coordinate fixed at 0.
    Link vertices are tagged ``("-", v)`` for directions that decrease
    ``t_v`` (``v`` in sigma) and ``("+", v)`` for increasing ones.
    """
    sigma = K.require_face(sigma)
    simplices = set()
    for tau in K.faces():
        if not sigma <= tau:
            continue
        # free directions inside tau; sigma-coordinates may decrease, others increase
        free = sorted(tau, key=K._vindex.__getitem__)
        for k in range(len(free) + 1):
            for C in itertools.combinations(free, k):
                simplices.add(frozenset(("-" if v in sigma else "+", v) for v in C))
    verts = [t for s in simplices for t in s]
    return SimplicialComplex(sorted(set(verts), key=repr), [s for s in simplices if s])
