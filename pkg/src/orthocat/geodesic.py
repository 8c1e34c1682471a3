"""Intrinsic distances in piecewise Euclidean complexes.

A :class:`CellComplexGeometry` is a finite family of convex cells glued along
shared faces.  Points are vectors over a global label set: coordinates over
``V(K)`` for the cubical cone, barycentric weights over the poset for an
orthoscheme complex.  A cell owns a subset of labels and a linear map ``L``
from its label coordinates to a Euclidean frame, so the in-cell distance of two
points is ``|L (x - y)|``.

Distances are computed by best-first search over galleries (simple sequences
of cells).  A gallery fixes which faces a path crosses, and the shortest path
through a fixed gallery is a second-order cone program in the crossing points.
Partial galleries are ranked by an admissible lower bound built from a
non-expanding ambient map; the search stops once the best complete path is
within ``tol`` of every unexplored bound.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import clarabel
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .errors import (
    BudgetExceeded,
    Disconnected,
    DisconnectedPoset,
    NotLocated,
)
from .geometry import EuclideanPoint, PLPoint, chain_cell
from .posets import Poset
from .simplicial import SimplicialComplex

CUBE = "cube"
SIMPLEX = "simplex"
LOCATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Cell:
    labels: tuple  # global label indices
    metric: np.ndarray = field(repr=False)  # rows: Euclidean frame, columns: labels
    name: object = None

    def __post_init__(self):
        object.__setattr__(self, "_pos", {g: i for i, g in enumerate(self.labels)})

    @property
    def position(self) -> dict:
        return self._pos

    def distance(self, x: np.ndarray, y: np.ndarray) -> float:
        idx = list(self.labels)
        return float(np.linalg.norm(self.metric @ (x[idx] - y[idx])))


class CellComplexGeometry:
    """Cells glued along shared label faces.

    ``kind`` is ``"cube"`` (cells are unit cubes ``[0,1]^labels``) or
    ``"simplex"`` (cells are simplices, points are barycentric).
    ``ambient`` is an optional matrix ``M`` with ``|M(x - y)| <= d_cell(x, y)``
    on every cell; it supplies the search lower bound.
    """

    def __init__(self, kind: str, labels: Sequence, cells: Sequence[Cell],
                 ambient: np.ndarray | None = None, source=None):
        if kind not in (CUBE, SIMPLEX):
            raise ValueError(f"unknown cell kind {kind!r}")
        self.kind = kind
        self.labels = tuple(labels)
        self.index = {x: i for i, x in enumerate(self.labels)}
        self.cells = tuple(cells)
        self.ambient = ambient
        self.source = source
        self._shared: dict = {}
        self.ambient_isometric = ambient is not None and all(
            self._cell_isometric(c) for c in self.cells
        )
        self.neighbors = tuple(
            tuple(j for j in range(len(self.cells)) if j != i and self.adjacent(i, j))
            for i in range(len(self.cells))
        )

    def __repr__(self):
        return f"CellComplexGeometry({self.kind}, {len(self.cells)} cells, {len(self.labels)} labels)"

    @property
    def dim(self) -> int:
        return len(self.labels)

    def shared(self, i: int, j: int) -> tuple:
        key = (i, j) if i < j else (j, i)
        face = self._shared.get(key)
        if face is None:
            face = tuple(sorted(set(self.cells[i].labels) & set(self.cells[j].labels)))
            self._shared[key] = face
        return face

    def adjacent(self, i: int, j: int) -> bool:
        # distinct cubes always meet, at least in the origin
        return self.kind == CUBE or bool(self.shared(i, j))

    def _cell_isometric(self, c: Cell) -> bool:
        idx = list(c.labels)
        L, M = c.metric, self.ambient[:, idx]
        if self.kind == SIMPLEX:
            k = len(idx)
            D = np.eye(k)[:, 1:] - np.eye(k)[:, [0]]  # sum-zero directions
            L, M = L @ D, M @ D
        return np.allclose(L.T @ L, M.T @ M, atol=1e-12)

    def check_gluing(self, tol: float = 1e-12) -> list:
        """Pairs of cells whose metrics disagree on their shared face."""
        bad = []
        for i, j in itertools.combinations(range(len(self.cells)), 2):
            face = self.shared(i, j)
            if len(face) < (2 if self.kind == SIMPLEX else 1):
                continue
            grams = []
            for c in (self.cells[i], self.cells[j]):
                cols = [c.position[g] for g in face]
                A = c.metric[:, cols]
                if self.kind == SIMPLEX:
                    k = len(face)
                    A = A @ (np.eye(k)[:, 1:] - np.eye(k)[:, [0]])
                grams.append(A.T @ A)
            if not np.allclose(grams[0], grams[1], atol=tol):
                bad.append((i, j))
        return bad

    # -- points --------------------------------------------------------------

    def vector(self, point) -> np.ndarray:
        """Global coordinate vector of an EuclideanPoint, PLPoint or mapping."""
        if isinstance(point, np.ndarray):
            return point.astype(float)
        if isinstance(point, EuclideanPoint):
            items = point.coords.items()
        elif isinstance(point, PLPoint):
            items = zip(point.chain, point.weights)
        else:
            items = dict(point).items()
        x = np.zeros(self.dim)
        for label, t in items:
            if label not in self.index:
                raise NotLocated(f"label {label!r} is not part of this geometry")
            x[self.index[label]] += float(t)
        return x

    def to_point(self, x: np.ndarray):
        if self.kind == CUBE:
            return EuclideanPoint({self.labels[i]: float(t) for i, t in enumerate(x) if abs(t) > 1e-15})
        pairs = {self.labels[i]: float(t) for i, t in enumerate(x) if t > 1e-15}
        total = sum(pairs.values())
        return PLPoint.make(self.source, {k: v / total for k, v in pairs.items()})

    def locate(self, x: np.ndarray, tol: float = LOCATE_TOL) -> list[int]:
        """Indices of the cells containing ``x``."""
        support = {int(i) for i in np.flatnonzero(np.abs(x) > tol)}
        if self.kind == CUBE:
            if (x < -tol).any() or (x > 1 + tol).any():
                return []
        else:
            if (x < -tol).any() or abs(x.sum() - 1) > 1e-6:
                return []
        return [i for i, c in enumerate(self.cells) if support <= set(c.labels)]

    def ambient_distance(self, x: np.ndarray, y: np.ndarray) -> float:
        if self.ambient is None:
            return 0.0
        return float(np.linalg.norm(self.ambient @ (x - y)))

    def is_connected(self) -> bool:
        if not self.cells:
            return False
        seen, stack = {0}, [0]
        while stack:
            i = stack.pop()
            for j in self.neighbors[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(self.cells)


# -- constructors --------------------------------------------------------------


def complex_of_cc(K: SimplicialComplex) -> CellComplexGeometry:
    """The cubical cone: one unit cube ``I^sigma`` per facet, glued along subcubes."""
    labels = K.vertices
    index = {v: i for i, v in enumerate(labels)}
    cells = []
    for f in K.facets:
        idx = tuple(sorted(index[v] for v in f))
        cells.append(Cell(idx, np.eye(len(idx)), name=f))
    return CellComplexGeometry(CUBE, labels, cells, ambient=np.eye(len(labels)), source=K)


def poset_ambient(p: Poset, height=None) -> np.ndarray:
    """A map ``|P| -> E^J`` that is non-expanding on every orthoscheme.

    ``J`` holds the elements with at most one lower cover.  Element ``x`` is
    sent to ``sum_{j in J, j <= x} w_j e_j``; the weights keep every cover
    increment no longer than the orthoscheme edge it comes from.  For locally
    distributive semilattices all weights are 1 and the map is the isometry
    onto the down region of the cubical cone.
    """
    h = p.heights if height is None else height
    J = [x for x in p.elements if len(p.lower_covers(x)) <= 1]
    jpos = {x: i for i, x in enumerate(J)}
    w2 = {x: math.inf for x in J}
    for x, y in p.covers():
        delta = [j for j in J if p.leq(j, y) and not p.leq(j, x)]
        for j in delta:
            w2[j] = min(w2[j], (h[y] - h[x]) / len(delta))
    w = {j: 1.0 if math.isinf(v) else math.sqrt(v) for j, v in w2.items()}
    M = np.zeros((len(J), len(p)))
    for k, x in enumerate(p.elements):
        for j in J:
            if p.leq(j, x):
                M[jpos[j], k] = w[j]
    return M


def complex_of_orthoschemes(p: Poset, height=None, ambient: bool = True) -> CellComplexGeometry:
    """One orthoscheme per maximal chain, glued along common subchains."""
    if len(p) == 0 or not p.is_connected():
        raise DisconnectedPoset("orthoscheme complexes need a non-empty connected poset")
    cells = []
    for chain in p.maximal_chains():
        oc = chain_cell(p, chain, height)
        idx = tuple(p.index(x) for x in chain)
        d = len(chain) - 1
        upper = np.triu(np.ones((d, d + 1)), k=1)  # row j sums weights j+1..d
        L = np.asarray(oc.lengths, dtype=float)[:, None] * upper if d else np.zeros((0, 1))
        cells.append(Cell(idx, L, name=chain))
    M = poset_ambient(p, height) if ambient else None
    return CellComplexGeometry(SIMPLEX, p.elements, cells, ambient=M, source=p)


# -- strings --------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    cell: int
    start: np.ndarray = field(repr=False)
    end: np.ndarray = field(repr=False)
    length: float = 0.0


@dataclass(frozen=True)
class StringPath:
    segments: tuple

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def breakpoints(self) -> list[np.ndarray]:
        if not self.segments:
            return []
        return [self.segments[0].start] + [s.end for s in self.segments]

    def point_at(self, s: float) -> tuple[int, np.ndarray]:
        """Cell and coordinates of the point at arclength ``s``."""
        if not self.segments:
            raise ValueError("empty path")
        s = min(max(s, 0.0), self.length)
        for seg in self.segments:
            if s <= seg.length or seg is self.segments[-1]:
                lam = 0.0 if seg.length == 0 else min(s / seg.length, 1.0)
                return seg.cell, (1 - lam) * seg.start + lam * seg.end
            s -= seg.length
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class GeodesicResult:
    distance: float
    path: StringPath
    gap: float
    galleries: int = 0
    budget_exhausted: bool = False


# -- per-gallery convex program --------------------------------------------------

_SETTINGS = None


def _settings():
    global _SETTINGS
    if _SETTINGS is None:
        s = clarabel.DefaultSettings()
        s.verbose = False
        s.tol_gap_abs = 1e-11
        s.tol_gap_rel = 1e-11
        s.tol_feas = 1e-11
        s.tol_ktratio = 1e-9
        s.max_iter = 200
        _SETTINGS = s
    return _SETTINGS


def _project_box(b):
    return np.clip(b, 0.0, 1.0)


def _project_simplex(b):
    """Euclidean projection onto the probability simplex."""
    u = np.sort(b)[::-1]
    css = np.cumsum(u) - 1
    k = np.arange(1, len(b) + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(b - css[rho] / (rho + 1), 0.0)


@dataclass
class _GalleryValue:
    value: float
    path: StringPath | None
    iterations: int


def _solve_gallery(g: CellComplexGeometry, gallery: tuple, xp: np.ndarray, xq: np.ndarray,
                   complete: bool, maps: Sequence[np.ndarray] = ()) -> _GalleryValue | None:
    """Shortest path from ``xp`` through ``gallery``.

    ``complete``: end at ``xq`` inside the last cell.  Otherwise the path ends
    at the entry point of the last cell and pays ``max_k |M_k(b - xq)|`` over
    the non-expanding ``maps``, a lower bound for the rest of the way.
    """
    k = len(gallery) - 1
    faces = [g.shared(gallery[i - 1], gallery[i]) for i in range(1, k + 1)]
    offsets, off = [], 0
    for F in faces:
        offsets.append(off)
        off += len(F)
    nb = off
    nseg = k + 1 if complete else k
    tail = not complete and len(maps) > 0
    nt = nseg + (1 if tail else 0)
    nvar = nb + nt

    # points P_0..P_{k+1}: ("const", vector) or ("var", face index)
    def point(i):
        if i == 0:
            return ("const", xp)
        if i <= k:
            return ("var", i - 1)
        return ("const", xq)

    def evaluate(bs):
        pts = [xp]
        for i, F in enumerate(faces):
            v = np.zeros(g.dim)
            v[list(F)] = bs[i]
            pts.append(v)
        if complete:
            pts.append(xq)
        segs = []
        for i in range(nseg):
            c = g.cells[gallery[i]]
            segs.append(Segment(gallery[i], pts[i], pts[i + 1], c.distance(pts[i], pts[i + 1])))
        total = sum(s.length for s in segs)
        if tail:
            total += max(float(np.linalg.norm(M @ (pts[-1] - xq))) for M in maps)
        return total, StringPath(tuple(segs))

    if nb == 0:
        total, path = evaluate([np.zeros(0)] * len(faces))
        return _GalleryValue(total, path, 0)

    zero_A, zero_b, non_A, non_b, soc_blocks = [], [], [], [], []
    for i, F in enumerate(faces):
        cols = np.arange(offsets[i], offsets[i] + len(F))
        if g.kind == SIMPLEX:
            zero_A.append(sp.csr_matrix((np.ones(len(F)), (np.zeros(len(F), int), cols)), shape=(1, nvar)))
            zero_b.append(np.ones(1))
            non_A.append(sp.csr_matrix((-np.ones(len(F)), (np.arange(len(F)), cols)), shape=(len(F), nvar)))
            non_b.append(np.zeros(len(F)))
        else:
            m = len(F)
            r = np.arange(2 * m)
            non_A.append(sp.csr_matrix((np.r_[-np.ones(m), np.ones(m)], (r, np.r_[cols, cols])), shape=(2 * m, nvar)))
            non_b.append(np.r_[np.zeros(m), np.ones(m)])

    def linear_part(i, cell):
        """Coefficient block and constant of cell-local coordinates of P_i."""
        kind, val = point(i)
        if kind == "const":
            return None, val[list(cell.labels)]
        F = faces[val]
        block = np.zeros((len(cell.labels), nvar))
        for j, lab in enumerate(F):
            block[cell.position[lab], offsets[val] + j] = 1.0
        return block, np.zeros(len(cell.labels))

    for i in range(nseg):
        cell = g.cells[gallery[i]]
        L = cell.metric
        a_blk, a_c = linear_part(i, cell)
        b_blk, b_c = linear_part(i + 1, cell)
        G = np.zeros((L.shape[0], nvar))
        if b_blk is not None:
            G += L @ b_blk
        if a_blk is not None:
            G -= L @ a_blk
        const = L @ (b_c - a_c)
        A = np.zeros((L.shape[0] + 1, nvar))
        A[0, nb + i] = -1.0
        A[1:] = -G
        soc_blocks.append((A, np.r_[0.0, const]))
    if tail:
        F = faces[-1]
        for M in maps:
            A = np.zeros((M.shape[0] + 1, nvar))
            A[0, nb + nseg] = -1.0
            A[1:, offsets[-1]:offsets[-1] + len(F)] = -M[:, list(F)]
            soc_blocks.append((A, np.r_[0.0, -M @ xq]))

    mats = zero_A + non_A + [sp.csr_matrix(A) for A, _ in soc_blocks]
    rhs = zero_b + non_b + [b for _, b in soc_blocks]
    Abig = sp.vstack(mats).tocsc()
    bbig = np.concatenate(rhs)
    cones = []
    if zero_A:
        cones.append(clarabel.ZeroConeT(len(zero_A)))
    nn = sum(m.shape[0] for m in non_A)
    if nn:
        cones.append(clarabel.NonnegativeConeT(nn))
    for A, _ in soc_blocks:
        cones.append(clarabel.SecondOrderConeT(A.shape[0]))
    cvec = np.zeros(nvar)
    cvec[nb:] = 1.0
    P = sp.csc_matrix((nvar, nvar))
    sol = clarabel.DefaultSolver(P, cvec, Abig, bbig, cones, _settings()).solve()
    x = np.asarray(sol.x)
    if "Solved" not in str(sol.status) or not np.all(np.isfinite(x)):
        return None
    bs = []
    for i, F in enumerate(faces):
        b = x[offsets[i]:offsets[i] + len(F)]
        bs.append(_project_simplex(b) if g.kind == SIMPLEX else _project_box(b))
    total, path = evaluate(bs)
    return _GalleryValue(total, path, int(sol.iterations))


# -- polishing ------------------------------------------------------------------

SNAP = 1e-6


def _merge_zero_segments(g, cells, pts, eps=1e-13):
    """Drop cells whose segment has (numerically) zero length."""
    changed = True
    while changed and len(cells) > 1:
        changed = False
        for i in range(len(cells)):
            if np.abs(pts[i + 1] - pts[i]).max() <= eps:
                # the repeated point lies in both neighbouring cells; keep q
                last = i == len(cells) - 1
                del cells[i]
                del pts[i if last else i + 1]
                changed = True
                break
    return cells, pts


def _snap(g, x: np.ndarray, face) -> tuple[list, object]:
    """Clamp ``x`` on ``face`` to the face polytope, fixing near-bound coordinates.

    Returns the free labels and, for simplices, the pivot label whose weight
    absorbs the sum constraint.
    """
    idx = list(face)
    if g.kind == CUBE:
        v = np.clip(x[idx], 0.0, 1.0)
        v[v <= SNAP] = 0.0
        v[v >= 1 - SNAP] = 1.0
        x[idx] = v
        return [l for l in face if 0.0 < x[l] < 1.0], None
    v = np.maximum(x[idx], 0.0)
    v[v <= SNAP] = 0.0
    x[idx] = v / v.sum()
    free = [l for l in face if x[l] > 0]
    pivot = max(free, key=lambda l: x[l])
    return [l for l in free if l != pivot], pivot


def _length(g, cells, pts):
    return sum(g.cells[c].distance(pts[i], pts[i + 1]) for i, c in enumerate(cells))


def _newton(g, cells, pts, iters: int = 40):
    """Newton steps on the free breakpoint coordinates; returns improved points."""
    k = len(cells) - 1
    if k == 0:
        return pts
    faces = [g.shared(cells[i - 1], cells[i]) for i in range(1, k + 1)]
    pts = [p.copy() for p in pts]
    blocks, offset = [], 0
    for j, face in enumerate(faces, start=1):
        free, pivot = _snap(g, pts[j], face)
        blocks.append((offset, free, pivot))
        offset += len(free)
    n = offset
    if n == 0:
        return pts

    def points(y):
        out = [p.copy() for p in pts]
        for j, (off, free, pivot) in enumerate(blocks, start=1):
            if free:
                out[j][free] = y[off:off + len(free)]
            if pivot is not None:
                face = faces[j - 1]
                out[j][pivot] = 1.0 - sum(out[j][l] for l in face if l != pivot)
        return out

    def jac(j):
        """d P_j / d y as a (dim, n) matrix."""
        J = np.zeros((g.dim, n))
        if 1 <= j <= k:
            off, free, pivot = blocks[j - 1]
            for a, l in enumerate(free):
                J[l, off + a] = 1.0
                if pivot is not None:
                    J[pivot, off + a] = -1.0
        return J

    jacs = [jac(j) for j in range(k + 2)]
    seg_mats = []
    for i, c in enumerate(cells):
        cell = g.cells[c]
        idx = list(cell.labels)
        seg_mats.append(cell.metric @ (jacs[i + 1][idx] - jacs[i][idx]))
    y = np.zeros(n)
    for j, (off, free, _) in enumerate(blocks, start=1):
        y[off:off + len(free)] = pts[j][free]

    def objective(y):
        return _length(g, cells, points(y))

    f = objective(y)
    for _ in range(iters):
        P = points(y)
        grad = np.zeros(n)
        H = np.zeros((n, n))
        for i, c in enumerate(cells):
            cell = g.cells[c]
            idx = list(cell.labels)
            r = cell.metric @ (P[i + 1][idx] - P[i][idx])
            nr = np.linalg.norm(r)
            if nr < 1e-14:
                return P
            u = r / nr
            A = seg_mats[i]
            grad += A.T @ u
            H += A.T @ (np.eye(len(r)) - np.outer(u, u)) @ A / nr
        if np.linalg.norm(grad) < 1e-15:
            break
        step = -np.linalg.lstsq(H + 1e-14 * np.eye(n), grad, rcond=1e-13)[0]
        lam = 1.0
        while lam > 1e-8:
            y_new = y + lam * step
            if _feasible(g, points(y_new), faces):
                f_new = objective(y_new)
                if f_new <= f:
                    break
            lam /= 2
        else:
            break
        if f - f_new < 1e-17 and np.abs(y_new - y).max() < 1e-15:
            y, f = y_new, f_new
            break
        y, f = y_new, f_new
    return points(y)


def _feasible(g, pts, faces, eps=0.0):
    for j, face in enumerate(faces, start=1):
        v = pts[j][list(face)]
        if (v < -eps).any() or (g.kind == CUBE and (v > 1 + eps).any()):
            return False
    return True


def polish_path(g: CellComplexGeometry, path: StringPath) -> StringPath:
    """Tighten a near-optimal string: merge zero-length pieces, then Newton steps.

    Near-optimal lengths only pin breakpoints down to about the square root of
    the length error; points read off the string need the breakpoints
    themselves to be accurate.
    """
    if not path.segments:
        return path
    cells = [s.cell for s in path.segments]
    pts = [path.segments[0].start.copy()] + [s.end.copy() for s in path.segments]
    cells, pts = _merge_zero_segments(g, cells, pts)
    before = _length(g, cells, pts)
    new = _newton(g, cells, pts)
    if _length(g, cells, new) > before:
        new = pts
    cells, new = _merge_zero_segments(g, cells, new)
    segs = tuple(Segment(c, new[i], new[i + 1], g.cells[c].distance(new[i], new[i + 1]))
                 for i, c in enumerate(cells))
    out = StringPath(segs)
    return out if out.length <= path.length + 1e-15 else path


# -- search ---------------------------------------------------------------------


SDP_AFTER = 20


def default_budget(g: CellComplexGeometry) -> int:
    return 10 * len(g.cells)


def _svec_index(n: int):
    """Position of entry ``(i, j)``, ``i <= j``, in the column-major upper triangle."""
    return {(i, j): j * (j + 1) // 2 + i for j in range(n) for i in range(j + 1)}


def _svec(S: np.ndarray) -> np.ndarray:
    n = S.shape[0]
    out = np.empty(n * (n + 1) // 2)
    for (i, j), k in _svec_index(n).items():
        out[k] = S[i, j] if i == j else math.sqrt(2) * S[i, j]
    return out


def _sdp_data(g: CellComplexGeometry):
    """Per-geometry constants of the bound program, cached on the geometry."""
    data = getattr(g, "_sdp_cache", None)
    if data is not None:
        return data
    n = g.dim
    if g.kind == SIMPLEX:
        B = np.eye(n)[:, 1:] - np.eye(n)[:, [0]]  # basis of sum-zero vectors
    else:
        B = np.eye(n)
    r = B.shape[1]
    Binv = np.linalg.pinv(B)
    idx = _svec_index(r)
    blocks = []
    for c in g.cells:
        k = len(c.labels)
        E = np.zeros((n, k))
        E[list(c.labels), range(k)] = 1.0
        D = E @ (np.eye(k)[:, 1:] - np.eye(k)[:, [0]]) if g.kind == SIMPLEX else E
        L = c.metric @ (np.eye(k)[:, 1:] - np.eye(k)[:, [0]]) if g.kind == SIMPLEX else c.metric
        if D.shape[1] == 0:
            continue
        R = Binv @ D
        Q = L.T @ L
        m = R.shape[1]
        T = np.zeros((m * (m + 1) // 2, len(idx)))
        for (i, j), col in idx.items():
            H = np.zeros((r, r))
            if i == j:
                H[i, i] = 1.0
            else:
                H[i, j] = H[j, i] = 1 / math.sqrt(2)
            T[:, col] = _svec(R.T @ H @ R)
        blocks.append((R, Q, T, _svec(Q)))
    data = (B, Binv, idx, blocks)
    g._sdp_cache = data
    return data


def best_linear_bound(g: CellComplexGeometry, d: np.ndarray) -> np.ndarray | None:
    """A linear map ``M``, non-expanding on every cell, maximizing ``|M d|``.

    Solved as a semidefinite program in ``G = M^T M``; the factor is rescaled
    afterwards so that non-expansion holds exactly despite solver error.
    """
    B, Binv, idx, blocks = _sdp_data(g)
    r = B.shape[1]
    nv = len(idx)
    e = Binv @ d
    cvec = np.zeros(nv)
    for (i, j), k in idx.items():
        cvec[k] = -(e[i] * e[i] if i == j else math.sqrt(2) * e[i] * e[j])
    mats = [-sp.eye(nv)]
    rhs = [np.zeros(nv)]
    cones = [clarabel.PSDTriangleConeT(r)]
    for R, Q, T, q in blocks:
        mats.append(sp.csr_matrix(T))
        rhs.append(q)
        cones.append(clarabel.PSDTriangleConeT(R.shape[1]))
    A = sp.vstack(mats).tocsc()
    sol = clarabel.DefaultSolver(sp.csc_matrix((nv, nv)), cvec, A, np.concatenate(rhs),
                                 cones, _settings()).solve()
    if "Solved" not in str(sol.status):
        return None
    H = np.zeros((r, r))
    x = np.asarray(sol.x)
    for (i, j), k in idx.items():
        H[i, j] = H[j, i] = x[k] if i == j else x[k] / math.sqrt(2)
    w, V = np.linalg.eigh(H)
    keep = w > 1e-12
    if not keep.any():
        return None
    Mr = np.sqrt(w[keep])[:, None] * V[:, keep].T  # M acting on sum-zero coordinates
    worst = 1.0
    for R, Q, _, _ in blocks:
        C = np.linalg.cholesky(Q + 1e-300 * np.eye(len(Q)))
        Ci = np.linalg.inv(C)
        S = Ci @ (R.T @ (Mr.T @ Mr) @ R) @ Ci.T
        worst = max(worst, float(np.linalg.eigvalsh(S)[-1]))
    return (Mr @ Binv) / math.sqrt(worst * (1 + 1e-12))


def geodesic_distance(g: CellComplexGeometry, p, q, tol: float = 1e-6,
                      budget: int | None = None, max_iterations: int = 10**6,
                      strict: bool = True, sdp_bound: bool | None = None,
                      polish: bool = True) -> GeodesicResult:
    """Intrinsic distance from ``p`` to ``q`` with a gap certificate.

    The reported distance is the length of the returned path, an upper bound;
    ``gap`` bounds how far it can exceed the true distance.  When the gallery
    budget runs out first, BudgetExceeded carries the best result found
    (returned instead when ``strict`` is False).

    ``sdp_bound`` adds a per-query optimal linear lower bound.  By default it
    is used from the start when the geometry has no isometric ambient map and
    switched on after ``SDP_AFTER`` galleries otherwise.

    Heap keys are bucketed at ``tol / 10`` so that near-ties, which differ
    only by solver noise, are explored deepest first.
    """
    xp, xq = g.vector(p), g.vector(q)
    starts, goals = g.locate(xp), set(g.locate(xq))
    if not starts or not goals:
        raise NotLocated("endpoint does not lie in any cell")
    if budget is None:
        budget = default_budget(g)
    if np.allclose(xp, xq, atol=1e-15, rtol=0):
        seg = Segment(starts[0], xp, xq, 0.0)
        return GeodesicResult(0.0, StringPath((seg,)), 0.0, 0)

    counter = itertools.count()
    heap: list = []
    maps = [] if g.ambient is None else [g.ambient]
    sdp_at = 0 if (sdp_bound or (sdp_bound is None and not g.ambient_isometric)) else (
        SDP_AFTER if sdp_bound is None else -1)
    res = tol / 10

    def push(key, depth, gallery, evaluated):
        heapq.heappush(heap, (math.floor(key / res), -depth, next(counter), key, gallery, evaluated))

    def add_sdp_map():
        M = best_linear_bound(g, xp - xq)
        if M is not None:
            maps.append(M)

    if sdp_at == 0:
        add_sdp_map()
    root_key = max((float(np.linalg.norm(M @ (xp - xq))) for M in maps), default=0.0)
    for c in starts:
        push(root_key, 1, (c,), False)
    best_value, best_path = math.inf, None
    evaluations = iterations = 0
    exhausted = False
    while heap:
        bucket, neg_depth, _, key, gallery, evaluated = heap[0]
        if bucket * res >= best_value - tol:
            break
        if not evaluated and (evaluations >= budget or iterations >= max_iterations):
            exhausted = True
            break
        heapq.heappop(heap)
        if evaluated:
            for c in g.neighbors[gallery[-1]]:
                if c not in gallery:
                    push(key, 1 - neg_depth, gallery + (c,), False)
            continue
        evaluations += 1
        if evaluations == sdp_at:
            add_sdp_map()
        last = gallery[-1]
        lb = key
        if last in goals:
            done = _solve_gallery(g, gallery, xp, xq, complete=True)
            if done is not None:
                iterations += done.iterations
                if done.value < best_value:
                    best_value, best_path = done.value, done.path
                if g.ambient_isometric:
                    lb = max(lb, done.value)
        if not (last in goals and g.ambient_isometric) and len(gallery) > 1:
            part = _solve_gallery(g, gallery, xp, xq, complete=False, maps=maps)
            if part is not None:
                iterations += part.iterations
                lb = max(lb, part.value)
        if lb < best_value - tol:
            push(lb, -neg_depth, gallery, True)
    if best_path is None:
        if exhausted:
            raise BudgetExceeded("no complete path found within budget", None)
        raise Disconnected("no string joins the two points")
    if polish:
        best_path = polish_path(g, best_path)
        best_value = best_path.length
    open_min = min(e[0] for e in heap) * res if heap else best_value
    gap = max(0.0, best_value - open_min)
    result = GeodesicResult(best_value, best_path, gap, evaluations, exhausted)
    if exhausted and strict:
        raise BudgetExceeded(f"gallery budget {budget} exhausted with gap {gap:.3g}", result)
    return result


def geodesic_point(result: GeodesicResult, t: float) -> np.ndarray:
    """``gamma(t * length)`` by arclength along the returned string."""
    return result.path.point_at(t * result.path.length)[1]


# -- independent oracle ------------------------------------------------------------


def _face_net(g: CellComplexGeometry, face: tuple, k: int):
    m = len(face)
    if g.kind == CUBE:
        for combo in itertools.product(range(k + 1), repeat=m):
            yield dict(zip(face, combo))
    else:
        for bars in itertools.combinations(range(k + m - 1), m - 1):
            parts, prev = [], -1
            for b in bars + (k + m - 1,):
                parts.append(b - prev - 1)
                prev = b
            yield dict(zip(face, parts))


def grid_oracle_distance(g: CellComplexGeometry, p, q, h: float) -> float:
    """Shortest path through a lattice net of step ``h`` on every gluing face.

    Nodes are ``p``, ``q`` and the grid points (multiples of ``1/ceil(1/h)``
    in cube or barycentric coordinates) on every face shared by two or more
    cells; two nodes are joined when they lie in a common cell, weighted by
    their in-cell distance.  The value is the length of an actual string, so
    it never undercuts the intrinsic distance.
    """
    if h <= 0:
        raise ValueError("net spacing must be positive")
    k = max(1, math.ceil(1 / h - 1e-12))
    xp, xq = g.vector(p), g.vector(q)
    if not g.locate(xp) or not g.locate(xq):
        raise NotLocated("endpoint does not lie in any cell")
    faces = set()
    for i, j in itertools.combinations(range(len(g.cells)), 2):
        if g.adjacent(i, j):
            faces.add(g.shared(i, j))
    nodes: dict = {}
    vectors = [xp, xq]
    for face in sorted(faces):
        for counts in _face_net(g, face, k):
            key = tuple(sorted((lab, c) for lab, c in counts.items() if c))
            if key in nodes:
                continue
            v = np.zeros(g.dim)
            for lab, c in counts.items():
                v[lab] = c / k
            nodes[key] = len(vectors)
            vectors.append(v)
    X = np.array(vectors)
    rows, cols, vals = [], [], []
    for ci, cell in enumerate(g.cells):
        idx = list(cell.labels)
        outside = np.ones(g.dim, dtype=bool)
        outside[idx] = False
        members = np.flatnonzero(~(np.abs(X[:, outside]) > 1e-12).any(axis=1))
        if len(members) < 2:
            continue
        Y = X[np.ix_(members, idx)] @ cell.metric.T
        D = np.sqrt(np.maximum(((Y[:, None, :] - Y[None, :, :]) ** 2).sum(-1), 0.0))
        iu, ju = np.triu_indices(len(members), 1)
        rows.append(members[iu])
        cols.append(members[ju])
        vals.append(D[iu, ju])
    if not rows:
        raise Disconnected("net has no edges")
    r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    v = np.where(v == 0, 1e-300, v)  # keep zero-length edges in the sparse graph
    graph = sp.coo_matrix((v, (r, c)), shape=(len(X), len(X))).tocsr()
    dist = dijkstra(graph, directed=False, indices=0)
    if not np.isfinite(dist[1]):
        raise Disconnected("no net path joins the two points")
    return float(dist[1])
