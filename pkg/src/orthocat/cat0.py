"""The CAT(0) comparison inequality, evaluated numerically.

``cat0_check`` measures one instance of the inequality along a computed
geodesic.  ``flag_witness_check`` applies it to the canonical witnesses of a
non-flag semilattice (three pairwise bounded down faces without a common
bound) and falls back to random sampling otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded
from .geodesic import (
    CellComplexGeometry,
    GeodesicResult,
    complex_of_cc,
    complex_of_orthoschemes,
    geodesic_distance,
    geodesic_point,
)
from .geometry import characteristic, embed_cc, PLPoint
from .posets import Poset, Semilattice, as_semilattice, is_flag_semilattice
from .representation import birkhoff
from .simplicial import down_faces

CUBE, ORTHOSCHEME = "cube", "orthoscheme"


@dataclass(frozen=True)
class Comparison:
    """One evaluation of the comparison inequality.

    ``margin`` is ``lhs - rhs``; positive means the inequality fails.
    ``slack`` bounds how much of the margin can come from solver error.
    """

    margin: float
    slack: float
    t: float
    distances: dict = field(default_factory=dict)

    def __float__(self):
        return self.margin

    @property
    def certified_violation(self) -> float:
        return self.margin - self.slack


def _distance(g, a, b, tol, budget) -> GeodesicResult:
    try:
        return geodesic_distance(g, a, b, tol=tol, budget=budget)
    except BudgetExceeded as exc:
        if exc.result is None:
            raise
        return exc.result


def cat0_check(g: CellComplexGeometry, x, y, z, t: float = 0.5, tol: float = 1e-6,
               budget: int | None = None) -> Comparison:
    """lhs - rhs of ``d(g(tl), z)^2 <= t d(y,z)^2 + (1-t) d(x,z)^2 - t(1-t) d(x,y)^2``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    xv, yv, zv = g.vector(x), g.vector(y), g.vector(z)
    xy = _distance(g, xv, yv, tol, budget)
    xz = _distance(g, xv, zv, tol, budget)
    yz = _distance(g, yv, zv, tol, budget)
    m = geodesic_point(xy, t)
    mz = _distance(g, m, zv, tol, budget)
    lhs = mz.distance ** 2
    rhs = t * yz.distance ** 2 + (1 - t) * xz.distance ** 2 - t * (1 - t) * xy.distance ** 2
    # each reported distance D satisfies D - gap <= d <= D; first-order error of D^2
    slack = 2 * (mz.distance * mz.gap + t * yz.distance * yz.gap
                 + (1 - t) * xz.distance * xz.gap + t * (1 - t) * xy.distance * xy.gap)
    slack += tol
    dists = {"xy": xy.distance, "xz": xz.distance, "yz": yz.distance, "mz": mz.distance}
    return Comparison(lhs - rhs, slack, t, dists)


# -- sampling -------------------------------------------------------------------


def random_chain_point(p: Poset, rng: np.random.Generator, chains=None) -> dict:
    """A random point of ``|P|``: Dirichlet weights on a random maximal chain."""
    chains = p.maximal_chains() if chains is None else chains
    chain = chains[rng.integers(len(chains))]
    w = rng.dirichlet(np.ones(len(chain)))
    return dict(zip(chain, w))


def sample_margins(g: CellComplexGeometry, sampler, trials: int, rng: np.random.Generator,
                   tol: float = 1e-6, budget: int | None = None, t: float | None = None) -> list:
    """``trials`` comparisons at random triples; ``t`` is uniform in [0, 1] unless fixed."""
    out = []
    for _ in range(trials):
        x, y, z = sampler(), sampler(), sampler()
        tt = float(rng.uniform()) if t is None else t
        out.append(cat0_check(g, x, y, z, tt, tol, budget))
    return out


# -- witnesses --------------------------------------------------------------------


def bad_triples(df: Semilattice) -> list[tuple]:
    """Minimal triples of down faces that are pairwise bounded but not bounded."""
    faces = df.elements
    bad = []
    for a, b, c in itertools.combinations(faces, 3):
        ab, ac, bc = df.join(a, b), df.join(a, c), df.join(b, c)
        if ab is not None and ac is not None and bc is not None and not df.is_bounded((a, b, c)):
            bad.append((a, b, c))

    def below(s, t):
        return any(all(u <= v for u, v in zip(s, perm)) for perm in itertools.permutations(t))

    return [t for t in bad if not any(s != t and below(s, t) for s in bad)]


@dataclass
class FlagVerdict:
    flag: bool
    consistent: bool
    witness: tuple | None = None
    witness_margin: Comparison | None = None
    samples: list = field(default_factory=list)
    sampling_only: bool = False

    @property
    def max_margin(self) -> float:
        vals = [c.margin for c in self.samples]
        if self.witness_margin is not None:
            vals.append(self.witness_margin.margin)
        return max(vals, default=0.0)

    @property
    def verdict(self) -> str:
        return "flag-and-consistent" if self.consistent else "violation-found"


def _violated(c: Comparison, tol: float) -> bool:
    return c.margin > tol + c.slack


def flag_witness_check(s: Semilattice, trials: int = 100, seed: int = 0, tol: float = 1e-6,
                       geometry: str = CUBE, budget: int | None = None) -> FlagVerdict:
    """Decide CAT(0)-consistency of ``|S|`` by its canonical witnesses plus sampling.

    ``S`` is represented as ``DF(K)``; its realization is the down region of
    the cubical cone ``CC(K)``, a convex subset, so distances are computed in
    ``CC(K)`` (``geometry="cube"``) or in the orthoscheme complex of ``S``
    itself (``geometry="orthoscheme"``).
    """
    rep = birkhoff(s)
    oc = rep.complex
    K = oc.complex
    df = down_faces(oc)
    rng = np.random.default_rng(seed)
    chains = df.base.maximal_chains()
    if geometry == CUBE:
        g = complex_of_cc(K)

        def lift(sigma):
            return characteristic(sigma).coords

        def sampler():
            point = random_chain_point(df.base, rng, chains)
            return embed_cc(K, PLPoint.make(df.base, point)).coords
    elif geometry == ORTHOSCHEME:
        g = complex_of_orthoschemes(s.base)
        psi = rep.psi

        def lift(sigma):
            return {psi[sigma]: 1.0}

        pchains = s.base.maximal_chains()

        def sampler():
            return random_chain_point(s.base, rng, pchains)
    else:
        raise ValueError(f"unknown geometry {geometry!r}")

    triples = bad_triples(df)
    result = FlagVerdict(flag=not triples, consistent=True)
    for a, b, c in triples:
        cmp = cat0_check(g, lift(a), lift(b), lift(c), 0.5, tol, budget)
        if result.witness_margin is None or cmp.margin > result.witness_margin.margin:
            result.witness, result.witness_margin = (a, b, c), cmp
    if result.witness_margin is not None and _violated(result.witness_margin, tol):
        result.consistent = False
    result.samples = sample_margins(g, sampler, trials, rng, tol, budget)
    if any(_violated(c, tol) for c in result.samples):
        result.consistent = False
    return result


def sampled_cat0(p: Poset, trials: int = 100, seed: int = 0, tol: float = 1e-6,
                 budget: int | None = None) -> FlagVerdict:
    """Sampling-only test in the orthoscheme complex of ``p`` (no witness search)."""
    s = as_semilattice(p)
    g = complex_of_orthoschemes(p)
    rng = np.random.default_rng(seed)
    chains = p.maximal_chains()
    samples = sample_margins(g, lambda: random_chain_point(p, rng, chains), trials, rng, tol, budget)
    flag = is_flag_semilattice(s).ok
    consistent = not any(_violated(c, tol) for c in samples)
    return FlagVerdict(flag=flag, consistent=consistent, samples=samples, sampling_only=True)

