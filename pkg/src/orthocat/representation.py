"""Birkhoff-style representation of locally distributive semilattices.

For a locally distributive semilattice ``S`` the complex ``K`` has vertex set
``Irr S`` (with the induced order) and faces the subsets of ``Irr S`` bounded
in ``S``.  The maps ``phi(x) = (Irr S)^{<=x}`` and ``psi(sigma) = join(sigma)``
are mutually inverse isomorphisms between ``S`` and ``DF(K)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotLocallyBoolean, NotLocallyDistributive
from .posets import Semilattice, irreducibles, is_locally_boolean, is_locally_distributive
from .simplicial import OrderedComplex, SimplicialComplex, down_faces


@dataclass(frozen=True)
class Representation:
    source: Semilattice
    complex: OrderedComplex
    phi: dict = field(repr=False)
    psi: dict = field(repr=False)

    def phi_table(self, label=str) -> dict:
        """JSON-ready ``{element: [irreducibles below it]}``."""
        K = self.complex.complex
        return {label(x): [label(v) for v in K.sort_vertices(f)] for x, f in self.phi.items()}


@dataclass
class RepresentationReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def _build_complex(s: Semilattice, irr) -> SimplicialComplex:
    # every bounded subset of Irr S lies below some maximal element
    base = s.base
    tops = [frozenset(v for v in irr if base.leq(v, m)) for m in base.maximal_elements()]
    return SimplicialComplex(irr.elements, tops)


def birkhoff(s: Semilattice, verify: bool = True) -> Representation:
    """Represent ``s`` as the down-face semilattice of an ordered complex."""
    verdict = is_locally_distributive(s)
    if not verdict:
        raise NotLocallyDistributive(
            "input is not locally distributive", witness=verdict.witness
        )
    irr = irreducibles(s)
    K = _build_complex(s, irr)
    oc = OrderedComplex(K, irr)
    phi = {x: frozenset(v for v in irr if s.leq(v, x)) for x in s.elements}
    psi = {}
    for f in down_faces(oc).elements:
        psi[f] = s.join_all(f)
    rep = Representation(s, oc, phi, psi)
    if verify:
        report = verify_representation(rep)
        if not report:
            raise AssertionError(f"representation failed verification: {report.failures[:3]}")
    return rep


def verify_representation(r: Representation) -> RepresentationReport:
    """Exhaustively confirm that phi and psi are inverse order isomorphisms."""
    report = RepresentationReport()
    s, oc = r.source, r.complex
    K = oc.complex
    df = [f for f in K.faces() if oc.is_down_set(f)]
    df_set = set(df)
    if set(r.psi) != df_set:
        report.failures.append(("psi-domain", sorted(map(K.label, df_set ^ set(r.psi)))))
    for x in s.elements:
        f = r.phi.get(x)
        if f is None or f not in df_set:
            report.failures.append(("phi-not-down-face", x))
            continue
        if r.psi.get(f) != x:
            report.failures.append(("psi-phi", x))
    for f in df:
        y = r.psi.get(f)
        if y is None or r.phi.get(y) != f:
            report.failures.append(("phi-psi", K.label(f)))
    for x in s.elements:
        for y in s.elements:
            fx, fy = r.phi.get(x), r.phi.get(y)
            if fx is None or fy is None:
                continue
            if s.leq(x, y) != (fx <= fy):
                report.failures.append(("phi-order", x, y))
    for f in df:
        for g in df:
            if f <= g and f in r.psi and g in r.psi and not s.leq(r.psi[f], r.psi[g]):
                report.failures.append(("psi-order", K.label(f), K.label(g)))
    return report


def boolean_representation(s: Semilattice) -> SimplicialComplex:
    """A complex ``K`` with ``F(K)`` isomorphic to the locally Boolean ``s``."""
    verdict = is_locally_boolean(s)
    if not verdict:
        raise NotLocallyBoolean("input is not locally Boolean", witness=verdict.witness)
    rep = birkhoff(s)
    order = rep.complex.vertex_order
    if order.covers():
        raise AssertionError("irreducibles of a locally Boolean semilattice must form an antichain")
    return rep.complex.complex
