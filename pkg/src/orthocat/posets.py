"""Finite posets and meet-semilattices.

Elements are arbitrary hashable identifiers (strings when read from JSON,
frozensets for face posets).  The order in which elements are declared is the
canonical iteration order; every witness returned by a predicate is the first
counterexample in that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import CycleDetected, NotASemilattice, UnknownElement

Element = Hashable


class Verdict(NamedTuple):
    """Outcome of a structural predicate; ``witness`` is None when ``ok``."""

    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def _bits(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def _iter_bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class Poset:
    """A finite partially ordered set stored as its full order relation."""

    def __init__(self, elements: Sequence[Element], le: np.ndarray):
        self.elements = tuple(elements)
        n = len(self.elements)
        self._index = {x: i for i, x in enumerate(self.elements)}
        if len(self._index) != n:
            raise ValueError("duplicate element identifiers")
        le = np.array(le, dtype=bool)
        if le.shape != (n, n):
            raise ValueError("order relation has the wrong shape")
        if n and not le.diagonal().all():
            raise ValueError("order relation is not reflexive")
        both = le & le.T
        np.fill_diagonal(both, False)
        if both.any():
            i, j = map(int, np.argwhere(both)[0])
            raise CycleDetected(
                f"{self.elements[i]!r} and {self.elements[j]!r} precede each other",
                witness=(self.elements[i], self.elements[j]),
            )
        if n and (((le.astype(np.int64) @ le.astype(np.int64)) > 0) & ~le).any():
            raise ValueError("order relation is not transitive")
        le.setflags(write=False)
        self.le = le
        self.down_mask = tuple(_bits(np.flatnonzero(le[:, i])) for i in range(n))
        self.up_mask = tuple(_bits(np.flatnonzero(le[i])) for i in range(n))

    @classmethod
    def from_relation(cls, elements: Sequence[Element], leq) -> "Poset":
        """Build from a predicate ``leq(x, y)`` that already is a partial order."""
        elements = tuple(elements)
        le = np.array([[bool(leq(x, y)) for y in elements] for x in elements], dtype=bool)
        return cls(elements, le.reshape(len(elements), len(elements)))

    # -- basic queries -------------------------------------------------------

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._index

    def __eq__(self, other):
        if not isinstance(other, Poset):
            return NotImplemented
        if set(self.elements) != set(other.elements):
            return False
        return all(
            self.leq(x, y) == other.leq(x, y) for x in self.elements for y in self.elements
        )

    def __hash__(self):
        return hash(frozenset(self.elements))

    def __repr__(self):
        return f"Poset({len(self)} elements, {len(self.covers())} covers)"

    def index(self, x: Element) -> int:
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise UnknownElement(f"unknown element {x!r}", witness=(x,)) from None

    def leq(self, x: Element, y: Element) -> bool:
        return bool(self.le[self.index(x), self.index(y)])

    def lt(self, x: Element, y: Element) -> bool:
        return x != y and self.leq(x, y)

    def comparable(self, x: Element, y: Element) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    def down(self, x: Element) -> tuple:
        """Principal ideal ``P^{<=x}`` in canonical order."""
        return tuple(self.elements[i] for i in _iter_bits(self.down_mask[self.index(x)]))

    def up(self, x: Element) -> tuple:
        return tuple(self.elements[i] for i in _iter_bits(self.up_mask[self.index(x)]))

    def elements_of(self, mask: int) -> tuple:
        return tuple(self.elements[i] for i in _iter_bits(mask))

    @cached_property
    def _cover_matrix(self) -> np.ndarray:
        strict = self.le.copy()
        np.fill_diagonal(strict, False)
        s = strict.astype(np.int64)
        return strict & ~((s @ s) > 0)

    def covers(self) -> list[tuple]:
        """Hasse diagram as ``(lower, upper)`` pairs in canonical order."""
        return [(self.elements[i], self.elements[j]) for i, j in np.argwhere(self._cover_matrix)]

    def lower_covers(self, x: Element) -> tuple:
        j = self.index(x)
        return tuple(self.elements[i] for i in np.flatnonzero(self._cover_matrix[:, j]))

    def upper_covers(self, x: Element) -> tuple:
        i = self.index(x)
        return tuple(self.elements[j] for j in np.flatnonzero(self._cover_matrix[i]))

    def minimal_elements(self) -> tuple:
        return tuple(x for i, x in enumerate(self.elements) if self.down_mask[i] == 1 << i)

    def maximal_elements(self) -> tuple:
        return tuple(x for i, x in enumerate(self.elements) if self.up_mask[i] == 1 << i)

    @cached_property
    def heights(self) -> dict:
        """``h(x)``: length of a longest chain in ``P^{<=x}``."""
        n = len(self)
        order = sorted(range(n), key=lambda i: bin(self.down_mask[i]).count("1"))
        h = [0] * n
        for j in order:
            below = [i for i in _iter_bits(self.down_mask[j]) if i != j]
            h[j] = 1 + max(h[i] for i in below) if below else 0
        return {self.elements[i]: h[i] for i in range(n)}

    @property
    def height(self) -> int:
        return max(self.heights.values(), default=0)

    def is_chain(self, seq: Sequence[Element]) -> bool:
        """True iff ``seq`` is strictly increasing."""
        return all(self.lt(a, b) for a, b in zip(seq, seq[1:]))

    def sorted_chain(self, items: Iterable[Element]) -> tuple:
        """Sort a totally ordered subset increasingly; raises ValueError otherwise."""
        items = sorted(set(items), key=lambda x: bin(self.down_mask[self.index(x)]).count("1"))
        if not self.is_chain(items):
            raise ValueError("not a chain")
        return tuple(items)

    def induced(self, subset: Iterable[Element]) -> "Poset":
        keep = set(subset)
        idx = [i for i, x in enumerate(self.elements) if x in keep]
        if len(idx) != len(keep):
            missing = keep - set(self.elements)
            raise UnknownElement(f"unknown elements {sorted(map(repr, missing))}")
        return Poset([self.elements[i] for i in idx], self.le[np.ix_(idx, idx)])

    def is_connected(self) -> bool:
        """Zigzag connectivity (``x <= x1 >= x2 <= ... y``)."""
        n = len(self)
        if n == 0:
            return True
        comparable = self.le | self.le.T
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(comparable[i]):
                if int(j) not in seen:
                    seen.add(int(j))
                    stack.append(int(j))
        return len(seen) == n

    def maximal_chains(self) -> list[tuple]:
        """All maximal chains, each listed bottom to top."""
        chains = []

        def extend(chain):
            ups = self.upper_covers(chain[-1])
            if not ups:
                chains.append(tuple(chain))
                return
            for y in ups:
                extend(chain + [y])

        for m in self.elements:
            if not self.lower_covers(m):
                extend([m])
        return chains


def build_poset(elements: Sequence[Element], covers: Iterable[Sequence[Element]]) -> Poset:
    """Poset whose order is the reflexive-transitive closure of ``covers``."""
    elements = tuple(elements)
    index = {x: i for i, x in enumerate(elements)}
    if len(index) != len(elements):
        raise ValueError("duplicate element identifiers")
    n = len(elements)
    le = np.eye(n, dtype=bool)
    for pair in covers:
        a, b = pair
        for x in (a, b):
            if x not in index:
                raise UnknownElement(f"cover references undeclared element {x!r}", witness=(x,))
        le[index[a], index[b]] = True
    for k in range(n):
        le |= le[:, [k]] & le[[k], :]
    return Poset(elements, le)


def height_of(p: Poset, x: Element) -> int:
    p.index(x)
    return p.heights[x]


# -- semilattices --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Semilattice:
    """A finite meet-semilattice with cached meet and (partial) join tables.

    ``join_table[i, j]`` is -1 when the pair is unbounded.
    """

    base: Poset
    meet_table: np.ndarray = field(repr=False)
    join_table: np.ndarray = field(repr=False)
    bottom: Element = None

    @property
    def elements(self) -> tuple:
        return self.base.elements

    def __len__(self):
        return len(self.base)

    def __iter__(self):
        return iter(self.base)

    def __contains__(self, x):
        return x in self.base

    def __repr__(self):
        return f"Semilattice({len(self)} elements, bottom={self.bottom!r})"

    def index(self, x):
        return self.base.index(x)

    def leq(self, x, y) -> bool:
        return self.base.leq(x, y)

    def meet(self, x, y):
        return self.elements[self.meet_table[self.index(x), self.index(y)]]

    def join(self, x, y):
        """Least upper bound, or None when ``{x, y}`` has no upper bound."""
        k = self.join_table[self.index(x), self.index(y)]
        return None if k < 0 else self.elements[k]

    def join_all(self, items: Iterable):
        """Join of a finite subset (``bottom`` for the empty set); None if unbounded."""
        acc = self.index(self.bottom)
        for x in items:
            acc = self.join_table[acc, self.index(x)]
            if acc < 0:
                return None
        return self.elements[acc]

    def is_bounded(self, items: Iterable) -> bool:
        mask = -1
        for x in items:
            mask &= self.base.up_mask[self.index(x)]
            if not mask:
                return False
        return True

    def ideal(self, x) -> tuple:
        return self.base.down(x)


def _least(p: Poset, mask: int) -> int | None:
    """Index of the minimum of a subset given as bitmask, if it has one."""
    for i in _iter_bits(mask):
        if p.up_mask[i] & mask == mask:
            return i
    return None


def _greatest(p: Poset, mask: int) -> int | None:
    for i in _iter_bits(mask):
        if p.down_mask[i] & mask == mask:
            return i
    return None


def as_semilattice(p: Poset) -> Semilattice:
    """Promote ``p`` to a semilattice, or raise NotASemilattice with a witness pair."""
    n = len(p)
    if n == 0:
        raise NotASemilattice("the empty poset has no minimum", witness=None)
    meet = np.empty((n, n), dtype=np.int64)
    join = np.full((n, n), -1, dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            lower = p.down_mask[i] & p.down_mask[j]
            g = _greatest(p, lower) if lower else None
            if g is None:
                why = "no common lower bound" if not lower else "no greatest lower bound"
                x, y = p.elements[i], p.elements[j]
                raise NotASemilattice(f"{x!r}, {y!r}: {why}", witness=(x, y))
            meet[i, j] = meet[j, i] = g
            upper = p.up_mask[i] & p.up_mask[j]
            if upper:
                lub = _least(p, upper)
                if lub is None:  # impossible in a finite semilattice
                    raise NotASemilattice("bounded pair without least upper bound",
                                          witness=(p.elements[i], p.elements[j]))
                join[i, j] = join[j, i] = lub
    bottom = _least(p, (1 << n) - 1)
    meet.setflags(write=False)
    join.setflags(write=False)
    return Semilattice(p, meet, join, p.elements[bottom])


def bounded_join(s: Semilattice, x, y):
    """``x v y`` when the pair is bounded above, else None."""
    return s.join(x, y)


# -- structural predicates ---------------------------------------------------


def _distributive_failure(s: Semilattice, top: int):
    ideal = list(_iter_bits(s.base.down_mask[top]))
    M, J = s.meet_table, s.join_table
    for a in ideal:
        for b in ideal:
            for c in ideal:
                if M[a, J[b, c]] != J[M[a, b], M[a, c]]:
                    return a, b, c
    return None


def is_locally_distributive(s: Semilattice) -> Verdict:
    """Every principal ideal is a distributive lattice.

    Witness ``(x, y, z, top)`` with ``x ^ (y v z) != (x ^ y) v (x ^ z)`` inside
    the ideal below ``top``.
    """
    for top in range(len(s)):
        bad = _distributive_failure(s, top)
        if bad:
            return Verdict(False, tuple(s.elements[i] for i in (*bad, top)))
    return Verdict(True)


def is_locally_boolean(s: Semilattice) -> Verdict:
    """Every principal ideal is a Boolean lattice.

    Witness is a distributivity witness ``(x, y, z, top)`` or a pair
    ``(y, top)`` where ``y`` has no complement below ``top``.
    """
    dist = is_locally_distributive(s)
    if not dist:
        return dist
    b = s.index(s.bottom)
    M, J = s.meet_table, s.join_table
    for top in range(len(s)):
        ideal = list(_iter_bits(s.base.down_mask[top]))
        for y in ideal:
            if not any(M[y, z] == b and J[y, z] == top for z in ideal):
                return Verdict(False, (s.elements[y], s.elements[top]))
    return Verdict(True)


def is_flag_semilattice(s: Semilattice) -> Verdict:
    """Every pairwise bounded triple is bounded; witness is the first bad triple."""
    up = s.base.up_mask
    n = len(s)
    for i, j, k in combinations(range(n), 3):
        if up[i] & up[j] and up[i] & up[k] and up[j] & up[k] and not (up[i] & up[j] & up[k]):
            return Verdict(False, (s.elements[i], s.elements[j], s.elements[k]))
    return Verdict(True)


def is_irreducible(s: Semilattice, x) -> bool:
    i = s.index(x)
    if x == s.bottom:
        return False
    below = [j for j in _iter_bits(s.base.down_mask[i]) if j != i]
    J = s.join_table
    return not any(J[a, b] == i for a, b in combinations(below, 2))


def irreducibles(s: Semilattice) -> Poset:
    """Induced subposet of join-irreducible elements."""
    return s.base.induced(x for x in s.elements if is_irreducible(s, x))


@dataclass(frozen=True)
class PropertyReport:
    is_semilattice: bool
    is_locally_distributive: bool
    is_locally_boolean: bool
    is_flag: bool
    witnesses: dict

    def to_json(self) -> dict:
        return {
            "is_semilattice": self.is_semilattice,
            "is_locally_distributive": self.is_locally_distributive,
            "is_locally_boolean": self.is_locally_boolean,
            "is_flag": self.is_flag,
            "witnesses": self.witnesses,
        }


def property_report(p: Poset, label=str) -> PropertyReport:
    """Run every structural predicate; witnesses are rendered with ``label``."""
    try:
        s = as_semilattice(p)
    except NotASemilattice as exc:
        w = [label(x) for x in exc.witness] if exc.witness else []
        return PropertyReport(False, False, False, False,
                              {k: w for k in ("is_semilattice", "is_locally_distributive",
                                              "is_locally_boolean", "is_flag")})
    checks = {
        "is_locally_distributive": is_locally_distributive(s),
        "is_locally_boolean": is_locally_boolean(s),
        "is_flag": is_flag_semilattice(s),
    }
    witnesses = {k: [label(x) for x in v.witness] for k, v in checks.items() if not v.ok}
    return PropertyReport(True, checks["is_locally_distributive"].ok,
                          checks["is_locally_boolean"].ok, checks["is_flag"].ok, witnesses)
