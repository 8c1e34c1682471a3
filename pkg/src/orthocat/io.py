"""JSON formats for posets, complexes and points.

Poset:   ``{"elements": [...], "covers": [[x, y], ...]}``
Complex: ``{"vertices": [...], "facets": [[...], ...], "vertex_order_covers": [[v, w], ...]}``
         (the last key is optional)
Points:  ``{"coords": {"v": 0.5, ...}}`` or ``{"chain": [...], "weights": [...]}``

Unknown keys are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .geometry import EuclideanPoint, PLPoint
from .posets import Poset, build_poset
from .simplicial import OrderedComplex, SimplicialComplex

POSET_KEYS = {"elements", "covers"}
COMPLEX_KEYS = {"vertices", "facets", "vertex_order_covers"}


def read_json(source: str):
    """Parse a file path, ``-`` for stdin, or an inline JSON document."""
    try:
        if source.lstrip().startswith(("{", "[")):
            return json.loads(source)
        if source == "-":
            import sys
            return json.load(sys.stdin)
        return json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {source!r}: {exc}") from None
    except OSError as exc:
        raise ParseError(f"cannot read {source!r}: {exc.strerror}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False, default=_default)


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, (frozenset, set, tuple)):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _check_keys(obj, allowed: set, required: set, what: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{what} JSON must be an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"unknown {what} keys: {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ParseError(f"missing {what} keys: {sorted(missing)}")


def _atom(x, what):
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ParseError(f"{what} must be strings or integers, got {x!r}")
    return x


def _pairs(items, what):
    if not isinstance(items, list):
        raise ParseError(f"{what} must be a list")
    out = []
    for pair in items:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{what} entries must be pairs, got {pair!r}")
        out.append(tuple(_atom(x, what) for x in pair))
    return out


def _atoms(items, what):
    if not isinstance(items, list):
        raise ParseError(f"{what} must be a list")
    return [_atom(x, what) for x in items]


def is_poset_json(obj) -> bool:
    return isinstance(obj, dict) and "elements" in obj


def parse_poset(obj) -> Poset:
    _check_keys(obj, POSET_KEYS, POSET_KEYS, "poset")
    elements = _atoms(obj["elements"], "elements")
    if len(set(elements)) != len(elements):
        raise ParseError("duplicate elements")
    return build_poset(elements, _pairs(obj["covers"], "covers"))


def poset_to_json(p: Poset, label=str) -> dict:
    return {
        "elements": [label(x) for x in p.elements],
        "covers": [[label(x), label(y)] for x, y in p.covers()],
    }


def parse_complex(obj) -> SimplicialComplex | OrderedComplex:
    _check_keys(obj, COMPLEX_KEYS, {"vertices", "facets"}, "complex")
    vertices = _atoms(obj["vertices"], "vertices")
    if not isinstance(obj["facets"], list):
        raise ParseError("facets must be a list")
    facets = [_atoms(f, "facet vertices") for f in obj["facets"]]
    unknown = {v for f in facets for v in f} - set(vertices)
    if unknown:
        raise ParseError(f"facets use undeclared vertices: {sorted(map(str, unknown))}")
    K = SimplicialComplex(vertices, facets)
    if "vertex_order_covers" not in obj:
        return K
    return OrderedComplex.from_covers(K, _pairs(obj["vertex_order_covers"], "vertex_order_covers"))


def complex_to_json(K: SimplicialComplex | OrderedComplex, label=str) -> dict:
    oc = K if isinstance(K, OrderedComplex) else None
    K = oc.complex if oc else K
    out = {
        "vertices": [label(v) for v in K.vertices],
        "facets": [[label(v) for v in K.sort_vertices(f)] for f in K.facets],
    }
    if oc is not None:
        out["vertex_order_covers"] = [[label(v), label(w)] for v, w in oc.vertex_order.covers()]
    return out


def parse_point(obj) -> EuclideanPoint | tuple:
    """An EuclideanPoint, or ``(chain, weights)`` to be resolved against a poset."""
    if not isinstance(obj, dict):
        raise ParseError("point JSON must be an object")
    if "coords" in obj:
        _check_keys(obj, {"coords"}, {"coords"}, "point")
        coords = obj["coords"]
        if not isinstance(coords, dict):
            raise ParseError("coords must be an object")
        return EuclideanPoint({k: _number(v) for k, v in coords.items()})
    _check_keys(obj, {"chain", "weights"}, {"chain", "weights"}, "point")
    chain, weights = obj["chain"], obj["weights"]
    if not isinstance(chain, list) or not isinstance(weights, list) or len(chain) != len(weights):
        raise ParseError("chain and weights must be lists of the same length")
    return chain, [_number(w) for w in weights]


def _number(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}")
    return v


def point_to_json(point, label=str) -> dict:
    if isinstance(point, EuclideanPoint):
        return {"coords": {label(k): float(v) for k, v in point.coords.items()}}
    if isinstance(point, PLPoint):
        return {"chain": [label(x) for x in point.chain], "weights": [float(w) for w in point.weights]}
    raise TypeError(f"not a point: {point!r}")
