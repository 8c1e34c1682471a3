"""Command-line front end: ``orthocat {check,represent,distance,cat0,generate}``.

JSON results go to stdout, diagnostics to stderr.  Exit codes: 0 ok,
2 parse error, 3 failed precondition, 4 budget exhausted.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import io
from .cat0 import flag_witness_check, sampled_cat0
from .errors import BadParams, BudgetExceeded, NotLocallyDistributive, NotLocated, OrthocatError
from .generators import FAMILIES, generate
from .geodesic import complex_of_cc, complex_of_orthoschemes, geodesic_distance
from .geometry import EuclideanPoint, PLPoint, embed_cc
from .posets import as_semilattice, is_flag_semilattice, is_locally_distributive, property_report
from .representation import birkhoff
from .simplicial import OrderedComplex, face_poset

log = logging.getLogger("orthocat")


def _poset(path):
    return io.parse_poset(io.read_json(path))


def cmd_check(args) -> dict:
    return property_report(_poset(args.input)).to_json()


def cmd_represent(args) -> dict:
    s = as_semilattice(_poset(args.input))
    rep = birkhoff(s, verify=True)
    out = {"complex": io.complex_to_json(rep.complex), "phi": rep.phi_table()}
    # the emitted complex must re-parse to the same ordered complex
    back = io.parse_complex(out["complex"])
    if back.complex != rep.complex.complex or back.vertex_order != rep.complex.vertex_order:
        raise AssertionError("emitted complex does not round-trip")
    return out


def _geometry_and_points(args):
    data = io.read_json(args.input)
    raw = [io.parse_point(io.read_json(src)) for src in (args.p, args.q)]
    if io.is_poset_json(data):
        p = io.parse_poset(data)
        g = complex_of_orthoschemes(p)
        pts = []
        for pt in raw:
            if isinstance(pt, EuclideanPoint):
                raise NotLocated("points of a poset geometry are given as chain + weights")
            pts.append(PLPoint.make(p, *pt))
        return g, pts
    K = io.parse_complex(data)
    K = K.complex if isinstance(K, OrderedComplex) else K
    g = complex_of_cc(K)
    pts = []
    for pt in raw:
        if not isinstance(pt, EuclideanPoint):
            faces = [frozenset(c if isinstance(c, list) else [c]) for c in pt[0]]
            pt = embed_cc(K, PLPoint.make(face_poset(K).base, faces, pt[1]))
        pts.append(pt)
    return g, pts


def _result_json(g, r) -> dict:
    def lab(cell):
        return [str(g.labels[i]) for i in g.cells[cell].labels]

    return {
        "distance": r.distance,
        "gap": r.gap,
        "galleries": r.galleries,
        "budget_exhausted": r.budget_exhausted,
        "path": [
            {
                "cell": lab(seg.cell),
                "from": io.point_to_json(g.to_point(seg.start)),
                "to": io.point_to_json(g.to_point(seg.end)),
                "length": seg.length,
            }
            for seg in r.path.segments
        ],
    }


def cmd_distance(args) -> dict:
    g, (p, q) = _geometry_and_points(args)
    try:
        r = geodesic_distance(g, p, q, tol=args.tol, budget=args.budget)
    except BudgetExceeded as exc:
        if exc.result is not None:
            exc.payload = _result_json(g, exc.result)
        raise
    return _result_json(g, r)


def _comparison_json(c) -> dict:
    return {"margin": c.margin, "slack": c.slack, "certified_margin": c.margin - c.slack,
            "t": c.t, "distances": c.distances}


def cmd_cat0(args) -> dict:
    p = _poset(args.input)
    s = as_semilattice(p)
    ld = is_locally_distributive(s)
    if not ld:
        if not is_flag_semilattice(s):
            raise NotLocallyDistributive("input is not locally distributive", witness=ld.witness)
        log.warning("input is not locally distributive; running random comparisons only")
        v = sampled_cat0(p, trials=args.trials, seed=args.seed, tol=args.tol, budget=args.budget)
    else:
        v = flag_witness_check(s, trials=args.trials, seed=args.seed, tol=args.tol, budget=args.budget)
    witness = None
    if v.witness is not None:
        rep = birkhoff(s, verify=False)
        K = rep.complex.complex
        witness = {
            "faces": [K.label(f) for f in v.witness],
            "elements": [str(rep.psi[f]) for f in v.witness],
            **_comparison_json(v.witness_margin),
        }
    worst = max(v.samples, key=lambda c: c.margin, default=None)
    out = {
        "verdict": v.verdict,
        "flag": v.flag,
        "max_margin": v.max_margin,
        "witness": witness,
        "trials": len(v.samples),
        "max_sampled": None if worst is None else _comparison_json(worst),
        "sampling_only": v.sampling_only,
    }
    if v.sampling_only:
        out["note"] = "random comparisons only; this is evidence, not a proof"
    return out


def cmd_generate(args) -> dict:
    params = {}
    for key in FAMILIES.get(args.family, ()):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    if args.family == "random-distributive":
        params.setdefault("seed", args.seed)
    for key in ("n", "size"):
        if getattr(args, key) is not None and key not in FAMILIES.get(args.family, ()):
            raise BadParams(f"family {args.family!r} takes no --{key}")
    return io.poset_to_json(generate(args.family, **params))


COMMANDS = {
    "check": cmd_check,
    "represent": cmd_represent,
    "distance": cmd_distance,
    "cat0": cmd_cat0,
    "generate": cmd_generate,
}


def positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=positive_float, default=1e-6, help="distance tolerance")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--trials", type=int, default=100, help="sampled CAT(0) comparisons")
    common.add_argument("--budget", type=int, default=None, help="gallery budget per geodesic")
    common.add_argument("--format", choices=["json"], default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="orthocat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", parents=[common], help="structural predicates of a poset")
    p.add_argument("input")
    p = sub.add_parser("represent", parents=[common], help="ordered complex K with DF(K) = S")
    p.add_argument("input")
    p = sub.add_parser("distance", parents=[common], help="intrinsic distance between two points")
    p.add_argument("input", help="poset or complex JSON")
    p.add_argument("p", help="point JSON (file or inline)")
    p.add_argument("q", help="point JSON (file or inline)")
    p = sub.add_parser("cat0", parents=[common], help="CAT(0) test by witnesses and sampling")
    p.add_argument("input")
    p = sub.add_parser("generate", parents=[common], help="emit a named poset family")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--size", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.trials < 0 or (args.budget is not None and args.budget < 1):
        print("error: --trials must be >= 0 and --budget >= 1", file=sys.stderr)
        return 2
    try:
        out = COMMANDS[args.command](args)
    except OrthocatError as exc:
        payload = getattr(exc, "payload", None)
        if payload is not None:
            print(io.dumps(payload))
        print(f"error: {exc}", file=sys.stderr)
        if exc.witness is not None:
            print(f"witness: {exc.witness!r}", file=sys.stderr)
        return exc.exit_code
    print(io.dumps(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
