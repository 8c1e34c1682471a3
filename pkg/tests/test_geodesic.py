import math

import numpy as np
import pytest

from corpus import path_complex, random_ordered_complex
from orthocat.errors import BudgetExceeded, DisconnectedPoset, NotLocated
from orthocat.generators import boolean, chain, empty_triangle_complex, ncp, random_complex
from orthocat.geodesic import (
    complex_of_cc,
    complex_of_orthoschemes,
    geodesic_distance,
    geodesic_point,
    grid_oracle_distance,
)
from orthocat.geometry import PLPoint, characteristic, embed_cc, in_cc, in_down_region
from orthocat.posets import build_poset
from orthocat.simplicial import down_faces, face_poset, simplex

SQUARE = simplex("ab")
L_SHAPE = path_complex()
TRIPOD = empty_triangle_complex()


def chi(*vs):
    return characteristic(vs)


def random_cc_point(rng, K, s=None):
    s = face_poset(K) if s is None else s
    chains = s.base.maximal_chains()
    c = chains[rng.integers(len(chains))]
    return embed_cc(K, PLPoint.make(s.base, dict(zip(c, rng.dirichlet(np.ones(len(c)))))))


# -- constructors -------------------------------------------------------------------


def test_square_is_one_cell():
    g = complex_of_cc(SQUARE)
    assert len(g.cells) == 1 and g.kind == "cube"


def test_path_gives_two_squares_sharing_b():
    g = complex_of_cc(L_SHAPE)
    assert len(g.cells) == 2
    assert [g.labels[i] for i in g.shared(0, 1)] == ["b"]


def test_tripod_gives_three_squares_glued_pairwise():
    g = complex_of_cc(TRIPOD)
    assert len(g.cells) == 3
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        assert len(g.shared(i, j)) == 1


def test_three_chain_is_single_triangle():
    g = complex_of_orthoschemes(chain(3))
    assert len(g.cells) == 1 and len(g.cells[0].labels) == 3
    assert not g.check_gluing()


def test_boolean_square_orthoschemes():
    g = complex_of_orthoschemes(boolean(2))
    assert len(g.cells) == 2 and not g.check_gluing() and g.ambient_isometric
    r = geodesic_distance(g, {"{}": 1}, {"{1,2}": 1})
    assert r.distance == pytest.approx(math.sqrt(2), abs=1e-9)


def test_ncp3_has_three_chains_through_atoms():
    p = ncp(3)
    g = complex_of_orthoschemes(p)
    assert len(g.cells) == 3
    middles = {chain[1] for chain in p.maximal_chains()}
    assert len(middles) == 3


def test_disconnected_poset():
    with pytest.raises(DisconnectedPoset):
        complex_of_orthoschemes(build_poset("ab", []))


# -- distances -------------------------------------------------------------------------


def test_square_diagonal():
    g = complex_of_cc(SQUARE)
    r = geodesic_distance(g, chi(), chi("a", "b"))
    assert abs(r.distance - math.sqrt(2)) <= 1e-9 and r.gap <= 1e-6


def test_l_shape():
    g = complex_of_cc(L_SHAPE)
    r = geodesic_distance(g, chi("a", "b"), chi("b", "c"))
    assert abs(r.distance - 2.0) <= 1e-6
    # the geodesic runs along the b = 1 wall
    for x in r.path.breakpoints():
        assert x[g.index["b"]] == pytest.approx(1.0, abs=1e-6)


def test_tripod_midpoint():
    g = complex_of_cc(TRIPOD)
    m = {"a": 0.5, "b": 0.5}
    # the midpoint lies on the edge a-b only, so only one square contains it
    r = geodesic_distance(g, m, chi("c"))
    assert abs(r.distance - math.sqrt(2.5)) <= 1e-6


def test_zero_distance():
    g = complex_of_cc(TRIPOD)
    assert geodesic_distance(g, chi("a"), chi("a")).distance == 0.0


def test_point_outside_complex():
    g = complex_of_cc(TRIPOD)
    with pytest.raises(NotLocated):
        geodesic_distance(g, {"a": 0.5, "b": 0.5, "c": 0.5}, chi())


def test_budget_exceeded_carries_result():
    p = ncp(4)
    g = complex_of_orthoschemes(p)
    rng = np.random.default_rng(5)
    chains = p.maximal_chains()
    carried = 0
    for _ in range(6):
        a = dict(zip(chains[rng.integers(len(chains))], rng.dirichlet(np.ones(4))))
        b = dict(zip(chains[rng.integers(len(chains))], rng.dirichlet(np.ones(4))))
        with pytest.raises(BudgetExceeded) as exc:
            geodesic_distance(g, a, b, budget=2, sdp_bound=False)
        res = exc.value.result
        if res is None:
            continue
        carried += 1
        assert res.budget_exhausted and res.gap > 0
        assert res.distance >= g.ambient_distance(g.vector(a), g.vector(b)) - 1e-9
        loose = geodesic_distance(g, a, b, budget=2, sdp_bound=False, strict=False)
        assert loose.distance == res.distance
    assert carried >= 1


def test_grid_square():
    g = complex_of_cc(SQUARE)
    v = grid_oracle_distance(g, chi(), chi("a", "b"), 0.25)
    assert math.sqrt(2) - 1e-12 <= v <= math.sqrt(2) + 0.1


def test_grid_l_shape():
    g = complex_of_cc(L_SHAPE)
    assert abs(grid_oracle_distance(g, chi("a", "b"), chi("b", "c"), 0.1) - 2.0) <= 0.05


def test_grid_nested_nets_are_monotone():
    rng = np.random.default_rng(6)
    for K in (L_SHAPE, TRIPOD):
        g = complex_of_cc(K)
        for _ in range(5):
            p, q = random_cc_point(rng, K), random_cc_point(rng, K)
            prev = math.inf
            for h in (0.5, 0.25, 0.125, 0.0625):
                v = grid_oracle_distance(g, p, q, h)
                assert v <= prev + 1e-12
                prev = v


def _complexes():
    rng = np.random.default_rng(7)
    return [SQUARE, L_SHAPE, TRIPOD, simplex("abc")] + [random_complex(rng, 4) for _ in range(3)]


@pytest.mark.parametrize("K", _complexes(), ids=lambda K: f"{len(K.vertices)}v{len(K.facets)}f")
def test_metric_properties(K):
    rng = np.random.default_rng(8)
    g = complex_of_cc(K)
    tol = 1e-6
    for _ in range(6):
        p, q, r = (random_cc_point(rng, K) for _ in range(3))
        pq = geodesic_distance(g, p, q, tol).distance
        qp = geodesic_distance(g, q, p, tol).distance
        pr = geodesic_distance(g, p, r, tol).distance
        qr = geodesic_distance(g, q, r, tol).distance
        assert abs(pq - qp) <= 2 * tol
        assert pr <= pq + qr + 2 * tol
        # ambient lower bound and grid upper bound
        assert p.distance(q) <= pq + tol
        assert pq <= grid_oracle_distance(g, p, q, 0.25) + tol


@pytest.mark.parametrize("K", _complexes(), ids=lambda K: f"{len(K.vertices)}v{len(K.facets)}f")
def test_equality_certificate(K):
    rng = np.random.default_rng(9)
    g = complex_of_cc(K)
    for _ in range(8):
        p, q = random_cc_point(rng, K), random_cc_point(rng, K)
        d = geodesic_distance(g, p, q).distance
        if abs(d - p.distance(q)) > 1e-6:
            continue
        xp, xq = g.vector(p), g.vector(q)
        for lam in np.linspace(0, 1, 100):
            assert in_cc(K, g.to_point((1 - lam) * xp + lam * xq), tol=1e-6)


def test_path_realizes_reported_length():
    rng = np.random.default_rng(10)
    g = complex_of_cc(TRIPOD)
    for _ in range(10):
        p, q = random_cc_point(rng, TRIPOD), random_cc_point(rng, TRIPOD)
        r = geodesic_distance(g, p, q)
        segs = r.path.segments
        total = sum(g.cells[s.cell].distance(s.start, s.end) for s in segs)
        assert total == pytest.approx(r.distance, abs=1e-12)
        assert np.allclose(segs[0].start, g.vector(p)) and np.allclose(segs[-1].end, g.vector(q))
        for a, b in zip(segs, segs[1:]):
            assert np.allclose(a.end, b.start, atol=1e-12)
        mid = geodesic_point(r, 0.5)
        assert g.locate(mid)


def test_down_region_is_convex():
    rng = np.random.default_rng(11)
    for _ in range(5):
        oc = random_ordered_complex(rng, 5)
        K, df = oc.complex, down_faces(oc)
        g = complex_of_cc(K)
        for _ in range(5):
            p, q = random_cc_point(rng, K, df), random_cc_point(rng, K, df)
            r = geodesic_distance(g, p, q)
            for x in r.path.breakpoints():
                assert in_down_region(oc, g.to_point(x), tol=1e-6)


def test_orthoscheme_distance_matches_cube_distance():
    rng = np.random.default_rng(12)
    K = TRIPOD
    s = face_poset(K)
    go, gc = complex_of_orthoschemes(s.base), complex_of_cc(K)
    chains = s.base.maximal_chains()
    for _ in range(10):
        a, b = (
            PLPoint.make(s.base, dict(zip(c, rng.dirichlet(np.ones(len(c))))))
            for c in (chains[rng.integers(len(chains))] for _ in range(2))
        )
        ro = geodesic_distance(go, a, b)
        rc = geodesic_distance(gc, embed_cc(K, a), embed_cc(K, b))
        assert abs(ro.distance - rc.distance) <= 2e-6 + ro.gap + rc.gap
