import math

import numpy as np
import pytest

from corpus import square_complex
from orthocat.cat0 import bad_triples, cat0_check, flag_witness_check, sample_margins, sampled_cat0
from orthocat.errors import NotLocallyDistributive
from orthocat.generators import boolean, diamond_m3, divisor, empty_triangle, empty_triangle_complex, ncp
from orthocat.geodesic import complex_of_cc, complex_of_orthoschemes
from orthocat.geometry import PLPoint, characteristic, embed_cc
from orthocat.posets import as_semilattice
from orthocat.representation import birkhoff
from orthocat.simplicial import down_faces, face_poset, simplex


def test_single_cube_is_flat():
    rng = np.random.default_rng(0)
    g = complex_of_cc(simplex("abc"))
    for _ in range(20):
        x, y, z = (dict(zip("abc", rng.uniform(size=3))) for _ in range(3))
        c = cat0_check(g, x, y, z, t=float(rng.uniform()))
        assert c.margin <= 1e-9


def test_tripod_violation():
    g = complex_of_cc(empty_triangle_complex())
    c = cat0_check(g, characteristic("a"), characteristic("b"), characteristic("c"), 0.5)
    assert c.margin == pytest.approx(1.0, abs=1e-6)
    assert c.distances["mz"] == pytest.approx(math.sqrt(2.5), abs=1e-6)
    assert c.certified_violation > 0.99


def test_t_out_of_range():
    g = complex_of_cc(simplex("a"))
    with pytest.raises(ValueError):
        cat0_check(g, {}, {}, {}, 1.5)


def test_flag_cube_complex_samples():
    # a 4-cycle of squares is flag, hence CAT(0)
    K = square_complex()
    g = complex_of_cc(K)
    s = face_poset(K)
    chains = s.base.maximal_chains()
    rng = np.random.default_rng(1)

    def sampler():
        c = chains[rng.integers(len(chains))]
        return embed_cc(K, PLPoint.make(s.base, dict(zip(c, rng.dirichlet(np.ones(len(c))))))).coords

    margins = sample_margins(g, sampler, 200, rng, t=0.5)
    assert max(c.margin - c.slack for c in margins) <= 1e-6


def test_empty_triangle_witness():
    v = flag_witness_check(as_semilattice(empty_triangle()), trials=10)
    assert not v.flag and not v.consistent
    assert {next(iter(f)) for f in v.witness} == {"{a}", "{b}", "{c}"}
    assert abs(v.witness_margin.margin - 1.0) <= 2 * v.witness_margin.slack + 1e-6


def test_boolean_is_consistent():
    v = flag_witness_check(as_semilattice(boolean(3)), trials=100)
    assert v.flag and v.consistent and v.witness is None
    assert all(c.margin <= c.slack + 1e-6 for c in v.samples)


def test_divisor_12_is_consistent():
    v = flag_witness_check(as_semilattice(divisor(12)), trials=30)
    assert v.flag and v.consistent


def test_not_locally_distributive():
    with pytest.raises(NotLocallyDistributive):
        flag_witness_check(as_semilattice(diamond_m3()))


def test_orthoscheme_geometry_agrees():
    v = flag_witness_check(as_semilattice(empty_triangle()), trials=5, geometry="orthoscheme")
    assert not v.consistent and v.witness_margin.margin == pytest.approx(1.0, abs=1e-5)


def test_bad_triples_are_minimal():
    s = as_semilattice(empty_triangle())
    df = down_faces(birkhoff(s).complex)
    triples = bad_triples(df)
    assert len(triples) == 1 and all(len(f) == 1 for f in triples[0])


def test_sampled_ncp3():
    p = ncp(3)
    v = sampled_cat0(p, trials=10)
    assert v.sampling_only and v.flag and v.consistent
    assert complex_of_orthoschemes(p).is_connected()
