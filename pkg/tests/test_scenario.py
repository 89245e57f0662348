import pytest
from gmpy2 import mpq

from diracreduce.exactlin import InvalidInput, Subspace, identity, mat
from diracreduce.gcs import GCStructure, standard_complex_matrix
from diracreduce.kahler import GualtieriQuadruple
from diracreduce.poly import Poly
from diracreduce.reduction import SYMPLECTIC_TYPE, COMPLEX_TYPE
from diracreduce.scenario import (
    NonFreePoint,
    OrbitIdentification,
    Scenario,
    pointwise_datum,
    pointwise_gk_datum,
    sweep,
)

OMEGA_STD = mat([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
AREA = mat([[0, 1], [-1, 0]])
J4 = standard_complex_matrix(4)


def const_field(vec, n):
    return tuple(Poly.const(c, n) for c in vec)


def var(i, n):
    return Poly.variable(i, n)


def mw_scenario(points=((0, 0, 0, 0), (1, 0, 2, 3), (mpq(-1, 2), 0, mpq(1, 3), 1)),
                idents=()):
    return Scenario(
        dim=4,
        j_spec=GCStructure.from_symplectic(OMEGA_STD),
        action_generators=(const_field((1, 0, 0, 0), 4),),
        m0_equations=(var(1, 4),),
        sample_points=points,
        momentum=(var(1, 4),),
        orbit_identifications=idents,
    )


def gs_scenario():
    return Scenario(
        dim=4,
        j_spec=GCStructure.from_complex(J4),
        action_generators=(const_field((0, 1, 0, 0), 4),),
        m0_equations=(var(0, 4),),
        sample_points=((0, 0, 0, 0), (0, 2, 1, -1)),
    )


def kahler_scenario():
    return Scenario(
        dim=4,
        j_spec=None,
        action_generators=(const_field((1, 0, 0, 0), 4),),
        m0_equations=(var(1, 4),),
        sample_points=((0, 0, 0, 0), (3, 0, 1, 2)),
        quadruple=GualtieriQuadruple(identity(4), mat([[0] * 4] * 4), J4, J4),
    )


def test_momentum_scenario_extracts_expected_datum():
    s = mw_scenario()
    d = pointwise_datum(s, (0, 0, 0, 0))
    assert d.w0 == Subspace.span([[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 4)
    assert d.f == Subspace.span([[1, 0, 0, 0]], 4)
    assert d.j == GCStructure.from_symplectic(OMEGA_STD)


def test_complex_scenario_extracts_expected_datum():
    s = gs_scenario()
    d = pointwise_datum(s, (0, 2, 1, -1))
    assert d.w0 == Subspace.span([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 4)
    assert d.f == Subspace.span([[0, 1, 0, 0]], 4)


def test_point_off_locus_rejected():
    with pytest.raises(InvalidInput, match="off the constraint locus"):
        mw_scenario(points=((0, 1, 0, 0),))
    s = mw_scenario()
    with pytest.raises(InvalidInput, match="sample points"):
        pointwise_datum(s, (7, 0, 0, 0))


def test_momentum_mismatch_rejected():
    with pytest.raises(InvalidInput, match="momentum"):
        Scenario(
            dim=4,
            j_spec=GCStructure.from_symplectic(OMEGA_STD),
            action_generators=(const_field((1, 0, 0, 0), 4),),
            m0_equations=(var(1, 4),),
            sample_points=((0, 0, 0, 0),),
            momentum=(var(0, 4),),
        )


def test_generator_off_constraint_rejected():
    # flow along x2 leaves the locus {x2 = 0}
    with pytest.raises(InvalidInput, match="leaves the constraint locus"):
        Scenario(
            dim=4,
            j_spec=GCStructure.from_symplectic(OMEGA_STD),
            action_generators=(const_field((0, 1, 0, 0), 4),),
            m0_equations=(var(1, 4),),
            sample_points=((0, 0, 0, 0),),
        )


def test_dependent_generators_flagged_per_point():
    s = Scenario(
        dim=4,
        j_spec=GCStructure.from_symplectic(OMEGA_STD),
        action_generators=(const_field((1, 0, 0, 0), 4),
                           (var(0, 4), Poly.zero(4), Poly.zero(4), Poly.zero(4))),
        m0_equations=(var(1, 4),),
        sample_points=((0, 0, 0, 0), (1, 0, 0, 0)),
    )
    with pytest.raises(NonFreePoint):
        pointwise_datum(s, (0, 0, 0, 0))  # second generator vanishes here
    with pytest.raises(NonFreePoint):
        pointwise_datum(s, (1, 0, 0, 0))  # parallel to the first one here
    out = sweep(s)
    assert all(o.status == "invalid-input" for o in out.outcomes)


def test_sweep_momentum_scenario():
    out = sweep(mw_scenario())
    assert len(out.outcomes) == 3
    for o in out.outcomes:
        assert o.status == "ok"
        assert o.classification == SYMPLECTIC_TYPE
        assert o.reduced.j_g == GCStructure.from_symplectic(AREA)
        assert o.report.all_hold


def test_sweep_complex_scenario():
    out = sweep(gs_scenario())
    for o in out.outcomes:
        assert o.status == "ok"
        assert o.classification == COMPLEX_TYPE
        assert o.reduced.j_g == GCStructure.from_complex(standard_complex_matrix(2))


def test_sweep_pair_scenario():
    out = sweep(kahler_scenario())
    for o in out.outcomes:
        assert o.status == "ok"
        assert o.gk_report.pi_surjective_on_quad
        assert o.classification == "complex_type+symplectic_type"
        red = o.gk_reduced
        expected = {GCStructure.from_complex(standard_complex_matrix(2)),
                    GCStructure.from_symplectic(AREA)}
        assert red.pair.unordered() == frozenset(expected)


def test_sweep_reports_mixed_outcomes_without_aborting():
    # the locus {x2 x4 = 0} has a good branch and a degenerate point
    s = Scenario(
        dim=4,
        j_spec=GCStructure.from_symplectic(OMEGA_STD),
        action_generators=(const_field((1, 0, 0, 0), 4),),
        m0_equations=(var(1, 4) * var(3, 4),),
        sample_points=((0, 0, 0, 1), (0, 0, 0, 0)),
    )
    out = sweep(s)
    assert out.outcomes[0].status == "ok"
    assert out.outcomes[1].status == "obstructed"
    assert out.outcomes[1].report is not None
    assert out.outcomes[1].report.witnesses


def test_orbit_identifications():
    idents = (OrbitIdentification(0, 1, mat([[1, 1], [0, 1]])),   # unimodular
              OrbitIdentification(0, 1, mat([[2, 0], [0, 1]])))   # scales the form
    out = sweep(mw_scenario(idents=idents))
    assert out.orbit_checks[0].consistent
    assert not out.orbit_checks[1].consistent


def test_pair_scenario_datum_routing():
    s = kahler_scenario()
    with pytest.raises(InvalidInput):
        pointwise_datum(s, (0, 0, 0, 0))
    d = pointwise_gk_datum(s, (0, 0, 0, 0))
    assert d.w0.dim == 3 and d.f.dim == 1
    with pytest.raises(InvalidInput):
        pointwise_gk_datum(mw_scenario(), (0, 0, 0, 0))
