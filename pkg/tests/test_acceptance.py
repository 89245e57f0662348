"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.  All checks are exact
(zero tolerance); the randomized suites are seeded and reproducible.

The random reduction data cover chart dimensions 2 and 4.  No valid
structure exists in odd dimension (a pairing-orthogonal square root of -I
forces even dimension), which test_odd_dimension_obstruction documents.
"""

import json
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest
from gmpy2 import mpq

from diracreduce.exactlin import (
    Subspace,
    apply_map,
    identity,
    mat,
    mat_mul,
    mat_vec,
    rank,
    random_skew,
    transpose,
)
from diracreduce.gcs import (
    GCStructure,
    block_decompose,
    eigenbundles,
    standard_complex_matrix,
)
from diracreduce.kahler import (
    GKReductionDatum,
    GualtieriQuadruple,
    check_final_theorem,
    from_quadruple,
    gk_reduce,
    is_generalized_kahler,
    random_quadruple,
)
from diracreduce.reduction import (
    ProjectionPi,
    ReductionDatum,
    SYMPLECTIC_TYPE,
    COMPLEX_TYPE,
    check_conditions,
    check_gs,
    classify,
    lift_space,
    random_datum,
    reduce,
    reduced_eigenspaces,
)
from diracreduce.poly import Poly
from diracreduce.chart import (
    JField,
    KForm,
    PolyMap,
    PolySection,
    courant_bracket,
    graph_sections,
    nijenhuis_defect,
    oneform,
    phi_related,
)
from diracreduce.fileio import load_scenario, parse_document
from diracreduce.scenario import sweep

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
SEED = 20260810

OMEGA_STD = mat([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
AREA = mat([[0, 1], [-1, 0]])


def _instances():
    """Seeded instance stream shared by the first three random criteria."""
    rng = random.Random(SEED)
    data = []
    for _ in range(1000):
        data.append(random_datum(rng, rng.choice([2, 4]), "random"))
    for _ in range(60):
        data.append(random_datum(rng, rng.choice([2, 4]), "mw"))
    for _ in range(60):
        data.append(random_datum(rng, rng.choice([2, 4]), "gs"))
    return data


@pytest.fixture(scope="module")
def evaluated_instances():
    start = time.perf_counter()
    out = []
    for d in _instances():
        report = check_conditions(d)  # raises on any disagreement
        out.append((d, report))
    elapsed = time.perf_counter() - start
    return out, elapsed


def test_criterion_1_condition_equivalence(evaluated_instances):
    """The seven independently computed booleans agree on every instance."""
    instances, elapsed = evaluated_instances
    assert len(instances) >= 1000
    for _, report in instances:
        assert report.conditions in ((True,) * 7, (False,) * 7)
    assert elapsed < 60, f"equivalence suite took {elapsed:.1f}s"
    n_pass = sum(1 for _, r in instances if r.all_hold)
    print(f"\nPASS criterion 1: seven conditions unanimous on "
          f"{len(instances)} seeded instances ({n_pass} reducible, "
          f"{elapsed:.1f}s)")


def test_criterion_2_lift_surjectivity_biconditional(evaluated_instances):
    """All conditions hold iff the projection is onto from B meet J(B)."""
    instances, _ = evaluated_instances
    both = {True: 0, False: 0}
    for d, report in instances:
        pi = ProjectionPi(d)
        b = lift_space(d).b
        k = b.intersect(apply_map(d.j.matrix, b))
        surjective = pi.image(k).is_full()
        assert surjective == report.all_hold
        both[surjective] += 1
    assert both[True] and both[False], "need both branches exercised"
    print(f"\nPASS criterion 2: lift surjectivity biconditional on "
          f"{sum(both.values())} instances ({both[True]} onto, {both[False]} not)")


def test_criterion_3_momentum_scenario_recovery():
    """The translation-action scenario reduces to the small symplectic
    structure at every sample point."""
    scenario = load_scenario(parse_document(
        (SCENARIOS / "momentum_sweep.txt").read_text()))
    out = sweep(scenario)
    expected = GCStructure.from_symplectic(AREA)
    assert len(out.outcomes) == 5
    for o in out.outcomes:
        assert o.status == "ok"
        assert o.classification == SYMPLECTIC_TYPE
        assert o.reduced.j_g == expected
    assert all(c.consistent for c in out.orbit_checks)
    print(f"\nPASS criterion 3: momentum scenario reduces to the standard "
          f"symplectic structure at {len(out.outcomes)} points")


def test_criterion_4_complex_scenario_recovery():
    """The complex scenario reduces to the small complex structure and the
    complement criterion holds with the dimension count."""
    scenario = load_scenario(parse_document(
        (SCENARIOS / "complex_sweep.txt").read_text()))
    out = sweep(scenario)
    expected = GCStructure.from_complex(standard_complex_matrix(2))
    for o in out.outcomes:
        assert o.status == "ok"
        assert o.classification == COMPLEX_TYPE
        assert o.reduced.j_g == expected
        # the reduced structure maps the first quotient direction to the second
        assert mat_vec(o.reduced.j_g.matrix, (1, 0, 0, 0)) == (0, 1, 0, 0)
    from diracreduce.scenario import pointwise_datum
    for p in scenario.sample_points:
        d = pointwise_datum(scenario, p)
        assert check_gs(d)
        blocks = block_decompose(d.j)
        jf = apply_map(blocks.n_block, d.f)
        assert d.w0.dim + jf.dim == 4
        assert d.w0.plus(jf).is_full() and d.w0.intersect(jf).is_zero()
    print("\nPASS criterion 4: complex scenario reduces to the standard "
          "complex structure with the complement split verified")


def test_criterion_5_quotient_diagram(evaluated_instances):
    """Pi after J equals the reduced structure after Pi on lifts, and the
    reduced eigenspaces match the eigenspaces of the reduced structure."""
    instances, _ = evaluated_instances
    checked = 0
    for d, report in instances:
        if not report.all_hold:
            continue
        out = reduce(d)
        pi = ProjectionPi(d)
        b = lift_space(d).b
        k = b.intersect(apply_map(d.j.matrix, b))
        for v in k.basis:
            assert pi.apply(mat_vec(d.j.matrix, v)) == mat_vec(
                out.j_g.matrix, pi.apply(v))
        pair = eigenbundles(out.j_g)
        ep, em = reduced_eigenspaces(d)
        assert pair.plus == ep and pair.minus == em
        checked += 1
    assert checked >= 100
    print(f"\nPASS criterion 5: quotient diagram and eigenspace equality on "
          f"{checked} reducible instances")


def test_criterion_6_quadruple_correspondence():
    """The flat quadruple recovers the complex/symplectic pair exactly and
    random quadruples always produce valid pairs."""
    j = standard_complex_matrix(2)
    pair = from_quadruple(GualtieriQuadruple(identity(2), mat([[0, 0], [0, 0]]), j, j))
    omega = mat_mul(transpose(j), identity(2))  # 2-form of the metric and j
    expected = frozenset({GCStructure.from_complex(j),
                          GCStructure.from_symplectic(omega)})
    assert pair.unordered() == expected
    rng = random.Random(SEED + 1)
    count = 0
    for _ in range(200):
        q = random_quadruple(rng, rng.choice([2, 4]))
        out = from_quadruple(q)
        assert is_generalized_kahler(out.j1, out.j2).ok
        count += 1
    print(f"\nPASS criterion 6: quadruple recovery exact; {count} random "
          f"quadruples all produce compatible pairs")


def test_criterion_7_pair_reduction_consistency():
    """Pair reduction on the flat scenario: output is a valid pair, equals
    the componentwise reductions, and the sufficient criterion holds with
    and without a closed b."""
    scenario = load_scenario(parse_document(
        (SCENARIOS / "kahler_sweep.txt").read_text()))
    out = sweep(scenario)
    for o in out.outcomes:
        assert o.status == "ok"
        red = o.gk_reduced
        assert is_generalized_kahler(red.pair.j1, red.pair.j2).ok
    w0 = Subspace.span([[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 4)
    f = Subspace.span([[1, 0, 0, 0]], 4)
    quad = scenario.quadruple
    d = GKReductionDatum(from_quadruple(quad), w0, f)
    red = gk_reduce(d)
    for which in (1, 2):
        single = reduce(d.datum(which))
        assert single.j_g in (red.pair.j1, red.pair.j2)
    assert check_final_theorem(quad, w0, f)
    b34 = mat([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    quad_b = GualtieriQuadruple(quad.g, b34, quad.j_plus, quad.j_minus)
    assert check_final_theorem(quad_b, w0, f)
    print("\nPASS criterion 7: pair reduction consistent componentwise; "
          "sufficient criterion holds with b = 0 and closed b")


def _random_poly(rng, n, degree):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        exps = [0] * n
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(n)] += 1
        terms[tuple(exps)] = mpq(rng.randint(-3, 3), rng.choice([1, 2, 3]))
    return Poly(n, terms)


def _random_section(rng, n, degree):
    return PolySection(tuple(_random_poly(rng, n, degree) for _ in range(n)),
                       tuple(_random_poly(rng, n, degree) for _ in range(n)))


def test_criterion_8_bracket_calculus():
    """Antisymmetry and relatedness as polynomial identities; the Jacobi
    identity holds exactly on graph sections of closed 2-forms and fails
    on a recorded generic triple; the integrability defect is zero for
    constant structures and nonzero for the non-closed twist."""
    rng = random.Random(SEED + 2)
    sections = 0
    for _ in range(30):
        n = rng.randint(1, 3)
        s1, s2 = _random_section(rng, n, 3), _random_section(rng, n, 3)
        assert courant_bracket(s1, s2) == -courant_bracket(s2, s1)
        sections += 2
    phi = PolyMap(3, (Poly.variable(0, 3), Poly.variable(1, 3)))
    for _ in range(20):
        related = []
        for _ in range(2):
            yv = tuple(_random_poly(rng, 2, 2) for _ in range(2))
            eta = tuple(_random_poly(rng, 2, 2) for _ in range(2))
            target = PolySection(yv, eta)
            xv = tuple(p.compose(phi.components) for p in yv) + (
                _random_poly(rng, 3, 2),)
            xi = tuple(p.compose(phi.components) for p in eta) + (Poly.zero(3),)
            source = PolySection(xv, xi)
            assert phi_related(phi, source, target)
            related.append((source, target))
            sections += 2
        bs = courant_bracket(related[0][0], related[1][0])
        bt = courant_bracket(related[0][1], related[1][1])
        assert phi_related(phi, bs, bt)
    assert sections >= 100

    def jacobiator(a, b, co):
        big = 10 ** 6
        return (courant_bracket(courant_bracket(a, b, big), co, big)
                + courant_bracket(courant_bracket(b, co, big), a, big)
                + courant_bracket(courant_bracket(co, a, big), b, big))

    for _ in range(6):
        n = rng.randint(2, 3)
        alpha = oneform(tuple(_random_poly(rng, n, 2) for _ in range(n)))
        gens = graph_sections(alpha.d())
        triple = [gens[rng.randrange(n)] for _ in range(3)]
        assert jacobiator(*triple).is_zero()
    x1, x2 = Poly.variable(0, 2), Poly.variable(1, 2)
    zero2 = (Poly.zero(2), Poly.zero(2))
    witness = (PolySection((x2, Poly.zero(2)), zero2),
               PolySection((Poly.zero(2), x1), zero2),
               PolySection(zero2, (Poly.const(1, 2), Poly.zero(2))))
    assert not jacobiator(*witness).is_zero()

    j_sym = JField.constant(GCStructure.from_symplectic(AREA))
    for _ in range(5):
        assert nijenhuis_defect(j_sym, _random_section(rng, 2, 2),
                                _random_section(rng, 2, 2)).is_zero()
    j_cpx = JField.constant(GCStructure.from_complex(standard_complex_matrix(4)))
    for i in range(4):
        for k in range(4):
            assert nijenhuis_defect(j_cpx, PolySection.coordinate_field(i, 4),
                                    PolySection.coordinate_field(k, 4)).is_zero()
    twisted = JField.constant(GCStructure.from_symplectic(OMEGA_STD)).b_transform(
        KForm(4, 2, {(2, 3): Poly.variable(0, 4)}))
    defect = nijenhuis_defect(twisted, PolySection.coordinate_field(2, 4),
                              PolySection.coordinate_field(3, 4))
    assert not defect.is_zero()
    print(f"\nPASS criterion 8: bracket calculus identities on {sections} "
          f"random sections; Jacobi splits as required; defect detects the "
          f"non-closed twist")


CLI_CASES = [
    ("check", "mw_datum.txt", 0),
    ("reduce", "mw_datum.txt", 0),
    ("reduce", "gs_datum.txt", 0),
    ("reduce", "obstructed_datum.txt", 2),
    ("gk-reduce", "kahler_gk_datum.txt", 0),
    ("bracket", "coordinate_bracket.txt", 0),
    ("bracket", "twisted_bracket.txt", 0),
    ("sweep", "momentum_sweep.txt", 0),
    ("sweep", "complex_sweep.txt", 0),
    ("sweep", "kahler_sweep.txt", 0),
]


def test_criterion_9_cli_determinism(tmp_path):
    """Byte-identical machine reports across runs; exit codes 0/2/1."""
    for command, name, expected_code in CLI_CASES:
        args = [sys.executable, "-m", "diracreduce", command,
                str(SCENARIOS / name), "--format", "machine"]
        first = subprocess.run(args, capture_output=True)
        second = subprocess.run(args, capture_output=True)
        assert first.returncode == expected_code, (command, name, first.stderr)
        assert second.returncode == expected_code
        assert first.stdout == second.stdout, f"nondeterministic: {command} {name}"
        payload = json.loads(first.stdout)
        assert payload["schema_version"] == "diracreduce-v1"
    bad = tmp_path / "bad.txt"
    bad.write_text("diracreduce-v1 datum\n[space]\ndim = oops\n")
    out = subprocess.run([sys.executable, "-m", "diracreduce", "check", str(bad),
                          "--format", "machine"], capture_output=True)
    assert out.returncode == 1
    print(f"\nPASS criterion 9: {len(CLI_CASES)} deterministic CLI runs with "
          f"exit codes 0/2 plus invalid-input exit 1")


def test_odd_dimension_obstruction():
    """No structure exists on an odd-dimensional space: the constructors
    reject and the determinant obstruction rules out complex candidates."""
    with pytest.raises(Exception):
        GCStructure.from_symplectic(mat([[0, 1, 0], [-1, 0, 0], [0, 0, 0]]))
    assert rank(random_skew(random.Random(1), 3)) < 3
    with pytest.raises(Exception):
        GCStructure.from_complex(mat([[0, 1, 0], [-1, 0, 0], [0, 0, 1]]))
