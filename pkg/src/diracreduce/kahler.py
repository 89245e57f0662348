"""Generalized Kahler pairs, the quadruple correspondence and reduction.

A generalized Kahler pair is two commuting generalized complex structures
whose compatibility form G(u, v) = <J1 u, J2 v> is positive definite.
With the package-wide interior-product convention this is the sign that
makes the metric-with-2-form quadruple formulas produce valid pairs; it
equals -<J1 J2 u, v>.

The quadruple (g, b, J+, J-) consists of a Riemannian metric, a 2-form
and two g-compatible complex structures; the associated 2-forms are
omega_+- X = +-g(J_+- X, .) as maps V -> V*.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Tuple

from gmpy2 import mpq

from .exactlin import (
    FIELD_Q,
    InternalCheckError,
    InvalidInput,
    Matrix,
    Subspace,
    Vector,
    apply_map,
    identity,
    is_skew,
    is_symmetric,
    kernel_basis,
    leading_principal_minors_positive,
    mat,
    mat_add,
    mat_inv,
    mat_mul,
    mat_neg,
    mat_scale,
    non_positive_vector_witness,
    random_invertible,
    random_skew,
    transpose,
)
from .dirac import flat, pairing_gram
from .gcs import GCStructure, eigenbundles, shear, standard_complex_matrix
from .reduction import (
    ReductionDatum,
    lift_space,
    projection_pi,
    reduce,
)


def compatibility_gram(j1: GCStructure, j2: GCStructure) -> Matrix:
    """Gram matrix of (u, v) -> <J1 u, J2 v>."""
    q = pairing_gram(j1.n)
    return mat_mul(transpose(j1.matrix), mat_mul(q, j2.matrix))


@dataclass(frozen=True)
class GKDiagnostics:
    ok: bool
    failed_check: Optional[str] = None  # "commutation" | "positivity"
    witness: Optional[Vector] = None

    def __bool__(self):
        return self.ok


def is_generalized_kahler(j1: GCStructure, j2: GCStructure) -> GKDiagnostics:
    """Commutation plus exact positivity of the compatibility form."""
    if j1.n != j2.n:
        raise InvalidInput("structures live on spaces of different dimension")
    j12 = mat_mul(j1.matrix, j2.matrix)
    j21 = mat_mul(j2.matrix, j1.matrix)
    if j12 != j21:
        for k in range(2 * j1.n):
            col = tuple(j12[r][k] - j21[r][k] for r in range(2 * j1.n))
            if any(col):
                e_k = tuple(1 if i == k else 0 for i in range(2 * j1.n))
                return GKDiagnostics(False, "commutation", e_k)
    gram = compatibility_gram(j1, j2)
    if not is_symmetric(gram):
        raise InternalCheckError("compatibility form of a commuting pair not symmetric")
    if not leading_principal_minors_positive(gram):
        return GKDiagnostics(False, "positivity", non_positive_vector_witness(gram))
    return GKDiagnostics(True)


@dataclass(frozen=True)
class GKPair:
    """A valid generalized Kahler pair (validated on construction)."""

    j1: GCStructure
    j2: GCStructure

    def __post_init__(self):
        diag = is_generalized_kahler(self.j1, self.j2)
        if not diag.ok:
            raise InvalidInput(f"not a generalized Kahler pair: {diag.failed_check}")

    @property
    def n(self) -> int:
        return self.j1.n

    def unordered(self) -> frozenset:
        return frozenset((self.j1, self.j2))


@dataclass(frozen=True)
class GualtieriQuadruple:
    """(g, b, J+, J-): metric, 2-form and two g-compatible complex structures."""

    g: Matrix
    b: Matrix
    j_plus: Matrix
    j_minus: Matrix

    def __post_init__(self):
        n = len(self.g)
        if not is_symmetric(self.g) or not leading_principal_minors_positive(self.g):
            raise InvalidInput("metric must be symmetric positive definite")
        if not is_skew(self.b):
            raise InvalidInput("b must be a skew 2-form matrix")
        for j in (self.j_plus, self.j_minus):
            if mat_mul(j, j) != mat_neg(identity(n)):
                raise InvalidInput("J+- must square to -I")
            if mat_mul(transpose(j), mat_mul(self.g, j)) != self.g:
                raise InvalidInput("J+- must be g-compatible")

    @property
    def n(self) -> int:
        return len(self.g)

    def omega_flat(self, sign: int) -> Matrix:
        """The map X -> +-g(J_+- X, .) as a matrix V -> V*; skew, invertible."""
        j = self.j_plus if sign > 0 else self.j_minus
        w = mat_mul(self.g, j)
        return w if sign > 0 else mat_neg(w)


def from_quadruple(q: GualtieriQuadruple) -> GKPair:
    """Assemble the pair from the quadruple via the two block formulas."""
    n = q.n
    wp, wm = q.omega_flat(+1), q.omega_flat(-1)
    wp_inv, wm_inv = mat_inv(wp), mat_inv(wm)
    jp, jm = q.j_plus, q.j_minus

    def middle(sum_sign: int) -> Matrix:
        if sum_sign > 0:
            tl = mat_add(jp, jm)
            tr = mat_neg(mat_add(wp_inv, wm_inv))
            bl = mat_add(wp, wm)
        else:
            tl = mat_add(jp, mat_neg(jm))
            tr = mat_neg(mat_add(wp_inv, mat_neg(wm_inv)))
            bl = mat_add(wp, mat_neg(wm))
        br = mat_neg(transpose(tl))
        top = tuple(tuple(a) + tuple(bb) for a, bb in zip(tl, tr))
        bottom = tuple(tuple(c) + tuple(dd) for c, dd in zip(bl, br))
        return mat_scale(mpq(1, 2), top + bottom)

    s, s_inv = shear(q.b), shear(mat_neg(mat(q.b)))
    j1 = GCStructure(n, mat_mul(s, mat_mul(middle(+1), s_inv)))
    j2 = GCStructure(n, mat_mul(s, mat_mul(middle(-1), s_inv)))
    return GKPair(j1, j2)


# ---------------------------------------------------------------------------
# reduction of a pair


@dataclass(frozen=True)
class GKReductionDatum:
    """Pointwise pair-reduction data (V, J1, J2, W0, F)."""

    pair: GKPair
    w0: Subspace
    f: Subspace

    def __post_init__(self):
        # delegate the nesting and dimension checks
        ReductionDatum(self.pair.j1, self.w0, self.f)

    @property
    def n(self) -> int:
        return self.pair.n

    def datum(self, which: int) -> ReductionDatum:
        j = self.pair.j1 if which == 1 else self.pair.j2
        return ReductionDatum(j, self.w0, self.f)


@dataclass(frozen=True)
class GKConditionReport:
    quad_intersection_dim: int
    pi_surjective_on_quad: bool
    phi_summands: Tuple[Subspace, Subspace, Subspace, Subspace]
    sum_is_direct: bool
    missing: Optional[Vector] = None  # reduced vector with no lift in the quad

    @property
    def phi_dims(self) -> Tuple[int, int, int, int]:
        return tuple(s.dim for s in self.phi_summands)


class GKReductionObstructed(Exception):
    def __init__(self, report: GKConditionReport):
        self.report = report
        super().__init__("pair reduction obstructed: no lifts in the quadruple"
                         " intersection")


def _quad_intersection(d: GKReductionDatum) -> Subspace:
    b = lift_space(d.datum(1)).b
    j1, j2 = d.pair.j1.matrix, d.pair.j2.matrix
    j12 = mat_mul(j1, j2)
    out = b.intersect(apply_map(j1, b))
    out = out.intersect(apply_map(j2, b))
    return out.intersect(apply_map(j12, b))


def gk_check(d: GKReductionDatum) -> GKConditionReport:
    """Surjectivity of Pi on the fourfold intersection plus the splitting.

    Phi(V) = Pi(V intersect B_C).  The report carries the four summands
    Phi(E^s intersect E_t) for the sign pairs of the two eigenspace
    splittings; surjectivity is equivalent to their sum filling the
    reduced space, which is re-checked, as is the intersection identity
    Phi(E^s) intersect Phi(E_t) = Phi(E^s intersect E_t) in the
    surjective case.
    """
    pi = projection_pi(d.datum(1))
    quad = _quad_intersection(d)
    img = pi.image(quad)
    surjective = img.is_full()
    missing = None
    if not surjective:
        for v in Subspace.full(2 * pi.n_reduced, FIELD_Q).basis:
            if not img.contains(v):
                missing = v
                break
    b_c = lift_space(d.datum(1)).b.complexify()
    pair1 = eigenbundles(d.pair.j1)
    pair2 = eigenbundles(d.pair.j2)
    eigen1 = {"+": pair1.plus, "-": pair1.minus}
    eigen2 = {"+": pair2.plus, "-": pair2.minus}

    def phi(space: Subspace) -> Subspace:
        return pi.image(space.intersect(b_c))

    summands = tuple(phi(eigen1[s].intersect(eigen2[t]))
                     for s, t in (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-")))
    total = summands[0]
    for s in summands[1:]:
        total = total.plus(s)
    direct = sum(s.dim for s in summands) == total.dim
    if total.is_full() != surjective:
        raise InternalCheckError("splitting and lift surjectivity disagree")
    if surjective:
        if not direct:
            raise InternalCheckError("surjective case must split directly")
        for s, t in (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-")):
            lhs = phi(eigen1[s].intersect(eigen2[t]))
            rhs = phi(eigen1[s]).intersect(phi(eigen2[t]))
            if lhs != rhs:
                raise InternalCheckError("summand intersection identity fails")
    return GKConditionReport(quad.dim, surjective, summands, direct, missing)


@dataclass(frozen=True)
class ReducedGKPair:
    reduced_dim: int
    pair: GKPair


def gk_reduce(d: GKReductionDatum) -> ReducedGKPair:
    """Reduce both structures through lifts in the fourfold intersection."""
    report = gk_check(d)
    if not report.pi_surjective_on_quad:
        raise GKReductionObstructed(report)
    pi = projection_pi(d.datum(1))
    quad = _quad_intersection(d)
    nr = pi.n_reduced
    from .exactlin import mat_vec, solve_right

    pi_cols = transpose(tuple(pi.apply(r) for r in quad.basis))
    reduced = []
    for jmat in (d.pair.j1.matrix, d.pair.j2.matrix):
        cols = []
        for target in identity(2 * nr):
            coeffs = solve_right(pi_cols, target)
            if coeffs is None:
                raise InternalCheckError("lift solve failed after surjectivity check")
            lift = mat_vec(transpose(quad.basis), coeffs)
            cols.append(pi.apply(mat_vec(jmat, lift)))
        reduced.append(GCStructure(nr, transpose(mat(cols))))
    out = GKPair(reduced[0], reduced[1])
    # componentwise consistency with the single-structure pipeline
    for j_red, which in ((reduced[0], 1), (reduced[1], 2)):
        single = reduce(d.datum(which))
        if single.j_g != j_red:
            raise InternalCheckError("pair reduction disagrees with single reduction")
    return ReducedGKPair(nr, out)


def check_final_theorem(q: GualtieriQuadruple, w0: Subspace, f: Subspace) -> bool:
    """Momentum-style sufficient condition for pair reduction.

    Requires omega_+-(F) = ann(W0) for both signs and stability of the
    g-orthogonal of F inside W0 under omega_+-^(-1) b.  Implies (and
    asserts) that the fourfold-intersection projection is surjective.
    """
    n = q.n
    datum = GKReductionDatum(from_quadruple(q), w0, f)  # validates nesting
    ann_w0 = w0.annihilator()
    ok = True
    for sign in (+1, -1):
        w = q.omega_flat(sign)
        if apply_map(w, f) != ann_w0:
            ok = False
    if ok:
        f_perp_g = Subspace(n, FIELD_Q, kernel_basis(mat_mul(f.basis, q.g), n)) \
            if not f.is_zero() else Subspace.full(n)
        s = f_perp_g.intersect(w0)
        for sign in (+1, -1):
            t = mat_mul(mat_inv(q.omega_flat(sign)), flat(q.b))
            if not s.contains_subspace(apply_map(t, s)):
                ok = False
    if ok and not gk_check(datum).pi_surjective_on_quad:
        raise InternalCheckError("sufficient condition failed to imply surjectivity")
    return ok


# ---------------------------------------------------------------------------
# seedable random quadruples for the property and acceptance suites


def _random_signed_permutation(rng: random.Random, n: int) -> Matrix:
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [[mpq(0)] * n for _ in range(n)]
    for i, p in enumerate(perm):
        rows[i][p] = mpq(rng.choice([-1, 1]))
    return mat(rows)


def _random_orthogonal(rng: random.Random, n: int) -> Matrix:
    """Signed permutation tweaked by exact (3/5, 4/5) plane rotations."""
    m = _random_signed_permutation(rng, n)
    for _ in range(rng.randint(0, 2)):
        i, j = rng.sample(range(n), 2)
        rot = [[mpq(1) if a == b else mpq(0) for b in range(n)] for a in range(n)]
        rot[i][i] = rot[j][j] = mpq(3, 5)
        rot[i][j] = mpq(4, 5)
        rot[j][i] = mpq(-4, 5)
        m = mat_mul(m, mat(rot))
    return m


def random_quadruple(rng: random.Random, n: int) -> GualtieriQuadruple:
    """Random valid quadruple: g = P^T P, J_+- = P^-1 R j0 R^T P."""
    p = random_invertible(rng, n)
    g = mat_mul(transpose(p), p)
    p_inv = mat_inv(p)
    j0 = standard_complex_matrix(n)
    js = []
    for _ in range(2):
        r = _random_orthogonal(rng, n)
        js.append(mat_mul(p_inv, mat_mul(r, mat_mul(j0, mat_mul(transpose(r), p)))))
    return GualtieriQuadruple(g, random_skew(rng, n), js[0], js[1])
