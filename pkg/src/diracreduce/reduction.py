"""Pointwise reduction of generalized complex structures.

A :class:`ReductionDatum` models one point of an ambient space V carrying
a generalized complex structure J, a constraint subspace W0 (the tangent
space of the constraint locus) and an orbit direction F contained in W0.
The lift space is B = W0 + ann(F) inside V + V*, with pairing-orthogonal
B_perp = F + ann(W0), and the projection Pi maps B onto the double of the
quotient W0/F with kernel B_perp.

Seven equivalent conditions decide whether J descends to the quotient;
they are evaluated independently and cross-checked for unanimity.  When
they hold, the reduced structure is J_G(Pi(v)) = Pi(J(v)) for lifts v in
B intersect J(B).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .exactlin import (
    FIELD_Q,
    FIELD_QI,
    InternalCheckError,
    InvalidInput,
    Matrix,
    QQi,
    Subspace,
    Vector,
    apply_map,
    complexify_matrix,
    identity,
    kernel_basis,
    leading_principal_minors_positive,
    mat,
    mat_mul,
    mat_vec,
    random_skew_invertible,
    random_subspace,
    random_subspace_of,
    random_vector,
    solve_right,
    to_field,
    transpose,
    vec_dot,
)
from .gcs import (
    GCStructure,
    block_decompose,
    eigenbundles,
    random_complex_matrix,
    random_gcstructure,
)

CONDITION_COUNT = 7


class ReductionObstructed(Exception):
    """Reduction preconditions fail; carries the full condition report."""

    def __init__(self, report: "ConditionReport"):
        self.report = report
        failed = [i + 1 for i, ok in enumerate(report.conditions) if not ok]
        super().__init__(f"reduction obstructed: conditions {failed} fail")


@dataclass(frozen=True)
class ReductionDatum:
    """One-point reduction data (V, J, W0, F) with F contained in W0."""

    j: GCStructure
    w0: Subspace
    f: Subspace

    def __post_init__(self):
        n = self.j.n
        if self.w0.ambient != n or self.f.ambient != n:
            raise InvalidInput("subspaces must live in the structure's space")
        if self.w0.field != FIELD_Q or self.f.field != FIELD_Q:
            raise InvalidInput("reduction data must be rational")
        if not self.w0.contains_subspace(self.f):
            raise InvalidInput("orbit directions must lie inside the constraint space")

    @property
    def n(self) -> int:
        return self.j.n

    @property
    def reduced_dim(self) -> int:
        return self.w0.dim - self.f.dim


@dataclass(frozen=True)
class LiftSpace:
    b: Subspace
    b_perp: Subspace


def embed_vectors(s: Subspace, n: int) -> Subspace:
    """W x 0 inside the 2n coordinates of V + V*."""
    zero = (to_field(0, s.field),) * n
    return Subspace(2 * n, s.field, tuple(tuple(r) + zero for r in s.basis))


def embed_covectors(s: Subspace, n: int) -> Subspace:
    """0 x W inside the 2n coordinates of V + V*."""
    zero = (to_field(0, s.field),) * n
    return Subspace(2 * n, s.field, tuple(zero + tuple(r) for r in s.basis))


def lift_space(d: ReductionDatum) -> LiftSpace:
    n = d.n
    b = embed_vectors(d.w0, n).plus(embed_covectors(d.f.annihilator(), n))
    b_perp = embed_vectors(d.f, n).plus(embed_covectors(d.w0.annihilator(), n))
    if not b.contains_subspace(b_perp):
        raise InternalCheckError("orthogonal lift space escapes the lift space")
    return LiftSpace(b, b_perp)


class ProjectionPi:
    """The surjection B -> (W0/F) + (W0/F)* with kernel B_perp.

    Quotient coordinates come from the canonical complement of F in W0:
    the echelon basis rows of W0 whose pivot columns are not pivots of F,
    in pivot order.
    """

    def __init__(self, d: ReductionDatum):
        n = d.n
        f_rows = d.f.basis
        f_pivots = {next(k for k, x in enumerate(r) if x) for r in f_rows}
        comp_rows = tuple(r for r in d.w0.basis
                          if next(k for k, x in enumerate(r) if x) not in f_pivots)
        if len(comp_rows) != d.reduced_dim:
            raise InternalCheckError("complement extraction lost dimensions")
        self.n = n
        self.n_reduced = d.reduced_dim
        self.f_rows = f_rows
        self.comp_rows = comp_rows
        self._solver = transpose(f_rows + comp_rows)  # n x dim(W0)

    def apply(self, v: Vector) -> Vector:
        """Image of a lift-space vector in quotient coordinates."""
        n = self.n
        if len(v) != 2 * n:
            raise InvalidInput("expected coordinates on V + V*")
        x, xi = v[:n], v[n:]
        if self.f_rows or self.comp_rows:
            coords = solve_right(self._solver, x)
        else:
            coords = () if all(not c for c in x) else None
        if coords is None:
            raise InvalidInput("vector part lies outside the constraint space")
        for fr in self.f_rows:
            if vec_dot(xi, fr) != 0:
                raise InvalidInput("covector part does not annihilate the orbit")
        head = coords[len(self.f_rows):]
        tail = tuple(vec_dot(xi, cr) for cr in self.comp_rows)
        return tuple(head) + tail

    def image(self, s: Subspace) -> Subspace:
        """Pointwise image of a subspace of B (or its complexification)."""
        rows = [self.apply(r) for r in s.basis]
        return Subspace.span(rows, 2 * self.n_reduced, s.field)


def projection_pi(d: ReductionDatum) -> ProjectionPi:
    pi = ProjectionPi(d)
    ls = lift_space(d)
    if not pi.image(ls.b).is_full():
        raise InternalCheckError("projection is not surjective on the lift space")
    if not pi.image(ls.b_perp).is_zero():
        raise InternalCheckError("projection kernel is larger than expected")
    return pi


@dataclass(frozen=True)
class ConditionReport:
    """The seven reducibility booleans plus failure witnesses.

    The booleans are provably equivalent, which is re-checked at runtime;
    disagreement raises InternalCheckError.  ``witnesses`` maps a failed
    condition number (1-based) to an explicit violating vector, chosen as
    the first canonical-basis vector that breaks the condition.
    """

    conditions: Tuple[bool, ...]
    witnesses: Dict[int, Vector]
    reduced_dim: int

    @property
    def all_hold(self) -> bool:
        return all(self.conditions)


def reduced_eigenspaces(d: ReductionDatum) -> Tuple[Subspace, Subspace]:
    """Images of the eigenspaces on the quotient, over Q(i).

    Realized as Pi((E+- + ann(W0)_C) intersect B_C); the covector freedom
    in the defining set formula is exactly adjustment by ann(W0).
    """
    pi = ProjectionPi(d)
    ls = lift_space(d)
    pair = eigenbundles(d.j)
    b_c = ls.b.complexify()
    w00_c = embed_covectors(d.w0.annihilator(), d.n).complexify()
    e_plus = pi.image(pair.plus.plus(w00_c).intersect(b_c))
    # conjugation commutes with the real projection
    e_minus = e_plus.conjugate()
    return e_plus, e_minus


def _first_outside(source: Subspace, target: Subspace) -> Optional[Vector]:
    for r in source.basis:
        if not target.contains(r):
            return r
    return None


def check_conditions(d: ReductionDatum) -> ConditionReport:
    """Evaluate the seven equivalent reducibility conditions independently."""
    n = d.n
    ls = lift_space(d)
    b, bp = ls.b, ls.b_perp
    jmat = d.j.matrix
    jb = apply_map(jmat, b)
    jbp = apply_map(jmat, bp)
    pi = projection_pi(d)

    pair = eigenbundles(d.j)
    b_c = b.complexify()
    bp_c = bp.complexify()
    w00_c = embed_covectors(d.w0.annihilator(), n).complexify()
    f_c = embed_vectors(d.f, n).complexify()
    jmat_c = complexify_matrix(jmat)

    conditions = []
    witnesses: Dict[int, Vector] = {}

    # 1: the reduced eigenspaces intersect trivially
    e_plus_r = pi.image(pair.plus.plus(w00_c).intersect(b_c))
    e_minus_r = e_plus_r.conjugate()
    meet = e_plus_r.intersect(e_minus_r)
    conditions.append(meet.is_zero())
    if not conditions[-1]:
        witnesses[1] = meet.basis[0]

    # 2: the complexified triple intersection stays inside B_perp
    triple = pair.plus.plus(f_c).intersect(b_c).intersect(pair.minus.plus(w00_c))
    conditions.append(bp_c.contains_subspace(triple))
    if not conditions[-1]:
        witnesses[2] = _first_outside(triple, bp_c)

    # 3: eigen-components of B_perp vectors with J-image in B stay in B_perp
    z = bp_c.intersect(apply_map(jmat_c, b_c))
    eye = identity(2 * n, FIELD_QI)
    minus_i_j = mat(tuple(e - QQi(0, 1) * x for e, x in zip(er, jr))
                    for er, jr in zip(eye, jmat_c))
    plus_i_j = mat(tuple(e + QQi(0, 1) * x for e, x in zip(er, jr))
                   for er, jr in zip(eye, jmat_c))
    half_plus = apply_map(minus_i_j, z)
    half_minus = apply_map(plus_i_j, z)
    ok3 = bp_c.contains_subspace(half_plus) and bp_c.contains_subspace(half_minus)
    conditions.append(ok3)
    if not ok3:
        witnesses[3] = (_first_outside(half_plus, bp_c)
                        or _first_outside(half_minus, bp_c))

    # 4: J(B_perp) meets B only inside B_perp
    s4 = jbp.intersect(b)
    conditions.append(bp.contains_subspace(s4))
    if not conditions[-1]:
        witnesses[4] = _first_outside(s4, bp)

    # 5: J(B) is contained in B + J(B_perp)
    s5 = b.plus(jbp)
    conditions.append(s5.contains_subspace(jb))
    if not conditions[-1]:
        witnesses[5] = _first_outside(jb, s5)

    # 6: B splits as (B intersect JB) + B_perp
    k = b.intersect(jb)
    s6 = k.plus(bp)
    conditions.append(s6.contains_subspace(b))
    if not conditions[-1]:
        witnesses[6] = _first_outside(b, s6)

    # 7: the reduced eigenspaces span the reduced double space
    span = e_plus_r.plus(e_minus_r)
    conditions.append(span.is_full())
    if not conditions[-1]:
        witnesses[7] = _first_outside(Subspace.full(2 * pi.n_reduced, FIELD_QI), span)

    if any(conditions) != all(conditions):
        raise InternalCheckError(
            f"equivalent conditions disagree: {conditions} on n={n}, "
            f"dim W0={d.w0.dim}, dim F={d.f.dim}")
    return ConditionReport(tuple(conditions), witnesses, d.reduced_dim)


@dataclass(frozen=True)
class ReducedGCS:
    reduced_dim: int
    j_g: GCStructure


def reduce(d: ReductionDatum) -> ReducedGCS:
    """Construct the quotient structure; the conditions must all hold."""
    report = check_conditions(d)
    if not report.all_hold:
        raise ReductionObstructed(report)
    ls = lift_space(d)
    pi = projection_pi(d)
    jmat = d.j.matrix
    jb = apply_map(jmat, ls.b)
    k = ls.b.intersect(jb)
    if not pi.image(k).is_full():
        raise InternalCheckError("no lift exists inside B intersect J(B)")
    kb = ls.b_perp.intersect(jb)
    if kb != apply_map(jmat, ls.b_perp).intersect(ls.b):
        raise InternalCheckError("kernel identity B_perp^J fails")
    if apply_map(jmat, kb) != kb:
        raise InternalCheckError("projection kernel is not J-stable")

    nr = pi.n_reduced
    pi_cols = transpose(tuple(pi.apply(r) for r in k.basis))  # 2nr x dim(k)
    jg_cols = []
    eye = identity(2 * nr)
    for target in eye:
        coeffs = solve_right(pi_cols, target)
        if coeffs is None:
            raise InternalCheckError("surjectivity witness vanished")
        lift = mat_vec(transpose(k.basis), coeffs)
        jg_cols.append(pi.apply(mat_vec(jmat, lift)))
    j_g = GCStructure(nr, transpose(mat(jg_cols)))
    return ReducedGCS(nr, j_g)


def check_mw(d: ReductionDatum) -> bool:
    """Momentum-style sufficient condition: J(B_perp) = B_perp."""
    ls = lift_space(d)
    ok = apply_map(d.j.matrix, ls.b_perp) == ls.b_perp
    if ok and not check_conditions(d).all_hold:
        raise InternalCheckError("stability of B_perp failed to imply reducibility")
    return ok


def check_gs(d: ReductionDatum) -> bool:
    """Complement-style sufficient condition: J(B_perp) meets B trivially."""
    ls = lift_space(d)
    ok = apply_map(d.j.matrix, ls.b_perp).intersect(ls.b).is_zero()
    blocks = block_decompose(d.j)
    if all(not x for row in blocks.pi_sharp for x in row) and all(
            not x for row in blocks.sigma_flat for x in row):
        # diagonal structures: equivalent to V = W0 + j(F) as a direct sum
        jf = apply_map(blocks.n_block, d.f)
        split = d.w0.intersect(jf).is_zero() and d.w0.plus(jf).is_full()
        if split != ok:
            raise InternalCheckError("complement criterion mismatch for diagonal J")
    if ok and not check_conditions(d).all_hold:
        raise InternalCheckError("trivial meeting failed to imply reducibility")
    return ok


def check_riemannian(d: ReductionDatum, g: Matrix) -> bool:
    """Metric sufficient condition: stability of the g-companion of B.

    ``g`` must be symmetric positive definite; the companion subspace is
    orth_g(F + orth_g(W0)) + ann(F + orth_g(W0)) inside V + V*.
    """
    g = mat(g)
    n = d.n
    if len(g) != n or any(len(r) != n for r in g):
        raise InvalidInput("metric must be an n x n matrix")
    if transpose(g) != g or not leading_principal_minors_positive(g):
        raise InvalidInput("metric must be symmetric positive definite")
    w0_perp = Subspace(n, FIELD_Q, kernel_basis(mat_mul(d.w0.basis, g), n)) \
        if not d.w0.is_zero() else Subspace.full(n)
    s1 = d.f.plus(w0_perp)
    s1_perp = Subspace(n, FIELD_Q, kernel_basis(mat_mul(s1.basis, g), n)) \
        if not s1.is_zero() else Subspace.full(n)
    companion = embed_vectors(s1_perp, n).plus(embed_covectors(s1.annihilator(), n))
    ok = apply_map(d.j.matrix, companion) == companion
    if ok and not check_conditions(d).all_hold:
        raise InternalCheckError("metric stability failed to imply reducibility")
    return ok


SYMPLECTIC_TYPE = "symplectic_type"
COMPLEX_TYPE = "complex_type"
MIXED_TYPE = "mixed"


def classify(r: ReducedGCS) -> str:
    """Label the block pattern of the reduced structure.

    Zero-dimensional quotients match the symplectic pattern vacuously and
    are labelled symplectic_type.
    """
    blocks = block_decompose(r.j_g)
    n_zero = all(not x for row in blocks.n_block for x in row)
    sigma_invertible = (len(blocks.sigma_flat) == 0
                        or Subspace.span(blocks.sigma_flat, r.reduced_dim).is_full())
    if n_zero and sigma_invertible:
        return SYMPLECTIC_TYPE
    pi_zero = all(not x for row in blocks.pi_sharp for x in row)
    sigma_zero = all(not x for row in blocks.sigma_flat for x in row)
    if pi_zero and sigma_zero:
        return COMPLEX_TYPE
    return MIXED_TYPE


# ---------------------------------------------------------------------------
# seedable instance generation for the property and acceptance suites


def random_isotropic_subspace(rng: random.Random, omega: Matrix, dim: int) -> Subspace:
    """Random subspace on which the 2-form omega vanishes identically."""
    n = len(omega)
    rows: list = []
    guard = 0
    while len(rows) < dim:
        guard += 1
        if guard > 200:
            raise InternalCheckError("failed to sample an isotropic subspace")
        if rows:
            constraint = mat_mul(mat(rows), omega)
            space = Subspace(n, FIELD_Q, kernel_basis(constraint, n))
        else:
            space = Subspace.full(n)
        coeffs = random_vector(rng, space.dim)
        v = mat_vec(transpose(space.basis), coeffs)
        candidate = rows + [v]
        if Subspace.span(candidate, n).dim == len(candidate):
            rows = candidate
    return Subspace.span(rows, n)


def random_datum(rng: random.Random, n: int, kind: str = "random") -> ReductionDatum:
    """Random reduction data; n must be even (no structure exists otherwise).

    Kinds: ``random`` nests arbitrary F in W0 (usually obstructed),
    ``mw`` builds the orbit space as the omega-orthogonal of an isotropic F,
    ``gs`` builds W0 as a complement of j(F) containing F.
    """
    if kind == "random":
        j = random_gcstructure(rng, n)
        n0 = rng.randint(0, n)
        w0 = random_subspace(rng, n, n0)
        f = random_subspace_of(rng, w0, rng.randint(0, n0))
        return ReductionDatum(j, w0, f)
    if kind == "mw":
        omega = random_skew_invertible(rng, n)
        f = random_isotropic_subspace(rng, omega, rng.randint(0, n // 2))
        w0 = Subspace(n, FIELD_Q, kernel_basis(mat_mul(f.basis, omega), n)) \
            if not f.is_zero() else Subspace.full(n)
        return ReductionDatum(GCStructure.from_symplectic(omega), w0, f)
    if kind == "gs":
        jmat = random_complex_matrix(rng, n)
        guard = 0
        while True:
            guard += 1
            if guard > 200:
                raise InternalCheckError("failed to sample a split datum")
            fdim = rng.randint(0, n // 2)
            f = random_subspace(rng, n, fdim)
            jf = apply_map(jmat, f)
            if f.intersect(jf).dim:
                continue
            comp = random_subspace(rng, n, n - 2 * fdim)
            if f.plus(jf).plus(comp).is_full():
                return ReductionDatum(GCStructure.from_complex(jmat), f.plus(comp), f)
    raise InvalidInput(f"unknown datum kind {kind!r}")
