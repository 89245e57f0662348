"""Chart-level scenarios: a structure, an infinitesimal action and a
constraint locus, swept through the pointwise reduction pipeline.

A scenario fixes a coordinate chart, a structure (constant matrix or
polynomial field), polynomial generators of the action, polynomial
equations cutting out the constraint locus, and rational sample points
on that locus.  At each sample point the constraint tangent space is the
kernel of the equations' Jacobian and the orbit directions are the
generator values; freeness is replaced by pointwise independence of the
generator values, the only finitely checkable surrogate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

from gmpy2 import mpq

from .exactlin import (
    FIELD_Q,
    InvalidInput,
    Matrix,
    Subspace,
    kernel_basis,
    mat,
    mat_inv,
    mat_mul,
    transpose,
)
from .gcs import GCStructure, block_decompose
from .chart import JField
from .poly import Poly
from .kahler import (
    GKConditionReport,
    GKReductionDatum,
    GKReductionObstructed,
    GualtieriQuadruple,
    ReducedGKPair,
    from_quadruple,
    gk_check,
    gk_reduce,
)
from .reduction import (
    ConditionReport,
    ReducedGCS,
    ReductionDatum,
    check_conditions,
    classify,
    reduce,
)


class NonFreePoint(InvalidInput):
    """Generator values are dependent at a sample point."""


VectorField = Tuple[Poly, ...]


@dataclass(frozen=True)
class OrbitIdentification:
    """A linear identification of quotient coordinates between two points."""

    source_index: int
    target_index: int
    matrix: Matrix  # reduced-dim x reduced-dim, invertible


@dataclass(frozen=True)
class Scenario:
    dim: int
    j_spec: Union[GCStructure, JField, None]
    action_generators: Tuple[VectorField, ...]
    m0_equations: Tuple[Poly, ...]
    sample_points: Tuple[Tuple, ...]
    momentum: Optional[Tuple[Poly, ...]] = None
    metric: Optional[Matrix] = None
    quadruple: Optional[GualtieriQuadruple] = None
    orbit_identifications: Tuple[OrbitIdentification, ...] = ()

    def __post_init__(self):
        n = self.dim
        if (self.j_spec is None) == (self.quadruple is None):
            raise InvalidInput("provide exactly one of a structure or a quadruple")
        if self.j_spec is not None and self.j_spec_n() != n:
            raise InvalidInput("structure dimension does not match the chart")
        if self.quadruple is not None and self.quadruple.n != n:
            raise InvalidInput("quadruple dimension does not match the chart")
        for g in self.action_generators:
            if len(g) != n or any(p.nvars != n for p in g):
                raise InvalidInput("generators must be chart vector fields")
        for eq in self.m0_equations:
            if eq.nvars != n:
                raise InvalidInput("equations must be chart polynomials")
        object.__setattr__(self, "sample_points",
                           tuple(tuple(mpq(c) for c in p) for p in self.sample_points))
        for p in self.sample_points:
            if len(p) != n:
                raise InvalidInput("sample point has wrong length")
            for eq in self.m0_equations:
                if eq.eval(p) != 0:
                    raise InvalidInput(
                        f"sample point {tuple(map(str, p))} is off the constraint locus")
            w0 = self._constraint_space(p)
            for g in self.action_generators:
                if not w0.contains(tuple(poly.eval(p) for poly in g)):
                    raise InvalidInput(
                        "a generator leaves the constraint locus at "
                        f"{tuple(map(str, p))}")
        if self.momentum is not None:
            self._verify_momentum()

    def j_spec_n(self) -> int:
        return self.j_spec.n

    def _constraint_space(self, point) -> Subspace:
        rows = [tuple(eq.diff(i).eval(point) for i in range(self.dim))
                for eq in self.m0_equations]
        rows = [r for r in rows if any(r)]
        if not rows:
            return Subspace.full(self.dim)
        return Subspace(self.dim, FIELD_Q, kernel_basis(mat(rows), self.dim))

    def _verify_momentum(self):
        """Generator contractions with the 2-form must be the momentum
        differentials, as polynomial identities."""
        if len(self.momentum) != len(self.action_generators):
            raise InvalidInput("one momentum component per generator is required")
        if not isinstance(self.j_spec, GCStructure):
            raise InvalidInput("momentum data needs a constant structure")
        blocks = block_decompose(self.j_spec)
        if any(x for row in blocks.n_block for x in row):
            raise InvalidInput("momentum data needs a symplectic-type structure")
        w = blocks.sigma_flat  # the flat map of the 2-form
        n = self.dim
        for gen, mu in zip(self.action_generators, self.momentum):
            if mu.nvars != n:
                raise InvalidInput("momentum components must be chart polynomials")
            for j in range(n):
                contraction = Poly.zero(n)
                for i in range(n):
                    contraction = contraction + w[j][i] * gen[i]
                if contraction != mu.diff(j):
                    raise InvalidInput(
                        "generator contraction does not match the momentum "
                        "differential")


def structure_at(s: Scenario, point) -> GCStructure:
    if isinstance(s.j_spec, JField):
        return s.j_spec.eval(point)
    return s.j_spec


def pointwise_datum(s: Scenario, point) -> ReductionDatum:
    """Extract the one-point reduction data at a sample point."""
    point = tuple(mpq(c) for c in point)
    if point not in s.sample_points:
        raise InvalidInput("point is not one of the scenario's sample points")
    if s.quadruple is not None:
        raise InvalidInput("pair scenarios reduce through the pair pipeline")
    w0 = s._constraint_space(point)
    values = [tuple(p.eval(point) for p in g) for g in s.action_generators]
    f = Subspace.span(values, s.dim)
    if f.dim != len(values):
        raise NonFreePoint(
            f"generators are dependent at {tuple(map(str, point))}")
    return ReductionDatum(structure_at(s, point), w0, f)


def pointwise_gk_datum(s: Scenario, point) -> GKReductionDatum:
    point = tuple(mpq(c) for c in point)
    if point not in s.sample_points:
        raise InvalidInput("point is not one of the scenario's sample points")
    if s.quadruple is None:
        raise InvalidInput("scenario carries no quadruple")
    w0 = s._constraint_space(point)
    values = [tuple(p.eval(point) for p in g) for g in s.action_generators]
    f = Subspace.span(values, s.dim)
    if f.dim != len(values):
        raise NonFreePoint(
            f"generators are dependent at {tuple(map(str, point))}")
    return GKReductionDatum(from_quadruple(s.quadruple), w0, f)


@dataclass(frozen=True)
class PointOutcome:
    point: Tuple
    status: str  # ok | obstructed | invalid-input
    error: Optional[str] = None
    report: Optional[ConditionReport] = None
    reduced: Optional[ReducedGCS] = None
    classification: Optional[str] = None
    gk_report: Optional[GKConditionReport] = None
    gk_reduced: Optional[ReducedGKPair] = None


@dataclass(frozen=True)
class OrbitCheck:
    source_index: int
    target_index: int
    consistent: bool


@dataclass(frozen=True)
class SweepResult:
    outcomes: Tuple[PointOutcome, ...]
    orbit_checks: Tuple[OrbitCheck, ...]

    @property
    def all_ok(self) -> bool:
        return all(o.status == "ok" for o in self.outcomes) and all(
            c.consistent for c in self.orbit_checks)


def _sweep_point(s: Scenario, point) -> PointOutcome:
    try:
        if s.quadruple is not None:
            d = pointwise_gk_datum(s, point)
            gk_rep = gk_check(d)
            try:
                red = gk_reduce(d)
            except GKReductionObstructed:
                return PointOutcome(point, "obstructed", gk_report=gk_rep)
            labels = sorted(
                classify(ReducedGCS(red.reduced_dim, j))
                for j in (red.pair.j1, red.pair.j2))
            return PointOutcome(point, "ok", gk_report=gk_rep, gk_reduced=red,
                                classification="+".join(labels))
        d = pointwise_datum(s, point)
        report = check_conditions(d)
        if not report.all_hold:
            return PointOutcome(point, "obstructed", report=report)
        red = reduce(d)
        return PointOutcome(point, "ok", report=report, reduced=red,
                            classification=classify(red))
    except InvalidInput as exc:
        return PointOutcome(point, "invalid-input", error=str(exc))


def sweep(s: Scenario) -> SweepResult:
    """Run the pointwise pipeline at every sample point; never aborts.

    When orbit identifications are supplied, the reduced structures at the
    identified points are compared after the corresponding change of
    quotient coordinates.
    """
    outcomes = tuple(_sweep_point(s, p) for p in s.sample_points)
    checks = []
    for ident in s.orbit_identifications:
        src = outcomes[ident.source_index]
        tgt = outcomes[ident.target_index]
        ok = False
        if src.status == "ok" and tgt.status == "ok" and src.reduced and tgt.reduced:
            a = mat(ident.matrix)
            a_inv_t = transpose(mat_inv(a))
            nr = src.reduced.reduced_dim
            zero = tuple(mpq(0) for _ in range(nr))
            top = tuple(tuple(r) + zero for r in a)
            bottom = tuple(zero + tuple(r) for r in a_inv_t)
            t = top + bottom
            conj = mat_mul(t, mat_mul(src.reduced.j_g.matrix, mat_inv(t)))
            ok = conj == tgt.reduced.j_g.matrix
        checks.append(OrbitCheck(ident.source_index, ident.target_index, ok))
    return SweepResult(outcomes, tuple(checks))
