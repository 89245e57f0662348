"""Linear Dirac structures on V + V*.

Coordinates on V + V* are length-2n tuples: the first n entries are the
vector part X, the last n the covector part xi.  The inner product is
``<X+xi, Y+eta> = (xi(Y) + eta(X)) / 2`` and a Dirac structure is a
maximal isotropic subspace for it.

Sign convention used throughout the package: the interior product of a
vector with a 2-form is ``(X . omega)(Y) = omega(X, Y)``, so the flat map
of a 2-form with coefficient matrix ``M[i][j] = omega(e_i, e_j)`` is the
transpose ``M^T`` acting on vector coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

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
    mat,
    mat_vec,
    preimage,
    solve_right,
    to_field,
    transpose,
    vec_dot,
    zeros,
)


def flat(omega: Matrix) -> Matrix:
    """Matrix of X -> X . omega as a map V -> V*."""
    return transpose(omega)


def split_vector(v: Vector, n: int) -> Tuple[Vector, Vector]:
    if len(v) != 2 * n:
        raise InvalidInput(f"expected a length-{2 * n} coordinate vector")
    return v[:n], v[n:]


def join_vector(x: Vector, xi: Vector) -> Vector:
    return tuple(x) + tuple(xi)


def pairing_gram(n: int, field: str = FIELD_Q) -> Matrix:
    """Gram matrix of the inner product: (1/2) * [[0, I], [I, 0]]."""
    half = to_field(mpq(1, 2), field)
    zero = to_field(0, field)
    rows = []
    for i in range(2 * n):
        row = [zero] * (2 * n)
        j = i + n if i < n else i - n
        row[j] = half
        rows.append(tuple(row))
    return tuple(rows)


def pairing(v: Vector, w: Vector):
    """<X+xi, Y+eta> = (xi(Y) + eta(X)) / 2."""
    if len(v) != len(w) or len(v) % 2:
        raise InvalidInput("pairing needs two vectors of equal even length")
    n = len(v) // 2
    x, xi = v[:n], v[n:]
    y, eta = w[:n], w[n:]
    return (vec_dot(xi, y) + vec_dot(eta, x)) / 2


@dataclass(frozen=True)
class DiracStructure:
    """A maximal isotropic subspace of V + V* in canonical form."""

    n: int
    space: Subspace

    def __post_init__(self):
        if self.space.ambient != 2 * self.n:
            raise InvalidInput("Dirac structure must live in 2n coordinates")
        if self.space.dim != self.n:
            raise InvalidInput(
                f"not maximal: dimension {self.space.dim}, expected {self.n}")
        for i, u in enumerate(self.space.basis):
            for v in self.space.basis[i:]:
                if pairing(u, v) != 0:
                    raise InvalidInput("subspace is not isotropic for the pairing")

    @property
    def field(self) -> str:
        return self.space.field

    def range_projection(self) -> Subspace:
        """rho(L): the projection onto V."""
        return Subspace.span([r[: self.n] for r in self.space.basis],
                             self.n, self.field)

    def corange_projection(self) -> Subspace:
        """rho*(L): the projection onto V*."""
        return Subspace.span([r[self.n:] for r in self.space.basis],
                             self.n, self.field)


@dataclass(frozen=True)
class FormPresentation:
    """A Dirac structure presented as (R, Omega) with Omega skew on R."""

    range: Subspace
    omega: Matrix  # in the coordinates of range.basis


@dataclass(frozen=True)
class BivectorPresentation:
    """A Dirac structure presented as (R*, pi) with pi skew on R*."""

    corange: Subspace
    pi: Matrix


def tangent(n: int, field: str = FIELD_Q) -> DiracStructure:
    """V + 0."""
    return from_form(Subspace.full(n, field), zeros(n, n, field))


def cotangent(n: int, field: str = FIELD_Q) -> DiracStructure:
    """0 + V*."""
    return from_form(Subspace.zero(n, field), ())


def from_form(r: Subspace, omega: Matrix) -> DiracStructure:
    """Dirac structure {X + xi : X in R, X . Omega = xi restricted to R}."""
    k = r.dim
    omega = mat(omega)
    if len(omega) != k or any(len(row) != k for row in omega):
        raise InvalidInput("form matrix must match the rank of its carrier")
    if not is_skew(omega):
        raise InvalidInput("form matrix must be skew-symmetric")
    n = r.ambient
    field = r.field
    rows = []
    for a in range(k):
        xi = solve_right(r.basis, omega[a])
        if xi is None:  # cannot happen: basis rows are independent
            raise InternalCheckError("carrier basis failed to produce a covector")
        rows.append(join_vector(r.basis[a], xi))
    for beta in r.annihilator().basis:
        rows.append(join_vector((to_field(0, field),) * n, beta))
    return DiracStructure(n, Subspace.span(rows, 2 * n, field))


def to_form(L: DiracStructure) -> FormPresentation:
    """Recover (rho(L), Omega); asserts Omega is well defined on rho(L)."""
    n, field = L.n, L.field
    r = L.range_projection()
    # elements of L with zero vector part must annihilate rho(L), otherwise
    # the 2-form would depend on the choice of xi over X
    xparts = mat(row[:n] for row in L.space.basis)
    vertical = L.space.intersect(_vertical_subspace(n, field))
    for v in vertical.basis:
        if any(vec_dot(v[n:], rb) != 0 for rb in r.basis):
            raise InternalCheckError("2-form is not well defined: corrupt input")
    omega_rows = []
    for a in range(r.dim):
        coeffs = solve_right(transpose(xparts), r.basis[a])
        if coeffs is None:
            raise InternalCheckError("range projection lost a basis vector")
        full = mat_vec(transpose(L.space.basis), coeffs)
        xi = full[n:]
        omega_rows.append(tuple(vec_dot(xi, r.basis[b]) for b in range(r.dim)))
    return FormPresentation(r, mat(omega_rows))


def from_bivector(rstar: Subspace, pi: Matrix) -> DiracStructure:
    """Dirac structure {X + xi : xi in R*, pi(xi, .) = -(.)(X) on R*}."""
    k = rstar.dim
    pi = mat(pi)
    if len(pi) != k or any(len(row) != k for row in pi):
        raise InvalidInput("bivector matrix must match the rank of its carrier")
    if not is_skew(pi):
        raise InvalidInput("bivector matrix must be skew-symmetric")
    n = rstar.ambient
    field = rstar.field
    rows = []
    for a in range(k):
        x = solve_right(rstar.basis, tuple(-p for p in pi[a]))
        if x is None:
            raise InternalCheckError("carrier basis failed to produce a vector")
        rows.append(join_vector(x, rstar.basis[a]))
    for z in rstar.annihilator().basis:
        rows.append(join_vector(z, (to_field(0, field),) * n))
    return DiracStructure(n, Subspace.span(rows, 2 * n, field))


def to_bivector(L: DiracStructure) -> BivectorPresentation:
    """Recover (rho*(L), pi) with pi(xi, eta) = -eta(X) for X + xi in L."""
    n, field = L.n, L.field
    rstar = L.corange_projection()
    xiparts = mat(row[n:] for row in L.space.basis)
    horizontal = L.space.intersect(_horizontal_subspace(n, field))
    for v in horizontal.basis:
        if any(vec_dot(v[:n], sb) != 0 for sb in rstar.basis):
            raise InternalCheckError("bivector is not well defined: corrupt input")
    pi_rows = []
    for a in range(rstar.dim):
        coeffs = solve_right(transpose(xiparts), rstar.basis[a])
        if coeffs is None:
            raise InternalCheckError("corange projection lost a basis vector")
        full = mat_vec(transpose(L.space.basis), coeffs)
        x = full[:n]
        pi_rows.append(tuple(-vec_dot(rstar.basis[b], x) for b in range(rstar.dim)))
    return BivectorPresentation(rstar, mat(pi_rows))


def _vertical_subspace(n: int, field: str) -> Subspace:
    """0 + V* inside the 2n coordinates."""
    zero = to_field(0, field)
    one = to_field(1, field)
    rows = [tuple(one if j == n + i else zero for j in range(2 * n)) for i in range(n)]
    return Subspace.span(rows, 2 * n, field)


def _horizontal_subspace(n: int, field: str) -> Subspace:
    zero = to_field(0, field)
    one = to_field(1, field)
    rows = [tuple(one if j == i else zero for j in range(2 * n)) for i in range(n)]
    return Subspace.span(rows, 2 * n, field)


def _graph_maps(phi: Matrix, n: int, m: int, field: str):
    """The two coordinate maps used by the image constructions."""
    phit = transpose(phi)
    # V + W* -> W + W*: (X, xi) -> (phi X, xi)
    t_push = tuple(tuple(row) + (to_field(0, field),) * m for row in phi)
    t_push += tuple((to_field(0, field),) * n + tuple(row) for row in identity(m, field))
    # V + W* -> V + V*: (X, xi) -> (X, phi^T xi)
    t_pull = tuple(tuple(row) + (to_field(0, field),) * m for row in identity(n, field))
    t_pull += tuple((to_field(0, field),) * n + tuple(row) for row in phit)
    return mat(t_push), mat(t_pull)


def backward(phi: Matrix, L_W: DiracStructure) -> DiracStructure:
    """Backward image {X + phi*xi : phi X + xi in L_W} on the source space."""
    m = L_W.n
    if len(phi) != m:
        raise InvalidInput("map codomain does not match the Dirac structure")
    n = len(phi[0]) if phi else 0
    field = L_W.field
    t_push, t_pull = _graph_maps(mat_field_like(phi, field), n, m, field)
    s = preimage(t_push, L_W.space, n + m)
    return DiracStructure(n, apply_map(t_pull, s, 2 * n))


def forward(phi: Matrix, L_V: DiracStructure) -> DiracStructure:
    """Forward image {phi X + xi : X + phi*xi in L_V} on the target space."""
    n = L_V.n
    if phi and len(phi[0]) != n:
        raise InvalidInput("map domain does not match the Dirac structure")
    m = len(phi)
    field = L_V.field
    t_push, t_pull = _graph_maps(mat_field_like(phi, field), n, m, field)
    s = preimage(t_pull, L_V.space, n + m)
    return DiracStructure(m, apply_map(t_push, s, 2 * m))


def mat_field_like(m: Matrix, field: str) -> Matrix:
    return tuple(tuple(to_field(x, field) for x in row) for row in m)
