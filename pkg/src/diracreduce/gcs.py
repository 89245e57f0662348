"""Linear generalized complex structures on V + V*.

A generalized complex structure is a 2n x 2n rational matrix J acting on
V + V* coordinates with J^2 = -I that preserves the pairing.  Its +i and
-i eigenspaces are conjugate maximal isotropic subspaces over Q(i), built
exactly from the matrix (no numerical eigensolvers): the +i eigenspace is
the image of I - iJ.

Integrability is a differential condition with no pointwise analogue, so
nothing here decides it; on polynomial charts the defect of the bracket
compatibility identity is computed by ``chart.nijenhuis_defect``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from gmpy2 import mpq

from .exactlin import (
    FIELD_QI,
    InternalCheckError,
    InvalidInput,
    Matrix,
    QQi,
    Subspace,
    identity,
    is_skew,
    mat,
    mat_inv,
    mat_mul,
    mat_neg,
    rank,
    random_invertible,
    random_skew,
    random_skew_invertible,
    transpose,
)
from .dirac import flat, pairing, pairing_gram


@dataclass(frozen=True)
class GCStructure:
    """An exact matrix J on V + V* with J^2 = -I, orthogonal for the pairing."""

    n: int
    matrix: Matrix

    def __post_init__(self):
        j = self.matrix
        if len(j) != 2 * self.n or any(len(r) != 2 * self.n for r in j):
            raise InvalidInput("structure matrix must be 2n x 2n")
        if mat_mul(j, j) != mat_neg(identity(2 * self.n)):
            raise InvalidInput("matrix does not square to -I")
        q = pairing_gram(self.n)
        if mat_mul(transpose(j), mat_mul(q, j)) != q:
            raise InvalidInput("matrix is not orthogonal for the pairing")

    @classmethod
    def from_complex(cls, j: Matrix) -> "GCStructure":
        """Diagonal embedding of a linear complex structure j on V."""
        j = mat(j)
        n = len(j)
        if mat_mul(j, j) != mat_neg(identity(n)):
            raise InvalidInput("complex structure must square to -I")
        top = tuple(tuple(row) + (mpq(0),) * n for row in j)
        bottom = tuple((mpq(0),) * n + tuple(-x for x in row) for row in transpose(j))
        return cls(n, top + bottom)

    @classmethod
    def from_symplectic(cls, omega: Matrix) -> "GCStructure":
        """Structure of a nondegenerate 2-form: [[0, -flat^-1], [flat, 0]].

        ``omega`` is the coefficient matrix omega[i][j] = omega(e_i, e_j).
        """
        omega = mat(omega)
        n = len(omega)
        if not is_skew(omega):
            raise InvalidInput("2-form matrix must be skew-symmetric")
        w = flat(omega)
        if n and rank(w) != n:
            raise InvalidInput("2-form is degenerate")
        winv = mat_inv(w)
        top = tuple((mpq(0),) * n + tuple(-x for x in row) for row in winv)
        bottom = tuple(tuple(row) + (mpq(0),) * n for row in w)
        return cls(n, top + bottom)

    @classmethod
    def explicit(cls, n: int, matrix: Matrix) -> "GCStructure":
        return cls(n, mat(matrix))


def shear(b: Matrix) -> Matrix:
    """The lower-triangular pairing isometry [[I, 0], [flat(b), I]]."""
    b = mat(b)
    n = len(b)
    if not is_skew(b):
        raise InvalidInput("a shear needs a skew-symmetric 2-form matrix")
    wb = flat(b)
    top = tuple(tuple(row) + (mpq(0),) * n for row in identity(n))
    bottom = tuple(tuple(wr) + tuple(ir) for wr, ir in zip(wb, identity(n)))
    return top + bottom


def b_transform(j: GCStructure, b: Matrix) -> GCStructure:
    """Conjugate J by the shear of the 2-form b."""
    s = shear(b)
    s_inv = shear(mat_neg(mat(b)))
    return GCStructure(j.n, mat_mul(s, mat_mul(j.matrix, s_inv)))


@dataclass(frozen=True)
class EigenPair:
    """Conjugate +i / -i eigenspaces of a generalized complex structure."""

    plus: Subspace
    minus: Subspace


def eigenbundles(j: GCStructure) -> EigenPair:
    """E+- = {v -+ i J v}; exact image construction over Q(i)."""
    n2 = 2 * j.n
    c = tuple(
        tuple(QQi(1 if r == k else 0, -j.matrix[r][k]) for k in range(n2))
        for r in range(n2))
    plus = Subspace.span(transpose(c), n2, FIELD_QI)
    if plus.dim != j.n:
        raise InternalCheckError("eigenspace has wrong dimension")
    return EigenPair(plus, plus.conjugate())


def from_eigenpair(e_plus: Subspace) -> GCStructure:
    """The unique real structure with the given +i eigenspace.

    The input must be maximal isotropic over Q(i) and transverse to its
    conjugate; each violated condition is named in the error.
    """
    if e_plus.field != FIELD_QI:
        raise InvalidInput("eigenspace must be a complexified subspace")
    if e_plus.ambient % 2:
        raise InvalidInput("ambient dimension must be even")
    n = e_plus.ambient // 2
    if e_plus.dim != n:
        raise InvalidInput(
            f"eigenspace is not maximal: dimension {e_plus.dim}, expected {n}")
    for i, u in enumerate(e_plus.basis):
        for v in e_plus.basis[i:]:
            if pairing(u, v) != 0:
                raise InvalidInput("eigenspace is not isotropic")
    e_minus = e_plus.conjugate()
    if not e_plus.intersect(e_minus).is_zero():
        raise InvalidInput("eigenspace meets its conjugate: splitting fails")
    cols = transpose(e_plus.basis + e_minus.basis)  # 2n x 2n, columns are basis
    eye_i = QQi(0, 1)
    d_cols = tuple(
        tuple((c * eye_i if k < n else c * (-eye_i)) for k, c in enumerate(row))
        for row in cols)
    jc = mat_mul(d_cols, mat_inv(cols))
    rows = []
    for row in jc:
        out = []
        for x in row:
            if x.im != 0:
                raise InternalCheckError("reconstructed structure is not real")
            out.append(x.re)
        rows.append(tuple(out))
    return GCStructure(n, mat(rows))


@dataclass(frozen=True)
class BlockDecomposition:
    """Blocks of J = [[N, pi_sharp], [sigma_flat, -N^T]]."""

    n_block: Matrix      # endomorphism of V
    pi_sharp: Matrix     # bivector block V* -> V
    sigma_flat: Matrix   # 2-form block V -> V*

    def __post_init__(self):
        n = len(self.n_block)
        if not is_skew(self.pi_sharp) or not is_skew(self.sigma_flat):
            raise InternalCheckError("off-diagonal blocks must be skew")
        acc = mat_mul(self.n_block, self.n_block)
        acc = mat(tuple(a + b for a, b in zip(ra, rb))
                  for ra, rb in zip(acc, mat_mul(self.pi_sharp, self.sigma_flat)))
        if acc != mat_neg(identity(n)):
            raise InternalCheckError("block identity N^2 + pi.sigma = -I fails")


def block_decompose(j: GCStructure) -> BlockDecomposition:
    n = j.n
    m = j.matrix
    nb = mat(row[:n] for row in m[:n])
    pi = mat(row[n:] for row in m[:n])
    sigma = mat(row[:n] for row in m[n:])
    neg_nt = mat(row[n:] for row in m[n:])
    if neg_nt != mat_neg(transpose(nb)):
        raise InternalCheckError("lower-right block is not -N^T")
    return BlockDecomposition(nb, pi, sigma)


def reassemble(blocks: BlockDecomposition) -> GCStructure:
    n = len(blocks.n_block)
    top = tuple(tuple(a) + tuple(b) for a, b in zip(blocks.n_block, blocks.pi_sharp))
    bottom = tuple(
        tuple(c) + tuple(-x for x in d)
        for c, d in zip(blocks.sigma_flat, transpose(blocks.n_block)))
    return GCStructure(n, top + bottom)


# ---------------------------------------------------------------------------
# seedable random constructors used by the property and acceptance suites


def standard_complex_matrix(n: int) -> Matrix:
    """Block rotation pairing coordinates (1,2), (3,4), ...; needs n even."""
    if n % 2:
        raise InvalidInput("no rational complex structure exists in odd dimension")
    rows = [[mpq(0)] * n for _ in range(n)]
    for k in range(0, n, 2):
        rows[k][k + 1] = mpq(-1)
        rows[k + 1][k] = mpq(1)
    return mat(rows)


def random_complex_matrix(rng: random.Random, n: int) -> Matrix:
    """A conjugate P j0 P^-1 of the standard block rotation."""
    p = random_invertible(rng, n)
    return mat_mul(p, mat_mul(standard_complex_matrix(n), mat_inv(p)))


def random_gcstructure(rng: random.Random, n: int, kind: str = "any") -> GCStructure:
    """Draw from the complex / symplectic / b-transform constructors."""
    if kind == "any":
        kind = rng.choice(["complex", "symplectic", "b_transform"])
    if kind == "complex":
        return GCStructure.from_complex(random_complex_matrix(rng, n))
    if kind == "symplectic":
        return GCStructure.from_symplectic(random_skew_invertible(rng, n))
    if kind == "b_transform":
        base = random_gcstructure(rng, n, rng.choice(["complex", "symplectic"]))
        return b_transform(base, random_skew(rng, n))
    raise InvalidInput(f"unknown constructor kind {kind!r}")
