"""Exact linear algebra over the rationals and Gaussian rationals.

Scalars are `gmpy2.mpq` rationals (field tag ``Q``) or :class:`QQi`
Gaussian rationals (field tag ``Qi``).  Subspaces are stored in reduced
row echelon form with pivots normalized to 1, which makes the canonical
form unique: two generating sets span the same subspace iff they
canonicalize to identical bases.  Everything is immutable and all
operations are pure functions, so values can be shared freely between
threads or processes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

from gmpy2 import mpq

QQ = mpq

FIELD_Q = "Q"
FIELD_QI = "Qi"

Vector = Tuple  # tuple of scalars
Matrix = Tuple  # tuple of row tuples


class InvalidInput(ValueError):
    """Raised when an operation is fed malformed or mismatched data."""


class InternalCheckError(RuntimeError):
    """An internal cross-check failed; indicates a bug, not bad input."""


class QQi:
    """Gaussian rational a + b*i with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", mpq(re))
        object.__setattr__(self, "im", mpq(im))

    def __setattr__(self, name, value):
        raise AttributeError("QQi is immutable")

    def __add__(self, other):
        if isinstance(other, QQi):
            return QQi(self.re + other.re, self.im + other.im)
        return QQi(self.re + other, self.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, QQi):
            return QQi(self.re - other.re, self.im - other.im)
        return QQi(self.re - other, self.im)

    def __rsub__(self, other):
        return QQi(other - self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, QQi):
            a, b, c, d = self.re, self.im, other.re, other.im
            return QQi(a * c - b * d, a * d + b * c)
        return QQi(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, QQi):
            return QQi(self.re / other, self.im / other)
        c, d = other.re, other.im
        n = c * c + d * d
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b = self.re, self.im
        return QQi((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        return QQi(other) / self

    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        return self.im == 0 and self.re == other

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


I = QQi(0, 1)


def is_scalar_zero(x) -> bool:
    return not x


def conj_scalar(x):
    return x.conjugate() if isinstance(x, QQi) else x


def to_field(x, field: str):
    """Coerce a scalar into the given field."""
    if field == FIELD_QI:
        return x if isinstance(x, QQi) else QQi(x)
    if isinstance(x, QQi):
        if x.im != 0:
            raise InvalidInput("complex scalar in a rational context")
        return x.re
    return mpq(x)


def format_scalar(x) -> str:
    """Render a scalar as ``p/q`` or ``p/q+r/s i``."""
    if isinstance(x, QQi):
        if x.im == 0:
            return str(x.re)
        sign = "+" if x.im > 0 else "-"
        return f"{x.re}{sign}{abs(x.im)} i"
    return str(x)


def parse_scalar(text: str, field: str = FIELD_Q):
    """Inverse of :func:`format_scalar`."""
    s = text.strip()
    if s.endswith("i"):
        if field != FIELD_QI:
            raise InvalidInput(f"complex scalar {text!r} in field {field}")
        body = s[:-1].strip()
        # split at the sign separating the real and imaginary parts
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/":
                re_part, im_part = body[:k], body[k:].replace(" ", "")
                sign = -1 if im_part[0] == "-" else 1
                im_part = im_part.lstrip("+-") or "1"
                return QQi(mpq(re_part), sign * mpq(im_part))
        sign = -1 if body.startswith("-") else 1
        body = body.lstrip("+-") or "1"
        return QQi(0, sign * mpq(body))
    try:
        value = mpq(s)
    except ValueError as exc:
        raise InvalidInput(f"malformed scalar {text!r}") from exc
    return QQi(value) if field == FIELD_QI else value


# ---------------------------------------------------------------------------
# matrices: tuples of row tuples


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def mat_field(rows: Iterable[Iterable], field: str) -> Matrix:
    return tuple(tuple(to_field(x, field) for x in r) for r in rows)


def identity(k: int, field: str = FIELD_Q) -> Matrix:
    one = to_field(1, field)
    zero = to_field(0, field)
    return tuple(tuple(one if i == j else zero for j in range(k)) for i in range(k))


def zeros(r: int, c: int, field: str = FIELD_Q) -> Matrix:
    zero = to_field(0, field)
    return tuple((zero,) * c for _ in range(r))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise InvalidInput("matrix dimensions do not match for product")
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

def mat_neg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in r) for r in a)

def mat_scale(c, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in r) for r in a)


def mat_vec(m: Matrix, v: Vector) -> Vector:
    if m and len(m[0]) != len(v):
        raise InvalidInput("matrix/vector dimensions do not match")
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(x + y for x, y in zip(u, v))

def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(x - y for x, y in zip(u, v))

def vec_scale(c, v: Vector) -> Vector:
    return tuple(c * x for x in v)

def vec_dot(u: Vector, v: Vector):
    return sum(x * y for x, y in zip(u, v))

def vec_is_zero(v: Vector) -> bool:
    return all(not x for x in v)


def conj_vector(v: Vector) -> Vector:
    return tuple(conj_scalar(x) for x in v)

def conj_matrix(m: Matrix) -> Matrix:
    return tuple(conj_vector(r) for r in m)


def complexify_matrix(m: Matrix) -> Matrix:
    return tuple(tuple(x if isinstance(x, QQi) else QQi(x) for x in r) for r in m)


def is_skew(m: Matrix) -> bool:
    k = len(m)
    return all(len(r) == k for r in m) and all(
        m[i][j] == -m[j][i] for i in range(k) for j in range(i, k)
    )


def is_symmetric(m: Matrix) -> bool:
    k = len(m)
    return all(len(r) == k for r in m) and all(
        m[i][j] == m[j][i] for i in range(k) for j in range(i + 1, k)
    )


def rref(rows: Iterable[Iterable]) -> Tuple[Matrix, Tuple[int, ...]]:
    """Reduced row echelon form with unit pivots; zero rows dropped.

    Pivot selection is leftmost-column first, so the result is the unique
    canonical basis of the row space.
    """
    m = [list(r) for r in rows]
    if not m:
        return (), ()
    ncols = len(m[0])
    pivots = []
    piv = 0
    for col in range(ncols):
        sel = None
        for r in range(piv, len(m)):
            if m[r][col]:
                sel = r
                break
        if sel is None:
            continue
        m[piv], m[sel] = m[sel], m[piv]
        inv = 1 / m[piv][col]
        if m[piv][col] != 1:
            m[piv] = [x * inv for x in m[piv]]
        prow = m[piv]
        for r in range(len(m)):
            if r != piv and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * p for x, p in zip(m[r], prow)]
        pivots.append(col)
        piv += 1
        if piv == len(m):
            break
    return mat(m[:piv]), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix, ncols: Optional[int] = None, field: str = FIELD_Q) -> Matrix:
    """Canonical basis of the solution space of ``m @ x = 0``."""
    if not m:
        if ncols is None:
            raise InvalidInput("empty matrix needs an explicit column count")
        return identity(ncols, field)
    ncols = len(m[0])
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    zero = to_field(0, field)
    one = to_field(1, field)
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(tuple(v))
    return rref(basis)[0] if basis else ()


def solve_right(m: Matrix, b: Vector) -> Optional[Vector]:
    """One solution ``x`` of ``m @ x = b``, or None if inconsistent."""
    if not m:
        return None
    aug = [list(row) + [bv] for row, bv in zip(m, b)]
    red, pivots = rref(aug)
    ncols = len(m[0])
    if ncols in pivots:  # pivot in the augmented column: inconsistent
        return None
    x = [to_field(0, FIELD_QI if any(isinstance(e, QQi) for r in m for e in r) else FIELD_Q)] * ncols
    for r, p in enumerate(pivots):
        x[p] = red[r][ncols]
    return tuple(x)


def mat_inv(m: Matrix) -> Matrix:
    """Exact inverse; raises InvalidInput on singular input."""
    k = len(m)
    if k == 0:
        return ()
    if any(len(r) != k for r in m):
        raise InvalidInput("only square matrices can be inverted")
    aug = [list(row) + [1 if i == j else 0 for j in range(k)] for i, row in enumerate(m)]
    # keep field of entries: coerce the appended identity
    fld = FIELD_QI if any(isinstance(e, QQi) for r in m for e in r) else FIELD_Q
    aug = [[to_field(x, fld) for x in row] for row in aug]
    red, pivots = rref(aug)
    if tuple(pivots[:k]) != tuple(range(k)) or len(red) < k:
        raise InvalidInput("matrix is singular")
    return mat(row[k:] for row in red[:k])


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A linear subspace held in canonical reduced-basis form.

    Equality is structural: same ambient dimension, same field tag and
    identical canonical bases.
    """

    ambient: int
    field: str
    basis: Matrix  # rows in reduced echelon form

    @classmethod
    def span(cls, vectors: Iterable[Iterable], ambient: int, field: str = FIELD_Q) -> "Subspace":
        rows = [tuple(to_field(x, field) for x in v) for v in vectors]
        for r in rows:
            if len(r) != ambient:
                raise InvalidInput(f"vector of length {len(r)} in ambient dimension {ambient}")
        red, _ = rref(rows)
        return cls(ambient, field, red)

    @classmethod
    def zero(cls, ambient: int, field: str = FIELD_Q) -> "Subspace":
        return cls(ambient, field, ())

    @classmethod
    def full(cls, ambient: int, field: str = FIELD_Q) -> "Subspace":
        return cls(ambient, field, identity(ambient, field))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return len(self.basis) == self.ambient

    def _check_compatible(self, other: "Subspace") -> None:
        if self.ambient != other.ambient:
            raise InvalidInput(
                f"ambient dimensions differ: {self.ambient} vs {other.ambient}")
        if self.field != other.field:
            raise InvalidInput(f"field tags differ: {self.field} vs {other.field}")

    def coordinates_of(self, v: Vector) -> Optional[Vector]:
        """Coefficients of ``v`` in the canonical basis, or None."""
        if len(v) != self.ambient:
            raise InvalidInput("vector has wrong length")
        v = tuple(to_field(x, self.field) for x in v)
        if not self.basis:
            return () if vec_is_zero(v) else None
        return solve_right(transpose(self.basis), v)

    def reduce_vector(self, v: Vector) -> Vector:
        """Residue of v after elimination against the canonical basis."""
        if len(v) != self.ambient:
            raise InvalidInput("vector has wrong length")
        out = list(v)
        for row in self.basis:
            # the pivot of an echelon row is its first nonzero entry
            p = next(k for k, x in enumerate(row) if x)
            if out[p]:
                c = out[p]
                out = [x - c * y for x, y in zip(out, row)]
        return tuple(out)

    def contains(self, v: Vector) -> bool:
        return vec_is_zero(self.reduce_vector(v))

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check_compatible(other)
        return all(self.contains(r) for r in other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Set-theoretic intersection, via the stacked coefficient kernel."""
        self._check_compatible(other)
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.ambient, self.field)
        if self.is_full():
            return other
        if other.is_full():
            return self
        at = transpose(self.basis)   # ambient x dim(self)
        bt = transpose(other.basis)  # ambient x dim(other)
        stacked = tuple(ra + tuple(-x for x in rb) for ra, rb in zip(at, bt))
        coeffs = kernel_basis(stacked, self.dim + other.dim, self.field)
        vecs = [mat_vec(at, c[: self.dim]) for c in coeffs]
        return Subspace.span(vecs, self.ambient, self.field)

    def plus(self, other: "Subspace") -> "Subspace":
        self._check_compatible(other)
        return Subspace.span(self.basis + other.basis, self.ambient, self.field)

    __and__ = intersect
    __add__ = plus

    def annihilator(self) -> "Subspace":
        """Covectors vanishing on this subspace, in dual coordinates."""
        if not self.basis:
            return Subspace.full(self.ambient, self.field)
        return Subspace(self.ambient, self.field,
                        kernel_basis(self.basis, self.ambient, self.field))

    def complexify(self) -> "Subspace":
        if self.field != FIELD_Q:
            raise InvalidInput("complexify expects a rational subspace")
        return Subspace(self.ambient, FIELD_QI, complexify_matrix(self.basis))

    def conjugate(self) -> "Subspace":
        if self.field != FIELD_QI:
            raise InvalidInput("conjugate expects a complexified subspace")
        # conjugation preserves reduced echelon form
        return Subspace(self.ambient, FIELD_QI, conj_matrix(self.basis))


def apply_map(m: Matrix, s: Subspace, codomain: Optional[int] = None) -> Subspace:
    """Image of a subspace under the linear map with matrix ``m``."""
    out_dim = len(m) if m else (codomain or 0)
    if s.is_zero():
        return Subspace.zero(out_dim, s.field)
    return Subspace.span([mat_vec(m, r) for r in s.basis], out_dim, s.field)


def preimage(m: Matrix, s: Subspace, domain: Optional[int] = None) -> Subspace:
    """Preimage {x : m @ x in s} of a subspace under a linear map."""
    in_dim = len(m[0]) if m else (domain or 0)
    ann = s.annihilator()
    if ann.is_zero():
        return Subspace.full(in_dim, s.field)
    return Subspace(in_dim, s.field,
                    kernel_basis(mat_mul(ann.basis, m), in_dim, s.field))


def orthogonal_complement(s: Subspace, gram: Matrix) -> Subspace:
    """Complement w.r.t. the symmetric bilinear form with Gram matrix."""
    if s.is_zero():
        return Subspace.full(s.ambient, s.field)
    return Subspace(s.ambient, s.field,
                    kernel_basis(mat_mul(s.basis, gram), s.ambient, s.field))


def direct_sum(a: Subspace, b: Subspace) -> Subspace:
    """External direct sum embedded in ambient dim(a)+dim(b) coordinates."""
    if a.field != b.field:
        raise InvalidInput("field tags differ in direct sum")
    n, m = a.ambient, b.ambient
    zero = to_field(0, a.field)
    rows = [tuple(r) + (zero,) * m for r in a.basis]
    rows += [(zero,) * n + tuple(r) for r in b.basis]
    return Subspace.span(rows, n + m, a.field)


def leading_principal_minors_positive(g: Matrix) -> bool:
    """Sylvester criterion: all leading principal minors are > 0."""
    k = len(g)
    for j in range(1, k + 1):
        sub = mat(row[:j] for row in g[:j])
        if _det(sub) <= 0:
            return False
    return True


def _det(m: Matrix):
    rows = [list(r) for r in m]
    k = len(rows)
    det = mpq(1)
    for col in range(k):
        sel = None
        for r in range(col, k):
            if rows[r][col]:
                sel = r
                break
        if sel is None:
            return mpq(0)
        if sel != col:
            rows[col], rows[sel] = rows[sel], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, k):
            if rows[r][col]:
                f = rows[r][col] * inv
                rows[r] = [x - f * p for x, p in zip(rows[r], rows[col])]
    return det


def non_positive_vector_witness(g: Matrix) -> Optional[Vector]:
    """A vector u with u^T g u <= 0 for a symmetric non positive-definite g.

    Returns None when g is positive definite.  Uses the smallest k at which
    the Sylvester chain breaks: the Schur-complement vector in the span of
    the first k coordinates has non-positive norm.
    """
    k = len(g)
    prev = None  # inverse of the (j-1) leading block
    for j in range(1, k + 1):
        sub = mat(row[:j] for row in g[:j])
        if _det(sub) <= 0:
            if j == 1:
                return tuple([mpq(1)] + [mpq(0)] * (k - 1))
            head = mat(row[: j - 1] for row in g[: j - 1])
            col = tuple(g[i][j - 1] for i in range(j - 1))
            x = mat_vec(mat_inv(head), col)
            u = [-xi for xi in x] + [mpq(1)] + [mpq(0)] * (k - j)
            return tuple(u)
    return None


# ---------------------------------------------------------------------------
# seedable random instance generation (numerators in {-3..3}, denominators
# in {1,2,3}; documented so every randomized suite is reproducible)


def random_scalar(rng: random.Random):
    return mpq(rng.randint(-3, 3), rng.choice([1, 2, 3]))


def random_vector(rng: random.Random, n: int) -> Vector:
    return tuple(random_scalar(rng) for _ in range(n))


def random_matrix(rng: random.Random, r: int, c: int) -> Matrix:
    return tuple(random_vector(rng, c) for _ in range(r))


def random_invertible(rng: random.Random, k: int) -> Matrix:
    while True:
        m = random_matrix(rng, k, k)
        if rank(m) == k:
            return m


def random_skew(rng: random.Random, k: int) -> Matrix:
    entries = [[mpq(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            x = random_scalar(rng)
            entries[i][j] = x
            entries[j][i] = -x
    return mat(entries)


def random_skew_invertible(rng: random.Random, k: int) -> Matrix:
    if k % 2:
        raise InvalidInput("odd-dimensional skew matrices are always singular")
    while True:
        m = random_skew(rng, k)
        if rank(m) == k:
            return m


def random_subspace(rng: random.Random, ambient: int, dim: int,
                    field: str = FIELD_Q) -> Subspace:
    if not 0 <= dim <= ambient:
        raise InvalidInput("subspace dimension out of range")
    while True:
        rows = random_matrix(rng, dim, ambient)
        s = Subspace.span(rows, ambient, field)
        if s.dim == dim:
            return s


def random_subspace_of(rng: random.Random, container: Subspace, dim: int) -> Subspace:
    """Random subspace of the given one, drawn via coefficient mixing."""
    if not 0 <= dim <= container.dim:
        raise InvalidInput("requested dimension exceeds the container")
    while True:
        coeffs = random_matrix(rng, dim, container.dim)
        rows = [mat_vec(transpose(container.basis), c) for c in coeffs] if container.basis else []
        s = Subspace.span(rows, container.ambient, container.field)
        if s.dim == dim:
            return s
