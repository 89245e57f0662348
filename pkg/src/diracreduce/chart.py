"""Exterior calculus with polynomial coefficients on a coordinate chart.

Sections of the double tangent space are pairs (vector field, 1-form)
with polynomial components.  The skew bracket on sections is

    [[X+xi, Y+eta]] = [X,Y] + L_X eta - L_Y xi + d(xi(Y) - eta(X)) / 2

computed exactly, so identities like closedness of a graph under the
bracket or vanishing of the integrability defect are decidable on this
class of inputs.  Inputs to the public operations are degree-bounded
(default 4); exceeding the bound is a resource error, not a math error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

from gmpy2 import mpq

from .exactlin import InvalidInput, Matrix, Subspace, Vector
from .gcs import GCStructure
from .poly import Poly

DEFAULT_MAX_DEGREE = 4


class DegreeLimitError(Exception):
    """Input polynomial degree exceeds the configured bound."""


def _check_degree(polys: Iterable[Poly], max_degree: int):
    for p in polys:
        if p.total_degree() > max_degree:
            raise DegreeLimitError(
                f"degree {p.total_degree()} input exceeds the bound {max_degree}")


Index = Tuple[int, ...]


class KForm:
    """Alternating form of fixed degree with Poly coefficients.

    Components are stored on strictly increasing index tuples (0-based).
    """

    __slots__ = ("nvars", "degree", "comps")

    def __init__(self, nvars: int, degree: int, comps: Dict[Index, Poly] | Iterable = ()):
        items = comps.items() if isinstance(comps, dict) else comps
        clean = {}
        for idx, p in items:
            idx = tuple(idx)
            if len(idx) != degree or any(not 0 <= i < nvars for i in idx):
                raise InvalidInput("malformed form index")
            if list(idx) != sorted(set(idx)):
                raise InvalidInput("form indices must be strictly increasing")
            if not isinstance(p, Poly):
                p = Poly.const(p, nvars)
            if p.nvars != nvars:
                raise InvalidInput("component polynomial uses a different chart")
            if not p.is_zero():
                clean[idx] = clean.get(idx, Poly.zero(nvars)) + p
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(
            self, "comps",
            tuple(sorted(((i, p) for i, p in clean.items() if not p.is_zero()))))

    def __setattr__(self, name, value):
        raise AttributeError("KForm is immutable")

    @classmethod
    def zero(cls, nvars: int, degree: int) -> "KForm":
        return cls(nvars, degree)

    def component(self, idx: Index) -> Poly:
        for i, p in self.comps:
            if i == tuple(idx):
                return p
        return Poly.zero(self.nvars)

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other):
        return (isinstance(other, KForm) and self.nvars == other.nvars
                and self.degree == other.degree and self.comps == other.comps)

    def __hash__(self):
        return hash((self.nvars, self.degree, self.comps))

    def __add__(self, other: "KForm") -> "KForm":
        if self.nvars != other.nvars or self.degree != other.degree:
            raise InvalidInput("form mismatch in sum")
        acc = dict(self.comps)
        for i, p in other.comps:
            acc[i] = acc.get(i, Poly.zero(self.nvars)) + p
        return KForm(self.nvars, self.degree, acc)

    def __neg__(self) -> "KForm":
        return KForm(self.nvars, self.degree, {i: -p for i, p in self.comps})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def scale(self, f) -> "KForm":
        f = f if isinstance(f, Poly) else Poly.const(f, self.nvars)
        return KForm(self.nvars, self.degree, {i: f * p for i, p in self.comps})

    def d(self) -> "KForm":
        """Exterior derivative."""
        acc: Dict[Index, Poly] = {}
        for idx, p in self.comps:
            for j in range(self.nvars):
                dp = p.diff(j)
                if dp.is_zero() or j in idx:
                    continue
                new = tuple(sorted(idx + (j,)))
                sign = (-1) ** new.index(j)
                term = dp if sign > 0 else -dp
                acc[new] = acc.get(new, Poly.zero(self.nvars)) + term
        return KForm(self.nvars, self.degree + 1, acc)

    def interior(self, x: Sequence[Poly]):
        """Contraction with a polynomial vector field in the first slot."""
        if self.degree == 0:
            raise InvalidInput("cannot contract a 0-form")
        if self.degree == 1:
            out = Poly.zero(self.nvars)
            for (i,), p in self.comps:
                out = out + x[i] * p
            return out
        acc: Dict[Index, Poly] = {}
        for idx, p in self.comps:
            for pos, j in enumerate(idx):
                rest = idx[:pos] + idx[pos + 1:]
                term = x[j] * p
                if pos % 2:
                    term = -term
                acc[rest] = acc.get(rest, Poly.zero(self.nvars)) + term
        return KForm(self.nvars, self.degree - 1, acc)

    def wedge(self, other: "KForm") -> "KForm":
        if self.nvars != other.nvars:
            raise InvalidInput("form mismatch in wedge")
        acc: Dict[Index, Poly] = {}
        for i1, p1 in self.comps:
            for i2, p2 in other.comps:
                if set(i1) & set(i2):
                    continue
                merged = tuple(sorted(i1 + i2))
                # sign of the permutation sorting i1 + i2
                seq = list(i1 + i2)
                sign = 1
                for a in range(len(seq)):
                    for b in range(a + 1, len(seq)):
                        if seq[a] > seq[b]:
                            sign = -sign
                term = p1 * p2 if sign > 0 else -(p1 * p2)
                acc[merged] = acc.get(merged, Poly.zero(self.nvars)) + term
        return KForm(self.nvars, self.degree + other.degree, acc)

    def eval(self, point: Sequence) -> Dict[Index, object]:
        return {i: p.eval(point) for i, p in self.comps}

    def __str__(self):
        if not self.comps:
            return "0"
        parts = []
        for idx, p in self.comps:
            basis = "^".join(f"dx{i + 1}" for i in idx)
            parts.append(f"({p}) {basis}" if basis else str(p))
        return " + ".join(parts)

    __repr__ = __str__


def oneform(polys: Sequence[Poly]) -> KForm:
    """Coordinate 1-form (p1, ..., pn) -> sum p_i dx_i."""
    n = len(polys)
    return KForm(n, 1, {(i,): p for i, p in enumerate(polys)})


def oneform_components(form: KForm) -> Tuple[Poly, ...]:
    if form.degree != 1:
        raise InvalidInput("expected a 1-form")
    return tuple(form.component((i,)) for i in range(form.nvars))


def constant_twoform(matrix: Matrix, nvars: int) -> KForm:
    """2-form with constant coefficient matrix m[i][j] = omega(e_i, e_j)."""
    comps = {}
    for i in range(nvars):
        for j in range(i + 1, nvars):
            comps[(i, j)] = Poly.const(matrix[i][j], nvars)
    return KForm(nvars, 2, comps)


def twoform_matrix(form: KForm) -> Tuple[Tuple[Poly, ...], ...]:
    """Coefficient matrix of a 2-form, entries omega(e_i, e_j) as Poly."""
    if form.degree != 2:
        raise InvalidInput("expected a 2-form")
    n = form.nvars
    rows = [[Poly.zero(n) for _ in range(n)] for _ in range(n)]
    for (i, j), p in form.comps:
        rows[i][j] = p
        rows[j][i] = -p
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class PolySection:
    """X + xi with polynomial components on an n-dimensional chart."""

    x: Tuple[Poly, ...]
    xi: Tuple[Poly, ...]

    def __post_init__(self):
        if len(self.x) != len(self.xi):
            raise InvalidInput("vector and covector parts must have equal length")
        for p in self.x + self.xi:
            if not isinstance(p, Poly) or p.nvars != len(self.x):
                raise InvalidInput("section components must be chart polynomials")

    @property
    def nvars(self) -> int:
        return len(self.x)

    def __add__(self, other: "PolySection") -> "PolySection":
        return PolySection(tuple(a + b for a, b in zip(self.x, other.x)),
                           tuple(a + b for a, b in zip(self.xi, other.xi)))

    def __sub__(self, other: "PolySection") -> "PolySection":
        return PolySection(tuple(a - b for a, b in zip(self.x, other.x)),
                           tuple(a - b for a, b in zip(self.xi, other.xi)))

    def __neg__(self) -> "PolySection":
        return PolySection(tuple(-a for a in self.x), tuple(-a for a in self.xi))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.x + self.xi)

    def eval(self, point: Sequence) -> Vector:
        return tuple(p.eval(point) for p in self.x + self.xi)

    @classmethod
    def from_constant(cls, vec: Sequence, nvars: int) -> "PolySection":
        if len(vec) != 2 * nvars:
            raise InvalidInput("constant section needs 2n coordinates")
        return cls(tuple(Poly.const(c, nvars) for c in vec[:nvars]),
                   tuple(Poly.const(c, nvars) for c in vec[nvars:]))

    @classmethod
    def coordinate_field(cls, index: int, nvars: int) -> "PolySection":
        x = tuple(Poly.const(1 if i == index else 0, nvars) for i in range(nvars))
        zero = tuple(Poly.zero(nvars) for _ in range(nvars))
        return cls(x, zero)


@dataclass(frozen=True)
class PolyMap:
    """Polynomial map between charts, one component per target coordinate."""

    source_dim: int
    components: Tuple[Poly, ...]

    def __post_init__(self):
        for p in self.components:
            if p.nvars != self.source_dim:
                raise InvalidInput("map components must live on the source chart")

    @property
    def target_dim(self) -> int:
        return len(self.components)

    def jacobian(self) -> Tuple[Tuple[Poly, ...], ...]:
        return tuple(tuple(c.diff(i) for i in range(self.source_dim))
                     for c in self.components)


# ---------------------------------------------------------------------------
# calculus


def exterior_d(arg, max_degree: int = DEFAULT_MAX_DEGREE) -> KForm:
    """d on functions and on forms of any degree."""
    if isinstance(arg, Poly):
        _check_degree([arg], max_degree)
        return KForm(arg.nvars, 1, {(i,): arg.diff(i) for i in range(arg.nvars)})
    if isinstance(arg, KForm):
        _check_degree([p for _, p in arg.comps], max_degree)
        return arg.d()
    raise InvalidInput("exterior_d expects a polynomial or a form")


def _lie_oneform(x: Sequence[Poly], eta: KForm) -> KForm:
    """Cartan formula i_X d(eta) + d(i_X eta) for a 1-form."""
    inner = eta.interior(x)  # a Poly
    return eta.d().interior(x) + KForm(
        eta.nvars, 1, {(i,): inner.diff(i) for i in range(eta.nvars)})


def lie_derivative(x: Sequence[Poly], eta, max_degree: int = DEFAULT_MAX_DEGREE):
    """Lie derivative of a 1-form along a polynomial vector field."""
    form = eta if isinstance(eta, KForm) else oneform(tuple(eta))
    _check_degree(list(x) + [p for _, p in form.comps], max_degree)
    out = _lie_oneform(x, form)
    return out if isinstance(eta, KForm) else oneform_components(out)


def vf_bracket(x: Sequence[Poly], y: Sequence[Poly]) -> Tuple[Poly, ...]:
    """Lie bracket of vector fields, [X, Y]^k = X(Y^k) - Y(X^k)."""
    n = len(x)
    out = []
    for k in range(n):
        acc = Poly.zero(n)
        for i in range(n):
            acc = acc + x[i] * y[k].diff(i) - y[i] * x[k].diff(i)
        out.append(acc)
    return tuple(out)


def courant_bracket(s1: PolySection, s2: PolySection,
                    max_degree: int = DEFAULT_MAX_DEGREE) -> PolySection:
    """The skew bracket [X,Y] + L_X eta - L_Y xi + d(xi(Y) - eta(X))/2."""
    if s1.nvars != s2.nvars:
        raise InvalidInput("sections live on different charts")
    _check_degree(s1.x + s1.xi + s2.x + s2.xi, max_degree)
    n = s1.nvars
    x, xi = s1.x, oneform(s1.xi)
    y, eta = s2.x, oneform(s2.xi)
    vec = vf_bracket(x, y)
    form = _lie_oneform(x, eta) - _lie_oneform(y, xi)
    fn = xi.interior(y) - eta.interior(x)
    half_d = KForm(n, 1, {(i,): fn.diff(i) for i in range(n)})
    form = form + half_d.scale(mpq(1, 2))
    return PolySection(vec, oneform_components(form))


def phi_related(phi: PolyMap, s_source: PolySection, s_target: PolySection,
                max_degree: int = DEFAULT_MAX_DEGREE) -> bool:
    """Whether phi pushes the vector part forward and pulls the form back.

    Both conditions are polynomial identities: phi_* X = Y along phi and
    phi^* eta = xi.
    """
    if s_source.nvars != phi.source_dim or s_target.nvars != phi.target_dim:
        raise InvalidInput("section charts do not match the map")
    _check_degree(s_source.x + s_source.xi + s_target.x + s_target.xi
                  + phi.components, max_degree)
    jac = phi.jacobian()
    # pushforward: sum_i X_i d(phi_j)/d(x_i) = Y_j o phi
    for j in range(phi.target_dim):
        lhs = Poly.zero(phi.source_dim)
        for i in range(phi.source_dim):
            lhs = lhs + s_source.x[i] * jac[j][i]
        if lhs != s_target.x[j].compose(phi.components):
            return False
    # pullback: xi_i = sum_j (eta_j o phi) d(phi_j)/d(x_i)
    for i in range(phi.source_dim):
        rhs = Poly.zero(phi.source_dim)
        for j in range(phi.target_dim):
            rhs = rhs + s_target.xi[j].compose(phi.components) * jac[j][i]
        if s_source.xi[i] != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# polynomial structure fields


class JField:
    """A 2n x 2n matrix of chart polynomials acting on sections.

    The structure identities (square -I, pairing orthogonality) hold as
    polynomial identities and are validated on construction.
    """

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries):
        entries = tuple(tuple(p for p in row) for row in entries)
        if len(entries) != 2 * n or any(len(r) != 2 * n for r in entries):
            raise InvalidInput("structure field must be a 2n x 2n matrix")
        nv = n
        for row in entries:
            for p in row:
                if not isinstance(p, Poly) or p.nvars != n:
                    raise InvalidInput("structure field entries must be chart polynomials")
        # J^2 = -I as polynomial identities
        for i in range(2 * n):
            for j in range(2 * n):
                acc = Poly.zero(nv)
                for k in range(2 * n):
                    acc = acc + entries[i][k] * entries[k][j]
                expect = Poly.const(-1 if i == j else 0, nv)
                if acc != expect:
                    raise InvalidInput("field does not square to -I")
        # orthogonality J^T Q J = Q with Q = [[0, I], [I, 0]] / 2
        for i in range(2 * n):
            for j in range(2 * n):
                acc = Poly.zero(nv)
                for k in range(2 * n):
                    kq = k + n if k < n else k - n
                    acc = acc + entries[k][i] * entries[kq][j]
                expect = Poly.const(1 if (i + n) % (2 * n) == j else 0, nv)
                if acc != expect:
                    raise InvalidInput("field is not orthogonal for the pairing")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("JField is immutable")

    @classmethod
    def constant(cls, g: GCStructure) -> "JField":
        n = g.n
        return cls(n, tuple(tuple(Poly.const(x, n) for x in row)
                            for row in g.matrix))

    def b_transform(self, b: KForm) -> "JField":
        """Conjugate by the shear of a polynomial 2-form (always polynomial)."""
        n = self.n
        if b.degree != 2 or b.nvars != n:
            raise InvalidInput("b-transform needs a 2-form on the same chart")
        wb = _flat_poly(b)  # n x n Poly matrix
        zero, one = Poly.zero(n), Poly.const(1, n)

        def shear_rows(sign):
            rows = []
            for i in range(n):
                rows.append(tuple(one if j == i else zero for j in range(2 * n)))
            for i in range(n):
                left = tuple(wb[i][j] if sign > 0 else -wb[i][j] for j in range(n))
                right = tuple(one if j == i else zero for j in range(n))
                rows.append(left + right)
            return rows

        s, s_inv = shear_rows(+1), shear_rows(-1)
        prod = _poly_mat_mul(s, _poly_mat_mul(self.entries, s_inv))
        return JField(n, prod)

    def apply(self, s: PolySection) -> PolySection:
        comps = tuple(s.x) + tuple(s.xi)
        out = []
        for row in self.entries:
            acc = Poly.zero(self.n)
            for p, c in zip(row, comps):
                acc = acc + p * c
            out.append(acc)
        return PolySection(tuple(out[: self.n]), tuple(out[self.n:]))

    def eval(self, point: Sequence) -> GCStructure:
        """Pointwise structure at a rational chart point."""
        rows = tuple(tuple(p.eval(point) for p in row) for row in self.entries)
        return GCStructure(self.n, rows)


def _flat_poly(b: KForm):
    """Flat matrix (transpose of the coefficient matrix) with Poly entries."""
    m = twoform_matrix(b)
    n = b.nvars
    return tuple(tuple(m[j][i] for j in range(n)) for i in range(n))


def _poly_mat_mul(a, b):
    n = len(b[0])
    out = []
    for row in a:
        new = []
        for j in range(n):
            acc = Poly.zero(row[0].nvars)
            for k in range(len(b)):
                acc = acc + row[k] * b[k][j]
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def nijenhuis_defect(jf: JField, e1: PolySection, e2: PolySection,
                     max_degree: int = DEFAULT_MAX_DEGREE) -> PolySection:
    """[[Je1, Je2]] - [[e1, e2]] - J([[Je1, e2]] + [[e1, Je2]]), exactly.

    The zero section on all inputs is equivalent to integrability of the
    field; a nonzero value is a certified obstruction.
    """
    if e1.nvars != jf.n or e2.nvars != jf.n:
        raise InvalidInput("sections live on a different chart than the field")
    _check_degree([p for row in jf.entries for p in row]
                  + list(e1.x + e1.xi + e2.x + e2.xi), max_degree)
    je1, je2 = jf.apply(e1), jf.apply(e2)
    big = 10 ** 6  # internal brackets are not degree-limited
    term = courant_bracket(je1, je2, big) - courant_bracket(e1, e2, big)
    mixed = courant_bracket(je1, e2, big) + courant_bracket(e1, je2, big)
    return term - jf.apply(mixed)


def graph_sections(omega: KForm) -> Tuple[PolySection, ...]:
    """Generators d/dx_i + (d/dx_i . omega) of the graph of a 2-form."""
    n = omega.nvars
    if omega.degree != 2:
        raise InvalidInput("graph sections need a 2-form")
    wb = _flat_poly(omega)
    out = []
    for i in range(n):
        x = tuple(Poly.const(1 if k == i else 0, n) for k in range(n))
        xi = tuple(wb[k][i] for k in range(n))
        out.append(PolySection(x, xi))
    return tuple(out)


@dataclass(frozen=True)
class InvolutivityResult:
    ok: bool
    witness_pair: Optional[Tuple[int, int]] = None
    witness_point: Optional[Tuple] = None

    def __bool__(self):
        return self.ok


def involutivity_sample_check(generators: Sequence[PolySection],
                              points: Sequence[Sequence],
                              max_degree: int = DEFAULT_MAX_DEGREE) -> InvolutivityResult:
    """Falsify closure under the bracket at sample points.

    At each point the generators must evaluate to independent vectors
    (otherwise the input is invalid); every pairwise bracket is evaluated
    there and tested for membership in the pointwise span.  A True result
    means "not falsified at these points", not a proof of involutivity.
    """
    if not generators:
        raise InvalidInput("need at least one generator")
    n = generators[0].nvars
    for g in generators:
        _check_degree(g.x + g.xi, max_degree)
    brackets = {}
    for a in range(len(generators)):
        for b in range(a + 1, len(generators)):
            brackets[(a, b)] = courant_bracket(generators[a], generators[b],
                                               max_degree)
    for point in points:
        values = [g.eval(point) for g in generators]
        span = Subspace.span(values, 2 * n)
        if span.dim != len(generators):
            raise InvalidInput(
                f"generators are dependent at sample point {tuple(point)}")
        for (a, b), s in brackets.items():
            if not span.contains(s.eval(point)):
                return InvolutivityResult(False, (a, b), tuple(point))
    return InvolutivityResult(True)
