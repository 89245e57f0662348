"""Sparse multivariate polynomials with exact rational coefficients.

Terms are kept in a canonical order (total degree descending, then
exponent tuple descending), so equal polynomials have identical string
forms.  The serialization is the sparse monomial format
``"coeff x1^a1 x2^a2 ..."`` with terms joined by ``" + "``.
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, Sequence, Tuple

from gmpy2 import mpq

from .exactlin import InvalidInput

Exponents = Tuple[int, ...]


def _term_key(exps: Exponents):
    return (sum(exps), exps)


class Poly:
    """Immutable sparse polynomial in x1..xn over the rationals."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Exponents, object] | Iterable = ()):
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        clean = {}
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise InvalidInput("malformed exponent tuple")
            c = mpq(coeff)
            if c:
                clean[exps] = clean.get(exps, mpq(0)) + c
        ordered = tuple(sorted(((e, c) for e, c in clean.items() if c),
                               key=lambda item: _term_key(item[0]), reverse=True))
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", ordered)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, value, nvars: int) -> "Poly":
        return cls(nvars, {(0,) * nvars: mpq(value)})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Poly":
        """x_{index+1} as a polynomial (0-based index)."""
        if not 0 <= index < nvars:
            raise InvalidInput("variable index out of range")
        exps = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, {exps: mpq(1)})

    # -- structure

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e, _ in self.terms)

    def constant_value(self):
        for e, c in self.terms:
            if sum(e) == 0:
                return c
        return mpq(0)

    def total_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if self.is_constant():
            return self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, self.terms))

    def __bool__(self):
        return bool(self.terms)

    # -- arithmetic

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise InvalidInput("polynomials use different charts")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        self._check(other)
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc.get(e, mpq(0)) + c
        return Poly(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.nvars, {e: c * mpq(other) for e, c in self.terms})
        self._check(other)
        acc: Dict[Exponents, object] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, mpq(0)) + c1 * c2
        return Poly(self.nvars, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InvalidInput("negative polynomial powers are not defined")
        out = Poly.const(1, self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, index: int) -> "Poly":
        """Partial derivative with respect to x_{index+1}."""
        acc = {}
        for e, c in self.terms:
            if e[index]:
                new = list(e)
                new[index] -= 1
                acc[tuple(new)] = c * e[index]
        return Poly(self.nvars, acc)

    def eval(self, point: Sequence):
        pt = [mpq(x) for x in point]
        if len(pt) != self.nvars:
            raise InvalidInput("evaluation point has wrong length")
        total = mpq(0)
        for e, c in self.terms:
            term = c
            for x, k in zip(pt, e):
                for _ in range(k):
                    term = term * x
            total += term
        return total

    def compose(self, args: Sequence["Poly"]) -> "Poly":
        """Substitute args[i] for x_{i+1}."""
        if len(args) != self.nvars:
            raise InvalidInput("composition needs one polynomial per variable")
        if not args:
            return Poly(0, dict(self.terms))
        nv = args[0].nvars
        out = Poly.zero(nv)
        for e, c in self.terms:
            term = Poly.const(c, nv)
            for g, k in zip(args, e):
                term = term * (g ** k)
            out = out + term
        return out

    # -- serialization

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            factors = [str(c)]
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(f"x{i + 1}")
                elif k > 1:
                    factors.append(f"x{i + 1}^{k}")
            parts.append(" ".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self.nvars}, {str(self)!r})"


_TERM_VAR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, nvars: int) -> Poly:
    """Inverse of ``str(poly)``; accepts the canonical sparse format."""
    s = text.strip()
    if s in ("", "0"):
        return Poly.zero(nvars)
    acc: Dict[Exponents, object] = {}
    for raw in s.split("+"):
        term = raw.strip()
        if not term:
            raise InvalidInput(f"empty term in polynomial {text!r}")
        pieces = term.split()
        first = pieces[0]
        if _TERM_VAR.match(first):
            coeff = mpq(1)
            vars_part = pieces
        else:
            try:
                coeff = mpq(first)
            except ValueError as exc:
                raise InvalidInput(f"malformed coefficient {first!r}") from exc
            vars_part = pieces[1:]
        exps = [0] * nvars
        for token in vars_part:
            m = _TERM_VAR.match(token)
            if not m:
                raise InvalidInput(f"malformed monomial token {token!r}")
            idx = int(m.group(1)) - 1
            if not 0 <= idx < nvars:
                raise InvalidInput(f"variable x{idx + 1} outside the chart")
            exps[idx] += int(m.group(2) or 1)
        key = tuple(exps)
        acc[key] = acc.get(key, mpq(0)) + coeff
    return Poly(nvars, acc)
