"""The ``diracreduce-v1`` structured text format.

Every input file starts with the header line ``diracreduce-v1 <kind>``
where kind is one of ``datum``, ``gk-datum``, ``bracket`` or
``scenario``; a different version string is fatal.  The body is made of
``[section]`` blocks holding ``key = value`` lines; repeated keys
accumulate in order, ``#`` starts a comment.

Value syntaxes:
  * rationals            ``-3/2``
  * vectors              entries separated by spaces: ``1 0 -1/2``
  * matrices             rows separated by ``;``: ``0 1; -1 0``
  * polynomials          sparse monomial format: ``1 x1 x2 + -1/2 x3^2``
  * polynomial vectors   components separated by ``,``
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from gmpy2 import mpq

from .exactlin import InvalidInput, Matrix, Subspace, mat
from .gcs import GCStructure, b_transform
from .chart import JField, PolySection
from .kahler import GKPair, GKReductionDatum, GualtieriQuadruple, from_quadruple
from .poly import Poly, parse_poly
from .reduction import ReductionDatum
from .scenario import OrbitIdentification, Scenario

VERSION = "diracreduce-v1"
KINDS = ("datum", "gk-datum", "bracket", "scenario")


class ParseError(InvalidInput):
    """Malformed input document; message carries the line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


@dataclass
class Document:
    kind: str
    # section -> list of (key, value, line)
    sections: Dict[str, List[Tuple[str, str, int]]]

    def entries(self, section: str, key: str) -> List[Tuple[str, int]]:
        return [(v, ln) for k, v, ln in self.sections.get(section, []) if k == key]

    def single_entry(self, section: str, key: str) -> Tuple[str, int]:
        found = self.entries(section, key)
        if not found:
            raise ParseError(f"missing '{key}' in section [{section}]")
        if len(found) > 1:
            raise ParseError(f"duplicate '{key}' in section [{section}]",
                             found[1][1])
        return found[0]

    def single(self, section: str, key: str, required: bool = True) -> Optional[str]:
        if not required and not self.entries(section, key):
            return None
        return self.single_entry(section, key)[0]

    def has_section(self, name: str) -> bool:
        return name in self.sections


def parse_document(text: str) -> Document:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty document")
    header = lines[0].strip()
    parts = header.split()
    if len(parts) != 2 or parts[0] != VERSION:
        raise ParseError(
            f"header must be '{VERSION} <kind>', got {header!r}", 1)
    kind = parts[1]
    if kind not in KINDS:
        raise ParseError(f"unknown document kind {kind!r}", 1)
    sections: Dict[str, List[Tuple[str, str, int]]] = {}
    current: Optional[str] = None
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, [])
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", no)
        if current is None:
            raise ParseError("entry outside of any [section]", no)
        key, value = line.split("=", 1)
        sections[current].append((key.strip(), value.strip(), no))
    return Document(kind, sections)


# -- scalar-level parsers


def parse_rational(text: str, line: Optional[int] = None):
    try:
        return mpq(text.strip())
    except ValueError as exc:
        raise ParseError(f"malformed rational {text!r}", line) from exc


def parse_vector(text: str, line: Optional[int] = None) -> Tuple:
    return tuple(parse_rational(tok, line) for tok in text.split())


def parse_matrix(text: str, line: Optional[int] = None) -> Matrix:
    rows = [parse_vector(row, line) for row in text.split(";")]
    if len({len(r) for r in rows}) > 1:
        raise ParseError("matrix rows have unequal lengths", line)
    return mat(rows)


def parse_poly_vector(text: str, nvars: int, line: Optional[int] = None) -> Tuple[Poly, ...]:
    try:
        return tuple(parse_poly(tok, nvars) for tok in text.split(","))
    except InvalidInput as exc:
        raise ParseError(str(exc), line) from exc


def format_matrix(m: Matrix) -> str:
    return "; ".join(" ".join(str(x) for x in row) for row in m)


# -- structure block


def parse_structure(doc: Document, section: str, dim: Optional[int] = None) -> GCStructure:
    kind = doc.single(section, "kind")
    try:
        if kind == "symplectic":
            return GCStructure.from_symplectic(
                parse_matrix(doc.single(section, "omega")))
        if kind == "complex":
            return GCStructure.from_complex(parse_matrix(doc.single(section, "j")))
        if kind == "explicit":
            m = parse_matrix(doc.single(section, "matrix"))
            return GCStructure(len(m) // 2, m)
        if kind == "b_transform":
            base_kind = doc.single(section, "base")
            if base_kind == "symplectic":
                base = GCStructure.from_symplectic(
                    parse_matrix(doc.single(section, "omega")))
            elif base_kind == "complex":
                base = GCStructure.from_complex(parse_matrix(doc.single(section, "j")))
            elif base_kind == "explicit":
                m = parse_matrix(doc.single(section, "matrix"))
                base = GCStructure(len(m) // 2, m)
            else:
                raise ParseError(f"unknown base structure kind {base_kind!r}")
            return b_transform(base, parse_matrix(doc.single(section, "b")))
    except InvalidInput as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid structure in [{section}]: {exc}") from exc
    raise ParseError(f"unknown structure kind {kind!r} in [{section}]")


def parse_structure_field(doc: Document, section: str, dim: int) -> JField:
    rows = doc.entries(section, "row")
    if len(rows) != 2 * dim:
        raise ParseError(f"structure field needs {2 * dim} rows in [{section}]")
    entries = []
    for value, line in rows:
        entries.append(parse_poly_vector(value, dim, line))
    try:
        return JField(dim, entries)
    except InvalidInput as exc:
        raise ParseError(f"invalid structure field: {exc}") from exc


def parse_subspace(doc: Document, section: str, dim: int) -> Subspace:
    if not doc.has_section(section):
        raise ParseError(f"missing section [{section}]")
    rows = [parse_vector(v, ln) for v, ln in doc.entries(section, "row")]
    for r in rows:
        if len(r) != dim:
            raise ParseError(f"row of length {len(r)} in [{section}], expected {dim}")
    return Subspace.span(rows, dim)


def parse_quadruple(doc: Document, section: str = "quadruple") -> GualtieriQuadruple:
    try:
        return GualtieriQuadruple(
            parse_matrix(doc.single(section, "g")),
            parse_matrix(doc.single(section, "b")),
            parse_matrix(doc.single(section, "jplus")),
            parse_matrix(doc.single(section, "jminus")),
        )
    except InvalidInput as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid quadruple: {exc}") from exc


# -- document-level loaders


def load_datum(doc: Document) -> Tuple[ReductionDatum, Optional[Matrix]]:
    if doc.kind != "datum":
        raise ParseError(f"expected a datum document, got {doc.kind!r}")
    dim_text, dim_line = doc.single_entry("space", "dim")
    dim = int(parse_rational(dim_text, dim_line))
    j = parse_structure(doc, "J")
    if j.n != dim:
        raise ParseError("structure dimension does not match [space]")
    w0 = parse_subspace(doc, "w0", dim)
    f = parse_subspace(doc, "f", dim)
    metric = None
    if doc.has_section("metric"):
        metric = parse_matrix(doc.single("metric", "g"))
    try:
        return ReductionDatum(j, w0, f), metric
    except InvalidInput as exc:
        raise ParseError(f"invalid datum: {exc}") from exc


def load_gk_datum(doc: Document) -> GKReductionDatum:
    if doc.kind != "gk-datum":
        raise ParseError(f"expected a gk-datum document, got {doc.kind!r}")
    dim_text, dim_line = doc.single_entry("space", "dim")
    dim = int(parse_rational(dim_text, dim_line))
    if doc.has_section("quadruple"):
        pair = from_quadruple(parse_quadruple(doc))
    else:
        j1 = parse_structure(doc, "J1")
        j2 = parse_structure(doc, "J2")
        try:
            pair = GKPair(j1, j2)
        except InvalidInput as exc:
            raise ParseError(f"invalid pair: {exc}") from exc
    if pair.n != dim:
        raise ParseError("pair dimension does not match [space]")
    w0 = parse_subspace(doc, "w0", dim)
    f = parse_subspace(doc, "f", dim)
    try:
        return GKReductionDatum(pair, w0, f)
    except InvalidInput as exc:
        raise ParseError(f"invalid datum: {exc}") from exc


def load_bracket(doc: Document) -> Tuple[PolySection, PolySection]:
    if doc.kind != "bracket":
        raise ParseError(f"expected a bracket document, got {doc.kind!r}")
    dim_text, dim_line = doc.single_entry("chart", "dim")
    dim = int(parse_rational(dim_text, dim_line))
    sections = []
    for name in ("s1", "s2"):
        x = parse_poly_vector(doc.single(name, "x"), dim)
        xi = parse_poly_vector(doc.single(name, "xi"), dim)
        if len(x) != dim or len(xi) != dim:
            raise ParseError(f"section [{name}] needs {dim} components per part")
        sections.append(PolySection(x, xi))
    return sections[0], sections[1]


def load_scenario(doc: Document) -> Scenario:
    if doc.kind != "scenario":
        raise ParseError(f"expected a scenario document, got {doc.kind!r}")
    dim_text, dim_line = doc.single_entry("chart", "dim")
    dim = int(parse_rational(dim_text, dim_line))
    j_spec = None
    quadruple = None
    if doc.has_section("quadruple"):
        quadruple = parse_quadruple(doc)
    elif doc.has_section("J"):
        kind = doc.single("J", "kind")
        if kind == "field":
            j_spec = parse_structure_field(doc, "J", dim)
        else:
            j_spec = parse_structure(doc, "J")
    else:
        raise ParseError("scenario needs a [J] or [quadruple] section")
    generators = tuple(parse_poly_vector(v, dim, ln)
                       for v, ln in doc.entries("action", "generator"))
    for g in generators:
        if len(g) != dim:
            raise ParseError("generator component count does not match the chart")
    equations = []
    for v, ln in doc.entries("m0", "equation"):
        try:
            equations.append(parse_poly(v, dim))
        except InvalidInput as exc:
            raise ParseError(str(exc), ln) from exc
    points = tuple(parse_vector(v, ln) for v, ln in doc.entries("points", "point"))
    momentum = None
    if doc.has_section("momentum"):
        momentum = tuple(parse_poly(v, dim) for v, ln in doc.entries("momentum", "mu"))
    metric = None
    if doc.has_section("metric"):
        metric = parse_matrix(doc.single("metric", "g"))
    idents = []
    for v, ln in doc.entries("orbits", "identify"):
        head, _, matrix_part = v.partition(":")
        try:
            i, j = (int(tok) for tok in head.split())
        except ValueError as exc:
            raise ParseError("identification needs 'i j : matrix'", ln) from exc
        idents.append(OrbitIdentification(i, j, parse_matrix(matrix_part, ln)))
    try:
        return Scenario(dim=dim, j_spec=j_spec, action_generators=generators,
                        m0_equations=tuple(equations), sample_points=points,
                        momentum=momentum, metric=metric, quadruple=quadruple,
                        orbit_identifications=tuple(idents))
    except InvalidInput as exc:
        raise ParseError(f"invalid scenario: {exc}") from exc
