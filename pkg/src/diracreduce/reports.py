"""Report models shared by the CLI and the HTTP service.

The machine format is the JSON dump of :class:`Report`; field order is
fixed by the model declarations and no timestamps are included, so equal
inputs produce byte-identical reports.
"""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict

from .exactlin import format_scalar
from .kahler import GKConditionReport, ReducedGKPair
from .reduction import ConditionReport, ReducedGCS, classify

SCHEMA = "diracreduce-v1"

Status = Literal["ok", "obstructed", "invalid-input"]


def scalar_rows(matrix) -> List[List[str]]:
    return [[format_scalar(x) for x in row] for row in matrix]


def scalar_vector(vec) -> List[str]:
    return [format_scalar(x) for x in vec]


class WitnessModel(BaseModel):
    model_config = ConfigDict(frozen=True)
    condition: int
    vector: List[str]


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)
    dim: int
    conditions: List[bool]
    witnesses: List[WitnessModel]
    reduced_dim: int

    @classmethod
    def from_report(cls, dim: int, report: ConditionReport) -> "CheckResult":
        return cls(
            dim=dim,
            conditions=list(report.conditions),
            witnesses=[WitnessModel(condition=k, vector=scalar_vector(v))
                       for k, v in sorted(report.witnesses.items())],
            reduced_dim=report.reduced_dim,
        )


class ReduceResult(BaseModel):
    model_config = ConfigDict(frozen=True)
    dim: int
    conditions: List[bool]
    witnesses: List[WitnessModel]
    reduced_dim: int
    j_g: Optional[List[List[str]]] = None
    classification: Optional[str] = None

    @classmethod
    def from_outcome(cls, dim: int, report: ConditionReport,
                     reduced: Optional[ReducedGCS]) -> "ReduceResult":
        base = CheckResult.from_report(dim, report)
        return cls(
            dim=base.dim, conditions=base.conditions, witnesses=base.witnesses,
            reduced_dim=base.reduced_dim,
            j_g=scalar_rows(reduced.j_g.matrix) if reduced else None,
            classification=classify(reduced) if reduced else None,
        )


class GKReduceResult(BaseModel):
    model_config = ConfigDict(frozen=True)
    dim: int
    reduced_dim: int
    quad_dim: int
    surjective: bool
    phi_dims: List[int]
    direct: bool
    missing: Optional[List[str]] = None
    j1_g: Optional[List[List[str]]] = None
    j2_g: Optional[List[List[str]]] = None
    classifications: Optional[List[str]] = None

    @classmethod
    def from_outcome(cls, dim: int, reduced_dim: int, report: GKConditionReport,
                     reduced: Optional[ReducedGKPair]) -> "GKReduceResult":
        labels = None
        if reduced is not None:
            labels = [classify(ReducedGCS(reduced.reduced_dim, j))
                      for j in (reduced.pair.j1, reduced.pair.j2)]
        return cls(
            dim=dim,
            reduced_dim=reduced_dim,
            quad_dim=report.quad_intersection_dim,
            surjective=report.pi_surjective_on_quad,
            phi_dims=list(report.phi_dims),
            direct=report.sum_is_direct,
            missing=scalar_vector(report.missing) if report.missing else None,
            j1_g=scalar_rows(reduced.pair.j1.matrix) if reduced else None,
            j2_g=scalar_rows(reduced.pair.j2.matrix) if reduced else None,
            classifications=labels,
        )


class SectionModel(BaseModel):
    model_config = ConfigDict(frozen=True)
    x: List[str]
    xi: List[str]


class BracketResult(BaseModel):
    model_config = ConfigDict(frozen=True)
    dim: int
    section: SectionModel


class SweepPointModel(BaseModel):
    model_config = ConfigDict(frozen=True)
    point: List[str]
    status: Status
    error: Optional[str] = None
    conditions: Optional[List[bool]] = None
    witnesses: Optional[List[WitnessModel]] = None
    reduced_dim: Optional[int] = None
    j_g: Optional[List[List[str]]] = None
    classification: Optional[str] = None
    quad_dim: Optional[int] = None
    surjective: Optional[bool] = None
    phi_dims: Optional[List[int]] = None
    direct: Optional[bool] = None


class OrbitCheckModel(BaseModel):
    model_config = ConfigDict(frozen=True)
    source: int
    target: int
    consistent: bool


class SweepResultModel(BaseModel):
    model_config = ConfigDict(frozen=True)
    dim: int
    points: List[SweepPointModel]
    orbit_checks: List[OrbitCheckModel]


class OptionsModel(BaseModel):
    model_config = ConfigDict(frozen=True)
    seed: Optional[int] = None
    points: Optional[int] = None


class Report(BaseModel):
    model_config = ConfigDict(frozen=True)
    schema_version: str = SCHEMA
    command: str
    input_digest: str
    options: OptionsModel = OptionsModel()
    status: Status
    result: Optional[dict] = None
    error: Optional[str] = None

    def machine_text(self) -> str:
        return self.model_dump_json(indent=2) + "\n"


# -- human-readable rendering


def _render_conditions(lines: List[str], conditions, witnesses):
    flags = "".join("1" if c else "0" for c in conditions)
    lines.append(f"conditions: {flags}")
    for w in witnesses or []:
        vec = ", ".join(w["vector"] if isinstance(w, dict) else w.vector)
        k = w["condition"] if isinstance(w, dict) else w.condition
        lines.append(f"witness[{k}]: {vec}")


def text_report(report: Report) -> str:
    """Deterministic plain-text rendering of a report."""
    lines = [f"{report.schema_version} report",
             f"command: {report.command}",
             f"input: {report.input_digest}",
             f"status: {report.status}"]
    if report.options.seed is not None:
        lines.append(f"seed: {report.options.seed}")
    if report.options.points is not None:
        lines.append(f"points: {report.options.points}")
    if report.error:
        lines.append(f"error: {report.error}")
    r = report.result or {}
    if report.command in ("check", "reduce") and r:
        lines.append(f"dim: {r['dim']}  reduced_dim: {r['reduced_dim']}")
        _render_conditions(lines, r["conditions"], r.get("witnesses"))
        if r.get("classification"):
            lines.append(f"classification: {r['classification']}")
        if r.get("j_g") is not None:
            lines.append("j_g:")
            for row in r["j_g"]:
                lines.append("  " + " ".join(row))
    elif report.command == "gk-reduce" and r:
        lines.append(f"dim: {r['dim']}  reduced_dim: {r['reduced_dim']}")
        lines.append(f"quad_dim: {r['quad_dim']}  surjective: {r['surjective']}"
                     f"  direct: {r['direct']}")
        lines.append("phi_dims: " + " ".join(str(d) for d in r["phi_dims"]))
        if r.get("missing"):
            lines.append("missing: " + ", ".join(r["missing"]))
        if r.get("classifications"):
            lines.append("classifications: " + ", ".join(r["classifications"]))
        for name in ("j1_g", "j2_g"):
            if r.get(name) is not None:
                lines.append(f"{name}:")
                for row in r[name]:
                    lines.append("  " + " ".join(row))
    elif report.command == "bracket" and r:
        lines.append(f"dim: {r['dim']}")
        lines.append("x:  " + " | ".join(r["section"]["x"]))
        lines.append("xi: " + " | ".join(r["section"]["xi"]))
    elif report.command == "sweep" and r:
        lines.append(f"dim: {r['dim']}")
        for p in r["points"]:
            head = f"point ({', '.join(p['point'])}): {p['status']}"
            if p.get("classification"):
                head += f" [{p['classification']}]"
            lines.append(head)
            if p.get("conditions") is not None:
                _render_conditions(lines, p["conditions"], p.get("witnesses"))
            if p.get("error"):
                lines.append(f"  error: {p['error']}")
        for c in r.get("orbit_checks", []):
            lines.append(f"orbit {c['source']} ~ {c['target']}: "
                         f"{'consistent' if c['consistent'] else 'inconsistent'}")
    return "\n".join(lines) + "\n"
