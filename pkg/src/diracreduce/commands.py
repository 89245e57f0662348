"""Command handlers shared by the CLI and the HTTP service.

Each handler takes the raw document text and returns a finished
:class:`~diracreduce.reports.Report`.  Exit semantics: ``ok`` maps to
exit code 0, ``obstructed`` (a mathematically valid negative outcome) to
2, ``invalid-input`` to 1.
"""

from __future__ import annotations

import hashlib
import random
from typing import Optional

from .chart import DegreeLimitError, courant_bracket
from .exactlin import InvalidInput
from .fileio import (
    load_bracket,
    load_datum,
    load_gk_datum,
    load_scenario,
    parse_document,
)
from .kahler import GKReductionObstructed, gk_check, gk_reduce
from .reduction import ReductionObstructed, check_conditions, reduce
from .reports import (
    BracketResult,
    CheckResult,
    GKReduceResult,
    OptionsModel,
    OrbitCheckModel,
    Report,
    ReduceResult,
    SectionModel,
    SweepPointModel,
    SweepResultModel,
    WitnessModel,
    scalar_rows,
    scalar_vector,
)
from .scenario import Scenario, sweep as run_sweep

EXIT_CODES = {"ok": 0, "obstructed": 2, "invalid-input": 1}

COMMANDS = ("check", "reduce", "gk-reduce", "bracket", "sweep")


def input_digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def run_command(command: str, text: str, seed: Optional[int] = None,
                points: Optional[int] = None) -> Report:
    """Dispatch a command over a document; never raises on bad input."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    opts = OptionsModel(seed=seed, points=points)
    digest = input_digest(text)

    def invalid(message: str) -> Report:
        return Report(command=command, input_digest=digest, options=opts,
                      status="invalid-input", error=message)

    try:
        doc = parse_document(text)
        if command == "check":
            datum, _ = load_datum(doc)
            report = check_conditions(datum)
            status = "ok" if report.all_hold else "obstructed"
            return Report(command=command, input_digest=digest, options=opts,
                          status=status,
                          result=CheckResult.from_report(datum.n, report).model_dump())
        if command == "reduce":
            datum, _ = load_datum(doc)
            try:
                reduced = reduce(datum)
                result = ReduceResult.from_outcome(datum.n,
                                                   check_conditions(datum), reduced)
                return Report(command=command, input_digest=digest, options=opts,
                              status="ok", result=result.model_dump())
            except ReductionObstructed as exc:
                result = ReduceResult.from_outcome(datum.n, exc.report, None)
                return Report(command=command, input_digest=digest, options=opts,
                              status="obstructed", result=result.model_dump())
        if command == "gk-reduce":
            gk_datum = load_gk_datum(doc)
            report = gk_check(gk_datum)
            try:
                reduced = gk_reduce(gk_datum)
                result = GKReduceResult.from_outcome(
                    gk_datum.n, reduced.reduced_dim, report, reduced)
                return Report(command=command, input_digest=digest, options=opts,
                              status="ok", result=result.model_dump())
            except GKReductionObstructed:
                result = GKReduceResult.from_outcome(
                    gk_datum.n, gk_datum.w0.dim - gk_datum.f.dim, report, None)
                return Report(command=command, input_digest=digest, options=opts,
                              status="obstructed", result=result.model_dump())
        if command == "bracket":
            s1, s2 = load_bracket(doc)
            out = courant_bracket(s1, s2)
            result = BracketResult(
                dim=s1.nvars,
                section=SectionModel(x=[str(p) for p in out.x],
                                     xi=[str(p) for p in out.xi]))
            return Report(command=command, input_digest=digest, options=opts,
                          status="ok", result=result.model_dump())
        # sweep
        scenario = load_scenario(doc)
        scenario = _select_points(scenario, seed, points)
        outcome = run_sweep(scenario)
        point_models = []
        for o in outcome.outcomes:
            fields = dict(point=scalar_vector(o.point), status=o.status,
                          error=o.error)
            if o.report is not None:
                fields["conditions"] = list(o.report.conditions)
                fields["witnesses"] = [
                    WitnessModel(condition=k, vector=scalar_vector(v))
                    for k, v in sorted(o.report.witnesses.items())]
                fields["reduced_dim"] = o.report.reduced_dim
            if o.reduced is not None:
                fields["j_g"] = scalar_rows(o.reduced.j_g.matrix)
                fields["classification"] = o.classification
            if o.gk_report is not None:
                fields["quad_dim"] = o.gk_report.quad_intersection_dim
                fields["surjective"] = o.gk_report.pi_surjective_on_quad
                fields["phi_dims"] = list(o.gk_report.phi_dims)
                fields["direct"] = o.gk_report.sum_is_direct
            if o.gk_reduced is not None:
                fields["classification"] = o.classification
                fields["reduced_dim"] = o.gk_reduced.reduced_dim
            point_models.append(SweepPointModel(**fields))
        result = SweepResultModel(
            dim=scenario.dim,
            points=point_models,
            orbit_checks=[OrbitCheckModel(source=c.source_index,
                                          target=c.target_index,
                                          consistent=c.consistent)
                          for c in outcome.orbit_checks])
        status = "ok" if outcome.all_ok else "obstructed"
        return Report(command=command, input_digest=digest, options=opts,
                      status=status, result=result.model_dump())
    except DegreeLimitError as exc:
        return invalid(f"degree limit: {exc}")
    except InvalidInput as exc:
        return invalid(str(exc))


def _select_points(scenario: Scenario, seed: Optional[int],
                   points: Optional[int]) -> Scenario:
    """Deterministic sample-point selection for ``--points``/``--seed``.

    Without a seed the first k points are kept; with one, a seeded sample
    is drawn.  Orbit identifications between surviving points are kept and
    reindexed.
    """
    if points is None or points >= len(scenario.sample_points):
        return scenario
    indices = list(range(len(scenario.sample_points)))
    if seed is not None:
        indices = sorted(random.Random(seed).sample(indices, points))
    else:
        indices = indices[:points]
    index_map = {old: new for new, old in enumerate(indices)}
    idents = tuple(
        type(i)(index_map[i.source_index], index_map[i.target_index], i.matrix)
        for i in scenario.orbit_identifications
        if i.source_index in index_map and i.target_index in index_map)
    return Scenario(
        dim=scenario.dim, j_spec=scenario.j_spec,
        action_generators=scenario.action_generators,
        m0_equations=scenario.m0_equations,
        sample_points=tuple(scenario.sample_points[i] for i in indices),
        momentum=scenario.momentum, metric=scenario.metric,
        quadruple=scenario.quadruple, orbit_identifications=idents)
