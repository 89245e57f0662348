"""HTTP service exposing the command handlers.

Run with ``uvicorn diracreduce.service:app``.  Each endpoint accepts the
same ``diracreduce-v1`` document text the CLI consumes and returns the
machine report.  Mathematically negative outcomes (obstructed) are
successful computations and come back with HTTP 200; malformed documents
give HTTP 400 with the invalid-input report as payload.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from . import __version__
from .commands import run_command
from .reports import Report

app = FastAPI(
    title="diracreduce",
    version=__version__,
    description="Exact-arithmetic reduction of generalized complex structures",
)


class CommandRequest(BaseModel):
    model_config = ConfigDict(frozen=True)
    document: str
    seed: Optional[int] = None
    points: Optional[int] = None


def _respond(report: Report) -> JSONResponse:
    status = 400 if report.status == "invalid-input" else 200
    return JSONResponse(status_code=status, content=report.model_dump())


@app.get("/v1/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/v1/check", response_model=Report)
def check(request: CommandRequest):
    return _respond(run_command("check", request.document,
                                seed=request.seed, points=request.points))


@app.post("/v1/reduce", response_model=Report)
def reduce_endpoint(request: CommandRequest):
    return _respond(run_command("reduce", request.document,
                                seed=request.seed, points=request.points))


@app.post("/v1/gk-reduce", response_model=Report)
def gk_reduce_endpoint(request: CommandRequest):
    return _respond(run_command("gk-reduce", request.document,
                                seed=request.seed, points=request.points))


@app.post("/v1/bracket", response_model=Report)
def bracket(request: CommandRequest):
    return _respond(run_command("bracket", request.document,
                                seed=request.seed, points=request.points))


@app.post("/v1/sweep", response_model=Report)
def sweep(request: CommandRequest):
    return _respond(run_command("sweep", request.document,
                                seed=request.seed, points=request.points))
