"""HTTP service wrapping the core package.

Problems travel as the same JSON documents the CLI reads and writes; the
pydantic models type the envelopes around them. Run with
``planforge serve`` or ``uvicorn planforge.service:app``.
"""
from __future__ import annotations

from typing import Any, Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import formats
from .compilers.arrays import UndefinednessMode
from .errors import PlanforgeError, SearchLimitExceeded
from .pddl import export as pddl_export
from .pddl_lint import lint as pddl_lint
from .pipeline import compile as pipeline_compile, map_plan_back
from .search import SearchStats, solve as search_solve, validate as search_validate

Mode = Literal["restrictive", "permissive"]


class CompileRequest(BaseModel):
    problem: dict[str, Any]
    mode: Mode = "restrictive"
    emit_intermediates: bool = False


class CompileResponse(BaseModel):
    problem: dict[str, Any]
    passes: list[str]
    notes: list[str]
    snapshots: dict[str, dict[str, Any]] = Field(default_factory=dict)


class SolveRequest(BaseModel):
    problem: dict[str, Any]
    mode: Mode = "restrictive"
    strategy: Literal["breadth_first", "astar_goalcount"] = "breadth_first"
    max_nodes: Optional[int] = None
    max_seconds: Optional[float] = None


class SolveResponse(BaseModel):
    plan: Optional[dict[str, Any]]
    plan_text: Optional[str]
    expanded: int
    generated: int
    seconds: float


class ValidateRequest(BaseModel):
    problem: dict[str, Any]
    plan: dict[str, Any]
    mode: Mode = "restrictive"


class ValidateResponse(BaseModel):
    valid: bool
    failed_step: Optional[int]
    reason: Optional[str]
    notes: list[str]


class ExportRequest(BaseModel):
    problem: dict[str, Any]
    mode: Mode = "restrictive"


class ExportResponse(BaseModel):
    domain: str
    problem: str
    lint_errors: list[str]


class GenerateRequest(BaseModel):
    generator: Literal["plotting", "rushhour", "npuzzle"]
    params: dict[str, Any] = Field(default_factory=dict)


class GenerateResponse(BaseModel):
    problem: dict[str, Any]


app = FastAPI(
    title="planforge",
    description="Compile, solve, validate, and export planning problems with "
                "array fluents, Count expressions, and integer action parameters.",
)


def _problem(payload: dict[str, Any]):
    try:
        return formats.problem_from_dict(payload)
    except PlanforgeError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _guard(fn):
    try:
        return fn()
    except SearchLimitExceeded as exc:
        raise HTTPException(status_code=408, detail=str(exc)) from exc
    except PlanforgeError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok"}


@app.post("/compile", response_model=CompileResponse)
def compile_problem(request: CompileRequest) -> CompileResponse:
    problem = _problem(request.problem)
    result = _guard(lambda: pipeline_compile(problem, UndefinednessMode(request.mode)))
    snapshots = {}
    if request.emit_intermediates:
        snapshots = {name: formats.problem_to_dict(snap)
                     for name, snap in result.snapshots}
    return CompileResponse(problem=formats.problem_to_dict(result.compiled),
                           passes=result.passes, notes=result.notes,
                           snapshots=snapshots)


@app.post("/solve", response_model=SolveResponse)
def solve_problem(request: SolveRequest) -> SolveResponse:
    problem = _problem(request.problem)

    def run():
        result = pipeline_compile(problem, UndefinednessMode(request.mode))
        stats = SearchStats()
        plan = search_solve(result.compiled, strategy=request.strategy,
                            max_nodes=request.max_nodes,
                            max_seconds=request.max_seconds, stats=stats)
        return result, plan, stats

    result, plan, stats = _guard(run)
    if plan is None:
        return SolveResponse(plan=None, plan_text=None, expanded=stats.expanded,
                             generated=stats.generated, seconds=stats.seconds)
    source_plan = map_plan_back(result, plan)
    return SolveResponse(plan=formats.plan_to_dict(source_plan),
                         plan_text=formats.format_plan_text(source_plan),
                         expanded=stats.expanded, generated=stats.generated,
                         seconds=stats.seconds)


@app.post("/validate", response_model=ValidateResponse)
def validate_plan(request: ValidateRequest) -> ValidateResponse:
    problem = _problem(request.problem)
    plan = _guard(lambda: formats.plan_from_dict(request.plan))
    report = _guard(lambda: search_validate(problem, plan, request.mode))
    return ValidateResponse(valid=report.valid, failed_step=report.failed_step,
                            reason=report.reason, notes=report.notes)


@app.post("/export", response_model=ExportResponse)
def export_problem(request: ExportRequest) -> ExportResponse:
    problem = _problem(request.problem)

    def run():
        result = pipeline_compile(problem, UndefinednessMode(request.mode))
        return pddl_export(result.compiled)

    domain_text, problem_text = _guard(run)
    return ExportResponse(domain=domain_text, problem=problem_text,
                          lint_errors=pddl_lint(domain_text, problem_text))


@app.post("/generate", response_model=GenerateResponse)
def generate_problem(request: GenerateRequest) -> GenerateResponse:
    from .cli import _generate

    spec = {"generator": request.generator, **request.params}
    problem = _guard(lambda: _generate(spec))
    return GenerateResponse(problem=formats.problem_to_dict(problem))
