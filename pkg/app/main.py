"""
main.py — FastAPI entry point for the DAG multicut service.

Endpoints:
  GET  /health                 — health check
  POST /solve                  — upload a `p dagmc` instance, run the branching solver
  POST /oracle                 — brute-force lex-min answer for the same instance
  POST /verify                 — upload an instance and a solution file, check it
  POST /generate/{family}      — upload a `p graph` file, emit a clique or maxcut gadget
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv
from fastapi import FastAPI, File, HTTPException, Query, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, ValidationError

from app.errors import GuardError, MulticutError, ParseError, SolverInvariantError
from app.models.instance import DagInstance, WeightedArcInstance
from app.models.results import Answer, ShadowKind, ShadowStrategy, SolveTrace
from app.services.dag_core import check_multicut
from app.services.formats import parse_graph, parse_instance, parse_solution, render_solution, render_weighted
from app.services.gadgets import gen_clique_instance, gen_maxcut_skew_instance
from app.services.oracle import brute_solve, brute_solve_weighted_arcs
from app.services.solver import solve

load_dotenv(override=True)

# ── Logging ───────────────────────────────────────────────────────────────────
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)

# ── App ───────────────────────────────────────────────────────────────────────
app = FastAPI(
    title="DAG Multicut API",
    description=(
        "Exact vertex multicut in directed acyclic graphs. Upload an instance in "
        "the `p dagmc` text format and get a verified cut of at most p "
        "nonterminal vertices, or NO. `/oracle` returns the lexicographically "
        "minimal one by brute force. Also checks solutions and emits the "
        "weighted arc gadgets used for hardness experiments."
    ),
    version="1.0.0",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


# ── Request / Response Models ─────────────────────────────────────────────────
class SolveResponse(BaseModel):
    answer: Answer
    cut: list[int]
    complete: bool
    solution: str
    stats: Optional[SolveTrace] = None


class OracleResponse(BaseModel):
    answer: Answer
    cut: list[int]


class VerifyResponse(BaseModel):
    valid: bool
    reason: str = ""


# ── Helpers ───────────────────────────────────────────────────────────────────
async def _text(file: UploadFile) -> str:
    raw = await file.read()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        raise HTTPException(status_code=422, detail=f"{file.filename}: not UTF-8 text")


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, SolverInvariantError):
        logger.critical("Internal invariant failed: %s", exc)
        return HTTPException(status_code=500, detail=f"Internal invariant failed: {exc}")
    if isinstance(exc, GuardError):
        return HTTPException(status_code=413, detail=f"Size guard: {exc}")
    return HTTPException(status_code=422, detail=str(exc))


def _vertex_instance(text: str) -> DagInstance:
    instance = parse_instance(text)
    if not isinstance(instance, DagInstance):
        raise ParseError("expected a 'p dagmc' vertex instance")
    return instance


# ── Routes ────────────────────────────────────────────────────────────────────
@app.get("/health", tags=["System"])
def health():
    return {"status": "ok", "service": "dag-multicut"}


@app.post("/solve", response_model=SolveResponse, tags=["Solver"])
async def solve_instance(
    file: UploadFile = File(...),
    shadow: ShadowKind = Query(ShadowKind.EXHAUSTIVE),
    seed: int = Query(0, ge=0),
    rand_iters: Optional[int] = Query(None, ge=1),
    stats: bool = Query(False),
):
    """
    Run the branching solver on an uploaded instance.

    `shadow=random` is Monte-Carlo: a NO then comes back with `complete=false`.
    """
    text = await _text(file)
    try:
        instance = _vertex_instance(text)
        outcome = solve(instance, ShadowStrategy(kind=shadow, seed=seed, iterations=rand_iters), jobs=1)
    except (MulticutError, ValidationError) as exc:
        raise _http_error(exc)

    cut = outcome.cut.members if outcome.answer is Answer.YES else None
    logger.info("Solved %s: %s (%d nodes)", file.filename, outcome.answer.value, outcome.stats.nodes_expanded)
    return SolveResponse(
        answer=outcome.answer,
        cut=list(instance.sort_by_order(cut)) if cut else [],
        complete=outcome.complete,
        solution=render_solution(instance, cut),
        stats=outcome.stats if stats else None,
    )


@app.post("/oracle", tags=["Solver"])
async def oracle(file: UploadFile = File(...)):
    """Brute force. Vertex instances get the lex-min cut, weighted ones YES/NO only."""
    text = await _text(file)
    try:
        instance = parse_instance(text)
        if isinstance(instance, WeightedArcInstance):
            answer = Answer.YES if brute_solve_weighted_arcs(instance) else Answer.NO
            return OracleResponse(answer=answer, cut=[])
        cut = brute_solve(instance)
    except (MulticutError, ValidationError) as exc:
        raise _http_error(exc)
    if cut is None:
        return OracleResponse(answer=Answer.NO, cut=[])
    return OracleResponse(answer=Answer.YES, cut=list(instance.sort_by_order(cut.members)))


@app.post("/verify", response_model=VerifyResponse, tags=["Solver"])
async def verify_solution(instance: UploadFile = File(...), solution: UploadFile = File(...)):
    instance_text, solution_text = await _text(instance), await _text(solution)
    try:
        parsed = _vertex_instance(instance_text)
        cut = parse_solution(solution_text)
    except (MulticutError, ValidationError) as exc:
        raise _http_error(exc)

    if cut is None:
        return VerifyResponse(valid=False, reason="solution declares NO")
    if len(cut) > parsed.budget:
        return VerifyResponse(valid=False, reason=f"{len(cut)} vertices exceed budget {parsed.budget}")
    check = check_multicut(parsed, cut)
    return VerifyResponse(valid=check.ok, reason=check.reason)


@app.post("/generate/{family}", response_class=PlainTextResponse, tags=["Gadgets"])
async def generate(family: str, file: UploadFile = File(...), t: int = Query(..., ge=0)):
    """Weighted arc instance (`p dagmc-w`) for a clique or Max-Cut question on the uploaded graph."""
    if family not in ("clique", "maxcut"):
        raise HTTPException(status_code=404, detail=f"Unknown gadget family {family!r}.")
    text = await _text(file)
    try:
        graph = parse_graph(text)
        instance = gen_clique_instance(graph, t) if family == "clique" else gen_maxcut_skew_instance(graph, t)
    except (MulticutError, ValidationError) as exc:
        raise _http_error(exc)
    logger.info("Generated %s gadget: %d vertices, p=%d", family, len(instance.vertices), instance.budget)
    return render_weighted(instance)
