"""HTTP face of the laboratory.

Thin pydantic wrappers around the core modules; every response body is
one of the shared artifact documents, numerics as strings.  The service
holds no state and reads no files: varieties and fans arrive inline or
as corpus names, profiles and twists as sample arrays.  Domain errors
surface as 422 with the same error document the CLI prints.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__, artifacts, corpus
from . import curvlab as cv
from . import functionals as fn
from . import intersect as ix
from . import solver, toric
from .errors import ClassMismatch, KahlerLabError
from .radial import Grid, KahlerProfile

app = FastAPI(title="kahlerlab", version=__version__)


@app.exception_handler(KahlerLabError)
async def _domain_error(request, exc: KahlerLabError):
    return JSONResponse(status_code=422, content=artifacts.error_doc(exc))


def _fan_of(spec):
    if isinstance(spec, str):
        return corpus.load_fan(spec)
    return toric.fan_from_dict(spec)

def _data_of(spec):
    if isinstance(spec, str):
        return corpus.load_intersection(spec), spec
    if "rays" in spec:
        return toric.build_intersection_data(toric.fan_from_dict(spec)), "inline"
    return ix.data_from_dict(spec), "inline"


class IntersectRequest(BaseModel):
    variety: str | dict
    pairing: list[str] | None = None


class ToricRequest(BaseModel):
    fan: str | dict
    emit_intersection: bool = False


class DeltaRequest(BaseModel):
    fan: str | dict
    k: int


class EnergyRequest(BaseModel):
    n: int
    eps: float = 0.0
    phi: list[float]
    T: float = 12.0


class SolveRequest(BaseModel):
    n: int
    eps_grid: list[float] = Field(
        default_factory=lambda: list(solver.DEFAULT_EPS_GRID)
    )
    tol: float = 1.0e-8
    max_iter: int = 60
    theta: list[float] | None = None
    include_profiles: bool = False


class FrameRequest(BaseModel):
    model: dict
    point: list[float]


class ChenOgiueRequest(BaseModel):
    model: dict
    variety: str | dict
    labels: list[str] | None = None


class HymRequest(BaseModel):
    model: dict
    a: float | str = "canonical"


class ReportRequest(BaseModel):
    variety: str | dict


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/intersect")
def intersect(req: IntersectRequest):
    data, spec = _data_of(req.variety)
    pairing = tuple(req.pairing) if req.pairing else None
    return artifacts.intersect_doc(data, spec, pairing=pairing)


@app.post("/toric")
def toric_endpoint(req: ToricRequest):
    fan = _fan_of(req.fan)
    data = toric.build_intersection_data(fan)
    if req.emit_intersection:
        return ix.data_to_dict(data)
    return artifacts.toric_summary_doc(fan, data)


@app.post("/delta")
def delta(req: DeltaRequest):
    poly = toric.anticanonical_polytope(_fan_of(req.fan))
    return toric.delta_report_dict(poly, req.k)


@app.post("/energy")
def energy(req: EnergyRequest):
    try:
        grid = Grid(T=req.T, nodes=len(req.phi) - 1)
        profile = KahlerProfile(req.n, req.eps, grid, req.phi)
    except KahlerLabError:
        raise
    except ValueError as exc:
        raise ClassMismatch(str(exc))
    return fn.report_to_dict(fn.energy_report(profile))


@app.post("/solve-tke")
def solve_tke(req: SolveRequest):
    grid = Grid()
    eps_grid = tuple(req.eps_grid)
    if not eps_grid or any(b >= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ClassMismatch("eps_grid must be nonempty and strictly decreasing")
    if req.theta is None:
        builder, spec = solver.canonical_twist, "canonical"
    else:
        builder = solver.potential_twist_builder(grid, req.theta)
        spec = "potential"
    results = solver.continuation_solve(
        req.n,
        eps_grid,
        theta_builder=builder,
        grid=grid,
        newton_tol=req.tol,
        max_iter=req.max_iter,
    )
    config = solver.SolveConfig(
        n=req.n,
        eps=eps_grid[0],
        theta=builder(grid, eps_grid[0]),
        newton_tol=req.tol,
        max_iter=req.max_iter,
        grid=grid,
    )
    doc = artifacts.tke_run_doc(config, eps_grid, results, spec, [""] * len(results))
    profiles = None
    if req.include_profiles:
        profiles = [[repr(float(v)) for v in r.profile.phi] for r in results]
    return {"run": doc, "profiles": profiles}


@app.post("/curvlab/frame")
def curvlab_frame(req: FrameRequest):
    model = cv.model_from_dict(req.model)
    return cv.frame_to_dict(cv.curvature_tensors(model, tuple(req.point)))


@app.post("/curvlab/chen-ogiue")
def curvlab_chen_ogiue(req: ChenOgiueRequest):
    model = cv.model_from_dict(req.model)
    data, _ = _data_of(req.variety)
    labels = tuple(req.labels) if req.labels else None
    return artifacts.chen_ogiue_doc(cv.chen_ogiue_check(model, data, labels=labels))


@app.post("/curvlab/hym")
def curvlab_hym(req: HymRequest):
    model = cv.model_from_dict(req.model)
    a = cv.HYM_CANONICAL if req.a == "canonical" else float(req.a)
    return artifacts.hym_doc(cv.hym_residual(model, a))


@app.post("/report")
def report(req: ReportRequest):
    data, spec = _data_of(req.variety)
    return artifacts.variety_report_doc(data, spec)
