"""HTTP facade over the risk engine.

Endpoints mirror the CLI subcommands: /compute (rolling report), /check-ssd
(dominance test plus induced risk), /classify-profile, /optimize (the market
solvers), and /adjusted-es for direct evaluation of one position, empirical
or Gaussian.  Engine errors surface as a 422 with a stable envelope
``{"error": {"code", "detail", "exit_code"}}`` so thin clients can relay
them verbatim.
"""

from __future__ import annotations

import math
from typing import Optional

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .adjusted import adjusted_es, homogeneity_analysis
from .dominance import ssd_based_risk, ssd_dominates
from .errors import BadInput, ShortfallError
from .market import (
    MarketModel,
    solve_problem_a,
    solve_problem_b,
    solve_problem_c,
    solve_problem_d,
    solve_problem_e,
    spectral_from_dict,
    utility_from_dict,
)
from .profiles import classify, profile_from_dict
from .quantiles import GaussianLoss, empirical_from_samples
from .reports import ingest_text, render_report, rolling_report

app = FastAPI(title="shortfall", description="Adjusted expected-shortfall risk engine")


@app.exception_handler(ShortfallError)
async def _engine_error(request, exc: ShortfallError):
    return JSONResponse(
        status_code=422,
        content={"error": {"code": exc.code, "detail": str(exc), "exit_code": exc.exit_code}},
    )


@app.exception_handler(ValueError)
async def _value_error(request, exc: ValueError):
    return JSONResponse(
        status_code=422,
        content={"error": {"code": "BadInput", "detail": str(exc), "exit_code": 2}},
    )


@app.exception_handler(RequestValidationError)
async def _schema_error(request, exc: RequestValidationError):
    errors = exc.errors()
    if errors:
        loc = ".".join(str(part) for part in errors[0]["loc"] if part != "body")
        detail = f"{loc}: {errors[0]['msg']}" if loc else errors[0]["msg"]
    else:
        detail = "invalid request"
    return JSONResponse(
        status_code=422,
        content={"error": {"code": "ValidationError", "detail": detail, "exit_code": 2}},
    )


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


class ComputeRequest(BaseModel):
    csv: str
    mode: str = "losses"
    window: int = Field(ge=2)
    smooth: int = Field(default=0, ge=0)
    profile: dict
    atoms: Optional[int] = Field(default=None, ge=1)


class ComputeResponse(BaseModel):
    csv: str
    rows: int


@app.post("/compute")
def compute(req: ComputeRequest) -> ComputeResponse:
    series = ingest_text(req.csv, req.mode)
    g = profile_from_dict(req.profile)
    rows = rolling_report(series, g, window=req.window, smooth=req.smooth, atoms=req.atoms)
    return ComputeResponse(csv=render_report(rows), rows=len(rows))


class CheckSSDRequest(BaseModel):
    x_csv: str
    z_csv: str
    mode: str = "losses"
    tol: float = Field(default=1e-12, ge=0.0)


class CheckSSDResponse(BaseModel):
    dominates: bool
    risk: float


@app.post("/check-ssd")
def check_ssd(req: CheckSSDRequest) -> CheckSSDResponse:
    x = empirical_from_samples(ingest_text(req.x_csv, req.mode).values)
    z = empirical_from_samples(ingest_text(req.z_csv, req.mode).values)
    return CheckSSDResponse(
        dominates=ssd_dominates(x, z, tol=req.tol), risk=ssd_based_risk(x, z)
    )


class ClassifyRequest(BaseModel):
    profile: dict


class ClassifyResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    profile_class: str = Field(alias="class")
    homogeneous: bool
    p_star: Optional[float] = None


@app.post("/classify-profile")
def classify_profile(req: ClassifyRequest) -> ClassifyResponse:
    g = profile_from_dict(req.profile)
    hom = homogeneity_analysis(g)
    return ClassifyResponse(
        profile_class=classify(g).value,
        homogeneous=hom.homogeneous,
        p_star=hom.p_star,
    )


class OptimizeRequest(BaseModel):
    market: dict
    request: dict
    atoms: Optional[int] = Field(default=None, ge=1)


class OptimizeResponse(BaseModel):
    problem: str
    value: float
    payoff: list
    p: list
    q: list


_REQUEST_FIELDS = {"problem", "w", "x", "profile", "utility", "spectral"}
_PROBLEM_NEEDS = {
    "A": ("w", "x"),
    "B": ("w", "x"),
    "C": ("w", "x", "utility"),
    "D": ("w", "x", "utility"),
    "E": ("x", "spectral"),
}


def _required_number(spec, name, problem) -> float:
    if name not in spec:
        raise BadInput(f"request.{name}: field is required for problem {problem}")
    v = spec[name]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(float(v)):
        raise BadInput(f"request.{name}: must be a finite number")
    return float(v)


def _solve(market: MarketModel, spec: dict):
    """Dispatch one solver-request object; returns (problem, position, value)."""
    for key in spec:
        if key not in _REQUEST_FIELDS:
            raise BadInput(f"request.{key}: unknown field")
    problem = spec.get("problem")
    if not isinstance(problem, str) or problem.upper() not in _PROBLEM_NEEDS:
        raise BadInput("request.problem: must be one of A, B, C, D, E")
    problem = problem.upper()
    if "profile" not in spec:
        raise BadInput("request.profile: field is required")
    g = profile_from_dict(spec["profile"])
    needs = _PROBLEM_NEEDS[problem]
    args = {name: _required_number(spec, name, problem) for name in needs if name in ("w", "x")}
    if "utility" in needs:
        if "utility" not in spec:
            raise BadInput(f"request.utility: field is required for problem {problem}")
        u = utility_from_dict(spec["utility"])
    if "spectral" in needs:
        if "spectral" not in spec:
            raise BadInput(f"request.spectral: field is required for problem {problem}")
        s = spectral_from_dict(spec["spectral"])
    if problem == "A":
        pos, value = solve_problem_a(market, g, args["w"], args["x"])
    elif problem == "B":
        pos, value = solve_problem_b(market, g, args["w"], args["x"])
    elif problem == "C":
        pos, value = solve_problem_c(market, g, args["w"], args["x"], u)
    elif problem == "D":
        pos, value = solve_problem_d(market, g, args["w"], args["x"], u)
    else:
        pos, value = solve_problem_e(market, g, args["x"], s)
    return problem, pos, value


@app.post("/optimize")
def optimize(req: OptimizeRequest) -> OptimizeResponse:
    market = MarketModel.from_dict(req.market)
    problem, pos, value = _solve(market, req.request)
    return OptimizeResponse(
        problem=problem,
        value=value,
        payoff=list(pos.payoff),
        p=list(pos.market.p),
        q=list(pos.market.q),
    )


class GaussianSpec(BaseModel):
    mu: float
    sigma: float = Field(ge=0.0)


class AdjustedESRequest(BaseModel):
    values: Optional[list] = None
    weights: Optional[list] = None
    gaussian: Optional[GaussianSpec] = None
    profile: dict
    atoms: Optional[int] = Field(default=None, ge=1)
    tol: float = Field(default=1e-12, ge=0.0)


class AdjustedESResponse(BaseModel):
    value: float
    argmax_p: float
    finite: bool
    discretized: bool
    acceptable: bool


@app.post("/adjusted-es")
def adjusted_es_endpoint(req: AdjustedESRequest) -> AdjustedESResponse:
    if (req.values is None) == (req.gaussian is None):
        raise BadInput("values: provide exactly one of 'values' or 'gaussian'")
    if req.gaussian is not None:
        if req.weights is not None:
            raise BadInput("weights: only valid together with 'values'")
        dist = GaussianLoss(req.gaussian.mu, req.gaussian.sigma)
    else:
        dist = empirical_from_samples(req.values, weights=req.weights)
    g = profile_from_dict(req.profile)
    res = adjusted_es(dist, g, atoms=req.atoms)
    return AdjustedESResponse(
        value=res.value,
        argmax_p=res.argmax_p,
        finite=res.finite,
        discretized=res.discretized,
        acceptable=res.value <= req.tol,
    )
