"""FastAPI application: POST /balls, /train, /bench plus GET /health.

Every failure becomes a machine-readable record {"error": {"type", "message"}}
so clients (the bundled CLI included) can relay it verbatim.
"""

from __future__ import annotations

import math
from dataclasses import asdict

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__, bench, pipeline
from . import schemas

def _error_response(status: int, exc: BaseException) -> JSONResponse:
    body = schemas.ErrorResponse(
        error=schemas.ErrorBody(type=type(exc).__name__, message=str(exc)))
    return JSONResponse(status_code=status, content=body.model_dump())


def _clean(value: float) -> float | None:
    return None if math.isnan(value) else value


def create_app() -> FastAPI:
    app = FastAPI(title="gbfsvm", version=__version__,
                  description="Granular-ball fuzzy SVM as a service")

    @app.exception_handler(RequestValidationError)
    async def on_validation(request: Request, exc: RequestValidationError):
        return _error_response(422, exc)

    # every domain error in the package subclasses ValueError; solver errors
    # (SolverFailure, DegenerateSolution) subclass RuntimeError
    @app.exception_handler(ValueError)
    @app.exception_handler(OSError)
    async def on_client_error(request: Request, exc: Exception):
        return _error_response(400, exc)

    @app.exception_handler(RuntimeError)
    async def on_solver_error(request: Request, exc: Exception):
        return _error_response(500, exc)

    @app.get("/health", response_model=schemas.HealthResponse)
    async def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/balls", response_model=schemas.BallsResponse)
    async def balls(req: schemas.BallsRequest):
        return pipeline.make_balls(
            req.dataset, label_column=req.label_column, purity=req.purity,
            radius_mode=req.radius_mode, epsilon=req.epsilon,
            membership_mode=req.membership_mode, normalize=req.normalize,
            noise=req.noise, seed=req.seed)

    @app.post("/train", response_model=schemas.TrainResponse)
    async def train(req: schemas.TrainRequest):
        return pipeline.train_model(
            req.dataset, model=req.model, C=req.C, purity=req.purity, lam=req.lam,
            noise=req.noise, test_fraction=req.test_fraction, runs=req.runs,
            seed=req.seed, radius_mode=req.radius_mode, epsilon=req.epsilon,
            membership_mode=req.membership_mode, normalize=req.normalize,
            label_column=req.label_column, pso_pop=req.pso.pop,
            pso_iters=req.pso.iters, pso_inertia=req.pso.inertia,
            pso_c1=req.pso.c1, pso_c2=req.pso.c2, pso_penalty=req.pso.penalty)

    @app.post("/bench", response_model=schemas.BenchResponse)
    async def run_bench(req: schemas.BenchRequest):
        cfg = bench.ExperimentConfig(
            datasets=tuple(req.datasets),
            models=tuple(req.models),
            noise_levels=tuple(req.noise_levels) if req.noise_levels is not None
            else bench.DEFAULT_NOISE_LEVELS,
            C=req.C, purity_threshold=req.purity, lam=req.lam,
            runs_per_cell=req.runs, seed=req.seed, test_fraction=req.test_fraction,
            epsilon=req.epsilon, radius_mode=req.radius_mode,
            membership_mode=req.membership_mode, label_column=req.label_column,
            pso_pop=req.pso.pop, pso_iters=req.pso.iters, pso_inertia=req.pso.inertia,
            pso_c1=req.pso.c1, pso_c2=req.pso.c2, pso_penalty=req.pso.penalty)
        report = bench.run_experiment(cfg)
        cells = [
            schemas.CellModel(
                dataset=c.dataset, model=c.model, noise=c.noise,
                accuracies=list(c.accuracies),
                best_accuracy=_clean(c.best_accuracy),
                mean_accuracy=_clean(c.mean_accuracy),
                wall_time=c.wall_time, units=c.units, purity=c.purity, error=c.error)
            for c in report.cells
        ]
        return schemas.BenchResponse(
            config=asdict(cfg),
            selected_purity=list(report.selected_purity),
            cells=cells,
            markdown=bench.render_markdown(report) if req.include_tables else None,
            csv=bench.render_csv(report) if req.include_tables else None)

    return app


app = create_app()
