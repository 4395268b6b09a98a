"""FastAPI wrapper over the handlers."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import ParameterError
from ..config import RunConfig
from . import handlers
from .schemas import (
    EquilibriumResponse,
    OracleCheckResponse,
    SolveAuditorResponse,
    SweepResponse,
    VerifyDpResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="auditgame", version="0.1.0")

    @app.exception_handler(ParameterError)
    async def _parameter_error(_: Request, exc: ParameterError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok"}

    @app.post("/solve-auditor", response_model=SolveAuditorResponse)
    async def solve_auditor(cfg: RunConfig) -> SolveAuditorResponse:
        return handlers.handle_solve_auditor(cfg)

    @app.post("/equilibrium", response_model=EquilibriumResponse)
    async def equilibrium(cfg: RunConfig) -> EquilibriumResponse:
        return handlers.handle_equilibrium(cfg)

    @app.post("/sweep", response_model=SweepResponse)
    async def sweep(cfg: RunConfig) -> SweepResponse:
        return handlers.handle_sweep(cfg)

    @app.post("/oracle-check", response_model=OracleCheckResponse)
    async def oracle_check(cfg: RunConfig) -> OracleCheckResponse:
        return handlers.handle_oracle_check(cfg)

    @app.post("/verify-dp", response_model=VerifyDpResponse)
    async def verify_dp(cfg: RunConfig) -> VerifyDpResponse:
        return handlers.handle_verify_dp(cfg)

    return app


app = create_app()
