"""FastAPI application exposing the compute endpoints.

Every endpoint is a thin wrapper over the handler functions; configuration
problems come back as 422 with a structured error body and numerical
failures as 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import ConfigurationError, NumericalError
from . import handlers
from . import schemas as sc


def create_app() -> FastAPI:
    app = FastAPI(title="twophoton service", version=__version__)

    @app.exception_handler(ConfigurationError)
    async def _config_error(_request: Request, exc: ConfigurationError):
        return JSONResponse(
            status_code=422,
            content={"error": {"type": "configuration", "message": str(exc)}},
        )

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422,
            content={"error": {"type": "configuration", "message": str(exc)}},
        )

    @app.exception_handler(NumericalError)
    async def _numerical_error(_request: Request, exc: NumericalError):
        return JSONResponse(
            status_code=500,
            content={"error": {"type": "numerical", "message": str(exc)}},
        )

    @app.get("/api/health", response_model=sc.HealthResponse)
    def health() -> sc.HealthResponse:
        return sc.HealthResponse(status="ok", version=__version__)

    @app.post("/api/g2-scan", response_model=sc.G2ScanResponse)
    def g2_scan(request: sc.G2ScanRequest) -> sc.G2ScanResponse:
        return handlers.handle_g2_scan(request)

    @app.post("/api/visibility", response_model=sc.VisibilityResponse)
    def visibility(request: sc.VisibilityRequest) -> sc.VisibilityResponse:
        return handlers.handle_visibility(request)

    @app.post("/api/bell-test", response_model=sc.BellTestResponse)
    def bell_test(request: sc.BellTestRequest) -> sc.BellTestResponse:
        return handlers.handle_bell_test(request)

    @app.post("/api/bell-scan", response_model=sc.BellScanResponse)
    def bell_scan(request: sc.BellScanRequest) -> sc.BellScanResponse:
        return handlers.handle_bell_scan(request)

    @app.post("/api/mc-run", response_model=sc.McRunResponse)
    def mc_run(request: sc.McRunRequest) -> sc.McRunResponse:
        return handlers.handle_mc_run(request)

    @app.post("/api/ch74-empirical", response_model=sc.McRunResponse)
    def ch74_empirical(request: sc.McRunRequest) -> sc.McRunResponse:
        return handlers.handle_ch74_empirical(request)

    @app.post("/api/timing-check", response_model=sc.TimingCheckResponse)
    def timing_check(request: sc.TimingCheckRequest) -> sc.TimingCheckResponse:
        return handlers.handle_timing_check(request)

    return app


app = create_app()
