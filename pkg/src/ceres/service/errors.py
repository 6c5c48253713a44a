"""Uniform ``{status, code, message}`` error bodies."""
from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ceres.core.errors import LedgerTamperError

LOGGER = logging.getLogger(__name__)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message

    def to_dict(self) -> dict:
        return {"status": self.status, "code": self.code, "message": self.message}


def not_found(code: str, message: str) -> ApiError:
    return ApiError(404, code, message)


def bad_request(message: str) -> ApiError:
    return ApiError(400, "bad-request", message)


def install_error_handlers(app: FastAPI) -> None:
    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.to_dict())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        details = "; ".join(
            f"{'.'.join(str(part) for part in error.get('loc', ()))}: {error.get('msg', 'invalid')}"
            for error in exc.errors()
        )
        return JSONResponse(status_code=400, content=bad_request(details or "malformed request").to_dict())

    @app.exception_handler(LedgerTamperError)
    async def _ledger_error(request: Request, exc: LedgerTamperError) -> JSONResponse:
        LOGGER.error("Ledger verification failed while serving %s: %s", request.url.path, exc)
        body = ApiError(500, "ledger-verification-failed", str(exc)).to_dict()
        return JSONResponse(status_code=500, content=body)

    @app.exception_handler(Exception)
    async def _internal_error(request: Request, exc: Exception) -> JSONResponse:
        LOGGER.exception("Unhandled error serving %s", request.url.path)
        return JSONResponse(status_code=500, content=ApiError(500, "internal", "internal server error").to_dict())


__all__ = ["ApiError", "bad_request", "install_error_handlers", "not_found"]
