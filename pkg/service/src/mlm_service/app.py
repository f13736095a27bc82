"""FastAPI application for the mask-logprob wire protocol.

Endpoints:

* ``GET /v1/health`` -> ``{"status": "ok"}``
* ``GET /v1/info``   -> ``{"model_id": ..., "max_tokens": N}``
* ``POST /v1/mask_logprob`` with ``{"items": [{"tokens", "masked_positions",
  "targets"}, ...]}`` -> ``{"items": [{"logprobs": [...]}, ...]}``

Malformed input yields 400 with ``{"error": "<message>"}``; items whose
encoding exceeds the model's position limit yield 413; inference failures
yield 500.  Requests are all-or-nothing: one bad item rejects the batch.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from mlm_service.alignment import TokenizationMismatch
from mlm_service.model import ItemTooLong, ServedModel

DEFAULT_MAX_BATCH_ITEMS = 32


class MaskItem(BaseModel):
    tokens: list[str]
    masked_positions: list[int]
    targets: list[str]


class MaskRequest(BaseModel):
    items: list[MaskItem]


class ProtocolError(Exception):
    def __init__(self, status_code: int, message: str):
        self.status_code = status_code
        self.message = message
        super().__init__(message)


def _validate_item(index: int, item: MaskItem) -> None:
    def bad(reason: str) -> ProtocolError:
        return ProtocolError(400, f"item {index}: {reason}")

    if not item.tokens:
        raise bad("tokens must be non-empty")
    if any(not t or t.split() != [t] for t in item.tokens):
        raise bad("tokens must be non-empty words without whitespace")
    if not item.masked_positions:
        raise bad("masked_positions must be non-empty")
    if item.masked_positions != sorted(set(item.masked_positions)):
        raise bad("masked_positions must be sorted and distinct")
    if any(not 0 <= p < len(item.tokens) for p in item.masked_positions):
        raise bad("masked position out of range")
    if len(item.targets) != len(item.masked_positions):
        raise bad("need exactly one target per masked position")
    if any(not t or t.split() != [t] for t in item.targets):
        raise bad("targets must be non-empty words without whitespace")


def create_app(
    served: ServedModel, max_batch_items: int = DEFAULT_MAX_BATCH_ITEMS
) -> FastAPI:
    app = FastAPI(title="mlm-service", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:1])})

    @app.exception_handler(ProtocolError)
    async def _protocol_error(request: Request, exc: ProtocolError):
        return JSONResponse(status_code=exc.status_code, content={"error": exc.message})

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.get("/v1/info")
    def info():
        return {"model_id": served.model_id, "max_tokens": served.max_tokens}

    @app.post("/v1/mask_logprob")
    def mask_logprob(request: MaskRequest):
        if len(request.items) > max_batch_items:
            raise ProtocolError(
                400,
                f"batch of {len(request.items)} items exceeds the cap "
                f"{max_batch_items}",
            )
        for index, item in enumerate(request.items):
            _validate_item(index, item)
        try:
            scores = served.score_items(
                [(i.tokens, i.masked_positions, i.targets) for i in request.items]
            )
        except ItemTooLong as exc:
            raise ProtocolError(413, str(exc)) from exc
        except TokenizationMismatch as exc:
            raise ProtocolError(400, str(exc)) from exc
        except Exception as exc:  # inference failure
            raise ProtocolError(500, f"inference failed: {exc}") from exc
        return {"items": [{"logprobs": row} for row in scores]}

    return app
