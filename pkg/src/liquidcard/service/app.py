"""HTTP surface of the interactive tuning workbench.

POST /sessions            create a session (dataset + model + split)
POST /sessions/{id}/refit refit with smoothness/pattern overrides
POST /sessions/{id}/lock  freeze one characteristic's smoothness
GET  /sessions/{id}/state full session state
GET  /healthz             liveness

Errors are JSON bodies {code, message, detail}: 400 for schema/data
problems, 404 for unknown sessions or characteristics, 409 for locked
characteristics, 422 for fit failures.
"""

from __future__ import annotations

import io
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..data import DataError, Dataset
from ..fitting import DegenerateClassesError, DivergenceError
from ..qp import QpError
from ..scorecard import DomainError, ModelSpec, SpecError
from ..spline_basis import KnotError
from . import schemas
from .sessions import DEFAULT_MAX_ROWS, Session, SessionNotFound, SessionStore, build_session


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: Any = None) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def _char_states(session: Session) -> list[schemas.CharacteristicState]:
    contribution = dict(session.contributions)
    out = []
    for char in session.spec:
        liquid = char.liquid_knots is not None
        out.append(
            schemas.CharacteristicState(
                name=char.name,
                has_liquid=liquid,
                pattern=session.patterns.get(char.name, char.pattern),
                xscale=char.xscale,
                lambda2=session.lambda2.get(char.name) if liquid else None,
                locked=char.name in session.locked,
                contribution=contribution.get(char.name, 0.0),
            )
        )
    return out


def create_app(max_rows: int = DEFAULT_MAX_ROWS, ttl_seconds: float = 3600.0) -> FastAPI:
    app = FastAPI(title="liquidcard tuning service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(ttl_seconds=ttl_seconds)

    @app.exception_handler(ServiceError)
    async def _service_error(_: Request, err: ServiceError) -> JSONResponse:
        body = schemas.ErrorBody(code=err.code, message=err.message, detail=err.detail)
        return JSONResponse(status_code=err.status, content=body.model_dump())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_: Request, err: RequestValidationError) -> JSONResponse:
        body = schemas.ErrorBody(code="INVALID_REQUEST", message="request failed validation", detail=err.errors())
        return JSONResponse(status_code=400, content=body.model_dump())

    def _get_session(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except SessionNotFound:
            raise ServiceError(404, "SESSION_NOT_FOUND", f"no session {session_id!r}") from None

    def _load_dataset(req: schemas.CreateSessionRequest) -> Dataset:
        if (req.dataset_path is None) == (req.dataset_csv is None):
            raise ServiceError(400, "INVALID_REQUEST", "give exactly one of dataset_path or dataset_csv")
        try:
            if req.dataset_path is not None:
                dataset = Dataset.from_csv(req.dataset_path)
            else:
                import pandas as pd

                dataset = Dataset.from_frame(pd.read_csv(io.StringIO(req.dataset_csv)))
        except DataError as err:
            raise ServiceError(400, "BAD_DATA", str(err)) from err
        except Exception as err:  # unreadable CSV text
            raise ServiceError(400, "BAD_DATA", f"cannot parse dataset: {err}") from err
        if dataset.n > max_rows:
            raise ServiceError(400, "DATASET_TOO_LARGE", f"{dataset.n} rows exceeds the cap of {max_rows}")
        return dataset

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/sessions", response_model=schemas.SessionCreated, status_code=201)
    def create_session(req: schemas.CreateSessionRequest) -> schemas.SessionCreated:
        dataset = _load_dataset(req)
        try:
            spec = ModelSpec.from_dict(req.model)
        except (SpecError, KnotError, KeyError, TypeError, ValueError) as err:
            raise ServiceError(400, "BAD_MODEL", f"invalid model document: {err}") from err
        try:
            session = build_session(spec, dataset, req.split.val_fraction, req.split.seed)
        except DegenerateClassesError as err:
            raise ServiceError(422, "DEGENERATE_CLASSES", str(err)) from err
        except (DataError, DomainError) as err:
            raise ServiceError(400, "BAD_DATA", str(err)) from err
        except (QpError, DivergenceError) as err:
            raise ServiceError(422, "NUMERICAL_FAILURE", str(err)) from err
        store.add(session)
        return schemas.SessionCreated(
            session_id=session.session_id,
            baseline=schemas.Divergences(
                dev_divergence=session.baseline_dev, val_divergence=session.baseline_val
            ),
            grid=list(session.grid),
            characteristics=_char_states(session),
            next_suggestion=session.next_suggestion(),
        )

    @app.post("/sessions/{session_id}/refit", response_model=schemas.RefitResponse)
    def refit(session_id: str, req: schemas.RefitRequest) -> schemas.RefitResponse:
        session = _get_session(session_id)
        with session.mutex:
            names = set(session.spec.names)
            for name in list(req.lambda2) + list(req.patterns):
                if name not in names:
                    raise ServiceError(404, "CHARACTERISTIC_NOT_FOUND", f"no characteristic {name!r}")
                if name in session.locked:
                    raise ServiceError(409, "LOCKED", f"characteristic {name!r} is locked")
            for name, value in req.lambda2.items():
                if session.spec[name].liquid_knots is None:
                    raise ServiceError(400, "NO_LIQUID_RANGE", f"{name!r} has no liquid range to smooth")
                if value < 0:
                    raise ServiceError(400, "INVALID_REQUEST", f"lambda2 for {name!r} must be >= 0")
            for name, pattern in req.patterns.items():
                if pattern not in ("ascending", "descending", "none"):
                    raise ServiceError(400, "INVALID_REQUEST", f"unknown pattern {pattern!r}")
            session.lambda2.update(req.lambda2)
            session.patterns.update(req.patterns)
            key = session.cache_key()
            cache_hit = key in session.cache
            try:
                outcome = session.run_fit()
            except DegenerateClassesError as err:
                raise ServiceError(422, "DEGENERATE_CLASSES", str(err)) from err
            except (QpError, DivergenceError) as err:
                raise ServiceError(422, "NUMERICAL_FAILURE", str(err)) from err
            return schemas.RefitResponse(
                dev_divergence=outcome.dev_divergence,
                val_divergence=outcome.val_divergence,
                val_delta_vs_baseline=outcome.val_divergence - session.baseline_val,
                cache_hit=cache_hit,
                curves=[schemas.CurveSample(**c) for c in outcome.curves],
            )

    @app.post("/sessions/{session_id}/lock", response_model=schemas.LockResponse)
    def lock(session_id: str, req: schemas.LockRequest) -> schemas.LockResponse:
        session = _get_session(session_id)
        with session.mutex:
            if req.characteristic not in session.spec.names:
                raise ServiceError(
                    404, "CHARACTERISTIC_NOT_FOUND", f"no characteristic {req.characteristic!r}"
                )
            if session.spec[req.characteristic].liquid_knots is None:
                raise ServiceError(
                    400, "NO_LIQUID_RANGE", f"{req.characteristic!r} has no liquid range to lock"
                )
            if req.characteristic in session.locked:
                raise ServiceError(409, "LOCKED", f"characteristic {req.characteristic!r} is already locked")
            session.lambda2[req.characteristic] = req.lambda2
            session.locked.append(req.characteristic)
            session.locks_log.append({"characteristic": req.characteristic, "lambda2": req.lambda2})
            suggestion = session.next_suggestion()
            final = None
            if suggestion is None:
                try:
                    outcome = session.run_fit()
                except (QpError, DivergenceError, DegenerateClassesError) as err:
                    raise ServiceError(422, "NUMERICAL_FAILURE", str(err)) from err
                final = schemas.Divergences(
                    dev_divergence=outcome.dev_divergence, val_divergence=outcome.val_divergence
                )
            chosen: dict[str, float | None] = {}
            for char in session.spec:
                if char.liquid_knots is None:
                    chosen[char.name] = None
                else:
                    chosen[char.name] = session.lambda2[char.name] if char.name in session.locked else None
            return schemas.LockResponse(
                locked=list(session.locked),
                chosen_lambda2=chosen,
                next_suggestion=suggestion,
                final=final,
            )

    @app.get("/sessions/{session_id}/state", response_model=schemas.SessionState)
    def state(session_id: str) -> schemas.SessionState:
        session = _get_session(session_id)
        with session.mutex:
            try:
                outcome = session.run_fit()
            except (QpError, DivergenceError, DegenerateClassesError) as err:
                raise ServiceError(422, "NUMERICAL_FAILURE", str(err)) from err
            return schemas.SessionState(
                session_id=session.session_id,
                baseline=schemas.Divergences(
                    dev_divergence=session.baseline_dev, val_divergence=session.baseline_val
                ),
                current=schemas.Divergences(
                    dev_divergence=outcome.dev_divergence, val_divergence=outcome.val_divergence
                ),
                val_delta_vs_baseline=outcome.val_divergence - session.baseline_val,
                grid=list(session.grid),
                characteristics=_char_states(session),
                next_suggestion=session.next_suggestion(),
                locks=list(session.locks_log),
            )

    return app
