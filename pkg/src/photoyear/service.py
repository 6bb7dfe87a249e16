"""JSON-over-HTTP facade: auth, gameplay, leaderboards, analytics, assets.

One deployable process. Every 4xx/5xx body carries a machine-readable
"error" code; dynamic point values are serialized as strings with exactly
two fraction digits. Pending-round payloads never include ground-truth
years: the engine's view types do not contain them.
"""

from __future__ import annotations

import json
import logging
import sys
import time
from contextlib import asynccontextmanager
from datetime import timedelta
from pathlib import Path
from typing import Literal, Optional

from fastapi import Depends, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import analytics
from .catalog import Catalog, asset_filename, load_catalog
from .config import ApiConfig, validate_paths
from .engine import (
    EmptyCatalogError,
    GameEngine,
    GameSession,
    GuessOutOfRangeError,
    NoDistinctYearsError,
    RoundAlreadyAnsweredError,
    UnknownRoundError,
    UnknownSessionError,
)
from .scoring import TimelineChoice
from .storage import (
    AuthFailedError,
    InvalidAgeBracketError,
    InvalidUsernameError,
    PointKind,
    Repository,
    UsernameTakenError,
    WeakPasswordError,
)

logger = logging.getLogger("photoyear.service")

SESSION_COOKIE = "photoyear_session"

_ERROR_MAP: list[tuple[type[Exception], int, str]] = [
    (UnknownSessionError, 401, "unauthenticated"),
    (AuthFailedError, 401, "auth_failed"),
    (UnknownRoundError, 404, "unknown_round"),
    (RoundAlreadyAnsweredError, 409, "round_already_answered"),
    (UsernameTakenError, 409, "username_taken"),
    (GuessOutOfRangeError, 422, "guess_out_of_range"),
    (WeakPasswordError, 422, "weak_password"),
    (InvalidUsernameError, 422, "invalid_username"),
    (InvalidAgeBracketError, 422, "invalid_age_bracket"),
    (EmptyCatalogError, 503, "catalog_unavailable"),
    (NoDistinctYearsError, 503, "catalog_unavailable"),
]


class RegisterBody(BaseModel):
    username: str
    password: str
    age_bracket: Optional[str] = None


class LoginBody(BaseModel):
    username: str
    password: str


class YearGuessBody(BaseModel):
    round_id: str
    guess: int


class TimelineChoiceBody(BaseModel):
    round_id: str
    choice: Literal["left", "right"]


def create_app(
    config: ApiConfig,
    *,
    repo: Optional[Repository] = None,
    catalog: Optional[Catalog] = None,
    engine: Optional[GameEngine] = None,
) -> FastAPI:
    """Build the service; components not passed in are created from config."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.ready = False
        if app.state.catalog is None:
            validate_paths(config)
            loaded, report = load_catalog(
                config.catalog_path, allow_partial_years=config.allow_partial_years
            )
            if report.rejected:
                logger.warning("catalog loaded with %d rejected rows", len(report.rejected))
            app.state.catalog = loaded
        if app.state.repo is None:
            app.state.repo = Repository(config.storage_url)
        app.state.repo.sync_catalog(app.state.catalog)
        if app.state.engine is None:
            app.state.engine = GameEngine(
                app.state.repo,
                app.state.catalog,
                exclusion_window=config.exclusion_window,
                session_ttl=timedelta(seconds=config.session_ttl_secs),
            )
        app.state.ready = True
        logger.info("service ready: %d catalog images", len(app.state.catalog))
        yield
        app.state.ready = False

    app = FastAPI(title="photoyear", lifespan=lifespan, docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.repo = repo
    app.state.catalog = catalog
    app.state.engine = engine
    app.state.ready = False

    def fail(status: int, code: str, detail: str = "") -> JSONResponse:
        body = {"error": code}
        if detail:
            body["detail"] = detail
        return JSONResponse(body, status_code=status)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return fail(422, "validation_error", str(exc.errors()[:3]))

    for exc_type, status, code in _ERROR_MAP:
        def _make(status=status, code=code):
            async def handler(request: Request, exc: Exception):
                return fail(status, code, str(exc))
            return handler

        app.exception_handler(exc_type)(_make())

    @app.middleware("http")
    async def access_log(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        logger.info(
            "%s",
            json.dumps({
                "event": "request",
                "method": request.method,
                "path": request.url.path,
                "status": response.status_code,
                "duration_ms": round((time.perf_counter() - start) * 1000, 2),
            }),
        )
        return response

    def current_session(request: Request) -> GameSession:
        token = None
        header = request.headers.get("authorization", "")
        if header.lower().startswith("bearer "):
            token = header[7:].strip()
        if not token:
            token = request.cookies.get(SESSION_COOKIE)
        if not token:
            raise UnknownSessionError("missing session token")
        return request.app.state.engine.get_session(token)

    def image_url(img_id: str) -> str:
        return f"/images/{img_id}"

    # -- health ---------------------------------------------------------------

    @app.get("/healthz")
    def healthz(request: Request):
        if not request.app.state.ready:
            return fail(503, "not_ready")
        return {"status": "ok"}

    # -- auth -----------------------------------------------------------------

    @app.post("/api/register", status_code=201)
    def register(body: RegisterBody, request: Request):
        user = request.app.state.repo.create_user(
            body.username, body.password, body.age_bracket
        )
        return {"user_id": user.user_id, "username": user.username,
                "age_bracket": user.age_bracket}

    @app.post("/api/login")
    def login(body: LoginBody, request: Request, response: Response):
        user = request.app.state.repo.authenticate(body.username, body.password)
        session = request.app.state.engine.create_session(user.user_id)
        response.set_cookie(SESSION_COOKIE, session.session_id,
                            httponly=True, samesite="lax")
        return {"token": session.session_id, "username": user.username}

    @app.post("/api/demo")
    def demo(request: Request, response: Response):
        if not request.app.state.config.demo_enabled:
            return fail(403, "demo_disabled")
        session = request.app.state.engine.create_session()
        response.set_cookie(SESSION_COOKIE, session.session_id,
                            httponly=True, samesite="lax")
        return {"token": session.session_id, "demo": True}

    # -- gameplay ---------------------------------------------------------------

    @app.get("/api/guess_the_year")
    def new_year_round(request: Request, session: GameSession = Depends(current_session)):
        view = request.app.state.engine.next_year_round(session.session_id)
        return {"round_id": view.round_id, "image_url": image_url(view.img_id)}

    @app.post("/api/guess_the_year")
    def submit_year_guess(body: YearGuessBody, request: Request,
                          session: GameSession = Depends(current_session)):
        result = request.app.state.engine.submit_year_guess(
            session.session_id, body.round_id, body.guess
        )
        return {
            "correct": result.correct,
            "correct_year": result.correct_year,
            "title": result.title,
            "static_points": result.static_points,
            "dynamic_points": str(result.dynamic_points),
            "feedback": result.feedback,
        }

    @app.get("/api/timeline_challenge")
    def new_timeline_round(request: Request, session: GameSession = Depends(current_session)):
        view = request.app.state.engine.next_timeline_round(session.session_id)
        return {
            "round_id": view.round_id,
            "left_image_url": image_url(view.left_img_id),
            "right_image_url": image_url(view.right_img_id),
        }

    @app.post("/api/timeline_challenge")
    def submit_timeline_choice(body: TimelineChoiceBody, request: Request,
                               session: GameSession = Depends(current_session)):
        result = request.app.state.engine.submit_timeline_choice(
            session.session_id, body.round_id, TimelineChoice(body.choice)
        )
        return {
            "correct": result.correct,
            "left_year": result.left_year,
            "right_year": result.right_year,
            "static_points": result.static_points,
            "dynamic_points": str(result.dynamic_points),
            "feedback": result.feedback,
        }

    # -- leaderboard and analytics ------------------------------------------------

    @app.get("/api/leaderboard")
    def leaderboard(request: Request, kind: str = "static", limit: int = 10):
        try:
            point_kind = PointKind(kind)
        except ValueError:
            return fail(422, "validation_error", f"kind must be static or dynamic, got {kind!r}")
        if limit < 1:
            return fail(422, "validation_error", "limit must be >= 1")
        entries = request.app.state.repo.leaderboard(point_kind, limit=limit)
        return {
            "kind": point_kind.value,
            "entries": [
                {
                    "rank": e.rank,
                    "username": e.username,
                    "total_static": e.total_static,
                    "total_dynamic": str(e.total_dynamic),
                }
                for e in entries
            ],
        }

    @app.get("/api/performance")
    def performance(request: Request, session: GameSession = Depends(current_session)):
        repo = request.app.state.repo
        if session.is_demo:
            plays = repo.list_plays(session_id=session.session_id)
        else:
            plays = repo.list_plays(user_id=session.user_id)
        decades = analytics.decade_stats(plays, request.app.state.catalog)
        modes = analytics.mode_accuracy(plays)
        return {
            "decades": [
                {
                    "decade": analytics.decade_label(stats.decade),
                    "total_guesses": stats.total_guesses,
                    "total_images_shown": stats.total_images_shown,
                    "correct_pct": None if stats.correct_pct is None else str(stats.correct_pct),
                }
                for stats in decades.values()
            ],
            "modes": {
                mode.value: None if pct is None else str(pct)
                for mode, pct in modes.items()
            },
        }

    # -- assets ---------------------------------------------------------------

    @app.get("/images/{img_id}")
    def image_asset(img_id: str, request: Request):
        record = request.app.state.catalog.get(img_id)
        if record is None:
            return fail(404, "unknown_image", img_id)
        if record.asset_path:
            path = Path(record.asset_path)
        else:
            path = Path(request.app.state.config.image_dir) / asset_filename(img_id)
        if not path.is_file():
            return fail(404, "unknown_image", f"no asset for {img_id}")
        return FileResponse(
            path,
            media_type="image/jpeg",
            headers={"Cache-Control": "public, max-age=31536000, immutable"},
        )

    if config.static_dir is not None:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app


def serve(config: ApiConfig) -> None:
    """Run the service until interrupted; exits nonzero on bad configuration."""
    import uvicorn

    try:
        validate_paths(config)
    except Exception as err:
        print(f"startup failed: {err}", file=sys.stderr)
        raise SystemExit(1)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stdout)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_config=None)
