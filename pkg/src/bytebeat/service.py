"""HTTP service exposing parse, render, analysis and presets.

Sample data travels as raw bytes (chunked) so clients can start playback
before a long render finishes and desk tests can diff streams directly;
structured results are JSON.  The service is stateless apart from the
program cache.  It binds localhost by default: this is a developer tool,
not a public endpoint.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analysis import PitchReference, bit_band_matrix, estimate_pitch
from .audio import wav_header
from .cache import ProgramCache
from .corpus import presets
from .expr import ParseError, format_expr, parse
from .semantics import SemanticsMode, TypecheckError, typecheck
from .vm import Program, render_range

DEFAULT_PORT = 8008
DEFAULT_HOST = "127.0.0.1"


@dataclass(frozen=True)
class Settings:
    host: str = DEFAULT_HOST
    port: int = DEFAULT_PORT
    max_samples: int = 2**24
    max_expr_bytes: int = 64 * 1024
    cache_capacity: int = 64
    chunk_samples: int = 8192
    ui_dir: str | None = None

    @classmethod
    def from_env(cls, **overrides) -> "Settings":
        env = {
            "host": os.environ.get("BB_HOST"),
            "port": _int_env("BB_PORT"),
            "max_samples": _int_env("BB_MAX_SAMPLES"),
            "max_expr_bytes": _int_env("BB_MAX_EXPR"),
            "cache_capacity": _int_env("BB_CACHE_SIZE"),
            "chunk_samples": _int_env("BB_CHUNK"),
            "ui_dir": os.environ.get("BB_UI_DIR"),
        }
        merged = {k: v for k, v in env.items() if v is not None}
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**merged)


def _int_env(name: str) -> int | None:
    raw = os.environ.get(name)
    return int(raw) if raw else None


class ApiError(Exception):
    """Error reported to clients as {kind, pos, msg} JSON."""

    def __init__(self, kind: str, msg: str, pos: int | None = None, status: int = 400):
        self.kind = kind
        self.msg = msg
        self.pos = pos
        self.status = status
        super().__init__(msg)

    def to_json(self) -> dict:
        return {"kind": self.kind, "pos": self.pos, "msg": self.msg}


class ParseRequest(BaseModel):
    expr: str
    mode: str = "c32"


def _parse_mode(raw: str) -> SemanticsMode:
    try:
        return SemanticsMode(raw.lower())
    except ValueError:
        raise ApiError("range", f"unknown mode {raw!r}; expected c32, c64 or js") from None


def create_app(settings: Settings | None = None) -> FastAPI:
    settings = settings or Settings.from_env()
    app = FastAPI(title="bytebeat workbench", docs_url=None, redoc_url=None)
    app.state.settings = settings
    app.state.cache = ProgramCache(settings.cache_capacity)

    def checked_expr(expr: str) -> str:
        if len(expr.encode()) > settings.max_expr_bytes:
            raise ApiError("range", "expression too long")
        return expr

    def program_for(expr: str, mode_raw: str) -> Program:
        mode = _parse_mode(mode_raw)
        try:
            return app.state.cache.get(checked_expr(expr), mode)
        except ParseError as err:
            raise ApiError("parse", str(err), pos=err.pos) from err
        except TypecheckError as err:
            raise ApiError("type", err.msg, pos=err.pos) from err

    def checked_render_params(t0: int, n: int, rate: int) -> None:
        if t0 < 0:
            raise ApiError("range", "t0 must be non-negative")
        if n < 0:
            raise ApiError("range", "n must be non-negative")
        if rate <= 0:
            raise ApiError("range", "rate must be positive")
        if n > settings.max_samples:
            raise ApiError("range", f"n exceeds the limit of {settings.max_samples}", status=413)

    def sample_stream(program: Program, t0: int, n: int) -> Iterator[bytes]:
        pos = t0
        remaining = n
        step = settings.chunk_samples
        while remaining > 0:
            count = min(step, remaining)
            yield render_range(program, pos, count).data
            pos += count
            remaining -= count

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, err: ApiError):
        return JSONResponse(status_code=err.status, content=err.to_json())

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, err: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"kind": "range", "pos": None, "msg": str(err.errors()[0]["msg"])},
        )

    @app.exception_handler(Exception)
    async def on_internal_error(request: Request, err: Exception):
        return JSONResponse(
            status_code=500,
            content={"kind": "internal", "pos": None, "msg": type(err).__name__},
        )

    @app.get("/health")
    def health() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.post("/expr/parse")
    def parse_expr(body: ParseRequest) -> JSONResponse:
        mode = _parse_mode(body.mode)
        try:
            tree = parse(checked_expr(body.expr))
            typecheck(tree, mode)
        except ParseError as err:
            return JSONResponse(
                {"ok": False, "error": {"kind": "parse", "pos": err.pos, "msg": str(err)}}
            )
        except TypecheckError as err:
            return JSONResponse(
                {"ok": False, "error": {"kind": "type", "pos": err.pos, "msg": err.msg}}
            )
        return JSONResponse({"ok": True, "canonical": format_expr(tree)})

    @app.get("/render")
    def render(expr: str, n: int, mode: str = "c32", t0: int = 0, rate: int = 8000):
        program = program_for(expr, mode)
        checked_render_params(t0, n, rate)
        return StreamingResponse(
            sample_stream(program, t0, n), media_type="application/octet-stream"
        )

    @app.get("/render.wav")
    def render_wav(expr: str, n: int, mode: str = "c32", t0: int = 0, rate: int = 8000):
        program = program_for(expr, mode)
        checked_render_params(t0, n, rate)

        def wav_stream() -> Iterator[bytes]:
            yield wav_header(n, rate)
            yield from sample_stream(program, t0, n)

        return StreamingResponse(wav_stream(), media_type="audio/wav")

    @app.get("/analyze/pitch")
    def analyze_pitch(
        expr: str,
        mode: str = "c32",
        t0: int = 0,
        n: int = 8192,
        window: int = 1024,
        rate: int = 8000,
        ref: str = "a440",
    ):
        program = program_for(expr, mode)
        checked_render_params(t0, n, rate)
        try:
            reference = PitchReference(ref.lower())
        except ValueError:
            raise ApiError("range", f"unknown reference {ref!r}; expected a440 or c256") from None
        if window < 128:
            raise ApiError("range", "window must be at least 128 samples")
        chunk = render_range(program, t0, n, rate=rate)
        events = estimate_pitch(chunk, window, ref=reference)
        return [
            {
                "t_start": ev.t_start,
                "t_len": ev.t_len,
                "freq": ev.freq,
                "note": ev.note,
                "octave": ev.octave,
                "cents": ev.cents,
            }
            for ev in events
        ]

    @app.get("/analyze/bits")
    def analyze_bits(
        expr: str, mode: str = "c32", t0: int = 0, n: int = 8192, window: int = 256
    ):
        program = program_for(expr, mode)
        checked_render_params(t0, n, 8000)
        if n < 1:
            raise ApiError("range", "n must be at least 1")
        if window < 2:
            raise ApiError("range", "window must be at least 2")
        matrix = bit_band_matrix(program, t0, n, window)
        return {
            "window_len": matrix.window_len,
            "rows": [
                [{"duty": act.duty, "toggles": act.toggles} for act in row]
                for row in matrix.rows
            ],
        }

    @app.get("/presets")
    def list_presets():
        return [p.to_json() for p in presets()]

    ui_dir = settings.ui_dir or _default_ui_dir()
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _default_ui_dir() -> str | None:
    here = Path(__file__).resolve()
    for base in (Path.cwd(), *here.parents):
        candidate = base / "frontend"
        if (candidate / "index.html").is_file():
            return str(candidate)
    return None


app = create_app()
