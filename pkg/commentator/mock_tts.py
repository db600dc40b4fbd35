"""
Mock text-to-speech server for hermetic tests.

Serves POST /v1/text:synthesize, records every request body verbatim and follows
a behaviour script that can inject latency, failing statuses or raw bodies:

    {"steps": [{"status": 500}, {"latency_ms": 300}], "repeat": false}

Requests beyond the scripted steps get a canned success unless "repeat" cycles
the steps.
"""

import asyncio
import base64
import socket
import threading
import time
from pathlib import Path
from typing import List, Optional

import uvicorn
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

SYNTHESIZE_PATH = "/v1/text:synthesize"
CANNED_AUDIO = b"ID3-mock-commentary-audio"


class MockStep(BaseModel):
    status: int = Field(default=200, ge=100, le=599)
    latency_ms: int = Field(default=0, ge=0)
    # Returned as-is instead of the canned JSON when set.
    raw_body: Optional[str] = None


class MockBehavior(BaseModel):
    steps: List[MockStep] = Field(default_factory=list)
    repeat: bool = False

    def step_for(self, index: int) -> MockStep:
        if index < len(self.steps):
            return self.steps[index]
        if self.repeat and self.steps:
            return self.steps[index % len(self.steps)]
        return MockStep()

    @classmethod
    def from_file(cls, path: Path) -> "MockBehavior":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def create_mock_app(behavior: Optional[MockBehavior] = None) -> FastAPI:
    """Build the mock app; captured bodies live in app.state.recorded."""
    behavior = behavior or MockBehavior()
    app = FastAPI(title="mock-tts")
    app.state.recorded = []
    app.state.lock = threading.Lock()

    @app.post(SYNTHESIZE_PATH)
    async def synthesize(request: Request) -> Response:
        body = await request.body()
        with app.state.lock:
            index = len(app.state.recorded)
            app.state.recorded.append(body)
        step = behavior.step_for(index)

        if step.latency_ms:
            await asyncio.sleep(step.latency_ms / 1000.0)
        if step.raw_body is not None:
            return Response(step.raw_body, status_code=step.status, media_type="application/json")
        if step.status >= 300:
            return JSONResponse(
                {"error": {"code": step.status, "message": "injected failure"}},
                status_code=step.status,
            )
        return JSONResponse(
            {"audioContent": base64.b64encode(CANNED_AUDIO).decode("ascii")},
            status_code=step.status,
        )

    @app.get("/requests")
    async def recorded_requests() -> List[str]:
        with app.state.lock:
            return [body.decode("utf-8", errors="replace") for body in app.state.recorded]

    return app


class MockServerHandle:
    """A mock server running on a background thread."""

    def __init__(self, app: FastAPI, server: uvicorn.Server, thread: threading.Thread, host: str, port: int):
        self.app = app
        self.host = host
        self.port = port
        self._server = server
        self._thread = thread

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}{SYNTHESIZE_PATH}"

    @property
    def requests(self) -> List[bytes]:
        with self.app.state.lock:
            return list(self.app.state.recorded)

    def stop(self, timeout: float = 5.0) -> None:
        self._server.should_exit = True
        self._thread.join(timeout)

    def __enter__(self) -> "MockServerHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.stop()


def mock_server(
    port: int = 0,
    behavior: Optional[MockBehavior] = None,
    host: str = "127.0.0.1",
    startup_timeout: float = 5.0,
) -> MockServerHandle:
    """
    Start the mock server in a daemon thread. Port 0 binds an ephemeral port.

    Raises:
        RuntimeError: server did not come up within startup_timeout
    """
    app = create_mock_app(behavior)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((host, port))
    bound_port = sock.getsockname()[1]

    server = uvicorn.Server(uvicorn.Config(app, log_level="warning", lifespan="off"))
    thread = threading.Thread(
        target=server.run, kwargs={"sockets": [sock]}, name="mock-tts", daemon=True
    )
    thread.start()

    deadline = time.monotonic() + startup_timeout
    while not server.started:
        if time.monotonic() > deadline or not thread.is_alive():
            server.should_exit = True
            thread.join(1.0)
            sock.close()
            raise RuntimeError(f"mock TTS server did not start on {host}:{bound_port}")
        time.sleep(0.01)
    return MockServerHandle(app, server, thread, host, bound_port)


def serve_forever(port: int, behavior: Optional[MockBehavior] = None, host: str = "127.0.0.1") -> None:
    uvicorn.run(create_mock_app(behavior), host=host, port=port, log_level="info")
