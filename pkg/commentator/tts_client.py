"""
Text-to-speech wire client.

Directives become JSON synthesize requests in the cloud TTS REST shape:

    {"input":{"text":...},
     "voice":{"languageCode":...,"name":...},
     "audioConfig":{"audioEncoding":...,"pitch":...,"volumeGainDb":...}}

The response carries base64 audio in "audioContent".
"""

import base64
import binascii
import json
import logging
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import httpx
from pydantic import BaseModel, ConfigDict

from commentator.errors import TTSDecodeError, TTSError, TTSTimeoutError, TTSTransportError
from commentator.scheduler_pipeline import CommentaryDirective, PlaybackSignal, estimate_duration

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 5.0
WIRE_DECIMALS = 4


class AudioEncoding(str, Enum):
    MP3 = "MP3"
    LINEAR16 = "LINEAR16"

    @property
    def content_type(self) -> str:
        return "audio/mpeg" if self is AudioEncoding.MP3 else "audio/wav"

    @property
    def extension(self) -> str:
        return "mp3" if self is AudioEncoding.MP3 else "wav"


class VoiceConfig(BaseModel):
    """Voice selection; the default is a male US-English WaveNet voice."""

    model_config = ConfigDict(frozen=True)

    language_code: str = "en-US"
    voice_name: str = "en-US-Wavenet-D"
    audio_encoding: AudioEncoding = AudioEncoding.MP3


@dataclass(frozen=True)
class SynthesisResult:
    audio_bytes: bytes
    content_type: str
    request_latency_ms: float


def _wire_number(value: float) -> float:
    # + 0.0 folds -0.0 into 0.0
    return round(float(value), WIRE_DECIMALS) + 0.0


def build_request(d: CommentaryDirective, v: VoiceConfig) -> bytes:
    """Serialize a directive to a canonical synthesize request body."""
    body = {
        "input": {"text": d.text},
        "voice": {"languageCode": v.language_code, "name": v.voice_name},
        "audioConfig": {
            "audioEncoding": v.audio_encoding.value,
            "pitch": _wire_number(d.phonetics.pitch),
            "volumeGainDb": _wire_number(d.phonetics.volume_gain_db),
        },
    }
    return json.dumps(body, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _encoding_of(body: bytes) -> AudioEncoding:
    try:
        return AudioEncoding(json.loads(body)["audioConfig"]["audioEncoding"])
    except (ValueError, KeyError, TypeError):
        return AudioEncoding.MP3


def synthesize(
    body: bytes,
    endpoint: str,
    auth_token: Optional[str] = None,
    *,
    client: Optional[httpx.Client] = None,
    timeout: float = DEFAULT_TIMEOUT_S,
    audio_path: Optional[Path] = None,
) -> SynthesisResult:
    """
    POST one synthesize request and decode the audio.

    Args:
        body: Request body from build_request()
        endpoint: Full synthesize URL
        auth_token: Bearer token, if the endpoint needs one
        client: httpx client to reuse (a temporary one is created otherwise)
        timeout: Seconds before giving up
        audio_path: Where to persist the audio, if anywhere

    Raises:
        TTSTransportError: connection failure or non-2xx status
        TTSTimeoutError: no answer within timeout
        TTSDecodeError: response is not valid base64 audio JSON
    """
    headers = {"Content-Type": "application/json; charset=utf-8"}
    if auth_token:
        headers["Authorization"] = f"Bearer {auth_token}"

    owns_client = client is None
    http = client or httpx.Client()
    start = time.perf_counter()
    try:
        response = http.post(endpoint, content=body, headers=headers, timeout=timeout)
    except httpx.TimeoutException as e:
        raise TTSTimeoutError(f"no response from {endpoint} within {timeout}s") from e
    except httpx.HTTPError as e:
        raise TTSTransportError(f"request to {endpoint} failed: {e}") from e
    finally:
        if owns_client:
            http.close()
    latency_ms = (time.perf_counter() - start) * 1000.0

    if not response.is_success:
        raise TTSTransportError(
            f"{endpoint} answered {response.status_code}", status_code=response.status_code
        )

    try:
        audio = base64.b64decode(response.json()["audioContent"], validate=True)
    except (ValueError, KeyError, TypeError, binascii.Error) as e:
        raise TTSDecodeError(f"malformed synthesize response: {e}") from e
    if not audio:
        raise TTSDecodeError("synthesize response carried no audio")

    if audio_path is not None:
        audio_path.parent.mkdir(parents=True, exist_ok=True)
        audio_path.write_bytes(audio)

    return SynthesisResult(
        audio_bytes=audio,
        content_type=_encoding_of(body).content_type,
        request_latency_ms=latency_ms,
    )


class TTSClient:
    """Endpoint, credentials, voice and HTTP connection for one run."""

    def __init__(
        self,
        endpoint: str,
        auth_token: Optional[str] = None,
        voice: Optional[VoiceConfig] = None,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        audio_dir: Optional[Path] = None,
        http_client: Optional[httpx.Client] = None,
    ):
        self.endpoint = endpoint
        self.auth_token = auth_token
        self.voice = voice or VoiceConfig()
        self.timeout_s = timeout_s
        self.audio_dir = audio_dir
        self._owns_http = http_client is None
        self._http = http_client or httpx.Client()

    def audio_path_for(self, d: CommentaryDirective) -> Optional[Path]:
        if self.audio_dir is None:
            return None
        name = f"{d.round_index:02d}_{d.frame_index:08d}.{self.voice.audio_encoding.extension}"
        return self.audio_dir / name

    def synthesize(self, d: CommentaryDirective) -> SynthesisResult:
        return synthesize(
            build_request(d, self.voice),
            self.endpoint,
            self.auth_token,
            client=self._http,
            timeout=self.timeout_s,
            audio_path=self.audio_path_for(d),
        )

    def close(self) -> None:
        if self._owns_http:
            self._http.close()

    def __enter__(self) -> "TTSClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def synthesize_script(
    script: Sequence[CommentaryDirective], client: TTSClient
) -> Tuple[List[SynthesisResult], List[Tuple[CommentaryDirective, TTSError]]]:
    """Synthesize directives one at a time; failures are collected, not raised."""
    results = []
    failures = []
    for directive in script:
        try:
            results.append(client.synthesize(directive))
        except TTSError as e:
            logger.warning("Dropping utterance at frame %d: %s", directive.frame_index, e)
            failures.append((directive, e))
    logger.info("Synthesized %d of %d utterances", len(results), len(script))
    return results, failures


class TTSDispatcher:
    """
    Sends directives off the tick-loop thread, one request in flight at a time.
    Playback is modelled by sleeping for the estimated speaking time; the
    playback signal fires when it ends or when the request fails.
    """

    def __init__(
        self,
        client: TTSClient,
        signal: Optional[PlaybackSignal] = None,
        *,
        model_playback: bool = True,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.client = client
        self.signal = signal or PlaybackSignal()
        self.model_playback = model_playback
        self._sleep = sleep
        self._executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix="tts-dispatch")
        self._lock = threading.Lock()
        self._pending: Optional[Future] = None
        self.results: List[SynthesisResult] = []
        self.dropped: List[CommentaryDirective] = []

    def submit(self, directive: CommentaryDirective) -> None:
        if self.signal.busy:
            logger.warning("TTS busy; dropping utterance at frame %d", directive.frame_index)
            with self._lock:
                self.dropped.append(directive)
            return
        self.signal.begin()
        self._pending = self._executor.submit(self._speak, directive)

    def _speak(self, directive: CommentaryDirective) -> None:
        try:
            result = self.client.synthesize(directive)
        except TTSError as e:
            logger.warning("Dropping utterance at frame %d: %s", directive.frame_index, e)
            with self._lock:
                self.dropped.append(directive)
        except Exception:
            logger.exception("Unexpected failure synthesizing frame %d", directive.frame_index)
            with self._lock:
                self.dropped.append(directive)
        else:
            with self._lock:
                self.results.append(result)
            if self.model_playback:
                self._sleep(estimate_duration(directive.text))
        finally:
            self.signal.finish()

    def drain(self, timeout: Optional[float] = None) -> None:
        """Wait for the in-flight request, if any."""
        if self._pending is not None:
            self._pending.result(timeout=timeout)

    def close(self) -> None:
        self._executor.shutdown(wait=True)

    def __enter__(self) -> "TTSDispatcher":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
