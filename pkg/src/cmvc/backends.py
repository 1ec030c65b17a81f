"""Clip generation backends.

Three implementations share one interface: pixel-space blending, a
latent-space stand-in that blends blockwise DCT coefficients with a
text-seeded modulation field, and a client that drives an external
process over a length-prefixed JSON protocol on its stdio.

Every backend exposes a real-valued render path; the 8-bit output is
always round-half-up plus clamp on top of it, so weight optimization
can probe the smooth surface underneath.
"""

from __future__ import annotations

import json
import shlex
import subprocess
from dataclasses import dataclass

import numpy as np

from .coders import WeightTrack
from .errors import (
    BackendReportedError,
    BackendUnavailableError,
    ConfigError,
    ContractError,
    ProtocolViolationError,
)
from .rng import byte_field, fnv1a64, uniform_field
from .transform import block_dct, block_idct, pad_to_block
from .video import Frame, check_frame

PROTOCOL_VERSION = 1
_MAX_MESSAGE = 1 << 24


@dataclass(frozen=True)
class GenerationRequest:
    """Everything needed to synthesize the interior of one clip."""

    left: Frame
    right: Frame
    motion_text: str
    weights: WeightTrack
    intermediate_count: int

    def __post_init__(self):
        check_frame(self.left, "left")
        check_frame(self.right, "right")
        if self.left.shape != self.right.shape:
            raise ContractError(
                f"keyframe geometry differs: {self.left.shape} vs {self.right.shape}"
            )
        if self.intermediate_count < 0:
            raise ContractError("intermediate_count must be non-negative")
        if len(self.weights) != self.intermediate_count:
            raise ContractError(
                f"weight track length {len(self.weights)} != intermediate_count {self.intermediate_count}"
            )


def quantize_frame(real: np.ndarray) -> Frame:
    """Round half up and clamp a real-valued render to 8 bits."""
    return np.clip(np.floor(real + 0.5), 0, 255).astype(np.uint8)


def blend_real(left: Frame, right: Frame, w: float) -> np.ndarray:
    """w of the left plus 1 - w of the right, in float64."""
    return w * left.astype(np.float64) + (1.0 - w) * right.astype(np.float64)


def interpolate_frames(left: Frame, right: Frame, w: float) -> Frame:
    """8-bit blend of two frames; w = 1 returns the left frame exactly."""
    check_frame(left, "left")
    check_frame(right, "right")
    if left.shape != right.shape:
        raise ContractError(f"frame geometry differs: {left.shape} vs {right.shape}")
    if not 0.0 <= w <= 1.0:
        raise ContractError(f"blend weight must lie in [0, 1], got {w}")
    return quantize_frame(blend_real(left, right, w))


def interpolate_adapters(a0: np.ndarray, a1: np.ndarray, w: float) -> np.ndarray:
    """Elementwise blend of two adapter states: w*a0 + (1-w)*a1."""
    a0 = np.asarray(a0, dtype=np.float64)
    a1 = np.asarray(a1, dtype=np.float64)
    if a0.shape != a1.shape:
        raise ContractError(f"adapter shapes differ: {a0.shape} vs {a1.shape}")
    return w * a0 + (1.0 - w) * a1


class ClipSession:
    """Renders single intermediates of one (left, right, text) clip."""

    def frame_real(self, frame_w: float, model_w: float, t_frac: float) -> np.ndarray:
        raise NotImplementedError


class Backend:
    name = "base"

    def clip_session(self, left: Frame, right: Frame, motion_text: str) -> ClipSession:
        raise NotImplementedError

    def generate(self, request: GenerationRequest) -> list[Frame]:
        """All intermediates of a clip, quantized to 8 bits."""
        session = self.clip_session(request.left, request.right, request.motion_text)
        count = request.intermediate_count
        out = []
        for k in range(count):
            t_frac = (k + 1) / (count + 1)
            real = session.frame_real(
                request.weights.frame_weights[k], request.weights.model_weights[k], t_frac
            )
            out.append(quantize_frame(real))
        return out

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class _LinearSession(ClipSession):
    def __init__(self, left: Frame, right: Frame):
        self._left = left.astype(np.float64)
        self._right = right.astype(np.float64)

    def frame_real(self, frame_w, model_w, t_frac):
        # model_w has no pixel-space counterpart here; probes may sit
        # slightly outside [0, 1], which keeps central differences central
        return frame_w * self._left + (1.0 - frame_w) * self._right


class LinearBackend(Backend):
    """Pure pixel-space blending between the two keyframes."""

    name = "linear"

    def clip_session(self, left, right, motion_text):
        check_frame(left, "left")
        check_frame(right, "right")
        if left.shape != right.shape:
            raise ContractError(f"keyframe geometry differs: {left.shape} vs {right.shape}")
        return _LinearSession(left, right)


class _LatentSession(ClipSession):
    def __init__(self, left: Frame, right: Frame, motion_text: str, amplitude: float):
        self._left = left
        self._right = right
        self._amplitude = amplitude
        self._planes, self._height, self._width = left.shape
        z0 = np.stack([block_dct(pad_to_block(left[p])) for p in range(self._planes)])
        z1 = np.stack([block_dct(pad_to_block(right[p])) for p in range(self._planes)])
        base = 0.5 * (z0 + z1)
        self._adapter0 = z0 - base
        self._adapter1 = z1 - base
        field = uniform_field(fnv1a64(motion_text.encode("utf-8")), z0.shape)
        norm = np.linalg.norm(field)
        self._field = field / norm if norm > 0 else field

    def frame_real(self, frame_w, model_w, t_frac):
        blend = blend_real(self._left, self._right, frame_w)
        latent = np.stack([block_dct(pad_to_block(blend[p])) for p in range(self._planes)])
        latent += interpolate_adapters(self._adapter0, self._adapter1, model_w)
        latent -= frame_w * self._adapter0 + (1.0 - frame_w) * self._adapter1
        latent += np.sin(np.pi * t_frac) * self._amplitude * self._field
        out = np.stack([block_idct(latent[p]) for p in range(self._planes)])
        out = out[:, : self._height, : self._width]
        return np.clip(out, 0.0, 255.0)


class LatentAdapterBackend(Backend):
    """Blockwise-DCT blending with adapter deltas and text modulation.

    With text_amplitude 0 and equal frame/model weights the latent path
    algebraically collapses to the pixel blend, so its 8-bit output can
    differ from the linear backend by at most one level (rounding ties).
    """

    name = "latent"

    def __init__(self, text_amplitude: float = 0.0):
        if text_amplitude < 0:
            raise ContractError("text_amplitude must be non-negative")
        self.text_amplitude = float(text_amplitude)

    def clip_session(self, left, right, motion_text):
        check_frame(left, "left")
        check_frame(right, "right")
        if left.shape != right.shape:
            raise ContractError(f"keyframe geometry differs: {left.shape} vs {right.shape}")
        return _LatentSession(left, right, motion_text, self.text_amplitude)


def placeholder_frames(
    keyframe_text: str,
    motion_text: str,
    width: int,
    height: int,
    planes: int,
    offsets: list[int],
) -> list[Frame]:
    """Deterministic stand-in frames for text-only decoding.

    Each frame is a pseudorandom field seeded by the keyframe text, the
    motion text and the frame offset, so identical streams decode to
    identical pixels everywhere.
    """
    out = []
    for off in offsets:
        seed = fnv1a64(
            keyframe_text.encode("utf-8")
            + b"\x00"
            + motion_text.encode("utf-8")
            + b"\x00"
            + int(off).to_bytes(8, "big")
        )
        out.append(byte_field(seed, (planes, height, width)).copy())
    return out


def _read_exact(stream, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = stream.read(remaining)
        if not chunk:
            raise ProtocolViolationError(f"backend closed its pipe with {remaining} bytes pending")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def write_message(stream, obj: dict) -> None:
    data = json.dumps(obj, separators=(",", ":")).encode("utf-8")
    stream.write(len(data).to_bytes(4, "big") + data)
    stream.flush()


def read_message(stream) -> dict:
    length = int.from_bytes(_read_exact(stream, 4), "big")
    if length > _MAX_MESSAGE:
        raise ProtocolViolationError(f"announced message length {length} is implausible")
    try:
        msg = json.loads(_read_exact(stream, length).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolViolationError(f"backend sent invalid JSON: {exc}") from None
    if not isinstance(msg, dict) or "type" not in msg:
        raise ProtocolViolationError("backend message has no type field")
    return msg


class _ExternalSession(ClipSession):
    def __init__(self, backend: "ExternalBackend", left: Frame, right: Frame, motion_text: str):
        self._backend = backend
        self._left = left
        self._right = right
        self._text = motion_text

    def frame_real(self, frame_w, model_w, t_frac):
        # the wire carries whole clips; a one-frame request stands in for
        # single-frame rendering, so t_frac is pinned at 1/2 on this path
        track = WeightTrack((min(max(frame_w, 0.0), 1.0),), (min(max(model_w, 0.0), 1.0),))
        request = GenerationRequest(self._left, self._right, self._text, track, 1)
        return self._backend.generate(request)[0].astype(np.float64)


class ExternalBackend(Backend):
    """Drives a generation process over length-prefixed JSON on stdio."""

    name = "external"

    def __init__(self, command: str | list[str]):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not argv:
            raise ConfigError("external backend command is empty")
        try:
            self._proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE
            )
        except OSError as exc:
            raise BackendUnavailableError(f"cannot spawn {argv[0]!r}: {exc}") from None
        try:
            write_message(self._proc.stdin, {"type": "hello", "version": PROTOCOL_VERSION})
            reply = read_message(self._proc.stdout)
            if reply.get("type") != "hello" or reply.get("version") != PROTOCOL_VERSION:
                self._proc.kill()
                self._proc.wait()
                raise BackendUnavailableError(f"handshake refused: {reply}")
        except (ProtocolViolationError, BrokenPipeError, OSError) as exc:
            self._proc.kill()
            self._proc.wait()
            raise BackendUnavailableError(f"handshake failed: {exc}") from None

    def clip_session(self, left, right, motion_text):
        return _ExternalSession(self, left, right, motion_text)

    def generate(self, request: GenerationRequest) -> list[Frame]:
        planes, height, width = request.left.shape
        count = request.intermediate_count
        if count == 0:
            return []
        try:
            write_message(
                self._proc.stdin,
                {
                    "type": "generate",
                    "width": width,
                    "height": height,
                    "planes": planes,
                    "count": count,
                    "motion_text": request.motion_text,
                    "weights_i": list(request.weights.frame_weights),
                    "weights_l": list(request.weights.model_weights),
                },
            )
            self._proc.stdin.write(request.left.tobytes())
            self._proc.stdin.write(request.right.tobytes())
            self._proc.stdin.flush()
            reply = read_message(self._proc.stdout)
        except (BrokenPipeError, OSError) as exc:
            raise BackendUnavailableError(f"backend pipe failed: {exc}") from None
        if reply.get("type") == "error":
            raise BackendReportedError(str(reply.get("message", "unspecified backend error")))
        if reply.get("type") != "frames":
            raise ProtocolViolationError(f"expected a frames reply, got {reply}")
        if reply.get("count") != count:
            raise ProtocolViolationError(
                f"backend announced {reply.get('count')} frames, requested {count}"
            )
        frames = []
        size = planes * height * width
        for _ in range(count):
            raw = _read_exact(self._proc.stdout, size)
            frames.append(
                np.frombuffer(raw, dtype=np.uint8).reshape(planes, height, width).copy()
            )
        return frames

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                write_message(self._proc.stdin, {"type": "bye"})
                self._proc.stdin.close()
            except (BrokenPipeError, OSError):
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()


def get_backend(spec: str | Backend) -> Backend:
    """Resolve 'linear', 'latent' or 'external:<command>' to a backend."""
    if isinstance(spec, Backend):
        return spec
    if spec == "linear":
        return LinearBackend()
    if spec == "latent":
        return LatentAdapterBackend()
    if spec.startswith("external:"):
        return ExternalBackend(spec[len("external:") :])
    raise ConfigError(f"unknown backend {spec!r}")
