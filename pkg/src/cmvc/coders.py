"""Text and interpolation-weight payload codecs.

Text payloads are a 2-byte big-endian plaintext length followed by the
arithmetic-coded UTF-8 bytes. Weight payloads are a 2-byte pair count
followed by interleaved 16-bit fixed-point (frame, model) weights.
"""

from __future__ import annotations

from dataclasses import dataclass

from .entropy import decode_bytes, encode_bytes
from .errors import ContractError, MalformedPayloadError

MAX_TEXT_BYTES = 65535
_WEIGHT_SCALE = 65535


def encode_text(text: str) -> bytes:
    raw = text.encode("utf-8")
    if len(raw) > MAX_TEXT_BYTES:
        raise ContractError(f"text is {len(raw)} bytes, limit is {MAX_TEXT_BYTES}")
    return len(raw).to_bytes(2, "big") + encode_bytes(raw)

def decode_text(payload: bytes) -> str:
    if len(payload) < 2:
        raise MalformedPayloadError("text payload shorter than its length prefix")
    n = int.from_bytes(payload[:2], "big")
    body = payload[2:]
    if n == 0:
        if body:
            raise MalformedPayloadError("empty text carries trailing bytes")
        return ""
    if not body:
        raise MalformedPayloadError("text payload is missing its coded body")
    raw = decode_bytes(body, n)
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedPayloadError(f"decoded text is not valid UTF-8: {exc}") from None


@dataclass(frozen=True)
class WeightTrack:
    """Per-frame blend weights: one frame-space and one model-space scalar."""

    frame_weights: tuple[float, ...]
    model_weights: tuple[float, ...]

    def __post_init__(self):
        fw = tuple(float(w) for w in self.frame_weights)
        mw = tuple(float(w) for w in self.model_weights)
        object.__setattr__(self, "frame_weights", fw)
        object.__setattr__(self, "model_weights", mw)
        if len(fw) != len(mw):
            raise ContractError("frame and model weight lists must have equal length")
        for w in fw + mw:
            if not (0.0 <= w <= 1.0):
                raise ContractError(f"weights must lie in [0, 1], got {w}")

    def __len__(self) -> int:
        return len(self.frame_weights)

    @classmethod
    def linear(cls, count: int) -> "WeightTrack":
        """Schedule 1 - k/(count+1): slides from the left key to the right."""
        if count < 0:
            raise ContractError("count must be non-negative")
        ws = tuple(1.0 - (k + 1) / (count + 1) for k in range(count))
        return cls(ws, ws)


def _quantize(w: float) -> int:
    return int(w * _WEIGHT_SCALE + 0.5)


def encode_weights(track: WeightTrack) -> bytes:
    n = len(track)
    if n > 65535:
        raise ContractError("weight track longer than 65535 entries")
    out = bytearray(n.to_bytes(2, "big"))
    for fw, mw in zip(track.frame_weights, track.model_weights):
        out += _quantize(fw).to_bytes(2, "big")
        out += _quantize(mw).to_bytes(2, "big")
    return bytes(out)


def decode_weights(payload: bytes) -> WeightTrack:
    if len(payload) < 2:
        raise MalformedPayloadError("weight payload shorter than its count prefix")
    n = int.from_bytes(payload[:2], "big")
    if len(payload) != 2 + 4 * n:
        raise MalformedPayloadError(
            f"weight payload length {len(payload)} does not match count {n}"
        )
    fw = []
    mw = []
    for k in range(n):
        off = 2 + 4 * k
        fw.append(int.from_bytes(payload[off : off + 2], "big") / _WEIGHT_SCALE)
        mw.append(int.from_bytes(payload[off + 2 : off + 4], "big") / _WEIGHT_SCALE)
    return WeightTrack(tuple(fw), tuple(mw))
