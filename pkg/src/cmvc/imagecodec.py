"""Block-DCT keyframe image codec with three fixed quality tiers.

Pipeline per plane: pad to 8x8 multiples by edge replication, blockwise
orthonormal DCT, uniform quantization with step 2048/quality, zigzag
scan, zero-run tokens, then one adaptive arithmetic coding pass over the
whole token stream. Decode mirrors it and crops the padding.

Payload layout (big-endian): width u16, height u16, planes u8, quality
code u8 (0 -> 64, 1 -> 128, 2 -> 256), token byte count u32, coded body.
"""

from __future__ import annotations

import numpy as np

from .entropy import decode_bytes, encode_bytes
from .errors import ContractError, MalformedPayloadError
from .transform import BLOCK, block_dct, block_idct, pad_to_block
from .video import Frame, check_frame

QUALITY_FACTORS = (64, 128, 256)
_BASE_STEP = 2048
_QUALITY_CODES = {64: 0, 128: 1, 256: 2}
_CODE_QUALITIES = {v: k for k, v in _QUALITY_CODES.items()}
_REST_ZERO = 64  # token: every remaining coefficient in the block is zero


def quant_step(quality: int) -> int:
    if quality not in _QUALITY_CODES:
        raise ContractError(f"quality must be one of {QUALITY_FACTORS}, got {quality}")
    return _BASE_STEP // quality


def _zigzag_order() -> np.ndarray:
    order = []
    for s in range(2 * BLOCK - 1):
        ks = range(max(0, s - BLOCK + 1), min(BLOCK - 1, s) + 1)
        diag = [(k, s - k) for k in ks]
        if s % 2 == 0:
            diag.reverse()
        order.extend(i * BLOCK + j for i, j in diag)
    return np.array(order, dtype=np.int64)


_ZIGZAG = _zigzag_order()


def _append_varint(out: bytearray, value: int) -> None:
    z = 2 * value if value >= 0 else -2 * value - 1
    while z >= 0x80:
        out.append((z & 0x7F) | 0x80)
        z >>= 7
    out.append(z)


class _TokenReader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def byte(self) -> int:
        if self._pos >= len(self._data):
            raise MalformedPayloadError("token stream ended inside a block")
        b = self._data[self._pos]
        self._pos += 1
        return b

    def varint(self) -> int:
        z = 0
        shift = 0
        while True:
            b = self.byte()
            z |= (b & 0x7F) << shift
            if not b & 0x80:
                break
            shift += 7
            if shift > 63:
                raise MalformedPayloadError("coefficient varint is too long")
        if z == 0:
            raise MalformedPayloadError("zero coefficient coded as nonzero")
        return z // 2 if z % 2 == 0 else -(z + 1) // 2

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._data)


def _tokenize_block(zz: np.ndarray, out: bytearray) -> None:
    pos = 0
    while pos < 64:
        run = 0
        while pos + run < 64 and zz[pos + run] == 0:
            run += 1
        if pos + run == 64:
            out.append(_REST_ZERO)
            return
        out.append(run)
        _append_varint(out, int(zz[pos + run]))
        pos += run + 1


def _read_block(reader: _TokenReader) -> np.ndarray:
    zz = np.zeros(64, dtype=np.int64)
    pos = 0
    while pos < 64:
        t = reader.byte()
        if t == _REST_ZERO:
            return zz
        if t > _REST_ZERO:
            raise MalformedPayloadError(f"invalid run token {t}")
        pos += t
        if pos >= 64:
            raise MalformedPayloadError("zero run overflows the block")
        zz[pos] = reader.varint()
        pos += 1
    return zz


def encode_keyframe(frame: Frame, quality: int) -> bytes:
    check_frame(frame)
    step = quant_step(quality)
    planes, height, width = frame.shape
    if height > 65535 or width > 65535:
        raise ContractError("frame dimensions exceed the u16 payload header")
    tokens = bytearray()
    for p in range(planes):
        coeff = block_dct(pad_to_block(frame[p]))
        quantized = np.floor(coeff / step + 0.5).astype(np.int64)
        hb = quantized.shape[0] // BLOCK
        wb = quantized.shape[1] // BLOCK
        blocks = quantized.reshape(hb, BLOCK, wb, BLOCK).transpose(0, 2, 1, 3)
        for bi in range(hb):
            for bj in range(wb):
                _tokenize_block(blocks[bi, bj].reshape(64)[_ZIGZAG], tokens)
    header = (
        width.to_bytes(2, "big")
        + height.to_bytes(2, "big")
        + bytes([planes, _QUALITY_CODES[quality]])
        + len(tokens).to_bytes(4, "big")
    )
    return header + encode_bytes(bytes(tokens))


def decode_keyframe(payload: bytes) -> Frame:
    if len(payload) < 10:
        raise MalformedPayloadError("keyframe payload shorter than its header")
    width = int.from_bytes(payload[0:2], "big")
    height = int.from_bytes(payload[2:4], "big")
    planes = payload[4]
    qcode = payload[5]
    token_count = int.from_bytes(payload[6:10], "big")
    if width < 1 or height < 1:
        raise MalformedPayloadError("keyframe payload declares empty geometry")
    if planes not in (1, 3):
        raise MalformedPayloadError(f"keyframe payload declares {planes} planes")
    if qcode not in _CODE_QUALITIES:
        raise MalformedPayloadError(f"unknown quality code {qcode}")
    step = quant_step(_CODE_QUALITIES[qcode])
    ph = height + (-height) % BLOCK
    pw = width + (-width) % BLOCK
    n_blocks = planes * (ph // BLOCK) * (pw // BLOCK)
    # a block never needs more than 64 run bytes + 64 ten-byte varints
    if token_count > n_blocks * 64 * 11:
        raise MalformedPayloadError("token count is implausibly large")
    body = payload[10:]
    if token_count > 0 and not body:
        raise MalformedPayloadError("keyframe payload is missing its coded body")
    reader = _TokenReader(decode_bytes(body, token_count))
    inv_zigzag = np.argsort(_ZIGZAG)
    out = np.empty((planes, height, width), dtype=np.uint8)
    for p in range(planes):
        hb = ph // BLOCK
        wb = pw // BLOCK
        blocks = np.empty((hb, wb, BLOCK, BLOCK), dtype=np.float64)
        for bi in range(hb):
            for bj in range(wb):
                zz = _read_block(reader)
                blocks[bi, bj] = (zz[inv_zigzag] * float(step)).reshape(BLOCK, BLOCK)
        coeff = blocks.transpose(0, 2, 1, 3).reshape(ph, pw)
        plane = block_idct(coeff)
        out[p] = np.clip(np.floor(plane + 0.5), 0, 255)[:height, :width].astype(np.uint8)
    if not reader.exhausted:
        raise MalformedPayloadError("token stream has trailing data")
    return out
