"""Adaptive order-0 arithmetic coding over byte symbols.

32-bit integer coder. The model starts every byte count at 1, bumps the
coded symbol by 1 and halves all counts (rounding up, so nothing drops
to zero) once the total passes 2**16. Encoder and decoder walk the model
identically, which is what makes the payload layouts stable.
"""

from __future__ import annotations

import numpy as np

_STATE_BITS = 32
_FULL = (1 << _STATE_BITS) - 1
_HALF = 1 << (_STATE_BITS - 1)
_QUARTER = 1 << (_STATE_BITS - 2)
_MAX_TOTAL = 1 << 16


class _Model:
    def __init__(self):
        self.freq = np.ones(257, dtype=np.int64)
        self.freq[0] = 0  # cumulative table is built in place, slot 0 stays 0
        self.total = 256

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.freq)

    def update(self, symbol: int) -> None:
        self.freq[symbol + 1] += 1
        self.total += 1
        if self.total > _MAX_TOTAL:
            counts = (self.freq[1:] + 1) >> 1
            self.freq[1:] = counts
            self.total = int(counts.sum())


class _BitWriter:
    def __init__(self):
        self._out = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, bit: int) -> None:
        self._acc = (self._acc << 1) | bit
        self._nbits += 1
        if self._nbits == 8:
            self._out.append(self._acc)
            self._acc = 0
            self._nbits = 0

    def getvalue(self) -> bytes:
        if self._nbits:
            self._out.append(self._acc << (8 - self._nbits))
            self._acc = 0
            self._nbits = 0
        return bytes(self._out)


class _BitReader:
    """Reads bits most-significant first; past the end it yields zeros."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def read(self) -> int:
        byte_i = self._pos >> 3
        if byte_i >= len(self._data):
            self._pos += 1
            return 0
        bit = (self._data[byte_i] >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit


def encode_bytes(data: bytes) -> bytes:
    """Arithmetic-code a byte string. Empty input codes to empty output."""
    if not data:
        return b""
    model = _Model()
    writer = _BitWriter()
    low = 0
    high = _FULL
    pending = 0
    for symbol in data:
        cum = model.cumulative()
        total = model.total
        span = high - low + 1
        high = low + int(cum[symbol + 1]) * span // total - 1
        low = low + int(cum[symbol]) * span // total
        while True:
            if high < _HALF:
                writer.write(0)
                for _ in range(pending):
                    writer.write(1)
                pending = 0
            elif low >= _HALF:
                writer.write(1)
                for _ in range(pending):
                    writer.write(0)
                pending = 0
                low -= _HALF
                high -= _HALF
            elif low >= _QUARTER and high < _HALF + _QUARTER:
                pending += 1
                low -= _QUARTER
                high -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
        model.update(symbol)
    # one disambiguating bit; the reader pads with zeros afterwards
    pending += 1
    if low < _QUARTER:
        writer.write(0)
        for _ in range(pending):
            writer.write(1)
    else:
        writer.write(1)
        for _ in range(pending):
            writer.write(0)
    return writer.getvalue()


def decode_bytes(payload: bytes, count: int) -> bytes:
    """Decode exactly `count` symbols coded by :func:`encode_bytes`."""
    if count == 0:
        return b""
    model = _Model()
    reader = _BitReader(payload)
    code = 0
    for _ in range(_STATE_BITS):
        code = (code << 1) | reader.read()
    low = 0
    high = _FULL
    out = bytearray()
    for _ in range(count):
        cum = model.cumulative()
        total = model.total
        span = high - low + 1
        value = ((code - low + 1) * total - 1) // span
        # corrupt input can push value out of range; clamp so the walk
        # stays well-formed and the damage surfaces at the parse layer
        value = min(max(value, 0), total - 1)
        symbol = int(np.searchsorted(cum, value, side="right")) - 1
        high = low + int(cum[symbol + 1]) * span // total - 1
        low = low + int(cum[symbol]) * span // total
        while True:
            if high < _HALF:
                pass
            elif low >= _HALF:
                low -= _HALF
                high -= _HALF
                code -= _HALF
            elif low >= _QUARTER and high < _HALF + _QUARTER:
                low -= _QUARTER
                high -= _QUARTER
                code -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            code = (code << 1) | reader.read()
        out.append(symbol)
        model.update(symbol)
    return bytes(out)
