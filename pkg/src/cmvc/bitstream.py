"""Byte-exact stream container: header, tagged clip sections, CRC32.

Layout, all big-endian:

  header, 20 bytes
    magic "CMVC" | version u8 = 1 | mode u8 (0 text-only, 1 image)
    width u16 | height u16 | planes u8 | frame_count u16
    frame_rate_num u16 | frame_rate_den u16 | clip_count u16
    reserved u8 = 0
  per clip
    start u16 | end u16 | section_count u8
    per section: tag 4 ascii bytes | length u32 | payload
  crc32 u32 over every preceding byte (polynomial 0xEDB88320)

Clips must tile [0, frame_count - 1] and share boundaries. Text-only
clips carry KTXT then MTXT; image clips carry KIMG, MTXT and optionally
WGTS. The key section covers the clip's left keyframe; the final clip
carries a second key section for the right keyframe, always directly
after the first.
"""

from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    ContractError,
    CorruptStreamError,
    MalformedStreamError,
    UnsupportedStreamError,
)

MAGIC = b"CMVC"
VERSION = 1
HEADER_SIZE = 20
SECTION_TAGS = ("KIMG", "KTXT", "MTXT", "WGTS")


class Mode(enum.IntEnum):
    TT2V = 0  # keyframes travel as text
    IT2V = 1  # keyframes travel as coded images


@dataclass(frozen=True)
class StreamHeader:
    mode: Mode
    width: int
    height: int
    planes: int
    frame_count: int
    frame_rate_num: int
    frame_rate_den: int
    clip_count: int

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        for name in ("width", "height", "frame_count", "frame_rate_num", "frame_rate_den", "clip_count"):
            v = getattr(self, name)
            if not 1 <= v <= 65535:
                raise ContractError(f"{name} must fit in a nonzero u16, got {v}")
        if self.planes not in (1, 3):
            raise ContractError(f"planes must be 1 or 3, got {self.planes}")
        if self.frame_count < 2:
            raise ContractError("frame_count must be at least 2")

    @property
    def frame_rate(self) -> Fraction:
        return Fraction(self.frame_rate_num, self.frame_rate_den)


@dataclass(frozen=True)
class Section:
    tag: str
    payload: bytes

    def __post_init__(self):
        if self.tag not in SECTION_TAGS:
            raise ContractError(f"unknown section tag {self.tag!r}")
        if len(self.payload) > 0xFFFFFFFF:
            raise ContractError("section payload exceeds u32 length")


@dataclass(frozen=True)
class ClipRecord:
    start_index: int
    end_index: int
    sections: tuple[Section, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "sections", tuple(self.sections))
        if not 0 <= self.start_index < self.end_index <= 65535:
            raise ContractError(
                f"clip indices must satisfy 0 <= start < end <= 65535, got [{self.start_index}, {self.end_index}]"
            )
        if len(self.sections) > 255:
            raise ContractError("a clip holds at most 255 sections")

    def payloads(self, tag: str) -> list[bytes]:
        return [s.payload for s in self.sections if s.tag == tag]


@dataclass(frozen=True)
class RateBreakdown:
    keyframe_bits: int
    motion_bits: int
    weight_bits: int
    header_bits: int

    @property
    def total_bits(self) -> int:
        return self.keyframe_bits + self.motion_bits + self.weight_bits + self.header_bits

    def as_dict(self) -> dict[str, int]:
        return {
            "keyframe_bits": self.keyframe_bits,
            "motion_bits": self.motion_bits,
            "weight_bits": self.weight_bits,
            "header_bits": self.header_bits,
            "total_bits": self.total_bits,
        }


def _check_structure(header: StreamHeader, clips: tuple[ClipRecord, ...], error) -> None:
    if len(clips) != header.clip_count:
        raise error(f"header announces {header.clip_count} clips, found {len(clips)}")
    if clips[0].start_index != 0:
        raise error("the first clip must start at frame 0")
    if clips[-1].end_index != header.frame_count - 1:
        raise error("the last clip must end at the last frame")
    for left, right in zip(clips, clips[1:]):
        if left.end_index != right.start_index:
            raise error(
                f"clips [{left.start_index}, {left.end_index}] and "
                f"[{right.start_index}, {right.end_index}] do not share a boundary"
            )
    key_tag = "KTXT" if header.mode is Mode.TT2V else "KIMG"
    for i, clip in enumerate(clips):
        tags = [s.tag for s in clip.sections]
        keys = 2 if i == len(clips) - 1 else 1
        allowed = [key_tag] * keys + ["MTXT"]
        if tags != allowed and not (
            header.mode is Mode.IT2V and tags == allowed + ["WGTS"]
        ):
            raise error(f"clip {i} has section tags {tags}, expected {allowed} (+WGTS for image mode)")


def mux(header: StreamHeader, clips: list[ClipRecord] | tuple[ClipRecord, ...]) -> bytes:
    """Serialize a validated header and clip list, appending the CRC."""
    clips = tuple(clips)
    if not clips:
        raise ContractError("a stream needs at least one clip")
    _check_structure(header, clips, ContractError)
    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(int(header.mode))
    out += header.width.to_bytes(2, "big")
    out += header.height.to_bytes(2, "big")
    out.append(header.planes)
    out += header.frame_count.to_bytes(2, "big")
    out += header.frame_rate_num.to_bytes(2, "big")
    out += header.frame_rate_den.to_bytes(2, "big")
    out += header.clip_count.to_bytes(2, "big")
    out.append(0)  # reserved
    for clip in clips:
        out += clip.start_index.to_bytes(2, "big")
        out += clip.end_index.to_bytes(2, "big")
        out.append(len(clip.sections))
        for section in clip.sections:
            out += section.tag.encode("ascii")
            out += len(section.payload).to_bytes(4, "big")
            out += section.payload
    out += zlib.crc32(bytes(out)).to_bytes(4, "big")
    return bytes(out)


def demux(stream: bytes) -> tuple[StreamHeader, tuple[ClipRecord, ...]]:
    """Parse and validate a stream produced by :func:`mux`."""
    if len(stream) < len(MAGIC):
        raise MalformedStreamError(f"stream is {len(stream)} bytes, too short for the magic")
    if stream[: len(MAGIC)] != MAGIC:
        raise UnsupportedStreamError(f"bad magic {stream[:4]!r}")
    if stream[4] != VERSION:
        raise UnsupportedStreamError(f"unsupported version {stream[4]}")
    if len(stream) < HEADER_SIZE + 4:
        raise MalformedStreamError("stream is shorter than a header plus checksum")
    stored = int.from_bytes(stream[-4:], "big")
    actual = zlib.crc32(stream[:-4])
    if stored != actual:
        raise CorruptStreamError(f"crc mismatch: stored {stored:08x}, computed {actual:08x}")
    mode = stream[5]
    if mode not in (0, 1):
        raise MalformedStreamError(f"unknown mode byte {mode}")
    if stream[19] != 0:
        raise MalformedStreamError("reserved header byte is nonzero")
    try:
        header = StreamHeader(
            mode=Mode(mode),
            width=int.from_bytes(stream[6:8], "big"),
            height=int.from_bytes(stream[8:10], "big"),
            planes=stream[10],
            frame_count=int.from_bytes(stream[11:13], "big"),
            frame_rate_num=int.from_bytes(stream[13:15], "big"),
            frame_rate_den=int.from_bytes(stream[15:17], "big"),
            clip_count=int.from_bytes(stream[17:19], "big"),
        )
    except ContractError as exc:
        raise MalformedStreamError(f"invalid header: {exc}") from None
    body = stream[:-4]
    off = HEADER_SIZE
    clips = []
    for _ in range(header.clip_count):
        if off + 5 > len(body):
            raise MalformedStreamError("stream truncated inside a clip record")
        start = int.from_bytes(body[off : off + 2], "big")
        end = int.from_bytes(body[off + 2 : off + 4], "big")
        n_sections = body[off + 4]
        off += 5
        sections = []
        for _ in range(n_sections):
            if off + 8 > len(body):
                raise MalformedStreamError("stream truncated inside a section header")
            try:
                tag = body[off : off + 4].decode("ascii")
            except UnicodeDecodeError:
                raise MalformedStreamError("section tag is not ascii") from None
            length = int.from_bytes(body[off + 4 : off + 8], "big")
            off += 8
            if off + length > len(body):
                raise MalformedStreamError("stream truncated inside a section payload")
            payload = body[off : off + length]
            off += length
            try:
                sections.append(Section(tag, payload))
            except ContractError as exc:
                raise MalformedStreamError(str(exc)) from None
        try:
            clips.append(ClipRecord(start, end, tuple(sections)))
        except ContractError as exc:
            raise MalformedStreamError(str(exc)) from None
    if off != len(body):
        raise MalformedStreamError(f"{len(body) - off} unparsed bytes before the checksum")
    clips = tuple(clips)
    _check_structure(header, clips, MalformedStreamError)
    return header, clips


def rate_breakdown(stream: bytes) -> RateBreakdown:
    """Split the stream's bits by role; the parts always sum to 8x length."""
    _, clips = demux(stream)
    keyframe = motion = weight = 0
    for clip in clips:
        for section in clip.sections:
            bits = 8 * len(section.payload)
            if section.tag in ("KIMG", "KTXT"):
                keyframe += bits
            elif section.tag == "MTXT":
                motion += bits
            else:
                weight += bits
    header_bits = 8 * len(stream) - keyframe - motion - weight
    return RateBreakdown(keyframe, motion, weight, header_bits)
