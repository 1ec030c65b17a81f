"""Video value types, headerless raw I/O and bit accounting."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ContractError, MalformedInputError, TooShortError

# A frame is a (planes, height, width) uint8 array, row-major per plane.
Frame = np.ndarray


def check_frame(frame: np.ndarray, name: str = "frame") -> np.ndarray:
    if not isinstance(frame, np.ndarray) or frame.ndim != 3:
        raise ContractError(f"{name} must be a (planes, height, width) array")
    if frame.dtype != np.uint8:
        raise ContractError(f"{name} must have dtype uint8, got {frame.dtype}")
    if frame.shape[0] not in (1, 3):
        raise ContractError(f"{name} must have 1 or 3 planes, got {frame.shape[0]}")
    return frame


@dataclass(frozen=True)
class RawVideo:
    """A decoded video: geometry, frame rate and all sample data."""

    width: int
    height: int
    planes: int
    frame_rate: Fraction
    frames: np.ndarray  # (frame_count, planes, height, width) uint8

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ContractError("frame dimensions must be positive")
        if self.planes not in (1, 3):
            raise ContractError(f"planes must be 1 or 3, got {self.planes}")
        if self.frame_rate <= 0:
            raise ContractError("frame rate must be positive")
        f = self.frames
        if not isinstance(f, np.ndarray) or f.dtype != np.uint8:
            raise ContractError("frames must be a uint8 array")
        expected = (self.planes, self.height, self.width)
        if f.ndim != 4 or f.shape[1:] != expected:
            raise ContractError(
                f"frames must have shape (N, {expected[0]}, {expected[1]}, {expected[2]}), got {f.shape}"
            )
        if f.shape[0] < 2:
            raise TooShortError(f"a video needs at least 2 frames, got {f.shape[0]}")
        f.setflags(write=False)

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    def frame(self, index: int) -> Frame:
        if not 0 <= index < self.frame_count:
            raise ContractError(f"frame index {index} out of range [0, {self.frame_count})")
        return self.frames[index]


@dataclass(frozen=True)
class ClipSpan:
    """Inclusive frame range between two consecutive keyframes."""

    start_index: int
    end_index: int

    def __post_init__(self):
        if self.start_index < 0 or self.start_index >= self.end_index:
            raise ContractError(
                f"clip span must satisfy 0 <= start < end, got [{self.start_index}, {self.end_index}]"
            )

    @property
    def intermediate_count(self) -> int:
        return self.end_index - self.start_index - 1


def load_raw_video(
    path: str | Path,
    width: int,
    height: int,
    planes: int,
    frame_rate: Fraction = Fraction(30, 1),
) -> RawVideo:
    """Read a headerless planar 8-bit file (frame-major, plane-major, row-major)."""
    if width < 1 or height < 1:
        raise ContractError("frame dimensions must be positive")
    if planes not in (1, 3):
        raise ContractError(f"planes must be 1 or 3, got {planes}")
    data = Path(path).read_bytes()
    frame_size = width * height * planes
    if len(data) % frame_size != 0:
        raise MalformedInputError(
            f"file length {len(data)} is not a multiple of the frame size {frame_size}"
        )
    n = len(data) // frame_size
    if n < 2:
        raise TooShortError(f"a video needs at least 2 frames, got {n}")
    frames = np.frombuffer(data, dtype=np.uint8).reshape(n, planes, height, width).copy()
    return RawVideo(width, height, planes, frame_rate, frames)


def write_raw_video(video: RawVideo, path: str | Path) -> None:
    """Write frames back in the same headerless planar layout."""
    Path(path).write_bytes(video.frames.tobytes())


def compute_bpp(total_bits: int, video: RawVideo) -> float:
    """Bits per pixel: total bits over width * height * frame_count.

    The plane count deliberately does not enter the denominator.
    """
    if total_bits < 0:
        raise ContractError("total_bits must be non-negative")
    return total_bits / (video.width * video.height * video.frame_count)
