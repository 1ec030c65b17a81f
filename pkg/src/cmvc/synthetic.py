"""Deterministic synthetic videos for demos, experiments and tests."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .rng import byte_field, uniform_field
from .video import RawVideo


def demo_video(
    frame_count: int = 16,
    width: int = 64,
    height: int = 64,
    planes: int = 1,
    frame_rate: Fraction = Fraction(30, 1),
) -> RawVideo:
    """Moving gradient with a bright block panning across it."""
    ys = np.arange(height).reshape(-1, 1)
    xs = np.arange(width).reshape(1, -1)
    frames = np.empty((frame_count, planes, height, width), dtype=np.uint8)
    for t in range(frame_count):
        base = (xs * 2 + ys + 5 * t) % 224
        frame = base.astype(np.float64)
        bx = (4 + 3 * t) % max(1, width - 8)
        by = (8 + 2 * t) % max(1, height - 8)
        frame[by : by + 8, bx : bx + 8] = 250.0
        for p in range(planes):
            frames[t, p] = np.clip(frame + 2 * p, 0, 255).astype(np.uint8)
    return RawVideo(width, height, planes, frame_rate, frames)


def noise_video(
    seed: int,
    frame_count: int = 8,
    width: int = 32,
    height: int = 32,
    planes: int = 1,
    frame_rate: Fraction = Fraction(30, 1),
) -> RawVideo:
    """Independent uniform noise in every frame."""
    frames = byte_field(seed, (frame_count, planes, height, width))
    return RawVideo(width, height, planes, frame_rate, frames.copy())


def textured_video(
    seed: int,
    frame_count: int = 8,
    width: int = 48,
    height: int = 48,
    planes: int = 1,
    frame_rate: Fraction = Fraction(30, 1),
) -> RawVideo:
    """Smooth gradient plus mild noise; compresses at every quality tier."""
    ys = np.arange(height).reshape(-1, 1)
    xs = np.arange(width).reshape(1, -1)
    noise = uniform_field(seed, (frame_count, planes, height, width)) * 24.0
    frames = np.empty((frame_count, planes, height, width), dtype=np.uint8)
    for t in range(frame_count):
        base = 96.0 + 60.0 * np.sin(xs / 9.0 + 0.35 * t) + 40.0 * np.cos(ys / 7.0 - 0.2 * t)
        for p in range(planes):
            frames[t, p] = np.clip(base + noise[t, p] + 4 * p, 0, 255).astype(np.uint8)
    return RawVideo(width, height, planes, frame_rate, frames)


def blend_video(
    left: np.ndarray,
    right: np.ndarray,
    schedule: list[float],
    frame_rate: Fraction = Fraction(30, 1),
) -> RawVideo:
    """Video whose interior frames are rounded blends of the two endpoints.

    ``schedule`` holds one blend weight per interior frame; weight w puts
    w of the left endpoint and 1 - w of the right into the frame.
    """
    planes, height, width = left.shape
    frames = [left]
    lf = left.astype(np.float64)
    rf = right.astype(np.float64)
    for w in schedule:
        blend = w * lf + (1.0 - w) * rf
        frames.append(np.clip(np.floor(blend + 0.5), 0, 255).astype(np.uint8))
    frames.append(right)
    return RawVideo(width, height, planes, frame_rate, np.stack(frames))
