"""Keyframe selection over pooled frame features, plus clip splitting.

The built-in feature provider pools the first plane onto a 16x16 grid,
centers it and normalizes to unit length. Providers are swappable: any
per-frame vector sequence of a common dimension can be passed in, e.g.
features loaded from a sidecar file.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, MalformedInputError
from .rng import SplitMix64
from .video import ClipSpan, Frame, RawVideo, check_frame

EMBED_GRID = 16


class Strategy(enum.Enum):
    COSINE = "cosine"
    MSE = "mse"
    UNIFORM = "uniform"
    RANDOM = "random"


@dataclass(frozen=True)
class KeyframeSet:
    indices: tuple[int, ...]
    strategy: Strategy

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if len(idx) < 2:
            raise ContractError("a keyframe set needs at least two indices")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ContractError(f"keyframe indices must be strictly increasing: {idx}")
        if idx[0] != 0:
            raise ContractError("the first keyframe must be frame 0")

    def __len__(self) -> int:
        return len(self.indices)


def _band_sums(plane: np.ndarray, cells: int) -> np.ndarray:
    """Area-weighted sums of `cells` equal row bands; returns (cells, W)."""
    n = plane.shape[0]
    cum = np.vstack([np.zeros((1, plane.shape[1])), np.cumsum(plane, axis=0, dtype=np.float64)])
    edges = (np.arange(cells + 1) * n) / cells
    idx = np.minimum(np.floor(edges).astype(np.int64), n)
    frac = edges - idx
    gather = plane[np.minimum(idx, n - 1)].astype(np.float64)
    vals = cum[idx] + gather * frac[:, None]
    return vals[1:] - vals[:-1]


def embed_frame(frame: Frame) -> np.ndarray:
    """Pooled, centered, unit-norm feature vector of the first plane.

    Constant frames have no direction after centering; they map to the
    fixed basis vector (1, 0, ..., 0).
    """
    check_frame(frame)
    plane = frame[0]
    rows = _band_sums(plane, EMBED_GRID)
    grid = _band_sums(rows.T, EMBED_GRID).T
    area = (plane.shape[0] / EMBED_GRID) * (plane.shape[1] / EMBED_GRID)
    pooled = (grid / area).reshape(-1)
    centered = pooled - pooled.mean()
    norm = np.linalg.norm(centered)
    if norm < 1e-12:
        out = np.zeros(EMBED_GRID * EMBED_GRID)
        out[0] = 1.0
        return out
    return centered / norm


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise ContractError(f"feature dimensions differ: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ContractError("cosine similarity of a zero vector is undefined")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def load_features(path: str | Path, expected_count: int | None = None) -> list[np.ndarray]:
    """Read one whitespace-separated float vector per line."""
    rows = []
    for ln, line in enumerate(Path(path).read_text().splitlines()):
        if not line.strip():
            continue
        try:
            rows.append(np.array([float(tok) for tok in line.split()], dtype=np.float64))
        except ValueError as exc:
            raise MalformedInputError(f"feature file line {ln + 1}: {exc}") from None
    if not rows:
        raise MalformedInputError("feature file holds no vectors")
    dim = rows[0].shape[0]
    if any(r.shape[0] != dim for r in rows):
        raise MalformedInputError("feature vectors have mixed dimensions")
    if expected_count is not None and len(rows) != expected_count:
        raise MalformedInputError(
            f"feature file holds {len(rows)} vectors, expected {expected_count}"
        )
    return rows


def interior_intervals(frame_count: int, n: int) -> list[tuple[int, int]]:
    """Split interior frames [1, N-2] into n-2 contiguous intervals."""
    spans = []
    total = frame_count - 2
    parts = n - 2
    for b in range(parts):
        lo = 1 + (b * total) // parts
        hi = ((b + 1) * total) // parts
        spans.append((lo, hi))
    return spans


def select_keyframes(
    video: RawVideo,
    n: int,
    strategy: Strategy | str = Strategy.COSINE,
    seed: int = 0,
    features: list[np.ndarray] | None = None,
) -> KeyframeSet:
    """Pick n keyframe indices; frames 0 and N-1 are always included.

    Each interior interval contributes one keyframe. The cosine strategy
    keeps a moving anchor feature, picks the least similar candidate
    (ties to the lowest index) and re-anchors on it; mse does the same
    with raw-pixel mean squared distance, picking the farthest.
    """
    strategy = Strategy(strategy)
    count = video.frame_count
    if not 2 <= n <= count:
        raise ContractError(f"keyframe count {n} must lie in [2, {count}]")
    indices = [0]
    if n > 2:
        intervals = interior_intervals(count, n)
        if strategy is Strategy.COSINE:
            if features is None:
                feats = [embed_frame(video.frame(i)) for i in range(count)]
            else:
                if len(features) < count:
                    raise ContractError(
                        f"{len(features)} feature vectors for {count} frames"
                    )
                feats = [np.asarray(f, dtype=np.float64) for f in features]
            anchor = feats[0]
            for lo, hi in intervals:
                best = lo
                best_sim = cosine_similarity(anchor, feats[lo])
                for i in range(lo + 1, hi + 1):
                    sim = cosine_similarity(anchor, feats[i])
                    if sim < best_sim:
                        best = i
                        best_sim = sim
                indices.append(best)
                anchor = feats[best]
        elif strategy is Strategy.MSE:
            anchor = video.frame(0).astype(np.float64)
            for lo, hi in intervals:
                best = lo
                best_dist = -1.0
                for i in range(lo, hi + 1):
                    dist = float(np.mean((video.frame(i).astype(np.float64) - anchor) ** 2))
                    if dist > best_dist:
                        best = i
                        best_dist = dist
                indices.append(best)
                anchor = video.frame(best).astype(np.float64)
        elif strategy is Strategy.UNIFORM:
            indices.extend((lo + hi) // 2 for lo, hi in intervals)
        else:
            rng = SplitMix64(seed)
            indices.extend(lo + rng.next_below(hi - lo + 1) for lo, hi in intervals)
    indices.append(count - 1)
    return KeyframeSet(tuple(indices), strategy)


def split_into_clips(video: RawVideo, keyframes: KeyframeSet) -> list[ClipSpan]:
    """Consecutive keyframe pairs; adjacent clips share their boundary."""
    idx = keyframes.indices
    if idx[-1] != video.frame_count - 1:
        raise ContractError("the last keyframe must be the last frame")
    return [ClipSpan(a, b) for a, b in zip(idx, idx[1:])]
