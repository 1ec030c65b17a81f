"""End-to-end encode and decode orchestration.

Encode selects keyframes, codes them (as images or text depending on
the mode), attaches per-clip motion text, optionally fits blend weights
against the original intermediates, and muxes everything. Decode
reverses it: keyframes come back through the image codec or the text
placeholder, intermediates through the chosen generation backend.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .backends import (
    Backend,
    GenerationRequest,
    get_backend,
    placeholder_frames,
)
from .bitstream import ClipRecord, Mode, Section, StreamHeader, demux, mux
from .coders import WeightTrack, decode_text, decode_weights, encode_text, encode_weights
from .errors import ConfigError, MalformedStreamError
from .imagecodec import QUALITY_FACTORS, decode_keyframe, encode_keyframe
from .keyframes import Strategy, load_features, select_keyframes, split_into_clips
from .optimizer import OptimizerConfig, optimize_weights
from .video import RawVideo

_HEADER_RE = re.compile(r"^\[(keyframe|clip) (\d+)\]$")


@dataclass(frozen=True)
class SidecarText:
    """Per-keyframe and per-clip free text, indexed from zero."""

    keyframe_texts: dict[int, str] = field(default_factory=dict)
    clip_texts: dict[int, str] = field(default_factory=dict)


def parse_sidecar(text: str) -> SidecarText:
    """Parse `[keyframe i]` / `[clip j]` sections; body lines are free text."""
    keyframes: dict[int, str] = {}
    clips: dict[int, str] = {}
    current: tuple[str, int] | None = None
    body: list[str] = []

    def flush():
        if current is None:
            return
        kind, index = current
        value = "\n".join(body).strip()
        store = keyframes if kind == "keyframe" else clips
        if index in store:
            raise ConfigError(f"duplicate sidecar section [{kind} {index}]")
        store[index] = value

    for line in text.splitlines():
        m = _HEADER_RE.match(line.strip())
        if m:
            flush()
            current = (m.group(1), int(m.group(2)))
            body = []
        else:
            if current is None and line.strip():
                raise ConfigError(f"sidecar text before the first section header: {line!r}")
            body.append(line)
    flush()
    return SidecarText(keyframes, clips)


def load_sidecar(path: str | Path) -> SidecarText:
    return parse_sidecar(Path(path).read_text(encoding="utf-8"))


@dataclass
class EncodeConfig:
    mode: Mode = Mode.IT2V
    n_keyframes: int = 2
    strategy: Strategy = Strategy.COSINE
    quality: int = 256
    optimizer: OptimizerConfig | None = None
    backend: str | Backend = "linear"
    text: SidecarText | str | Path | None = None
    feature_file: str | Path | None = None
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        self.mode = Mode(self.mode)
        self.strategy = Strategy(self.strategy)
        if self.quality not in QUALITY_FACTORS:
            raise ConfigError(f"quality must be one of {QUALITY_FACTORS}, got {self.quality}")
        if self.n_keyframes < 2:
            raise ConfigError("n_keyframes must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")


def _resolve_sidecar(config: EncodeConfig) -> SidecarText:
    if config.text is None:
        raise ConfigError("encoding needs sidecar text for motion descriptions")
    if isinstance(config.text, SidecarText):
        return config.text
    return load_sidecar(config.text)


def _require_texts(sidecar: SidecarText, mode: Mode, n: int) -> None:
    missing = [f"[clip {j}]" for j in range(n - 1) if j not in sidecar.clip_texts]
    if mode is Mode.TT2V:
        missing += [f"[keyframe {i}]" for i in range(n) if i not in sidecar.keyframe_texts]
    if missing:
        raise ConfigError(f"sidecar is missing sections: {', '.join(missing)}")


def encode(video: RawVideo, config: EncodeConfig) -> bytes:
    """Produce a stream for the video under the given configuration."""
    sidecar = _resolve_sidecar(config)
    features = None
    if config.feature_file is not None:
        features = load_features(config.feature_file, expected_count=video.frame_count)
    keyframes = select_keyframes(
        video, config.n_keyframes, config.strategy, config.seed, features
    )
    clips = split_into_clips(video, keyframes)
    n = len(keyframes)
    _require_texts(sidecar, config.mode, n)

    if config.mode is Mode.IT2V:
        key_payloads = [
            encode_keyframe(video.frame(i), config.quality) for i in keyframes.indices
        ]
        decoded_keys = None
        if config.optimizer is not None:
            decoded_keys = [decode_keyframe(p) for p in key_payloads]
    else:
        key_payloads = [
            encode_text(sidecar.keyframe_texts[i]) for i in range(n)
        ]
        decoded_keys = None

    def build_clip(j: int) -> ClipRecord:
        span = clips[j]
        final = j == len(clips) - 1
        key_tag = "KIMG" if config.mode is Mode.IT2V else "KTXT"
        sections = [Section(key_tag, key_payloads[j])]
        if final:
            sections.append(Section(key_tag, key_payloads[j + 1]))
        sections.append(Section("MTXT", encode_text(sidecar.clip_texts[j])))
        if (
            config.mode is Mode.IT2V
            and config.optimizer is not None
            and span.intermediate_count > 0
        ):
            targets = [
                video.frame(i) for i in range(span.start_index + 1, span.end_index)
            ]
            backend = get_backend(config.backend)
            try:
                track, _ = optimize_weights(
                    backend,
                    decoded_keys[j],
                    decoded_keys[j + 1],
                    targets,
                    config.optimizer,
                    motion_text=sidecar.clip_texts[j],
                )
            finally:
                backend.close()
            sections.append(Section("WGTS", encode_weights(track)))
        return ClipRecord(span.start_index, span.end_index, tuple(sections))

    if config.jobs > 1 and len(clips) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(build_clip, range(len(clips))))
    else:
        records = [build_clip(j) for j in range(len(clips))]

    header = StreamHeader(
        mode=config.mode,
        width=video.width,
        height=video.height,
        planes=video.planes,
        frame_count=video.frame_count,
        frame_rate_num=video.frame_rate.numerator,
        frame_rate_den=video.frame_rate.denominator,
        clip_count=len(records),
    )
    return mux(header, records)


def _decoded_weights(clip: ClipRecord, count: int) -> WeightTrack:
    payloads = clip.payloads("WGTS")
    if not payloads:
        return WeightTrack.linear(count)
    track = decode_weights(payloads[0])
    if len(track) != count:
        raise MalformedStreamError(
            f"weight track holds {len(track)} entries for {count} intermediates"
        )
    return track


def decode(stream: bytes, backend: str | Backend = "linear") -> RawVideo:
    """Reconstruct a video from a stream.

    Image-mode keyframes go through the image codec and intermediates
    through the given backend. Text-only streams decode every frame with
    the deterministic placeholder generator; the backend choice does not
    apply to them.
    """
    header, clips = demux(stream)
    frames = np.zeros(
        (header.frame_count, header.planes, header.height, header.width), dtype=np.uint8
    )
    owns_backend = not isinstance(backend, Backend)
    backend_obj: Backend | None = None
    try:
        if header.mode is Mode.IT2V:
            backend_obj = get_backend(backend)
            decoded_keys: list[np.ndarray] = []
            for i, clip in enumerate(clips):
                for payload in clip.payloads("KIMG"):
                    decoded_keys.append(decode_keyframe(payload))
            expected = (header.planes, header.height, header.width)
            for key in decoded_keys:
                if key.shape != expected:
                    raise MalformedStreamError(
                        f"decoded keyframe geometry {key.shape} does not match the header {expected}"
                    )
            for i, clip in enumerate(clips):
                left = decoded_keys[i]
                right = decoded_keys[i + 1]
                frames[clip.start_index] = left
                frames[clip.end_index] = right
                count = clip.end_index - clip.start_index - 1
                if count == 0:
                    continue
                motion = decode_text(clip.payloads("MTXT")[0])
                request = GenerationRequest(
                    left, right, motion, _decoded_weights(clip, count), count
                )
                for off, frame in enumerate(backend_obj.generate(request), start=1):
                    frames[clip.start_index + off] = frame
        else:
            key_texts = []
            for clip in clips:
                key_texts.extend(decode_text(p) for p in clip.payloads("KTXT"))
            for i, clip in enumerate(clips):
                motion = decode_text(clip.payloads("MTXT")[0])
                frames[clip.start_index] = placeholder_frames(
                    key_texts[i], "", header.width, header.height, header.planes, [0]
                )[0]
                frames[clip.end_index] = placeholder_frames(
                    key_texts[i + 1], "", header.width, header.height, header.planes, [0]
                )[0]
                count = clip.end_index - clip.start_index - 1
                if count:
                    interior = placeholder_frames(
                        key_texts[i],
                        motion,
                        header.width,
                        header.height,
                        header.planes,
                        list(range(1, count + 1)),
                    )
                    for off, frame in enumerate(interior, start=1):
                        frames[clip.start_index + off] = frame
    finally:
        if owns_backend and backend_obj is not None:
            backend_obj.close()
    return RawVideo(
        header.width,
        header.height,
        header.planes,
        header.frame_rate,
        frames,
    )
