"""Rate-distortion ablation over quality, keyframe count, and backend.

Encodes a small bank of synthetic clips at every (quality, n_keyframes)
combination, decodes with the selected backends, and reports rate/PSNR
per cell plus BD-rate of each backend against the linear anchor.

Usage:
    python scripts/ablation_sweep.py --out sweep.json
    python scripts/ablation_sweep.py --videos 8 --optimize --csv sweep.csv
"""

import argparse
import csv
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from cmvc.evaluate import RdCurve, RdPoint, bd_rate, psnr
from cmvc.optimizer import OptimizerConfig
from cmvc.pipeline import EncodeConfig, SidecarText, decode, encode
from cmvc.synthetic import blend_video, demo_video

QUALITIES = (64, 128, 256)
KEYFRAME_COUNTS = (2, 3, 4)


@dataclass
class SweepCell:
    video: int
    backend: str
    quality: int
    n_keyframes: int
    stream_bytes: int
    bits_per_pixel: float
    psnr_db: float
    seconds: float


def make_bank(count, seed):
    rng = np.random.default_rng(seed)
    videos = [demo_video(frame_count=12)]
    while len(videos) < count:
        left = rng.integers(0, 96, size=(1, 48, 48)).astype(np.uint8)
        right = rng.integers(160, 256, size=(1, 48, 48)).astype(np.uint8)
        schedule = np.linspace(1.0, 0.0, int(rng.integers(8, 14))).tolist()
        videos.append(blend_video(left, right, schedule))
    return videos[:count]


def sweep(videos, backends, optimize):
    sidecar = SidecarText(
        keyframe_texts={i: f"keyframe {i}" for i in range(8)},
        clip_texts={i: f"clip {i} motion" for i in range(8)},
    )
    optimizer = OptimizerConfig(training_steps=300) if optimize else None
    cells = []
    for vi, video in enumerate(videos):
        pixels = video.frame_count * video.height * video.width
        for backend in backends:
            for quality in QUALITIES:
                for n in KEYFRAME_COUNTS:
                    config = EncodeConfig(
                        n_keyframes=n, quality=quality, optimizer=optimizer,
                        backend=backend, text=sidecar,
                    )
                    started = time.monotonic()
                    stream = encode(video, config)
                    decoded = decode(stream, backend=backend)
                    cells.append(SweepCell(
                        video=vi, backend=backend, quality=quality, n_keyframes=n,
                        stream_bytes=len(stream),
                        bits_per_pixel=8.0 * len(stream) / pixels,
                        psnr_db=psnr(decoded, video),
                        seconds=time.monotonic() - started,
                    ))
        print(f"video {vi}: {len(cells)} cells total")
    return cells


def curve_for(cells, backend, n):
    points = sorted(
        (c for c in cells if c.backend == backend and c.n_keyframes == n),
        key=lambda c: c.quality,
    )
    by_quality = {}
    for c in points:
        by_quality.setdefault(c.quality, []).append(c)
    rd = [
        RdPoint(
            float(np.mean([c.bits_per_pixel for c in group])),
            float(np.mean([c.psnr_db for c in group])),
            metric_name="psnr", higher_better=True,
        )
        for _, group in sorted(by_quality.items())
    ]
    return RdCurve(tuple(rd))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--videos", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--backends", default="linear,latent")
    parser.add_argument("--optimize", action="store_true",
                        help="fit interpolation weights per clip before writing them")
    parser.add_argument("--out", type=Path, help="JSON output path")
    parser.add_argument("--csv", type=Path, help="CSV output path")
    args = parser.parse_args(argv)

    backends = [b.strip() for b in args.backends.split(",") if b.strip()]
    videos = make_bank(args.videos, args.seed)
    cells = sweep(videos, backends, args.optimize)

    print()
    print(f"{'backend':>8} {'q':>4} {'n':>3} {'bytes':>8} {'bpp':>7} {'psnr':>7}")
    for backend in backends:
        for quality in QUALITIES:
            for n in KEYFRAME_COUNTS:
                group = [c for c in cells
                         if c.backend == backend and c.quality == quality and c.n_keyframes == n]
                mean_bytes = np.mean([c.stream_bytes for c in group])
                mean_bpp = np.mean([c.bits_per_pixel for c in group])
                mean_psnr = np.mean([c.psnr_db for c in group])
                print(f"{backend:>8} {quality:>4} {n:>3} {mean_bytes:>8.0f} {mean_bpp:>7.4f} {mean_psnr:>7.2f}")

    deltas = {}
    if "linear" in backends:
        for backend in backends:
            if backend == "linear":
                continue
            for n in KEYFRAME_COUNTS:
                anchor = curve_for(cells, "linear", n)
                test = curve_for(cells, backend, n)
                key = f"{backend}_vs_linear_n{n}"
                deltas[key] = bd_rate(anchor, test)
                print(f"bd-rate {key}: {deltas[key]:+.3f}%")

    if args.out:
        payload = {"cells": [asdict(c) for c in cells], "bd_rate": deltas}
        args.out.write_text(json.dumps(payload, indent=2) + "\n")
        print(f"wrote {args.out}")
    if args.csv:
        with open(args.csv, "w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=list(asdict(cells[0])))
            writer.writeheader()
            writer.writerows(asdict(c) for c in cells)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
