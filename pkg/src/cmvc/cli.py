"""Command line front end.

Exit codes: 0 success, 2 usage errors, 3 input or format errors,
4 backend errors. Diagnostics go to stderr; results go to stdout or the
--out path. Every command that writes an output file also drops a
`<out>.manifest.json` beside it with config echo, input/output hashes
and timing; the timing field is the only part that varies between
identical reruns.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bitstream import Mode, rate_breakdown
from .errors import (
    BackendReportedError,
    BackendUnavailableError,
    CmvcError,
    ConfigError,
    ProtocolViolationError,
)
from .evaluate import bd_rate, load_curve_csv, psnr, temporal_flicker, video_mse
from .imagecodec import QUALITY_FACTORS
from .keyframes import Strategy, load_features, select_keyframes
from .optimizer import OptimizerConfig
from .pipeline import EncodeConfig, decode, encode, load_sidecar, parse_sidecar
from .synthetic import demo_video
from .video import RawVideo, compute_bpp, load_raw_video, write_raw_video

_USAGE_EXIT = 2
_INPUT_EXIT = 3
_BACKEND_EXIT = 4


def _parse_fps(text: str) -> Fraction:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text), 1)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid frame rate {text!r}") from None


def _add_geometry_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--width", type=int, required=required)
    p.add_argument("--height", type=int, required=required)
    p.add_argument("--planes", type=int, choices=(1, 3), default=1)
    p.add_argument("--fps", type=_parse_fps, default=Fraction(30, 1))


def _add_encode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("tt2v", "it2v"), default="it2v")
    p.add_argument("--keyframes", type=int, default=2, metavar="N")
    p.add_argument(
        "--strategy", choices=[s.value for s in Strategy], default="cosine"
    )
    p.add_argument("--quality", type=int, choices=QUALITY_FACTORS, default=256)
    p.add_argument("--backend", default="linear")
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--text", help="sidecar text file")
    p.add_argument("--features", help="per-frame feature vector file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmvc", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cmvc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a raw video into a stream")
    p.add_argument("--input", required=True)
    _add_geometry_flags(p)
    _add_encode_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("decode", help="decode a stream back to raw video")
    p.add_argument("--input", required=True)
    p.add_argument("--backend", default="linear")
    p.add_argument("--out", required=True)

    p = sub.add_parser("keyframes", help="print selected keyframe indices")
    p.add_argument("--input", required=True)
    _add_geometry_flags(p)
    p.add_argument("--keyframes", type=int, default=2, metavar="N")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="cosine")
    p.add_argument("--features")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("evaluate", help="metrics between a decode and its reference")
    p.add_argument("--input", required=True, help="decoded raw video")
    p.add_argument("--reference", required=True, help="original raw video")
    _add_geometry_flags(p)
    p.add_argument("--stream", help="stream file, enables rate reporting")
    p.add_argument("--video-id", default="video")
    p.add_argument("--report", choices=("json", "csv"), default="json")
    p.add_argument("--out")

    p = sub.add_parser("bdrate", help="BD-Rate between two curve csv files")
    p.add_argument("--anchor", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out")

    p = sub.add_parser("roundtrip", help="encode, decode and evaluate in one go")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input")
    group.add_argument("--demo", action="store_true", help="use the built-in 16-frame clip")
    _add_geometry_flags(p, required=False)
    _add_encode_flags(p)
    p.add_argument("--stream-out", help="also keep the intermediate stream")
    p.add_argument("--decoded-out", help="also keep the decoded raw video")
    p.add_argument("--report", choices=("json", "csv"), default="json")
    p.add_argument("--out", required=True)

    return parser


def _json_safe(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, str(value)))


def _write_report(report: dict, out: str, fmt: str) -> None:
    safe = _json_safe(report)
    if fmt == "json":
        text = json.dumps(safe, indent=2, sort_keys=True) + "\n"
    else:
        rows: list[tuple[str, str]] = []
        _flatten("", safe, rows)
        text = "key,value\n" + "\n".join(f"{k},{v}" for k, v in rows) + "\n"
    Path(out).write_text(text)


def _sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(
    out: str,
    command: str,
    config: dict,
    inputs: list[str],
    outputs: list[str],
    seed: int | None,
    started: float,
) -> None:
    manifest = {
        "tool": "cmvc",
        "version": __version__,
        "command": command,
        "config": _json_safe(config),
        "inputs": {p: _sha256(p) for p in inputs if p and Path(p).exists()},
        "outputs": {p: _sha256(p) for p in outputs if p and Path(p).exists()},
        "seed": seed,
        "timing_s": round(time.monotonic() - started, 6),
    }
    Path(f"{out}.manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_input_video(args) -> RawVideo:
    return load_raw_video(args.input, args.width, args.height, args.planes, args.fps)


def _demo_sidecar(n: int) -> str:
    lines = []
    for i in range(n):
        lines += [f"[keyframe {i}]", f"synthetic anchor frame {i}"]
    for j in range(n - 1):
        lines += [f"[clip {j}]", "steady left to right pan over a gradient"]
    return "\n".join(lines) + "\n"


def _encode_config(args) -> EncodeConfig:
    optimizer = None
    if args.optimize:
        optimizer = OptimizerConfig(learning_rate=args.alpha, training_steps=args.steps)
    if args.text is not None:
        text = load_sidecar(args.text)
    elif getattr(args, "demo", False):
        text = parse_sidecar(_demo_sidecar(args.keyframes))
    else:
        text = None
    return EncodeConfig(
        mode=Mode.TT2V if args.mode == "tt2v" else Mode.IT2V,
        n_keyframes=args.keyframes,
        strategy=Strategy(args.strategy),
        quality=args.quality,
        optimizer=optimizer,
        backend=args.backend,
        text=text,
        feature_file=args.features,
        seed=args.seed,
        jobs=args.jobs,
    )


def _cmd_encode(args) -> int:
    started = time.monotonic()
    video = _load_input_video(args)
    stream = encode(video, _encode_config(args))
    Path(args.out).write_bytes(stream)
    _write_manifest(
        args.out,
        "encode",
        {
            "mode": args.mode,
            "keyframes": args.keyframes,
            "strategy": args.strategy,
            "quality": args.quality,
            "backend": args.backend,
            "optimize": args.optimize,
        },
        [args.input],
        [args.out],
        args.seed,
        started,
    )
    return 0


def _cmd_decode(args) -> int:
    started = time.monotonic()
    stream = Path(args.input).read_bytes()
    video = decode(stream, args.backend)
    write_raw_video(video, args.out)
    _write_manifest(
        args.out, "decode", {"backend": args.backend}, [args.input], [args.out], None, started
    )
    return 0


def _cmd_keyframes(args) -> int:
    started = time.monotonic()
    video = _load_input_video(args)
    features = None
    if args.features:
        features = load_features(args.features, expected_count=video.frame_count)
    selected = select_keyframes(video, args.keyframes, args.strategy, args.seed, features)
    line = ",".join(str(i) for i in selected.indices)
    print(line)
    if args.out:
        _write_report(
            {"indices": list(selected.indices), "strategy": selected.strategy.value},
            args.out,
            "json",
        )
        _write_manifest(
            args.out,
            "keyframes",
            {"keyframes": args.keyframes, "strategy": args.strategy},
            [args.input],
            [args.out],
            args.seed,
            started,
        )
    return 0


def _evaluate_report(video_id, decoded, reference, stream: bytes | None) -> dict:
    report = {
        "video_id": video_id,
        "metrics": {
            "psnr": psnr(decoded, reference),
            "mse": video_mse(decoded, reference),
            "temporal_flicker": temporal_flicker(decoded),
        },
    }
    if stream is not None:
        report["rate_bpp"] = compute_bpp(8 * len(stream), reference)
        report["total_bits"] = 8 * len(stream)
        report["rate_breakdown"] = rate_breakdown(stream).as_dict()
    return report


def _cmd_evaluate(args) -> int:
    started = time.monotonic()
    reference = load_raw_video(args.reference, args.width, args.height, args.planes, args.fps)
    decoded = load_raw_video(args.input, args.width, args.height, args.planes, args.fps)
    stream = Path(args.stream).read_bytes() if args.stream else None
    report = _evaluate_report(args.video_id, decoded, reference, stream)
    if args.out:
        _write_report(report, args.out, args.report)
        _write_manifest(
            args.out,
            "evaluate",
            {"report": args.report},
            [args.input, args.reference, args.stream or ""],
            [args.out],
            None,
            started,
        )
    else:
        print(json.dumps(_json_safe(report), indent=2, sort_keys=True))
    return 0


def _cmd_bdrate(args) -> int:
    started = time.monotonic()
    anchor = load_curve_csv(args.anchor)
    test = load_curve_csv(args.test)
    value = bd_rate(anchor, test)
    print(f"{value:.6g}")
    if args.out:
        _write_report(
            {"anchor": args.anchor, "test": args.test, "bd_rate_percent": value},
            args.out,
            "json",
        )
        _write_manifest(
            args.out, "bdrate", {}, [args.anchor, args.test], [args.out], None, started
        )
    return 0


def _cmd_roundtrip(args) -> int:
    started = time.monotonic()
    if args.demo:
        video = demo_video()
    else:
        if args.width is None or args.height is None:
            raise ConfigError("--width and --height are required with --input")
        video = _load_input_video(args)
    config = _encode_config(args)
    stream = encode(video, config)
    decoded = decode(stream, args.backend)
    report = _evaluate_report("demo" if args.demo else args.input, decoded, video, stream)
    report["rd_point"] = {
        "rate": report["rate_bpp"],
        "distortion": report["metrics"]["psnr"],
        "metric_name": "psnr",
        "higher_better": True,
    }
    report["config"] = {
        "mode": args.mode,
        "keyframes": args.keyframes,
        "strategy": args.strategy,
        "quality": args.quality,
        "backend": args.backend,
        "optimize": args.optimize,
        "seed": args.seed,
    }
    report["stream_sha256"] = hashlib.sha256(stream).hexdigest()
    outputs = [args.out]
    if args.stream_out:
        Path(args.stream_out).write_bytes(stream)
        outputs.append(args.stream_out)
    if args.decoded_out:
        write_raw_video(decoded, args.decoded_out)
        outputs.append(args.decoded_out)
    _write_report(report, args.out, args.report)
    _write_manifest(
        args.out,
        "roundtrip",
        report["config"],
        [] if args.demo else [args.input],
        outputs,
        args.seed,
        started,
    )
    return 0


_COMMANDS = {
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "keyframes": _cmd_keyframes,
    "evaluate": _cmd_evaluate,
    "bdrate": _cmd_bdrate,
    "roundtrip": _cmd_roundtrip,
}

_BACKEND_ERRORS = (BackendUnavailableError, BackendReportedError, ProtocolViolationError)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _BACKEND_ERRORS as exc:
        print(f"cmvc: backend error: {exc}", file=sys.stderr)
        return _BACKEND_EXIT
    except FileNotFoundError as exc:
        print(f"cmvc: {exc}", file=sys.stderr)
        return _INPUT_EXIT
    except CmvcError as exc:
        print(f"cmvc: {exc}", file=sys.stderr)
        return _INPUT_EXIT


if __name__ == "__main__":
    sys.exit(main())
