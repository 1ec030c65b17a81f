"""Write a synthetic demo clip as raw planar frames plus a text sidecar.

Produces <name>.raw and <name>.txt in the output directory and prints
ready-to-run encode/decode commands for them.
"""

import argparse
from pathlib import Path

from cmvc.synthetic import demo_video
from cmvc.video import write_raw_video

SIDECAR_TEMPLATE = """\
[keyframe 0]
a dark gradient field with a bright square at the left edge

[keyframe 1]
the same gradient field with the square arrived at the right edge

[clip 0]
the bright square drifts steadily from left to right
"""


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", type=Path, default=Path("demo"))
    parser.add_argument("--name", default="demo")
    parser.add_argument("--frames", type=int, default=16)
    parser.add_argument("--size", type=int, default=64, help="square frame edge in pixels")
    args = parser.parse_args(argv)

    video = demo_video(frame_count=args.frames, width=args.size, height=args.size)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    raw_path = args.out_dir / f"{args.name}.raw"
    text_path = args.out_dir / f"{args.name}.txt"
    write_raw_video(video, raw_path)
    text_path.write_text(SIDECAR_TEMPLATE)

    geometry = f"--width {video.width} --height {video.height} --planes {video.planes}"
    print(f"wrote {raw_path} ({raw_path.stat().st_size} bytes, {video.frame_count} frames)")
    print(f"wrote {text_path}")
    print()
    print("next:")
    print(f"  cmvc encode --input {raw_path} {geometry} --text {text_path} "
          f"--quality 128 --out {args.out_dir}/{args.name}.cmvc")
    print(f"  cmvc decode --input {args.out_dir}/{args.name}.cmvc "
          f"--out {args.out_dir}/{args.name}.decoded.raw")
    print(f"  cmvc evaluate --input {args.out_dir}/{args.name}.decoded.raw "
          f"--reference {raw_path} {geometry} "
          f"--stream {args.out_dir}/{args.name}.cmvc --report json")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
