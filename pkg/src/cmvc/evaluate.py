"""Distortion metrics, rate-distortion curves and BD-Rate deltas."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, MalformedInputError, NoOverlapError
from .video import RawVideo, compute_bpp

PSNR_PEAK = 255.0


def video_mse(a: RawVideo, b: RawVideo) -> float:
    if (a.width, a.height, a.planes, a.frame_count) != (b.width, b.height, b.planes, b.frame_count):
        raise ContractError("videos must share geometry and frame count")
    diff = a.frames.astype(np.float64) - b.frames.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(a: RawVideo, b: RawVideo) -> float:
    """Peak signal-to-noise ratio in dB; identical videos give +inf."""
    mse = video_mse(a, b)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PSNR_PEAK**2 / mse)


def temporal_flicker(video: RawVideo) -> float:
    """Mean absolute frame-to-frame sample change."""
    frames = video.frames.astype(np.float64)
    return float(np.mean(np.abs(frames[1:] - frames[:-1])))


@dataclass(frozen=True)
class RdPoint:
    rate: float
    distortion: float
    metric_name: str = "distortion"
    higher_better: bool = False

    def __post_init__(self):
        if not math.isfinite(self.rate) or self.rate <= 0:
            raise ContractError(f"rate must be finite and positive, got {self.rate}")
        if not math.isfinite(self.distortion):
            raise ContractError(f"distortion must be finite, got {self.distortion}")


@dataclass(frozen=True)
class RdCurve:
    points: tuple[RdPoint, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ContractError("a curve needs at least two points")
        if any(b.rate <= a.rate for a, b in zip(pts, pts[1:])):
            raise ContractError("curve rates must be strictly increasing")
        names = {p.metric_name for p in pts}
        if len(names) > 1:
            raise ContractError(f"curve mixes metrics: {sorted(names)}")

    @property
    def rates(self) -> list[float]:
        return [p.rate for p in self.points]

    @property
    def distortions(self) -> list[float]:
        return [p.distortion for p in self.points]


def _require_monotone_distortion(curve: RdCurve, label: str) -> None:
    d = curve.distortions
    increasing = all(b > a for a, b in zip(d, d[1:]))
    decreasing = all(b < a for a, b in zip(d, d[1:]))
    if not (increasing or decreasing):
        raise ContractError(f"{label} curve distortions are not strictly monotone: {d}")


def _fit_log_rate(curve: RdCurve) -> np.ndarray:
    degree = min(3, len(curve.points) - 1)
    return np.polyfit(curve.distortions, np.log10(curve.rates), degree)


def bd_rate(anchor: RdCurve, test: RdCurve) -> float:
    """Average rate change of `test` against `anchor`, in percent.

    Fits log10(rate) as a polynomial in distortion for each curve
    (degree min(3, points-1)) and integrates the fits in closed form
    over the curves' common distortion interval. Negative means the test
    curve spends fewer bits at equal distortion.
    """
    for curve, label in ((anchor, "anchor"), (test, "test")):
        if len(curve.points) < 3:
            raise ContractError(f"{label} curve needs at least 3 points for BD-Rate")
        _require_monotone_distortion(curve, label)
    lo = max(min(anchor.distortions), min(test.distortions))
    hi = min(max(anchor.distortions), max(test.distortions))
    if hi <= lo:
        raise NoOverlapError(
            f"anchor covers [{min(anchor.distortions)}, {max(anchor.distortions)}], "
            f"test covers [{min(test.distortions)}, {max(test.distortions)}]"
        )
    means = []
    for curve in (anchor, test):
        integral = np.polyint(_fit_log_rate(curve))
        means.append((np.polyval(integral, hi) - np.polyval(integral, lo)) / (hi - lo))
    return float((10.0 ** (means[1] - means[0]) - 1.0) * 100.0)


_METRICS = {
    "psnr": (psnr, True),
    "mse": (video_mse, False),
}


def assemble_curve(
    results: list[tuple[bytes, RawVideo, RawVideo]],
    metric: str = "psnr",
) -> RdCurve:
    """Build a curve from (stream, decoded, reference) runs.

    Rate is bits per pixel of the stream against the reference geometry;
    distortion comes from the named metric. Two runs at the same rate
    have no ordering on the curve and are rejected.
    """
    if metric == "flicker":
        pairs = [
            (compute_bpp(8 * len(s), ref), temporal_flicker(dec)) for s, dec, ref in results
        ]
        higher = False
    elif metric in _METRICS:
        fn, higher = _METRICS[metric]
        pairs = [(compute_bpp(8 * len(s), ref), fn(dec, ref)) for s, dec, ref in results]
    else:
        raise ContractError(f"unknown metric {metric!r}")
    if len(pairs) < 2:
        raise ContractError("a curve needs at least two runs")
    pairs.sort(key=lambda rd: rd[0])
    if any(b[0] == a[0] for a, b in zip(pairs, pairs[1:])):
        raise ContractError("two runs landed on the same rate")
    points = []
    for rate, dist in pairs:
        if not math.isfinite(dist):
            raise ContractError(
                f"metric {metric} is not finite at rate {rate}; identical videos cannot sit on a curve"
            )
        points.append(RdPoint(rate, dist, metric, higher))
    return RdCurve(tuple(points))


def load_curve_csv(path: str | Path) -> RdCurve:
    """Read a `rate_bpp,distortion` CSV (header plus one row per point)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows or [c.strip() for c in rows[0]] != ["rate_bpp", "distortion"]:
        raise MalformedInputError("curve csv must start with a rate_bpp,distortion header")
    points = []
    for ln, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise MalformedInputError(f"curve csv line {ln}: expected 2 columns, got {len(row)}")
        try:
            rate, dist = float(row[0]), float(row[1])
        except ValueError as exc:
            raise MalformedInputError(f"curve csv line {ln}: {exc}") from None
        try:
            points.append(RdPoint(rate, dist))
        except ContractError as exc:
            raise MalformedInputError(f"curve csv line {ln}: {exc}") from None
    points.sort(key=lambda p: p.rate)
    try:
        return RdCurve(tuple(points))
    except ContractError as exc:
        raise MalformedInputError(str(exc)) from None


def load_metric_csv(path: str | Path) -> dict[tuple[str, str], float]:
    """Read externally computed metrics: video_id,metric_name,value rows."""
    out: dict[tuple[str, str], float] = {}
    with open(path, newline="") as fh:
        for ln, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if ln == 1 and [c.strip() for c in row] == ["video_id", "metric_name", "value"]:
                continue
            if len(row) != 3:
                raise MalformedInputError(f"metric csv line {ln}: expected 3 columns")
            try:
                out[(row[0].strip(), row[1].strip())] = float(row[2])
            except ValueError as exc:
                raise MalformedInputError(f"metric csv line {ln}: {exc}") from None
    if not out:
        raise MalformedInputError("metric csv holds no rows")
    return out


def bd_rate_matrix(curves: dict[str, RdCurve], anchor: str) -> dict[str, float]:
    """BD-Rate of every curve against the named anchor curve."""
    if anchor not in curves:
        raise ContractError(f"anchor {anchor!r} is not among the curves")
    return {
        name: bd_rate(curves[anchor], curve)
        for name, curve in curves.items()
        if name != anchor
    }
