"""Independent reimplementations used as test oracles.

Everything here is deliberately written from the defining formulas with
plain loops, separate from the package's vectorized code paths, so a
shared bug between implementation and test is unlikely.
"""

import math

import numpy as np

GRID = 16


def _overlap(a0, a1, b0, b1):
    return max(0.0, min(a1, b1) - max(a0, b0))


def pooled_embedding(frame):
    """Area-averaged 16x16 pooling of the first plane, centered, unit norm."""
    plane = frame[0]
    h = len(plane)
    w = len(plane[0])
    cells = []
    for r in range(GRID):
        r0 = r * h / GRID
        r1 = (r + 1) * h / GRID
        for c in range(GRID):
            c0 = c * w / GRID
            c1 = (c + 1) * w / GRID
            acc = 0.0
            for i in range(int(math.floor(r0)), int(math.ceil(r1))):
                wr = _overlap(i, i + 1, r0, r1)
                if wr <= 0.0:
                    continue
                for j in range(int(math.floor(c0)), int(math.ceil(c1))):
                    wc = _overlap(j, j + 1, c0, c1)
                    if wc <= 0.0:
                        continue
                    acc += wr * wc * float(plane[i][j])
            cells.append(acc / ((r1 - r0) * (c1 - c0)))
    mean = math.fsum(cells) / len(cells)
    centered = [v - mean for v in cells]
    norm = math.sqrt(math.fsum(v * v for v in centered))
    if norm == 0.0:
        unit = [0.0] * len(centered)
        unit[0] = 1.0
        return unit
    return [v / norm for v in centered]


def cosine(a, b):
    num = math.fsum(x * y for x, y in zip(a, b))
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(x * x for x in b))
    return num / (na * nb)


def interval_layout(frame_count, n):
    """Inclusive (lo, hi) interior intervals, one per extra keyframe."""
    total = frame_count - 2
    parts = n - 2
    return [(1 + (b * total) // parts, ((b + 1) * total) // parts) for b in range(parts)]


def brute_force_cosine_select(frames, n):
    """Endpoints plus, per interval, the frame least similar to a moving anchor."""
    count = len(frames)
    if n == 2:
        return [0, count - 1]
    embeds = [pooled_embedding(f) for f in frames]
    picks = [0]
    anchor = embeds[0]
    for lo, hi in interval_layout(count, n):
        best = lo
        best_sim = cosine(anchor, embeds[lo])
        for idx in range(lo + 1, hi + 1):
            sim = cosine(anchor, embeds[idx])
            if sim < best_sim:
                best = idx
                best_sim = sim
        picks.append(best)
        anchor = embeds[best]
    picks.append(count - 1)
    return picks


def brute_force_mse_select(frames, n):
    """Same walk with raw-pixel mean squared distance, picking the farthest."""
    count = len(frames)
    if n == 2:
        return [0, count - 1]
    picks = [0]
    anchor = frames[0].astype(np.float64)
    for lo, hi in interval_layout(count, n):
        best = lo
        best_dist = -1.0
        for idx in range(lo, hi + 1):
            dist = float(np.mean((frames[idx].astype(np.float64) - anchor) ** 2))
            if dist > best_dist:
                best = idx
                best_dist = dist
        picks.append(best)
        anchor = frames[best].astype(np.float64)
    return picks + [count - 1]


def _fit_poly(xs, ys, degree):
    """Least-squares polynomial c0 + c1 x + ... via an explicit Vandermonde."""
    rows = [[x**p for p in range(degree + 1)] for x in xs]
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(ys), rcond=None)
    return list(coef)


def _horner(coef, x):
    acc = 0.0
    for c in reversed(coef):
        acc = acc * x + c
    return acc


def trapezoid_bd_rate(anchor_points, test_points, samples=8192):
    """BD-Rate via dense trapezoid integration instead of closed-form polyint.

    Points are (rate, distortion) pairs. Returns the average percentage
    rate change of the test curve over the shared distortion interval.
    """

    def prepared(points):
        ds = [d for _, d in points]
        ys = [math.log10(r) for r, _ in points]
        coef = _fit_poly(ds, ys, min(3, len(points) - 1))
        return coef, min(ds), max(ds)

    coef_a, lo_a, hi_a = prepared(anchor_points)
    coef_t, lo_t, hi_t = prepared(test_points)
    lo = max(lo_a, lo_t)
    hi = min(hi_a, hi_t)
    if hi <= lo:
        raise ValueError("curves share no distortion interval")

    def mean_log_rate(coef):
        xs = [lo + (hi - lo) * i / samples for i in range(samples + 1)]
        ys = [_horner(coef, x) for x in xs]
        area = math.fsum(
            (ys[i] + ys[i + 1]) * 0.5 * (xs[i + 1] - xs[i]) for i in range(samples)
        )
        return area / (hi - lo)

    return (10.0 ** (mean_log_rate(coef_t) - mean_log_rate(coef_a)) - 1.0) * 100.0
