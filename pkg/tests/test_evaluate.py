import math
from fractions import Fraction

import numpy as np
import pytest

from cmvc.errors import ContractError, MalformedInputError, NoOverlapError
from cmvc.evaluate import (
    RdCurve,
    RdPoint,
    assemble_curve,
    bd_rate,
    bd_rate_matrix,
    load_curve_csv,
    load_metric_csv,
    psnr,
    temporal_flicker,
    video_mse,
)
from cmvc.pipeline import EncodeConfig, decode, encode
from cmvc.synthetic import demo_video
from cmvc.video import RawVideo

from helpers.oracles import trapezoid_bd_rate


def flat_video(value, n=4, h=8, w=8):
    frames = np.full((n, 1, h, w), value, dtype=np.uint8)
    return RawVideo(w, h, 1, Fraction(30), frames)


def curve(points, metric="distortion"):
    return RdCurve(tuple(RdPoint(r, d, metric) for r, d in points))


def random_monotone_points(rng, k=4):
    rates = np.sort(rng.uniform(0.1, 10.0, size=k))
    rates *= np.linspace(1.0, 1.5, k)  # enforce strict spacing
    # pin the endpoints so any two curves share a distortion interval
    dists = np.sort(rng.uniform(25.0, 40.0, size=k))
    dists[0] = 22.0 + rng.uniform(0.0, 1.0)
    dists[-1] = 43.0 + rng.uniform(0.0, 1.0)
    return list(zip(rates.tolist(), dists.tolist()))


# -- metrics ------------------------------------------------------------


def test_mse_and_psnr_known_values():
    a = flat_video(0)
    b = flat_video(16)
    assert video_mse(a, b) == 256.0
    assert math.isclose(psnr(a, b), 24.0484039556, abs_tol=1e-9)


def test_psnr_of_identical_videos_is_infinite():
    a = flat_video(50)
    assert math.isinf(psnr(a, a))


def test_metric_geometry_contract():
    with pytest.raises(ContractError):
        video_mse(flat_video(0, n=4), flat_video(0, n=5))


def test_temporal_flicker():
    frames = np.zeros((3, 1, 2, 2), dtype=np.uint8)
    frames[1] = 6
    video = RawVideo(2, 2, 1, Fraction(30), frames)
    # two transitions of mean |delta| 6 each
    assert temporal_flicker(video) == 6.0
    assert temporal_flicker(flat_video(9)) == 0.0


# -- curve containers ---------------------------------------------------


def test_point_and_curve_validation():
    with pytest.raises(ContractError):
        RdPoint(0.0, 30.0)
    with pytest.raises(ContractError):
        RdPoint(1.0, float("nan"))
    with pytest.raises(ContractError):
        curve([(1.0, 30.0)])
    with pytest.raises(ContractError):
        curve([(2.0, 30.0), (1.0, 35.0)])
    with pytest.raises(ContractError):
        RdCurve((RdPoint(1.0, 30.0, "psnr"), RdPoint(2.0, 35.0, "mse")))


# -- BD-Rate ------------------------------------------------------------


def test_identical_curves_score_zero():
    c = curve([(1.0, 30.0), (2.0, 35.0), (4.0, 39.0), (8.0, 42.0)])
    assert abs(bd_rate(c, c)) < 1e-9


def test_halved_rates_score_minus_fifty():
    pts = [(1.0, 30.0), (2.0, 35.0), (4.0, 39.0), (8.0, 42.0)]
    halved = curve([(r / 2, d) for r, d in pts])
    assert abs(bd_rate(curve(pts), halved) + 50.0) < 0.01


def test_doubled_rates_score_plus_hundred():
    pts = [(1.0, 30.0), (2.0, 35.0), (4.0, 39.0)]
    doubled = curve([(r * 2, d) for r, d in pts])
    assert abs(bd_rate(curve(pts), doubled) - 100.0) < 0.01


def test_bd_rate_is_scale_invariant(rng):
    a = curve(random_monotone_points(rng))
    b = curve(random_monotone_points(rng))
    base = bd_rate(a, b)
    scaled = bd_rate(
        curve([(p.rate * 7.5, p.distortion) for p in a.points]),
        curve([(p.rate * 7.5, p.distortion) for p in b.points]),
    )
    assert math.isclose(base, scaled, rel_tol=1e-9, abs_tol=1e-9)


def test_bd_rate_inverts_consistently(rng):
    a = curve(random_monotone_points(rng))
    b = curve(random_monotone_points(rng))
    forward = bd_rate(a, b)
    backward = bd_rate(b, a)
    assert math.isclose((1 + forward / 100) * (1 + backward / 100), 1.0, rel_tol=1e-9)


def test_bd_rate_matches_oracle_on_reference_pair():
    anchor = [(0.01, 30.0), (0.02, 33.0), (0.04, 36.0), (0.08, 39.0)]
    test = [(0.008, 30.0), (0.015, 33.0), (0.03, 36.0), (0.06, 39.0)]
    got = bd_rate(curve(anchor), curve(test))
    assert got < 0  # the test codec spends fewer bits at equal quality
    assert abs(got - trapezoid_bd_rate(anchor, test, samples=1000)) < 0.5


@pytest.mark.parametrize("seed", range(12))
def test_bd_rate_matches_trapezoid_oracle(seed):
    rng = np.random.default_rng(seed)
    a = random_monotone_points(rng)
    b = random_monotone_points(rng)
    expected = trapezoid_bd_rate(a, b)
    assert abs(bd_rate(curve(a), curve(b)) - expected) < 0.5


def test_bd_rate_requires_three_points():
    small = curve([(1.0, 30.0), (2.0, 35.0)])
    big = curve([(1.0, 30.0), (2.0, 35.0), (4.0, 39.0)])
    with pytest.raises(ContractError):
        bd_rate(small, big)


def test_bd_rate_requires_monotone_distortion():
    wiggly = curve([(1.0, 30.0), (2.0, 29.0), (4.0, 39.0)])
    good = curve([(1.0, 30.0), (2.0, 35.0), (4.0, 39.0)])
    with pytest.raises(ContractError):
        bd_rate(good, wiggly)


def test_bd_rate_requires_overlap():
    low = curve([(1.0, 10.0), (2.0, 15.0), (4.0, 20.0)])
    high = curve([(1.0, 30.0), (2.0, 35.0), (4.0, 40.0)])
    with pytest.raises(NoOverlapError):
        bd_rate(low, high)


def test_bd_rate_matrix_excludes_anchor():
    c = curve([(1.0, 30.0), (2.0, 35.0), (4.0, 39.0)])
    shifted = curve([(1.1, 30.0), (2.2, 35.0), (4.4, 39.0)])
    matrix = bd_rate_matrix({"base": c, "other": shifted}, "base")
    assert set(matrix) == {"other"}
    assert matrix["other"] > 0
    with pytest.raises(ContractError):
        bd_rate_matrix({"base": c}, "missing")


# -- curve assembly and csv ingestion -----------------------------------


def encode_decode_at(video, quality):
    config = EncodeConfig(quality=quality, text=_sidecar(), n_keyframes=2)
    stream = encode(video, config)
    return stream, decode(stream)


def _sidecar():
    from cmvc.pipeline import SidecarText

    return SidecarText(clip_texts={0: "demo motion"})


def test_assemble_curve_from_real_runs():
    video = demo_video(frame_count=6, width=32, height=32)
    results = []
    for quality in (64, 128, 256):
        stream, decoded = encode_decode_at(video, quality)
        results.append((stream, decoded, video))
    c = assemble_curve(results, metric="psnr")
    rates = c.rates
    assert rates == sorted(rates)
    assert all(b > a for a, b in zip(rates, rates[1:]))
    assert c.points[0].metric_name == "psnr"
    assert c.points[0].higher_better


def test_assemble_curve_rejects_duplicate_rates():
    video = demo_video(frame_count=6, width=32, height=32)
    stream, decoded = encode_decode_at(video, 64)
    with pytest.raises(ContractError):
        assemble_curve([(stream, decoded, video), (stream, decoded, video)])


def test_assemble_curve_rejects_unknown_metric():
    video = demo_video(frame_count=6, width=32, height=32)
    stream, decoded = encode_decode_at(video, 64)
    with pytest.raises(ContractError):
        assemble_curve([(stream, decoded, video)] * 2, metric="vmaf")


def test_curve_csv_round_trip(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("rate_bpp,distortion\n0.5,30.0\n1.0,35.5\n2.0,40.0\n")
    c = load_curve_csv(path)
    assert c.rates == [0.5, 1.0, 2.0]
    assert c.distortions == [30.0, 35.5, 40.0]


def test_curve_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("rate,psnr\n0.5,30.0\n")
    with pytest.raises(MalformedInputError):
        load_curve_csv(path)


def test_curve_csv_rejects_bad_row(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("rate_bpp,distortion\n0.5\n")
    with pytest.raises(MalformedInputError):
        load_curve_csv(path)


def test_metric_csv(tmp_path):
    path = tmp_path / "metrics.csv"
    path.write_text("video_id,metric_name,value\nclip1,psnr,38.2\nclip1,mse,9.9\n")
    table = load_metric_csv(path)
    assert table[("clip1", "psnr")] == 38.2
    assert len(table) == 2


def test_metric_csv_rejects_empty(tmp_path):
    path = tmp_path / "metrics.csv"
    path.write_text("video_id,metric_name,value\n")
    with pytest.raises(MalformedInputError):
        load_metric_csv(path)
