import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmvc.errors import ContractError, MalformedPayloadError
from cmvc.imagecodec import (
    QUALITY_FACTORS,
    _zigzag_order,
    decode_keyframe,
    encode_keyframe,
    quant_step,
)
from cmvc.synthetic import textured_video


def test_quant_steps():
    assert quant_step(64) == 32
    assert quant_step(128) == 16
    assert quant_step(256) == 8
    with pytest.raises(ContractError):
        quant_step(100)


def test_zigzag_starts_on_the_known_path():
    order = _zigzag_order()
    flat = [(i // 8, i % 8) for i in order[:10]]
    assert flat == [
        (0, 0), (0, 1), (1, 0), (2, 0), (1, 1),
        (0, 2), (0, 3), (1, 2), (2, 1), (3, 0),
    ]
    assert sorted(order.tolist()) == list(range(64))


def test_constant_frame_is_exact_at_every_quality():
    frame = np.full((1, 24, 24), 100, dtype=np.uint8)
    for q in QUALITY_FACTORS:
        assert np.array_equal(decode_keyframe(encode_keyframe(frame, q)), frame)


def test_constant_frame_exact_at_finest_quality_for_any_value():
    """DC of a flat block is 8*v, always a multiple of the q=256 step."""
    for value in (0, 57, 131, 255):
        frame = np.full((1, 16, 16), value, dtype=np.uint8)
        assert np.array_equal(decode_keyframe(encode_keyframe(frame, 256)), frame)


@pytest.mark.parametrize("seed", range(6))
def test_rate_strictly_increases_with_quality(seed):
    frame = textured_video(seed, frame_count=2, width=40, height=40).frame(0)
    sizes = [len(encode_keyframe(frame, q)) for q in QUALITY_FACTORS]
    assert sizes[0] < sizes[1] < sizes[2]


@pytest.mark.parametrize("seed", range(6))
def test_distortion_shrinks_with_quality(seed):
    frame = textured_video(seed, frame_count=2, width=40, height=40).frame(0)
    errs = []
    for q in QUALITY_FACTORS:
        recon = decode_keyframe(encode_keyframe(frame, q)).astype(np.float64)
        errs.append(float(np.mean((recon - frame) ** 2)))
    assert errs[0] >= errs[1] >= errs[2]
    # reconstruction error stays within a couple of quantizer steps
    for q, _ in zip(QUALITY_FACTORS, errs):
        recon = decode_keyframe(encode_keyframe(frame, q)).astype(np.int64)
        assert int(np.max(np.abs(recon - frame))) <= 2 * quant_step(q)


@given(
    st.integers(min_value=1, max_value=40),
    st.integers(min_value=1, max_value=40),
    st.sampled_from((1, 3)),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=25)
def test_round_trip_preserves_geometry(width, height, planes, seed):
    rng = np.random.default_rng(seed)
    frame = rng.integers(0, 256, size=(planes, height, width)).astype(np.uint8)
    recon = decode_keyframe(encode_keyframe(frame, 256))
    assert recon.shape == frame.shape
    assert recon.dtype == np.uint8


def test_odd_geometry_crops_back():
    rng = np.random.default_rng(5)
    frame = rng.integers(0, 256, size=(3, 10, 13)).astype(np.uint8)
    recon = decode_keyframe(encode_keyframe(frame, 64))
    assert recon.shape == (3, 10, 13)


def test_rejects_unknown_quality():
    frame = np.zeros((1, 8, 8), dtype=np.uint8)
    with pytest.raises(ContractError):
        encode_keyframe(frame, 512)


def test_decode_rejects_truncated_header():
    payload = encode_keyframe(np.zeros((1, 8, 8), dtype=np.uint8), 64)
    with pytest.raises(MalformedPayloadError):
        decode_keyframe(payload[:5])


def test_decode_rejects_empty_geometry():
    with pytest.raises(MalformedPayloadError):
        decode_keyframe(bytes(10))


def test_decode_rejects_bad_quality_code():
    payload = bytearray(encode_keyframe(np.zeros((1, 8, 8), dtype=np.uint8), 64))
    payload[5] = 9
    with pytest.raises(MalformedPayloadError):
        decode_keyframe(bytes(payload))


def test_decode_rejects_implausible_token_count():
    payload = bytearray(encode_keyframe(np.zeros((1, 8, 8), dtype=np.uint8), 64))
    payload[6:10] = (0xFFFFFFFF).to_bytes(4, "big")
    with pytest.raises(MalformedPayloadError):
        decode_keyframe(bytes(payload))


def test_single_byte_corruption_fails_loudly_or_stays_in_shape(rng):
    """Any corrupt payload either parses to the declared shape or raises
    the payload error, never an unrelated exception."""
    frame = rng.integers(0, 256, size=(1, 16, 16)).astype(np.uint8)
    payload = encode_keyframe(frame, 128)
    for pos in range(10, len(payload), 7):
        mangled = bytearray(payload)
        mangled[pos] ^= 0x55
        try:
            out = decode_keyframe(bytes(mangled))
        except MalformedPayloadError:
            continue
        assert out.shape == frame.shape
