import io
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmvc.backends import (
    ExternalBackend,
    GenerationRequest,
    LatentAdapterBackend,
    LinearBackend,
    blend_real,
    get_backend,
    interpolate_adapters,
    interpolate_frames,
    placeholder_frames,
    quantize_frame,
    read_message,
    write_message,
)
from cmvc.coders import WeightTrack
from cmvc.errors import (
    BackendReportedError,
    BackendUnavailableError,
    ConfigError,
    ContractError,
    ProtocolViolationError,
)

STUB = str(Path(__file__).parent / "helpers" / "stub_backend.py")


def stub_command(*flags):
    return [sys.executable, STUB, *flags]


def frame_pair(seed, planes=1, h=8, w=8):
    rng = np.random.default_rng(seed)
    left = rng.integers(0, 256, size=(planes, h, w)).astype(np.uint8)
    right = rng.integers(0, 256, size=(planes, h, w)).astype(np.uint8)
    return left, right


def linear_request(seed, count=3, planes=1):
    left, right = frame_pair(seed, planes)
    rng = np.random.default_rng(seed + 1)
    w = tuple(float(v) for v in rng.uniform(0, 1, size=count))
    return GenerationRequest(left, right, "pan left", WeightTrack(w, w), count)


# -- quantization and blending ------------------------------------------


def test_quantize_rounds_half_up_and_clamps():
    real = np.array([[[-3.0, 0.49, 0.5, 254.49, 254.5, 300.0]]])
    assert quantize_frame(real).tolist() == [[[0, 0, 1, 254, 255, 255]]]


def test_blend_weight_applies_to_left():
    left = np.full((1, 2, 2), 0, dtype=np.uint8)
    right = np.full((1, 2, 2), 100, dtype=np.uint8)
    assert np.all(interpolate_frames(left, right, 0.75) == 25)
    assert np.all(blend_real(left, right, 0.2) == 80.0)


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_endpoint_weights_reproduce_keyframes(seed):
    left, right = frame_pair(seed)
    assert np.array_equal(interpolate_frames(left, right, 1.0), left)
    assert np.array_equal(interpolate_frames(left, right, 0.0), right)


def test_interpolate_rejects_bad_weight_and_geometry():
    left, right = frame_pair(0)
    with pytest.raises(ContractError):
        interpolate_frames(left, right, 1.5)
    with pytest.raises(ContractError):
        interpolate_frames(left, right[:, :4], 0.5)


def test_adapter_blend_endpoints():
    a0 = np.arange(6, dtype=np.float64).reshape(2, 3)
    a1 = -a0
    assert np.array_equal(interpolate_adapters(a0, a1, 1.0), a0)
    assert np.array_equal(interpolate_adapters(a0, a1, 0.0), a1)
    assert np.array_equal(interpolate_adapters(a0, a1, 0.5), np.zeros((2, 3)))


# -- in-process backends ------------------------------------------------


def test_linear_generate_schedule():
    left = np.zeros((1, 4, 4), dtype=np.uint8)
    right = np.full((1, 4, 4), 100, dtype=np.uint8)
    request = GenerationRequest(left, right, "", WeightTrack.linear(3), 3)
    frames = LinearBackend().generate(request)
    assert [int(f[0, 0, 0]) for f in frames] == [25, 50, 75]


def test_generate_empty_clip():
    left, right = frame_pair(1)
    request = GenerationRequest(left, right, "", WeightTrack.linear(0), 0)
    assert LinearBackend().generate(request) == []


@pytest.mark.parametrize("seed", range(12))
def test_latent_collapses_to_linear_without_modulation(seed):
    """Equal weights and zero text amplitude leave only the pixel blend;
    rounding ties may move single levels."""
    request = linear_request(seed, planes=1 if seed % 2 else 3)
    ref = LinearBackend().generate(request)
    latent = LatentAdapterBackend(text_amplitude=0.0).generate(request)
    for a, b in zip(ref, latent):
        assert int(np.max(np.abs(a.astype(np.int64) - b.astype(np.int64)))) <= 1


def test_latent_endpoint_weights_reproduce_keyframes():
    left, right = frame_pair(7)
    backend = LatentAdapterBackend()
    one = GenerationRequest(left, right, "zoom", WeightTrack((1.0,), (1.0,)), 1)
    zero = GenerationRequest(left, right, "zoom", WeightTrack((0.0,), (0.0,)), 1)
    assert np.array_equal(backend.generate(one)[0], left)
    assert np.array_equal(backend.generate(zero)[0], right)


def test_text_modulation_perturbs_interior_frames():
    left, right = frame_pair(9)
    request = GenerationRequest(left, right, "waves", WeightTrack((0.5,), (0.5,)), 1)
    flat = LatentAdapterBackend(text_amplitude=0.0).generate(request)[0]
    modulated = LatentAdapterBackend(text_amplitude=200.0).generate(request)[0]
    assert not np.array_equal(flat, modulated)
    other_text = GenerationRequest(left, right, "rain", WeightTrack((0.5,), (0.5,)), 1)
    assert not np.array_equal(
        LatentAdapterBackend(text_amplitude=200.0).generate(other_text)[0], modulated
    )
    again = LatentAdapterBackend(text_amplitude=200.0).generate(request)[0]
    assert np.array_equal(again, modulated)


def test_latent_rejects_negative_amplitude():
    with pytest.raises(ContractError):
        LatentAdapterBackend(text_amplitude=-1.0)


def test_request_validation():
    left, right = frame_pair(2)
    with pytest.raises(ContractError):
        GenerationRequest(left, right[:, :4], "", WeightTrack.linear(1), 1)
    with pytest.raises(ContractError):
        GenerationRequest(left, right, "", WeightTrack.linear(2), 3)
    with pytest.raises(ContractError):
        GenerationRequest(left, right, "", WeightTrack.linear(0), -1)


def test_placeholder_frames_are_deterministic():
    a = placeholder_frames("a cat", "it walks", 6, 4, 1, [1, 2])
    b = placeholder_frames("a cat", "it walks", 6, 4, 1, [1, 2])
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert a[0].shape == (1, 4, 6)
    assert not np.array_equal(a[0], a[1])
    other = placeholder_frames("a dog", "it walks", 6, 4, 1, [1])
    assert not np.array_equal(a[0], other[0])


def test_get_backend_resolution():
    assert isinstance(get_backend("linear"), LinearBackend)
    assert isinstance(get_backend("latent"), LatentAdapterBackend)
    backend = LinearBackend()
    assert get_backend(backend) is backend
    with pytest.raises(ConfigError):
        get_backend("glide")


# -- wire protocol ------------------------------------------------------


def test_message_round_trip():
    buf = io.BytesIO()
    write_message(buf, {"type": "hello", "version": 1})
    buf.seek(0)
    assert read_message(buf) == {"type": "hello", "version": 1}


def test_read_message_rejects_implausible_length():
    buf = io.BytesIO((1 << 30).to_bytes(4, "big"))
    with pytest.raises(ProtocolViolationError):
        read_message(buf)


def test_read_message_rejects_bad_json():
    body = b"not json"
    buf = io.BytesIO(len(body).to_bytes(4, "big") + body)
    with pytest.raises(ProtocolViolationError):
        read_message(buf)


def test_read_message_requires_type_field():
    buf = io.BytesIO()
    write_message(buf, {"version": 1})
    buf.seek(0)
    with pytest.raises(ProtocolViolationError):
        read_message(buf)


def test_read_message_rejects_severed_pipe():
    buf = io.BytesIO(b"\x00\x00")
    with pytest.raises(ProtocolViolationError):
        read_message(buf)


# -- external backend ---------------------------------------------------


def test_external_matches_linear_byte_for_byte():
    backend = ExternalBackend(stub_command())
    try:
        for seed in range(5):
            request = linear_request(seed)
            ref = LinearBackend().generate(request)
            got = backend.generate(request)
            assert len(got) == len(ref)
            for a, b in zip(ref, got):
                assert np.array_equal(a, b)
    finally:
        backend.close()


def test_external_session_renders_single_frames():
    left, right = frame_pair(3)
    backend = ExternalBackend(stub_command())
    try:
        session = backend.clip_session(left, right, "")
        real = session.frame_real(1.0, 1.0, 0.5)
        assert np.array_equal(real.astype(np.uint8), left)
    finally:
        backend.close()


def test_external_missing_binary():
    with pytest.raises(BackendUnavailableError):
        ExternalBackend(["/nonexistent/backend-binary"])


def test_external_version_mismatch():
    with pytest.raises(BackendUnavailableError):
        ExternalBackend(stub_command("--bad-version"))


def test_external_reported_error():
    backend = ExternalBackend(stub_command("--error-on-generate"))
    try:
        with pytest.raises(BackendReportedError):
            backend.generate(linear_request(0))
    finally:
        backend.close()


def test_external_wrong_frame_count():
    backend = ExternalBackend(stub_command("--wrong-count"))
    try:
        with pytest.raises(ProtocolViolationError):
            backend.generate(linear_request(0))
    finally:
        backend.close()


def test_external_empty_command():
    with pytest.raises(ConfigError):
        ExternalBackend("")


def test_external_as_context_manager():
    with ExternalBackend(stub_command()) as backend:
        frames = backend.generate(linear_request(4, count=1))
    assert len(frames) == 1
