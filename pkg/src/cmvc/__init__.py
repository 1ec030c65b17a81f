"""Cross-modal video codec.

Videos are reduced to a few coded keyframes, per-clip motion text and
per-frame interpolation weights, packed into a byte-exact container.
Decoding regenerates the interior frames through pluggable backends;
the evaluation side covers PSNR, temporal flicker and BD-Rate.
"""

__version__ = "0.1.0"

from .backends import (
    Backend,
    ExternalBackend,
    GenerationRequest,
    LatentAdapterBackend,
    LinearBackend,
    get_backend,
    interpolate_adapters,
    interpolate_frames,
)
from .bitstream import (
    ClipRecord,
    Mode,
    RateBreakdown,
    Section,
    StreamHeader,
    demux,
    mux,
    rate_breakdown,
)
from .coders import WeightTrack, decode_text, decode_weights, encode_text, encode_weights
from .errors import (
    BackendReportedError,
    BackendUnavailableError,
    CmvcError,
    ConfigError,
    ContractError,
    CorruptStreamError,
    MalformedInputError,
    MalformedPayloadError,
    MalformedStreamError,
    NoOverlapError,
    NumericalFailureError,
    ProtocolViolationError,
    TooShortError,
    UnsupportedStreamError,
)
from .evaluate import (
    RdCurve,
    RdPoint,
    assemble_curve,
    bd_rate,
    bd_rate_matrix,
    psnr,
    temporal_flicker,
    video_mse,
)
from .imagecodec import QUALITY_FACTORS, decode_keyframe, encode_keyframe, quant_step
from .keyframes import (
    KeyframeSet,
    Strategy,
    cosine_similarity,
    embed_frame,
    select_keyframes,
    split_into_clips,
)
from .optimizer import OptimizerConfig, frame_loss, gradient_check, optimize_weights
from .pipeline import EncodeConfig, SidecarText, decode, encode, load_sidecar, parse_sidecar
from .video import ClipSpan, Frame, RawVideo, compute_bpp, load_raw_video, write_raw_video
