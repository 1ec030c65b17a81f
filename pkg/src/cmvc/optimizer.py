"""Per-frame tuning of blend weights against reference frames.

Each intermediate frame descends independently on the normalized squared
error between the backend's real-valued render and its target, with
gradients estimated by central finite differences. Probe points may sit
slightly outside [0, 1]; only the updated weights are clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backends import Backend, blend_real
from .coders import WeightTrack
from .errors import ContractError, NumericalFailureError
from .video import Frame


@dataclass
class OptimizerConfig:
    learning_rate: float = 0.001
    training_steps: int = 100
    fd_step: float = 1e-4
    update_frame_weights: bool = True
    update_model_weights: bool = True
    convergence_eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ContractError("learning_rate must be positive")
        if self.training_steps < 1:
            raise ContractError("training_steps must be at least 1")
        if self.fd_step <= 0:
            raise ContractError("fd_step must be positive")
        if self.convergence_eps < 0:
            raise ContractError("convergence_eps must be non-negative")


def frame_loss(candidate: Frame | np.ndarray, target: Frame | np.ndarray) -> float:
    """Mean squared error with samples scaled to [0, 1]."""
    c = np.asarray(candidate, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if c.shape != t.shape:
        raise ContractError(f"frame geometry differs: {c.shape} vs {t.shape}")
    diff = (c - t) / 255.0
    return float(np.mean(diff * diff))


def _clamp(w: float) -> float:
    return min(max(w, 0.0), 1.0)


def optimize_weights(
    backend: Backend,
    left: Frame,
    right: Frame,
    targets: list[np.ndarray],
    config: OptimizerConfig | None = None,
    motion_text: str = "",
    init: WeightTrack | None = None,
    trace_path=None,
) -> tuple[WeightTrack, list[list[float]]]:
    """Fit per-frame weights so rendered intermediates approach targets.

    Targets may be 8-bit frames or real-valued arrays of the same
    geometry. Weights start on the linear schedule unless an explicit
    init track is given, and each frame stops after `training_steps`
    updates or once its loss change falls below `convergence_eps`.
    Returns the final track and one loss history per frame, beginning
    with the pre-update loss.
    """
    config = config or OptimizerConfig()
    count = len(targets)
    if init is None:
        init = WeightTrack.linear(count)
    elif len(init) != count:
        raise ContractError(f"init track length {len(init)} != target count {count}")
    session = backend.clip_session(left, right, motion_text)
    h = config.fd_step
    alpha = config.learning_rate
    final_fw = []
    final_mw = []
    histories = []
    trace_rows = []
    for k in range(count):
        t_frac = (k + 1) / (count + 1)
        target = np.asarray(targets[k], dtype=np.float64)

        def loss_at(fw: float, mw: float) -> float:
            render = session.frame_real(fw, mw, t_frac)
            value = frame_loss(render, target)
            if not math.isfinite(value):
                raise NumericalFailureError(f"loss became {value} at frame offset {k + 1}")
            return value

        fw = init.frame_weights[k]
        mw = init.model_weights[k]
        history = [loss_at(fw, mw)]
        for step in range(1, config.training_steps + 1):
            grad_f = 0.0
            grad_m = 0.0
            if config.update_frame_weights:
                grad_f = (loss_at(fw + h, mw) - loss_at(fw - h, mw)) / (2.0 * h)
            if config.update_model_weights:
                grad_m = (loss_at(fw, mw + h) - loss_at(fw, mw - h)) / (2.0 * h)
            fw = _clamp(fw - alpha * grad_f)
            mw = _clamp(mw - alpha * grad_m)
            current = loss_at(fw, mw)
            history.append(current)
            if trace_path is not None:
                trace_rows.append((k + 1, step, fw, mw, current))
            if abs(history[-1] - history[-2]) < config.convergence_eps:
                break
        final_fw.append(fw)
        final_mw.append(mw)
        histories.append(history)
    if trace_path is not None:
        lines = ["frame_offset,step,frame_weight,model_weight,loss"]
        lines += [f"{o},{s},{f!r},{m!r},{l!r}" for o, s, f, m, l in trace_rows]
        with open(trace_path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return WeightTrack(tuple(final_fw), tuple(final_mw)), histories


@dataclass(frozen=True)
class GradientCheckReport:
    analytic_frame_grad: float
    fd_frame_grad: float
    analytic_model_grad: float
    fd_model_grad: float
    max_rel_error: float


def _rel_error(a: float, b: float) -> float:
    denom = max(abs(a), abs(b))
    if denom < 1e-9:
        return 0.0
    return abs(a - b) / denom


def gradient_check(
    left: Frame,
    right: Frame,
    target: Frame | np.ndarray,
    frame_w: float,
    model_w: float = 0.5,
    fd_step: float = 1e-4,
) -> GradientCheckReport:
    """Compare analytic and finite-difference gradients on the blend path.

    The analytic frame gradient of the normalized squared error is
    2 * mean((blend - target) * (left - right)) / 255^2; the model
    gradient is identically zero because blending ignores it. Relative
    error treats anything below 1e-9 as zero on both sides.
    """
    lf = left.astype(np.float64)
    rf = right.astype(np.float64)
    t = np.asarray(target, dtype=np.float64)
    blend = blend_real(left, right, frame_w)
    analytic_f = float(np.mean(2.0 * (blend - t) * (lf - rf)) / (255.0**2))

    def loss(w: float) -> float:
        diff = (w * lf + (1.0 - w) * rf - t) / 255.0
        return float(np.mean(diff * diff))

    fd_f = (loss(frame_w + fd_step) - loss(frame_w - fd_step)) / (2.0 * fd_step)
    base = loss(frame_w)
    fd_m = (base - base) / (2.0 * fd_step)
    max_rel = max(_rel_error(analytic_f, fd_f), _rel_error(0.0, fd_m))
    return GradientCheckReport(analytic_f, fd_f, 0.0, fd_m, max_rel)
