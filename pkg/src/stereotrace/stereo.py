"""Stereo synthesis: eye cameras, two-channel rendering, composition, stage timing.

A pipeline run goes through six timed stages:

prepare       parse/validate the scene, build the accel structure, compile kernels
transfer_in   copy scene, accel and camera data into per-channel buffers
compute       render the left and right channels (optionally concurrently)
transfer_out  quantize the channel framebuffers into 8-bit images
postprocess   compose the output (separate / anaglyph / side-by-side)
encode        produce PPM bytes and write them if an output path was given
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .accel import AccelHandle, build_accel
from .errors import DimensionMismatch, ZeroTotal
from .image import Image, encode_ppm, quantize, write_ppm
from .parallel import ComputeStats, DeviceScene, NetworkConfig, render_channel, upload
from .rays import TraceSettings
from .scene import Camera, Scene
from .scenefile import load_scene
from . import warmup

MODES = ("separate", "anaglyph", "sbs")


@dataclass(frozen=True)
class StereoRig:
    base: Camera
    eye_separation: float

    def __post_init__(self):
        dist = (self.base.look_at - self.base.position).norm()
        if not (0.0 < self.eye_separation < dist):
            raise ValueError(f"eye_separation must be in (0, {dist}), got {self.eye_separation}")


def derive_eyes(rig: StereoRig) -> tuple[Camera, Camera]:
    """Parallel-axis eye pair: each eye is shifted by half the separation along the right axis.

    ``look_at`` moves with the eye so both view directions equal the base one.
    """
    base = rig.base
    right = (base.look_at - base.position).cross(base.up).normalized()
    half = right * (rig.eye_separation / 2.0)
    return base.with_position(base.position - half), base.with_position(base.position + half)


@dataclass
class StageTimings:
    """Stage durations in nanoseconds."""

    prepare: int = 0
    transfer_in: int = 0
    compute_left: int = 0
    compute_right: int = 0
    transfer_out: int = 0
    postprocess: int = 0
    encode: int = 0
    total: int = 0

    STAGES = ("prepare", "transfer_in", "compute_left", "compute_right", "transfer_out", "postprocess", "encode")

    def stage_sum(self) -> int:
        return sum(getattr(self, s) for s in self.STAGES)

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


STAGE_GROUPS = {
    "compute": ("compute_left", "compute_right"),
    "transfer": ("transfer_in", "transfer_out"),
    "other": ("prepare", "postprocess", "encode"),
}


def stage_fractions(timings: StageTimings) -> dict[str, float]:
    """Share of compute, transfer and other stages in the summed stage time."""
    if timings.total <= 0:
        raise ZeroTotal("stage timings have zero total")
    groups = {g: float(sum(getattr(timings, s) for s in members)) for g, members in STAGE_GROUPS.items()}
    whole = sum(groups.values())
    if whole <= 0:
        raise ZeroTotal("all stage durations are zero")
    return {g: v / whole for g, v in groups.items()}


# -- composition -------------------------------------------------------------

def _check_pair(left: Image, right: Image) -> None:
    if left.pixels.shape != right.pixels.shape:
        raise DimensionMismatch(f"left is {left.width}x{left.height}, right is {right.width}x{right.height}")


def compose_anaglyph(left: Image, right: Image) -> Image:
    """Color anaglyph: red from the left eye, green and blue from the right."""
    _check_pair(left, right)
    out = right.pixels.copy()
    out[:, :, 0] = left.pixels[:, :, 0]
    return Image(out)


def squeeze_half(image: Image) -> np.ndarray:
    """Average column pairs into floor(w/2) columns, rounding halves up."""
    w = image.width // 2
    px = image.pixels[:, : 2 * w].astype(np.uint16)
    return ((px[:, 0::2] + px[:, 1::2] + 1) // 2).astype(np.uint8)


def compose_sbs(left: Image, right: Image) -> Image:
    _check_pair(left, right)
    if left.width < 2:
        raise DimensionMismatch(f"side-by-side needs width >= 2, got {left.width}")
    return Image(np.concatenate([squeeze_half(left), squeeze_half(right)], axis=1))


def compose(mode: str, left: Image, right: Image) -> list[Image]:
    if mode == "separate":
        _check_pair(left, right)
        return [left, right]
    if mode == "anaglyph":
        return [compose_anaglyph(left, right)]
    if mode == "sbs":
        return [compose_sbs(left, right)]
    raise ValueError(f"unknown stereo mode {mode!r}; expected one of {MODES}")


# -- rendering ---------------------------------------------------------------

@dataclass
class ChannelResult:
    framebuffer: np.ndarray
    stats: ComputeStats


def compute_channels(left: DeviceScene, right: DeviceScene, settings: TraceSettings, width: int, height: int,
                     config: NetworkConfig, channel_parallel: bool) -> tuple[ChannelResult, ChannelResult, int, int]:
    """Render both channels; returns results and the compute time attributed to each.

    Concurrent channels overlap in time, so the measured wall time is split
    between them in proportion to each channel's own duration; this keeps the
    stage durations additive.
    """
    results: list[Optional[ChannelResult]] = [None, None]
    errors: list[BaseException] = []

    def run(k: int, device: DeviceScene):
        try:
            results[k] = ChannelResult(*render_channel(device, settings, width, height, config))
        except BaseException as exc:  # re-raised on the caller's thread
            errors.append(exc)

    t0 = time.perf_counter_ns()
    if channel_parallel:
        thread = threading.Thread(target=run, args=(1, right), name="channel-right")
        thread.start()
        run(0, left)
        thread.join()
        wall = time.perf_counter_ns() - t0
        if errors:
            raise errors[0]
        own_left, own_right = results[0].stats.wall_ns, results[1].stats.wall_ns
        t_left = wall * own_left // max(1, own_left + own_right)
        t_right = wall - t_left
    else:
        run(0, left)
        t1 = time.perf_counter_ns()
        run(1, right)
        t2 = time.perf_counter_ns()
        if errors:
            raise errors[0]
        t_left, t_right = t1 - t0, t2 - t1
    return results[0], results[1], t_left, t_right


def render_stereo(scene: Scene, rig: StereoRig, accel: AccelHandle, settings: TraceSettings, width: int, height: int,
                  config: NetworkConfig = NetworkConfig(), channel_parallel: bool = True) -> tuple[Image, Image, StageTimings]:
    accel.check(scene)
    timings = StageTimings()
    t0 = time.perf_counter_ns()
    left_cam, right_cam = derive_eyes(rig)
    dev_left, dev_right = upload(accel, left_cam), upload(accel, right_cam)
    t1 = time.perf_counter_ns()
    res_l, res_r, timings.compute_left, timings.compute_right = compute_channels(
        dev_left, dev_right, settings, width, height, config, channel_parallel)
    t2 = time.perf_counter_ns()
    left, right = Image(quantize(res_l.framebuffer)), Image(quantize(res_r.framebuffer))
    t3 = time.perf_counter_ns()
    timings.transfer_in = t1 - t0
    timings.transfer_out = t3 - t2
    timings.total = t3 - t0
    return left, right, timings


# -- pipeline ----------------------------------------------------------------

@dataclass
class RenderJob:
    scene: Union[Scene, str, os.PathLike]
    width: int = 256
    height: int = 256
    config: NetworkConfig = NetworkConfig()
    settings: TraceSettings = TraceSettings()
    mode: str = "separate"
    accel: str = "bvh"
    channel_parallel: bool = True
    eye_separation: Optional[float] = None  # None takes the scene's value
    output: Optional[Union[str, os.PathLike]] = None

    def output_paths(self, count: int) -> list[Path]:
        if self.output is None:
            return []
        out = Path(self.output)
        if count == 1:
            return [out]
        return [out.with_name(f"{out.stem}_{side}{out.suffix or '.ppm'}") for side in ("left", "right")]


@dataclass
class StereoOutput:
    mode: str
    images: list[Image]
    timings: StageTimings
    encoded: list[bytes] = field(default_factory=list)
    stats: tuple[ComputeStats, ...] = ()
    scene: Optional[Scene] = None

    @property
    def intersection_tests(self) -> int:
        return sum(s.intersection_tests for s in self.stats)


def run_pipeline(job: RenderJob) -> StereoOutput:
    """Run all stages for ``job``. Mode ``mono`` renders the base camera alone (into ``compute_left``)."""
    if job.mode not in MODES + ("mono",):
        raise ValueError(f"unknown stereo mode {job.mode!r}; expected one of {MODES}")
    timings = StageTimings()
    t0 = time.perf_counter_ns()

    scene = job.scene if isinstance(job.scene, Scene) else load_scene(job.scene)
    sep = scene.eye_separation if job.eye_separation is None else job.eye_separation
    rig = StereoRig(scene.camera.with_aspect(job.width / job.height), sep)
    accel = build_accel(scene, job.accel)
    warmup.ensure_compiled()
    t1 = time.perf_counter_ns()

    if job.mode == "mono":
        device = upload(accel, rig.base)
        t2 = time.perf_counter_ns()
        fb, mono_stats = render_channel(device, job.settings, job.width, job.height, job.config)
        t3 = time.perf_counter_ns()
        timings.compute_left = t3 - t2
        images = [Image(quantize(fb))]
        t4 = time.perf_counter_ns()
        t5 = time.perf_counter_ns()
        stats = (mono_stats,)
    else:
        left_cam, right_cam = derive_eyes(rig)
        dev_left, dev_right = upload(accel, left_cam), upload(accel, right_cam)
        t2 = time.perf_counter_ns()

        res_l, res_r, timings.compute_left, timings.compute_right = compute_channels(
            dev_left, dev_right, job.settings, job.width, job.height, job.config, job.channel_parallel)
        t3 = time.perf_counter_ns()

        left, right = Image(quantize(res_l.framebuffer)), Image(quantize(res_r.framebuffer))
        t4 = time.perf_counter_ns()

        images = compose(job.mode, left, right)
        t5 = time.perf_counter_ns()
        stats = (res_l.stats, res_r.stats)

    encoded = [encode_ppm(img) for img in images]
    for data, path in zip(encoded, job.output_paths(len(encoded))):
        write_ppm(data, path)
    t6 = time.perf_counter_ns()

    timings.prepare = t1 - t0
    timings.transfer_in = t2 - t1
    timings.transfer_out = t4 - t3
    timings.postprocess = t5 - t4
    timings.encode = t6 - t5
    timings.total = t6 - t0
    return StereoOutput(job.mode, images, timings, encoded, stats, scene)
