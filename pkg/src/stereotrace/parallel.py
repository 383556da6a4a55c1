"""Intra-channel parallelism over a (blocks : threads-per-block) worker grid.

The image is cut into ``blocks`` horizontal bands of near-equal height and the
scanlines of each band are dealt round-robin to that block's workers. Every
worker writes only its own rows of a shared float framebuffer, so the result
does not depend on the grid shape or on thread scheduling.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .accel import AccelHandle
from .buffers import SceneArrays, camera_basis
from .image import Image, quantize
from .rays import TraceSettings
from .scene import Camera, Scene

THREADS_CAP_ENV = "STEREOTRACE_THREADS_CAP"


@dataclass(frozen=True)
class NetworkConfig:
    blocks: int = 1
    threads_per_block: int = 1

    def __post_init__(self):
        if self.blocks < 1 or self.threads_per_block < 1:
            raise ValueError(f"blocks and threads_per_block must be >= 1, got {self.blocks}:{self.threads_per_block}")

    @property
    def total_workers(self) -> int:
        return self.blocks * self.threads_per_block

    @classmethod
    def parse(cls, text: str) -> NetworkConfig:
        """Parse ``BxT`` or ``B:T``."""
        sep = "x" if "x" in text.lower() else ":"
        try:
            b, t = (int(p) for p in text.lower().split(sep))
        except ValueError:
            raise ValueError(f"network config must look like 4x1 or 4:1, got {text!r}") from None
        return cls(b, t)

    def __str__(self):
        return f"{self.blocks}x{self.threads_per_block}"


@dataclass(frozen=True)
class Tile:
    """Scanline band ``[row_start, row_end)`` shared by a block; ``rows`` are this worker's share."""

    row_start: int
    row_end: int
    worker_id: int
    rows: tuple[int, ...]


@dataclass(frozen=True)
class Assignment:
    width: int
    height: int
    config: NetworkConfig
    tiles: tuple[Tile, ...]

    def rows_of(self, worker_id: int) -> tuple[int, ...]:
        return self.tiles[worker_id].rows

    def row_counts(self) -> list[int]:
        return [len(t.rows) for t in self.tiles]


def band_edges(height: int, blocks: int) -> list[int]:
    base, extra = divmod(height, blocks)
    edges = [0]
    for b in range(blocks):
        edges.append(edges[-1] + base + (1 if b < extra else 0))
    return edges


def partition_image(width: int, height: int, config: NetworkConfig) -> Assignment:
    if width < 1 or height < 1:
        raise ValueError(f"image must be at least 1x1, got {width}x{height}")
    edges = band_edges(height, config.blocks)
    T = config.threads_per_block
    tiles = []
    for b in range(config.blocks):
        start, end = edges[b], edges[b + 1]
        for t in range(T):
            tiles.append(Tile(start, end, b * T + t, tuple(range(start + t, end, T))))
    return Assignment(width, height, config, tuple(tiles))


@dataclass
class ComputeStats:
    wall_ns: int = 0
    rows_per_worker: list[int] = field(default_factory=list)
    worker_ns: list[int] = field(default_factory=list)
    counters: np.ndarray = field(default_factory=kernels.new_stats)

    @property
    def intersection_tests(self) -> int:
        return int(self.counters[kernels.STAT_TESTS])

    @property
    def primary_rays(self) -> int:
        return int(self.counters[kernels.STAT_PRIMARY_RAYS])

    @property
    def primary_tests_per_ray(self) -> float:
        return float(self.counters[kernels.STAT_PRIMARY_TESTS]) / max(1, self.primary_rays)


@dataclass(frozen=True)
class DeviceScene:
    """Private copies of everything a render reads, standing in for device memory."""

    arrays: SceneArrays
    bounds: np.ndarray
    links: np.ndarray
    order: np.ndarray
    cam: np.ndarray

    @property
    def nbytes(self) -> int:
        return self.arrays.nbytes + self.bounds.nbytes + self.links.nbytes + self.order.nbytes + self.cam.nbytes


def upload(accel: AccelHandle, camera: Camera) -> DeviceScene:
    copy = lambda a: np.array(a, copy=True, order="C")  # noqa: E731
    return DeviceScene(accel.arrays.copy(), copy(accel.bounds), copy(accel.links), copy(accel.order),
                       copy(camera_basis(camera)))


def worker_cap() -> int | None:
    raw = os.environ.get(THREADS_CAP_ENV, "").strip()
    if not raw:
        return None
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"{THREADS_CAP_ENV} must be >= 1, got {raw}")
    return cap


def render_channel(device: DeviceScene, settings: TraceSettings, width: int, height: int,
                   config: NetworkConfig) -> tuple[np.ndarray, ComputeStats]:
    """Render into a fresh float framebuffer (height, width, 3) owned by the workers."""
    assignment = partition_image(width, height, config)
    fb = np.zeros((height, width, 3), dtype=np.float64)
    a = device.arrays

    def work(tile: Tile):
        stats = kernels.new_stats()
        rows = np.array(tile.rows, dtype=np.int64)
        t0 = time.perf_counter_ns()
        kernels.render_rows(
            rows, width, height, device.cam, a.tris, a.normals, a.tri_mat, a.mats, a.lights, a.env,
            device.bounds, device.links, device.order,
            settings.max_depth, settings.t_min, settings.shadow_bias, fb, stats,
        )
        return stats, time.perf_counter_ns() - t0

    n_threads = config.total_workers
    cap = worker_cap()
    if cap is not None:
        n_threads = min(n_threads, cap)

    t0 = time.perf_counter_ns()
    if n_threads == 1:
        results = [work(tile) for tile in assignment.tiles]
    else:
        with ThreadPoolExecutor(max_workers=n_threads, thread_name_prefix="render") as pool:
            results = list(pool.map(work, assignment.tiles))
    wall = time.perf_counter_ns() - t0

    stats = ComputeStats(wall, assignment.row_counts(), [ns for _, ns in results])
    for counters, _ in results:
        stats.counters += counters
    return fb, stats


def render_framebuffer(scene: Scene, camera: Camera, accel: AccelHandle, settings: TraceSettings,
                       width: int, height: int, config: NetworkConfig) -> tuple[np.ndarray, ComputeStats]:
    accel.check(scene)
    return render_channel(upload(accel, camera), settings, width, height, config)


def render_parallel(scene: Scene, camera: Camera, accel: AccelHandle, settings: TraceSettings,
                    width: int, height: int, config: NetworkConfig = NetworkConfig()) -> tuple[Image, ComputeStats]:
    fb, stats = render_framebuffer(scene, camera, accel, settings, width, height, config)
    return Image(quantize(fb)), stats
