"""Nearest-hit acceleration: a median-split BVH and a brute-force linear scan.

Both modes go through the same kernel and the same tie-break (smallest flat
triangle id, which is lexicographic ``(object_index, face_index)``), so their
answers are bit-comparable. The linear scan is the correctness oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .buffers import SceneArrays, flatten_scene
from .errors import AccelMismatch
from .rays import Hit, Ray
from .scene import Scene, Vec3

DEFAULT_LEAF_MAX = 4


@dataclass(frozen=True)
class Aabb:
    min: tuple[float, float, float]
    max: tuple[float, float, float]

    def contains(self, other: Aabb) -> bool:
        return all(a <= b for a, b in zip(self.min, other.min)) and all(a >= b for a, b in zip(self.max, other.max))


@dataclass(frozen=True)
class BvhNode:
    bounds: Aabb
    left: int = -1
    right: int = -1
    first: int = 0
    count: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.count > 0


@dataclass(frozen=True, eq=False)
class AccelHandle:
    mode: str
    revision: str
    arrays: SceneArrays
    bounds: np.ndarray  # (k, 6)
    links: np.ndarray   # (k, 5) int64
    order: np.ndarray   # (n,) int64

    @property
    def triangle_count(self) -> int:
        return self.arrays.triangle_count

    @property
    def node_count(self) -> int:
        return self.links.shape[0]

    def node(self, k: int) -> BvhNode:
        b = self.bounds[k]
        left, right, first, count, _ = (int(x) for x in self.links[k])
        return BvhNode(Aabb(tuple(b[:3]), tuple(b[3:])), left, right, first, count)

    def nodes(self) -> list[BvhNode]:
        return [self.node(k) for k in range(self.node_count)]

    def leaf_triangles(self, k: int) -> np.ndarray:
        first, count = self.links[k, 2], self.links[k, 3]
        return self.order[first:first + count]

    def depth(self) -> int:
        if self.node_count == 0:
            return 0
        deepest, stack = 0, [(0, 1)]
        while stack:
            k, d = stack.pop()
            deepest = max(deepest, d)
            if self.links[k, 3] == 0:
                stack += [(int(self.links[k, 0]), d + 1), (int(self.links[k, 1]), d + 1)]
        return deepest

    def check(self, scene: Scene) -> None:
        if scene.revision != self.revision:
            raise AccelMismatch(f"accel built for scene revision {self.revision[:12]}, got {scene.revision[:12]}")


def _no_nodes(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return np.zeros((0, 6)), np.zeros((0, 5), dtype=np.int64), np.arange(n, dtype=np.int64)


def build_linear(scene: Scene) -> AccelHandle:
    arrays = flatten_scene(scene)
    return AccelHandle("linear", scene.revision, arrays, *_no_nodes(arrays.triangle_count))


def build_bvh(scene: Scene, leaf_max: int = DEFAULT_LEAF_MAX) -> AccelHandle:
    """Binary BVH by median split on the longest axis of the centroid bounds."""
    if leaf_max < 1:
        raise ValueError(f"leaf_max must be >= 1, got {leaf_max}")
    arrays = flatten_scene(scene)
    n = arrays.triangle_count
    if n == 0:
        return AccelHandle("bvh", scene.revision, arrays, *_no_nodes(0))

    pts = arrays.tris.reshape(n, 3, 3)
    tri_lo = pts.min(axis=1)
    tri_hi = pts.max(axis=1)
    centroids = pts.mean(axis=1)
    bounds: list[np.ndarray] = []
    links: list[list[int]] = []
    order: list[int] = []

    def build(ids: np.ndarray) -> int:
        k = len(links)
        bounds.append(None)
        links.append([-1, -1, 0, 0, 0])
        if len(ids) <= leaf_max:
            links[k][2:4] = [len(order), len(ids)]
            order.extend(int(i) for i in ids)
            bounds[k] = np.concatenate([tri_lo[ids].min(axis=0), tri_hi[ids].max(axis=0)])
            return k
        c = centroids[ids]
        axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
        ids = ids[np.lexsort((ids, c[:, axis]))]
        mid = len(ids) // 2
        left = build(ids[:mid])
        right = build(ids[mid:])
        links[k] = [left, right, 0, 0, axis]
        bounds[k] = np.concatenate([
            np.minimum(bounds[left][:3], bounds[right][:3]),
            np.maximum(bounds[left][3:], bounds[right][3:]),
        ])
        return k

    build(np.arange(n, dtype=np.int64))
    return AccelHandle(
        "bvh",
        scene.revision,
        arrays,
        np.ascontiguousarray(np.array(bounds, dtype=np.float64)),
        np.ascontiguousarray(np.array(links, dtype=np.int64)),
        np.array(order, dtype=np.int64),
    )


def build_accel(scene: Scene, mode: str, leaf_max: int = DEFAULT_LEAF_MAX) -> AccelHandle:
    if mode == "bvh":
        return build_bvh(scene, leaf_max)
    if mode == "linear":
        return build_linear(scene)
    raise ValueError(f"unknown accel mode {mode!r}; expected 'linear' or 'bvh'")


def make_hit(handle: AccelHandle, ray: Ray, tri: int, t: float) -> Hit:
    a = handle.arrays
    d = ray.direction
    n = a.normals[tri]
    if n[0] * d.x + n[1] * d.y + n[2] * d.z > 0.0:
        n = -n
    o = ray.origin
    point = Vec3(o.x + t * d.x, o.y + t * d.y, o.z + t * d.z)
    obj, face = (int(x) for x in a.tri_ids[tri])
    return Hit(float(t), point, Vec3(*n), obj, face, int(tri))


def query_nearest(handle: AccelHandle, ray: Ray, t_min: float, stats: Optional[np.ndarray] = None) -> Optional[Hit]:
    """Nearest hit with t > t_min, or None. ``stats`` collects kernel counters if given."""
    if stats is None:
        stats = kernels.new_stats()
    o, d = ray.origin, ray.direction
    tri, t = kernels.nearest(
        handle.arrays.tris, handle.bounds, handle.links, handle.order,
        o.x, o.y, o.z, d.x, d.y, d.z, float(t_min), kernels.new_stack(), stats,
    )
    if tri < 0:
        return None
    return make_hit(handle, ray, int(tri), t)
