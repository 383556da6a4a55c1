"""Ray generation, intersection and Whitted shading for single rays.

These are thin wrappers over the compiled kernels; image-sized work goes
through :mod:`stereotrace.parallel` which calls the row kernel directly.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import kernels
from .accel import AccelHandle, query_nearest
from .buffers import camera_basis
from .rays import Hit, Ray, TraceSettings
from .scene import Camera, Color, Scene, Vec3


def generate_primary_ray(camera: Camera, px: int, py: int, width: int, height: int) -> Ray:
    """Ray through the center of pixel (px, py); (0, 0) is the top-left pixel."""
    if not (0 <= px < width and 0 <= py < height):
        raise ValueError(f"pixel ({px}, {py}) outside {width}x{height} image")
    ox, oy, oz, dx, dy, dz = kernels.primary_ray(camera_basis(camera), px, py, width, height)
    return Ray(Vec3(ox, oy, oz), Vec3(dx, dy, dz))


def intersect_triangle(ray: Ray, v0: Vec3, v1: Vec3, v2: Vec3, t_min: float = 1e-4) -> Optional[tuple[float, tuple[float, float]]]:
    tri = np.array([[*v0, *v1, *v2]], dtype=np.float64)
    o, d = ray.origin, ray.direction
    t, u, v = kernels.intersect_tri(tri, 0, o.x, o.y, o.z, d.x, d.y, d.z, float(t_min))
    if t == np.inf:
        return None
    return float(t), (float(u), float(v))


def intersect_scene(ray: Ray, scene: Scene, accel: AccelHandle, t_min: float = 1e-4) -> Optional[Hit]:
    accel.check(scene)
    return query_nearest(accel, ray, t_min)


def reflect(direction: Vec3, normal: Vec3) -> Vec3:
    return direction - normal * (2.0 * direction.dot(normal))


def _trace(ray, accel, settings, depth, first_i, first_t, stats):
    a = accel.arrays
    o, d = ray.origin, ray.direction
    if stats is None:
        stats = kernels.new_stats()
    scratch = np.empty((depth + 2, 4), dtype=np.float64)
    r, g, b = kernels.trace_path(
        a.tris, a.normals, a.tri_mat, a.mats, a.lights, a.env, accel.bounds, accel.links, accel.order,
        o.x, o.y, o.z, d.x, d.y, d.z, int(depth), settings.t_min, settings.shadow_bias,
        first_i, first_t, kernels.new_stack(), scratch, stats,
    )
    return Color(r, g, b)


def shade(hit: Hit, ray: Ray, scene: Scene, accel: AccelHandle, settings: TraceSettings,
          depth_remaining: int, stats: Optional[np.ndarray] = None) -> Color:
    """Ambient + Phong terms for unshadowed lights + reflectivity * reflected trace."""
    accel.check(scene)
    return _trace(ray, accel, settings, depth_remaining, hit.triangle, hit.t, stats)


def trace(ray: Ray, scene: Scene, accel: AccelHandle, settings: TraceSettings,
          depth_remaining: Optional[int] = None, stats: Optional[np.ndarray] = None) -> Color:
    """Background color on a miss, otherwise the shaded hit.

    ``stats`` (see ``kernels.new_stats``) accumulates intersection tests,
    node visits and reflection bounces.
    """
    accel.check(scene)
    depth = settings.max_depth if depth_remaining is None else depth_remaining
    return _trace(ray, accel, settings, depth, kernels.QUERY, 0.0, stats)
