"""Flat array views of a scene, the form the kernels consume."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import Camera, Scene


@dataclass(frozen=True)
class SceneArrays:
    tris: np.ndarray     # (n, 9)
    normals: np.ndarray  # (n, 3)
    tri_mat: np.ndarray  # (n,) int64
    tri_ids: np.ndarray  # (n, 2) int64 object index, face index
    mats: np.ndarray     # (m, 8)
    lights: np.ndarray   # (l, 6)
    env: np.ndarray      # (6,)

    @property
    def triangle_count(self) -> int:
        return self.tris.shape[0]

    def copy(self) -> SceneArrays:
        return SceneArrays(*(np.array(a, copy=True, order="C") for a in (
            self.tris, self.normals, self.tri_mat, self.tri_ids, self.mats, self.lights, self.env)))

    @property
    def nbytes(self) -> int:
        return sum(a.nbytes for a in (self.tris, self.normals, self.tri_mat, self.tri_ids, self.mats, self.lights, self.env))


def flatten_scene(scene: Scene) -> SceneArrays:
    tris, ids, mat_rows = [], [], []
    for k, obj in enumerate(scene.objects):
        verts = np.array([tuple(v) for v in obj.vertices], dtype=np.float64).reshape(-1, 3)
        if obj.faces:
            faces = np.array(obj.faces, dtype=np.int64)
            tris.append(verts[faces].reshape(-1, 9))
            ids.append(np.column_stack([np.full(len(faces), k), np.arange(len(faces))]))
            mat_rows.append(np.full(len(faces), k, dtype=np.int64))
    if tris:
        tri_arr = np.ascontiguousarray(np.concatenate(tris))
        tri_ids = np.ascontiguousarray(np.concatenate(ids).astype(np.int64))
        tri_mat = np.ascontiguousarray(np.concatenate(mat_rows))
    else:
        tri_arr = np.zeros((0, 9))
        tri_ids = np.zeros((0, 2), dtype=np.int64)
        tri_mat = np.zeros(0, dtype=np.int64)
    normals = np.cross(tri_arr[:, 3:6] - tri_arr[:, 0:3], tri_arr[:, 6:9] - tri_arr[:, 0:3])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True) if len(normals) else 1.0
    mats = np.array(
        [[*o.material.diffuse, *o.material.specular, o.material.shininess, o.material.reflectivity] for o in scene.objects],
        dtype=np.float64,
    ).reshape(-1, 8)
    lights = np.array([[*l.position, *l.intensity] for l in scene.lights], dtype=np.float64).reshape(-1, 6)
    env = np.array([*scene.ambient, *scene.background], dtype=np.float64)
    return SceneArrays(tri_arr, np.ascontiguousarray(normals), tri_mat, tri_ids, mats, lights, env)


def camera_basis(camera: Camera) -> np.ndarray:
    """Pack position, forward, right, true up and image-plane half extents."""
    pos = camera.position.to_array()
    forward = camera.look_at.to_array() - pos
    forward /= np.linalg.norm(forward)
    right = np.cross(forward, camera.up.to_array())
    right /= np.linalg.norm(right)
    up = np.cross(right, forward)
    half_h = math.tan(math.radians(camera.vertical_fov) / 2.0)
    half_w = half_h * camera.aspect
    return np.concatenate([pos, forward, right, up, [half_w, half_h]])
