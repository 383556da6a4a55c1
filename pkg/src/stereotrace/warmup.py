"""One-time kernel compilation, run during the prepare stage."""

import threading

import numpy as np

from . import kernels

_done = False
_lock = threading.Lock()


def ensure_compiled() -> None:
    """Trigger JIT compilation of the row kernel on a one-triangle scene."""
    global _done
    if _done:
        return
    with _lock:
        if _done:
            return
        tris = np.array([[-1.0, -1.0, 0.0, 1.0, -1.0, 0.0, 0.0, 1.0, 0.0]])
        normals = np.array([[0.0, 0.0, 1.0]])
        tri_mat = np.zeros(1, dtype=np.int64)
        mats = np.array([[0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 8.0, 0.5]])
        lights = np.array([[0.0, 0.0, 5.0, 1.0, 1.0, 1.0]])
        env = np.zeros(6)
        bounds = np.array([[-1.0, -1.0, 0.0, 1.0, 1.0, 0.0]])
        links = np.array([[-1, -1, 0, 1, 0]], dtype=np.int64)
        order = np.zeros(1, dtype=np.int64)
        cam = np.array([0.0, 0.0, 5.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 0.5])
        fb = np.zeros((1, 1, 3))
        kernels.render_rows(np.zeros(1, dtype=np.int64), 1, 1, cam, tris, normals, tri_mat, mats, lights, env,
                            bounds, links, order, 1, 1e-4, 1e-4, fb, kernels.new_stats())
        _done = True
