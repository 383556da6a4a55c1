from __future__ import annotations

import math
from dataclasses import dataclass

from .scene import Vec3


@dataclass(frozen=True)
class Ray:
    origin: Vec3
    direction: Vec3

    def __post_init__(self):
        n = self.direction.norm()
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"ray direction must be unit length, |d| = {n!r}")

    @classmethod
    def toward(cls, origin: Vec3, target: Vec3) -> Ray:
        return cls(origin, (target - origin).normalized())

    def at(self, t: float) -> Vec3:
        return self.origin + self.direction * t


@dataclass(frozen=True)
class Hit:
    t: float
    point: Vec3
    normal: Vec3
    object_index: int
    face_index: int
    triangle: int  # flat triangle id, object-major


@dataclass(frozen=True)
class TraceSettings:
    max_depth: int = 3
    t_min: float = 1e-4
    shadow_bias: float = 1e-4

    def __post_init__(self):
        if int(self.max_depth) != self.max_depth or self.max_depth < 0:
            raise ValueError(f"max_depth must be a non-negative integer, got {self.max_depth}")
        for name in ("t_min", "shadow_bias"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be > 0, got {value}")
