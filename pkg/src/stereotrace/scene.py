"""Scene description: vectors, materials, meshes, lights, cameras and scenes.

Every type validates itself on construction and is immutable afterwards, so a
``Scene`` can be shared between any number of render workers without copying.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import UnsupportedCount, ValidationError

DEGENERATE_AREA_EPS = 1e-12


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError("Vec3", f"component {name} is not finite ({value})")
            object.__setattr__(self, name, value)

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z

    def __add__(self, other: Vec3) -> Vec3:
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vec3) -> Vec3:
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, k: float) -> Vec3:
        return Vec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def __neg__(self) -> Vec3:
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: Vec3) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: Vec3) -> Vec3:
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> Vec3:
        n = self.norm()
        if n == 0.0:
            raise ValidationError("Vec3", "cannot normalize a zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)


@dataclass(frozen=True)
class Color:
    r: float
    g: float
    b: float

    def __post_init__(self):
        for name in ("r", "g", "b"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0.0:
                raise ValidationError("Color", f"component {name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)

    def __iter__(self):
        yield self.r
        yield self.g
        yield self.b

    def to_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64)


@dataclass(frozen=True)
class Material:
    diffuse: Color
    specular: Color = Color(0.0, 0.0, 0.0)
    shininess: float = 1.0
    reflectivity: float = 0.0

    def __post_init__(self):
        shininess = float(self.shininess)
        reflectivity = float(self.reflectivity)
        if not math.isfinite(shininess) or shininess < 1.0:
            raise ValidationError("Material", f"shininess must be >= 1, got {shininess}")
        if not 0.0 <= reflectivity <= 1.0:
            raise ValidationError("Material", f"reflectivity must be in [0, 1], got {reflectivity}")
        object.__setattr__(self, "shininess", shininess)
        object.__setattr__(self, "reflectivity", reflectivity)


@dataclass(frozen=True)
class TriangleMesh:
    """Triangle mesh with one material.

    Faces are 0-based vertex index triples wound counter-clockwise when seen
    from outside. Faces whose area is at most ``1e-12 * diagonal**2`` (with
    ``diagonal`` the mesh bounding-box diagonal) are rejected.
    """

    vertices: tuple[Vec3, ...]
    faces: tuple[tuple[int, int, int], ...]
    material: Material
    name: str = "mesh"

    def __post_init__(self):
        vertices = tuple(v if isinstance(v, Vec3) else Vec3(*v) for v in self.vertices)
        faces = tuple(tuple(int(i) for i in f) for f in self.faces)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)
        entity = f"object {self.name!r}"
        n = len(vertices)
        for k, face in enumerate(faces):
            if len(face) != 3:
                raise ValidationError(entity, f"face {k} has {len(face)} indices, expected 3")
            for i in face:
                if not 0 <= i < n:
                    raise ValidationError(entity, f"face {k} index {i} out of range for {n} vertices")
        if not faces:
            return
        pts = np.array([tuple(v) for v in vertices], dtype=np.float64)
        diag2 = float(np.sum((pts.max(axis=0) - pts.min(axis=0)) ** 2))
        for k, (a, b, c) in enumerate(faces):
            area = 0.5 * float(np.linalg.norm(np.cross(pts[b] - pts[a], pts[c] - pts[a])))
            if area <= DEGENERATE_AREA_EPS * diag2:
                raise ValidationError(entity, f"face {k} is degenerate (area {area:g})")


@dataclass(frozen=True)
class PointLight:
    position: Vec3
    intensity: Color


@dataclass(frozen=True)
class Camera:
    position: Vec3
    look_at: Vec3
    up: Vec3 = Vec3(0.0, 1.0, 0.0)
    vertical_fov: float = 40.0
    aspect: float = 1.0

    def __post_init__(self):
        fov = float(self.vertical_fov)
        aspect = float(self.aspect)
        if not (0.0 < fov < 180.0):
            raise ValidationError("camera", f"vertical_fov must be in (0, 180), got {fov}")
        if not (math.isfinite(aspect) and aspect > 0.0):
            raise ValidationError("camera", f"aspect must be > 0, got {aspect}")
        forward = self.look_at - self.position
        if forward.norm() == 0.0:
            raise ValidationError("camera", "position equals look_at")
        if forward.cross(self.up).norm() <= 1e-12 * forward.norm() * self.up.norm():
            raise ValidationError("camera", "up is parallel to the view direction")
        object.__setattr__(self, "vertical_fov", fov)
        object.__setattr__(self, "aspect", aspect)

    def with_aspect(self, aspect: float) -> Camera:
        return Camera(self.position, self.look_at, self.up, self.vertical_fov, aspect)

    def with_position(self, position: Vec3) -> Camera:
        return Camera(position, self.look_at + (position - self.position), self.up, self.vertical_fov, self.aspect)


DEFAULT_CAMERA = Camera(Vec3(0.0, 0.0, 15.0), Vec3(0.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0), 40.0, 1.0)
DEFAULT_EYE_SEPARATION = 0.065


@dataclass(frozen=True)
class Scene:
    """Immutable world description.

    ``camera`` and ``eye_separation`` ride along so a scene file fully
    describes a render job; they do not affect geometry.
    """

    objects: tuple[TriangleMesh, ...] = ()
    lights: tuple[PointLight, ...] = ()
    ambient: Color = Color(0.0, 0.0, 0.0)
    background: Color = Color(0.0, 0.0, 0.0)
    camera: Camera = DEFAULT_CAMERA
    eye_separation: float = DEFAULT_EYE_SEPARATION

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "lights", tuple(self.lights))
        sep = float(self.eye_separation)
        if not (math.isfinite(sep) and sep > 0.0):
            raise ValidationError("stereo", f"eye_separation must be > 0, got {sep}")
        object.__setattr__(self, "eye_separation", sep)

    @property
    def triangle_count(self) -> int:
        return sum(len(obj.faces) for obj in self.objects)

    @cached_property
    def revision(self) -> str:
        """Content digest of the geometry and shading data."""
        h = hashlib.sha1()
        for obj in self.objects:
            h.update(repr((obj.name, tuple(tuple(v) for v in obj.vertices), obj.faces, obj.material)).encode())
        h.update(repr((self.lights, self.ambient, self.background)).encode())
        return h.hexdigest()


# -- built-in solids ---------------------------------------------------------

PHI = (1.0 + math.sqrt(5.0)) / 2.0
BUILTIN_KINDS = ("cube", "icosahedron", "dodeca36")
# circumradius of icosahedron / dodeca36 at scale 1
POLY_RADIUS = 0.75


def _cube_vertices() -> np.ndarray:
    return np.array(list(itertools.product((-0.5, 0.5), repeat=3)), dtype=np.float64)


def _icosahedron_vertices() -> np.ndarray:
    pts = []
    for a, b in itertools.product((-1.0, 1.0), repeat=2):
        pts += [(0.0, a, b * PHI), (a, b * PHI, 0.0), (b * PHI, 0.0, a)]
    return np.array(pts, dtype=np.float64)


def _dodecahedron_vertices() -> np.ndarray:
    inv = 1.0 / PHI
    pts = [p for p in itertools.product((-1.0, 1.0), repeat=3)]
    for a, b in itertools.product((-1.0, 1.0), repeat=2):
        pts += [(0.0, a * PHI, b * inv), (a * PHI, b * inv, 0.0), (b * inv, 0.0, a * PHI)]
    return np.array(pts, dtype=np.float64)


def _fan_faces(vertices: np.ndarray, face_dirs: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a convex solid given one outward direction per polygon.

    The polygon for a direction is the set of vertices maximising the dot
    product with it; its corners are ordered counter-clockwise around the
    direction and fanned from the first corner.
    """
    faces = []
    for d in face_dirs:
        d = d / np.linalg.norm(d)
        proj = vertices @ d
        idx = np.flatnonzero(proj >= proj.max() - 1e-9)
        center = vertices[idx].mean(axis=0)
        ref = vertices[idx[0]] - center
        ref /= np.linalg.norm(ref)
        side = np.cross(d, ref)
        angles = [math.atan2(float((vertices[i] - center) @ side), float((vertices[i] - center) @ ref)) for i in idx]
        ring = [int(i) for _, i in sorted(zip([a % (2 * math.pi) for a in angles], idx))]
        faces += [(ring[0], ring[k], ring[k + 1]) for k in range(1, len(ring) - 1)]
    return faces


def _unit_solid(kind: str) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    if kind == "cube":
        verts = _cube_vertices()
        dirs = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=np.float64)
    elif kind == "icosahedron":
        verts = _icosahedron_vertices()
        dirs = _dodecahedron_vertices()
    elif kind == "dodeca36":
        verts = _dodecahedron_vertices()
        dirs = _icosahedron_vertices()
    else:
        raise ValueError(f"unknown builtin object kind {kind!r}; expected one of {BUILTIN_KINDS}")
    if kind != "cube":
        verts = verts * (POLY_RADIUS / np.linalg.norm(verts[0]))
    return verts, _fan_faces(verts, dirs)


def builtin_object(kind: str, center: Vec3, scale: float, material: Material, name: str | None = None) -> TriangleMesh:
    """Return one of the experiment solids.

    ``cube`` has edge ``scale``; ``icosahedron`` and ``dodeca36`` have
    circumradius ``0.75 * scale``. ``dodeca36`` is a regular dodecahedron
    with each pentagon fanned into three triangles.
    """
    scale = float(scale)
    if not (math.isfinite(scale) and scale > 0.0):
        raise ValueError(f"scale must be > 0, got {scale}")
    verts, faces = _unit_solid(kind)
    c = np.array(tuple(center), dtype=np.float64)
    pts = verts * scale + c
    vertices = tuple(Vec3(*(float(x) for x in p)) for p in pts)
    return TriangleMesh(vertices, tuple(faces), material, name or kind)


# -- experiment scenes -------------------------------------------------------

PAPER_SCENE_COUNTS = (1, 2, 3, 5, 6)

# Scene n uses the first n slots, so adding objects only ever adds geometry.
# Slot 0 sits on the optical axis; the others are spread on a ring of radius 3.5.
def _ring(k: int, z: float) -> Vec3:
    angle = math.radians(90.0 + 72.0 * k)
    return Vec3(round(3.5 * math.cos(angle), 12), round(3.5 * math.sin(angle), 12), z)


_SLOTS = (
    ("cube", Vec3(0.0, 0.0, 0.0), Material(Color(0.8, 0.2, 0.2), Color(0.5, 0.5, 0.5), 32.0, 0.0)),
    ("cube", _ring(0, -0.5), Material(Color(0.2, 0.7, 0.2), Color(0.3, 0.3, 0.3), 16.0, 0.2)),
    ("icosahedron", _ring(1, 0.0), Material(Color(0.2, 0.3, 0.8), Color(0.6, 0.6, 0.6), 64.0, 0.25)),
    ("icosahedron", _ring(2, 0.5), Material(Color(0.8, 0.7, 0.2), Color(0.4, 0.4, 0.4), 24.0, 0.1)),
    ("dodeca36", _ring(3, 0.0), Material(Color(0.6, 0.3, 0.7), Color(0.7, 0.7, 0.7), 48.0, 0.3)),
    ("dodeca36", _ring(4, -0.5), Material(Color(0.3, 0.7, 0.7), Color(0.5, 0.5, 0.5), 40.0, 0.15)),
)
_SLOT_SCALE = 1.8
PAPER_LIGHT = PointLight(Vec3(5.0, 8.0, 10.0), Color(1.0, 1.0, 1.0))
PAPER_AMBIENT = Color(0.1, 0.1, 0.1)
PAPER_BACKGROUND = Color(0.05, 0.05, 0.08)


def paper_scene(object_count: int) -> Scene:
    """Deterministic experiment scene with ``object_count`` solids and one light.

    Compositions: 1 = cube; 2 = 2 cubes; 3 = 2 cubes + icosahedron;
    5 = 2 cubes + 2 icosahedra + dodeca36; 6 = 5 plus a second dodeca36.
    """
    if object_count not in PAPER_SCENE_COUNTS:
        raise UnsupportedCount(f"paper scenes exist for object counts {PAPER_SCENE_COUNTS}, got {object_count}")
    objects = tuple(
        builtin_object(kind, center, _SLOT_SCALE, material, name=f"{kind}{k}")
        for k, (kind, center, material) in enumerate(_SLOTS[:object_count])
    )
    return Scene(objects, (PAPER_LIGHT,), PAPER_AMBIENT, PAPER_BACKGROUND)


def mesh_from_polygons(
    vertices: Sequence[Vec3], polygons: Iterable[Sequence[int]], material: Material, name: str = "mesh"
) -> TriangleMesh:
    """Build a mesh, fanning each n-gon from its first vertex."""
    faces = []
    for poly in polygons:
        poly = list(poly)
        if len(poly) < 3:
            raise ValidationError(f"object {name!r}", f"polygon {poly} has fewer than 3 vertices")
        faces += [(poly[0], poly[k], poly[k + 1]) for k in range(1, len(poly) - 1)]
    return TriangleMesh(tuple(vertices), tuple(faces), material, name)
