"""Line-oriented scene file format.

One record per line, ``#`` starts a comment::

    camera <pos xyz> <lookat xyz> <up xyz> <vfov_deg>
    stereo <eye_separation>
    light <pos xyz> <intensity rgb>
    ambient <rgb>
    background <rgb>
    object begin <name>
    v <xyz>
    f <i j k ...>            # 0-based, n-gons are fanned from the first index
    material <kd rgb> <ks rgb> <shininess> <reflectivity>
    object end
    builtin <cube|icosahedron|dodeca36> <center xyz> <scale> <kd rgb> <ks rgb> <shininess> <reflectivity>

Numbers are parsed with ``float()`` so the decimal separator is always ``.``.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

from .errors import ParseError, ValidationError, WriteError
from .scene import (
    BUILTIN_KINDS,
    DEFAULT_CAMERA,
    DEFAULT_EYE_SEPARATION,
    Camera,
    Color,
    Material,
    PointLight,
    Scene,
    Vec3,
    builtin_object,
    mesh_from_polygons,
)


def _floats(tokens: list[str], count: int, lineno: int, what: str) -> list[float]:
    if len(tokens) != count:
        raise ParseError(lineno, f"{what} expects {count} numbers, got {len(tokens)}")
    out = []
    for tok in tokens:
        try:
            value = float(tok)
        except ValueError:
            raise ParseError(lineno, f"{what}: {tok!r} is not a number") from None
        if not math.isfinite(value):
            raise ValidationError(what, f"non-finite number {tok!r} on line {lineno}")
        out.append(value)
    return out


def _material(tokens: list[str], lineno: int) -> Material:
    kr, kg, kb, sr, sg, sb, shininess, reflectivity = _floats(tokens, 8, lineno, "material")
    return Material(Color(kr, kg, kb), Color(sr, sg, sb), shininess, reflectivity)


def parse_scene(text: str) -> Scene:
    camera = DEFAULT_CAMERA
    eye_sep = DEFAULT_EYE_SEPARATION
    ambient = Color(0.0, 0.0, 0.0)
    background = Color(0.0, 0.0, 0.0)
    lights: list[PointLight] = []
    objects = []
    block = None  # (name, start line, vertices, polygons, material)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()

        if block is not None:
            name, start, verts, polys, material = block
            if head == "v":
                verts.append(Vec3(*_floats(rest, 3, lineno, "v")))
            elif head == "f":
                if len(rest) < 3:
                    raise ParseError(lineno, "face needs at least 3 indices")
                try:
                    polys.append([int(t) for t in rest])
                except ValueError:
                    raise ParseError(lineno, f"face indices must be integers: {' '.join(rest)}") from None
            elif head == "material":
                block = (name, start, verts, polys, _material(rest, lineno))
            elif head == "object" and rest == ["end"]:
                if material is None:
                    raise ParseError(lineno, f"object {name!r} has no material")
                objects.append(mesh_from_polygons(verts, polys, material, name))
                block = None
            else:
                raise ParseError(lineno, f"unexpected record {head!r} inside object {name!r}")
            continue

        if head == "camera":
            vals = _floats(rest, 10, lineno, "camera")
            camera = Camera(Vec3(*vals[0:3]), Vec3(*vals[3:6]), Vec3(*vals[6:9]), vals[9])
        elif head == "stereo":
            (eye_sep,) = _floats(rest, 1, lineno, "stereo")
        elif head == "light":
            vals = _floats(rest, 6, lineno, "light")
            lights.append(PointLight(Vec3(*vals[0:3]), Color(*vals[3:6])))
        elif head == "ambient":
            ambient = Color(*_floats(rest, 3, lineno, "ambient"))
        elif head == "background":
            background = Color(*_floats(rest, 3, lineno, "background"))
        elif head == "object":
            if len(rest) != 2 or rest[0] != "begin":
                raise ParseError(lineno, "expected 'object begin <name>'")
            block = (rest[1], lineno, [], [], None)
        elif head == "builtin":
            if not rest or rest[0] not in BUILTIN_KINDS:
                raise ParseError(lineno, f"builtin kind must be one of {', '.join(BUILTIN_KINDS)}")
            vals = _floats(rest[1:], 12, lineno, "builtin")
            if vals[3] <= 0.0:
                raise ValidationError(f"builtin {rest[0]}", f"scale must be > 0 (line {lineno})")
            material = _material([repr(v) for v in vals[4:]], lineno)
            objects.append(builtin_object(rest[0], Vec3(*vals[0:3]), vals[3], material))
        else:
            raise ParseError(lineno, f"unknown record {head!r}")

    if block is not None:
        raise ParseError(block[1], f"object {block[0]!r} is missing 'object end'")
    return Scene(tuple(objects), tuple(lights), ambient, background, camera, eye_sep)


def load_scene(path: str | os.PathLike) -> Scene:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"scene file not found: {path}")
    return parse_scene(path.read_text(encoding="utf-8"))


def _fmt(*values: float) -> str:
    return " ".join(repr(float(v)) for v in values)


def dump_scene(scene: Scene, header: str | None = None) -> str:
    """Serialize ``scene`` so that ``parse_scene`` reproduces it exactly."""
    lines = []
    if header:
        lines += [f"# {h}" for h in header.splitlines()]
    lines.append(f"# objects={len(scene.objects)} triangles={scene.triangle_count}")
    cam = scene.camera
    lines.append(f"camera {_fmt(*cam.position, *cam.look_at, *cam.up, cam.vertical_fov)}")
    lines.append(f"stereo {_fmt(scene.eye_separation)}")
    lines.append(f"ambient {_fmt(*scene.ambient)}")
    lines.append(f"background {_fmt(*scene.background)}")
    for light in scene.lights:
        lines.append(f"light {_fmt(*light.position, *light.intensity)}")
    for obj in scene.objects:
        if any(c.isspace() for c in obj.name) or not obj.name or "#" in obj.name:
            raise ValidationError(f"object {obj.name!r}", "name must be a single token without '#'")
        m = obj.material
        lines.append(f"object begin {obj.name}")
        lines += [f"v {_fmt(*v)}" for v in obj.vertices]
        lines += [f"f {a} {b} {c}" for a, b, c in obj.faces]
        lines.append(f"material {_fmt(*m.diffuse, *m.specular, m.shininess, m.reflectivity)}")
        lines.append("object end")
    return "\n".join(lines) + "\n"


def save_scene(scene: Scene, path: str | os.PathLike, header: str | None = None) -> None:
    try:
        Path(path).write_text(dump_scene(scene, header), encoding="utf-8")
    except OSError as exc:
        raise WriteError(f"cannot write scene file {path}: {exc}") from exc
