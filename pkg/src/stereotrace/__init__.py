"""Parallel stereo ray tracer with staged timing instrumentation."""

__version__ = "0.1.0"

from ._jit import BACKEND, JIT_ENABLED
from .accel import AccelHandle, build_accel, build_bvh, build_linear, query_nearest
from .errors import (
    AccelMismatch,
    DimensionMismatch,
    ParseError,
    StereoTraceError,
    UnsupportedCount,
    ValidationError,
    WriteError,
    ZeroTotal,
)
from .image import Image, decode_ppm, encode_ppm, read_ppm, write_ppm
from .parallel import NetworkConfig, partition_image, render_parallel
from .rays import Hit, Ray, TraceSettings
from .scene import Camera, Color, Material, PointLight, Scene, TriangleMesh, Vec3, builtin_object, paper_scene
from .scenefile import dump_scene, load_scene, parse_scene, save_scene
from .stereo import (
    RenderJob,
    StageTimings,
    StereoOutput,
    StereoRig,
    compose_anaglyph,
    compose_sbs,
    derive_eyes,
    render_stereo,
    run_pipeline,
    stage_fractions,
)
from .tracer import generate_primary_ray, intersect_scene, intersect_triangle, reflect, shade, trace
