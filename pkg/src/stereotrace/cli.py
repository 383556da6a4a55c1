"""``stereotrace`` command line: render, stereo, bench and scene gen."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from ._jit import BACKEND
from .bench import BenchPlan, run_bench, summarize
from .errors import StereoTraceError
from .parallel import NetworkConfig
from .rays import TraceSettings
from .scene import BUILTIN_KINDS, PAPER_SCENE_COUNTS, Color, Material, Scene, Vec3, builtin_object, paper_scene
from .scenefile import save_scene
from .stereo import MODES, RenderJob, run_pipeline, stage_fractions

log = logging.getLogger("stereotrace")


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 128x128, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"size must be at least 1x1, got {text!r}")
    return w, h


def _config(text: str) -> NetworkConfig:
    try:
        return NetworkConfig.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _csv_of(kind):
    def parse(text: str):
        return [kind(p) for p in text.split(",") if p]
    return parse


def _paper_count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n not in PAPER_SCENE_COUNTS:
        raise argparse.ArgumentTypeError(f"paper scenes exist for {', '.join(map(str, PAPER_SCENE_COUNTS))}; got {n}")
    return n


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _add_scene_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scene", type=Path, help="scene file")
    src.add_argument("--paper-scene", type=_paper_count, help="built-in experiment scene (object count)")


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    _add_scene_flags(p)
    p.add_argument("--size", type=_size, default=(256, 256), help="WxH (default 256x256)")
    p.add_argument("--config", type=_config, default=NetworkConfig(1, 1), help="worker grid BxT (default 1x1)")
    p.add_argument("--accel", choices=("linear", "bvh"), default="bvh")
    p.add_argument("--depth", type=int, default=TraceSettings().max_depth, help="max reflection depth")
    p.add_argument("-o", "--output", type=Path, help="output PPM path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stereotrace", description="Parallel stereo ray tracer and benchmark harness")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render one image from the scene camera")
    _add_render_flags(render)

    stereo = sub.add_parser("stereo", help="render a stereo pair")
    _add_render_flags(stereo)
    stereo.add_argument("--mode", choices=MODES, default="anaglyph")
    stereo.add_argument("--eye-sep", type=_positive_float, help="eye separation (default: from the scene)")
    stereo.add_argument("--channel-parallel", type=_on_off, default=True, metavar="on|off")

    bench = sub.add_parser("bench", help="run a timing sweep and write a CSV report")
    src = bench.add_mutually_exclusive_group()
    src.add_argument("--scene", type=Path, action="append", help="scene file (repeatable)")
    src.add_argument("--paper-scene", type=_csv_of(_paper_count), help="comma list of paper scenes (default 1,2,3,5,6)")
    bench.add_argument("--size", type=_csv_of(_size), help="comma list of WxH (default 128x128,256x256)")
    bench.add_argument("--configs", type=_csv_of(_config), default=None, help="comma list, default 1x1,2x1,4x1")
    bench.add_argument("--config", type=_config, help="single config (alternative to --configs)")
    bench.add_argument("--accel", type=_csv_of(str), default=["bvh"], help="comma list of linear,bvh")
    bench.add_argument("--depth", type=int, default=TraceSettings().max_depth)
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--mode", choices=MODES, default="anaglyph")
    bench.add_argument("--out-csv", type=Path, default=Path("bench.csv"))
    bench.add_argument("-o", "--output", type=Path, help="alias for --out-csv")

    scene = sub.add_parser("scene", help="scene file utilities")
    scene_sub = scene.add_subparsers(dest="scene_command", required=True)
    gen = scene_sub.add_parser("gen", help="write a paper scene or a single built-in object")
    src = gen.add_mutually_exclusive_group(required=True)
    src.add_argument("--paper-scene", type=_paper_count)
    src.add_argument("--builtin", choices=BUILTIN_KINDS)
    gen.add_argument("-o", "--output", type=Path, required=True)
    return parser


def _settings(args) -> TraceSettings:
    return TraceSettings(max_depth=args.depth)


def _scene_source(args):
    if args.scene is not None:
        return args.scene
    return paper_scene(args.paper_scene if args.paper_scene is not None else 1)


def _print_timings(out) -> None:
    t = out.timings
    stages = ", ".join(f"{k}={v / 1e6:.2f}ms" for k, v in t.as_dict().items())
    fr = stage_fractions(t)
    print(f"stages: {stages}")
    print(f"fractions: compute={fr['compute']:.3f} transfer={fr['transfer']:.3f} other={fr['other']:.3f}; "
          f"intersection tests={out.intersection_tests}")


def cmd_render(args, mode: str) -> int:
    w, h = args.size
    job = RenderJob(_scene_source(args), w, h, args.config, _settings(args), mode, args.accel,
                    output=args.output or Path("out.ppm"))
    if mode != "mono":
        job.channel_parallel = args.channel_parallel
        job.eye_separation = args.eye_sep
    out = run_pipeline(job)
    for path in job.output_paths(len(out.images)):
        print(f"wrote {path}")
    _print_timings(out)
    return 0


def cmd_bench(args) -> int:
    if args.reps < 1:
        raise argparse.ArgumentTypeError("--reps must be >= 1")
    configs = [args.config] if args.config else (args.configs or [NetworkConfig(1, 1), NetworkConfig(2, 1), NetworkConfig(4, 1)])
    plan = BenchPlan(repetitions=args.reps, configs=configs, accel_modes=args.accel, mode=args.mode,
                     settings=TraceSettings(max_depth=args.depth))
    if args.scene:
        plan.scenes = [str(p) for p in args.scene]
    elif args.paper_scene:
        plan.scenes = args.paper_scene
    if args.size:
        plan.resolutions = args.size
    out_csv = args.output or args.out_csv
    records, failures = run_bench(plan, out_csv)
    report = summarize(records)
    summary_path = out_csv.with_name(out_csv.stem + "_summary.txt")
    summary_path.write_text(report, encoding="utf-8")
    print(report, end="")
    print(f"wrote {len(records)} rows to {out_csv}; summary in {summary_path}")
    if failures:
        print(f"{len(failures)} cell(s) failed", file=sys.stderr)
        return 1
    return 0


def cmd_scene_gen(args) -> int:
    if args.paper_scene is not None:
        scene = paper_scene(args.paper_scene)
        header = f"benchmark scene with {args.paper_scene} objects and 1 light"
    else:
        mat = Material(Color(0.7, 0.7, 0.7), Color(0.5, 0.5, 0.5), 32.0, 0.0)
        obj = builtin_object(args.builtin, Vec3(0.0, 0.0, 0.0), 4.0, mat)
        scene = Scene((obj,), paper_scene(1).lights, Color(0.1, 0.1, 0.1))
        header = f"single built-in {args.builtin}"
    save_scene(scene, args.output, header=header)
    print(f"wrote {args.output} ({len(scene.objects)} objects, {scene.triangle_count} triangles)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "render":
            return cmd_render(args, "mono")
        if args.command == "stereo":
            return cmd_render(args, args.mode)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "scene":
            return cmd_scene_gen(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except FileNotFoundError as exc:
        print(f"stereotrace: error: {exc}", file=sys.stderr)
        return 1
    except (StereoTraceError, OSError, ValueError) as exc:
        print(f"stereotrace: error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
