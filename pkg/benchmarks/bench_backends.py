"""Compare the numba kernels with the plain-Python fallback.

Each backend runs in its own interpreter because the choice is made at import
time from STEREOTRACE_DISABLE_JIT. Reports median compute time per render and
checks that both backends produce the same bytes.

    python3 benchmarks/bench_backends.py --paper-scene 6 --size 64x64 --reps 3
"""

import argparse
import json
import os
import statistics
import subprocess
import sys

CHILD = r"""
import hashlib, json, sys
from stereotrace import BACKEND
from stereotrace.parallel import NetworkConfig
from stereotrace.scene import paper_scene
from stereotrace.stereo import RenderJob, run_pipeline
n, w, h, reps, cfg, accel = int(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3]), int(sys.argv[4]), sys.argv[5], sys.argv[6]
scene = paper_scene(n)
times, digest = [], None
for _ in range(reps):
    out = run_pipeline(RenderJob(scene, w, h, NetworkConfig.parse(cfg), mode="mono", accel=accel))
    times.append(out.timings.compute_left)
    digest = hashlib.sha1(out.encoded[0]).hexdigest()
print(json.dumps({"backend": BACKEND, "compute_ns": times, "sha1": digest}))
"""


def run_backend(disable_jit, args):
    env = dict(os.environ)
    env.pop("STEREOTRACE_DISABLE_JIT", None)
    if disable_jit:
        env["STEREOTRACE_DISABLE_JIT"] = "1"
    w, h = args.size
    cmd = [sys.executable, "-c", CHILD, str(args.paper_scene), str(w), str(h), str(args.reps), args.config, args.accel]
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--paper-scene", type=int, default=6)
    p.add_argument("--size", type=lambda s: tuple(int(v) for v in s.split("x")), default=(64, 64))
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--config", default="1x1")
    p.add_argument("--accel", choices=("linear", "bvh"), default="bvh")
    args = p.parse_args(argv)

    results = [run_backend(False, args), run_backend(True, args)]
    for r in results:
        print(f"{r['backend']:>6}: median compute {statistics.median(r['compute_ns']) / 1e6:10.2f} ms")
    fast, slow = (statistics.median(r["compute_ns"]) for r in results)
    print(f"speedup {slow / fast:.1f}x; identical output: {results[0]['sha1'] == results[1]['sha1']}")
    return 0 if results[0]["sha1"] == results[1]["sha1"] else 1


if __name__ == "__main__":
    sys.exit(main())
