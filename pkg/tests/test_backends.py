import os
import subprocess
import sys

import pytest

from stereotrace._jit import BACKEND


def run_cli(tmp_path, name, disable_jit, *args):
    env = dict(os.environ)
    env.pop("STEREOTRACE_DISABLE_JIT", None)
    if disable_jit:
        env["STEREOTRACE_DISABLE_JIT"] = "1"
    out = tmp_path / name
    proc = subprocess.run([sys.executable, "-m", "stereotrace", *args, "-o", str(out)], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out.read_bytes()


@pytest.mark.skipif(BACKEND != "numba", reason="numba backend unavailable")
@pytest.mark.parametrize("args", [
    ("render", "--paper-scene", "5", "--size", "16x12"),
    ("render", "--paper-scene", "6", "--size", "12x12", "--accel", "linear", "--config", "2x2"),
    ("stereo", "--paper-scene", "3", "--size", "12x8", "--mode", "anaglyph"),
])
def test_python_fallback_matches_numba(tmp_path, args):
    assert run_cli(tmp_path, "py.ppm", True, *args) == run_cli(tmp_path, "nb.ppm", False, *args)


def test_backend_flag_reported():
    env = dict(os.environ, STEREOTRACE_DISABLE_JIT="1")
    proc = subprocess.run([sys.executable, "-m", "stereotrace", "--version"], env=env, capture_output=True, text=True)
    assert "python kernels" in proc.stdout
