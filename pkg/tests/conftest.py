import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stereotrace import warmup  # noqa: E402
from stereotrace.accel import build_bvh, build_linear  # noqa: E402
from stereotrace.scene import PAPER_SCENE_COUNTS, paper_scene  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session", autouse=True)
def compiled():
    warmup.ensure_compiled()


@pytest.fixture(scope="session")
def scenes():
    return {n: paper_scene(n) for n in PAPER_SCENE_COUNTS}


@pytest.fixture(scope="session")
def accels(scenes):
    return {n: (build_linear(s), build_bvh(s)) for n, s in scenes.items()}


def random_rays(rng, count, spread=8.0, target=5.0):
    """Origins in a cube of half-size ``spread`` aimed at points in a cube of half-size ``target``."""
    origins = rng.uniform(-spread, spread, size=(count, 3))
    targets = rng.uniform(-target, target, size=(count, 3))
    dirs = targets - origins
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return origins, dirs


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
