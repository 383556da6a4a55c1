import math

import numpy as np
import pytest

from stereotrace.errors import DimensionMismatch, ZeroTotal
from stereotrace.image import Image, encode_ppm
from stereotrace.parallel import NetworkConfig, render_parallel
from stereotrace.rays import TraceSettings
from stereotrace.scene import Camera, Vec3
from stereotrace.stereo import (
    RenderJob, StageTimings, StereoRig, compose, compose_anaglyph, compose_sbs, derive_eyes,
    render_stereo, run_pipeline, stage_fractions,
)


def rand_image(rng, w, h):
    return Image(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


def test_axis_aligned_eyes():
    rig = StereoRig(Camera(Vec3(0, 0, 10), Vec3(0, 0, 0), Vec3(0, 1, 0)), 0.06)
    left, right = derive_eyes(rig)
    assert left.position.x == pytest.approx(-0.03, abs=1e-15)
    assert right.position.x == pytest.approx(0.03, abs=1e-15)
    assert left.position.y == right.position.y == 0 and left.position.z == right.position.z == 10
    assert (left.look_at - left.position) == (right.look_at - right.position)


def test_eyes_on_random_rigs():
    rng = np.random.default_rng(5)
    for _ in range(100):
        pos = Vec3(*rng.uniform(-10, 10, 3))
        target = Vec3(*rng.uniform(-10, 10, 3))
        if (target - pos).norm() < 1.0:
            continue
        up = Vec3(*rng.normal(size=3))
        if (target - pos).normalized().cross(up.normalized()).norm() < 0.1:
            continue
        sep = float(rng.uniform(0.001, 0.9))
        left, right = derive_eyes(StereoRig(Camera(pos, target, up), sep))
        mid = (left.position + right.position) * 0.5
        assert (mid - pos).norm() < 1e-12
        assert abs((right.position - left.position).norm() - sep) < 1e-12


def test_rig_rejects_bad_separation():
    cam = Camera(Vec3(0, 0, 1), Vec3(0, 0, 0))
    for sep in (0.0, -0.1, 1.0, 5.0):
        with pytest.raises(ValueError):
            StereoRig(cam, sep)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 6])
def test_channel_independence(scenes, accels, n):
    scene = scenes[n]
    rig = StereoRig(scene.camera, 0.5)
    left, right, _ = render_stereo(scene, rig, accels[n][1], TraceSettings(), 48, 48, NetworkConfig(2, 1))
    cam_l, cam_r = derive_eyes(rig)
    alone_l, _ = render_parallel(scene, cam_l, accels[n][1], TraceSettings(), 48, 48, NetworkConfig())
    alone_r, _ = render_parallel(scene, cam_r, accels[n][1], TraceSettings(), 48, 48, NetworkConfig())
    assert left == alone_l and right == alone_r


def test_channel_parallel_flag_does_not_change_output(scenes, accels):
    scene = scenes[5]
    rig = StereoRig(scene.camera, 0.3)
    on = render_stereo(scene, rig, accels[5][1], TraceSettings(), 40, 32, NetworkConfig(2, 2), True)
    off = render_stereo(scene, rig, accels[5][1], TraceSettings(), 40, 32, NetworkConfig(2, 2), False)
    assert on[0] == off[0] and on[1] == off[1]


def test_tiny_separation_gives_equal_eyes(scenes, accels):
    scene = scenes[3]
    left, right, _ = render_stereo(scene, StereoRig(scene.camera, 1e-9), accels[3][1], TraceSettings(), 64, 64)
    assert left == right


def test_anaglyph_example():
    left = Image.filled(2, 2, (200, 10, 20))
    right = Image.filled(2, 2, (30, 40, 50))
    (out,) = compose("anaglyph", left, right)
    assert (out.pixels == np.array([200, 40, 50], dtype=np.uint8)).all()


def test_sbs_example():
    left = Image(np.array([[[0, 0, 0], [255, 255, 255], [10, 20, 30], [11, 21, 31]]], dtype=np.uint8))
    right = Image(np.array([[[1, 2, 3], [2, 3, 4], [100, 100, 100], [101, 101, 101]]], dtype=np.uint8))
    out = compose_sbs(left, right)
    assert out.width == 4 and out.height == 1
    assert out.pixels[0].tolist() == [[128, 128, 128], [11, 21, 31], [2, 3, 4], [101, 101, 101]]


def naive_sbs(left, right):
    h, w = left.height, left.width
    half = w // 2
    out = np.zeros((h, 2 * half, 3), dtype=np.uint8)
    for y in range(h):
        for x in range(half):
            for c in range(3):
                a, b = int(left.pixels[y, 2 * x, c]), int(left.pixels[y, 2 * x + 1, c])
                out[y, x, c] = (a + b + 1) // 2
                a, b = int(right.pixels[y, 2 * x, c]), int(right.pixels[y, 2 * x + 1, c])
                out[y, half + x, c] = (a + b + 1) // 2
    return out


def test_sbs_matches_naive_loop():
    rng = np.random.default_rng(11)
    for w, h in [(4, 2), (5, 3), (16, 9), (2, 1), (33, 7)]:
        left, right = rand_image(rng, w, h), rand_image(rng, w, h)
        assert (compose_sbs(left, right).pixels == naive_sbs(left, right)).all()


def test_anaglyph_matches_per_pixel_rule():
    rng = np.random.default_rng(12)
    left, right = rand_image(rng, 40, 25), rand_image(rng, 40, 25)
    out = compose_anaglyph(left, right).pixels
    for y, x in rng.integers(0, [25, 40], size=(1000, 2)):
        assert tuple(out[y, x]) == (left.pixels[y, x, 0], right.pixels[y, x, 1], right.pixels[y, x, 2])


def test_composition_is_local():
    rng = np.random.default_rng(13)
    left, right = rand_image(rng, 10, 6), rand_image(rng, 10, 6)
    changed = left.pixels.copy()
    changed[3, 4] = 255 - changed[3, 4]
    before = compose_anaglyph(left, right).pixels
    after = compose_anaglyph(Image(changed), right).pixels
    diff = np.argwhere((before != after).any(axis=2))
    assert diff.tolist() == [[3, 4]]
    before = compose_sbs(left, right).pixels
    after = compose_sbs(Image(changed), right).pixels
    diff = np.argwhere((before != after).any(axis=2))
    assert diff.tolist() == [[3, 2]]


def test_mode_output_shapes():
    rng = np.random.default_rng(14)
    for _ in range(5):
        w, h = (int(v) for v in rng.integers(2, 50, 2))
        left, right = rand_image(rng, w, h), rand_image(rng, w, h)
        assert [i.pixels.shape for i in compose("separate", left, right)] == [(h, w, 3)] * 2
        assert [i.pixels.shape for i in compose("anaglyph", left, right)] == [(h, w, 3)]
        assert [i.pixels.shape for i in compose("sbs", left, right)] == [(h, 2 * (w // 2), 3)]


def test_dimension_mismatch():
    a, b = Image.filled(4, 4, (0, 0, 0)), Image.filled(4, 5, (0, 0, 0))
    for mode in ("separate", "anaglyph", "sbs"):
        with pytest.raises(DimensionMismatch):
            compose(mode, a, b)
    with pytest.raises(ValueError):
        compose("wiggle", a, a)


def test_pipeline_separate_timings_and_determinism(scenes):
    job = RenderJob(scenes[5], 64, 64, NetworkConfig(2, 1), mode="separate")
    first, second = run_pipeline(job), run_pipeline(job)
    assert first.encoded == second.encoded and len(first.encoded) == 2
    t = first.timings
    for name in t.STAGES + ("total",):
        assert getattr(t, name) > 0, name
    assert 0.9 * t.total <= t.stage_sum() <= t.total


def test_pipeline_writes_left_and_right(tmp_path, scenes):
    job = RenderJob(scenes[1], 16, 12, mode="separate", output=tmp_path / "pair.ppm")
    out = run_pipeline(job)
    for path, data in zip([tmp_path / "pair_left.ppm", tmp_path / "pair_right.ppm"], out.encoded):
        assert path.read_bytes() == data
        assert data.startswith(b"P6\n16 12\n255\n")


def test_pipeline_modes_and_size(scenes):
    for mode, count, width in [("anaglyph", 1, 30), ("sbs", 1, 30), ("mono", 1, 30)]:
        out = run_pipeline(RenderJob(scenes[2], 30, 20, mode=mode))
        assert len(out.images) == count and out.images[0].width == width and out.images[0].height == 20
    with pytest.raises(ValueError):
        run_pipeline(RenderJob(scenes[2], 8, 8, mode="wiggle"))


def test_stage_fractions_examples():
    t = StageTimings(prepare=10, transfer_in=5, compute_left=30, compute_right=30, transfer_out=5,
                     postprocess=10, encode=10, total=100)
    fr = stage_fractions(t)
    assert fr == pytest.approx({"compute": 0.6, "transfer": 0.1, "other": 0.3})
    assert math.isclose(sum(fr.values()), 1.0)
    with pytest.raises(ZeroTotal):
        stage_fractions(StageTimings())


def test_encoded_bytes_match_images(scenes):
    out = run_pipeline(RenderJob(scenes[1], 12, 8, mode="anaglyph"))
    assert out.encoded == [encode_ppm(out.images[0])]
