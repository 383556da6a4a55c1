import pytest
from hypothesis import given, settings, strategies as st

from stereotrace.errors import ParseError, ValidationError
from stereotrace.scene import (
    BUILTIN_KINDS,
    PAPER_SCENE_COUNTS,
    Camera,
    Color,
    Material,
    PointLight,
    Scene,
    Vec3,
    builtin_object,
    paper_scene,
)
from stereotrace.scenefile import dump_scene, load_scene, parse_scene, save_scene


def test_minimal_file_gives_empty_scene(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("# nothing here\nbackground 0 0 0\n")
    scene = load_scene(path)
    assert scene.objects == () and scene.lights == ()
    assert tuple(scene.background) == (0.0, 0.0, 0.0)


def test_missing_file():
    with pytest.raises(FileNotFoundError, match="nope.txt"):
        load_scene("nope.txt")


def test_face_index_out_of_range_names_object_and_face():
    text = "object begin tri\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 3\nmaterial 1 1 1 0 0 0 1 0\nobject end\n"
    with pytest.raises(ValidationError) as err:
        parse_scene(text)
    assert "tri" in err.value.entity and "face 0" in err.value.reason


def test_degenerate_face_rejected():
    text = "object begin flat\nv 0 0 0\nv 1 0 0\nv 2 0 0\nf 0 1 2\nmaterial 1 1 1 0 0 0 1 0\nobject end\n"
    with pytest.raises(ValidationError, match="degenerate"):
        parse_scene(text)


@pytest.mark.parametrize("text,line", [
    ("ambient 0.1 0.1\n", 1),
    ("\n\nlight 0 0 0 1 1 x\n", 3),
    ("bogus 1 2 3\n", 1),
    ("object begin a\nv 0 0 0\n", 1),
    ("object begin a\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\nobject end\n", 6),
    ("builtin sphere 0 0 0 1 1 1 1 0 0 0 1 0\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as err:
        parse_scene(text)
    assert err.value.line == line


def test_non_finite_number_is_validation_error():
    with pytest.raises(ValidationError):
        parse_scene("ambient nan 0 0\n")


def test_invalid_camera():
    with pytest.raises(ValidationError):
        parse_scene("camera 0 0 5 0 0 5 0 1 0 40\n")


def test_polygon_is_fanned_from_first_vertex():
    text = ("object begin quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 0 1 2 3\n"
            "material 1 1 1 0 0 0 1 0\nobject end\n")
    (obj,) = parse_scene(text).objects
    assert obj.faces == ((0, 1, 2), (0, 2, 3))


def test_builtin_record_expands():
    scene = parse_scene("builtin dodeca36 1 2 3 2.0 0.5 0.5 0.5 0.1 0.1 0.1 8 0.25\n")
    (obj,) = scene.objects
    assert len(obj.vertices) == 20 and len(obj.faces) == 36
    assert obj.material == Material(Color(0.5, 0.5, 0.5), Color(0.1, 0.1, 0.1), 8.0, 0.25)


def test_camera_and_stereo_records():
    scene = parse_scene("camera 1 2 3 0 0 0 0 1 0 55.5\nstereo 0.1\n")
    assert scene.camera == Camera(Vec3(1, 2, 3), Vec3(0, 0, 0), Vec3(0, 1, 0), 55.5)
    assert scene.eye_separation == 0.1


def test_builtin_cube_round_trip(tmp_path):
    mat = Material(Color(0.9, 0.1, 0.3), Color(0.2, 0.2, 0.2), 12.0, 0.4)
    cube = builtin_object("cube", Vec3(0.3, -1.7, 2.2), 1.3, mat)
    scene = Scene((cube,), (PointLight(Vec3(1, 2, 3), Color(1, 0.5, 0.25)),), Color(0.1, 0.1, 0.1))
    path = tmp_path / "cube.txt"
    save_scene(scene, path)
    assert load_scene(path) == scene


@pytest.mark.parametrize("n", PAPER_SCENE_COUNTS)
def test_paper_scene_round_trip(n):
    scene = paper_scene(n)
    text = dump_scene(scene)
    assert f"# objects={n} triangles={scene.triangle_count}" in text
    assert parse_scene(text) == scene


coords = st.floats(-50, 50, allow_nan=False)
colors = st.builds(Color, *[st.floats(0, 2, allow_nan=False)] * 3)


@settings(max_examples=40, deadline=None)
@given(
    kinds=st.lists(st.sampled_from(BUILTIN_KINDS), min_size=0, max_size=3),
    centers=st.lists(st.tuples(coords, coords, coords), min_size=3, max_size=3),
    scale=st.floats(0.1, 10),
    diffuse=colors,
    shininess=st.floats(1, 200),
    reflectivity=st.floats(0, 1),
    ambient=colors,
    sep=st.floats(0.001, 1.0),
)
def test_round_trip_property(kinds, centers, scale, diffuse, shininess, reflectivity, ambient, sep):
    mat = Material(diffuse, Color(0.3, 0.3, 0.3), shininess, reflectivity)
    objects = tuple(builtin_object(k, Vec3(*c), scale, mat, name=f"o{i}") for i, (k, c) in enumerate(zip(kinds, centers)))
    scene = Scene(objects, (PointLight(Vec3(*centers[0]), diffuse),), ambient, diffuse, eye_separation=sep)
    assert parse_scene(dump_scene(scene)) == scene


def test_decimal_separator_is_always_dot():
    with pytest.raises(ParseError):
        parse_scene("ambient 0,5 0 0\n")
