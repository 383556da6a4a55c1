import csv
import io

import pytest

from conftest import DATA
from stereotrace.bench import (
    CSV_HEADER, BenchPlan, BenchRecord, linear_fit, read_records, run_bench, summarize,
)
from stereotrace.parallel import NetworkConfig
from stereotrace.stereo import StageTimings

CONFIGS = [NetworkConfig(1, 1), NetworkConfig(2, 1), NetworkConfig(4, 1)]


def test_header_matches_checked_in_schema():
    assert CSV_HEADER == (DATA / "bench_schema.csv").read_text(encoding="utf-8").strip()


@pytest.mark.slow
def test_row_count_law(tmp_path):
    plan = BenchPlan(scenes=[1, 2, 3, 5, 6], resolutions=[(128, 128)], configs=CONFIGS, repetitions=3)
    assert plan.cell_count() == 45
    records, failures = run_bench(plan, tmp_path / "b.csv")
    assert not failures and len(records) == 45
    lines = (tmp_path / "b.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 46
    rows = read_records(tmp_path / "b.csv")
    assert [(r.triangles, r.objects) for r in rows] == [(r.triangles, r.objects) for r in records]
    pairs = sorted({(r.triangles, r.objects) for r in rows})
    assert [p[0] for p in pairs] == [12, 24, 44, 100, 136]
    assert [p[1] for p in pairs] == sorted(p[1] for p in pairs)
    for r in rows:
        assert r.timings.total > 0 and r.isect_tests > 0
        assert r.timings.stage_sum() <= r.timings.total


def test_rows_stream_to_file_object():
    buf = io.StringIO()
    plan = BenchPlan(scenes=[1], resolutions=[(8, 8)], configs=[NetworkConfig(2, 1)], repetitions=2,
                     accel_modes=["linear", "bvh"])
    records, _ = run_bench(plan, buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(rows) == 4 == len(records)
    assert [r["accel"] for r in rows] == ["linear", "linear", "bvh", "bvh"]
    assert rows[0]["blocks"] == "2" and rows[0]["width"] == "8"


def test_failed_cell_is_recorded_and_skipped(tmp_path):
    plan = BenchPlan(scenes=[1], resolutions=[(8, 8)], configs=[NetworkConfig()], repetitions=1,
                     accel_modes=["bvh", "octree"])
    records, failures = run_bench(plan, tmp_path / "b.csv")
    assert len(records) == 1 and len(failures) == 1 and failures[0][4] == "octree"


def test_plan_validation():
    with pytest.raises(ValueError):
        BenchPlan(repetitions=0)
    with pytest.raises(ValueError):
        BenchPlan(scenes=[])


def fake(scene_id, tris, b, compute):
    t = StageTimings(prepare=10, transfer_in=10, compute_left=compute, compute_right=compute, transfer_out=10,
                     postprocess=5, encode=5, total=2 * compute + 40)
    return BenchRecord(scene_id, 1, tris, 64, 64, b, 1, "bvh", 0, t, 1)


def test_summary_mentions_reference_and_speedup():
    records = [fake("paper1", 12, 1, 1000), fake("paper1", 12, 2, 500), fake("paper2", 24, 1, 2000),
               fake("paper2", 24, 2, 1000)]
    text = summarize(records)
    assert "2.5x" in text and "60%" in text
    assert "speedup vs 1x1 2.00x" in text
    assert "complexity sweep 64x64 1x1 bvh" in text and "R^2 1.000" in text


def test_linear_fit():
    slope, intercept, r2 = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
    assert slope == pytest.approx(2) and intercept == pytest.approx(1) and r2 == pytest.approx(1)
    assert linear_fit([1, 1], [2, 4])[0] == 0.0
