"""
Tests for report serialization and persistence

Test Coverage:
- Report schema and key order
- Timing-independent digest
- Atomic writes and default file names
- Loading, with malformed files skipped
"""

import json

import pytest

from src import __version__
from src.harness import CheckReport
from src.reporting import ReportWriter, dumps, report_digest, report_to_dict


@pytest.fixture
def sample_report():
    """A two-check suite report with one failing check."""
    good = CheckReport(name="partition", counters={"planes": 73}, timing_ms=12.5)
    bad = CheckReport(name="dual_spread", counters={"lines": 3}, timing_ms=3.25)
    bad.fail({"index": 1, "count": 8})
    return CheckReport(
        name="spread",
        parameters={"q": 2, "p": 2, "e": 1, "modulus": [1, 1, 0], "sextic_modulus": [1, 1], "seed": 4, "samples": 5, "extra": "dropped"},
        checks=[good, bad],
        timing_ms=20.0,
    )


class TestSchema:
    def test_report_to_dict(self, sample_report):
        data = report_to_dict(sample_report)

        assert data["tool_version"] == __version__
        assert data["suite"] == "spread"
        assert data["pass"] is False
        assert "extra" not in data["params"]
        assert data["params"]["seed"] == 4
        assert [c["name"] for c in data["checks"]] == ["dual_spread", "partition"]
        assert data["checks"][0]["witness"] == {"index": 1, "count": 8}

    def test_dumps_sorted_with_newline(self, sample_report):
        text = dumps(report_to_dict(sample_report))
        assert text.endswith("}\n")
        assert list(json.loads(text)) == sorted(json.loads(text))


class TestDigest:
    def test_ignores_timing(self, sample_report):
        before = report_digest(sample_report)
        for check in sample_report.checks:
            check.timing_ms += 100.0
        assert report_digest(sample_report) == before

    def test_sees_counters(self, sample_report):
        before = report_digest(sample_report)
        sample_report.checks[0].counters["planes"] = 72
        assert report_digest(sample_report) != before

    def test_dict_and_report_agree(self, sample_report):
        assert report_digest(report_to_dict(sample_report)) == report_digest(sample_report)


class TestReportWriter:
    def test_write_default_path(self, tmp_path, sample_report):
        writer = ReportWriter(tmp_path / "reports")
        path = writer.write(sample_report)

        assert path.name == "spread-q2-seed4.json"
        assert writer.load(path) == report_to_dict(sample_report)
        assert [p.name for p in path.parent.iterdir()] == ["spread-q2-seed4.json"]

    def test_write_explicit_path(self, tmp_path, sample_report):
        target = tmp_path / "nested" / "out.json"
        assert ReportWriter(tmp_path).write(sample_report, target) == target
        assert target.exists()

    def test_write_failure_is_raised(self, tmp_path, sample_report, mocker):
        mocker.patch("src.reporting.shutil.move", side_effect=OSError("read-only"))
        with pytest.raises(OSError, match="read-only"):
            ReportWriter(tmp_path).write(sample_report)

    def test_load_missing(self, tmp_path):
        assert ReportWriter(tmp_path).load(tmp_path / "absent.json") is None

    def test_load_malformed(self, tmp_path):
        writer = ReportWriter(tmp_path)
        cases = {
            "broken.json": "{not json",
            "list.json": "[1, 2]",
            "partial.json": json.dumps({"suite": "spread"}),
            "badpass.json": json.dumps({"tool_version": "0.1.0", "suite": "s", "params": {}, "checks": [], "pass": "yes"}),
        }
        for name, text in cases.items():
            (tmp_path / name).write_text(text, encoding="utf-8")
            assert writer.load(tmp_path / name) is None, name

    def test_load_all_skips_bad_files(self, tmp_path, sample_report):
        writer = ReportWriter(tmp_path)
        writer.write(sample_report)
        sample_report.name = "cone"
        writer.write(sample_report)
        (tmp_path / "zzz.json").write_text("{", encoding="utf-8")

        reports = writer.load_all()
        assert [r["suite"] for r in reports] == ["cone", "spread"]

    def test_load_all_missing_dir(self, tmp_path):
        assert ReportWriter(tmp_path / "nothing").load_all() == []
