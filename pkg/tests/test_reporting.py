"""Report persistence in CSV and JSON."""

import json
import math

import pytest

from hankel_gm.core.exceptions import ReportIOError
from hankel_gm.harness.reporting import CSV_COLUMNS, emit_report, load_report
from hankel_gm.schemas import RatioReport, RatioRow, SkippedFunction


@pytest.fixture
def report() -> RatioReport:
    return RatioReport(
        alpha=0.5,
        rows=[
            RatioRow(fn="indicator:b=1.0", p=2.0, q=2.0, c=0.5, ratio_lebesgue=1.0000000000123,
                     ratio_lorentz=0.9999999999871, err_budget=3.5e-11),
            RatioRow(fn="indicator:b=1.0", p=0.8, q=math.inf, c=1.0, ratio_lebesgue=0.731, flag="lorentz-n/a"),
            RatioRow(fn="dyadic-sign-power:a=0.6,b=4.0", p=2.0, q=2.0, c=1.0,
                     ratio_lebesgue=math.inf, ratio_lorentz=math.inf, flag="both-infinite"),
        ],
        skipped=[SkippedFunction(fn="exponential:rate=1.0", reason="not-general-monotone", details={"sup_ratio": 40.5})],
        metadata={"corpus": ["indicator:b=1.0"], "dilations": [0.5, 1.0], "seed": 0},
    )


@pytest.mark.unit
class TestEmit:
    @pytest.mark.parametrize("fmt,name", [("csv", "report.csv"), ("json", "report.json")])
    def test_round_trip(self, tmp_path, report, fmt, name):
        target = emit_report(report, tmp_path / "out" / name, fmt)
        assert load_report(target) == report

    def test_csv_layout(self, tmp_path, report):
        target = emit_report(report, tmp_path / "report.csv")
        lines = target.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1].startswith("indicator:b=1.0,2.0,2.0,0.5,1.0000000000123,")
        assert lines[2].split(",")[5] == ""
        assert target.with_suffix(".meta.json").is_file()

    def test_json_keys_are_sorted(self, tmp_path, report):
        target = emit_report(report, tmp_path / "report.json", "JSON")
        document = json.loads(target.read_text(encoding="utf-8"))
        assert list(document) == sorted(document)
        assert document["schema_version"] == "1.0"

    def test_unknown_format(self, tmp_path, report):
        with pytest.raises(ReportIOError):
            emit_report(report, tmp_path / "report.xml", "xml")


@pytest.mark.unit
class TestLoad:
    def test_other_schema_version(self, tmp_path, report):
        target = emit_report(report.model_copy(update={"schema_version": "2.0"}), tmp_path / "report.json", "json")
        with pytest.raises(ReportIOError) as info:
            load_report(target)
        assert "schema version" in info.value.message

    @pytest.mark.parametrize("name", ["missing.csv", "missing.json"])
    def test_missing_file(self, tmp_path, name):
        with pytest.raises(ReportIOError) as info:
            load_report(tmp_path / name)
        assert info.value.details["path"] == str(tmp_path / name)

    def test_bad_header(self, tmp_path, report):
        target = emit_report(report, tmp_path / "report.csv")
        lines = target.read_text(encoding="utf-8").splitlines()
        lines[0] = lines[0].replace("ratio_lorentz", "lorentz")
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(ReportIOError):
            load_report(target)

    def test_document_missing_rows(self, tmp_path):
        target = tmp_path / "report.json"
        target.write_text(json.dumps({"schema_version": "1.0", "alpha": 0.5}), encoding="utf-8")
        with pytest.raises(ReportIOError):
            load_report(target)
