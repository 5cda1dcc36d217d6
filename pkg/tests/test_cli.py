"""Command-line entry point and its exit codes."""

import json

import pytest

from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import EXIT_CHECK_FAILED, EXIT_CONFIGURATION, EXIT_OK
from hankel_gm.harness.reporting import load_report
from hankel_gm.main import build_parser, main


def _stdout_document(capsys):
    return json.loads(capsys.readouterr().out)


def _stderr_document(capsys):
    return json.loads(capsys.readouterr().err)


@pytest.mark.unit
class TestParser:
    def test_kind_is_required_for_check(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["check"])

    def test_numbers_accept_inf(self):
        args = build_parser().parse_args(["norm", "--q", "inf"])
        assert args.q == float("inf")

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["plot"])

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            build_parser().parse_args(["--version"])
        assert info.value.code == 0
        assert capsys.readouterr().out.strip() == f"{settings.app_name} {settings.app_version}"


@pytest.mark.unit
class TestCommands:
    def test_norm_of_indicator(self, capsys):
        assert main(["norm", "--fn", "indicator:b=1.0", "--p", "2", "--q", "2"]) == EXIT_OK
        document = _stdout_document(capsys)
        assert document["weighted_lebesgue"] == pytest.approx(1.0, rel=1e-9)
        assert document["lorentz"] == pytest.approx(1.0, rel=1e-9)

    def test_norm_with_cross_check(self, capsys):
        argv = ["norm", "--fn", "indicator:b=1.0", "--p", "2", "--q", "1", "--cross-check"]
        assert main(argv) == EXIT_OK
        assert _stdout_document(capsys)["lorentz"] == pytest.approx(2.0, rel=1e-9)

    def test_gm_certify(self, capsys):
        assert main(["gm-certify", "--fn", "power-truncated:a=0.5,b=1.0", "--lam", "4"]) == EXIT_OK
        document = _stdout_document(capsys)
        assert document["nu"] == 2
        assert document["C"] >= document["sup_ratio"]

    def test_growing_exponential_fails_certification(self, capsys):
        assert main(["gm-certify", "--fn", "exponential:rate=1.0"]) == EXIT_CHECK_FAILED
        assert _stderr_document(capsys)["error"] == "NOT_GENERAL_MONOTONE"

    def test_invalid_alpha(self, capsys):
        assert main(["norm", "--fn", "indicator:b=1.0", "--alpha", "-1"]) == EXIT_CONFIGURATION
        assert _stderr_document(capsys)["error"] == "CONFIGURATION_ERROR"

    def test_unknown_function_kind(self, capsys):
        assert main(["norm", "--fn", "no-such-kind:a=1"]) == EXIT_CONFIGURATION
        document = _stderr_document(capsys)
        assert document["error"] == "DOMAIN_ERROR"
        assert set(document) == {"error", "message", "code", "details", "timestamp"}

    def test_missing_experiment_file(self, tmp_path):
        assert main(["equiv", "--config", str(tmp_path / "none.env")]) == EXIT_CONFIGURATION

    def test_transform_table(self, tmp_path):
        out = tmp_path / "transform.csv"
        assert main(["transform", "--fn", "indicator:b=1.0", "--alpha", "0.5", "--out", str(out)]) == EXIT_OK
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "y,re,im,err_est"
        assert len(lines) > 2

    def test_booton_check_passes(self, capsys):
        assert main(["check", "--kind", "booton", "--fn", "indicator:b=1.0"]) == EXIT_OK
        assert _stdout_document(capsys)["passed"]

    def test_check_outside_exponent_range(self):
        assert main(["check", "--kind", "pitt", "--fn", "indicator:b=1.0", "--p", "0.4"]) == EXIT_CONFIGURATION

    def test_hardy_check_output_file(self, tmp_path):
        out = tmp_path / "hardy.json"
        assert main(["check", "--kind", "hardy", "--fn", "indicator:b=1.0", "--sigma", "1", "--out", str(out)]) == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["check"] == "hardy"
        assert document["flag"] == "inconclusive"


@pytest.mark.slow
class TestEquivCommand:
    def test_experiment_file(self, tmp_path):
        report_path = tmp_path / "report.json"
        experiment = tmp_path / "experiment.env"
        experiment.write_text(
            "CORPUS=power-exponential:a=0.25,rate=1.0;indicator:b=1.0\n"
            "ALPHA=0.5\n"
            "SPACES=2:2\n"
            "DILATIONS=1,2\n"
            "WINDOW=-8:8:8\n"
            "Y_WINDOW=-6:8:4\n"
            f"OUTPUT={report_path}\n"
            "FORMAT=json\n"
            "DILATION_RTOL=1e-2\n",
            encoding="utf-8",
        )
        assert main(["equiv", "--config", str(experiment)]) == EXIT_OK
        report = load_report(report_path)
        # two configured members plus the sign-changing fallback
        assert len(report.rows) == 3 * 2
        assert report.alpha == 0.5
