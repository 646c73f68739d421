"""Tests for the verification report and its check groups."""

import math

import pytest
from pydantic import ValidationError

from geospin.api.schemas import VerificationReport
from geospin.core.errors import ConvergenceError
from geospin.verification import GROUPS, ReportBuilder, run_verify, summarize, verification_zoo


class TestReportBuilder:
    """Tests for ReportBuilder."""

    def test_pass_and_fail(self):
        report = ReportBuilder(seed=0, groups=["expr"])
        report.add("ok", "expr", "m", 1e-9, 1e-12)
        report.add("bad", "expr", "m", 1e-9, 1e-3)
        built = report.build()
        assert [c.passed for c in built.checks] == [True, False]
        assert not built.passed
        assert summarize(built.checks) == "1/2 checks passed"

    def test_nonfinite_observation_fails(self):
        report = ReportBuilder(seed=0, groups=["expr"])
        report.add("nan", "expr", "m", 1.0, math.nan)
        check = report.build().checks[0]
        assert not check.passed
        assert check.observed == 1e308

    def test_guarded_records_geometry_errors(self):
        report = ReportBuilder(seed=0, groups=["spectrum"])

        def boom():
            raise ConvergenceError(90, 3)

        report.guarded("qr", "spectrum", "m", 1e-9, boom)
        check = report.build().checks[0]
        assert not check.passed
        assert "did not converge" in check.detail

    def test_overall_must_match_checks(self):
        with pytest.raises(ValidationError):
            VerificationReport(seed=0, groups=[], checks=[], passed=False)


class TestRunVerify:
    """Tests for run_verify."""

    def test_zoo_labels_are_unique(self):
        labels = [label for label, _ in verification_zoo()]
        assert len(labels) == len(set(labels)) == 8

    def test_unknown_group(self):
        with pytest.raises(ValueError):
            run_verify(0, ["astrology"])

    def test_groups_keep_fixed_order(self):
        report = run_verify(1, ["spectrum", "expr"])
        assert report.groups == ["expr", "spectrum"]

    @pytest.mark.parametrize("group", ["expr", "manifold", "connection", "geospin", "spectrum", "curvature"])
    def test_group_passes(self, group):
        report = run_verify(42, [group])
        assert report.checks
        assert report.passed, [c for c in report.checks if not c.passed]

    def test_filtering_does_not_shift_draws(self):
        """A group's observations do not depend on which other groups run."""
        alone = run_verify(7, ["geospin"]).checks
        together = [c for c in run_verify(7, ["expr", "geospin"]).checks if c.group == "geospin"]
        assert [c.observed for c in alone] == [c.observed for c in together]

    def test_all_groups_known(self):
        assert set(GROUPS) == {
            "expr", "manifold", "connection", "geospin", "geodesic", "logdet",
            "spectrum", "curvature", "corollary", "mode", "rk4",
        }
