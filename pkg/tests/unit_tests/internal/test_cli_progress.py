"""Tests for asuman_sim._cli_progress helpers."""

import io

from asuman_sim._cli_progress import PHASE_DONE, PHASE_SIMULATING, PhaseSpinner, fmt_duration


class TestFmtDuration:
    def test_seconds_only(self):
        assert fmt_duration(12.3) == "12.3s"

    def test_minutes(self):
        assert fmt_duration(125.0) == "2m 5s"


class TestPhaseSpinner:
    def test_disabled_spinner_writes_nothing(self):
        stream = io.StringIO()
        spinner = PhaseSpinner(stream=stream, enabled=False)
        spinner.phase(PHASE_SIMULATING)
        spinner.stop()
        spinner.finish("3 replications")
        assert stream.getvalue() == ""

    def test_non_tty_stream_disables_by_default(self):
        assert PhaseSpinner(stream=io.StringIO()).enabled is False

    def test_enabled_spinner_reports_done(self):
        stream = io.StringIO()
        spinner = PhaseSpinner(stream=stream, enabled=True)
        spinner.phase(PHASE_SIMULATING)
        spinner.finish("2 sweep points over n")
        out = stream.getvalue()
        assert f"{PHASE_SIMULATING}... {PHASE_DONE}" in out
        assert "2 sweep points over n" in out
