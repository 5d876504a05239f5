"""
TTY progress display for long-running sweeps and validation.

The spinner writes to stderr only, so command output on stdout stays clean
for piping.
"""

from __future__ import annotations

import sys
import threading
import time
from typing import Optional, TextIO

PHASE_SIMULATING = "SIMULATING"
PHASE_FITTING = "FITTING"
PHASE_CHECKING = "CHECKING"
PHASE_DONE = "DONE"

_SPINNER_CHARS = "⠋⠙⠹⠸⠼⠴⠦⠧⠇⠏"


def fmt_duration(secs: float) -> str:
    if secs < 60:
        return f"{secs:.1f}s"
    m, s = divmod(secs, 60)
    return f"{int(m)}m {s:.0f}s"


class PhaseSpinner:
    """Thread-safe spinner that shows the current phase and its elapsed time."""

    def __init__(self, stream: Optional[TextIO] = None, enabled: Optional[bool] = None) -> None:
        self._stream = stream or sys.stderr
        self.enabled = self._stream.isatty() if enabled is None else enabled
        self._label = ""
        self._phase_start = 0.0
        self._run_start = time.monotonic()
        self._stop_event = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def _spin(self) -> None:
        i = 0
        while not self._stop_event.is_set():
            elapsed = fmt_duration(time.monotonic() - self._phase_start)
            char = _SPINNER_CHARS[i % len(_SPINNER_CHARS)]
            self._stream.write(f"\r  {self._label}... {char} {elapsed}")
            self._stream.flush()
            i += 1
            self._stop_event.wait(0.1)

    def phase(self, label: str) -> None:
        """Close the current phase (if any) and start ``label``."""
        if not self.enabled:
            return
        now = time.monotonic()
        if self._label:
            self.stop()
            self._stream.write(f"\r  {self._label}... {PHASE_DONE} ({fmt_duration(now - self._phase_start)})\n")
            self._stream.flush()
        self._label = label
        self._phase_start = now
        self._stop_event.clear()
        self._thread = threading.Thread(target=self._spin, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop_event.set()
        if self._thread is not None:
            self._thread.join()
            self._thread = None

    def finish(self, message: str) -> None:
        """Print the final DONE line for the last phase and a summary."""
        if not self.enabled:
            return
        self.stop()
        now = time.monotonic()
        if self._label:
            self._stream.write(f"\r  {self._label}... {PHASE_DONE} ({fmt_duration(now - self._phase_start)})\n")
            self._label = ""
        self._stream.write(f"  {PHASE_DONE}: {message} ({fmt_duration(now - self._run_start)})\n")
        self._stream.flush()
