"""Plain-text and CSV report output.

Reports separate a commented header (timestamp, version, invocation: the
parts that legitimately differ between runs) from the body.  The body is a
pure function of the inputs, so two runs of the same experiment produce
byte-identical bodies; determinism tests diff exactly that.
"""

from __future__ import annotations

import csv
import datetime
import time
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["RunReport", "timed_header", "write_text", "write_csv"]


def timed_header(version: str, command: str | None = None, seed: int | None = None) -> tuple[str, ...]:
    """Header lines for a run: each starts with '# ' and may vary per run."""
    lines = [
        f"# generated: {datetime.datetime.now().isoformat(timespec='seconds')}",
        f"# version: {version}",
    ]
    if command:
        lines.append(f"# command: {command}")
    if seed is not None:
        lines.append(f"# seed: {seed}")
    return tuple(lines)


@dataclass
class RunReport:
    """A titled report with a deterministic body and a free-form header."""

    title: str
    body_lines: tuple[str, ...] = ()
    header_lines: tuple[str, ...] = ()
    _started: float = field(default_factory=time.perf_counter, repr=False)

    def add(self, *lines: str) -> None:
        self.body_lines = self.body_lines + tuple(lines)

    def body_text(self) -> str:
        return "\n".join((self.title,) + self.body_lines) + "\n"

    def full_text(self) -> str:
        elapsed = time.perf_counter() - self._started
        header = self.header_lines + (f"# wallclock: {elapsed:.3f}s",)
        return "\n".join(header) + "\n" + self.body_text()


def write_text(path, text: str) -> None:
    Path(path).write_text(text)


def write_csv(path, rows) -> None:
    """Write rows (list of lists of strings) without any volatile fields."""
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)
