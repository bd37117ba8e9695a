"""Run reports: a JSON-serializable record of one command invocation.

Reports embed the inputs, mesh/tolerance settings, and the library
version alongside every verdict so a certificate can be audited later
without rerunning anything.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from . import __version__
from .errors import InputError


@dataclass(frozen=True)
class RunReport:
    """Outcome of one command: parameter echo, verdict summaries, named
    witness values, and wall-clock timing."""

    command: str
    inputs: dict
    verdicts: list
    witness_values: dict
    timing_ms: float
    version: str = field(default=__version__)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> RunReport:
        try:
            return cls(
                command=doc["command"],
                inputs=doc["inputs"],
                verdicts=doc["verdicts"],
                witness_values=doc["witness_values"],
                timing_ms=doc["timing_ms"],
                version=doc["version"],
                details=doc.get("details", {}),
            )
        except KeyError as exc:
            raise InputError(f"report is missing required field {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def write_csv(path, header, rows) -> None:
    """Write rows to ``path`` (or a file-like object) with a header line.

    Booleans are lowered to true/false so the files parse the same way
    everywhere; everything else is written via str().
    """
    import csv

    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        return v

    own = not hasattr(path, "write")
    fh = open(path, "w", newline="") if own else path
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    finally:
        if own:
            fh.close()
