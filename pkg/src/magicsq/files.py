"""On-disk formats: counts files, experiment configs and analysis reports.

All files are JSON written with sorted keys, two-space indentation and a
trailing newline, so a read/write round trip is byte-identical.

Counts file (``schema_version`` 1)::

    {
      "schema_version": 1,
      "label": "row1",            # row1..row3, col1..col3 or r1c1..r3c3
      "shots": 8192,
      "counts": {"0": 7943, "1": 249},
      "outcome_convention": "...",
      "metadata": {"date": "2019-05-06", "backend": "ibmqx4", "seed": null}
    }

Outcome keys are bitstrings. Bit 0 means +1 and bit 1 means -1; a key with
several bits stands for the product of its bits' values, so third-party
counts with one bit per readout can be used unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .contextuality import AnalysisReport, vector_sets
from .magicsquare import CELL_LABELS, LINE_LABELS
from .qsim import Counts

COUNTS_SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1
OUTCOME_CONVENTION = "bit 0 = +1, bit 1 = -1; multi-bit keys take the product of their bits"


class FormatError(ValueError):
    """A file does not follow its documented schema."""


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc


@dataclass
class CountsFile:
    label: str
    counts: Counts
    metadata: dict = field(default_factory=dict)
    schema_version: int = COUNTS_SCHEMA_VERSION

    def __post_init__(self) -> None:
        if self.label not in LINE_LABELS + CELL_LABELS:
            raise FormatError(
                f"label {self.label!r} is not a line ({', '.join(LINE_LABELS)}) or a cell (r1c1..r3c3)"
            )

    @property
    def is_line(self) -> bool:
        return self.label in LINE_LABELS

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "label": self.label,
            "shots": self.counts.shots,
            "counts": dict(self.counts.counts),
            "outcome_convention": OUTCOME_CONVENTION,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Any) -> CountsFile:
        if not isinstance(data, dict):
            raise FormatError("counts file must be a JSON object")
        version = data.get("schema_version")
        if version != COUNTS_SCHEMA_VERSION:
            raise FormatError(f"unsupported counts schema_version {version!r}")
        for key in ("label", "shots", "counts"):
            if key not in data:
                raise FormatError(f"counts file lacks {key!r}")
        raw = data["counts"]
        if not isinstance(raw, dict) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in raw.values()
        ):
            raise FormatError("'counts' must map bitstrings to integers")
        shots = data["shots"]
        if not isinstance(shots, int) or shots < 1:
            raise FormatError("'shots' must be a positive integer")
        try:
            counts = Counts(raw, shots)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
        metadata = data.get("metadata", {})
        if not isinstance(metadata, dict):
            raise FormatError("'metadata' must be an object")
        return cls(str(data["label"]), counts, metadata, version)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        return path

    @classmethod
    def read(cls, path: str | Path) -> CountsFile:
        return cls.from_dict(_load_json(path))


# -- reports ------------------------------------------------------------------


def _floats(a: np.ndarray) -> list[float]:
    return [float(x) for x in np.asarray(a, dtype=float)]


def report_to_dict(report: AnalysisReport) -> dict:
    """Serialize a report; fields that cannot be a number become ``null``
    with a reason under ``null_reasons``."""
    null_reasons: dict[str, str] = {}
    score: float | None = report.score
    if not math.isfinite(report.score):
        score = None
        null_reasons["score"] = "unbounded: point lies outside the hull but the sigma radius is zero"
    facet = report.facet_vertices()
    realism = vector_sets().realism
    q = np.array(report.max_overlap_vector, dtype=float)
    on_facet = bool(facet) and all(int(realism[i] @ q) == 4 for i in facet)
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "result_vector": _floats(report.result_vector),
        "sigma_vector": _floats(report.sigma_vector),
        "overlaps": _floats(report.overlaps),
        "max_overlap": float(report.max_overlap),
        "max_overlap_index": report.max_overlap_index,
        "max_overlap_vector": list(report.max_overlap_vector),
        "hull_distance": float(report.hull_distance),
        "nearest_point": _floats(report.nearest_point),
        "hull_weights": _floats(report.hull_weights),
        "support_vertices": facet,
        "support_on_max_overlap_facet": on_facet,
        "kkt_residual": float(report.kkt_residual),
        "sigma_radius": float(report.sigma_radius),
        "score": score,
        "score_3sf": None if score is None else report.score_3sf,
        "verdict": report.verdict,
        "metadata": report.metadata,
        "null_reasons": null_reasons,
    }


def report_from_dict(data: Any) -> AnalysisReport:
    if not isinstance(data, dict) or data.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise FormatError("not an analysis report (schema_version 1)")
    try:
        score = data["score"]
        return AnalysisReport(
            result_vector=np.array(data["result_vector"], dtype=float),
            sigma_vector=np.array(data["sigma_vector"], dtype=float),
            overlaps=np.array(data["overlaps"], dtype=float),
            max_overlap=float(data["max_overlap"]),
            max_overlap_index=int(data["max_overlap_index"]),
            hull_distance=float(data["hull_distance"]),
            nearest_point=np.array(data["nearest_point"], dtype=float),
            hull_weights=np.array(data["hull_weights"], dtype=float),
            kkt_residual=float(data["kkt_residual"]),
            sigma_radius=float(data["sigma_radius"]),
            score=math.inf if score is None else float(score),
            violation=data["verdict"] == "violation",
            metadata=dict(data.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed analysis report: {exc}") from exc


def write_report(report: AnalysisReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report_to_dict(report)))
    return path


def read_report(path: str | Path) -> AnalysisReport:
    return report_from_dict(_load_json(path))
