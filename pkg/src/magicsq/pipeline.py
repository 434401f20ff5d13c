"""End-to-end simulate -> counts files -> analysis."""

from __future__ import annotations

import datetime as _dt
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .config import ExperimentConfig
from .contextuality import AnalysisReport, analyze_counts, round_sig
from .files import CountsFile
from .magicsquare import (
    CELL_LABELS,
    LINE_LABELS,
    build_line_circuit,
    build_observable_circuit,
    build_ordered_line_circuit,
    parse_cell,
    sequential_line_run,
    single_observable_run,
    with_ancilla,
)
from .qsim import run_shots

ANCILLA_QUBIT = 2


class AnalysisInputError(ValueError):
    """The set of counts files does not cover each line exactly once."""


def _stream_index(label: str) -> int:
    return (LINE_LABELS + CELL_LABELS).index(label)


def _today() -> str:
    return _dt.datetime.now(_dt.timezone.utc).date().isoformat()


def simulate(config: ExperimentConfig, date: str | None = None) -> list[CountsFile]:
    """Run every requested line and observable of ``config``.

    Each label gets its own random stream under the config seed, so
    selecting a subset of lines does not change the counts of the others.
    """
    date = date or _today()
    system = config.state
    base_meta = {
        "date": date,
        "backend": config.backend_label,
        "seed": config.seed,
        "input_state": config.input_state,
        "noise": config.describe_noise(),
        "mode": config.mode,
        "order": list(config.order) if config.order else None,
    }
    out: list[CountsFile] = []
    for line in config.lines:
        stream = (_stream_index(line.label),)
        if config.mode == "ancilla":
            if config.order is None:
                circuit = build_line_circuit(line)
            else:
                circuit = build_ordered_line_circuit(line, config.order)
            counts = run_shots(
                circuit, with_ancilla(system), config.noise, config.shots, config.seed, stream
            )
            meta = dict(base_meta, circuit=circuit.describe())
            out.append(CountsFile(line.label, counts, meta))
        else:
            order = config.order or (1, 2, 3)
            run = sequential_line_run(
                system,
                line,
                order,
                config.shots,
                config.seed,
                readout_flip=config.noise.flip_probability(ANCILLA_QUBIT),
                stream=stream,
            )
            meta = dict(base_meta, order=list(order), gate_noise="not modelled in sequential mode")
            out.append(CountsFile(line.label, run.product, meta))
            for cell, counts in run.as_dict().items():
                if cell != line.label:
                    out.append(CountsFile(cell, counts, dict(meta, context=line.label)))
    for cell in config.observables:
        row, col = parse_cell(cell)
        stream = (_stream_index(cell),)
        if config.mode == "ancilla":
            circuit = build_observable_circuit(row, col)
            counts = run_shots(
                circuit, with_ancilla(system), config.noise, config.shots, config.seed, stream
            )
            meta = dict(base_meta, circuit=circuit.describe())
        else:
            counts = single_observable_run(system, row, col, config.shots, config.seed, stream)
            meta = dict(base_meta, gate_noise="not modelled in sequential mode")
        out.append(CountsFile(cell, counts, meta))
    return out


def file_name(cf: CountsFile) -> str:
    context = cf.metadata.get("context")
    return f"{context}.{cf.label}.json" if context else f"{cf.label}.json"


def write_counts(files: Iterable[CountsFile], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    return [cf.write(out_dir / file_name(cf)) for cf in files]


@dataclass
class LineSet:
    files: list[CountsFile]
    warnings: list[str] = field(default_factory=list)


def order_line_files(files: Sequence[CountsFile]) -> LineSet:
    """Sort counts files into result-vector order, checking coverage."""
    by_label: dict[str, CountsFile] = {}
    for cf in files:
        if not cf.is_line:
            raise AnalysisInputError(f"{cf.label!r} is a single-observable file, not a line")
        if cf.label in by_label:
            raise AnalysisInputError(f"duplicate counts for {cf.label}")
        by_label[cf.label] = cf
    missing = [label for label in LINE_LABELS if label not in by_label]
    if missing:
        raise AnalysisInputError(f"missing counts for {', '.join(missing)}")
    ordered = [by_label[label] for label in LINE_LABELS]
    warnings = []
    shots = {cf.counts.shots for cf in ordered}
    if len(shots) > 1:
        warnings.append(
            "shot counts differ between lines: "
            + ", ".join(f"{cf.label}={cf.counts.shots}" for cf in ordered)
        )
    return LineSet(ordered, warnings)


def analyze_files(files: Sequence[CountsFile]) -> AnalysisReport:
    lines = order_line_files(files)
    meta = {
        "labels": list(LINE_LABELS),
        "counts": {
            cf.label: list(cf.counts.plus_minus()) for cf in lines.files
        },
        "sources": [cf.metadata for cf in lines.files],
        "warnings": lines.warnings,
    }
    return analyze_counts([cf.counts for cf in lines.files], meta)


def summary_text(report: AnalysisReport) -> str:
    """Human-readable summary: per-line table plus the headline numbers."""
    counts = report.metadata.get("counts", {})
    rows = ["Line    |    +1 |    -1 |   Mean | Std dev (x1e-3)", "-" * 50]
    names = ["Row 1", "Row 2", "Row 3", "Col 1", "Col 2", "Col 3"]
    for name, label, mean, sigma in zip(
        names, LINE_LABELS, report.result_vector, report.sigma_vector
    ):
        plus, minus = counts.get(label, ("-", "-"))
        rows.append(f"{name:<7} | {plus!s:>5} | {minus!s:>5} | {mean:6.3f} | {sigma * 1e3:.3g}")
    q = ",".join(f"{c:+d}" for c in report.max_overlap_vector)
    score = "unbounded" if report.score == float("inf") else f"{round_sig(report.score, 3):g}"
    rows += [
        "",
        f"max overlap v.q      : {report.max_overlap:.4f}  (q = ({q}), realism bound 4)",
        f"hull distance        : {report.hull_distance:.4f}",
        f"sigma-sphere radius  : {report.sigma_radius:.4f}",
        f"violation score      : {score} standard deviations",
        f"verdict              : {report.verdict}",
    ]
    for w in report.metadata.get("warnings", []):
        rows.append(f"warning: {w}")
    return "\n".join(rows) + "\n"


def series_rows(report: AnalysisReport) -> list[list]:
    """Per-line numeric series for external plotting."""
    header = ["line", "mean", "sigma", "nearest_point", "quantum_prediction"]
    body = [
        [label, float(m), float(s), float(p), int(q)]
        for label, m, s, p, q in zip(
            LINE_LABELS,
            report.result_vector,
            report.sigma_vector,
            report.nearest_point,
            report.max_overlap_vector,
        )
    ]
    return [header, *body]


__all__ = [
    "AnalysisInputError",
    "analyze_files",
    "order_line_files",
    "series_rows",
    "simulate",
    "summary_text",
    "write_counts",
]
