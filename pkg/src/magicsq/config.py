"""Experiment configuration and input-state specifiers.

A config is a JSON object::

    {
      "schema_version": 1,
      "lines": "all",                      # or ["row1", "col3", ...]
      "observables": ["r1c1"],             # optional single-cell runs
      "mode": "ancilla",                   # or "sequential"
      "input_state": ["+1_z", "+1_z"],
      "shots": 8192,
      "seed": 2019,
      "noise": "ibmqx4-like",              # preset name or parameter object
      "order": [3, 1, 2],                  # optional measurement order
      "backend_label": "magicsq-statevector"
    }

Input states may be a pair of single-qubit eigenstate labels (``+1_z``,
``-1_x``, ``+1_y``, ...), a basis bitstring such as ``"01"``, a named
two-qubit state (``singlet``, ``bell``), a comma-separated label pair
(``"+1_x,-1_y"``), or ``{"amplitudes": [...]}`` with four entries given as
numbers or ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .magicsquare import CELL_LABELS, LINES, LineId, parse_cell
from .qsim import NOISELESS, NoiseModel, QuantumState, preset

CONFIG_SCHEMA_VERSION = 1
MODES = ("ancilla", "sequential")

_S = 1 / np.sqrt(2)
SINGLE_QUBIT_STATES = {
    "+1_z": np.array([1, 0], dtype=complex),
    "-1_z": np.array([0, 1], dtype=complex),
    "+1_x": np.array([_S, _S], dtype=complex),
    "-1_x": np.array([_S, -_S], dtype=complex),
    "+1_y": np.array([_S, 1j * _S], dtype=complex),
    "-1_y": np.array([_S, -1j * _S], dtype=complex),
}
NAMED_STATES = {
    "singlet": np.array([0, 1, -1, 0], dtype=complex) * _S,
    "bell": np.array([1, 0, 0, 1], dtype=complex) * _S,
}


class ConfigError(ValueError):
    """Malformed config or unresolvable state specifier."""


def _single(label: str) -> np.ndarray:
    key = label.strip().lower().replace("|", "").replace(">", "").replace("⟩", "")
    if key in ("0", "1"):
        key = "+1_z" if key == "0" else "-1_z"
    if not key.startswith(("+", "-")):
        key = "+" + key
    try:
        return SINGLE_QUBIT_STATES[key]
    except KeyError:
        raise ConfigError(f"unknown single-qubit state {label!r}") from None


def _complex(entry: Any) -> complex:
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(entry)
    if isinstance(entry, str):
        return complex(entry.replace(" ", "").replace("i", "j"))
    raise ConfigError(f"cannot read amplitude {entry!r}")


def resolve_state(spec: Any) -> QuantumState:
    """Turn an input-state specifier into a normalized two-qubit state."""
    try:
        if isinstance(spec, dict):
            amps = spec.get("amplitudes")
            if not isinstance(amps, list) or len(amps) != 4:
                raise ConfigError("explicit amplitudes need a list of four entries")
            vec = np.array([_complex(a) for a in amps])
            norm = np.linalg.norm(vec)
            if norm == 0 or not np.isfinite(norm):
                raise ConfigError("explicit amplitudes cannot be normalized")
            if abs(norm - 1) > 1e-6:
                raise ConfigError(f"explicit amplitudes have norm {norm:.6g}, expected 1")
            return QuantumState.from_amplitudes(vec)
        if isinstance(spec, str):
            text = spec.strip()
            if text.lower() in NAMED_STATES:
                return QuantumState(2, NAMED_STATES[text.lower()])
            if len(text) == 2 and set(text) <= {"0", "1"}:
                return QuantumState.basis(text)
            parts = [p for p in text.replace("⊗", ",").split(",") if p.strip()]
            if len(parts) == 2:
                return resolve_state(parts)
            raise ConfigError(f"cannot resolve input state {spec!r}")
        if isinstance(spec, (list, tuple)) and len(spec) == 2 and all(isinstance(s, str) for s in spec):
            return QuantumState.from_amplitudes(np.kron(_single(spec[0]), _single(spec[1])))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"cannot resolve input state {spec!r}")


@dataclass
class ExperimentConfig:
    lines: list[LineId] = field(default_factory=lambda: list(LINES))
    observables: list[str] = field(default_factory=list)
    mode: str = "ancilla"
    input_state: Any = field(default_factory=lambda: ["+1_z", "+1_z"])
    shots: int = 8192
    seed: int = 0
    noise: NoiseModel = NOISELESS
    noise_label: str = "noiseless"
    order: tuple[int, int, int] | None = None
    backend_label: str = "magicsq-statevector"

    def __post_init__(self) -> None:
        if not isinstance(self.shots, int) or isinstance(self.shots, bool) or self.shots < 1:
            raise ConfigError("shots must be a positive integer")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.order is not None and sorted(self.order) != [1, 2, 3]:
            raise ConfigError(f"order must be a permutation of 1, 2, 3, got {self.order}")
        for cell in self.observables:
            if cell not in CELL_LABELS:
                raise ConfigError(f"unknown observable cell {cell!r}")
        if not self.lines and not self.observables:
            raise ConfigError("config selects no lines and no observables")
        self.state  # resolve eagerly so bad specifiers fail at load time

    @property
    def state(self) -> QuantumState:
        return resolve_state(self.input_state)

    @classmethod
    def from_dict(cls, data: Any) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        version = data.get("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise ConfigError(f"unsupported config schema_version {version!r}")
        known = {
            "schema_version", "lines", "observables", "mode", "input_state",
            "shots", "seed", "noise", "order", "backend_label",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict[str, Any] = {}
        try:
            lines = data.get("lines", "all")
            if lines == "all":
                kwargs["lines"] = list(LINES)
            elif isinstance(lines, list):
                kwargs["lines"] = [LineId.parse(str(s)) for s in lines]
            else:
                raise ConfigError("'lines' must be 'all' or a list of line labels")
            obs = data.get("observables", [])
            if obs == "all":
                obs = list(CELL_LABELS)
            if not isinstance(obs, list):
                raise ConfigError("'observables' must be a list of cell labels")
            kwargs["observables"] = [f"r{r}c{c}" for r, c in (parse_cell(str(o)) for o in obs)]
            noise = data.get("noise", "noiseless")
            if isinstance(noise, str):
                kwargs["noise"], kwargs["noise_label"] = preset(noise), noise
            elif isinstance(noise, dict):
                kwargs["noise"], kwargs["noise_label"] = NoiseModel.from_dict(noise), "custom"
            else:
                raise ConfigError("'noise' must be a preset name or a parameter object")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        for key in ("mode", "input_state", "shots", "seed", "backend_label"):
            if key in data:
                kwargs[key] = data[key]
        if "seed" in kwargs and (not isinstance(kwargs["seed"], int) or kwargs["seed"] < 0):
            raise ConfigError("seed must be a non-negative integer")
        if data.get("order") is not None:
            order = data["order"]
            if not isinstance(order, list) or not all(isinstance(o, int) for o in order):
                raise ConfigError("'order' must be a list of integers")
            kwargs["order"] = tuple(order)
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentConfig:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(data)

    def describe_noise(self) -> dict:
        return {"label": self.noise_label, **self.noise.to_dict()}

