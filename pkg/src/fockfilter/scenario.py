"""Scenario files: one named circuit run, described as JSON.

A scenario names a circuit (``filter``, ``projector``, or ``ghz``), its
parameters, the herald acceptance mode, and whether intermediate
checkpoints should be emitted.  A ``grid`` section turns the scenario
into a sweep: each listed parameter ranges over explicit values or a
``{start, stop, count}`` linear range, and the cartesian product is run
point by point.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .circuits import FEEDFORWARD, HERALD_MODES
from .errors import ScenarioError

CIRCUITS = ("filter", "projector", "ghz")

_REQUIRED_PARAMS = {
    "filter": ("alpha", "beta", "gamma"),
    "projector": ("c0", "c1", "c2", "c3"),
    "ghz": ("n",),
}


def parse_complex(value: Any) -> complex:
    """Complex number from a scenario value or CLI flag.

    Accepts plain numbers, ``{"re": x, "im": y}`` records, and strings in
    the form ``re`` or ``re+imi`` (a trailing ``i`` or ``j`` marks the
    imaginary part, e.g. ``0.5-0.25i``).
    """
    if isinstance(value, bool):
        raise ScenarioError(f"expected a complex number, got {value!r}")
    if isinstance(value, (int, float)):
        z = complex(value)
    elif isinstance(value, complex):
        z = value
    elif isinstance(value, Mapping):
        try:
            z = complex(float(value["re"]), float(value.get("im", 0.0)))
        except (KeyError, TypeError, ValueError):
            raise ScenarioError(f"expected {{re, im}} fields, got {value!r}") from None
    elif isinstance(value, str):
        text = value.strip().replace(" ", "").replace("i", "j")
        try:
            z = complex(text)
        except ValueError:
            raise ScenarioError(f"cannot parse complex number {value!r}") from None
    else:
        raise ScenarioError(f"expected a complex number, got {value!r}")
    if not (cmath.isfinite(z)):
        raise ScenarioError(f"complex parameter must be finite, got {value!r}")
    return z


@dataclass
class Scenario:
    circuit: str
    parameters: dict
    heralds: str = FEEDFORWARD
    emit_checkpoints: bool = False
    grid: dict | None = None


def scenario_from_dict(data: Any) -> Scenario:
    if not isinstance(data, Mapping):
        raise ScenarioError(f"scenario must be a JSON object, got {type(data).__name__}")
    unknown = set(data) - {"circuit", "parameters", "heralds", "emit_checkpoints", "grid"}
    if unknown:
        raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
    circuit = data.get("circuit")
    if circuit not in CIRCUITS:
        raise ScenarioError(f"circuit must be one of {CIRCUITS}, got {circuit!r}")
    parameters = data.get("parameters")
    if not isinstance(parameters, Mapping):
        raise ScenarioError("scenario needs a 'parameters' object")
    heralds = data.get("heralds", FEEDFORWARD)
    if heralds not in HERALD_MODES:
        raise ScenarioError(f"heralds must be one of {HERALD_MODES}, got {heralds!r}")
    emit = data.get("emit_checkpoints", False)
    if not isinstance(emit, bool):
        raise ScenarioError(f"emit_checkpoints must be true or false, got {emit!r}")
    grid = data.get("grid")
    if grid is not None and not isinstance(grid, Mapping):
        raise ScenarioError("grid must be an object mapping parameter names to ranges")

    swept = set(grid) if grid else set()
    for name in _REQUIRED_PARAMS[circuit]:
        if name not in parameters and name not in swept:
            # the filter's middle amplitude may be completed from the other two
            if circuit == "filter" and name == "beta":
                continue
            raise ScenarioError(f"circuit {circuit!r} needs parameter {name!r}")
    return Scenario(
        circuit=circuit,
        parameters=dict(parameters),
        heralds=heralds,
        emit_checkpoints=emit,
        grid=dict(grid) if grid else None,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file; JSON errors keep line/column."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario file {path}: {exc.msg}", exc.lineno, exc.colno) from None
    return scenario_from_dict(data)


def grid_axis_values(name: str, spec: Any) -> list[float]:
    """Real values of one grid axis: an explicit list or {start, stop, count}."""
    if isinstance(spec, (list, tuple)):
        values = []
        for v in spec:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ScenarioError(f"grid axis {name!r} must list real numbers, got {v!r}")
            values.append(float(v))
        if not values:
            raise ScenarioError(f"grid axis {name!r} is empty")
        return values
    if isinstance(spec, Mapping):
        try:
            start = float(spec["start"])
            stop = float(spec["stop"])
            count = int(spec["count"])
        except (KeyError, TypeError, ValueError):
            raise ScenarioError(
                f"grid axis {name!r} needs start/stop/count, got {spec!r}"
            ) from None
        if count < 1:
            raise ScenarioError(f"grid axis {name!r} needs count >= 1")
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    raise ScenarioError(f"grid axis {name!r} must be a list or a start/stop/count object")
