"""Scenario file loading.

A scenario is a strict JSON document with sections:

    array       required; list of complex transparencies.  Each entry is a
                number (real part), a two-element list [re, im], or an object
                {"mag": m, "phase": p} in radians.
    defects     optional; list of {"index": i, "new_value": <complex>} applied
                on top of `array` to form the actual array (indices 0-based).
    config      optional; epsilon, delta, max_defects, cq, id_confirmations,
                calibration_error.
    rare_search optional; {"prior_p": p, "pattern": "array" | [<complex>...]}
                ("array", the default, means the pattern is the array section).

Unknown keys are rejected everywhere: a silently ignored typo in epsilon or
delta would invalidate the statistics.  Every rejection carries the offending
key path.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .core import CONSTRUCT_TOL, PixelArray
from .harness import SweepTemplate
from .protocols import (
    DefectScenario,
    DefectTestConfig,
    RareSearchConfig,
    validate_defect_inputs,
)

__all__ = ["ScenarioError", "Scenario", "parse_scenario", "load_scenario"]

_TOP_KEYS = {"array", "defects", "config", "rare_search"}
_CONFIG_KEYS = {"epsilon", "delta", "max_defects", "cq", "id_confirmations", "calibration_error"}
_DEFECT_KEYS = {"index", "new_value"}
_RARE_KEYS = {"prior_p", "pattern"}
_POLAR_KEYS = {"mag", "phase"}


class ScenarioError(ValueError):
    """Scenario rejected; ``field`` names the offending key path."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.reason = message
        super().__init__(f"{field}: {message}")


def _reject_unknown(mapping: dict, allowed: set[str], field: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ScenarioError(field, f"unknown key(s) {', '.join(map(repr, unknown))}")


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(field, f"expected a number, got {type(value).__name__}")
    if not np.isfinite(value):
        raise ScenarioError(field, "must be finite")
    return float(value)


def _integer(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(field, f"expected an integer, got {type(value).__name__}")
    return value


def _complex_value(value: Any, field: str) -> complex:
    """Accept a bare real, [re, im], or {"mag": m, "phase": p}."""
    if isinstance(value, dict):
        _reject_unknown(value, _POLAR_KEYS, field)
        if not _POLAR_KEYS <= set(value):
            raise ScenarioError(field, "polar form needs both 'mag' and 'phase'")
        mag = _number(value["mag"], f"{field}.mag")
        phase = _number(value["phase"], f"{field}.phase")
        return mag * cmath.exp(1j * phase)
    if isinstance(value, list):
        if len(value) != 2:
            raise ScenarioError(field, "rectangular form must be a two-element list [re, im]")
        return complex(_number(value[0], f"{field}[0]"), _number(value[1], f"{field}[1]"))
    return complex(_number(value, field), 0.0)


def _transparency(value: Any, field: str) -> complex:
    parsed = _complex_value(value, field)
    if abs(parsed) > 1.0 + CONSTRUCT_TOL:
        raise ScenarioError(field, f"transparency magnitude {abs(parsed):.6g} exceeds 1")
    return parsed


@dataclass(frozen=True, eq=False)
class Scenario:
    """Parsed scenario: theoretical array, defects producing the actual array,
    validated config values, and the optional rare-search section."""

    array: PixelArray
    defects: tuple[tuple[int, complex], ...]
    config_values: dict[str, Any]
    rare: Optional[tuple[float, Optional[PixelArray]]]

    def actual_array(self) -> PixelArray:
        values = self.array.transparencies.copy()
        for index, value in self.defects:
            values[index] = value
        return PixelArray(values)

    def defect_config(self) -> DefectTestConfig:
        for key in ("epsilon", "delta", "max_defects"):
            if key not in self.config_values:
                raise ScenarioError(f"config.{key}", "required for defect tests")
        cfg = self.config_values
        try:
            return DefectTestConfig(
                epsilon=cfg["epsilon"],
                delta=cfg["delta"],
                max_defects=cfg["max_defects"],
                round_constant_cq=cfg.get("cq", 4.0),
                id_confirmations=cfg.get("id_confirmations", 1),
                calibration_error=cfg.get("calibration_error", 0.0),
            )
        except ValueError as exc:
            raise ScenarioError("config", str(exc)) from exc

    def defect_scenario(self, config: DefectTestConfig) -> DefectScenario:
        for position, (index, value) in enumerate(self.defects):
            gap = abs(value - self.array.transparencies[index])
            if gap < config.epsilon - 1e-12:
                raise ScenarioError(
                    f"defects[{position}]",
                    f"|new_value - alpha| = {gap:.6g} is below epsilon = {config.epsilon:.6g}",
                )
        try:
            scenario = DefectScenario.from_defects(self.array, dict(self.defects))
            validate_defect_inputs(scenario, config)
        except ValueError as exc:
            raise ScenarioError("defects", str(exc)) from exc
        return scenario

    def rare_config(self) -> RareSearchConfig:
        if self.rare is None:
            raise ScenarioError("rare_search", "section required for rare-search runs")
        if "delta" not in self.config_values:
            raise ScenarioError("config.delta", "required for rare-search runs")
        prior_p, pattern = self.rare
        if pattern is None:
            pattern = self.array
        try:
            return RareSearchConfig(prior_p=prior_p, delta=self.config_values["delta"], pattern=pattern)
        except ValueError as exc:
            raise ScenarioError("rare_search", str(exc)) from exc

    def sweep_template(self) -> SweepTemplate:
        """Fill value from array[0], defect value from the single defect; the
        sweep re-derives the defect position per size, so the file's defect
        index is not used."""
        if len(self.defects) != 1:
            raise ScenarioError("defects", "sweep needs exactly one defect")
        return SweepTemplate(
            fill=complex(self.array.transparencies[0]), defect=self.defects[0][1]
        )


def parse_scenario(document: Any, source: str = "scenario") -> Scenario:
    """Validate a decoded JSON document into a Scenario."""
    if not isinstance(document, dict):
        raise ScenarioError(source, "top level must be an object")
    _reject_unknown(document, _TOP_KEYS, source)

    if "array" not in document:
        raise ScenarioError("array", "section is required")
    raw_array = document["array"]
    if not isinstance(raw_array, list) or not raw_array:
        raise ScenarioError("array", "must be a nonempty list of transparencies")
    entries = [_transparency(v, f"array[{i}]") for i, v in enumerate(raw_array)]
    array = PixelArray(np.array(entries, dtype=np.complex128))

    defects: list[tuple[int, complex]] = []
    seen: set[int] = set()
    for position, item in enumerate(document.get("defects", [])):
        field = f"defects[{position}]"
        if not isinstance(item, dict):
            raise ScenarioError(field, "must be an object with 'index' and 'new_value'")
        _reject_unknown(item, _DEFECT_KEYS, field)
        if not _DEFECT_KEYS <= set(item):
            raise ScenarioError(field, "needs both 'index' and 'new_value'")
        index = _integer(item["index"], f"{field}.index")
        if not 0 <= index < array.n:
            raise ScenarioError(f"{field}.index", f"out of range for {array.n} pixels (0-based)")
        if index in seen:
            raise ScenarioError(f"{field}.index", f"pixel {index} listed twice")
        seen.add(index)
        defects.append((index, _transparency(item["new_value"], f"{field}.new_value")))

    config_values: dict[str, Any] = {}
    raw_config = document.get("config", {})
    if not isinstance(raw_config, dict):
        raise ScenarioError("config", "must be an object")
    _reject_unknown(raw_config, _CONFIG_KEYS, "config")
    if "epsilon" in raw_config:
        epsilon = _number(raw_config["epsilon"], "config.epsilon")
        if not (0.0 < epsilon <= 2.0):
            raise ScenarioError("config.epsilon", "must lie in (0, 2]")
        config_values["epsilon"] = epsilon
    if "delta" in raw_config:
        delta = _number(raw_config["delta"], "config.delta")
        if not (0.0 < delta < 1.0):
            raise ScenarioError("config.delta", "must lie in (0, 1)")
        config_values["delta"] = delta
    if "max_defects" in raw_config:
        max_defects = _integer(raw_config["max_defects"], "config.max_defects")
        if max_defects < 0:
            raise ScenarioError("config.max_defects", "must be >= 0")
        config_values["max_defects"] = max_defects
    if "cq" in raw_config:
        cq = _number(raw_config["cq"], "config.cq")
        if not cq > 0.0:
            raise ScenarioError("config.cq", "must be positive")
        config_values["cq"] = cq
    if "id_confirmations" in raw_config:
        confirmations = _integer(raw_config["id_confirmations"], "config.id_confirmations")
        if confirmations < 1:
            raise ScenarioError("config.id_confirmations", "must be >= 1")
        config_values["id_confirmations"] = confirmations
    if "calibration_error" in raw_config:
        calibration = _number(raw_config["calibration_error"], "config.calibration_error")
        if calibration < 0.0:
            raise ScenarioError("config.calibration_error", "must be >= 0")
        config_values["calibration_error"] = calibration

    rare: Optional[tuple[float, Optional[PixelArray]]] = None
    if "rare_search" in document:
        raw_rare = document["rare_search"]
        if not isinstance(raw_rare, dict):
            raise ScenarioError("rare_search", "must be an object")
        _reject_unknown(raw_rare, _RARE_KEYS, "rare_search")
        if "prior_p" not in raw_rare:
            raise ScenarioError("rare_search.prior_p", "is required")
        prior_p = _number(raw_rare["prior_p"], "rare_search.prior_p")
        if not (0.0 < prior_p < 1.0):
            raise ScenarioError("rare_search.prior_p", "must lie in (0, 1)")
        pattern: Optional[PixelArray] = None
        raw_pattern = raw_rare.get("pattern", "array")
        if isinstance(raw_pattern, str):
            if raw_pattern != "array":
                raise ScenarioError(
                    "rare_search.pattern", "string form must be the reference 'array'"
                )
        elif isinstance(raw_pattern, list):
            if not raw_pattern:
                raise ScenarioError("rare_search.pattern", "must not be empty")
            values = [
                _transparency(v, f"rare_search.pattern[{i}]")
                for i, v in enumerate(raw_pattern)
            ]
            if len(values) != array.n:
                raise ScenarioError(
                    "rare_search.pattern",
                    f"length {len(values)} does not match array length {array.n}",
                )
            pattern = PixelArray(np.array(values, dtype=np.complex128))
        else:
            raise ScenarioError("rare_search.pattern", "must be 'array' or a list")
        rare = (prior_p, pattern)

    return Scenario(array=array, defects=tuple(defects), config_values=config_values, rare=rare)


def load_scenario(path: str | Path) -> Scenario:
    """Read, decode and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(str(path), f"cannot read scenario file: {exc.strerror or exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(str(path), f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(document, source=str(path))
