"""
Scenario file loading.

Scenarios are INI-style text files (``key = value`` under bracketed section
headers) or the JSON manifests written by a previous run. Both load into the
same nested mapping, overrides are applied to that mapping, and the result is
validated into a Scenario.
"""

import configparser
import copy
import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from pydantic import ValidationError

from ..exceptions import ScenarioConfigError
from .schemas import SWEEPABLE, Scenario

logger = logging.getLogger(__name__)

RawScenario = Dict[str, Any]

SECTIONS = ("scenario", "model", "atoms", "truncation", "grid", "outputs", "sweep")
DEFAULT_FIELD_LABEL = "main"
LIST_KEYS = {"channels", "negativity_cuts", "inversion_atoms", "wigner_times", "values", "times"}

_PI_EXPRESSION = re.compile(
    r"^(?P<sign>[+-]?)\s*(?P<coef>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?$",
    re.IGNORECASE,
)


def parse_scalar(text: Any) -> Any:
    """Resolve ``pi`` fractions such as ``pi/4`` or ``3*pi/2`` to floats; other text passes through"""
    if not isinstance(text, str):
        return text
    stripped = text.strip()
    match = _PI_EXPRESSION.match(stripped)
    if not match:
        return stripped
    value = math.pi * float(match.group("coef") or 1.0)
    if match.group("den"):
        value /= float(match.group("den"))
    return -value if match.group("sign") == "-" else value


def parse_value(key: str, value: Any) -> Any:
    if key in LIST_KEYS:
        if isinstance(value, str):
            items = [item.strip() for item in value.split(",")]
            return [parse_scalar(item) for item in items if item]
        if isinstance(value, (list, tuple)):
            return [parse_scalar(item) for item in value]
    return parse_scalar(value)


def _read_ini(path: Path) -> RawScenario:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ScenarioConfigError(f"cannot parse {path}: {exc}") from exc

    raw: RawScenario = {"fields": {}}
    for section in parser.sections():
        values = {key: parse_value(key, value) for key, value in parser.items(section)}
        if section == "field":
            raw["fields"][DEFAULT_FIELD_LABEL] = values
        elif section.startswith("field."):
            raw["fields"][section[len("field."):]] = values
        elif section == "scenario":
            raw.update(values)
        elif section in SECTIONS:
            raw[section] = values
        else:
            raise ScenarioConfigError(f"unknown section [{section}] in {path}")
    return raw


def _read_json(path: Path) -> RawScenario:
    try:
        with path.open(encoding="utf-8") as handle:
            data = json.load(handle)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ScenarioConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict) or "scenario" not in data:
        raise ScenarioConfigError(f"{path} is not a run manifest")
    return copy.deepcopy(data["scenario"])


def load_raw(path: Union[str, Path]) -> RawScenario:
    """Read a scenario file or manifest into the nested mapping"""
    path = Path(path)
    if not path.is_file():
        raise ScenarioConfigError(f"config file {path} does not exist")
    raw = _read_json(path) if path.suffix.lower() == ".json" else _read_ini(path)
    logger.debug(f"loaded {path} with sections {sorted(raw)}")
    return raw


def apply_override(raw: RawScenario, key: str, value: Any) -> RawScenario:
    """Set ``section.key`` (or a bare sweepable name) in a copy of ``raw``.

    ``field.<name>`` applies to every field variant and
    ``field.<label>.<name>`` to one of them.
    """
    raw = copy.deepcopy(raw)
    parts = key.strip().split(".")
    if len(parts) == 1:
        if parts[0] not in SWEEPABLE:
            raise ScenarioConfigError(f"override {key!r} needs a section prefix")
        parts = [SWEEPABLE[parts[0]], parts[0]]

    section, name = parts[0], parts[-1]
    value = parse_value(name, value)
    if section in ("field", "fields"):
        fields = raw.setdefault("fields", {})
        if len(parts) == 3:
            fields.setdefault(parts[1], {})[name] = value
        elif len(parts) == 2:
            if not fields:
                fields[DEFAULT_FIELD_LABEL] = {}
            for variant in fields.values():
                variant[name] = value
        else:
            raise ScenarioConfigError(f"malformed field override {key!r}")
    elif section == "scenario" and len(parts) == 2:
        raw[name] = value
    elif section in SECTIONS and len(parts) == 2:
        target = raw.get(section)
        raw[section] = dict(target) if isinstance(target, dict) else {}
        raw[section][name] = value
    else:
        raise ScenarioConfigError(f"unknown override target {key!r}")
    return raw


def parse_override(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise ScenarioConfigError(f"override {text!r} must look like KEY=VALUE")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def apply_overrides(raw: RawScenario, overrides: Iterable[str]) -> RawScenario:
    for text in overrides:
        raw = apply_override(raw, *parse_override(text))
    return raw


def build_scenario(raw: RawScenario) -> Scenario:
    """Validate the nested mapping into a Scenario"""
    data = copy.deepcopy(raw)
    model = dict(data.pop("model", None) or {})
    truncation = data.pop("truncation", None)
    if truncation:
        model["policy"] = truncation
    data["model"] = model
    if data.get("sweep") == {}:
        data.pop("sweep")
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        raise ScenarioConfigError(f"invalid scenario: {exc}") from exc


def load_scenario(path: Union[str, Path], overrides: Optional[List[str]] = None) -> Scenario:
    return build_scenario(apply_overrides(load_raw(path), overrides or []))


def scenario_to_raw(scenario: Scenario) -> RawScenario:
    """Loader-compatible mapping of a resolved scenario, every default spelled out"""
    model = scenario.model.model_dump(by_alias=True, exclude={"policy"})
    raw: RawScenario = {
        "name": scenario.name,
        "model": model,
        "atoms": scenario.atoms.model_dump(exclude_none=True),
        "fields": {label: params.model_dump() for label, params in scenario.fields.items()},
        "truncation": scenario.model.policy.model_dump(),
        "grid": scenario.grid.model_dump(exclude_none=True),
        "outputs": scenario.outputs.model_dump(),
    }
    if scenario.sweep is not None:
        raw["sweep"] = scenario.sweep.model_dump()
    return raw
