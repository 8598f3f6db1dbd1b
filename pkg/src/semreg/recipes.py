"""Recipe templates, datapoint binding and scripted telemetry replay.

A recipe declares the semantic data types its widgets need; binding matches
those against device datapoints (one-step subclass tolerance) and must be
acknowledged by a human before any telemetry can flow. Telemetry is a looped
replay of a scripted event list — there is no field bus at desk scale.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterator

from .catalog import DeviceDescriptor, sensor_class_satisfies
from .errors import (
    InvalidTransitionError,
    NotAcknowledgedError,
    RecipeParseError,
    TelemetryScriptError,
)
from .rdf import Iri

BUILTIN_RECIPES_DIR = Path(__file__).parent / "fixtures" / "recipes"
CARDINALITIES = ("exactly-one", "one-or-more")
WIDGET_KINDS = ("counterByClass", "timeline", "table")


@dataclass(frozen=True)
class RecipeInput:
    role: str
    semantic_type: Iri
    cardinality: str = "exactly-one"

    def to_json(self) -> dict:
        return {"role": self.role, "semanticType": self.semantic_type.value, "cardinality": self.cardinality}


@dataclass(frozen=True)
class RecipeWidget:
    widget_kind: str
    bound_role: str

    def to_json(self) -> dict:
        return {"widgetKind": self.widget_kind, "boundRole": self.bound_role}


@dataclass(frozen=True)
class Recipe:
    recipe_id: str
    name: str
    description: str
    inputs: tuple[RecipeInput, ...]
    widgets: tuple[RecipeWidget, ...]

    def to_json(self) -> dict:
        return {
            "recipeId": self.recipe_id,
            "name": self.name,
            "description": self.description,
            "inputs": [i.to_json() for i in self.inputs],
            "widgets": [w.to_json() for w in self.widgets],
        }


@dataclass(frozen=True)
class Assignment:
    device_id: str
    datapoint_role: str
    address: str

    def to_json(self) -> dict:
        return {"deviceId": self.device_id, "datapointRole": self.datapoint_role, "address": self.address}


@dataclass(frozen=True)
class Binding:
    binding_id: str
    recipe_id: str
    assignments: dict[str, tuple[Assignment, ...]]
    status: str = "proposed"  # proposed | acknowledged | rejected

    def to_json(self) -> dict:
        return {
            "kind": "binding",
            "bindingId": self.binding_id,
            "recipeId": self.recipe_id,
            "assignments": {
                role: [a.to_json() for a in assignments]
                for role, assignments in sorted(self.assignments.items())
            },
            "status": self.status,
        }


@dataclass(frozen=True)
class AmbiguityReport:
    recipe_id: str
    candidates: dict[str, tuple[Assignment, ...]]

    def to_json(self) -> dict:
        return {
            "kind": "ambiguous",
            "recipeId": self.recipe_id,
            "candidates": {
                role: [a.to_json() for a in assignments]
                for role, assignments in sorted(self.candidates.items())
            },
        }


@dataclass(frozen=True)
class MissingReport:
    recipe_id: str
    missing: tuple[tuple[str, Iri], ...]  # (role, required type)

    def to_json(self) -> dict:
        return {
            "kind": "missing",
            "recipeId": self.recipe_id,
            "missing": [{"role": role, "requiredType": t.value} for role, t in self.missing],
        }


def parse_recipe(doc: dict, source: str = "<recipe>") -> Recipe:
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise RecipeParseError(source, ["recipe must be a JSON object"])

    def need_str(key: str) -> str:
        value = doc.get(key)
        if not isinstance(value, str) or not value:
            problems.append(f"{key}: non-empty string required")
            return ""
        return value

    recipe_id = need_str("recipeId")
    name = need_str("name")
    description = doc.get("description", "")
    if not isinstance(description, str):
        problems.append("description: string required")
        description = ""

    inputs: list[RecipeInput] = []
    roles: set[str] = set()
    raw_inputs = doc.get("inputs")
    if not isinstance(raw_inputs, list) or not raw_inputs:
        problems.append("inputs: non-empty list required")
    else:
        for i, item in enumerate(raw_inputs):
            if not isinstance(item, dict):
                problems.append(f"inputs[{i}]: object required")
                continue
            role = item.get("role")
            semantic_type = item.get("semanticType")
            cardinality = item.get("cardinality", "exactly-one")
            if not isinstance(role, str) or not role:
                problems.append(f"inputs[{i}].role: non-empty string required")
                continue
            if role in roles:
                problems.append(f"inputs[{i}].role: duplicate role {role!r}")
                continue
            if cardinality not in CARDINALITIES:
                problems.append(f"inputs[{i}].cardinality: must be one of {', '.join(CARDINALITIES)}")
                continue
            try:
                type_iri = Iri(semantic_type) if isinstance(semantic_type, str) else None
            except ValueError:
                type_iri = None
            if type_iri is None:
                problems.append(f"inputs[{i}].semanticType: absolute IRI required")
                continue
            roles.add(role)
            inputs.append(RecipeInput(role, type_iri, cardinality))

    widgets: list[RecipeWidget] = []
    raw_widgets = doc.get("widgets", [])
    if not isinstance(raw_widgets, list):
        problems.append("widgets: list required")
    else:
        for i, item in enumerate(raw_widgets):
            if not isinstance(item, dict):
                problems.append(f"widgets[{i}]: object required")
                continue
            kind = item.get("widgetKind")
            bound_role = item.get("boundRole")
            if kind not in WIDGET_KINDS:
                problems.append(f"widgets[{i}].widgetKind: must be one of {', '.join(WIDGET_KINDS)}")
                continue
            if bound_role not in roles:
                problems.append(f"widgets[{i}].boundRole: no input declares role {bound_role!r}")
                continue
            widgets.append(RecipeWidget(kind, bound_role))

    unknown = set(doc) - {"recipeId", "name", "description", "inputs", "widgets"}
    problems.extend(f"{key}: unknown field" for key in sorted(unknown))
    if problems:
        raise RecipeParseError(source, problems)
    return Recipe(recipe_id, name, description, tuple(inputs), tuple(widgets))


class RecipeStore:
    """Recipes loaded from a directory of JSON files; bad files are reported
    through `errors` while the rest still load. Built-ins ship in-package."""

    def __init__(self, directory: str | Path | None = None, include_builtins: bool = True):
        self.directories: list[Path] = []
        if include_builtins:
            self.directories.append(BUILTIN_RECIPES_DIR)
        if directory is not None:
            self.directories.append(Path(directory))
        self.errors: list[RecipeParseError] = []

    def list_recipes(self) -> list[Recipe]:
        recipes: dict[str, Recipe] = {}
        self.errors = []
        for directory in self.directories:
            if not directory.is_dir():
                continue
            for path in sorted(directory.glob("*.json")):
                try:
                    doc = json.loads(path.read_text(encoding="utf-8"))
                    recipe = parse_recipe(doc, source=path.name)
                except json.JSONDecodeError as exc:
                    self.errors.append(RecipeParseError(path.name, [f"invalid JSON: {exc}"]))
                    continue
                except RecipeParseError as exc:
                    self.errors.append(exc)
                    continue
                recipes[recipe.recipe_id] = recipe  # later directories override built-ins
        return sorted(recipes.values(), key=lambda r: r.recipe_id)

    def get(self, recipe_id: str) -> Recipe | None:
        return next((r for r in self.list_recipes() if r.recipe_id == recipe_id), None)


def propose_binding(
    recipe: Recipe,
    devices: list[DeviceDescriptor],
    binding_id: str = "binding-proposed",
) -> Binding | AmbiguityReport | MissingReport:
    """Match each recipe input against the devices' datapoints.

    Candidates are datapoints whose semantic type equals or one-step
    subclasses the required type. exactly-one roles need exactly one
    candidate; every candidate satisfies a one-or-more role.
    """
    candidates: dict[str, list[Assignment]] = {}
    for recipe_input in recipe.inputs:
        found: list[Assignment] = []
        for device in devices:
            for datapoint in device.datapoints:
                if sensor_class_satisfies(datapoint.semantic_type, recipe_input.semantic_type):
                    found.append(Assignment(device.id, datapoint.role, datapoint.address))
        candidates[recipe_input.role] = found

    missing = tuple(
        (inp.role, inp.semantic_type) for inp in recipe.inputs if not candidates[inp.role]
    )
    if missing:
        return MissingReport(recipe.recipe_id, missing)

    ambiguous = {
        inp.role: tuple(candidates[inp.role])
        for inp in recipe.inputs
        if inp.cardinality == "exactly-one" and len(candidates[inp.role]) > 1
    }
    if ambiguous:
        return AmbiguityReport(recipe.recipe_id, ambiguous)

    assignments = {
        inp.role: (candidates[inp.role][0],)
        if inp.cardinality == "exactly-one"
        else tuple(candidates[inp.role])
        for inp in recipe.inputs
    }
    return Binding(binding_id=binding_id, recipe_id=recipe.recipe_id, assignments=assignments)


def acknowledge(binding: Binding, decision: str) -> Binding:
    """proposed → acknowledged|rejected; anything else is an invalid transition."""
    if decision not in ("accept", "reject"):
        raise InvalidTransitionError(f"decision must be 'accept' or 'reject', got {decision!r}")
    if binding.status != "proposed":
        raise InvalidTransitionError(f"binding is already {binding.status}")
    return replace(binding, status="acknowledged" if decision == "accept" else "rejected")


@dataclass(frozen=True)
class ScriptEvent:
    class_label: str
    confidence: float
    color: str


@dataclass(frozen=True)
class TelemetryEvent:
    ts: str  # ISO-8601 UTC
    class_label: str
    confidence: float
    color: str

    def to_json(self) -> dict:
        return {"ts": self.ts, "classLabel": self.class_label, "confidence": self.confidence, "color": self.color}


def load_script(doc: list, source: str = "<script>") -> list[ScriptEvent]:
    """Validate a scripted event list; confidence outside [0,1] is rejected."""
    if not isinstance(doc, list) or not doc:
        raise TelemetryScriptError(f"{source}: non-empty event list required")
    events = []
    for i, item in enumerate(doc):
        if not isinstance(item, dict):
            raise TelemetryScriptError(f"{source}[{i}]: object required")
        label = item.get("classLabel")
        confidence = item.get("confidence")
        color = item.get("color")
        if not isinstance(label, str) or not label:
            raise TelemetryScriptError(f"{source}[{i}].classLabel: non-empty string required")
        if isinstance(confidence, bool) or not isinstance(confidence, (int, float)) or not 0 <= confidence <= 1:
            raise TelemetryScriptError(f"{source}[{i}].confidence: number in [0, 1] required")
        if not isinstance(color, str) or not color:
            raise TelemetryScriptError(f"{source}[{i}].color: non-empty string required")
        events.append(ScriptEvent(label, float(confidence), color))
    return events


def load_script_file(path: str | Path) -> list[ScriptEvent]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TelemetryScriptError(f"{path.name}: invalid JSON: {exc}") from exc
    return load_script(doc, source=path.name)


class TelemetryStream:
    """Looped replay of a script at a fixed rate; events are stamped with the
    current wall time so timestamps never decrease within a stream."""

    def __init__(
        self,
        binding: Binding,
        script: list[ScriptEvent],
        rate_per_second: float = 1.0,
        sleep: Callable[[float], None] = time.sleep,
        now: Callable[[], float] = time.time,
    ):
        if binding.status != "acknowledged":
            raise NotAcknowledgedError(
                f"binding {binding.binding_id} is {binding.status}; acknowledge it before streaming"
            )
        if not script:
            raise TelemetryScriptError("script must not be empty")
        if rate_per_second <= 0:
            raise ValueError("rate must be positive")
        self.binding = binding
        self.script = list(script)
        self.interval = 1.0 / rate_per_second
        self._sleep = sleep
        self._now = now
        self._last_ts = 0.0

    def _stamp(self) -> str:
        current = max(self._now(), self._last_ts)
        self._last_ts = current
        from datetime import datetime, timezone

        return datetime.fromtimestamp(current, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"

    def stamped_events(self) -> Iterator[TelemetryEvent]:
        """Endless stamped replay without pacing; the caller owns the delays."""
        while True:
            for event in self.script:
                yield TelemetryEvent(self._stamp(), event.class_label, event.confidence, event.color)

    def __iter__(self) -> Iterator[TelemetryEvent]:
        for event in self.stamped_events():
            yield event
            self._sleep(self.interval)


def telemetry_source(
    binding: Binding,
    script: list[ScriptEvent],
    rate_per_second: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
    now: Callable[[], float] = time.time,
) -> TelemetryStream:
    return TelemetryStream(binding, script, rate_per_second, sleep=sleep, now=now)
