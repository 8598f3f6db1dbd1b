"""Capability matchmaking between models and devices.

Both directions are answered two ways: by direct traversal over extracted
descriptors, and by compiling a query in the supported SPARQL subset shaped
like the registry's published discovery queries. Resource thresholds are
inclusive (a model needing exactly the device's RAM matches), margins are
reported in kilobytes after unit canonicalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from .catalog import (
    DeviceDescriptor,
    NeuralNetworkDescriptor,
    extract_devices,
    extract_models,
    satisfies_all,
    vocab,
)
from .errors import InvalidConstraintsError, UnknownDeviceError, UnknownModelError
from .rdf import Dataset, Iri

MODELS_FOR_DEVICE = "models-for-device"
DEVICES_FOR_MODEL = "devices-for-model"


@dataclass(frozen=True)
class MatchResult:
    model_uuid: str
    device_id: str
    ram_margin_kb: Decimal
    flash_margin_kb: Decimal
    satisfied_sensors: frozenset[Iri]
    rank: int

    def to_json(self) -> dict:
        return {
            "modelUuid": self.model_uuid,
            "deviceId": self.device_id,
            "ramMarginKb": _number(self.ram_margin_kb),
            "flashMarginKb": _number(self.flash_margin_kb),
            "satisfiedSensors": sorted(c.value for c in self.satisfied_sensors),
            "rank": self.rank,
        }


@dataclass(frozen=True)
class MatchConstraints:
    """Inputs for a compiled match query; populate one direction only."""

    max_ram_kb: Decimal | int | None = None
    max_flash_kb: Decimal | int | None = None
    min_ram_kb: Decimal | int | None = None
    min_flash_kb: Decimal | int | None = None
    required_sensor_classes: frozenset[Iri] = field(default_factory=frozenset)
    min_accuracy: Decimal | None = None  # optional, off by default


def _number(value: Decimal):
    return int(value) if value == value.to_integral_value() else float(value)


def _pair_matches(model: NeuralNetworkDescriptor, device: DeviceDescriptor) -> bool:
    return (
        model.min_ram_kb <= device.ram_kb
        and model.min_flash_kb <= device.flash_kb
        and satisfies_all(set(device.sensor_classes), model.required_sensor_classes)
    )


def _accuracy_ok(model: NeuralNetworkDescriptor, min_accuracy: Decimal | None) -> bool:
    if min_accuracy is None:
        return True
    accuracy = model.metrics.get("accuracy")
    return accuracy is not None and accuracy >= min_accuracy


def _result(model: NeuralNetworkDescriptor, device: DeviceDescriptor, rank: int) -> MatchResult:
    return MatchResult(
        model_uuid=model.uuid,
        device_id=device.id,
        ram_margin_kb=device.ram_kb - model.min_ram_kb,
        flash_margin_kb=device.flash_kb - model.min_flash_kb,
        satisfied_sensors=frozenset(model.required_sensor_classes),
        rank=rank,
    )


def models_for_device(
    dataset: Dataset, device_id: str, min_accuracy: Decimal | None = None
) -> list[MatchResult]:
    """Models the device can run, ordered by ascending RAM requirement."""
    devices, _ = extract_devices(dataset)
    device = next((d for d in devices if d.id == device_id), None)
    if device is None:
        raise UnknownDeviceError(device_id)
    models, _ = extract_models(dataset)
    matched = [
        m
        for m in models
        if _pair_matches(m, device) and _accuracy_ok(m, min_accuracy)
    ]
    matched.sort(key=lambda m: (m.min_ram_kb, m.uuid))
    return [_result(m, device, rank) for rank, m in enumerate(matched, start=1)]


def devices_for_model(
    dataset: Dataset, model_uuid: str, min_accuracy: Decimal | None = None
) -> list[MatchResult]:
    """Devices able to run the model, ordered by ascending device RAM."""
    models, _ = extract_models(dataset)
    model = next((m for m in models if m.uuid == model_uuid), None)
    if model is None:
        raise UnknownModelError(model_uuid)
    if not _accuracy_ok(model, min_accuracy):
        return []
    devices, _ = extract_devices(dataset)
    matched = [d for d in devices if _pair_matches(model, d)]
    matched.sort(key=lambda d: (d.ram_kb, d.id))
    return [_result(model, d, rank) for rank, d in enumerate(matched, start=1)]


def _format_threshold(value: Decimal | int) -> str:
    dec = Decimal(value)
    return str(int(dec)) if dec == dec.to_integral_value() else format(dec.normalize(), "f")


def compile_match_query(direction: str, constraints: MatchConstraints) -> str:
    """Query text for one match direction, shaped like the published
    discovery queries (same patterns and variable naming; filter constants
    taken from the constraints)."""
    if direction == MODELS_FOR_DEVICE:
        if constraints.max_ram_kb is None or constraints.max_flash_kb is None:
            raise InvalidConstraintsError("models-for-device requires max_ram_kb and max_flash_kb")
        if constraints.min_ram_kb is not None or constraints.min_flash_kb is not None:
            raise InvalidConstraintsError("only one direction's fields may be populated")
        return _models_query(constraints)
    if direction == DEVICES_FOR_MODEL:
        if constraints.min_ram_kb is None or constraints.min_flash_kb is None:
            raise InvalidConstraintsError("devices-for-model requires min_ram_kb and min_flash_kb")
        if constraints.max_ram_kb is not None or constraints.max_flash_kb is not None:
            raise InvalidConstraintsError("only one direction's fields may be populated")
        return _devices_query(constraints)
    raise InvalidConstraintsError(f"unknown direction {direction!r}")


def _sensor_suffixes(count: int) -> list[str]:
    # a single sensor keeps the published queries' bare ?input/?sensor names
    if count == 1:
        return [""]
    return [f"_{i}" for i in range(1, count + 1)]


def _compact(iri: Iri) -> str:
    compacted = vocab.PREFIXES.compact(iri)
    return compacted if compacted is not None else f"<{iri.value}>"


def _models_query(constraints: MatchConstraints) -> str:
    classes = sorted(constraints.required_sensor_classes, key=lambda c: c.value)
    suffixes = _sensor_suffixes(len(classes))
    lines = [
        "SELECT ?uuid ?MACs ?RAM ?Flash ?Description",
        "WHERE {",
        "    ?nn a nnet:NeuralNetwork ;",
        "        schema:identifier ?uuid ;",
        "        schema:description ?Description ;",
    ]
    for suffix in suffixes:
        lines.append(f"        ssn:hasInput ?input{suffix} ;")
    lines += [
        "        nnet:hasMultiplyAccumulateOps ?MACs ;",
        "        s3n:hasProcedureFeature ?x_1 ;",
        "        s3n:hasProcedureFeature ?x_2 .",
        "    ?x_1 ssn-system:inCondition ?cond_1 .",
        "    ?x_2 ssn-system:inCondition ?cond_2 .",
        "    ?cond_1 a s3n_extend:RAM ;",
        "        schema:minValue ?RAM ;",
        "        schema:unitCode om:kilobyte .",
        "    ?cond_2 a s3n_extend:Flash ;",
        "        schema:minValue ?Flash ;",
        "        schema:unitCode om:kilobyte .",
    ]
    for sensor_class, suffix in zip(classes, suffixes):
        lines.append(f"    ?sensor{suffix} ssn_extend:provideInput ?input{suffix} ;")
        lines.append(f"        a {_compact(sensor_class)} .")
    lines.append(f"    FILTER (?RAM <= {_format_threshold(constraints.max_ram_kb)})")
    lines.append(f"    FILTER (?Flash <= {_format_threshold(constraints.max_flash_kb)})")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _devices_query(constraints: MatchConstraints) -> str:
    classes = sorted(constraints.required_sensor_classes, key=lambda c: c.value)
    mcu_index = len(classes) + 1
    lines = [
        "SELECT ?Device ?RAM ?Flash",
        "WHERE {",
        "    ?Device a s3n:SmartSensor ;",
    ]
    for i in range(1, len(classes) + 1):
        lines.append(f"        ssn:hasSubSystem ?system_{i} ;")
    lines.append(f"        ssn:hasSubSystem ?system_{mcu_index} .")
    for i, sensor_class in enumerate(classes, start=1):
        lines.append(f"    ?system_{i} a {_compact(sensor_class)} .")
    lines += [
        f"    ?system_{mcu_index} a s3n:MicroController ;",
        "        s3n:hasSystemCapability ?x .",
        "    ?x ssn-system:hasSystemProperty ?cond_1 .",
        "    ?x ssn-system:hasSystemProperty ?cond_2 .",
        "    ?cond_1 a s3n_extend:RAM ;",
        "        schema:value ?RAM ;",
        "        schema:unitCode om:kilobyte .",
        "    ?cond_2 a s3n_extend:Flash ;",
        "        schema:value ?Flash ;",
        "        schema:unitCode om:kilobyte .",
        f"    FILTER (?RAM >= {_format_threshold(constraints.min_ram_kb)})",
        f"    FILTER (?Flash >= {_format_threshold(constraints.min_flash_kb)})",
        "}",
        "ORDER BY ?RAM",
    ]
    return "\n".join(lines) + "\n"


def constraints_for_device(device: DeviceDescriptor) -> MatchConstraints:
    """Constraint set a device selection produces (models-for-device)."""
    return MatchConstraints(
        max_ram_kb=device.ram_kb,
        max_flash_kb=device.flash_kb,
        required_sensor_classes=frozenset(device.sensor_classes),
    )


def constraints_for_model(model: NeuralNetworkDescriptor) -> MatchConstraints:
    """Constraint set a model selection produces (devices-for-model)."""
    return MatchConstraints(
        min_ram_kb=model.min_ram_kb,
        min_flash_kb=model.min_flash_kb,
        required_sensor_classes=frozenset(model.required_sensor_classes),
    )
