"""Typed views over KG entities, plus the violation record for bad data."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from ..rdf import Iri


@dataclass(frozen=True)
class ModelInput:
    sensor_class: Iri
    shape: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        out: dict = {"sensorClass": self.sensor_class.value}
        if self.shape is not None:
            out["shape"] = list(self.shape)
        return out


@dataclass(frozen=True)
class NeuralNetworkDescriptor:
    uuid: str
    name: str
    description: str
    category: str
    inputs: tuple[ModelInput, ...]
    macs: int
    min_ram_kb: Decimal
    min_flash_kb: Decimal
    metrics: dict[str, Decimal] = field(default_factory=dict)
    created: str | None = None
    graph_iri: Iri | None = None

    @property
    def required_sensor_classes(self) -> set[Iri]:
        return {inp.sensor_class for inp in self.inputs}

    def to_json(self) -> dict:
        return {
            "uuid": self.uuid,
            "name": self.name,
            "description": self.description,
            "category": self.category,
            "inputs": [inp.to_json() for inp in self.inputs],
            "macs": self.macs,
            "minRamKb": _number(self.min_ram_kb),
            "minFlashKb": _number(self.min_flash_kb),
            "metrics": {k: _number(v) for k, v in sorted(self.metrics.items())},
            "created": self.created,
            "graphIri": self.graph_iri.value if self.graph_iri else None,
        }


@dataclass(frozen=True)
class Datapoint:
    role: str
    semantic_type: Iri
    address: str

    def to_json(self) -> dict:
        return {"role": self.role, "semanticType": self.semantic_type.value, "address": self.address}


@dataclass(frozen=True)
class DeviceDescriptor:
    id: str
    name: str
    sensor_classes: frozenset[Iri]
    ram_kb: Decimal
    flash_kb: Decimal
    runtime_platform: str = "none"
    datapoints: tuple[Datapoint, ...] = ()
    graph_iri: Iri | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "sensorClasses": sorted(c.value for c in self.sensor_classes),
            "ramKb": _number(self.ram_kb),
            "flashKb": _number(self.flash_kb),
            "runtimePlatform": self.runtime_platform,
            "datapoints": [dp.to_json() for dp in self.datapoints],
            "graphIri": self.graph_iri.value if self.graph_iri else None,
        }


VIOLATION_RULES = frozenset(
    {
        "missing-identifier",
        "missing-description",
        "missing-macs",
        "missing-capacity",
        "non-positive-capacity",
        "unknown-unit",
        "unknown-sensor-class",
        "unknown-runtime-platform",
        "invalid-number",
        "duplicate-identifier",
        "duplicate-datapoint-role",
    }
)


@dataclass(frozen=True)
class Violation:
    subject_iri: str
    rule_id: str
    message: str

    def __post_init__(self):
        if self.rule_id not in VIOLATION_RULES:
            raise ValueError(f"unknown violation rule id: {self.rule_id}")

    def to_json(self) -> dict:
        return {"subjectIri": self.subject_iri, "ruleId": self.rule_id, "message": self.message}


def _number(value: Decimal):
    """Decimal → JSON number: int when integral, float otherwise."""
    if value == value.to_integral_value():
        return int(value)
    return float(value)
