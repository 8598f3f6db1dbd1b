"""Vocabulary, manifest ingestion, descriptor extraction, validation."""

from .descriptors import (
    Datapoint,
    DeviceDescriptor,
    ModelInput,
    NeuralNetworkDescriptor,
    Violation,
    VIOLATION_RULES,
)
from .extract import extract_devices, extract_models, validate
from .manifests import (
    KNOWN_RUNTIME_PLATFORMS,
    compile_device_manifest,
    compile_model_manifest,
    compute_macs,
)
from .vocab import (
    DEVICE_NS,
    GRAPH_NS,
    MODEL_NS,
    PREFIXES,
    SENSOR_CLASSES,
    SUBCLASS_OF,
    graph_iri,
    resolve_sensor_class,
    satisfies_all,
    sensor_class_satisfies,
)
from . import vocab

__all__ = [
    "Datapoint",
    "DeviceDescriptor",
    "DEVICE_NS",
    "GRAPH_NS",
    "KNOWN_RUNTIME_PLATFORMS",
    "MODEL_NS",
    "ModelInput",
    "NeuralNetworkDescriptor",
    "PREFIXES",
    "SENSOR_CLASSES",
    "SUBCLASS_OF",
    "VIOLATION_RULES",
    "Violation",
    "compile_device_manifest",
    "compile_model_manifest",
    "compute_macs",
    "extract_devices",
    "extract_models",
    "graph_iri",
    "resolve_sensor_class",
    "satisfies_all",
    "sensor_class_satisfies",
    "validate",
    "vocab",
]
