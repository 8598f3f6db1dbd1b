"""Neutral JSON manifests for models and devices, compiled to RDF.

The manifest is the ingestion contract for entities that do not arrive as
Turtle: a flat JSON document mirroring the descriptor fields. Compilation
emits exactly the graph shape the discovery queries expect (see extract.py
for the inverse direction). Unknown fields are rejected so typos cannot
silently drop data.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation
from typing import Any

from ..errors import InvalidLayerError, ManifestSchemaError
from ..rdf import Graph, Iri, Literal, RDF_TYPE, Triple, XSD_DATE, decimal, integer, string
from . import vocab
from .vocab import DEVICE_NS, MODEL_NS


def compute_macs(layers: list[dict]) -> int:
    """Multiply-accumulate count for a layer stack.

    dense(in, out) -> in*out; conv2d(kh, kw, cin, cout, hout, wout) ->
    kh*kw*cin*cout*hout*wout; pooling/other -> 0.
    """
    total = 0
    for index, layer in enumerate(layers):
        if not isinstance(layer, dict) or "kind" not in layer:
            raise InvalidLayerError(f"layers[{index}]: expected an object with a 'kind'")
        kind = layer["kind"]
        dims = layer.get("dims", {})
        if kind == "dense":
            total += _dims_product(dims, ("in", "out"), index)
        elif kind == "conv2d":
            total += _dims_product(dims, ("kh", "kw", "cin", "cout", "hout", "wout"), index)
        elif kind in ("pooling", "other"):
            pass
        else:
            raise InvalidLayerError(f"layers[{index}]: unknown layer kind {kind!r}")
    return total


def _dims_product(dims: Any, names: tuple[str, ...], index: int) -> int:
    if not isinstance(dims, dict):
        raise InvalidLayerError(f"layers[{index}]: dims must be an object")
    product = 1
    for name in names:
        value = dims.get(name)
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            raise InvalidLayerError(f"layers[{index}].dims.{name}: positive integer required")
        product *= value
    return product


class _Checker:
    """Collects schema problems as JSON-path strings."""

    def __init__(self, doc: Any, allowed: dict[str, bool]):
        self.problems: list[str] = []
        if not isinstance(doc, dict):
            self.problems.append("manifest must be a JSON object")
            self.doc: dict = {}
            return
        self.doc = doc
        for key in doc:
            if key not in allowed:
                self.problems.append(f"{key}: unknown field")
        for key, required in allowed.items():
            if required and key not in doc:
                self.problems.append(f"{key}: required field missing")

    def fail(self, path: str, message: str) -> None:
        self.problems.append(f"{path}: {message}")

    def str_field(self, key: str, default: str | None = None) -> str | None:
        value = self.doc.get(key, default)
        if value is default:
            return default
        if not isinstance(value, str) or not value:
            self.fail(key, "non-empty string required")
            return default
        return value

    def positive_number(self, key: str) -> Decimal | None:
        value = self.doc.get(key)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            self.fail(key, "number required")
            return None
        try:
            dec = Decimal(str(value))
        except InvalidOperation:
            self.fail(key, "number required")
            return None
        if dec <= 0:
            self.fail(key, "must be > 0")
            return None
        return dec

    def raise_if_failed(self) -> None:
        if self.problems:
            raise ManifestSchemaError(self.problems)


_MODEL_FIELDS = {
    "uuid": True,
    "name": True,
    "description": True,
    "category": False,
    "created": False,
    "inputs": True,
    "macs": False,
    "layers": False,
    "minRamKb": True,
    "minFlashKb": True,
    "metrics": False,
}

_DEVICE_FIELDS = {
    "id": True,
    "name": True,
    "sensors": True,
    "ramKb": True,
    "flashKb": True,
    "runtimePlatform": False,
    "datapoints": False,
}

KNOWN_RUNTIME_PLATFORMS = ("none", "npu", "generic-c")


def _parse_inputs(check: _Checker) -> list[tuple[Iri, tuple[int, ...] | None]]:
    inputs = check.doc.get("inputs")
    parsed: list[tuple[Iri, tuple[int, ...] | None]] = []
    if not isinstance(inputs, list):
        check.fail("inputs", "list required")
        return parsed
    for i, item in enumerate(inputs):
        if not isinstance(item, dict):
            check.fail(f"inputs[{i}]", "object required")
            continue
        for key in item:
            if key not in ("sensor", "shape"):
                check.fail(f"inputs[{i}].{key}", "unknown field")
        sensor = item.get("sensor")
        if not isinstance(sensor, str):
            check.fail(f"inputs[{i}].sensor", "string required")
            continue
        sensor_class = vocab.resolve_sensor_class(sensor)
        if sensor_class is None:
            check.fail(f"inputs[{i}].sensor", f"unknown sensor class {sensor!r}")
            continue
        shape = item.get("shape")
        dims: tuple[int, ...] | None = None
        if shape is not None:
            if not isinstance(shape, list) or not all(
                isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in shape
            ):
                check.fail(f"inputs[{i}].shape", "list of positive integers required")
            else:
                dims = tuple(shape)
        parsed.append((sensor_class, dims))
    return parsed


def _resolve_macs(check: _Checker) -> int:
    explicit = check.doc.get("macs")
    layers = check.doc.get("layers")
    if explicit is None and layers is None:
        check.fail("macs", "either macs or layers is required")
        return 0
    computed: int | None = None
    if layers is not None:
        if not isinstance(layers, list):
            check.fail("layers", "list required")
        else:
            try:
                computed = compute_macs(layers)
            except InvalidLayerError as exc:
                check.fail("layers", exc.message)
    if explicit is not None:
        if not isinstance(explicit, int) or isinstance(explicit, bool) or explicit < 0:
            check.fail("macs", "non-negative integer required")
            return 0
        if computed is not None and computed != explicit:
            check.fail("macs", f"disagrees with layers (stated {explicit}, computed {computed})")
        return explicit
    return computed or 0


def compile_model_manifest(manifest: dict) -> Graph:
    """Compile a model manifest into its per-entity RDF graph.

    The emitted shape is exactly what the model-discovery query matches:
    typed NeuralNetwork node, identifier/description, one input node per
    sensor (with the providing sensor node typed by its class), MACs, and a
    RAM/Flash requirement condition pair in kilobytes.
    """
    check = _Checker(manifest, _MODEL_FIELDS)
    uuid = check.str_field("uuid")
    name = check.str_field("name")
    description = check.str_field("description")
    category = check.str_field("category", default=None)
    created = check.str_field("created", default=None)
    inputs = _parse_inputs(check)
    macs = _resolve_macs(check)
    min_ram = check.positive_number("minRamKb")
    min_flash = check.positive_number("minFlashKb")
    metrics = check.doc.get("metrics", {})
    if not isinstance(metrics, dict) or not all(
        isinstance(k, str) and isinstance(v, (int, float)) and not isinstance(v, bool)
        for k, v in metrics.items()
    ):
        check.fail("metrics", "object of name -> number required")
        metrics = {}
    check.raise_if_failed()
    assert uuid and name and description and min_ram and min_flash

    model = Iri(MODEL_NS + uuid)
    graph = Graph(model)
    add = graph.add
    add(Triple(model, RDF_TYPE, vocab.NEURAL_NETWORK))
    add(Triple(model, vocab.IDENTIFIER, string(uuid)))
    add(Triple(model, vocab.NAME, string(name)))
    add(Triple(model, vocab.DESCRIPTION, string(description)))
    if category:
        add(Triple(model, vocab.HAS_CATEGORY, string(category)))
    if created:
        add(Triple(model, vocab.DATE_CREATED, Literal(created, XSD_DATE)))
    add(Triple(model, vocab.HAS_MACS, integer(macs)))

    for i, (sensor_class, shape) in enumerate(inputs):
        input_node = Iri(f"{model.value}/input/{i}")
        sensor_node = Iri(f"{model.value}/sensor/{i}")
        add(Triple(model, vocab.HAS_INPUT, input_node))
        add(Triple(sensor_node, vocab.PROVIDE_INPUT, input_node))
        add(Triple(sensor_node, RDF_TYPE, sensor_class))
        parent = vocab.SUBCLASS_OF.get(sensor_class)
        if parent is not None:
            # materialized one step up so plain graph patterns see the superclass
            add(Triple(sensor_node, RDF_TYPE, parent))
        if shape is not None:
            add(Triple(input_node, vocab.HAS_INPUT_SHAPE, string(",".join(map(str, shape)))))

    for condition_class, amount, tail in ((vocab.RAM, min_ram, "ram"), (vocab.FLASH, min_flash, "flash")):
        feature = Iri(f"{model.value}/feature/{tail}")
        condition = Iri(f"{model.value}/condition/{tail}")
        add(Triple(model, vocab.HAS_PROCEDURE_FEATURE, feature))
        add(Triple(feature, vocab.IN_CONDITION, condition))
        add(Triple(condition, RDF_TYPE, condition_class))
        add(Triple(condition, vocab.MIN_VALUE, decimal(amount)))
        add(Triple(condition, vocab.UNIT_CODE, vocab.KILOBYTE))

    for metric_name in sorted(metrics):
        node = Iri(f"{model.value}/metric/{metric_name}")
        add(Triple(model, vocab.HAS_METRIC, node))
        add(Triple(node, vocab.NAME, string(metric_name)))
        add(Triple(node, vocab.VALUE, decimal(Decimal(str(metrics[metric_name])))))
    return graph


def compile_device_manifest(manifest: dict) -> Graph:
    """Compile a device manifest into its per-entity RDF graph (the
    device-discovery query shape: SmartSensor with sensor subsystems and a
    microcontroller whose capability carries RAM/Flash values)."""
    check = _Checker(manifest, _DEVICE_FIELDS)
    device_id = check.str_field("id")
    name = check.str_field("name")
    ram = check.positive_number("ramKb")
    flash = check.positive_number("flashKb")
    platform = check.doc.get("runtimePlatform", "none")
    if platform not in KNOWN_RUNTIME_PLATFORMS:
        check.fail("runtimePlatform", f"must be one of {', '.join(KNOWN_RUNTIME_PLATFORMS)}")

    sensors = check.doc.get("sensors")
    sensor_classes: list[Iri] = []
    if not isinstance(sensors, list):
        check.fail("sensors", "list required")
    else:
        for i, sensor in enumerate(sensors):
            if not isinstance(sensor, str):
                check.fail(f"sensors[{i}]", "string required")
                continue
            sensor_class = vocab.resolve_sensor_class(sensor)
            if sensor_class is None:
                check.fail(f"sensors[{i}]", f"unknown sensor class {sensor!r}")
                continue
            sensor_classes.append(sensor_class)

    datapoints = check.doc.get("datapoints", [])
    parsed_dps: list[tuple[str, Iri, str]] = []
    if not isinstance(datapoints, list):
        check.fail("datapoints", "list required")
    else:
        seen_roles: set[str] = set()
        for i, dp in enumerate(datapoints):
            if not isinstance(dp, dict):
                check.fail(f"datapoints[{i}]", "object required")
                continue
            for key in dp:
                if key not in ("role", "semanticType", "address"):
                    check.fail(f"datapoints[{i}].{key}", "unknown field")
            role, semantic_type, address = dp.get("role"), dp.get("semanticType"), dp.get("address")
            if not isinstance(role, str) or not role:
                check.fail(f"datapoints[{i}].role", "non-empty string required")
                continue
            if role in seen_roles:
                check.fail(f"datapoints[{i}].role", f"duplicate role {role!r}")
                continue
            seen_roles.add(role)
            type_iri = _datapoint_type(semantic_type)
            if type_iri is None:
                check.fail(f"datapoints[{i}].semanticType", "IRI or iot type name required")
                continue
            if not isinstance(address, str) or not address:
                check.fail(f"datapoints[{i}].address", "non-empty string required")
                continue
            parsed_dps.append((role, type_iri, address))
    check.raise_if_failed()
    assert device_id and name and ram and flash

    device = Iri(DEVICE_NS + device_id)
    graph = Graph(device)
    add = graph.add
    add(Triple(device, RDF_TYPE, vocab.SMART_SENSOR))
    add(Triple(device, vocab.IDENTIFIER, string(device_id)))
    add(Triple(device, vocab.NAME, string(name)))
    add(Triple(device, vocab.RUNTIME_PLATFORM, string(platform)))

    for i, sensor_class in enumerate(sensor_classes):
        sensor_node = Iri(f"{device.value}/sensor/{i}")
        add(Triple(device, vocab.HAS_SUBSYSTEM, sensor_node))
        add(Triple(sensor_node, RDF_TYPE, sensor_class))
        parent = vocab.SUBCLASS_OF.get(sensor_class)
        if parent is not None:
            add(Triple(sensor_node, RDF_TYPE, parent))

    mcu = Iri(f"{device.value}/mcu")
    capability = Iri(f"{device.value}/capability")
    add(Triple(device, vocab.HAS_SUBSYSTEM, mcu))
    add(Triple(mcu, RDF_TYPE, vocab.MICRO_CONTROLLER))
    add(Triple(mcu, vocab.HAS_SYSTEM_CAPABILITY, capability))
    for condition_class, amount, tail in ((vocab.RAM, ram, "ram"), (vocab.FLASH, flash, "flash")):
        prop = Iri(f"{device.value}/property/{tail}")
        add(Triple(capability, vocab.HAS_SYSTEM_PROPERTY, prop))
        add(Triple(prop, RDF_TYPE, condition_class))
        add(Triple(prop, vocab.VALUE, decimal(amount)))
        add(Triple(prop, vocab.UNIT_CODE, vocab.KILOBYTE))

    for role, type_iri, address in parsed_dps:
        node = Iri(f"{device.value}/datapoint/{role}")
        add(Triple(device, vocab.HAS_DATAPOINT, node))
        add(Triple(node, vocab.DATAPOINT_ROLE, string(role)))
        add(Triple(node, vocab.DATAPOINT_TYPE, type_iri))
        add(Triple(node, vocab.DATAPOINT_ADDRESS, string(address)))
    return graph


def _datapoint_type(value: Any) -> Iri | None:
    if not isinstance(value, str) or not value:
        return None
    if ":" in value:
        try:
            return Iri(value)
        except ValueError:
            return None
    return Iri(vocab.IOT + value)
