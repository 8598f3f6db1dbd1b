"""Descriptor extraction from the knowledge graph, and graph validation.

Extraction is forgiving at the dataset level: an entity that fails a required
field is skipped and reported as a Violation, so one bad registration never
takes down discovery. All capacities are canonicalized to kilobytes.
"""

from __future__ import annotations

from decimal import Decimal

from ..rdf import Dataset, Graph, Iri, Literal, RDF_TYPE, Term
from . import vocab
from .descriptors import (
    Datapoint,
    DeviceDescriptor,
    ModelInput,
    NeuralNetworkDescriptor,
    Violation,
)
from .manifests import KNOWN_RUNTIME_PLATFORMS


def _literal_str(dataset: Dataset, subject: Term, predicate: Iri) -> str | None:
    for t in dataset.match(subject, predicate, None):
        if isinstance(t.object, Literal):
            return t.object.lexical
    return None


def _objects(dataset: Dataset, subject: Term, predicate: Iri) -> list[Term]:
    return [t.object for t in dataset.match(subject, predicate, None)]


def _capacity_kb(
    dataset: Dataset, condition: Term, value_predicate: Iri
) -> tuple[Decimal | None, str | None]:
    """(kilobytes, problem-rule) for a RAM/Flash condition node."""
    value_literal = None
    for t in dataset.match(condition, value_predicate, None):
        if isinstance(t.object, Literal):
            value_literal = t.object
            break
    if value_literal is None:
        return None, "missing-capacity"
    amount = value_literal.numeric_value()
    if amount is None:
        return None, "invalid-number"
    units = _objects(dataset, condition, vocab.UNIT_CODE)
    unit = units[0] if units else vocab.KILOBYTE
    factor = vocab.UNIT_TO_KILOBYTES.get(unit)  # type: ignore[arg-type]
    if factor is None:
        return None, "unknown-unit"
    kb = amount * factor
    if kb <= 0:
        return None, "non-positive-capacity"
    return kb, None


def _conditions_by_class(
    dataset: Dataset, entity: Term, feature_predicate: Iri, condition_predicate: Iri
) -> dict[Iri, Term]:
    """condition-class (RAM/Flash) → condition node, via the feature hop."""
    found: dict[Iri, Term] = {}
    for feature in _objects(dataset, entity, feature_predicate):
        for condition in _objects(dataset, feature, condition_predicate):
            for t in dataset.match(condition, RDF_TYPE, None):
                if t.object in (vocab.RAM, vocab.FLASH) and t.object not in found:
                    found[t.object] = condition  # type: ignore[index]
    return found


def _most_specific_classes(classes: set[Iri]) -> list[Iri]:
    """Drop classes that are only present as a materialized superclass."""
    parents = {vocab.SUBCLASS_OF[c] for c in classes if c in vocab.SUBCLASS_OF}
    return sorted(c for c in classes if c not in parents)


def _sensor_class_of(dataset: Dataset, node: Term) -> Iri | None:
    classes = {
        t.object
        for t in dataset.match(node, RDF_TYPE, None)
        if isinstance(t.object, Iri) and t.object in vocab.SENSOR_CLASSES
    }
    specific = _most_specific_classes(classes)  # type: ignore[arg-type]
    return specific[0] if specific else None


def _extract_model(
    dataset: Dataset, subject: Term
) -> tuple[NeuralNetworkDescriptor | None, list[Violation]]:
    iri = subject.value if isinstance(subject, Iri) else repr(subject)
    violations: list[Violation] = []

    uuid = _literal_str(dataset, subject, vocab.IDENTIFIER)
    if uuid is None:
        return None, [Violation(iri, "missing-identifier", "model has no identifier")]
    description = _literal_str(dataset, subject, vocab.DESCRIPTION)
    if description is None:
        return None, [Violation(iri, "missing-description", f"model {uuid} has no description")]

    macs_text = _literal_str(dataset, subject, vocab.HAS_MACS)
    if macs_text is None:
        return None, [Violation(iri, "missing-macs", f"model {uuid} has no multiply-accumulate count")]
    try:
        macs = int(macs_text)
    except ValueError:
        return None, [Violation(iri, "invalid-number", f"model {uuid}: bad MACs value {macs_text!r}")]
    if macs < 0:
        return None, [Violation(iri, "invalid-number", f"model {uuid}: negative MACs")]

    conditions = _conditions_by_class(dataset, subject, vocab.HAS_PROCEDURE_FEATURE, vocab.IN_CONDITION)
    capacities: dict[Iri, Decimal] = {}
    for condition_class in (vocab.RAM, vocab.FLASH):
        node = conditions.get(condition_class)
        if node is None:
            return None, [
                Violation(iri, "missing-capacity", f"model {uuid}: no {condition_class.local_name()} requirement")
            ]
        kb, problem = _capacity_kb(dataset, node, vocab.MIN_VALUE)
        if problem is not None:
            return None, [Violation(iri, problem, f"model {uuid}: bad {condition_class.local_name()} requirement")]
        capacities[condition_class] = kb  # type: ignore[assignment]

    inputs = []
    for input_node in _objects(dataset, subject, vocab.HAS_INPUT):
        sensor_class = None
        for t in dataset.match(None, vocab.PROVIDE_INPUT, input_node):
            sensor_class = _sensor_class_of(dataset, t.subject)
            if sensor_class is not None:
                break
        if sensor_class is None:
            return None, [
                Violation(iri, "unknown-sensor-class", f"model {uuid}: input without a recognized sensor class")
            ]
        shape_text = _literal_str(dataset, input_node, vocab.HAS_INPUT_SHAPE)
        shape = None
        if shape_text:
            try:
                shape = tuple(int(d) for d in shape_text.split(","))
            except ValueError:
                shape = None
        inputs.append((input_node, ModelInput(sensor_class, shape)))
    inputs.sort(key=lambda pair: pair[0].value if isinstance(pair[0], Iri) else repr(pair[0]))

    metrics: dict[str, Decimal] = {}
    for metric_node in _objects(dataset, subject, vocab.HAS_METRIC):
        metric_name = _literal_str(dataset, metric_node, vocab.NAME)
        value_text = _literal_str(dataset, metric_node, vocab.VALUE)
        if metric_name and value_text is not None:
            try:
                metrics[metric_name] = Decimal(value_text)
            except ArithmeticError:
                pass

    descriptor = NeuralNetworkDescriptor(
        uuid=uuid,
        name=_literal_str(dataset, subject, vocab.NAME) or uuid,
        description=description,
        category=_literal_str(dataset, subject, vocab.HAS_CATEGORY) or "",
        inputs=tuple(inp for _, inp in inputs),
        macs=macs,
        min_ram_kb=capacities[vocab.RAM],
        min_flash_kb=capacities[vocab.FLASH],
        metrics=metrics,
        created=_literal_str(dataset, subject, vocab.DATE_CREATED),
        graph_iri=dataset.graph_of(subject),
    )
    return descriptor, violations


def _extract_device(
    dataset: Dataset, subject: Term
) -> tuple[DeviceDescriptor | None, list[Violation]]:
    iri = subject.value if isinstance(subject, Iri) else repr(subject)

    device_id = _literal_str(dataset, subject, vocab.IDENTIFIER)
    if device_id is None:
        return None, [Violation(iri, "missing-identifier", "device has no identifier")]

    platform = _literal_str(dataset, subject, vocab.RUNTIME_PLATFORM) or "none"
    if platform not in KNOWN_RUNTIME_PLATFORMS:
        return None, [
            Violation(iri, "unknown-runtime-platform", f"device {device_id}: platform {platform!r} not registered")
        ]

    sensor_classes: set[Iri] = set()
    mcu = None
    for node in _objects(dataset, subject, vocab.HAS_SUBSYSTEM):
        sensor_class = _sensor_class_of(dataset, node)
        if sensor_class is not None:
            sensor_classes.add(sensor_class)
        elif any(dataset.match(node, RDF_TYPE, vocab.MICRO_CONTROLLER)):
            mcu = node

    conditions: dict[Iri, Term] = {}
    if mcu is not None:
        for capability in _objects(dataset, mcu, vocab.HAS_SYSTEM_CAPABILITY):
            for prop in _objects(dataset, capability, vocab.HAS_SYSTEM_PROPERTY):
                for t in dataset.match(prop, RDF_TYPE, None):
                    if t.object in (vocab.RAM, vocab.FLASH) and t.object not in conditions:
                        conditions[t.object] = prop  # type: ignore[index]

    capacities: dict[Iri, Decimal] = {}
    for condition_class in (vocab.RAM, vocab.FLASH):
        node = conditions.get(condition_class)
        if node is None:
            return None, [
                Violation(iri, "missing-capacity", f"device {device_id}: no {condition_class.local_name()} capacity")
            ]
        kb, problem = _capacity_kb(dataset, node, vocab.VALUE)
        if problem is not None:
            return None, [Violation(iri, problem, f"device {device_id}: bad {condition_class.local_name()} capacity")]
        capacities[condition_class] = kb  # type: ignore[assignment]

    datapoints = []
    roles_seen: set[str] = set()
    for node in sorted(
        _objects(dataset, subject, vocab.HAS_DATAPOINT),
        key=lambda n: n.value if isinstance(n, Iri) else repr(n),
    ):
        role = _literal_str(dataset, node, vocab.DATAPOINT_ROLE)
        address = _literal_str(dataset, node, vocab.DATAPOINT_ADDRESS)
        semantic_type = next(
            (t.object for t in dataset.match(node, vocab.DATAPOINT_TYPE, None) if isinstance(t.object, Iri)),
            None,
        )
        if not role or not address or semantic_type is None:
            continue
        if role in roles_seen:
            return None, [
                Violation(iri, "duplicate-datapoint-role", f"device {device_id}: duplicate datapoint role {role!r}")
            ]
        roles_seen.add(role)
        datapoints.append(Datapoint(role, semantic_type, address))

    descriptor = DeviceDescriptor(
        id=device_id,
        name=_literal_str(dataset, subject, vocab.NAME) or device_id,
        sensor_classes=frozenset(sensor_classes),
        ram_kb=capacities[vocab.RAM],
        flash_kb=capacities[vocab.FLASH],
        runtime_platform=platform,
        datapoints=tuple(datapoints),
        graph_iri=dataset.graph_of(subject),
    )
    return descriptor, []


def extract_models(dataset: Dataset) -> tuple[list[NeuralNetworkDescriptor], list[Violation]]:
    """One descriptor per NeuralNetwork subject, sorted by uuid; entities that
    fail required-field extraction are skipped and reported."""
    descriptors: list[NeuralNetworkDescriptor] = []
    violations: list[Violation] = []
    seen: dict[str, str] = {}
    for subject in dataset.subjects_of_type(vocab.NEURAL_NETWORK):
        descriptor, problems = _extract_model(dataset, subject)
        violations.extend(problems)
        if descriptor is None:
            continue
        if descriptor.uuid in seen:
            iri = subject.value if isinstance(subject, Iri) else repr(subject)
            violations.append(
                Violation(iri, "duplicate-identifier", f"uuid {descriptor.uuid!r} already used by {seen[descriptor.uuid]}")
            )
            continue
        seen[descriptor.uuid] = descriptor.graph_iri.value if descriptor.graph_iri else ""
        descriptors.append(descriptor)
    descriptors.sort(key=lambda d: d.uuid)
    return descriptors, violations


def extract_devices(dataset: Dataset) -> tuple[list[DeviceDescriptor], list[Violation]]:
    descriptors: list[DeviceDescriptor] = []
    violations: list[Violation] = []
    seen: dict[str, str] = {}
    for subject in dataset.subjects_of_type(vocab.SMART_SENSOR):
        descriptor, problems = _extract_device(dataset, subject)
        violations.extend(problems)
        if descriptor is None:
            continue
        if descriptor.id in seen:
            iri = subject.value if isinstance(subject, Iri) else repr(subject)
            violations.append(
                Violation(iri, "duplicate-identifier", f"device id {descriptor.id!r} already used")
            )
            continue
        seen[descriptor.id] = descriptor.id
        descriptors.append(descriptor)
    descriptors.sort(key=lambda d: d.id)
    return descriptors, violations


def validate(graph: Graph, kind: str) -> list[Violation]:
    """Conformance check for a single entity graph; [] means conformant.

    `kind` is "model" or "device". Violations are data, not errors: unknown
    units, non-positive capacities, unknown sensor classes and missing
    required properties all land in the returned list.
    """
    if kind not in ("model", "device"):
        raise ValueError("kind must be 'model' or 'device'")
    dataset = Dataset([graph])
    violations: list[Violation] = []
    entity_type = vocab.NEURAL_NETWORK if kind == "model" else vocab.SMART_SENSOR
    extract_one = _extract_model if kind == "model" else _extract_device
    for subject in dataset.subjects_of_type(entity_type):
        descriptor, problems = extract_one(dataset, subject)
        violations.extend(problems)
        if descriptor is None:
            continue
        # extraction tolerates unknown sensor nodes on devices; flag them here
        if kind == "device":
            for node in _objects(dataset, subject, vocab.HAS_SUBSYSTEM):
                types = {
                    t.object for t in dataset.match(node, RDF_TYPE, None) if isinstance(t.object, Iri)
                }
                if not types & (vocab.SENSOR_CLASSES | {vocab.MICRO_CONTROLLER}):
                    violations.append(
                        Violation(
                            subject.value if isinstance(subject, Iri) else repr(subject),
                            "unknown-sensor-class",
                            f"subsystem {node!r} has no recognized class",
                        )
                    )
    return violations
