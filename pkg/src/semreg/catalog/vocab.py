"""Vocabulary constants: namespaces, term IRIs, sensor taxonomy, units.

Namespace strings are kept exactly as the upstream ontology publishes them
(including ``https://schema.org`` without a trailing slash); every compiler,
query and fixture goes through these constants, so the graph stays
self-consistent.
"""

from __future__ import annotations

from decimal import Decimal

from ..rdf import Iri, PrefixMap, RDF, XSD

NNET = "http://tinyml-schema.org/networkschema/"
SCHEMA = "https://schema.org"
OM = "http://www.ontology-of-units-of-measure.org/resource/om-2/"
SSN = "http://www.w3.org/ns/ssn/"
SSN_SYSTEM = "http://www.w3.org/ns/ssn/systems/"
S3N = "http://w3id.org/s3n/"
SOSA_EXTEND = "http://tinyml-schema.org/sosa_extend#"
SSN_EXTEND = "http://tinyml-schema.org/ssn_extend#"
S3N_EXTEND = "http://tinyml-schema.org/s3n_extend#"
IOT = "http://iotschema.org/"
REG = "http://semreg.example/vocab#"

MODEL_NS = "http://semreg.example/models/"
DEVICE_NS = "http://semreg.example/devices/"
GRAPH_NS = "http://semreg.example/graphs/"

# nnet
NEURAL_NETWORK = Iri(NNET + "NeuralNetwork")
HAS_MACS = Iri(NNET + "hasMultiplyAccumulateOps")
HAS_CATEGORY = Iri(NNET + "hasCategory")
HAS_INPUT_SHAPE = Iri(NNET + "hasInputShape")
HAS_METRIC = Iri(NNET + "hasMetric")

# schema
IDENTIFIER = Iri(SCHEMA + "identifier")
NAME = Iri(SCHEMA + "name")
DESCRIPTION = Iri(SCHEMA + "description")
MIN_VALUE = Iri(SCHEMA + "minValue")
VALUE = Iri(SCHEMA + "value")
UNIT_CODE = Iri(SCHEMA + "unitCode")
DATE_CREATED = Iri(SCHEMA + "dateCreated")

# om units
KILOBYTE = Iri(OM + "kilobyte")
MEGABYTE = Iri(OM + "megabyte")
BYTE = Iri(OM + "byte")

# ssn / ssn-system
HAS_INPUT = Iri(SSN + "hasInput")
HAS_SUBSYSTEM = Iri(SSN + "hasSubSystem")
IN_CONDITION = Iri(SSN_SYSTEM + "inCondition")
HAS_SYSTEM_PROPERTY = Iri(SSN_SYSTEM + "hasSystemProperty")

# s3n
SMART_SENSOR = Iri(S3N + "SmartSensor")
MICRO_CONTROLLER = Iri(S3N + "MicroController")
HAS_PROCEDURE_FEATURE = Iri(S3N + "hasProcedureFeature")
HAS_SYSTEM_CAPABILITY = Iri(S3N + "hasSystemCapability")

# s3n_extend
RAM = Iri(S3N_EXTEND + "RAM")
FLASH = Iri(S3N_EXTEND + "Flash")

# sosa_extend sensor taxonomy
CAMERA = Iri(SOSA_EXTEND + "Camera")
DEPTH_CAMERA = Iri(SOSA_EXTEND + "DepthCamera")
ACCELEROMETER = Iri(SOSA_EXTEND + "Accelerometer")
GYROSCOPE = Iri(SOSA_EXTEND + "Gyroscope")
MICROPHONE = Iri(SOSA_EXTEND + "Microphone")
THERMOMETER = Iri(SOSA_EXTEND + "Thermometer")

# ssn_extend
PROVIDE_INPUT = Iri(SSN_EXTEND + "provideInput")

# iot datapoint semantic types
CLASSIFICATION_RESULT = Iri(IOT + "ClassificationResult")
TEMPERATURE_MEASUREMENT = Iri(IOT + "TemperatureMeasurement")
VIBRATION_MEASUREMENT = Iri(IOT + "VibrationMeasurement")

# registry plumbing (runtime platform, datapoints)
RUNTIME_PLATFORM = Iri(REG + "runtimePlatform")
HAS_DATAPOINT = Iri(REG + "hasDatapoint")
DATAPOINT_ROLE = Iri(REG + "role")
DATAPOINT_TYPE = Iri(REG + "semanticType")
DATAPOINT_ADDRESS = Iri(REG + "address")

SENSOR_CLASSES = frozenset({CAMERA, DEPTH_CAMERA, ACCELEROMETER, GYROSCOPE, MICROPHONE, THERMOMETER})

# one-step subclass table: key is the subclass, value the class it satisfies
SUBCLASS_OF: dict[Iri, Iri] = {DEPTH_CAMERA: CAMERA}

UNIT_TO_KILOBYTES: dict[Iri, Decimal] = {
    KILOBYTE: Decimal(1),
    MEGABYTE: Decimal(1024),
    BYTE: Decimal(1) / Decimal(1024),
}

PREFIXES = PrefixMap(
    {
        "rdf": RDF,
        "xsd": XSD,
        "nnet": NNET,
        "schema": SCHEMA,
        "om": OM,
        "ssn": SSN,
        "ssn-system": SSN_SYSTEM,
        "s3n": S3N,
        "sosa_extend": SOSA_EXTEND,
        "ssn_extend": SSN_EXTEND,
        "s3n_extend": S3N_EXTEND,
        "iot": IOT,
        "reg": REG,
    }
)


def sensor_class_satisfies(actual: Iri, required: Iri) -> bool:
    """True when a sensor of class `actual` covers a requirement for `required`."""
    return actual == required or SUBCLASS_OF.get(actual) == required


def satisfies_all(actual_classes: set[Iri], required_classes: set[Iri]) -> bool:
    return all(
        any(sensor_class_satisfies(a, r) for a in actual_classes) for r in required_classes
    )


def resolve_sensor_class(name: str) -> Iri | None:
    """Resolve a manifest sensor reference (IRI or bare class name)."""
    if ":" in name:
        try:
            iri = Iri(name)
        except ValueError:
            return None
        return iri if iri in SENSOR_CLASSES else None
    candidate = Iri(SOSA_EXTEND + name)
    return candidate if candidate in SENSOR_CLASSES else None


def graph_iri(name: str) -> Iri:
    """Graph IRI for a short graph name; absolute IRIs pass through."""
    try:
        return Iri(name)
    except ValueError:
        return Iri(GRAPH_NS + name)
