"""Project-bundle generation from a matched (model, device) pair.

Targets are pluggable: each declares its output file manifest, the per-file
user config fields, and mustache-style templates with no logic (loops are
pre-expanded into plain placeholder values by the generator). Rendering is
deterministic given the snapshot, the config and a fixed clock; generated
file contents carry no timestamp, only bundle metadata does.
"""

from __future__ import annotations

import io
import re
import zipfile
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Callable

from ..catalog import DeviceDescriptor, NeuralNetworkDescriptor, extract_devices, extract_models
from ..errors import (
    IncompatibleTargetError,
    InvalidConfigError,
    MissingConfigError,
    NotCompatibleError,
    TemplateError,
    UnknownDeviceError,
    UnknownModelError,
    UnknownTargetError,
)
from ..matchmaker import devices_for_model
from ..rdf import Dataset

_TEMPLATE_DIR = Path(__file__).parent / "templates"
_PLACEHOLDER = re.compile(r"\{\{(\w+)\}\}")

BASELINE_TRADITIONAL_LOC = 766
BASELINE_TEMPLATE_LOC = 38


@dataclass(frozen=True)
class ConfigField:
    name: str
    description: str
    value_type: str  # string | integer | decimal | enum
    required: bool = True
    default: object | None = None
    choices: tuple[str, ...] = ()
    file: str = ""

    def __post_init__(self):
        if self.required and self.default is not None:
            raise ValueError(f"required field {self.name} cannot carry a default")

    def to_json(self) -> dict:
        out: dict = {
            "name": self.name,
            "description": self.description,
            "valueType": self.value_type,
            "required": self.required,
            "file": self.file,
        }
        if self.default is not None:
            out["default"] = self.default
        if self.choices:
            out["choices"] = list(self.choices)
        return out


@dataclass(frozen=True)
class TargetDescriptor:
    target_id: str
    display_name: str
    compatible_runtime_platforms: frozenset[str]
    file_manifest: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "targetId": self.target_id,
            "displayName": self.display_name,
            "compatibleRuntimePlatforms": sorted(self.compatible_runtime_platforms),
            "fileManifest": list(self.file_manifest),
        }


@dataclass(frozen=True)
class EffortReport:
    user_input_count: int
    generated_line_count: int
    baseline_traditional: int = BASELINE_TRADITIONAL_LOC
    baseline_template: int = BASELINE_TEMPLATE_LOC

    @property
    def reduction_vs_traditional(self) -> float:
        return self.baseline_traditional / self.user_input_count

    @property
    def reduction_vs_template(self) -> float:
        return self.baseline_template / self.user_input_count

    def to_json(self) -> dict:
        return {
            "userInputCount": self.user_input_count,
            "generatedLineCount": self.generated_line_count,
            "baselineTraditional": self.baseline_traditional,
            "baselineTemplate": self.baseline_template,
            "reductionVsTraditional": self.reduction_vs_traditional,
            "reductionVsTemplate": self.reduction_vs_template,
        }


@dataclass(frozen=True)
class ProjectBundle:
    files: dict[str, str]
    metadata: dict

    def to_json(self) -> dict:
        return {"files": dict(self.files), "metadata": dict(self.metadata)}


@dataclass(frozen=True)
class Target:
    descriptor: TargetDescriptor
    config_fields: tuple[ConfigField, ...]

    def fields_for_file(self, filename: str) -> list[ConfigField]:
        return [f for f in self.config_fields if f.file == filename]


_NPU_FIELDS = (
    ConfigField("model_slot", "Slot index the model occupies on the NPU module", "integer", file="npu_app.conf"),
    ConfigField("input_source", "Camera feed the module reads", "enum", choices=("usb_camera", "ip_camera"), file="npu_app.conf"),
    ConfigField("execution_mode", "Run inference continuously or on PLC trigger", "enum", choices=("continuous", "triggered"), file="npu_app.conf"),
    ConfigField("confidence_threshold", "Reject classifications scoring below this (0..1)", "decimal", file="npu_app.conf"),
    ConfigField("class_labels", "Comma-separated class labels in model output order", "string", file="main.py"),
    ConfigField("reject_label", "Label reported when confidence is below threshold", "string", file="main.py"),
    ConfigField("preprocess_width", "Frame width fed to the model", "integer", file="main.py"),
    ConfigField("preprocess_height", "Frame height fed to the model", "integer", file="main.py"),
    ConfigField("output_variable_name", "Variable name published to the PLC", "string", file="main.py"),
    ConfigField("polling_interval_ms", "Delay between inferences", "integer", file="main.py"),
    ConfigField("struct_name", "User data type name for PLC/NPU exchange", "string", file="DataTypes.udt"),
    ConfigField("function_block_name", "Function block name in the PLC program", "string", file="fbLogic.scl"),
    ConfigField("data_block_name", "Data block storing the latest results", "string", file="ControlData.db"),
)

_GENERIC_C_FIELDS = (
    ConfigField("model_symbol_name", "C symbol the compiled model is linked as", "string", file="model_config.h"),
    ConfigField("entry_function_name", "Entry function for the firmware loop", "string", file="main.c"),
    ConfigField("loop_delay_ms", "Delay between loop iterations", "integer", file="main.c"),
)

_TARGETS: dict[str, Target] = {
    "npu": Target(
        TargetDescriptor(
            target_id="npu",
            display_name="PLC NPU module project",
            compatible_runtime_platforms=frozenset({"npu"}),
            file_manifest=("npu_app.conf", "main.py", "DataTypes.udt", "fbLogic.scl", "ControlData.db"),
        ),
        _NPU_FIELDS,
    ),
    "generic-c": Target(
        TargetDescriptor(
            target_id="generic-c",
            display_name="Generic C firmware skeleton",
            compatible_runtime_platforms=frozenset({"generic-c"}),
            file_manifest=("model_config.h", "main.c"),
        ),
        _GENERIC_C_FIELDS,
    ),
}


def list_targets() -> list[TargetDescriptor]:
    return [target.descriptor for target in _TARGETS.values()]


def get_target(target_id: str) -> Target:
    target = _TARGETS.get(target_id)
    if target is None:
        raise UnknownTargetError(target_id)
    return target


def _resolve_pair(
    dataset: Dataset, model_uuid: str, device_id: str
) -> tuple[NeuralNetworkDescriptor, DeviceDescriptor]:
    models, _ = extract_models(dataset)
    model = next((m for m in models if m.uuid == model_uuid), None)
    if model is None:
        raise UnknownModelError(model_uuid)
    devices, _ = extract_devices(dataset)
    device = next((d for d in devices if d.id == device_id), None)
    if device is None:
        raise UnknownDeviceError(device_id)
    return model, device


def required_config(dataset: Dataset, target_id: str, model_uuid: str, device_id: str) -> list[ConfigField]:
    """Config fields the user must supply for this target/pair."""
    target = get_target(target_id)
    _, device = _resolve_pair(dataset, model_uuid, device_id)
    if device.runtime_platform not in target.descriptor.compatible_runtime_platforms:
        raise IncompatibleTargetError(
            f"device {device_id!r} runs platform {device.runtime_platform!r}, "
            f"target {target_id!r} needs one of {sorted(target.descriptor.compatible_runtime_platforms)}"
        )
    return list(target.config_fields)


def _coerce(field_spec: ConfigField, value) -> tuple[str | None, str | None]:
    """(rendered value, problem) for one config value."""
    if field_spec.value_type == "string":
        if not isinstance(value, str) or not value:
            return None, "non-empty string required"
        return value, None
    if field_spec.value_type == "integer":
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            return None, "integer required"
        try:
            return str(int(value)), None
        except ValueError:
            return None, "integer required"
    if field_spec.value_type == "decimal":
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            return None, "number required"
        try:
            return str(Decimal(str(value))), None
        except InvalidOperation:
            return None, "number required"
    if field_spec.value_type == "enum":
        if value not in field_spec.choices:
            return None, f"must be one of {', '.join(field_spec.choices)}"
        return str(value), None
    return None, f"unknown value type {field_spec.value_type!r}"


def _semantic_context(model: NeuralNetworkDescriptor, device: DeviceDescriptor) -> dict[str, str]:
    primary = model.inputs[0] if model.inputs else None
    shape = primary.shape if primary and primary.shape else ()
    return {
        "model_uuid": model.uuid,
        "model_name": model.name,
        "model_macs": str(model.macs),
        "model_min_ram_kb": _plain(model.min_ram_kb),
        "model_min_flash_kb": _plain(model.min_flash_kb),
        "sensor_class": primary.sensor_class.local_name() if primary else "none",
        "input_shape": ",".join(map(str, shape)) if shape else "none",
        "input_shape_tuple": (", ".join(map(str, shape)) + ("," if len(shape) == 1 else "")) if shape else "",
        "input_shape_c": ", ".join(map(str, shape)) if shape else "0",
        "device_id": device.id,
    }


def _plain(value: Decimal) -> str:
    return str(int(value)) if value == value.to_integral_value() else format(value.normalize(), "f")


def _expansions(config_values: dict[str, str]) -> dict[str, str]:
    """Pre-expanded loop values (the template language itself has no logic)."""
    out: dict[str, str] = {}
    labels = config_values.get("class_labels")
    if labels is not None:
        parts = [part.strip() for part in labels.split(",") if part.strip()]
        out["class_labels_python"] = ", ".join(f'"{part}"' for part in parts)
    return out


def _render(template_name: str, context: dict[str, str]) -> str:
    path = _TEMPLATE_DIR / template_name
    text = path.read_text(encoding="utf-8")

    def substitute(match: re.Match) -> str:
        key = match.group(1)
        if key not in context:
            raise TemplateError(f"{template_name}: no value for placeholder {{{{{key}}}}}")
        return context[key]

    rendered = _PLACEHOLDER.sub(substitute, text)
    if "{{" in rendered:
        raise TemplateError(f"{template_name}: unresolved placeholder residue")
    return rendered


_TEMPLATE_SUBDIR = {"npu": "npu", "generic-c": "generic_c"}


def generate(
    dataset: Dataset,
    model_uuid: str,
    device_id: str,
    target_id: str,
    config: dict,
    clock: Callable[[], datetime] | None = None,
) -> ProjectBundle:
    """Render the full project bundle for a compatible (model, device) pair.

    Raises MissingConfigError/InvalidConfigError for bad user input,
    NotCompatibleError when the matchmaker rejects the pair, TemplateError
    only on internal template/placeholder mismatch.
    """
    target = get_target(target_id)
    fields = required_config(dataset, target_id, model_uuid, device_id)
    model, device = _resolve_pair(dataset, model_uuid, device_id)

    missing = [f.name for f in fields if f.required and f.name not in config]
    if missing:
        raise MissingConfigError(missing)
    unknown = [name for name in config if all(f.name != name for f in fields)]
    problems = [f"{name}: not a config field of target {target_id!r}" for name in unknown]
    values: dict[str, str] = {}
    for field_spec in fields:
        if field_spec.name not in config:
            continue
        rendered, problem = _coerce(field_spec, config[field_spec.name])
        if problem:
            problems.append(f"{field_spec.name}: {problem}")
        else:
            values[field_spec.name] = rendered  # type: ignore[assignment]
    if problems:
        raise InvalidConfigError(problems)

    if not any(r.device_id == device_id for r in devices_for_model(dataset, model_uuid)):
        raise NotCompatibleError(
            f"model {model_uuid!r} cannot run on device {device_id!r} "
            "(resource or sensor requirements unsatisfied)"
        )

    context = dict(_semantic_context(model, device))
    context.update(values)
    context.update(_expansions(values))

    subdir = _TEMPLATE_SUBDIR[target_id]
    files = {
        filename: _render(f"{subdir}/{filename}.tpl", context)
        for filename in target.descriptor.file_manifest
    }
    now = clock() if clock is not None else datetime.now(timezone.utc)
    metadata = {
        "modelUuid": model.uuid,
        "deviceId": device.id,
        "targetId": target_id,
        "generatedAt": now.strftime("%Y-%m-%dT%H:%M:%SZ"),
    }
    return ProjectBundle(files=files, metadata=metadata)


def effort_report(bundle: ProjectBundle, config: dict) -> EffortReport:
    """Quantified engineering effort: supplied inputs vs generated lines,
    with the reduction ratios against the fixed baselines."""
    generated_lines = sum(
        sum(1 for line in content.splitlines() if line.strip())
        for content in bundle.files.values()
    )
    return EffortReport(user_input_count=len(config), generated_line_count=generated_lines)


def write_bundle(bundle: ProjectBundle, directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for filename, content in bundle.files.items():
        path = directory / filename
        path.write_text(content, encoding="utf-8")
        written.append(path)
    return written


def zip_bundle(bundle: ProjectBundle) -> bytes:
    """Deterministic zip of the bundle files (fixed DOS timestamp)."""
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", compression=zipfile.ZIP_DEFLATED) as archive:
        for filename in sorted(bundle.files):
            info = zipfile.ZipInfo(filename, date_time=(1980, 1, 1, 0, 0, 0))
            info.external_attr = 0o644 << 16
            archive.writestr(info, bundle.files[filename])
    return buffer.getvalue()
