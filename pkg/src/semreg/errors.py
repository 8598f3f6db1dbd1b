"""Exception hierarchy shared across the registry.

Every error carries a machine-readable ``code`` (stable across releases, used
verbatim by the HTTP error envelope and the CLI) next to its human message.
Class names avoid shadowing builtins, so the parse errors are
``TurtleSyntaxError`` / ``QuerySyntaxError`` while their code stays
``SyntaxError``.
"""

from __future__ import annotations

from typing import Any


class RegistryError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "RegistryError"

    def __init__(self, message: str, details: Any = None):
        super().__init__(message)
        self.message = message
        self.details = details


# --- rdf-core ---------------------------------------------------------------

class TurtleSyntaxError(RegistryError):
    code = "SyntaxError"

    def __init__(self, message: str, line: int, column: int, token: str | None = None):
        at = f"line {line}, column {column}"
        if token:
            at += f" near {token!r}"
        super().__init__(f"{message} ({at})", {"line": line, "column": column, "token": token})
        self.line = line
        self.column = column
        self.token = token


class UnknownPrefixError(RegistryError):
    code = "UnknownPrefixError"

    def __init__(self, prefix: str):
        super().__init__(f"undeclared prefix: {prefix!r}", {"prefix": prefix})
        self.prefix = prefix


class CorruptStoreError(RegistryError):
    code = "CorruptStoreError"


# --- sparql -----------------------------------------------------------------

class QuerySyntaxError(RegistryError):
    code = "SyntaxError"

    def __init__(self, message: str, line: int, column: int, token: str | None = None):
        at = f"line {line}, column {column}"
        if token:
            at += f" near {token!r}"
        super().__init__(f"{message} ({at})", {"line": line, "column": column, "token": token})
        self.line = line
        self.column = column
        self.token = token


class UnsupportedFeatureError(RegistryError):
    code = "UnsupportedFeatureError"

    def __init__(self, feature: str):
        super().__init__(f"unsupported query feature: {feature}", {"feature": feature})
        self.feature = feature


# --- catalog ----------------------------------------------------------------

class ManifestSchemaError(RegistryError):
    code = "ManifestSchemaError"

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems), {"problems": problems})
        self.problems = problems


class InvalidLayerError(RegistryError):
    code = "InvalidLayerError"


# --- matchmaker / lookups ----------------------------------------------------

class UnknownModelError(RegistryError):
    code = "UnknownModelError"

    def __init__(self, uuid: str):
        super().__init__(f"no model with uuid {uuid!r}", {"uuid": uuid})


class UnknownDeviceError(RegistryError):
    code = "UnknownDeviceError"

    def __init__(self, device_id: str):
        super().__init__(f"no device with id {device_id!r}", {"deviceId": device_id})


class InvalidConstraintsError(RegistryError):
    code = "InvalidConstraintsError"


# --- search -----------------------------------------------------------------

class UnknownEntityError(RegistryError):
    code = "UnknownEntityError"

    def __init__(self, iri: str):
        super().__init__(f"entity not indexed: {iri}", {"entityIri": iri})


# --- codegen ----------------------------------------------------------------

class UnknownTargetError(RegistryError):
    code = "UnknownTargetError"

    def __init__(self, target_id: str):
        super().__init__(f"no such codegen target: {target_id!r}", {"targetId": target_id})


class IncompatibleTargetError(RegistryError):
    code = "IncompatibleTargetError"


class NotCompatibleError(RegistryError):
    code = "NotCompatibleError"


class MissingConfigError(RegistryError):
    code = "MissingConfigError"

    def __init__(self, fields: list[str]):
        super().__init__(f"missing required config fields: {', '.join(fields)}", {"fields": fields})
        self.fields = fields


class InvalidConfigError(RegistryError):
    code = "InvalidConfigError"

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems), {"problems": problems})
        self.problems = problems


class TemplateError(RegistryError):
    code = "TemplateError"


# --- recipes ----------------------------------------------------------------

class RecipeParseError(RegistryError):
    code = "RecipeParseError"

    def __init__(self, source: str, problems: list[str]):
        super().__init__(f"{source}: " + "; ".join(problems), {"source": source, "problems": problems})
        self.source = source
        self.problems = problems


class InvalidTransitionError(RegistryError):
    code = "InvalidTransitionError"


class NotAcknowledgedError(RegistryError):
    code = "NotAcknowledgedError"


class TelemetryScriptError(RegistryError):
    code = "TelemetryScriptError"
