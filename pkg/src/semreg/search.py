"""Text-relevance search over KG entities.

Deterministic TF-IDF: token frequency in the entity document times
ln(1 + N/df), summed over query tokens. No stemming, no stop words, no
fuzzy matching — scores must be reproducible by hand. Structured filters
(kind, RAM budget, required sensor) narrow the candidate set before scoring.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal

from .catalog import (
    DeviceDescriptor,
    NeuralNetworkDescriptor,
    extract_devices,
    extract_models,
    sensor_class_satisfies,
)
from .errors import UnknownEntityError
from .rdf import Dataset, Iri

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")
MIN_TOKEN_LENGTH = 2
DEFAULT_K = 20


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop tokens shorter than 2."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if len(t) >= MIN_TOKEN_LENGTH]


@dataclass(frozen=True)
class SearchHit:
    entity_iri: str
    kind: str  # "model" | "device"
    score: float
    matched_terms: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "entityIri": self.entity_iri,
            "kind": self.kind,
            "score": self.score,
            "matchedTerms": list(self.matched_terms),
        }


@dataclass
class _DocumentMeta:
    kind: str
    ram_kb: Decimal  # model min RAM / device RAM
    sensor_classes: frozenset[Iri]


class SearchIndex:
    def __init__(self):
        self.documents: dict[str, Counter] = {}
        self.document_frequency: Counter = Counter()
        self.meta: dict[str, _DocumentMeta] = {}

    @property
    def size(self) -> int:
        return len(self.documents)

    def _add(self, iri: str, tokens: list[str], meta: _DocumentMeta) -> None:
        bag = Counter(tokens)
        self.documents[iri] = bag
        self.meta[iri] = meta
        for token in bag:
            self.document_frequency[token] += 1

    def idf(self, token: str) -> float:
        df = self.document_frequency.get(token, 0)
        if df == 0:
            return 0.0
        return math.log(1 + self.size / df)


def _model_tokens(model: NeuralNetworkDescriptor) -> list[str]:
    tokens = tokenize(model.description) + tokenize(model.name) + tokenize(model.category)
    for inp in model.inputs:
        tokens += tokenize(inp.sensor_class.local_name())
    return tokens


def _device_tokens(device: DeviceDescriptor) -> list[str]:
    tokens = tokenize(device.name)
    for sensor_class in sorted(device.sensor_classes, key=lambda c: c.value):
        tokens += tokenize(sensor_class.local_name())
    return tokens


def build_index(dataset: Dataset) -> SearchIndex:
    """One document per model/device; rebuilding over the same snapshot
    yields an identical index."""
    from .catalog import DEVICE_NS, MODEL_NS

    index = SearchIndex()
    models, _ = extract_models(dataset)
    for model in models:
        index._add(
            MODEL_NS + model.uuid,
            _model_tokens(model),
            _DocumentMeta("model", model.min_ram_kb, frozenset(model.required_sensor_classes)),
        )
    devices, _ = extract_devices(dataset)
    for device in devices:
        index._add(
            DEVICE_NS + device.id,
            _device_tokens(device),
            _DocumentMeta("device", device.ram_kb, device.sensor_classes),
        )
    return index


def _passes_filters(index: SearchIndex, iri: str, filters: dict) -> bool:
    meta = index.meta[iri]
    kind = filters.get("kind")
    if kind is not None and meta.kind != kind:
        return False
    max_ram = filters.get("maxRamKb")
    if max_ram is not None and meta.ram_kb > Decimal(str(max_ram)):
        return False
    required = filters.get("requiredSensor")
    if required is not None:
        required_iri = _sensor_filter_iri(required)
        if required_iri is None:
            return False
        if not any(sensor_class_satisfies(c, required_iri) for c in meta.sensor_classes):
            return False
    return True


def _sensor_filter_iri(value) -> Iri | None:
    from .catalog import resolve_sensor_class

    if isinstance(value, Iri):
        return value
    if isinstance(value, str):
        resolved = resolve_sensor_class(value)
        if resolved is not None:
            return resolved
        try:
            return Iri(value)
        except ValueError:
            return None
    return None


def search(index: SearchIndex, text: str, filters: dict | None = None, k: int = DEFAULT_K) -> list[SearchHit]:
    """Top-k hits by descending TF-IDF score, ties broken by entity IRI;
    zero-score entities never appear."""
    if k < 1:
        raise ValueError("k must be >= 1")
    filters = filters or {}
    query_tokens = tokenize(text)
    hits: list[SearchHit] = []
    for iri, bag in index.documents.items():
        if not _passes_filters(index, iri, filters):
            continue
        score = 0.0
        matched: list[str] = []
        for token in query_tokens:
            tf = bag.get(token, 0)
            if tf:
                score += tf * index.idf(token)
                if token not in matched:
                    matched.append(token)
        if score > 0:
            hits.append(SearchHit(iri, index.meta[iri].kind, score, tuple(matched)))
    hits.sort(key=lambda h: (-h.score, h.entity_iri))
    return hits[:k]


def explain(index: SearchIndex, entity_iri: str, text: str) -> list[tuple[str, float]]:
    """Per-token score contributions for one entity; they sum to the
    entity's search score for the same query."""
    if entity_iri not in index.documents:
        raise UnknownEntityError(entity_iri)
    bag = index.documents[entity_iri]
    contributions: list[tuple[str, float]] = []
    for token in tokenize(text):
        tf = bag.get(token, 0)
        if tf:
            contributions.append((token, tf * index.idf(token)))
    return contributions
