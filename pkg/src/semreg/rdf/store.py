"""Whole-dataset snapshot persistence.

Layout: ``<dir>/manifest.json`` listing ``{"graphName": ..., "file": ...}``
entries plus one Turtle file per named graph. Writes replace the directory
contents atomically enough for desk scale (manifest written last).
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import CorruptStoreError
from .graph import Dataset, PrefixMap
from .terms import Iri
from .turtle import parse_turtle, serialize_turtle

MANIFEST_NAME = "manifest.json"


def save_dataset(dataset: Dataset, directory: str | Path, prefixes: PrefixMap | None = None) -> None:
    from ..catalog import PREFIXES  # default prefix map lives with the vocabulary

    prefixes = prefixes if prefixes is not None else PREFIXES
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for index, name in enumerate(sorted(dataset.graphs, key=lambda iri: iri.value)):
        filename = f"graph_{index:03d}.ttl"
        (directory / filename).write_text(
            serialize_turtle(dataset.graphs[name], prefixes), encoding="utf-8"
        )
        entries.append({"graphName": name.value, "file": filename})
    manifest = {"graphs": entries}
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def load_dataset(directory: str | Path) -> Dataset:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise CorruptStoreError(f"store manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        entries = manifest["graphs"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CorruptStoreError(f"unreadable store manifest: {manifest_path} ({exc})") from exc

    graphs = []
    for entry in entries:
        try:
            name, filename = entry["graphName"], entry["file"]
        except (KeyError, TypeError) as exc:
            raise CorruptStoreError(f"malformed manifest entry: {entry!r}") from exc
        path = directory / filename
        if not path.exists():
            raise CorruptStoreError(f"manifest names a missing file: {filename}")
        graphs.append(parse_turtle(path.read_text(encoding="utf-8"), graph_name=Iri(name)))
    return Dataset(graphs)


def store_exists(directory: str | Path) -> bool:
    return (Path(directory) / MANIFEST_NAME).exists()
