#!/usr/bin/env python3
"""Regenerate the checked-in seed Turtle from seed_manifests.json.

Run after editing the seed manifests:

    python tools/build_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from semreg.catalog import PREFIXES, compile_device_manifest, compile_model_manifest
from semreg.fixtures import DEVICES_GRAPH_NAME, FIXTURES_DIR, MODELS_GRAPH_NAME, load_seed_manifests
from semreg.rdf import Graph, serialize_turtle


def main() -> None:
    seeds = load_seed_manifests()

    models = Graph(MODELS_GRAPH_NAME)
    for manifest in seeds["models"]:
        for triple in compile_model_manifest(manifest):
            models.add(triple)

    devices = Graph(DEVICES_GRAPH_NAME)
    for manifest in seeds["devices"]:
        for triple in compile_device_manifest(manifest):
            devices.add(triple)

    (FIXTURES_DIR / "models.ttl").write_text(serialize_turtle(models, PREFIXES), encoding="utf-8")
    (FIXTURES_DIR / "devices.ttl").write_text(serialize_turtle(devices, PREFIXES), encoding="utf-8")
    print(f"models.ttl: {len(models)} triples ({len(seeds['models'])} models)")
    print(f"devices.ttl: {len(devices)} triples ({len(seeds['devices'])} devices)")


if __name__ == "__main__":
    main()
