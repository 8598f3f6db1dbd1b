"""Bundled seed fixtures: the demo knowledge graph, recipes, telemetry.

The seed KG ships as two Turtle documents (models, devices) generated from
`seed_manifests.json` by `tools/build_fixtures.py` and checked in; loading
parses the Turtle, so the files are exercised on every start with fixtures
enabled.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..rdf import Dataset, Graph, Iri, parse_turtle

FIXTURES_DIR = Path(__file__).parent
MODELS_GRAPH_NAME = Iri("http://semreg.example/graphs/models")
DEVICES_GRAPH_NAME = Iri("http://semreg.example/graphs/devices")
TELEMETRY_SCRIPT_PATH = FIXTURES_DIR / "telemetry" / "conveyor_demo.json"


def load_fixture_dataset() -> Dataset:
    models = parse_turtle(
        (FIXTURES_DIR / "models.ttl").read_text(encoding="utf-8"), graph_name=MODELS_GRAPH_NAME
    )
    devices = parse_turtle(
        (FIXTURES_DIR / "devices.ttl").read_text(encoding="utf-8"), graph_name=DEVICES_GRAPH_NAME
    )
    return Dataset([models, devices])


def load_seed_manifests() -> dict:
    return json.loads((FIXTURES_DIR / "seed_manifests.json").read_text(encoding="utf-8"))
