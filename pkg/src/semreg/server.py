"""HTTP service over the registry: ingestion, discovery, matchmaking,
search, SPARQL, codegen, recipes and live telemetry.

The service owns the dataset snapshot lifecycle: reads run lock-free against
the current immutable snapshot, the single writer swaps in a new snapshot and
checkpoints it to disk before acknowledging the ingest. Every response body is
built by the same serialization helpers the CLI uses, so the two surfaces are
byte-identical.
"""

from __future__ import annotations

import asyncio
import json
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from starlette.applications import Starlette
from starlette.middleware import Middleware
from starlette.middleware.cors import CORSMiddleware
from starlette.requests import Request
from starlette.responses import Response, StreamingResponse
from starlette.routing import Route

from . import codegen
from .catalog import extract_devices, extract_models, graph_iri
from .errors import (
    NotAcknowledgedError,
    RegistryError,
    UnknownDeviceError,
    UnknownModelError,
)
from .fixtures import TELEMETRY_SCRIPT_PATH, load_fixture_dataset
from .matchmaker import devices_for_model, models_for_device
from .rdf import (
    BlankNode,
    Dataset,
    DatasetStore,
    Graph,
    Iri,
    RDF_TYPE,
    Term,
    load_dataset,
    parse_turtle,
    save_dataset,
    store_exists,
)
from .recipes import (
    Binding,
    RecipeStore,
    TelemetryStream,
    acknowledge,
    load_script_file,
    propose_binding,
)
from .search import build_index, search as run_search
from .sparql import evaluate, parse_query, table_to_json_dict, term_to_json
from .catalog import vocab

HEARTBEAT_SECONDS = 15.0

_STATUS_BY_CODE = {
    "SyntaxError": 400,
    "UnknownPrefixError": 400,
    "UnsupportedFeatureError": 400,
    "ManifestSchemaError": 400,
    "MissingConfigError": 400,
    "InvalidConfigError": 400,
    "InvalidConstraintsError": 400,
    "IncompatibleTargetError": 400,
    "NotCompatibleError": 400,
    "InvalidLayerError": 400,
    "TelemetryScriptError": 400,
    "RecipeParseError": 400,
    "UnknownModelError": 404,
    "UnknownDeviceError": 404,
    "UnknownEntityError": 404,
    "UnknownTargetError": 404,
    "UnknownRecipeError": 404,
    "UnknownBindingError": 404,
    "InvalidTransitionError": 409,
    "NotAcknowledgedError": 409,
    "UnsupportedMediaType": 415,
    "NotFound": 404,
    "MethodNotAllowed": 405,
    "ValidationError": 400,
    "CorruptStoreError": 500,
    "TemplateError": 500,
    "BindError": 500,
}


def dump_json(payload: Any) -> str:
    """Canonical JSON text shared by the HTTP and CLI surfaces."""
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def json_response(payload: Any, status_code: int = 200) -> Response:
    return Response(dump_json(payload), status_code=status_code, media_type="application/json")


def error_response(code: str, message: str, details: Any = None) -> Response:
    status = _STATUS_BY_CODE.get(code, 400)
    body: dict = {"httpStatus": status, "code": code, "message": message}
    if details is not None:
        body["details"] = details
    return json_response(body, status_code=status)


@dataclass
class ServerConfig:
    bind_address: str = "127.0.0.1:8099"
    data_directory: str | Path | None = None
    fixtures: bool = False
    recipes_directory: str | Path | None = None
    cors_allowed_origins: tuple[str, ...] = ()
    telemetry_rate: float = 1.0

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.bind_address.rpartition(":")
        if not host or not port.isdigit():
            raise ValueError(f"bind address must be host:port, got {self.bind_address!r}")
        return host, int(port)


class BindingStore:
    """Recipe bindings with optional JSON persistence under the data dir."""

    def __init__(self, path: Path | None = None):
        self._path = path
        self._bindings: dict[str, Binding] = {}
        self._counter = 0
        if path is not None and path.exists():
            self._load()

    def _load(self) -> None:
        from .recipes import Assignment

        doc = json.loads(self._path.read_text(encoding="utf-8"))
        self._counter = doc.get("counter", 0)
        for item in doc.get("bindings", []):
            assignments = {
                role: tuple(Assignment(a["deviceId"], a["datapointRole"], a["address"]) for a in assigned)
                for role, assigned in item["assignments"].items()
            }
            binding = Binding(item["bindingId"], item["recipeId"], assignments, item["status"])
            self._bindings[binding.binding_id] = binding

    def _flush(self) -> None:
        if self._path is None:
            return
        doc = {
            "counter": self._counter,
            "bindings": [
                {
                    "bindingId": b.binding_id,
                    "recipeId": b.recipe_id,
                    "assignments": {
                        role: [a.to_json() for a in assigned] for role, assigned in b.assignments.items()
                    },
                    "status": b.status,
                }
                for b in self._bindings.values()
            ],
        }
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

    def next_id(self) -> str:
        self._counter += 1
        return f"binding-{self._counter:04d}"

    def put(self, binding: Binding) -> None:
        self._bindings[binding.binding_id] = binding
        self._flush()

    def get(self, binding_id: str) -> Binding | None:
        return self._bindings.get(binding_id)


class AppState:
    def __init__(self, config: ServerConfig):
        self.config = config
        data_dir = Path(config.data_directory) if config.data_directory else None
        self.data_dir = data_dir
        if data_dir is not None and store_exists(data_dir):
            dataset = load_dataset(data_dir)
        elif config.fixtures:
            dataset = load_fixture_dataset()
        else:
            dataset = Dataset()
        self.store = DatasetStore(dataset)
        self.recipes = RecipeStore(config.recipes_directory)
        self.bindings = BindingStore(data_dir / "bindings.json" if data_dir else None)
        self.telemetry_script = load_script_file(TELEMETRY_SCRIPT_PATH)
        self._index_cache: tuple[Dataset, Any] | None = None

    def dataset(self) -> Dataset:
        return self.store.snapshot()

    def search_index(self):
        snapshot = self.dataset()
        if self._index_cache is None or self._index_cache[0] is not snapshot:
            self._index_cache = (snapshot, build_index(snapshot))
        return self._index_cache[1]

    def ingest_graph(self, graph: Graph) -> Dataset:
        new = self.store.update(lambda current: current.with_graph(graph))
        if self.data_dir is not None:
            save_dataset(new, self.data_dir)
        return new

    def persist(self) -> None:
        if self.data_dir is not None:
            save_dataset(self.dataset(), self.data_dir)


def _entity_triples(dataset: Dataset, entity: Term) -> list[dict]:
    """Subject-rooted closure of an entity, stopping at other registry entities."""
    seen: set[Term] = set()
    queue: list[Term] = [entity]
    out: list[dict] = []
    while queue:
        node = queue.pop(0)
        if node in seen:
            continue
        seen.add(node)
        for triple in dataset.match(node, None, None):
            out.append(
                {
                    "subject": term_to_json(triple.subject),
                    "predicate": term_to_json(triple.predicate),
                    "object": term_to_json(triple.object),
                }
            )
            obj = triple.object
            if isinstance(obj, (Iri, BlankNode)) and obj not in seen:
                typed_entity = any(
                    t.object in (vocab.NEURAL_NETWORK, vocab.SMART_SENSOR)
                    for t in dataset.match(obj, RDF_TYPE, None)
                )
                if not typed_entity:
                    queue.append(obj)
    return out


def create_app(config: ServerConfig | None = None) -> Starlette:
    config = config or ServerConfig()
    state = AppState(config)

    # --- route handlers -----------------------------------------------------

    async def put_graph(request: Request) -> Response:
        content_type = request.headers.get("content-type", "").split(";")[0].strip()
        if content_type not in ("text/turtle", "application/x-turtle"):
            return error_response("UnsupportedMediaType", "request body must be text/turtle")
        name = graph_iri(request.path_params["name"])
        body = (await request.body()).decode("utf-8")
        graph = parse_turtle(body, graph_name=name)
        state.ingest_graph(graph)
        return json_response({"graphName": name.value, "tripleCount": len(graph)})

    async def get_models(request: Request) -> Response:
        models, _ = extract_models(state.dataset())
        return json_response([m.to_json() for m in models])

    async def get_devices(request: Request) -> Response:
        devices, _ = extract_devices(state.dataset())
        return json_response([d.to_json() for d in devices])

    async def get_model(request: Request) -> Response:
        uuid = request.path_params["uuid"]
        dataset = state.dataset()
        models, _ = extract_models(dataset)
        model = next((m for m in models if m.uuid == uuid), None)
        if model is None:
            raise UnknownModelError(uuid)
        entity = Iri(vocab.MODEL_NS + uuid)
        return json_response({"descriptor": model.to_json(), "triples": _entity_triples(dataset, entity)})

    async def get_device(request: Request) -> Response:
        device_id = request.path_params["id"]
        dataset = state.dataset()
        devices, _ = extract_devices(dataset)
        device = next((d for d in devices if d.id == device_id), None)
        if device is None:
            raise UnknownDeviceError(device_id)
        entity = Iri(vocab.DEVICE_NS + device_id)
        return json_response({"descriptor": device.to_json(), "triples": _entity_triples(dataset, entity)})

    async def match_models(request: Request) -> Response:
        device_id = request.query_params.get("device")
        if not device_id:
            return error_response("ValidationError", "query parameter 'device' is required")
        results = models_for_device(state.dataset(), device_id)
        return json_response([r.to_json() for r in results])

    async def match_devices(request: Request) -> Response:
        model_uuid = request.query_params.get("model")
        if not model_uuid:
            return error_response("ValidationError", "query parameter 'model' is required")
        results = devices_for_model(state.dataset(), model_uuid)
        return json_response([r.to_json() for r in results])

    async def post_search(request: Request) -> Response:
        body = await _json_body(request)
        text = body.get("text")
        if not isinstance(text, str):
            return error_response("ValidationError", "body field 'text' (string) is required")
        filters = body.get("filters") or {}
        if not isinstance(filters, dict):
            return error_response("ValidationError", "body field 'filters' must be an object")
        k = body.get("k", 20)
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            return error_response("ValidationError", "body field 'k' must be a positive integer")
        hits = run_search(state.search_index(), text, filters, k)
        return json_response([h.to_json() for h in hits])

    async def post_sparql(request: Request) -> Response:
        content_type = request.headers.get("content-type", "").split(";")[0].strip()
        if content_type != "application/sparql-query":
            return error_response("UnsupportedMediaType", "request body must be application/sparql-query")
        text = (await request.body()).decode("utf-8")
        table = evaluate(state.dataset(), parse_query(text))
        return Response(
            dump_json(table_to_json_dict(table)),
            media_type="application/sparql-results+json",
        )

    async def get_targets(request: Request) -> Response:
        return json_response([t.to_json() for t in codegen.list_targets()])

    async def get_project_config(request: Request) -> Response:
        params = request.query_params
        missing = [name for name in ("model", "device", "target") if not params.get(name)]
        if missing:
            return error_response("ValidationError", f"query parameters required: {', '.join(missing)}")
        fields = codegen.required_config(
            state.dataset(), params["target"], params["model"], params["device"]
        )
        return json_response([f.to_json() for f in fields])

    async def post_project(request: Request) -> Response:
        body = await _json_body(request)
        missing = [name for name in ("model", "device", "target") if not isinstance(body.get(name), str)]
        if missing:
            return error_response("ValidationError", f"body fields required: {', '.join(missing)}")
        config_values = body.get("config", {})
        if not isinstance(config_values, dict):
            return error_response("ValidationError", "body field 'config' must be an object")
        bundle = codegen.generate(
            state.dataset(), body["model"], body["device"], body["target"], config_values
        )
        report = codegen.effort_report(bundle, config_values)
        if "application/zip" in request.headers.get("accept", ""):
            archive = codegen.zip_bundle(bundle)
            filename = f"{body['target']}_{body['model'][:8]}.zip"
            return Response(
                archive,
                media_type="application/zip",
                headers={"Content-Disposition": f'attachment; filename="{filename}"'},
            )
        return json_response(
            {"files": bundle.files, "effortReport": report.to_json(), "metadata": bundle.metadata}
        )

    async def get_recipes(request: Request) -> Response:
        return json_response([r.to_json() for r in state.recipes.list_recipes()])

    async def post_binding(request: Request) -> Response:
        recipe_id = request.path_params["id"]
        recipe = state.recipes.get(recipe_id)
        if recipe is None:
            return error_response("UnknownRecipeError", f"no recipe with id {recipe_id!r}")
        body = await _json_body(request)
        device_ids = body.get("deviceIds")
        if not isinstance(device_ids, list) or not all(isinstance(d, str) for d in device_ids):
            return error_response("ValidationError", "body field 'deviceIds' (list of strings) is required")
        devices, _ = extract_devices(state.dataset())
        chosen = [d for d in devices if d.id in set(device_ids)]
        unknown = sorted(set(device_ids) - {d.id for d in chosen})
        if unknown:
            raise UnknownDeviceError(unknown[0])
        outcome = propose_binding(recipe, chosen, binding_id=state.bindings.next_id())
        if isinstance(outcome, Binding):
            state.bindings.put(outcome)
        return json_response(outcome.to_json())

    async def post_ack(request: Request) -> Response:
        binding_id = request.path_params["id"]
        binding = state.bindings.get(binding_id)
        if binding is None:
            return error_response("UnknownBindingError", f"no binding with id {binding_id!r}")
        body = await _json_body(request)
        decision = body.get("decision")
        if decision not in ("accept", "reject"):
            return error_response("ValidationError", "body field 'decision' must be 'accept' or 'reject'")
        updated = acknowledge(binding, decision)
        state.bindings.put(updated)
        return json_response(updated.to_json())

    async def stream_telemetry(request: Request) -> Response:
        binding_id = request.path_params["id"]
        binding = state.bindings.get(binding_id)
        if binding is None:
            return error_response("UnknownBindingError", f"no binding with id {binding_id!r}")
        if binding.status != "acknowledged":
            raise NotAcknowledgedError(f"binding {binding_id} is {binding.status}")
        stream = TelemetryStream(binding, state.telemetry_script, state.config.telemetry_rate)

        async def event_source():
            # async pacing so a client disconnect cancels the generator cleanly
            last_beat = time.monotonic()
            for event in stream.stamped_events():
                yield f"event: telemetry\ndata: {dump_json(event.to_json())}\n\n"
                now = time.monotonic()
                if now - last_beat >= HEARTBEAT_SECONDS:
                    last_beat = now
                    yield ": heartbeat\n\n"
                await asyncio.sleep(stream.interval)

        return StreamingResponse(event_source(), media_type="text/event-stream")

    async def _json_body(request: Request) -> dict:
        content_type = request.headers.get("content-type", "").split(";")[0].strip()
        if content_type not in ("application/json", ""):
            raise _UnsupportedMediaType()
        try:
            body = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as exc:
            raise _BadJson(str(exc)) from exc
        if not isinstance(body, dict):
            raise _BadJson("request body must be a JSON object")
        return body

    routes = [
        Route("/graphs/{name:path}", put_graph, methods=["PUT"]),
        Route("/models", get_models, methods=["GET"]),
        Route("/models/{uuid}", get_model, methods=["GET"]),
        Route("/devices", get_devices, methods=["GET"]),
        Route("/devices/{id}", get_device, methods=["GET"]),
        Route("/match/models", match_models, methods=["GET"]),
        Route("/match/devices", match_devices, methods=["GET"]),
        Route("/search", post_search, methods=["POST"]),
        Route("/sparql", post_sparql, methods=["POST"]),
        Route("/targets", get_targets, methods=["GET"]),
        Route("/projects/config", get_project_config, methods=["GET"]),
        Route("/projects", post_project, methods=["POST"]),
        Route("/recipes", get_recipes, methods=["GET"]),
        Route("/recipes/{id}/bindings", post_binding, methods=["POST"]),
        Route("/bindings/{id}/ack", post_ack, methods=["POST"]),
        Route("/bindings/{id}/stream", stream_telemetry, methods=["GET"]),
    ]

    middleware = []
    if config.cors_allowed_origins:
        middleware.append(
            Middleware(
                CORSMiddleware,
                allow_origins=list(config.cors_allowed_origins),
                allow_methods=["*"],
                allow_headers=["*"],
            )
        )

    async def registry_error(request: Request, exc: RegistryError) -> Response:
        return error_response(exc.code, exc.message, exc.details)

    async def unsupported_media(request: Request, exc: Exception) -> Response:
        return error_response("UnsupportedMediaType", "request body must be application/json")

    async def bad_json(request: Request, exc: Exception) -> Response:
        return error_response("ValidationError", f"invalid JSON body: {exc}")

    async def not_found(request: Request, exc: Exception) -> Response:
        return error_response("NotFound", f"no route for {request.url.path}")

    async def bad_method(request: Request, exc: Exception) -> Response:
        return error_response("MethodNotAllowed", f"method {request.method} not allowed on {request.url.path}")

    @asynccontextmanager
    async def lifespan(app: Starlette):
        yield
        state.persist()

    app = Starlette(
        routes=routes,
        middleware=middleware,
        lifespan=lifespan,
        exception_handlers={
            RegistryError: registry_error,
            _UnsupportedMediaType: unsupported_media,
            _BadJson: bad_json,
            404: not_found,
            405: bad_method,
        },
    )
    app.state.registry = state
    return app


class _UnsupportedMediaType(Exception):
    pass


class _BadJson(Exception):
    pass


class BindError(RegistryError):
    code = "BindError"


def serve(config: ServerConfig) -> None:
    """Run the service until interrupted; raises BindError when the port is taken."""
    import socket
    import uvicorn

    host, port = config.host_port()
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise BindError(f"cannot bind {config.bind_address}: {exc}") from exc
    finally:
        probe.close()
    uvicorn.run(create_app(config), host=host, port=port, log_level="info")
