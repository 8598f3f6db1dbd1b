"""Command-line front door: ingest, list, match, search, query, generate,
recipe, serve.

The CLI links the library directly — no server needed — except `serve`;
`--remote URL` switches every command to HTTP mode against a running service.
`--json` prints exactly the API payload bytes, so scripted consumers see one
format regardless of surface. Exit codes: 0 success, 1 domain error, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import unicodedata
from pathlib import Path

from . import codegen
from .catalog import extract_devices, extract_models, graph_iri
from .errors import RegistryError
from .fixtures import load_fixture_dataset
from .matchmaker import devices_for_model, models_for_device
from .rdf import Dataset, load_dataset, parse_turtle, save_dataset, store_exists
from .recipes import Binding, RecipeStore, acknowledge, propose_binding
from .search import build_index, search as run_search
from .server import BindingStore, ServerConfig, dump_json, serve
from .sparql import evaluate, parse_query, table_to_json_dict

DATA_DIR_ENV = "SELOC_DATA_DIR"


def display_width(text: str) -> int:
    return sum(2 if unicodedata.east_asian_width(c) in ("W", "F") else 1 for c in text)


def format_table(rows: list[list[str]], columns: list[str]) -> str:
    """Fixed-width table; widths computed on display width."""
    widths = [display_width(c) for c in columns]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], display_width(cell))

    def pad(cell: str, width: int) -> str:
        return cell + " " * (width - display_width(cell))

    lines = ["  ".join(pad(c, w) for c, w in zip(columns, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(pad(c, w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


class _Remote:
    """Thin HTTP client mirroring the library call surface."""

    def __init__(self, base_url: str):
        self.base = base_url.rstrip("/")

    def request(self, method: str, path: str, **kwargs):
        import requests

        response = requests.request(method, self.base + path, timeout=30, **kwargs)
        if response.status_code >= 400:
            try:
                body = response.json()
            except ValueError:
                raise RegistryError(f"HTTP {response.status_code}: {response.text[:200]}")
            raise RegistryError(body.get("message", "remote error"), body.get("details")) from None
        return response


class _Context:
    def __init__(self, args):
        self.args = args
        self.json_output = getattr(args, "json", False)
        self.fixtures = getattr(args, "fixtures", False)
        remote = getattr(args, "remote", None)
        self.remote = _Remote(remote) if remote else None
        self._dataset: Dataset | None = None

    @property
    def data_dir(self) -> Path | None:
        raw = getattr(self.args, "data_dir", None) or os.environ.get(DATA_DIR_ENV)
        return Path(raw) if raw else None

    def dataset(self) -> Dataset:
        if self._dataset is None:
            if self.data_dir is not None and store_exists(self.data_dir):
                self._dataset = load_dataset(self.data_dir)
            elif self.fixtures:
                self._dataset = load_fixture_dataset()
            else:
                self._dataset = Dataset()
        return self._dataset

    def save(self, dataset: Dataset) -> None:
        if self.data_dir is None:
            raise RegistryError(
                f"no data directory: pass --data-dir or set {DATA_DIR_ENV}"
            )
        save_dataset(dataset, self.data_dir)

    def emit(self, payload, table: str | None = None) -> None:
        if self.json_output or table is None:
            print(dump_json(payload))
        else:
            print(table)


def _cmd_ingest(ctx: _Context) -> None:
    args = ctx.args
    if ctx.remote:
        body = Path(args.file).read_text(encoding="utf-8")
        response = ctx.remote.request(
            "PUT", f"/graphs/{args.graph}", data=body.encode("utf-8"),
            headers={"content-type": "text/turtle"},
        )
        ctx.emit(response.json())
        return
    name = graph_iri(args.graph)
    graph = parse_turtle(Path(args.file).read_text(encoding="utf-8"), graph_name=name)
    dataset = ctx.dataset().with_graph(graph)
    ctx.save(dataset)
    ctx.emit({"graphName": name.value, "tripleCount": len(graph)})


def _cmd_list(ctx: _Context) -> None:
    kind = ctx.args.kind
    if ctx.remote:
        payload = ctx.remote.request("GET", f"/{kind}").json()
        violations = []
    elif kind == "models":
        descriptors, violations = extract_models(ctx.dataset())
        payload = [d.to_json() for d in descriptors]
    else:
        descriptors, violations = extract_devices(ctx.dataset())
        payload = [d.to_json() for d in descriptors]
    for violation in violations:
        print(dump_json(violation.to_json()), file=sys.stderr)
    if kind == "models":
        rows = [[d["uuid"], d["name"], str(d["minRamKb"]), str(d["minFlashKb"]), str(d["macs"])] for d in payload]
        table = format_table(rows, ["UUID", "NAME", "MIN_RAM_KB", "MIN_FLASH_KB", "MACS"])
    else:
        rows = [
            [d["id"], d["name"], str(d["ramKb"]), str(d["flashKb"]), d["runtimePlatform"]]
            for d in payload
        ]
        table = format_table(rows, ["ID", "NAME", "RAM_KB", "FLASH_KB", "PLATFORM"])
    ctx.emit(payload, table)


def _cmd_match(ctx: _Context) -> None:
    args = ctx.args
    if ctx.remote:
        if args.device:
            payload = ctx.remote.request("GET", "/match/models", params={"device": args.device}).json()
        else:
            payload = ctx.remote.request("GET", "/match/devices", params={"model": args.model}).json()
    elif args.device:
        payload = [r.to_json() for r in models_for_device(ctx.dataset(), args.device)]
    else:
        payload = [r.to_json() for r in devices_for_model(ctx.dataset(), args.model)]
    rows = [
        [str(r["rank"]), r["modelUuid"], r["deviceId"], str(r["ramMarginKb"]), str(r["flashMarginKb"])]
        for r in payload
    ]
    ctx.emit(payload, format_table(rows, ["RANK", "MODEL_UUID", "DEVICE_ID", "RAM_MARGIN_KB", "FLASH_MARGIN_KB"]))


def _cmd_search(ctx: _Context) -> None:
    args = ctx.args
    filters: dict = {}
    if args.kind:
        filters["kind"] = args.kind
    if args.max_ram is not None:
        filters["maxRamKb"] = args.max_ram
    if args.sensor:
        filters["requiredSensor"] = args.sensor
    if ctx.remote:
        payload = ctx.remote.request(
            "POST", "/search", json={"text": args.text, "filters": filters, "k": args.k}
        ).json()
    else:
        hits = run_search(build_index(ctx.dataset()), args.text, filters, args.k)
        payload = [h.to_json() for h in hits]
    rows = [[h["entityIri"], h["kind"], f"{h['score']:.4f}", ",".join(h["matchedTerms"])] for h in payload]
    ctx.emit(payload, format_table(rows, ["ENTITY", "KIND", "SCORE", "MATCHED"]))


def _cmd_query(ctx: _Context) -> None:
    text = Path(ctx.args.file).read_text(encoding="utf-8")
    if ctx.remote:
        payload = ctx.remote.request(
            "POST", "/sparql", data=text.encode("utf-8"),
            headers={"content-type": "application/sparql-query"},
        ).json()
    else:
        payload = table_to_json_dict(evaluate(ctx.dataset(), parse_query(text)))
    variables = payload["head"]["vars"]
    rows = [
        [binding.get(v, {}).get("value", "") for v in variables]
        for binding in payload["results"]["bindings"]
    ]
    ctx.emit(payload, format_table(rows, [f"?{v}" for v in variables]))


def _cmd_generate(ctx: _Context) -> None:
    args = ctx.args
    config = json.loads(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    if ctx.remote:
        payload = ctx.remote.request(
            "POST", "/projects",
            json={"model": args.model, "device": args.device, "target": args.target, "config": config},
        ).json()
        files, report = payload["files"], payload["effortReport"]
    else:
        bundle = codegen.generate(ctx.dataset(), args.model, args.device, args.target, config)
        report = codegen.effort_report(bundle, config).to_json()
        files = bundle.files
        payload = {"files": files, "effortReport": report, "metadata": bundle.metadata}
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for filename, content in files.items():
        (out_dir / filename).write_text(content, encoding="utf-8")
    summary = format_table(
        [
            [name, str(sum(1 for line in content.splitlines() if line.strip()))]
            for name, content in files.items()
        ]
        + [["(user inputs)", str(report["userInputCount"])]],
        ["FILE", "LINES"],
    )
    ctx.emit(payload, summary + f"\nwrote {len(files)} files to {out_dir}")


def _binding_store(ctx: _Context) -> BindingStore:
    if ctx.data_dir is None:
        return BindingStore(None)
    return BindingStore(Path(ctx.data_dir) / "bindings.json")


def _cmd_recipe(ctx: _Context) -> None:
    args = ctx.args
    if args.recipe_command == "recipes":
        if ctx.remote:
            payload = ctx.remote.request("GET", "/recipes").json()
        else:
            store = RecipeStore(args.recipes_dir)
            payload = [r.to_json() for r in store.list_recipes()]
            for err in store.errors:
                print(dump_json({"code": err.code, "message": err.message}), file=sys.stderr)
        rows = [[r["recipeId"], r["name"], str(len(r["inputs"])), str(len(r["widgets"]))] for r in payload]
        ctx.emit(payload, format_table(rows, ["RECIPE_ID", "NAME", "INPUTS", "WIDGETS"]))
        return
    if args.recipe_command == "bind":
        device_ids = [d for d in args.devices.split(",") if d]
        if ctx.remote:
            payload = ctx.remote.request(
                "POST", f"/recipes/{args.recipe}/bindings", json={"deviceIds": device_ids}
            ).json()
            ctx.emit(payload)
            return
        store = RecipeStore(args.recipes_dir)
        recipe = store.get(args.recipe)
        if recipe is None:
            raise RegistryError(f"no recipe with id {args.recipe!r}")
        devices, _ = extract_devices(ctx.dataset())
        chosen = [d for d in devices if d.id in set(device_ids)]
        missing = set(device_ids) - {d.id for d in chosen}
        if missing:
            raise RegistryError(f"unknown devices: {', '.join(sorted(missing))}")
        bindings = _binding_store(ctx)
        outcome = propose_binding(recipe, chosen, binding_id=bindings.next_id())
        if isinstance(outcome, Binding):
            bindings.put(outcome)
        ctx.emit(outcome.to_json())
        return
    # ack
    if ctx.remote:
        payload = ctx.remote.request(
            "POST", f"/bindings/{args.binding}/ack", json={"decision": args.decision}
        ).json()
        ctx.emit(payload)
        return
    bindings = _binding_store(ctx)
    binding = bindings.get(args.binding)
    if binding is None:
        raise RegistryError(f"no binding with id {args.binding!r}")
    updated = acknowledge(binding, args.decision)
    bindings.put(updated)
    ctx.emit(updated.to_json())


def _cmd_serve(ctx: _Context) -> None:
    args = ctx.args
    serve(
        ServerConfig(
            bind_address=args.bind,
            data_directory=ctx.data_dir,
            fixtures=ctx.fixtures,
            recipes_directory=args.recipes_dir,
            cors_allowed_origins=tuple(args.cors_origin or ()),
        )
    )


def build_parser() -> argparse.ArgumentParser:
    # global flags live on a parent parser so they work before or after the
    # subcommand (`semreg --fixtures list models` and `semreg match ... --json`)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data-dir", default=argparse.SUPPRESS, help=f"store directory (default: ${DATA_DIR_ENV})")
    common.add_argument(
        "--fixtures", action="store_true", default=argparse.SUPPRESS,
        help="load the bundled demo knowledge graph",
    )
    common.add_argument(
        "--remote", metavar="URL", default=argparse.SUPPRESS,
        help="talk to a running server instead of the local store",
    )
    common.add_argument(
        "--json", action="store_true", default=argparse.SUPPRESS,
        help="emit the exact API payloads",
    )

    parser = argparse.ArgumentParser(
        prog="semreg",
        description="Semantic registry for on-device ML: knowledge graph, matchmaking, codegen, recipes.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name: str, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("ingest", help="load a Turtle document into a named graph")
    p.add_argument("file")
    p.add_argument("--graph", required=True, help="graph name (short name or absolute IRI)")
    p.set_defaults(func=_cmd_ingest)

    p = add_parser("list", help="list models or devices")
    p.add_argument("kind", choices=["models", "devices"])
    p.set_defaults(func=_cmd_list)

    p = add_parser("match", help="matchmake models and devices")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--device", help="models this device can run")
    group.add_argument("--model", help="devices able to run this model")
    p.set_defaults(func=_cmd_match)

    p = add_parser("search", help="text search over the knowledge graph")
    p.add_argument("text")
    p.add_argument("--kind", choices=["model", "device"])
    p.add_argument("--max-ram", type=float, dest="max_ram")
    p.add_argument("--sensor", help="required sensor class (name or IRI)")
    p.add_argument("-k", type=int, default=20)
    p.set_defaults(func=_cmd_search)

    p = add_parser("query", help="run a SPARQL SELECT query from a file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_query)

    p = add_parser("generate", help="generate a deployment project bundle")
    p.add_argument("--model", required=True)
    p.add_argument("--device", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--config", help="JSON file with the user config values")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_generate)

    p = add_parser("recipe", help="list recipes, propose bindings, acknowledge")
    rsub = p.add_subparsers(dest="recipe_command", required=True)
    rp = rsub.add_parser("recipes", parents=[common], help="list available recipes")
    rp.add_argument("--recipes-dir", dest="recipes_dir")
    rp.set_defaults(func=_cmd_recipe)
    rp = rsub.add_parser("bind", parents=[common], help="propose a binding for a recipe")
    rp.add_argument("--recipe", required=True)
    rp.add_argument("--devices", required=True, help="comma-separated device ids")
    rp.add_argument("--recipes-dir", dest="recipes_dir")
    rp.set_defaults(func=_cmd_recipe)
    rp = rsub.add_parser("ack", parents=[common], help="accept or reject a proposed binding")
    rp.add_argument("--binding", required=True)
    rp.add_argument("--decision", required=True, choices=["accept", "reject"])
    rp.set_defaults(func=_cmd_recipe)

    p = add_parser("serve", help="run the HTTP service")
    p.add_argument("--bind", default="127.0.0.1:8099", help="host:port")
    p.add_argument("--recipes-dir", dest="recipes_dir")
    p.add_argument("--cors-origin", action="append")
    p.set_defaults(func=_cmd_serve)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ctx = _Context(args)
    try:
        args.func(ctx)
    except RegistryError as exc:
        print(f"{exc.code}: {exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
