"""SPARQL 1.1 Query Results JSON serialization."""

from __future__ import annotations

import json

from ..rdf import BlankNode, Iri, Term, XSD_STRING
from .eval import ResultTable


def term_to_json(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"type": "uri", "value": term.value}
    if isinstance(term, BlankNode):
        return {"type": "bnode", "value": term.label}
    out: dict = {"type": "literal", "value": term.lexical}
    if term.lang:
        out["xml:lang"] = term.lang
    elif term.datatype != XSD_STRING:
        out["datatype"] = term.datatype.value
    return out


def table_to_json_dict(table: ResultTable) -> dict:
    bindings = []
    for row in table.rows:
        bindings.append({name: term_to_json(row[name]) for name in table.vars if name in row})
    return {"head": {"vars": list(table.vars)}, "results": {"bindings": bindings}}


def to_results_json(table: ResultTable) -> str:
    """W3C results-JSON text; row and column order preserved."""
    return json.dumps(table_to_json_dict(table), ensure_ascii=False, separators=(",", ":"))
