"""RDF data model, Turtle I/O, indexed storage and persistence."""

from .graph import Dataset, DatasetStore, Graph, PrefixMap
from .isomorphism import isomorphic
from .store import load_dataset, save_dataset, store_exists
from .terms import (
    NUMERIC_DATATYPES,
    RDF,
    RDF_LANG_STRING,
    RDF_TYPE,
    XSD,
    XSD_BOOLEAN,
    XSD_DATE,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    Subject,
    Term,
    Triple,
    decimal,
    integer,
    string,
    term_sort_key,
)
from .turtle import parse_turtle, serialize_turtle

__all__ = [
    "BlankNode",
    "NUMERIC_DATATYPES",
    "RDF_LANG_STRING",
    "Dataset",
    "DatasetStore",
    "Graph",
    "Iri",
    "Literal",
    "PrefixMap",
    "RDF",
    "RDF_TYPE",
    "Subject",
    "Term",
    "Triple",
    "XSD",
    "XSD_BOOLEAN",
    "XSD_DATE",
    "XSD_DECIMAL",
    "XSD_DOUBLE",
    "XSD_INTEGER",
    "XSD_STRING",
    "decimal",
    "integer",
    "isomorphic",
    "load_dataset",
    "parse_turtle",
    "save_dataset",
    "serialize_turtle",
    "store_exists",
    "string",
    "term_sort_key",
]
