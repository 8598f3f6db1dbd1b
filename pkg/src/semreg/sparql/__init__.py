"""SPARQL subset: parser, evaluator, results serialization."""

from .ast import BooleanExpr, Comparison, FilterExpr, OrderKey, Query, TriplePattern, Variable
from .eval import Binding, ResultTable, evaluate, solve_bgp
from .parser import parse_query
from .results import table_to_json_dict, term_to_json, to_results_json

__all__ = [
    "Binding",
    "BooleanExpr",
    "Comparison",
    "FilterExpr",
    "OrderKey",
    "Query",
    "ResultTable",
    "TriplePattern",
    "Variable",
    "evaluate",
    "parse_query",
    "solve_bgp",
    "table_to_json_dict",
    "term_to_json",
    "to_results_json",
]
