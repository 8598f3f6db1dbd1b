"""Basic-graph-pattern evaluation with filters, ordering and slicing.

Join strategy: greedy most-selective-pattern-first, where selectivity is the
index cardinality of the pattern's already-determined positions. Any join
order yields the same bag of solutions (tested), so the choice only affects
speed. Filters run as soon as every variable they mention is bound.

Filter comparisons follow SPARQL's error semantics: numeric literals compare
by value (integer promotes to decimal), plain strings lexically, IRIs support
(in)equality only; a type-incompatible or unbound comparison is an error,
errors reject the row at the filter, and propagate through &&/|| with
error && False == False, error || True == True.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from decimal import Decimal

from ..rdf import Dataset, Iri, Literal, Term
from .ast import Comparison, FilterExpr, Query, TriplePattern, Variable

Binding = dict[str, Term]


@dataclass
class ResultTable:
    vars: list[str]
    rows: list[Binding] = field(default_factory=list)


_ERROR = object()  # filter evaluation error marker (SPARQL "type error")


def _numeric(term: Term) -> Decimal | None:
    if isinstance(term, Literal):
        return term.numeric_value()
    return None


def _compare(op: str, left: Term, right: Term):
    ln, rn = _numeric(left), _numeric(right)
    if ln is not None and rn is not None:
        table = {
            "=": ln == rn,
            "!=": ln != rn,
            "<": ln < rn,
            "<=": ln <= rn,
            ">": ln > rn,
            ">=": ln >= rn,
        }
        return table[op]
    if isinstance(left, Iri) and isinstance(right, Iri):
        if op == "=":
            return left == right
        if op == "!=":
            return left != right
        return _ERROR
    if (
        isinstance(left, Literal)
        and isinstance(right, Literal)
        and left.lang is None
        and right.lang is None
        and ln is None
        and rn is None
        and left.datatype == right.datatype
    ):
        table = {
            "=": left.lexical == right.lexical,
            "!=": left.lexical != right.lexical,
            "<": left.lexical < right.lexical,
            "<=": left.lexical <= right.lexical,
            ">": left.lexical > right.lexical,
            ">=": left.lexical >= right.lexical,
        }
        return table[op]
    if op == "=" or op == "!=":
        # mixed literal kinds: term equality still decides = / != when both
        # are literals of the same shape; anything else is a type error
        if isinstance(left, Literal) and isinstance(right, Literal) and left.datatype == right.datatype:
            return (left == right) if op == "=" else (left != right)
    return _ERROR


def _eval_filter(expr: FilterExpr, binding: Binding):
    if isinstance(expr, Comparison):
        left = binding.get(expr.left.name, _ERROR) if isinstance(expr.left, Variable) else expr.left
        right = binding.get(expr.right.name, _ERROR) if isinstance(expr.right, Variable) else expr.right
        if left is _ERROR or right is _ERROR:
            return _ERROR
        return _compare(expr.op, left, right)
    left = _eval_filter(expr.left, binding)
    right = _eval_filter(expr.right, binding)
    if expr.op == "and":
        if left is False or right is False:
            return False
        if left is _ERROR or right is _ERROR:
            return _ERROR
        return True
    if left is True or right is True:
        return True
    if left is _ERROR or right is _ERROR:
        return _ERROR
    return False


def _bound_term(term, binding: Binding):
    """Constant for index lookup: pattern constant or already-bound variable."""
    if isinstance(term, Variable):
        return binding.get(term.name)
    return term


def _match_pattern(dataset: Dataset, pattern: TriplePattern, binding: Binding):
    s = _bound_term(pattern.subject, binding)
    p = _bound_term(pattern.predicate, binding)
    o = _bound_term(pattern.object, binding)
    if p is not None and not isinstance(p, Iri):
        return  # a variable predicate bound to a literal/blank can never match
    for triple in dataset.match(s, p, o):
        merged = dict(binding)
        ok = True
        for pattern_term, value in (
            (pattern.subject, triple.subject),
            (pattern.predicate, triple.predicate),
            (pattern.object, triple.object),
        ):
            if isinstance(pattern_term, Variable):
                current = merged.get(pattern_term.name)
                if current is None:
                    merged[pattern_term.name] = value
                elif current != value:
                    ok = False
                    break
        if ok:
            yield merged


def _selectivity(dataset: Dataset, pattern: TriplePattern, bound: set[str]) -> tuple:
    def resolved(term):
        return not isinstance(term, Variable) or term.name in bound

    s, p, o = (
        term if not isinstance(term, Variable) else None
        for term in (pattern.subject, pattern.predicate, pattern.object)
    )
    determined = sum(1 for t in (pattern.subject, pattern.predicate, pattern.object) if resolved(t))
    # cardinality estimate over the constant positions only (bound variables
    # count toward determinedness but their value varies per row)
    estimate = dataset.count(s, p if isinstance(p, Iri) else None, o)
    return (-determined, estimate)


def solve_bgp(dataset: Dataset, patterns: list[TriplePattern], filters: list[FilterExpr]) -> list[Binding]:
    """All solution bindings of the pattern conjunction surviving all filters."""
    remaining = list(patterns)
    pending = list(filters)
    solutions: list[Binding] = [{}]
    bound: set[str] = set()

    def apply_ready_filters():
        nonlocal solutions, pending
        ready = [f for f in pending if f.variables() <= bound]
        if ready:
            pending = [f for f in pending if not (f.variables() <= bound)]
            for f in ready:
                solutions = [b for b in solutions if _eval_filter(f, b) is True]

    while remaining and solutions:
        remaining.sort(key=lambda pat: _selectivity(dataset, pat, bound))
        pattern = remaining.pop(0)
        new_solutions: list[Binding] = []
        for binding in solutions:
            new_solutions.extend(_match_pattern(dataset, pattern, binding))
        solutions = new_solutions
        bound |= pattern.variables()
        apply_ready_filters()

    # filters that never had all variables bound reject every row (their
    # comparison evaluates to error), matching post-join application
    if pending:
        solutions = [b for b in solutions if all(_eval_filter(f, b) is True for f in pending)]
    return solutions


def _term_order_key(term: Term):
    if isinstance(term, Literal):
        num = term.numeric_value()
        if num is not None:
            return (0, num, term.lexical, term.datatype.value, "")
        return (1, 0, term.lexical, term.datatype.value, term.lang or "")
    if isinstance(term, Iri):
        return (2, 0, term.value, "", "")
    return (3, 0, term.label, "", "")


def _serialize_for_tiebreak(term: Term | None) -> str:
    if term is None:
        return ""
    return repr(term)


def evaluate(dataset: Dataset, query: Query) -> ResultTable:
    """Solutions of the query's BGP after filters, ordering, projection,
    DISTINCT and OFFSET/LIMIT, in a fully deterministic row order."""
    solutions = solve_bgp(dataset, query.patterns, query.filters)

    if query.order_by:
        projected_names = [v.name for v in query.projection]

        def row_cmp(a: Binding, b: Binding) -> int:
            for key in query.order_by:
                left, right = a.get(key.variable.name), b.get(key.variable.name)
                if left is None and right is None:
                    continue
                # rows lacking the sort variable sort last, regardless of direction
                if left is None:
                    return 1
                if right is None:
                    return -1
                lk, rk = _term_order_key(left), _term_order_key(right)
                if lk == rk:
                    continue
                outcome = -1 if lk < rk else 1
                return -outcome if key.descending else outcome
            left_tuple = tuple(_serialize_for_tiebreak(a.get(name)) for name in projected_names)
            right_tuple = tuple(_serialize_for_tiebreak(b.get(name)) for name in projected_names)
            if left_tuple == right_tuple:
                return 0
            return -1 if left_tuple < right_tuple else 1

        solutions = sorted(solutions, key=functools.cmp_to_key(row_cmp))

    names = [v.name for v in query.projection]
    rows: list[Binding] = []
    for solution in solutions:
        rows.append({name: solution[name] for name in names if name in solution})

    if query.distinct:
        seen = set()
        unique: list[Binding] = []
        for row in rows:
            key = tuple(sorted((k, repr(v)) for k, v in row.items()))
            if key not in seen:
                seen.add(key)
                unique.append(row)
        rows = unique

    if query.offset:
        rows = rows[query.offset :]
    if query.limit is not None:
        rows = rows[: query.limit]
    return ResultTable(vars=names, rows=rows)
