"""Query AST for the supported SELECT subset."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..rdf import PrefixMap, Term


@dataclass(frozen=True)
class Variable:
    name: str

    def __repr__(self):
        return f"?{self.name}"


PatternTerm = Term | Variable


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.predicate, self.object) if isinstance(t, Variable)}


@dataclass(frozen=True)
class Comparison:
    op: str  # one of < <= > >= = !=
    left: PatternTerm
    right: PatternTerm

    def variables(self) -> set[str]:
        return {t.name for t in (self.left, self.right) if isinstance(t, Variable)}


@dataclass(frozen=True)
class BooleanExpr:
    op: str  # "and" | "or"
    left: "FilterExpr"
    right: "FilterExpr"

    def variables(self) -> set[str]:
        return self.left.variables() | self.right.variables()


FilterExpr = Comparison | BooleanExpr


@dataclass(frozen=True)
class OrderKey:
    variable: Variable
    descending: bool = False


@dataclass
class Query:
    projection: list[Variable]
    patterns: list[TriplePattern]
    filters: list[FilterExpr] = field(default_factory=list)
    distinct: bool = False
    order_by: list[OrderKey] = field(default_factory=list)
    limit: int | None = None
    offset: int | None = None
    prefixes: PrefixMap = field(default_factory=PrefixMap)

    def pattern_variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.patterns:
            out |= p.variables()
        return out
