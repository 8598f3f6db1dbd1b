"""RDF term and triple model.

Terms are immutable; equality is structural. Two literals are equal only when
lexical form, datatype and language tag all agree — value-based numeric
comparison lives in the query layer, not here, so that graphs keep proper
set semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"


def _is_absolute_iri(value: str) -> bool:
    # absolute = has a scheme: ALPHA (ALPHA / DIGIT / "+" / "-" / ".")* ":"
    head, sep, _ = value.partition(":")
    if not sep or not head or not head[0].isalpha():
        return False
    return all(c.isalnum() or c in "+-." for c in head)


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        if not _is_absolute_iri(self.value):
            raise ValueError(f"IRI is not absolute: {self.value!r}")

    def local_name(self) -> str:
        """Tail after the last '#' or '/', used for tokenized search."""
        for sep in ("#", "/"):
            if sep in self.value:
                return self.value.rsplit(sep, 1)[1]
        return self.value.rsplit(":", 1)[1]

    def __repr__(self):
        return f"<{self.value}>"


@dataclass(frozen=True, order=True)
class BlankNode:
    label: str

    def __repr__(self):
        return f"_:{self.label}"


XSD_STRING = Iri(XSD + "string")
XSD_INTEGER = Iri(XSD + "integer")
XSD_DECIMAL = Iri(XSD + "decimal")
XSD_DOUBLE = Iri(XSD + "double")
XSD_BOOLEAN = Iri(XSD + "boolean")
XSD_DATE = Iri(XSD + "date")
RDF_TYPE = Iri(RDF + "type")
RDF_LANG_STRING = Iri(RDF + "langString")

NUMERIC_DATATYPES = frozenset({XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE})

_INTEGER_CHARS = frozenset("+-0123456789")


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Iri = XSD_STRING
    lang: str | None = field(default=None)

    def __post_init__(self):
        if self.lang is not None:
            object.__setattr__(self, "datatype", RDF_LANG_STRING)
        if self.datatype in NUMERIC_DATATYPES and self.numeric_value() is None:
            raise ValueError(f"invalid {self.datatype.local_name()} lexical form: {self.lexical!r}")

    def numeric_value(self) -> Decimal | None:
        """Decimal value for numeric datatypes, None otherwise."""
        if self.datatype not in NUMERIC_DATATYPES:
            return None
        text = self.lexical.strip()
        if self.datatype == XSD_INTEGER and not (text and set(text) <= _INTEGER_CHARS):
            return None
        try:
            return Decimal(text)
        except InvalidOperation:
            return None

    def __repr__(self):
        if self.lang:
            return f'"{self.lexical}"@{self.lang}'
        if self.datatype == XSD_STRING:
            return f'"{self.lexical}"'
        return f'"{self.lexical}"^^<{self.datatype.value}>'


Term = Iri | BlankNode | Literal
Subject = Iri | BlankNode


@dataclass(frozen=True)
class Triple:
    subject: Subject
    predicate: Iri
    object: Term

    def __post_init__(self):
        if isinstance(self.subject, Literal):
            raise ValueError("triple subject cannot be a literal")
        if not isinstance(self.predicate, Iri):
            raise ValueError("triple predicate must be an IRI")

    def __repr__(self):
        return f"({self.subject!r} {self.predicate!r} {self.object!r})"


def integer(value: int) -> Literal:
    return Literal(str(int(value)), XSD_INTEGER)


def decimal(value: Decimal | int | float | str) -> Literal:
    dec = value if isinstance(value, Decimal) else Decimal(str(value))
    if dec == dec.to_integral_value():
        return Literal(str(int(dec)), XSD_INTEGER)
    return Literal(format(dec.normalize(), "f"), XSD_DECIMAL)


def string(value: str) -> Literal:
    return Literal(value, XSD_STRING)


def term_sort_key(term: Term) -> tuple:
    """Total, deterministic order over ground terms (blanks sort by label)."""
    if isinstance(term, Literal):
        num = term.numeric_value()
        if num is not None:
            return (0, 0, num, term.lexical, term.datatype.value)
        return (0, 1, term.lexical, term.datatype.value, term.lang or "")
    if isinstance(term, Iri):
        return (1, 0, term.value)
    return (2, 0, term.label)
