"""Parser for the supported SPARQL subset.

Covers SELECT with a basic graph pattern, FILTER comparisons joined by
``&&``/``||``, DISTINCT, ORDER BY and LIMIT/OFFSET — enough to run the
registry's discovery and matchmaking queries unmodified. Anything else from
SPARQL 1.1 is rejected up front with UnsupportedFeatureError naming the
construct, so callers get a precise answer instead of silently wrong rows.
"""

from __future__ import annotations

from ..errors import QuerySyntaxError, UnknownPrefixError, UnsupportedFeatureError
from ..rdf import (
    Iri,
    Literal,
    PrefixMap,
    RDF_LANG_STRING,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)
from ..catalog import PREFIXES as DEFAULT_PREFIXES
from .ast import BooleanExpr, Comparison, FilterExpr, OrderKey, Query, TriplePattern, Variable

_UNSUPPORTED_KEYWORDS = {
    "OPTIONAL",
    "UNION",
    "MINUS",
    "GRAPH",
    "SERVICE",
    "BIND",
    "VALUES",
    "EXISTS",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "INSERT",
    "DELETE",
    "FROM",
    "GROUP",
    "HAVING",
    "COUNT",
    "SUM",
    "AVG",
    "MIN",
    "MAX",
    "SAMPLE",
    "REDUCED",
}

_COMPARISON_OPS = ("<=", ">=", "!=", "=", "<", ">")


class _Token:
    __slots__ = ("kind", "value", "line", "column", "prefix", "local")

    def __init__(self, kind, value, line, column, prefix="", local=""):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column
        self.prefix = prefix
        self.local = local


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int = 1) -> str:
        nonlocal i, line, col
        chunk = text[i : i + k]
        for c in chunk:
            if c == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k
        return chunk

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance()
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if c == "?" or c == "$":
            advance()
            name = []
            while i < n and (text[i].isalnum() or text[i] == "_"):
                name.append(advance())
            if not name:
                raise QuerySyntaxError("variable name expected", start_line, start_col, c)
            tokens.append(_Token("var", "".join(name), start_line, start_col))
            continue
        if c == "<":
            # '<' is a comparison when what follows can start an operand,
            # otherwise it opens an IRI
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt == "=" or nxt in " \t\r\n?$" or nxt.isdigit() or nxt in "+-":
                op = advance()
                if i < n and text[i] == "=":
                    op += advance()
                tokens.append(_Token("op", op, start_line, start_col))
                continue
            advance()
            out = []
            while i < n and text[i] != ">":
                if text[i] in " \t\n\r<\"{}|^`":
                    raise QuerySyntaxError("illegal character in IRI", start_line, start_col, text[i])
                out.append(advance())
            if i >= n:
                raise QuerySyntaxError("unterminated IRI", start_line, start_col)
            advance()
            tokens.append(_Token("iriref", "".join(out), start_line, start_col))
            continue
        if c in "\"'":
            quote = advance()
            out = []
            while True:
                if i >= n:
                    raise QuerySyntaxError("unterminated string", start_line, start_col)
                ch = advance()
                if ch == quote:
                    break
                if ch == "\\":
                    esc = advance()
                    mapping = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "'": "'", "\\": "\\"}
                    if esc not in mapping:
                        raise QuerySyntaxError("bad escape in string", start_line, start_col, "\\" + esc)
                    out.append(mapping[esc])
                else:
                    out.append(ch)
            tokens.append(_Token("string", "".join(out), start_line, start_col))
            continue
        if c == "^" and i + 1 < n and text[i + 1] == "^":
            advance(2)
            tokens.append(_Token("^^", "^^", start_line, start_col))
            continue
        if c == "@":
            advance()
            tag = []
            while i < n and (text[i].isalnum() or text[i] == "-"):
                tag.append(advance())
            tokens.append(_Token("langtag", "".join(tag), start_line, start_col))
            continue
        if c in "{}();,.*":
            advance()
            tokens.append(_Token(c, c, start_line, start_col))
            continue
        if c in "=!>":
            op = advance()
            if i < n and text[i] == "=":
                op += advance()
            if op == "!":
                raise QuerySyntaxError("unexpected '!'", start_line, start_col, "!")
            tokens.append(_Token("op", op, start_line, start_col))
            continue
        if c == "&" or c == "|":
            advance()
            if i < n and text[i] == c:
                advance()
                tokens.append(_Token("bool", "&&" if c == "&" else "||", start_line, start_col))
                continue
            if c == "|":
                tokens.append(_Token("op", "|", start_line, start_col))
                continue
            raise QuerySyntaxError("unexpected '&'", start_line, start_col, c)
        if c in "/^" or (c == "+" and not (i + 1 < n and (text[i + 1].isdigit() or text[i + 1] == "."))):
            advance()
            tokens.append(_Token("op", c, start_line, start_col))
            continue
        if c.isdigit() or (c in "+-" and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] == ".")):
            out = [advance()]
            seen_dot = seen_exp = False
            while i < n:
                ch = text[i]
                if ch.isdigit():
                    out.append(advance())
                elif ch == "." and not seen_dot and not seen_exp and i + 1 < n and text[i + 1].isdigit():
                    seen_dot = True
                    out.append(advance())
                elif ch in "eE" and not seen_exp:
                    seen_exp = True
                    out.append(advance())
                    if i < n and text[i] in "+-":
                        out.append(advance())
                else:
                    break
            kind = "double" if seen_exp else "decimal" if seen_dot else "integer"
            tokens.append(_Token(kind, "".join(out), start_line, start_col))
            continue
        if c.isalpha() or c == "_" or c == ":":
            word = []
            while i < n and (text[i].isalnum() or text[i] in "_-"):
                word.append(advance())
            prefix = "".join(word)
            if i < n and text[i] == ":":
                advance()
                local = []
                while i < n and (text[i].isalnum() or text[i] in "_-"):
                    local.append(advance())
                tokens.append(
                    _Token("pname", f"{prefix}:{''.join(local)}", start_line, start_col, prefix, "".join(local))
                )
            else:
                tokens.append(_Token("word", prefix, start_line, start_col))
            continue
        raise QuerySyntaxError("unexpected character", start_line, start_col, c)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _QueryParser:
    def __init__(self, text: str, base_prefixes: PrefixMap):
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes = base_prefixes

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, message: str, tok: _Token) -> QuerySyntaxError:
        shown = tok.value if tok.kind != "eof" else "<end of input>"
        return QuerySyntaxError(message, tok.line, tok.column, shown)

    def _keyword(self, tok: _Token) -> str | None:
        return tok.value.upper() if tok.kind == "word" else None

    def _reject_unsupported(self, tok: _Token) -> None:
        kw = self._keyword(tok)
        if kw in _UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeatureError(kw)

    def parse(self) -> Query:
        while True:
            tok = self.peek()
            if self._keyword(tok) == "PREFIX":
                self.next()
                label_tok = self.next()
                if label_tok.kind != "pname" or label_tok.local:
                    raise self.error("expected 'label:' after PREFIX", label_tok)
                iri_tok = self.next()
                if iri_tok.kind != "iriref":
                    raise self.error("expected IRI in PREFIX declaration", iri_tok)
                merged = PrefixMap({label: ns for label, ns in self.prefixes.items()})
                merged.bind(label_tok.prefix, iri_tok.value)
                self.prefixes = merged
            elif self._keyword(tok) == "BASE":
                raise UnsupportedFeatureError("BASE")
            else:
                break

        tok = self.next()
        self._reject_unsupported(tok)
        if self._keyword(tok) != "SELECT":
            raise self.error("expected SELECT", tok)

        distinct = False
        if self._keyword(self.peek()) in ("DISTINCT", "REDUCED"):
            kw = self.next()
            if self._keyword(kw) == "REDUCED":
                raise UnsupportedFeatureError("REDUCED")
            distinct = True

        projection: list[Variable] = []
        select_all = False
        while True:
            tok = self.peek()
            if tok.kind == "var":
                self.next()
                projection.append(Variable(tok.value))
            elif tok.kind == "*" and not projection:
                self.next()
                select_all = True
                break
            elif tok.kind == "(":
                raise UnsupportedFeatureError("expression projection")
            else:
                break
        if not projection and not select_all:
            raise self.error("projection expected after SELECT", self.peek())

        tok = self.next()
        if self._keyword(tok) != "WHERE":
            self._reject_unsupported(tok)
            if tok.kind != "{":
                raise self.error("expected WHERE", tok)
            braced_already = True
        else:
            braced_already = False
        if not braced_already:
            open_tok = self.next()
            if open_tok.kind != "{":
                raise self.error("expected '{'", open_tok)

        patterns: list[TriplePattern] = []
        filters: list[FilterExpr] = []
        self._group_graph_pattern(patterns, filters)

        order_by: list[OrderKey] = []
        limit = offset = None
        while self.peek().kind != "eof":
            tok = self.peek()
            kw = self._keyword(tok)
            if kw == "ORDER":
                self.next()
                by = self.next()
                if self._keyword(by) != "BY":
                    raise self.error("expected BY after ORDER", by)
                order_by.extend(self._order_keys())
            elif kw == "LIMIT":
                self.next()
                limit = self._count()
            elif kw == "OFFSET":
                self.next()
                offset = self._count()
            else:
                self._reject_unsupported(tok)
                raise self.error("unexpected trailing content", tok)

        known = set()
        for p in patterns:
            known |= p.variables()
        for f in filters:
            known |= f.variables()
        if select_all:
            seen: list[Variable] = []
            for p in patterns:
                for term in (p.subject, p.predicate, p.object):
                    if isinstance(term, Variable) and term not in seen:
                        seen.append(term)
            projection = seen
        for v in projection:
            if v.name not in known:
                raise QuerySyntaxError(f"projected variable ?{v.name} is not used", 1, 1, f"?{v.name}")
        for key in order_by:
            if key.variable.name not in known:
                raise QuerySyntaxError(
                    f"ordering variable ?{key.variable.name} is not used", 1, 1, f"?{key.variable.name}"
                )
        return Query(
            projection=projection,
            patterns=patterns,
            filters=filters,
            distinct=distinct,
            order_by=order_by,
            limit=limit,
            offset=offset,
            prefixes=self.prefixes,
        )

    def _count(self) -> int:
        tok = self.next()
        if tok.kind != "integer":
            raise self.error("expected a non-negative integer", tok)
        value = int(tok.value)
        if value < 0:
            raise self.error("expected a non-negative integer", tok)
        return value

    def _order_keys(self) -> list[OrderKey]:
        keys = []
        while True:
            tok = self.peek()
            kw = self._keyword(tok)
            if kw in ("ASC", "DESC"):
                self.next()
                open_tok = self.next()
                if open_tok.kind != "(":
                    raise self.error("expected '(' after ASC/DESC", open_tok)
                var_tok = self.next()
                if var_tok.kind != "var":
                    raise self.error("expected variable in ORDER BY", var_tok)
                close_tok = self.next()
                if close_tok.kind != ")":
                    raise self.error("expected ')'", close_tok)
                keys.append(OrderKey(Variable(var_tok.value), descending=kw == "DESC"))
            elif tok.kind == "var":
                self.next()
                keys.append(OrderKey(Variable(tok.value)))
            else:
                if not keys:
                    raise self.error("expected ORDER BY key", tok)
                return keys

    def _group_graph_pattern(self, patterns: list[TriplePattern], filters: list[FilterExpr]) -> None:
        while True:
            tok = self.peek()
            if tok.kind == "}":
                self.next()
                return
            if tok.kind == "eof":
                raise self.error("unterminated group pattern", tok)
            if tok.kind == "{":
                raise UnsupportedFeatureError("nested group pattern")
            kw = self._keyword(tok)
            if kw == "FILTER":
                self.next()
                filters.append(self._filter())
                continue
            if kw == "SELECT":
                raise UnsupportedFeatureError("subquery")
            self._reject_unsupported(tok)
            self._triples_block(patterns)

    def _triples_block(self, patterns: list[TriplePattern]) -> None:
        subject = self._pattern_term(position="subject")
        while True:
            predicate = self._verb()
            while True:
                obj = self._pattern_term(position="object")
                patterns.append(TriplePattern(subject, predicate, obj))
                if self.peek().kind == ",":
                    self.next()
                    continue
                break
            if self.peek().kind == ";":
                while self.peek().kind == ";":
                    self.next()
                if self.peek().kind in (".", "}"):
                    break
                continue
            break
        if self.peek().kind == ".":
            self.next()

    def _verb(self):
        tok = self.peek()
        if tok.kind == "word" and tok.value == "a":
            self.next()
            return RDF_TYPE
        if tok.kind in ("iriref", "pname", "var"):
            term = self._pattern_term(position="predicate")
            nxt = self.peek()
            if nxt.kind in ("*", "op") and nxt.value in ("*", "+", "/", "^", "|"):
                raise UnsupportedFeatureError("property path")
            return term
        self._reject_unsupported(tok)
        raise self.error("expected predicate", tok)

    def _pattern_term(self, position: str):
        tok = self.next()
        if tok.kind == "var":
            return Variable(tok.value)
        if tok.kind == "iriref":
            try:
                return Iri(tok.value)
            except ValueError:
                raise self.error("relative IRIs are not allowed in queries", tok) from None
        if tok.kind == "pname":
            try:
                return self.prefixes.expand(tok.prefix, tok.local)
            except UnknownPrefixError:
                raise
        if position == "object":
            if tok.kind == "string":
                nxt = self.peek()
                if nxt.kind == "^^":
                    self.next()
                    dt_tok = self.next()
                    if dt_tok.kind == "iriref":
                        datatype = Iri(dt_tok.value)
                    elif dt_tok.kind == "pname":
                        datatype = self.prefixes.expand(dt_tok.prefix, dt_tok.local)
                    else:
                        raise self.error("expected datatype IRI", dt_tok)
                    try:
                        return Literal(tok.value, datatype)
                    except ValueError as exc:
                        raise self.error(str(exc), tok) from None
                if nxt.kind == "langtag":
                    self.next()
                    return Literal(tok.value, RDF_LANG_STRING, lang=nxt.value)
                return Literal(tok.value, XSD_STRING)
            if tok.kind == "integer":
                return Literal(tok.value, XSD_INTEGER)
            if tok.kind == "decimal":
                return Literal(tok.value, XSD_DECIMAL)
            if tok.kind == "double":
                return Literal(tok.value, XSD_DOUBLE)
            if tok.kind == "word" and tok.value in ("true", "false"):
                return Literal(tok.value, XSD_BOOLEAN)
            if tok.kind == "[":
                raise UnsupportedFeatureError("blank node patterns")
        self._reject_unsupported(tok)
        raise self.error(f"expected {position}", tok)

    def _filter(self) -> FilterExpr:
        open_tok = self.next()
        if open_tok.kind != "(":
            raise self.error("expected '(' after FILTER", open_tok)
        expr = self._or_expression()
        close_tok = self.next()
        if close_tok.kind != ")":
            raise self.error("expected ')'", close_tok)
        return expr

    def _or_expression(self) -> FilterExpr:
        left = self._and_expression()
        while self.peek().kind == "bool" and self.peek().value == "||":
            self.next()
            left = BooleanExpr("or", left, self._and_expression())
        return left

    def _and_expression(self) -> FilterExpr:
        left = self._primary_expression()
        while self.peek().kind == "bool" and self.peek().value == "&&":
            self.next()
            left = BooleanExpr("and", left, self._primary_expression())
        return left

    def _primary_expression(self) -> FilterExpr:
        if self.peek().kind == "(":
            self.next()
            expr = self._or_expression()
            close_tok = self.next()
            if close_tok.kind != ")":
                raise self.error("expected ')'", close_tok)
            return expr
        left = self._operand()
        op_tok = self.next()
        if op_tok.kind != "op" or op_tok.value not in _COMPARISON_OPS:
            if self._keyword(op_tok) in ("IN", "NOT"):
                raise UnsupportedFeatureError(self._keyword(op_tok))
            raise self.error("expected comparison operator", op_tok)
        right = self._operand()
        return Comparison(op_tok.value, left, right)

    def _operand(self):
        tok = self.next()
        if tok.kind == "var":
            return Variable(tok.value)
        if tok.kind == "iriref":
            return Iri(tok.value)
        if tok.kind == "pname":
            return self.prefixes.expand(tok.prefix, tok.local)
        if tok.kind == "integer":
            return Literal(tok.value, XSD_INTEGER)
        if tok.kind == "decimal":
            return Literal(tok.value, XSD_DECIMAL)
        if tok.kind == "double":
            return Literal(tok.value, XSD_DOUBLE)
        if tok.kind == "string":
            return Literal(tok.value, XSD_STRING)
        if tok.kind == "word":
            kw = tok.value.upper()
            if kw in ("REGEX", "BOUND", "STR", "LANG", "DATATYPE", "ISURI", "ISIRI", "ISLITERAL", "ISBLANK"):
                raise UnsupportedFeatureError(kw)
            if tok.value in ("true", "false"):
                return Literal(tok.value, XSD_BOOLEAN)
        raise self.error("expected filter operand", tok)


def parse_query(text: str, prefixes: PrefixMap | None = None) -> Query:
    """Parse a SELECT query; `prefixes` supplies ambient bindings that the
    query's own PREFIX declarations extend or override (the registry's
    vocabulary prefixes by default, so published queries run verbatim)."""
    base = DEFAULT_PREFIXES if prefixes is None else prefixes
    return _QueryParser(text, base).parse()
