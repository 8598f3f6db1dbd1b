"""Turtle parsing and serialization.

Supported surface: ``@prefix``/``PREFIX`` (and ``@base``/``BASE``), ``a``,
predicate lists with ``;``, object lists with ``,``, anonymous blank nodes
``[ ... ]``, labeled blank nodes ``_:x``, quoted literals with ``^^datatype``
or ``@lang``, bare numeric/boolean shorthand and ``#`` comments. Collections
``( ... )`` are rejected — nothing in this registry needs them.

Blank node labels are freshly scoped per parse: a document label ``_:x`` maps
to an internal ``b<n>`` id numbered in first-mention order, so two parses of
the same document yield equal (not merely isomorphic) graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import TurtleSyntaxError, UnknownPrefixError
from .graph import Graph, PrefixMap
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    RDF_LANG_STRING,
    BlankNode,
    Iri,
    Literal,
    Term,
    Triple,
    term_sort_key,
)

DEFAULT_PARSED_GRAPH_NAME = Iri("urn:graph:parsed")

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _is_name_char(c: str) -> bool:
    # c may be "" at end of input; `"" in "_-"` is True, so guard explicitly
    return bool(c) and (c.isalnum() or c in "_-")


@dataclass
class _Token:
    kind: str
    value: str
    line: int
    column: int
    # for PNAME tokens
    prefix: str = ""
    local: str = ""


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def error(self, message: str, token: str | None = None) -> TurtleSyntaxError:
        return TurtleSyntaxError(message, self.line, self.column, token)

    def _advance(self, n: int = 1) -> str:
        chunk = self.text[self.pos : self.pos + n]
        for c in chunk:
            if c == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
        self.pos += n
        return chunk

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def _skip_ws_and_comments(self) -> None:
        while self.pos < len(self.text):
            c = self._peek()
            if c in " \t\r\n":
                self._advance()
            elif c == "#":
                while self.pos < len(self.text) and self._peek() != "\n":
                    self._advance()
            else:
                return

    def tokens(self) -> list[_Token]:
        out = []
        while True:
            tok = self._next_token()
            out.append(tok)
            if tok.kind == "eof":
                return out

    def _next_token(self) -> _Token:
        self._skip_ws_and_comments()
        line, col = self.line, self.column
        if self.pos >= len(self.text):
            return _Token("eof", "", line, col)
        c = self._peek()

        if c == "<":
            return self._iriref(line, col)
        if c in "\"'":
            return self._string(line, col)
        if c == "@":
            return self._at_word(line, col)
        if c == "_" and self._peek(1) == ":":
            return self._blank_label(line, col)
        if c == "^" and self._peek(1) == "^":
            self._advance(2)
            return _Token("^^", "^^", line, col)
        if c in ".;,[]":
            # a dot can also start a decimal like .5 — numbers handle their own dot
            self._advance()
            return _Token(c, c, line, col)
        if c == "(" or c == ")":
            raise TurtleSyntaxError("collections are not supported", line, col, c)
        if c.isdigit() or (c in "+-" and (self._peek(1).isdigit() or self._peek(1) == ".")):
            return self._number(line, col)
        if c.isalpha() or c == ":":
            return self._pname_or_word(line, col)
        raise TurtleSyntaxError("unexpected character", line, col, c)

    def _iriref(self, line: int, col: int) -> _Token:
        self._advance()  # <
        out = []
        while True:
            if self.pos >= len(self.text):
                raise TurtleSyntaxError("unterminated IRI", line, col)
            c = self._advance()
            if c == ">":
                return _Token("iriref", "".join(out), line, col)
            if c in " \t\n\r<\"{}|^`":
                raise TurtleSyntaxError("illegal character in IRI", line, col, c)
            out.append(c)

    def _string(self, line: int, col: int) -> _Token:
        quote = self._advance()
        out = []
        while True:
            if self.pos >= len(self.text):
                raise TurtleSyntaxError("unterminated string literal", line, col)
            c = self._advance()
            if c == quote:
                return _Token("string", "".join(out), line, col)
            if c == "\n":
                raise TurtleSyntaxError("newline in single-quoted string", line, col)
            if c == "\\":
                esc = self._advance()
                if esc in _ESCAPES:
                    out.append(_ESCAPES[esc])
                elif esc == "u" or esc == "U":
                    width = 4 if esc == "u" else 8
                    hexdigits = self._advance(width)
                    if len(hexdigits) != width or any(h not in "0123456789abcdefABCDEF" for h in hexdigits):
                        raise TurtleSyntaxError("bad unicode escape", line, col, hexdigits)
                    out.append(chr(int(hexdigits, 16)))
                else:
                    raise TurtleSyntaxError("bad escape sequence", line, col, "\\" + esc)
            else:
                out.append(c)

    def _at_word(self, line: int, col: int) -> _Token:
        self._advance()  # @
        word = []
        while self._peek().isalnum() or self._peek() == "-":
            word.append(self._advance())
        text = "".join(word)
        if text in ("prefix", "base"):
            return _Token("@" + text, "@" + text, line, col)
        if not text:
            raise TurtleSyntaxError("dangling '@'", line, col)
        return _Token("langtag", text, line, col)

    def _blank_label(self, line: int, col: int) -> _Token:
        self._advance(2)  # _:
        label = self._scan_local()
        if not label:
            raise TurtleSyntaxError("blank node label expected after '_:'", line, col)
        return _Token("blank", label, line, col)

    def _number(self, line: int, col: int) -> _Token:
        out = []
        if self._peek() in ("+", "-"):
            out.append(self._advance())
        seen_dot = seen_exp = False
        while True:
            c = self._peek()
            if c.isdigit():
                out.append(self._advance())
            elif c == "." and not seen_dot and not seen_exp and self._peek(1).isdigit():
                seen_dot = True
                out.append(self._advance())
            elif c in ("e", "E") and not seen_exp and (self._peek(1).isdigit() or self._peek(1) in ("+", "-")):
                seen_exp = True
                out.append(self._advance())
                if self._peek() in ("+", "-"):
                    out.append(self._advance())
            else:
                break
        text = "".join(out)
        if seen_exp:
            kind = "double"
        elif seen_dot:
            kind = "decimal"
        else:
            kind = "integer"
        return _Token(kind, text, line, col)

    def _scan_local(self) -> str:
        out = []
        while True:
            c = self._peek()
            if _is_name_char(c):
                out.append(self._advance())
            elif c == "." and (_is_name_char(self._peek(1)) or self._peek(1) == "."):
                # dots are allowed inside a local name but a trailing dot
                # terminates the statement instead
                out.append(self._advance())
            else:
                return "".join(out)

    def _pname_or_word(self, line: int, col: int) -> _Token:
        out = []
        while _is_name_char(self._peek()):
            out.append(self._advance())
        word = "".join(out)
        if self._peek() == ":":
            self._advance()
            local = self._scan_local()
            return _Token("pname", f"{word}:{local}", line, col, prefix=word, local=local)
        if not word:
            raise TurtleSyntaxError("unexpected character", line, col, self._peek())
        return _Token("word", word, line, col)


class _Parser:
    def __init__(self, text: str, base: Iri | None, graph_name: Iri):
        self.tokens = _Lexer(text).tokens()
        self.i = 0
        self.base = base
        self.prefixes = PrefixMap()
        self.graph = Graph(graph_name)
        self._blank_counter = 0
        self._blank_labels: dict[str, BlankNode] = {}

    # --- token helpers ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise self.error(f"expected {kind!r}", tok)
        return tok

    def error(self, message: str, tok: _Token) -> TurtleSyntaxError:
        shown = tok.value if tok.kind != "eof" else "<end of input>"
        return TurtleSyntaxError(message, tok.line, tok.column, shown)

    def fresh_blank(self, label: str | None = None) -> BlankNode:
        if label is not None and label in self._blank_labels:
            return self._blank_labels[label]
        node = BlankNode(f"b{self._blank_counter}")
        self._blank_counter += 1
        if label is not None:
            self._blank_labels[label] = node
        return node

    # --- grammar ------------------------------------------------------------

    def parse(self) -> Graph:
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "@prefix" or (tok.kind == "word" and tok.value.lower() == "prefix"):
                self._prefix_directive(sparql_style=tok.kind == "word")
            elif tok.kind == "@base" or (tok.kind == "word" and tok.value.lower() == "base"):
                self._base_directive(sparql_style=tok.kind == "word")
            else:
                self._triples()
        return self.graph

    def _prefix_directive(self, sparql_style: bool) -> None:
        self.next()
        label_tok = self.expect("pname")
        if label_tok.local:
            raise self.error("prefix declaration expects 'label:'", label_tok)
        iri_tok = self.expect("iriref")
        self.prefixes.bind(label_tok.prefix, self._resolve(iri_tok).value)
        if not sparql_style:
            self.expect(".")
        elif self.peek().kind == ".":
            self.next()

    def _base_directive(self, sparql_style: bool) -> None:
        self.next()
        iri_tok = self.expect("iriref")
        self.base = self._resolve(iri_tok)
        if not sparql_style:
            self.expect(".")
        elif self.peek().kind == ".":
            self.next()

    def _resolve(self, tok: _Token) -> Iri:
        value = tok.value
        try:
            return Iri(value)
        except ValueError:
            if self.base is None:
                raise self.error("relative IRI without a base", tok) from None
            return Iri(_resolve_relative(self.base.value, value))

    def _triples(self) -> None:
        anon_subject = self.peek().kind == "["
        subject = self._subject()
        # `[ p o ] .` is a complete statement; a plain subject needs predicates
        if not (anon_subject and self.peek().kind == "."):
            self._predicate_object_list(subject)
        self.expect(".")

    def _subject(self) -> Iri | BlankNode:
        tok = self.peek()
        if tok.kind == "iriref":
            self.next()
            return self._resolve(tok)
        if tok.kind == "pname":
            self.next()
            return self._expand_pname(tok)
        if tok.kind == "blank":
            self.next()
            return self.fresh_blank(tok.value)
        if tok.kind == "[":
            return self._blank_property_list()
        raise self.error("expected subject", tok)

    def _expand_pname(self, tok: _Token) -> Iri:
        try:
            return self.prefixes.expand(tok.prefix, tok.local)
        except UnknownPrefixError:
            raise
        except ValueError:
            raise self.error("prefixed name expands to a relative IRI", tok) from None

    def _verb(self) -> Iri:
        tok = self.peek()
        if tok.kind == "word" and tok.value == "a":
            self.next()
            return RDF_TYPE
        if tok.kind == "iriref":
            self.next()
            return self._resolve(tok)
        if tok.kind == "pname":
            self.next()
            return self._expand_pname(tok)
        raise self.error("expected predicate", tok)

    def _predicate_object_list(self, subject: Iri | BlankNode) -> None:
        while True:
            predicate = self._verb()
            self._object_list(subject, predicate)
            if self.peek().kind != ";":
                return
            while self.peek().kind == ";":
                self.next()
            if self.peek().kind in (".", "]"):
                return

    def _object_list(self, subject: Iri | BlankNode, predicate: Iri) -> None:
        while True:
            obj = self._object()
            self.graph.add(Triple(subject, predicate, obj))
            if self.peek().kind != ",":
                return
            self.next()

    def _object(self) -> Term:
        tok = self.peek()
        if tok.kind == "iriref":
            self.next()
            return self._resolve(tok)
        if tok.kind == "pname":
            self.next()
            return self._expand_pname(tok)
        if tok.kind == "blank":
            self.next()
            return self.fresh_blank(tok.value)
        if tok.kind == "[":
            return self._blank_property_list()
        if tok.kind == "string":
            return self._literal()
        if tok.kind == "integer":
            self.next()
            return Literal(tok.value, XSD_INTEGER)
        if tok.kind == "decimal":
            self.next()
            return Literal(tok.value, XSD_DECIMAL)
        if tok.kind == "double":
            self.next()
            return Literal(tok.value, XSD_DOUBLE)
        if tok.kind == "word" and tok.value in ("true", "false"):
            self.next()
            return Literal(tok.value, XSD_BOOLEAN)
        raise self.error("expected object", tok)

    def _literal(self) -> Literal:
        tok = self.expect("string")
        nxt = self.peek()
        if nxt.kind == "^^":
            self.next()
            dt_tok = self.next()
            if dt_tok.kind == "iriref":
                datatype = self._resolve(dt_tok)
            elif dt_tok.kind == "pname":
                datatype = self._expand_pname(dt_tok)
            else:
                raise self.error("expected datatype IRI after '^^'", dt_tok)
            try:
                return Literal(tok.value, datatype)
            except ValueError as exc:
                raise self.error(str(exc), tok) from None
        if nxt.kind == "langtag":
            self.next()
            return Literal(tok.value, RDF_LANG_STRING, lang=nxt.value)
        return Literal(tok.value, XSD_STRING)

    def _blank_property_list(self) -> BlankNode:
        self.expect("[")
        node = self.fresh_blank()
        if self.peek().kind != "]":
            self._predicate_object_list(node)
        self.expect("]")
        return node


def _resolve_relative(base: str, ref: str) -> str:
    """Minimal RFC 3986-style merge, sufficient for fixture-scale documents."""
    if ref.startswith("#") or ref.startswith("?"):
        stem = base.split("#", 1)[0]
        if ref.startswith("?"):
            stem = stem.split("?", 1)[0]
        return stem + ref
    scheme_end = base.find(":")
    rest = base[scheme_end + 1 :]
    if rest.startswith("//"):
        authority_end = len(base)
        for i in range(scheme_end + 3, len(base)):
            if base[i] in "/?#":
                authority_end = i
                break
        root = base[:authority_end]
    else:
        root = base[: scheme_end + 1]
    if ref.startswith("/"):
        return root + ref
    directory = base.rsplit("/", 1)[0] + "/" if "/" in base[scheme_end + 3 :] or base.endswith("/") else base + "/"
    if base[scheme_end + 1 : scheme_end + 3] == "//" and "/" not in base[scheme_end + 3 :]:
        directory = base + "/"
    return directory + ref


def parse_turtle(text: str, base: Iri | None = None, graph_name: Iri = DEFAULT_PARSED_GRAPH_NAME) -> Graph:
    """Parse a Turtle document into a Graph named `graph_name`."""
    return _Parser(text, base, graph_name).parse()


# --- serialization ---------------------------------------------------------


def _escape(text: str) -> str:
    out = []
    for c in text:
        if c == "\\":
            out.append("\\\\")
        elif c == '"':
            out.append('\\"')
        elif c == "\n":
            out.append("\\n")
        elif c == "\r":
            out.append("\\r")
        elif c == "\t":
            out.append("\\t")
        else:
            out.append(c)
    return "".join(out)


def _term_text(
    term: Term,
    prefixes: PrefixMap,
    blank_names: dict[BlankNode, str],
    predicate: bool = False,
) -> str:
    if isinstance(term, Iri):
        if predicate and term == RDF_TYPE:
            return "a"
        compacted = prefixes.compact(term)
        return compacted if compacted is not None else f"<{term.value}>"
    if isinstance(term, BlankNode):
        return "_:" + blank_names[term]
    quoted = f'"{_escape(term.lexical)}"'
    if term.lang:
        return f"{quoted}@{term.lang}"
    if term.datatype == XSD_STRING:
        return quoted
    dt = prefixes.compact(term.datatype)
    return f"{quoted}^^{dt}" if dt is not None else f'{quoted}^^<{term.datatype.value}>'


def serialize_turtle(graph: Graph, prefixes: PrefixMap) -> str:
    """Deterministic Turtle text that reparses isomorphic to `graph`.

    Subjects come out sorted, predicate-object pairs grouped with ';' and
    object lists with ','; blank nodes are relabeled _:b0, _:b1, ... in
    first-use order over the sorted triple sequence.
    """
    lines = [f"@prefix {label}: <{ns}> ." for label, ns in sorted(prefixes.items())]

    def triple_key(t: Triple):
        # rdf:type sorts before other predicates inside a subject block
        pred_key = (0, "") if t.predicate == RDF_TYPE else (1, t.predicate.value)
        return (term_sort_key(t.subject), pred_key, term_sort_key(t.object))

    ordered = sorted(graph, key=triple_key)

    blank_names: dict[BlankNode, str] = {}
    for t in ordered:
        for term in (t.subject, t.object):
            if isinstance(term, BlankNode) and term not in blank_names:
                blank_names[term] = f"b{len(blank_names)}"

    i = 0
    while i < len(ordered):
        subject = ordered[i].subject
        block = []
        while i < len(ordered) and ordered[i].subject == subject:
            block.append(ordered[i])
            i += 1
        if lines:
            lines.append("")
        subj_text = _term_text(subject, prefixes, blank_names)
        parts = []
        j = 0
        while j < len(block):
            predicate = block[j].predicate
            objects = []
            while j < len(block) and block[j].predicate == predicate:
                objects.append(_term_text(block[j].object, prefixes, blank_names))
                j += 1
            parts.append(f"{_term_text(predicate, prefixes, blank_names, predicate=True)} {', '.join(objects)}")
        lines.append(f"{subj_text} " + " ;\n    ".join(parts) + " .")
    return "\n".join(lines) + "\n"
