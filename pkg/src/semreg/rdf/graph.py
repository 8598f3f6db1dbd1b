"""Named graphs, the dataset union and its SPO/POS/OSP indexes.

A Dataset is an immutable snapshot: mutators return a new Dataset and never
touch the old one, so readers can hold a snapshot across a concurrent write.
Triple buckets are insertion-ordered dicts rather than sets — iteration order
must be stable across processes for reproducible query output.
"""

from __future__ import annotations

import threading
from typing import Callable, Iterable, Iterator

from .terms import Iri, Term, Triple
from ..errors import UnknownPrefixError


class Graph:
    """A named set of triples with set semantics and stable iteration order."""

    def __init__(self, name: Iri, triples: Iterable[Triple] = ()):
        self.name = name
        self._triples: dict[Triple, None] = dict.fromkeys(triples)

    def add(self, triple: Triple) -> None:
        self._triples.setdefault(triple, None)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.name == other.name
            and self._triples.keys() == other._triples.keys()
        )

    def __repr__(self):
        return f"Graph({self.name!r}, {len(self)} triples)"


class Dataset:
    """Union of named graphs, indexed s→p→o, p→o→s and o→s→p."""

    def __init__(self, graphs: Iterable[Graph] = ()):
        self.graphs: dict[Iri, Graph] = {}
        for graph in graphs:
            if graph.name in self.graphs:
                raise ValueError(f"duplicate graph name: {graph.name!r}")
            self.graphs[graph.name] = graph
        self._spo: dict[Term, dict[Iri, dict[Term, None]]] = {}
        self._pos: dict[Iri, dict[Term, dict[Term, None]]] = {}
        self._osp: dict[Term, dict[Term, dict[Iri, None]]] = {}
        self._subject_graph: dict[Term, Iri] = {}
        self._size = 0
        for graph in self.graphs.values():
            for t in graph:
                self._index(t)
                self._subject_graph.setdefault(t.subject, graph.name)

    def _index(self, t: Triple) -> None:
        spo = self._spo.setdefault(t.subject, {}).setdefault(t.predicate, {})
        if t.object in spo:
            return  # same triple present in another named graph
        spo[t.object] = None
        self._pos.setdefault(t.predicate, {}).setdefault(t.object, {})[t.subject] = None
        self._osp.setdefault(t.object, {}).setdefault(t.subject, {})[t.predicate] = None
        self._size += 1

    # --- snapshot mutators ----------------------------------------------

    def with_graph(self, graph: Graph) -> "Dataset":
        """New snapshot with `graph` inserted, replacing any same-named graph."""
        graphs = [g for g in self.graphs.values() if g.name != graph.name]
        graphs.append(graph)
        return Dataset(graphs)

    def without_graph(self, name: Iri) -> "Dataset":
        return Dataset(g for g in self.graphs.values() if g.name != name)

    # --- reads ------------------------------------------------------------

    def __len__(self) -> int:
        return self._size

    def triples(self) -> Iterator[Triple]:
        return self.match()

    def graph_of(self, subject: Term) -> Iri | None:
        """Name of the first graph asserting any triple about `subject`."""
        return self._subject_graph.get(subject)

    def count(self, s: Term | None = None, p: Iri | None = None, o: Term | None = None) -> int:
        return sum(1 for _ in self.match(s, p, o))

    def match(
        self,
        s: Term | None = None,
        p: Iri | None = None,
        o: Term | None = None,
    ) -> Iterator[Triple]:
        """All union triples agreeing with the bound positions.

        Picks the index whose key prefix covers the most bound positions:
        SPO for s/sp/spo, POS for p/po, OSP for o/os.
        """
        if s is not None:
            by_p = self._spo.get(s)
            if by_p is None:
                return
            if p is not None:
                objects = by_p.get(p)
                if objects is None:
                    return
                if o is not None:
                    if o in objects:
                        yield Triple(s, p, o)
                    return
                for obj in objects:
                    yield Triple(s, p, obj)
                return
            if o is not None:
                preds = self._osp.get(o, {}).get(s)
                if preds is None:
                    return
                for pred in preds:
                    yield Triple(s, pred, o)
                return
            for pred, objects in by_p.items():
                for obj in objects:
                    yield Triple(s, pred, obj)
            return
        if p is not None:
            by_o = self._pos.get(p)
            if by_o is None:
                return
            if o is not None:
                for subj in by_o.get(o, {}):
                    yield Triple(subj, p, o)
                return
            for obj, subjects in by_o.items():
                for subj in subjects:
                    yield Triple(subj, p, obj)
            return
        if o is not None:
            for subj, preds in self._osp.get(o, {}).items():
                for pred in preds:
                    yield Triple(subj, pred, o)
            return
        for subj, by_p in self._spo.items():
            for pred, objects in by_p.items():
                for obj in objects:
                    yield Triple(subj, pred, obj)

    def subjects_of_type(self, type_iri: Iri) -> list[Term]:
        from .terms import RDF_TYPE

        return [t.subject for t in self.match(None, RDF_TYPE, type_iri)]


class DatasetStore:
    """Single-writer snapshot holder: reads are lock-free, writes serialized."""

    def __init__(self, dataset: Dataset | None = None):
        self._dataset = dataset if dataset is not None else Dataset()
        self._write_lock = threading.Lock()

    def snapshot(self) -> Dataset:
        return self._dataset

    def update(self, fn: Callable[[Dataset], Dataset]) -> Dataset:
        with self._write_lock:
            new = fn(self._dataset)
            self._dataset = new
            return new


class PrefixMap:
    """prefix label → namespace IRI, with longest-match compaction."""

    def __init__(self, bindings: dict[str, str] | None = None):
        self._bindings: dict[str, str] = dict(bindings or {})

    def bind(self, label: str, namespace: str) -> None:
        self._bindings[label] = namespace

    def merged_with(self, other: "PrefixMap") -> "PrefixMap":
        merged = dict(self._bindings)
        merged.update(other._bindings)
        return PrefixMap(merged)

    def items(self):
        return self._bindings.items()

    def __contains__(self, label: str) -> bool:
        return label in self._bindings

    def expand(self, label: str, local: str) -> Iri:
        if label not in self._bindings:
            raise UnknownPrefixError(label)
        return Iri(self._bindings[label] + local)

    def compact(self, iri: Iri) -> str | None:
        """`label:local` under the longest matching namespace, if the local
        part is a clean prefixed-name tail; None when no binding applies."""
        best: tuple[str, str] | None = None
        for label, ns in self._bindings.items():
            if iri.value.startswith(ns) and (best is None or len(ns) > len(best[1])):
                best = (label, ns)
        if best is None:
            return None
        label, ns = best
        local = iri.value[len(ns):]
        if local and _is_local_name(local):
            return f"{label}:{local}"
        return None


def _is_local_name(local: str) -> bool:
    if local.endswith("."):
        return False
    return all(c.isalnum() or c in "_-." for c in local)
